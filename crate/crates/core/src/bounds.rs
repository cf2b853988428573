//! Distribution-free guarantees for the ERM estimator of g-vulnerability.
//!
//! `m` is the training size, `n` the validation size, `σ²` a bound on the
//! variance of `g(f(Y), X)`, `[a, b]` the gain range and `|H|` the size of
//! the hypothesis class. `|H|` is carried as its natural logarithm because
//! the class of all functions `Y → W` is astronomically large.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Error function, accurate to about 1e-15 on the real line.
///
/// For `|x| < 5` uses the everywhere-positive series
/// `erf x = (2/√π) e^{-x²} Σ 2ⁿ x^{2n+1} / (1·3·…·(2n+1))`; beyond, the
/// asymptotic expansion of `erfc`.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf(-x);
    }
    let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
    if x < 5.0 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term > sum * 1e-17 {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
        }
        (two_over_sqrt_pi * (-x2).exp() * sum).min(1.0)
    } else {
        // erfc x ≈ e^{-x²}/(x√π) · Σ (-1)ⁿ (2n-1)!! / (2x²)ⁿ, truncated at the
        // smallest term.
        let x2 = x * x;
        let mut term: f64 = 1.0;
        let mut sum = 1.0;
        for n in 1..60 {
            let next = -term * (2.0 * n as f64 - 1.0) / (2.0 * x2);
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += term;
        }
        let erfc = (-x2).exp() / (x * std::f64::consts::PI.sqrt()) * sum;
        1.0 - erfc
    }
}

/// `P(|V̂_n(f) − V(f)| ≥ ε) ≤ 2 exp(−n ε² / (2σ² + 2(b−a)ε/3))`, clipped to 1.
pub fn validation_deviation_prob(n: u64, sigma2: f64, range: (f64, f64), epsilon: f64) -> f64 {
    let width = range.1 - range.0;
    let denom = 2.0 * sigma2 + 2.0 * width * epsilon / 3.0;
    (2.0 * (-(n as f64) * epsilon * epsilon / denom).exp()).min(1.0)
}

/// `P(V_g − V(f*_m) ≥ ε) ≤ 2|H| exp(−m ε² / (8σ² + 4(b−a)ε/3))`, clipped to 1,
/// with `σ²` the worst case over the class.
pub fn training_suboptimality_prob(
    m: u64,
    sigma2: f64,
    ln_hypotheses: f64,
    range: (f64, f64),
    epsilon: f64,
) -> f64 {
    let width = range.1 - range.0;
    let denom = 8.0 * sigma2 + 4.0 * width * epsilon / 3.0;
    let ln_p = std::f64::consts::LN_2 + ln_hypotheses - m as f64 * epsilon * epsilon / denom;
    if ln_p >= 0.0 {
        1.0
    } else {
        ln_p.exp()
    }
}

/// Which case of the expected-error bound applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapBranch {
    /// `σ² ≤ ε`: exponential tails.
    SmallVariance,
    /// `σ² > ε`: Gaussian-like tails integrated through `erf`.
    LargeVariance,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedGaps {
    /// Bound on `E|V(f*_m) − V̂_n(f*_m)|`.
    pub validation: f64,
    /// Bound on `V_g − E[V(f*_m)]`.
    pub training: f64,
    pub branch: GapBranch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub m: u64,
    pub n: u64,
    pub sigma2: f64,
    pub range: (f64, f64),
    /// `ln |H|`.
    pub ln_hypotheses: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// `Δ`, with `0 < Δ < δ`.
    pub split: f64,
}

impl BoundInputs {
    /// `η = 1 + (b − a)/3`.
    pub fn eta(&self) -> f64 {
        1.0 + (self.range.1 - self.range.0) / 3.0
    }

    pub fn validate(&self) -> Result<()> {
        let width = self.range.1 - self.range.0;
        let positive = [self.sigma2, width, self.epsilon, self.delta, self.split];
        if self.m == 0 || self.n == 0 || positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidArgument(
                "m, n, sigma2, b-a, epsilon, delta and split must be positive".into(),
            ));
        }
        if !(self.ln_hypotheses >= 0.0) {
            return Err(Error::InvalidArgument("|H| must be at least 1".into()));
        }
        if self.split >= self.delta {
            return Err(Error::InvalidArgument("split must be smaller than delta".into()));
        }
        if self.sigma2 > width * width / 4.0 * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "sigma2 {} exceeds the Popoviciu bound (b-a)^2/4 = {}",
                self.sigma2,
                width * width / 4.0
            )));
        }
        Ok(())
    }
}

/// `ln(|W|^|Y|)`, the size of the class of all strategies `Y → W`.
pub fn ln_all_strategies(num_guesses: usize, num_observables: usize) -> f64 {
    num_observables as f64 * (num_guesses as f64).ln()
}

/// Evaluates the closed-form expected-error bounds for the branch selected
/// by `σ² ≤ ε`.
pub fn expected_error_bounds(inputs: &BoundInputs) -> ExpectedGaps {
    let BoundInputs {
        m, n, sigma2, range, ln_hypotheses, epsilon, ..
    } = *inputs;
    let (m, n) = (m as f64, n as f64);
    let width = range.1 - range.0;
    let eta = inputs.eta();
    let sqrt_pi = std::f64::consts::PI.sqrt();
    if sigma2 <= epsilon {
        let validation = 4.0 * eta / n * (-n * sigma2 / (2.0 * eta)).exp();
        let ln_training = ln_hypotheses + (8.0 * (2.0 + width / 3.0) / m).ln()
            - 3.0 * m * sigma2 / (4.0 * (6.0 + width));
        ExpectedGaps {
            validation,
            training: ln_training.exp(),
            branch: GapBranch::SmallVariance,
        }
    } else {
        let rv = (2.0 * sigma2 * eta / n).sqrt();
        let validation = rv * sqrt_pi * erf(sigma2 / rv);
        let rt = ((8.0 * sigma2 + 4.0 * sigma2 * width / 3.0) / m).sqrt();
        let ln_training = ln_hypotheses + (rt * sqrt_pi * erf(sigma2 / rt)).ln();
        ExpectedGaps {
            validation,
            training: ln_training.exp(),
            branch: GapBranch::LargeVariance,
        }
    }
}

/// Training and validation sizes `(M, N)` sufficient for error at most `ε`
/// with probability at least `1 − δ`, given the split `0 < Δ < δ`.
pub fn sample_complexity(
    epsilon: f64,
    delta: f64,
    split: f64,
    sigma2: f64,
    range: (f64, f64),
    ln_hypotheses: f64,
) -> Result<(u64, u64)> {
    if !(split > 0.0 && split < delta) {
        return Err(Error::InvalidArgument("require 0 < split < delta".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let width = range.1 - range.0;
    let e2 = epsilon * epsilon;
    let m = (8.0 * sigma2 + 4.0 * width * epsilon / 3.0) / e2
        * (std::f64::consts::LN_2 + ln_hypotheses - (delta - split).ln());
    let n = (2.0 * sigma2 + 2.0 * width * epsilon / 3.0) / e2 * (2.0 / split).ln();
    Ok((ceil_count(m), ceil_count(n)))
}

fn ceil_count(v: f64) -> u64 {
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        (v.ceil() as u64).max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub eta: f64,
    pub validation_deviation_prob: f64,
    pub training_suboptimality_prob: f64,
    pub expected_validation_gap: f64,
    pub expected_training_gap: f64,
    pub branch: GapBranch,
    #[serde(rename = "M")]
    pub m_required: u64,
    #[serde(rename = "N")]
    pub n_required: u64,
    pub warnings: Vec<String>,
}

pub fn bound_report(inputs: &BoundInputs) -> Result<BoundReport> {
    inputs.validate()?;
    let gaps = expected_error_bounds(inputs);
    let (m_required, n_required) = sample_complexity(
        inputs.epsilon,
        inputs.delta,
        inputs.split,
        inputs.sigma2,
        inputs.range,
        inputs.ln_hypotheses,
    )?;
    let mut warnings = Vec::new();
    if inputs.ln_hypotheses > f64::MAX.ln() {
        warnings.push(format!(
            "|H| = e^{:.1} overflows; hypothesis-dependent bounds are vacuous",
            inputs.ln_hypotheses
        ));
    }
    Ok(BoundReport {
        inputs: inputs.clone(),
        eta: inputs.eta(),
        validation_deviation_prob: validation_deviation_prob(
            inputs.n,
            inputs.sigma2,
            inputs.range,
            inputs.epsilon,
        ),
        training_suboptimality_prob: training_suboptimality_prob(
            inputs.m,
            inputs.sigma2,
            inputs.ln_hypotheses,
            inputs.range,
            inputs.epsilon,
        ),
        expected_validation_gap: gaps.validation,
        expected_training_gap: gaps.training,
        branch: gaps.branch,
        m_required,
        n_required,
        warnings,
    })
}

/// Worst-case variance `(b − a)² / 4` of a gain bounded in `[a, b]`.
pub fn worst_case_variance(range: (f64, f64)) -> f64 {
    let w = range.1 - range.0;
    w * w / 4.0
}

/// Plug-in (population) variance of observed gains.
pub fn plug_in_variance(gains: &[f64]) -> f64 {
    if gains.is_empty() {
        return 0.0;
    }
    let n = gains.len() as f64;
    let mean = gains.iter().sum::<f64>() / n;
    gains.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / n
}
