//! Exact prior/posterior g-vulnerability and g-leakage of matrix channels.

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::gain::GainFunction;
use crate::joint::JointDistribution;
use crate::numeric::{argmax, kahan_sum};
use crate::prior::Prior;
use crate::strategy::Strategy;

/// Default bound on `|W|^|Y|` for brute-force strategy enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeakageMode {
    Multiplicative,
    Additive,
}

fn check_prior_gain(prior: &Prior, gain: &GainFunction) -> Result<()> {
    prior
        .alphabet()
        .ensure_same(gain.secrets(), "prior vs gain secrets")
}

fn check_all(prior: &Prior, channel: &Channel, gain: &GainFunction) -> Result<()> {
    check_prior_gain(prior, gain)?;
    prior
        .alphabet()
        .ensure_same(channel.input(), "prior vs channel input")
}

/// Expected gain of each guess under the prior.
fn guess_scores(prior: &Prior, gain: &GainFunction) -> Vec<f64> {
    (0..gain.guesses().size())
        .map(|w| kahan_sum(gain.row(w).iter().zip(prior.probs()).map(|(g, p)| g * p)))
        .collect()
}

/// `V_g(π) = max_w Σ_x π_x g(w, x)`.
pub fn prior_vulnerability(prior: &Prior, gain: &GainFunction) -> Result<f64> {
    check_prior_gain(prior, gain)?;
    Ok(guess_scores(prior, gain)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Calls `visit(w, scores)` with `scores[y] = Σ_x π_x C[x][y] g(w, x)` for
/// every guess `w`, reusing one buffer.
fn for_each_guess_column_scores(
    prior: &Prior,
    channel: &Channel,
    gain: &GainFunction,
    mut visit: impl FnMut(usize, &[f64]),
) {
    let ny = channel.cols();
    let mut scores = vec![0.0; ny];
    for w in 0..gain.guesses().size() {
        scores.iter_mut().for_each(|s| *s = 0.0);
        for (x, (&g, &p)) in gain.row(w).iter().zip(prior.probs()).enumerate() {
            let coef = g * p;
            if coef == 0.0 {
                continue;
            }
            for (s, &c) in scores.iter_mut().zip(channel.row(x)) {
                *s += coef * c;
            }
        }
        visit(w, &scores);
    }
}

/// `V_g(π, C) = Σ_y max_w Σ_x π_x C[x][y] g(w, x)`.
pub fn posterior_vulnerability(prior: &Prior, channel: &Channel, gain: &GainFunction) -> Result<f64> {
    check_all(prior, channel, gain)?;
    let mut best = vec![f64::NEG_INFINITY; channel.cols()];
    for_each_guess_column_scores(prior, channel, gain, |_, scores| {
        for (b, &s) in best.iter_mut().zip(scores) {
            if s > *b {
                *b = s;
            }
        }
    });
    Ok(kahan_sum(best))
}

/// Optimal guess per observable; ties go to the lowest guess index.
pub fn optimal_strategy(prior: &Prior, channel: &Channel, gain: &GainFunction) -> Result<Strategy> {
    check_all(prior, channel, gain)?;
    let mut best = vec![f64::NEG_INFINITY; channel.cols()];
    let mut mapping = vec![0usize; channel.cols()];
    for_each_guess_column_scores(prior, channel, gain, |w, scores| {
        for (y, &s) in scores.iter().enumerate() {
            if s > best[y] {
                best[y] = s;
                mapping[y] = w;
            }
        }
    });
    Ok(Strategy::new(mapping))
}

/// Multiplicative (`V_g(π,C) / V_g(π)`) or additive (`V_g(π,C) − V_g(π)`)
/// g-leakage.
pub fn leakage(
    prior: &Prior,
    channel: &Channel,
    gain: &GainFunction,
    mode: LeakageMode,
) -> Result<f64> {
    let post = posterior_vulnerability(prior, channel, gain)?;
    let pre = prior_vulnerability(prior, gain)?;
    match mode {
        LeakageMode::Additive => Ok(post - pre),
        LeakageMode::Multiplicative if pre > 0.0 => Ok(post / pre),
        LeakageMode::Multiplicative => Err(Error::Degenerate(
            "prior vulnerability is zero; multiplicative leakage undefined".into(),
        )),
    }
}

/// Expected gain `Σ_{x,y} g(f(y), x) P(x, y)` of a strategy.
pub fn strategy_gain(strategy: &Strategy, joint: &JointDistribution, gain: &GainFunction) -> Result<f64> {
    joint
        .secrets()
        .ensure_same(gain.secrets(), "joint vs gain secrets")?;
    let ny = joint.observables().size();
    if strategy.mapping().len() != ny {
        return Err(Error::Dimension {
            expected: ny,
            got: strategy.mapping().len(),
        });
    }
    if let Some(&w) = strategy.mapping().iter().find(|&&w| w >= gain.guesses().size()) {
        return Err(Error::InvalidArgument(format!("strategy guess {w} out of range")));
    }
    let nx = joint.secrets().size();
    Ok(kahan_sum((0..nx).flat_map(|x| {
        (0..ny).map(move |y| gain.get(strategy.guess(y), x) * joint.get(x, y))
    })))
}

/// Brute-force maximum of [`strategy_gain`] over all `|W|^|Y|` strategies.
pub fn enumerate_strategies_vulnerability(
    prior: &Prior,
    channel: &Channel,
    gain: &GainFunction,
    cap: u64,
) -> Result<f64> {
    check_all(prior, channel, gain)?;
    let (nw, ny) = (gain.guesses().size(), channel.cols());
    let count = (nw as f64).powi(ny as i32);
    if count > cap as f64 {
        return Err(Error::CapExceeded { count, cap });
    }
    let joint = JointDistribution::from_prior_channel(prior, channel)?;
    let mut mapping = vec![0usize; ny];
    let mut best = f64::NEG_INFINITY;
    loop {
        let v = strategy_gain(&Strategy::new(mapping.clone()), &joint, gain)?;
        best = best.max(v);
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == ny {
                return Ok(best);
            }
            mapping[pos] += 1;
            if mapping[pos] < nw {
                break;
            }
            mapping[pos] = 0;
            pos += 1;
        }
    }
}

/// Bayes vulnerability `Σ_y max_x π_x C[x][y]`, computed directly.
pub fn bayes_vulnerability(prior: &Prior, channel: &Channel) -> Result<f64> {
    prior
        .alphabet()
        .ensure_same(channel.input(), "prior vs channel input")?;
    Ok(kahan_sum((0..channel.cols()).map(|y| {
        let col = (0..channel.rows()).map(|x| prior.probs()[x] * channel.get(x, y));
        col.fold(f64::NEG_INFINITY, f64::max)
    })))
}

/// Index of the best guess under the prior alone.
pub fn prior_best_guess(prior: &Prior, gain: &GainFunction) -> Result<usize> {
    check_prior_gain(prior, gain)?;
    Ok(argmax(guess_scores(prior, gain)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    fn p37() -> Prior {
        Prior::new(Alphabet::indexed(2), vec![0.3, 0.7]).unwrap()
    }

    fn c22() -> Channel {
        Channel::from_rows(vec![vec![0.8, 0.2], vec![0.4, 0.6]]).unwrap()
    }

    fn id2() -> GainFunction {
        GainFunction::identity(&Alphabet::indexed(2))
    }

    #[test]
    fn prior_vulnerability_examples() {
        assert!((prior_vulnerability(&p37(), &id2()).unwrap() - 0.7).abs() < 1e-15);
        let g = GainFunction::from_rows(vec![vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let u = Prior::uniform(Alphabet::indexed(2));
        assert_eq!(prior_vulnerability(&u, &g).unwrap(), 2.0);
    }

    #[test]
    fn posterior_vulnerability_examples() {
        let v = posterior_vulnerability(&p37(), &Channel::identity(2), &id2()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let v = posterior_vulnerability(&p37(), &c22(), &id2()).unwrap();
        // column maxima: max(0.24, 0.28) + max(0.06, 0.42)
        assert!((v - 0.70).abs() < 1e-15);
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let g3 = GainFunction::identity(&Alphabet::indexed(3));
        assert!(matches!(
            posterior_vulnerability(&p37(), &c22(), &g3),
            Err(Error::AlphabetMismatch(_))
        ));
        assert!(prior_vulnerability(&p37(), &g3).is_err());
    }

    #[test]
    fn leakage_examples() {
        let u = Prior::uniform(Alphabet::indexed(2));
        let m = leakage(&u, &Channel::identity(2), &id2(), LeakageMode::Multiplicative).unwrap();
        assert!((m - 2.0).abs() < 1e-15);
        let flat = Channel::from_rows(vec![vec![0.1, 0.9], vec![0.1, 0.9]]).unwrap();
        let a = leakage(&p37(), &flat, &id2(), LeakageMode::Additive).unwrap();
        assert!(a.abs() < 1e-15);
        let a = leakage(&p37(), &c22(), &id2(), LeakageMode::Additive).unwrap();
        assert!(a.abs() < 1e-15);
    }

    #[test]
    fn multiplicative_leakage_needs_positive_prior_vulnerability() {
        let zero = GainFunction::from_rows(vec![vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            leakage(&p37(), &c22(), &zero, LeakageMode::Multiplicative),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn optimal_strategy_examples() {
        let s = optimal_strategy(&p37(), &Channel::identity(2), &id2()).unwrap();
        assert_eq!(s.mapping(), &[0, 1]);
        let s = optimal_strategy(&p37(), &c22(), &id2()).unwrap();
        assert_eq!(s.mapping(), &[1, 1]);
        let flat = Channel::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let s = optimal_strategy(&p37(), &flat, &id2()).unwrap();
        let best = prior_best_guess(&p37(), &id2()).unwrap();
        assert_eq!(s, Strategy::constant(best, 2));
    }

    #[test]
    fn strategy_gain_examples() {
        let joint = JointDistribution::from_prior_channel(&p37(), &c22()).unwrap();
        let g = id2();
        let best = strategy_gain(&Strategy::new(vec![1, 1]), &joint, &g).unwrap();
        assert!((best - 0.70).abs() < 1e-15);
        let worst = (0..4)
            .map(|k| strategy_gain(&Strategy::new(vec![k & 1, k >> 1]), &joint, &g).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((worst - 0.30).abs() < 1e-15);
        let c = strategy_gain(&Strategy::constant(0, 2), &joint, &g).unwrap();
        assert!((c - 0.3).abs() < 1e-15);
    }

    #[test]
    fn enumeration_examples() {
        let v = enumerate_strategies_vulnerability(&p37(), &c22(), &id2(), DEFAULT_ENUMERATION_CAP)
            .unwrap();
        assert!((v - 0.70).abs() < 1e-12);
        let u = Prior::uniform(Alphabet::indexed(2));
        let v = enumerate_strategies_vulnerability(&u, &Channel::identity(2), &id2(), 10).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(matches!(
            enumerate_strategies_vulnerability(&p37(), &c22(), &id2(), 3),
            Err(Error::CapExceeded { .. })
        ));
    }
}
