use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{EstimateError, Result};

/// Integer noise with `P(k) = λ·exp(−ν|k|)` on all of ℤ, where
/// `λ = (e^ν − 1)/(e^ν + 1)`. An infinite `ν` gives zero noise.
#[derive(Clone, Debug)]
pub struct TwoSidedGeometric {
    nu: f64,
    draw: Option<Geometric>,
}

impl TwoSidedGeometric {
    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_nan() || nu <= 0.0 {
            return Err(EstimateError::InvalidConfig(format!("noise decay must be positive, got {nu}")));
        }
        let draw = if nu.is_finite() {
            // failures before the first success with p = 1 − e^−ν
            let p = -(-nu).exp_m1();
            Some(Geometric::new(p).map_err(|e| EstimateError::InvalidConfig(e.to_string()))?)
        } else {
            None
        };
        Ok(TwoSidedGeometric { nu, draw })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn lambda(&self) -> f64 {
        if self.nu.is_infinite() {
            1.0
        } else {
            (self.nu / 2.0).tanh()
        }
    }

    pub fn pmf(&self, k: i64) -> f64 {
        if self.nu.is_infinite() {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        self.lambda() * (-self.nu * k.unsigned_abs() as f64).exp()
    }

    /// `P(N ≥ a)` for `a ≥ 1` (equal to `P(N ≤ −a)` by symmetry).
    pub fn tail(&self, a: u64) -> f64 {
        assert!(a >= 1, "tail is defined for a >= 1");
        if self.nu.is_infinite() {
            return 0.0;
        }
        let q = (-self.nu).exp();
        self.lambda() * (-self.nu * a as f64).exp() / (1.0 - q)
    }

    /// `P(N ≤ k)`.
    pub fn cdf(&self, k: i64) -> f64 {
        if k < 0 {
            self.tail(k.unsigned_abs())
        } else {
            1.0 - self.tail(k as u64 + 1)
        }
    }

    /// Smallest `r` with `P(|N| > r) < tol`.
    pub fn radius(&self, tol: f64) -> u64 {
        if self.nu.is_infinite() {
            return 0;
        }
        let mut r = 0u64;
        while 2.0 * self.tail(r + 1) >= tol {
            r += 1;
        }
        r
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        match &self.draw {
            None => 0,
            Some(g) => g.sample(rng) as i64 - g.sample(rng) as i64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gleak_core::{stream_rng, StreamId};

    #[test]
    fn pmf_sums_to_one() {
        let n = TwoSidedGeometric::new(0.3).unwrap();
        let s: f64 = (-400..=400).map(|k| n.pmf(k)).sum();
        assert!((s - 1.0).abs() < 1e-12, "{s}");
        let lam = (0.3f64.exp() - 1.0) / (0.3f64.exp() + 1.0);
        assert!((n.lambda() - lam).abs() < 1e-15);
    }

    #[test]
    fn tail_matches_summation() {
        let n = TwoSidedGeometric::new(0.7).unwrap();
        for a in 1..10u64 {
            let direct: f64 = (a as i64..2000).map(|k| n.pmf(k)).sum();
            assert!((n.tail(a) - direct).abs() < 1e-14);
        }
        assert!((n.cdf(0) - (0.5 + n.pmf(0) / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn sampling_matches_pmf() {
        let n = TwoSidedGeometric::new(1.0).unwrap();
        let mut rng = stream_rng(3, StreamId(1));
        let draws = 200_000;
        let mut counts = [0usize; 7];
        for _ in 0..draws {
            let k = n.sample(&mut rng);
            if k.abs() <= 3 {
                counts[(k + 3) as usize] += 1;
            }
        }
        for (i, &c) in counts.iter().enumerate() {
            let p = n.pmf(i as i64 - 3);
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((c as f64 / draws as f64 - p).abs() < 5.0 * se, "k={} {c}", i as i64 - 3);
        }
    }

    #[test]
    fn infinite_decay_is_silent() {
        let n = TwoSidedGeometric::new(f64::INFINITY).unwrap();
        let mut rng = stream_rng(3, StreamId(1));
        assert!((0..100).all(|_| n.sample(&mut rng) == 0));
        assert_eq!(n.pmf(0), 1.0);
        assert_eq!(n.radius(1e-12), 0);
        assert!(TwoSidedGeometric::new(0.0).is_err());
    }
}
