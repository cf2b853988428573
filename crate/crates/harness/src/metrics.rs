use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Normalized errors `δ_ij = |V̂_ij − V| / V` of one arm at one size, with
/// their mean, dispersion and total error over all `I·J` cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// `I × J`, indexed by training set then validation set.
    pub deltas: Vec<Vec<f64>>,
    pub mean: f64,
    pub dispersion: f64,
    pub total_error: f64,
    pub exact: f64,
}

impl MetricsReport {
    pub fn from_estimates(estimates: &[Vec<f64>], exact: f64) -> Result<Self> {
        if !(exact.abs() > 0.0) || !exact.is_finite() {
            return Err(HarnessError::ZeroVulnerability(exact));
        }
        let deltas: Vec<Vec<f64>> = estimates
            .iter()
            .map(|row| row.iter().map(|v| (v - exact).abs() / exact.abs()).collect())
            .collect();
        Self::from_deltas(deltas, exact)
    }

    pub fn from_deltas(deltas: Vec<Vec<f64>>, exact: f64) -> Result<Self> {
        let count = deltas.iter().map(Vec::len).sum::<usize>();
        if count == 0 {
            return Err(HarnessError::Config("no trials".into()));
        }
        let cells = || deltas.iter().flatten().copied();
        let k = count as f64;
        let mean = cells().sum::<f64>() / k;
        let dispersion = (cells().map(|d| (d - mean).powi(2)).sum::<f64>() / k).sqrt();
        let total_error = (cells().map(|d| d * d).sum::<f64>() / k).sqrt();
        Ok(MetricsReport {
            deltas,
            mean,
            dispersion,
            total_error,
            exact,
        })
    }

    /// `|dispersion² + mean² − total_error²|`.
    pub fn identity_residual(&self) -> f64 {
        (self.dispersion.powi(2) + self.mean.powi(2) - self.total_error.powi(2)).abs()
    }

    pub fn sorted_deltas(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.deltas.iter().flatten().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Minimum, quartiles and maximum (linear interpolation between order
    /// statistics).
    pub fn five_numbers(&self) -> [f64; 5] {
        let v = self.sorted_deltas();
        [0.0, 0.25, 0.5, 0.75, 1.0].map(|q| quantile(&v, q))
    }

    pub fn median(&self) -> f64 {
        quantile(&self.sorted_deltas(), 0.5)
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}
