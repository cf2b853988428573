use gleak_core::Observable;
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};

/// Maps an observable's integer components to network inputs by dividing
/// each by a common scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureCodec {
    dims: usize,
    scale: f64,
}

impl FeatureCodec {
    pub fn new(dims: usize, scale: f64) -> Result<Self> {
        if dims == 0 || !(scale > 0.0) || !scale.is_finite() {
            return Err(LearnError::InvalidConfig(format!(
                "codec needs dims >= 1 and a positive scale, got {dims}, {scale}"
            )));
        }
        Ok(FeatureCodec { dims, scale })
    }

    /// Scalar observables in `0..range`, mapped into `[0, 1)`.
    pub fn scalar(range: usize) -> Self {
        FeatureCodec::new(1, range.max(1) as f64).expect("valid scalar codec")
    }

    /// `(row, col)` cells of a `size × size` grid.
    pub fn grid(size: usize) -> Self {
        FeatureCodec::new(2, size.max(1) as f64).expect("valid grid codec")
    }

    /// Count vectors whose entries are at most `total`.
    pub fn counts(dims: usize, total: usize) -> Self {
        FeatureCodec::new(dims, total.max(1) as f64).expect("valid counts codec")
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn encode_into(&self, y: &Observable, out: &mut [f64]) {
        let c = y.components();
        assert_eq!(c.len(), self.dims, "observable {y} does not match codec dims {}", self.dims);
        for (o, &v) in out.iter_mut().zip(c) {
            *o = v as f64 / self.scale;
        }
    }

    pub fn encode(&self, y: &Observable) -> Vec<f64> {
        let mut out = vec![0.0; self.dims];
        self.encode_into(y, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling() {
        assert_eq!(FeatureCodec::scalar(1600).encode(&Observable::scalar(800)), vec![0.5]);
        assert_eq!(
            FeatureCodec::grid(10).encode(&Observable::tuple(vec![3, 7])),
            vec![0.3, 0.7]
        );
        let c = FeatureCodec::counts(5, 303);
        assert_eq!(c.encode(&Observable::tuple(vec![303, 0, 0, 0, 0]))[0], 1.0);
        assert!(FeatureCodec::new(0, 1.0).is_err());
        assert!(FeatureCodec::new(1, 0.0).is_err());
    }
}
