use gleak_core::Observable;
use serde::{Deserialize, Serialize};

/// Distance between observables, computed on their integer components.
///
/// Feature codecs scale every component by the same positive factor, so
/// neighbour rankings here agree with rankings on encoded features, and
/// equal distances compare exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    /// `|a − b|` on scalar observables.
    Absolute,
    Euclidean,
    Manhattan,
}

impl DistanceMetric {
    /// Exact key, monotone in the distance (squared for Euclidean).
    pub fn rank_key(&self, a: &Observable, b: &Observable) -> u128 {
        let (a, b) = (a.components(), b.components());
        assert_eq!(a.len(), b.len(), "observables of different arity");
        let diffs = a.iter().zip(b).map(|(&x, &y)| (x as i128 - y as i128).unsigned_abs());
        match self {
            DistanceMetric::Absolute => {
                assert_eq!(a.len(), 1, "absolute distance needs scalar observables");
                diffs.sum()
            }
            DistanceMetric::Manhattan => diffs.sum(),
            DistanceMetric::Euclidean => diffs.map(|d| d * d).sum(),
        }
    }

    pub fn distance(&self, a: &Observable, b: &Observable) -> f64 {
        let key = self.rank_key(a, b) as f64;
        match self {
            DistanceMetric::Euclidean => key.sqrt(),
            _ => key,
        }
    }
}
