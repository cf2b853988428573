use std::collections::BTreeMap;

use gleak_core::numeric::argmax;
use gleak_core::preprocess::WeightedSampleSet;
use gleak_core::{Classifier, Observable};

use crate::error::{LearnError, Result};
use crate::metric::DistanceMetric;

/// Neighbour count for an index of `l` distinct observables:
/// `max(1, floor(ln l))`.
pub fn knn_k(l: usize) -> usize {
    if l == 0 {
        return 1;
    }
    ((l as f64).ln().floor() as usize).max(1)
}

/// Majority vote among the `k` distinct training observables nearest to the
/// query. Each indexed observable carries the weighted tally of guesses seen
/// with it; all observables tied with the k-th distance take part, and vote
/// ties go to the lowest guess index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnnClassifier {
    metric: DistanceMetric,
    observables: Vec<Observable>,
    /// `l × |W|`, row-major.
    tallies: Vec<u64>,
    num_guesses: usize,
    k: usize,
    /// Sorted positions when every observable is scalar.
    line: Option<Vec<i64>>,
}

impl KnnClassifier {
    pub fn train(data: &WeightedSampleSet, metric: DistanceMetric) -> Result<Self> {
        if data.is_empty() {
            return Err(LearnError::EmptyData);
        }
        let nw = data.num_guesses();
        let mut by_obs: BTreeMap<&Observable, Vec<u64>> = BTreeMap::new();
        for e in data.entries() {
            by_obs.entry(&e.observable).or_insert_with(|| vec![0; nw])[e.guess] += e.weight;
        }
        let arity = by_obs.keys().next().map(|o| o.components().len()).unwrap_or(1);
        if by_obs.keys().any(|o| o.components().len() != arity) {
            return Err(LearnError::InvalidConfig("observables of mixed arity".into()));
        }
        if metric == DistanceMetric::Absolute && arity != 1 {
            return Err(LearnError::InvalidConfig(
                "absolute distance needs scalar observables".into(),
            ));
        }
        let observables: Vec<Observable> = by_obs.keys().map(|&o| o.clone()).collect();
        let tallies = by_obs.into_values().flatten().collect();
        // BTreeMap order is numeric order for 1-tuples
        let line = (arity == 1).then(|| observables.iter().map(|o| o.components()[0]).collect());
        let k = knn_k(observables.len());
        Ok(KnnClassifier {
            metric,
            observables,
            tallies,
            num_guesses: nw,
            k,
            line,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn index_size(&self) -> usize {
        self.observables.len()
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn tally(&self, i: usize) -> &[u64] {
        &self.tallies[i * self.num_guesses..(i + 1) * self.num_guesses]
    }

    /// Indices of the voting neighbours of `y`, nearest first.
    pub fn neighbours(&self, y: &Observable) -> Vec<usize> {
        match &self.line {
            Some(line) if y.components().len() == 1 => self.line_neighbours(line, y.components()[0]),
            _ => self.scan_neighbours(y),
        }
    }

    fn line_neighbours(&self, line: &[i64], q: i64) -> Vec<usize> {
        let q = q as i128;
        let mut right = line.partition_point(|&v| (v as i128) < q);
        let mut left = right; // next candidate on the left is left - 1
        let mut chosen = Vec::with_capacity(self.k + 2);
        let mut kth: Option<i128> = None;
        loop {
            let dl = (left > 0).then(|| q - line[left - 1] as i128);
            let dr = (right < line.len()).then(|| line[right] as i128 - q);
            let (d, take_left) = match (dl, dr) {
                (None, None) => break,
                (Some(a), None) => (a, true),
                (None, Some(b)) => (b, false),
                (Some(a), Some(b)) => (a.min(b), a <= b),
            };
            if kth.is_some_and(|kd| d > kd) {
                break;
            }
            if take_left {
                left -= 1;
                chosen.push(left);
            } else {
                chosen.push(right);
                right += 1;
            }
            if chosen.len() == self.k && kth.is_none() {
                kth = Some(d);
            }
        }
        chosen
    }

    fn scan_neighbours(&self, y: &Observable) -> Vec<usize> {
        let keys: Vec<u128> = self
            .observables
            .iter()
            .map(|o| self.metric.rank_key(o, y))
            .collect();
        let k = self.k.min(keys.len());
        let mut sorted = keys.clone();
        let (_, &mut kth, _) = sorted.select_nth_unstable(k - 1);
        let mut chosen: Vec<usize> = (0..keys.len()).filter(|&i| keys[i] <= kth).collect();
        chosen.sort_by_key(|&i| (keys[i], i));
        chosen
    }

    /// Summed tallies of the voting neighbours.
    pub fn votes(&self, y: &Observable) -> Vec<u64> {
        let mut votes = vec![0u64; self.num_guesses];
        for i in self.neighbours(y) {
            for (v, t) in votes.iter_mut().zip(self.tally(i)) {
                *v += t;
            }
        }
        votes
    }
}

impl Classifier for KnnClassifier {
    fn predict(&self, y: &Observable) -> usize {
        argmax(self.votes(y))
    }
}
