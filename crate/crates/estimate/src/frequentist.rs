use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use gleak_core::numeric::argmax;
use gleak_core::{Classifier, Gain, Observable, SampleSet, Secret};

use crate::error::{EstimateError, Result};
use crate::learner::LearnerKind;
use crate::pipeline::evaluate;
use crate::report::{EstimateReport, Method, PhaseStream};

/// Counting estimator: for each training observable, the guess maximising
/// `Σ_x count(x, y)·g(w, x)`. Unseen observables get the best guess for the
/// most frequent training secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequentistClassifier {
    guesses: HashMap<Observable, usize>,
    fallback: usize,
}

impl FrequentistClassifier {
    pub fn train(train: &SampleSet, gain: &dyn Gain) -> Result<Self> {
        if train.is_empty() {
            return Err(EstimateError::Input("empty training set".into()));
        }
        let nw = gain.num_guesses();
        let mut joint: HashMap<&Observable, BTreeMap<Secret, u64>> = HashMap::new();
        let mut prior: BTreeMap<Secret, u64> = BTreeMap::new();
        for s in train.iter() {
            *joint.entry(&s.observable).or_default().entry(s.secret).or_default() += 1;
            *prior.entry(s.secret).or_default() += 1;
        }
        let guesses = joint
            .into_iter()
            .map(|(y, counts)| {
                let w = argmax((0..nw).map(|w| {
                    counts
                        .iter()
                        .map(|(&x, &c)| c as f64 * gain.gain(w, x))
                        .sum::<f64>()
                }));
                (y.clone(), w)
            })
            .collect();
        // BTreeMap iteration is ascending, so argmax ties go to the smallest secret
        let (secrets, counts): (Vec<Secret>, Vec<u64>) = prior.into_iter().unzip();
        let top = secrets[argmax(counts)];
        let fallback = argmax((0..nw).map(|w| gain.gain(w, top)));
        Ok(FrequentistClassifier { guesses, fallback })
    }

    pub fn fallback(&self) -> usize {
        self.fallback
    }

    pub fn seen(&self) -> usize {
        self.guesses.len()
    }
}

impl Classifier for FrequentistClassifier {
    fn predict(&self, y: &Observable) -> usize {
        self.guesses.get(y).copied().unwrap_or(self.fallback)
    }
}

pub fn frequentist_estimate(train: &SampleSet, valid: &SampleSet, gain: &dyn Gain) -> Result<EstimateReport> {
    let start = Instant::now();
    let model = FrequentistClassifier::train(train, gain)?;
    let estimate = evaluate(&model, valid, gain)?;
    let streams = [("train", train), ("validation", valid)]
        .into_iter()
        .filter_map(|(phase, set)| {
            set.provenance.map(|p| PhaseStream {
                phase: phase.into(),
                stream: p.stream,
            })
        })
        .collect();
    Ok(EstimateReport {
        estimate,
        method: Method::Frequentist,
        learner: LearnerKind::None,
        m: train.len(),
        n: valid.len(),
        gain_scale: 1,
        training_weight: train.len() as u64,
        master_seed: train.provenance.map(|p| p.master_seed).unwrap_or(0),
        streams,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gleak_core::{Alphabet, GainFunction, Sample};

    fn set(pairs: &[(Secret, i64)]) -> SampleSet {
        SampleSet::new(
            pairs
                .iter()
                .map(|&(x, y)| Sample {
                    secret: x,
                    observable: Observable::scalar(y),
                })
                .collect(),
        )
    }

    #[test]
    fn unseen_observable_uses_most_frequent_secret() {
        let g = GainFunction::identity(&Alphabet::indexed(3));
        let train = set(&[(2, 0), (2, 0), (1, 1), (0, 2)]);
        let f = FrequentistClassifier::train(&train, &g).unwrap();
        assert_eq!(f.fallback(), 2);
        assert_eq!(f.predict(&Observable::scalar(99)), 2);
        assert_eq!(f.predict(&Observable::scalar(1)), 1);
    }

    #[test]
    fn prior_ties_go_to_smallest_secret() {
        let g = GainFunction::identity(&Alphabet::indexed(3));
        let train = set(&[(2, 0), (1, 1)]);
        let f = FrequentistClassifier::train(&train, &g).unwrap();
        assert_eq!(f.fallback(), 1);
    }
}
