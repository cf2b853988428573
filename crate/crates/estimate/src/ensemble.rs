use gleak_core::{stream_rng, Classifier, Observable, StreamId};
use rand::seq::SliceRandom;

use crate::error::{EstimateError, Result};

/// Majority vote over the predictions of several classifiers. Tied guesses
/// are broken uniformly at random; the draw for an observable depends only
/// on the seed, the stream and the observable, so predictions are repeatable.
pub struct MajorityEnsemble {
    members: Vec<Box<dyn Classifier>>,
    num_guesses: usize,
    master_seed: u64,
    stream: StreamId,
}

impl MajorityEnsemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn votes(&self, y: &Observable) -> Vec<usize> {
        let mut votes = vec![0; self.num_guesses];
        for m in &self.members {
            votes[m.predict(y)] += 1;
        }
        votes
    }
}

pub fn ensemble_majority(
    members: Vec<Box<dyn Classifier>>,
    num_guesses: usize,
    master_seed: u64,
    stream: StreamId,
) -> Result<MajorityEnsemble> {
    if members.is_empty() {
        return Err(EstimateError::InvalidConfig("ensemble needs at least one model".into()));
    }
    if num_guesses == 0 {
        return Err(EstimateError::InvalidConfig("ensemble needs at least one guess".into()));
    }
    Ok(MajorityEnsemble {
        members,
        num_guesses,
        master_seed,
        stream,
    })
}

impl Classifier for MajorityEnsemble {
    fn predict(&self, y: &Observable) -> usize {
        let votes = self.votes(y);
        let best = votes.iter().copied().max().unwrap_or(0);
        let tied: Vec<usize> = (0..votes.len()).filter(|&w| votes[w] == best).collect();
        if tied.len() == 1 {
            return tied[0];
        }
        let mut key = vec![self.stream.0];
        key.extend(y.components().iter().map(|&c| c as u64));
        let mut rng = stream_rng(self.master_seed, StreamId::named("ensemble-tie", &key));
        *tied.choose(&mut rng).expect("non-empty tie set")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(usize);
    impl Classifier for Fixed {
        fn predict(&self, _: &Observable) -> usize {
            self.0
        }
    }

    fn boxed(gs: &[usize]) -> Vec<Box<dyn Classifier>> {
        gs.iter().map(|&g| Box::new(Fixed(g)) as Box<dyn Classifier>).collect()
    }

    #[test]
    fn single_member_is_identity() {
        let e = ensemble_majority(boxed(&[2]), 3, 1, StreamId(0)).unwrap();
        assert_eq!(e.predict(&Observable::scalar(5)), 2);
    }

    #[test]
    fn two_of_three_win() {
        let e = ensemble_majority(boxed(&[1, 0, 1]), 2, 1, StreamId(0)).unwrap();
        assert_eq!(e.predict(&Observable::scalar(5)), 1);
    }

    #[test]
    fn ties_are_random_but_repeatable() {
        let e = ensemble_majority(boxed(&[0, 1]), 2, 7, StreamId(3)).unwrap();
        let picks: Vec<usize> = (0..200).map(|y| e.predict(&Observable::scalar(y))).collect();
        let again: Vec<usize> = (0..200).map(|y| e.predict(&Observable::scalar(y))).collect();
        assert_eq!(picks, again);
        let ones = picks.iter().filter(|&&w| w == 1).count();
        assert!((60..=140).contains(&ones), "{ones}");
    }

    #[test]
    fn empty_is_rejected() {
        assert!(ensemble_majority(Vec::new(), 2, 1, StreamId(0)).is_err());
    }
}
