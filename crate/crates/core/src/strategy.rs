use crate::sample::{Classifier, Observable};

/// A total guessing rule `f : Y → W` over an indexed observable alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    mapping: Vec<usize>,
}

impl Strategy {
    pub fn new(mapping: Vec<usize>) -> Self {
        Strategy { mapping }
    }

    pub fn constant(guess: usize, observables: usize) -> Self {
        Strategy {
            mapping: vec![guess; observables],
        }
    }

    pub fn guess(&self, y: usize) -> usize {
        self.mapping[y]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }
}

impl Classifier for Strategy {
    fn predict(&self, y: &Observable) -> usize {
        let idx = y
            .as_index()
            .unwrap_or_else(|| panic!("strategy applied to non-index observable {y}"));
        self.mapping[idx]
    }
}
