use rand::distributions::{Distribution, WeightedIndex};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::numeric::{content_lines, format_row, kahan_sum, parse_row};
use crate::rng::StreamRng;
use crate::sample::{Secret, SecretSource};
use crate::STOCHASTIC_TOL;

/// Probability distribution over a secret alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Prior {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

pub(crate) fn check_distribution(probs: &[f64]) -> Result<f64> {
    for (i, &p) in probs.iter().enumerate() {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::InvalidEntry { index: i, value: p });
        }
    }
    Ok(kahan_sum(probs.iter().copied()))
}

impl Prior {
    pub fn new(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.size() {
            return Err(Error::Dimension {
                expected: alphabet.size(),
                got: probs.len(),
            });
        }
        let sum = check_distribution(&probs)?;
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::NotNormalized(sum));
        }
        Ok(Prior { alphabet, probs })
    }

    /// Normalizes non-negative weights (e.g. counts) into a prior.
    pub fn from_weights(alphabet: Alphabet, weights: &[f64]) -> Result<Self> {
        let total = check_distribution(weights)?;
        if total <= 0.0 {
            return Err(Error::Degenerate("all prior weights are zero".into()));
        }
        Prior::new(alphabet, weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let n = alphabet.size();
        Prior {
            alphabet,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sampler(&self) -> Result<PriorSampler> {
        PriorSampler::new(self)
    }

    /// Parses the one-line text format; labels default to `0..n`.
    pub fn parse(text: &str) -> Result<Self> {
        let (lineno, line) = content_lines(text)
            .next()
            .ok_or_else(|| Error::parse(1, "empty prior file"))?;
        let n = line.split_whitespace().count();
        let probs = parse_row(line, lineno, n)?;
        Prior::new(Alphabet::indexed(n.max(1)), probs)
    }

    pub fn to_text(&self) -> String {
        format!("{}\n", format_row(&self.probs))
    }
}

/// Draws secret indices distributed according to a prior.
#[derive(Clone, Debug)]
pub struct PriorSampler {
    dist: WeightedIndex<f64>,
}

impl PriorSampler {
    pub fn new(prior: &Prior) -> Result<Self> {
        let dist = WeightedIndex::new(prior.probs())
            .map_err(|e| Error::Degenerate(format!("prior: {e}")))?;
        Ok(PriorSampler { dist })
    }
}

impl SecretSource for PriorSampler {
    fn draw(&self, rng: &mut StreamRng) -> Secret {
        self.dist.sample(rng) as Secret
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let a = Alphabet::indexed(2);
        assert!(Prior::new(a.clone(), vec![0.3, 0.7]).is_ok());
        assert!(matches!(
            Prior::new(a.clone(), vec![0.3, 0.6]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            Prior::new(a.clone(), vec![-0.1, 1.1]),
            Err(Error::InvalidEntry { .. })
        ));
        assert!(Prior::new(a, vec![1.0]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let p = Prior::new(Alphabet::indexed(3), vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(Prior::parse(&p.to_text()).unwrap(), p);
    }
}
