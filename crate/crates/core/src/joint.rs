use crate::alphabet::Alphabet;
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::numeric::kahan_sum;
use crate::prior::{check_distribution, Prior};
use crate::STOCHASTIC_TOL;

/// Joint distribution `P(x, y)` over secrets × observables.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    secrets: Alphabet,
    observables: Alphabet,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(secrets: Alphabet, observables: Alphabet, probs: Vec<f64>) -> Result<Self> {
        let expected = secrets.size() * observables.size();
        if probs.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: probs.len(),
            });
        }
        let sum = check_distribution(&probs)?;
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::NotNormalized(sum));
        }
        Ok(JointDistribution {
            secrets,
            observables,
            probs,
        })
    }

    /// `π ▷ C`: `P(x, y) = π_x · C[x][y]`.
    pub fn from_prior_channel(prior: &Prior, channel: &Channel) -> Result<Self> {
        prior
            .alphabet()
            .ensure_same(channel.input(), "prior vs channel input")?;
        let ny = channel.cols();
        let mut probs = Vec::with_capacity(prior.len() * ny);
        for (x, &p) in prior.probs().iter().enumerate() {
            probs.extend(channel.row(x).iter().map(|c| p * c));
        }
        Ok(JointDistribution {
            secrets: prior.alphabet().clone(),
            observables: channel.output().clone(),
            probs,
        })
    }

    pub fn secrets(&self) -> &Alphabet {
        &self.secrets
    }

    pub fn observables(&self) -> &Alphabet {
        &self.observables
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.observables.size() + y]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Marginal on secrets.
    pub fn secret_marginal(&self) -> Vec<f64> {
        self.probs
            .chunks_exact(self.observables.size())
            .map(|r| kahan_sum(r.iter().copied()))
            .collect()
    }
}
