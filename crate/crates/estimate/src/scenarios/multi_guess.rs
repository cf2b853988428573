use gleak_core::{Alphabet, Channel, GainFunction};
use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{EstimateError, Result};

/// Rows `C[x][y] ∝ exp(−ν·|r(x) − y|)` over `y ∈ 0..observables`, with
/// `r(x) = scale·x + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricChannelConfig {
    pub nu: f64,
    pub secrets: usize,
    pub observables: usize,
    pub scale: f64,
    pub offset: f64,
}

impl GeometricChannelConfig {
    /// Ten secrets spread over 16000 observables.
    pub fn paper() -> Self {
        GeometricChannelConfig {
            nu: 0.002,
            secrets: 10,
            observables: 16_000,
            scale: 1000.0,
            offset: 3499.5,
        }
    }

    /// The same decay on a grid ten times coarser. Secrets sit 100 apart
    /// against a noise scale of 500, so this channel is much noisier than
    /// [`paper`](Self::paper).
    pub fn desk() -> Self {
        GeometricChannelConfig {
            nu: 0.002,
            secrets: 10,
            observables: 1600,
            scale: 100.0,
            offset: 349.5,
        }
    }

    /// Coarse grid with the decay scaled by ten, which keeps the shape (and
    /// the vulnerability) of the [`paper`](Self::paper) channel.
    pub fn desk_shape() -> Self {
        GeometricChannelConfig {
            nu: 0.02,
            ..GeometricChannelConfig::desk()
        }
    }

    pub fn lambda(&self) -> f64 {
        (self.nu / 2.0).tanh()
    }

    pub fn center(&self, x: usize) -> f64 {
        self.scale * x as f64 + self.offset
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) || self.secrets == 0 || self.observables == 0 {
            return Err(EstimateError::InvalidConfig(
                "geometric channel needs nu > 0 and non-empty alphabets".into(),
            ));
        }
        if !self.scale.is_finite() || !self.offset.is_finite() {
            return Err(EstimateError::InvalidConfig("rescaling must be finite".into()));
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        let lam = self.lambda();
        (0..self.secrets)
            .flat_map(|x| {
                let c = self.center(x);
                (0..self.observables).map(move |y| lam * (-self.nu * (c - y as f64).abs()).exp())
            })
            .collect()
    }

    /// Mass of each untruncated row that falls on `0..observables`.
    pub fn retained_mass(&self) -> Vec<f64> {
        self.weights()
            .chunks(self.observables)
            .map(|r| r.iter().sum())
            .collect()
    }
}

/// The truncated rows renormalized.
pub fn geometric_channel(config: &GeometricChannelConfig) -> Result<Channel> {
    config.validate()?;
    Ok(Channel::from_weights(
        Alphabet::indexed(config.secrets),
        Alphabet::indexed(config.observables),
        config.weights(),
    )?)
}

/// Guesses are the `k`-subsets of the secrets in lexicographic order;
/// a guess gains 1 when it contains the secret.
pub fn two_tries_gain(secrets: usize, k: usize) -> Result<GainFunction> {
    if k == 0 || k >= secrets {
        return Err(EstimateError::InvalidConfig(format!(
            "need 1 <= k < |X|, got k = {k}, |X| = {secrets}"
        )));
    }
    let subsets: Vec<Vec<usize>> = (0..secrets).combinations(k).collect();
    let labels = subsets
        .iter()
        .map(|s| format!("{{{}}}", s.iter().join(",")));
    let matrix = subsets
        .iter()
        .flat_map(|s| (0..secrets).map(move |x| if s.contains(&x) { 1.0 } else { 0.0 }))
        .collect();
    Ok(GainFunction::new(Alphabet::new(labels)?, Alphabet::indexed(secrets), matrix)?)
}
