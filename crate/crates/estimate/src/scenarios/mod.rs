//! Generators for the four case studies. Each yields a [`Scenario`]: black-box
//! sampling access to secrets and observations, the gain, its integer form
//! for data pre-processing, the pre-processed input side for channel
//! pre-processing, and the exact vulnerability.

pub mod dp;
pub mod location;
pub mod multi_guess;
pub mod noise;
pub mod password;

use std::fs::File;
use std::path::PathBuf;
use std::sync::Arc;

use gleak_core::preprocess::{channel_preprocess, rationalize_gain, GuessSecretSource};
use gleak_core::{
    posterior_vulnerability, Channel, Gain, GainFunction, IntegerGain, Mechanism, Prior,
    SecretSource,
};
use gleak_learn::{DistanceMetric, FeatureCodec};
use serde::{Deserialize, Serialize};

use crate::error::{EstimateError, Result};
pub use dp::{cleveland_histogram, DpConfig, NoisyHistogram, CLEVELAND_COUNTS};
pub use location::{
    diamond_gain, gowalla_ingest, grid_geometric_mechanism, synthetic_city_prior, CheckinRegion, DiamondGain,
    GridObservations,
};
pub use multi_guess::{geometric_channel, two_tries_gain, GeometricChannelConfig};
pub use noise::TwoSidedGeometric;
pub use password::{PasswordConfig, PasswordGain};

/// Largest integer gain allowed when rationalizing for data pre-processing.
pub const DEFAULT_EXPANSION_CAP: u64 = 1000;

/// Finite prior, channel and gain behind a matrix scenario.
#[derive(Clone, Debug)]
pub struct MatrixModel {
    pub prior: Prior,
    pub channel: Channel,
    pub gain: GainFunction,
}

#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub source: Arc<dyn SecretSource>,
    pub mechanism: Arc<dyn Mechanism>,
    pub gain: Arc<dyn Gain>,
    pub weights: Arc<dyn IntegerGain>,
    pub preprocessed: Arc<dyn GuessSecretSource>,
    /// Exact vulnerability in original gain units.
    pub exact: f64,
    pub codec: FeatureCodec,
    pub metric: DistanceMetric,
    pub matrix: Option<MatrixModel>,
}

impl std::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("exact", &self.exact)
            .field("codec", &self.codec)
            .field("metric", &self.metric)
            .finish_non_exhaustive()
    }
}

impl Scenario {
    pub fn num_guesses(&self) -> usize {
        self.gain.num_guesses()
    }

    /// Scenario over explicit matrices; the exact value is the posterior
    /// vulnerability and observables are output indices unless `mechanism`
    /// overrides them.
    pub fn from_matrices(
        name: &str,
        model: MatrixModel,
        mechanism: Option<Arc<dyn Mechanism>>,
        codec: FeatureCodec,
        metric: DistanceMetric,
        expansion_cap: u64,
    ) -> Result<Self> {
        let MatrixModel { prior, channel, gain } = &model;
        let exact = gain.to_original_units(posterior_vulnerability(prior, channel, gain)?);
        let weights = rationalize_gain(gain, expansion_cap)?;
        let preprocessed = channel_preprocess(prior, gain)?.sampler()?;
        let mechanism = match mechanism {
            Some(m) => m,
            None => Arc::new(channel.sampler()?),
        };
        Ok(Scenario {
            name: name.into(),
            source: Arc::new(prior.sampler()?),
            mechanism,
            gain: Arc::new(gain.clone()),
            weights: Arc::new(weights),
            preprocessed: Arc::new(preprocessed),
            exact,
            codec,
            metric,
            matrix: Some(model),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiGuessConfig {
    pub channel: GeometricChannelConfig,
    pub tries: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationConfig {
    pub grid: usize,
    pub cell_side: f64,
    pub nu: f64,
    pub gain: DiamondGain,
    /// Check-in dump for the prior; a synthetic city is used when absent.
    pub checkins: Option<PathBuf>,
    pub region: CheckinRegion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioConfig {
    MultiGuess(MultiGuessConfig),
    Location(LocationConfig),
    Dp(DpConfig),
    Password(PasswordConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    MultiGuess,
    Location,
    Dp,
    Password,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::MultiGuess,
        ScenarioKind::Location,
        ScenarioKind::Dp,
        ScenarioKind::Password,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::MultiGuess => "multi-guess",
            ScenarioKind::Location => "location",
            ScenarioKind::Dp => "dp",
            ScenarioKind::Password => "password",
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = EstimateError;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| EstimateError::InvalidConfig(format!("unknown scenario `{s}`")))
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl ScenarioConfig {
    /// Full-size settings.
    pub fn paper(kind: ScenarioKind) -> Self {
        match kind {
            ScenarioKind::MultiGuess => ScenarioConfig::MultiGuess(MultiGuessConfig {
                channel: GeometricChannelConfig::paper(),
                tries: 2,
            }),
            ScenarioKind::Location => ScenarioConfig::Location(LocationConfig {
                grid: 20,
                cell_side: 250.0,
                nu: 1.0,
                gain: DiamondGain::default(),
                checkins: None,
                region: CheckinRegion::default(),
            }),
            ScenarioKind::Dp => ScenarioConfig::Dp(DpConfig::default()),
            ScenarioKind::Password => ScenarioConfig::Password(PasswordConfig::default()),
        }
    }

    /// Reduced settings that run on a single core: a coarser observable grid
    /// for the multiple-guess channel and a 10 × 10 location grid.
    pub fn desk(kind: ScenarioKind) -> Self {
        match ScenarioConfig::paper(kind) {
            ScenarioConfig::MultiGuess(c) => ScenarioConfig::MultiGuess(MultiGuessConfig {
                channel: GeometricChannelConfig::desk(),
                ..c
            }),
            ScenarioConfig::Location(c) => ScenarioConfig::Location(LocationConfig { grid: 10, ..c }),
            other => other,
        }
    }

    pub fn kind(&self) -> ScenarioKind {
        match self {
            ScenarioConfig::MultiGuess(_) => ScenarioKind::MultiGuess,
            ScenarioConfig::Location(_) => ScenarioKind::Location,
            ScenarioConfig::Dp(_) => ScenarioKind::Dp,
            ScenarioConfig::Password(_) => ScenarioKind::Password,
        }
    }

    pub fn build(&self) -> Result<Scenario> {
        let name = self.kind().name();
        match self {
            ScenarioConfig::MultiGuess(c) => {
                let channel = geometric_channel(&c.channel)?;
                let gain = two_tries_gain(c.channel.secrets, c.tries)?;
                let prior = Prior::uniform(channel.input().clone());
                Scenario::from_matrices(
                    name,
                    MatrixModel { prior, channel, gain },
                    None,
                    FeatureCodec::scalar(c.channel.observables),
                    DistanceMetric::Absolute,
                    DEFAULT_EXPANSION_CAP,
                )
            }
            ScenarioConfig::Location(c) => {
                let prior = match &c.checkins {
                    Some(path) => {
                        let region = CheckinRegion {
                            grid: c.grid,
                            ..c.region.clone()
                        };
                        gowalla_ingest(File::open(path)?, &region)?.0
                    }
                    None => synthetic_city_prior(c.grid)?,
                };
                let channel = grid_geometric_mechanism(c.grid, c.nu)?;
                let gain = diamond_gain(c.grid, c.cell_side, c.gain)?;
                let mechanism: Arc<dyn Mechanism> = Arc::new(GridObservations::new(&channel, c.grid)?);
                Scenario::from_matrices(
                    name,
                    MatrixModel { prior, channel, gain },
                    Some(mechanism),
                    FeatureCodec::grid(c.grid),
                    DistanceMetric::Euclidean,
                    DEFAULT_EXPANSION_CAP,
                )
            }
            ScenarioConfig::Dp(c) => {
                c.validate()?;
                let prior = c.prior();
                let gain = c.gain();
                let weights = rationalize_gain(&gain, DEFAULT_EXPANSION_CAP)?;
                let preprocessed = channel_preprocess(&prior, &gain)?.sampler()?;
                Ok(Scenario {
                    name: name.into(),
                    source: Arc::new(prior.sampler()?),
                    mechanism: Arc::new(c.mechanism()?),
                    gain: Arc::new(gain),
                    weights: Arc::new(weights),
                    preprocessed: Arc::new(preprocessed),
                    exact: c.exact_vulnerability()?,
                    codec: FeatureCodec::counts(dp::LABELS, c.total() as usize),
                    metric: DistanceMetric::Manhattan,
                    matrix: None,
                })
            }
            ScenarioConfig::Password(c) => {
                let gain = c.gain()?;
                Ok(Scenario {
                    name: name.into(),
                    source: Arc::new(c.source()?),
                    mechanism: Arc::new(c.checker()?),
                    gain: Arc::new(gain),
                    weights: Arc::new(gain),
                    preprocessed: Arc::new(c.preprocessed()?),
                    exact: c.exact_vulnerability()?,
                    codec: FeatureCodec::scalar(password::BITS as usize),
                    metric: DistanceMetric::Absolute,
                    matrix: None,
                })
            }
        }
    }
}
