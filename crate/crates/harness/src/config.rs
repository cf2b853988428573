use std::path::Path;

use gleak_estimate::scenarios::{ScenarioConfig, ScenarioKind};
use gleak_estimate::{LearnerKind, Method};
use gleak_learn::MlpConfig;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Desk,
    Paper,
}

/// Network settings for one pre-processing method. `epochs[k]` and
/// `batch_size[k]` apply to the `k`-th training size; the last entry covers
/// the remaining sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpSchedule {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: Vec<usize>,
    pub batch_size: Vec<usize>,
}

impl MlpSchedule {
    fn uniform(hidden: &[usize], epochs: usize, batch_size: usize) -> Self {
        MlpSchedule {
            hidden: hidden.to_vec(),
            learning_rate: 1e-3,
            epochs: vec![epochs],
            batch_size: vec![batch_size],
        }
    }

    pub fn at(&self, size_index: usize) -> MlpConfig {
        let pick = |v: &[usize]| v[size_index.min(v.len() - 1)];
        MlpConfig {
            hidden: self.hidden.clone(),
            learning_rate: self.learning_rate,
            epochs: pick(&self.epochs),
            batch_size: pick(&self.batch_size),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.epochs.is_empty() || self.batch_size.is_empty() {
            return Err(HarnessError::Config("mlp schedule needs epochs and batch sizes".into()));
        }
        self.at(0)
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpSettings {
    pub data_preproc: MlpSchedule,
    pub channel_preproc: MlpSchedule,
}

impl MlpSettings {
    pub fn for_method(&self, method: Method) -> &MlpSchedule {
        match method {
            Method::ChannelPreproc => &self.channel_preproc,
            _ => &self.data_preproc,
        }
    }
}

/// Everything that determines a run of the trial matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialMatrixConfig {
    pub schema: u32,
    pub seed: u64,
    pub profile: Profile,
    pub methods: Vec<Method>,
    pub learners: Vec<LearnerKind>,
    /// Training sizes `m` (pairs drawn before any pre-processing).
    pub sizes: Vec<usize>,
    /// Number of independent training sets per size.
    pub training_sets: usize,
    /// Number of validation sets, shared by all models.
    pub validation_sets: usize,
    pub validation_size: usize,
    pub mlp: MlpSettings,
    pub scenario: ScenarioConfig,
}

impl TrialMatrixConfig {
    pub fn preset(kind: ScenarioKind, profile: Profile) -> Self {
        let (scenario, training_sets, validation_sets, validation_size) = match profile {
            Profile::Desk => (ScenarioConfig::desk(kind), 3, 10, 10_000),
            Profile::Paper => (ScenarioConfig::paper(kind), 5, 50, 50_000),
        };
        let sizes = match (profile, kind) {
            (Profile::Desk, _) => vec![2_000, 10_000, 30_000],
            (Profile::Paper, ScenarioKind::Location) => vec![100, 1_000, 10_000],
            (Profile::Paper, _) => vec![10_000, 30_000, 50_000],
        };
        TrialMatrixConfig {
            schema: SCHEMA_VERSION,
            seed: 1,
            profile,
            methods: vec![Method::DataPreproc, Method::ChannelPreproc, Method::Frequentist],
            learners: vec![LearnerKind::Knn, LearnerKind::Mlp],
            sizes,
            training_sets,
            validation_sets,
            validation_size,
            mlp: mlp_preset(kind, profile),
            scenario,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: TrialMatrixConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                self.schema
            )));
        }
        if self.training_sets == 0 || self.validation_sets == 0 {
            return Err(HarnessError::Config("need at least one training and one validation set".into()));
        }
        if self.validation_size == 0 || self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(HarnessError::Config("sizes must be positive".into()));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::Config("no methods".into()));
        }
        let learner_methods = self.methods.iter().any(|&m| m != Method::Frequentist);
        if learner_methods && self.learners.is_empty() {
            return Err(HarnessError::Config("no learners".into()));
        }
        if self.learners.contains(&LearnerKind::None) {
            return Err(HarnessError::Config("learner `none` is implied by the frequentist method".into()));
        }
        self.mlp.data_preproc.validate()?;
        self.mlp.channel_preproc.validate()?;
        Ok(())
    }

    /// `(method, learner)` pairs in run order; the frequentist method has no
    /// learner.
    pub fn arms(&self) -> Vec<(Method, LearnerKind)> {
        let mut arms = Vec::new();
        for &m in &self.methods {
            if m == Method::Frequentist {
                arms.push((m, LearnerKind::None));
            } else {
                arms.extend(self.learners.iter().map(|&l| (m, l)));
            }
        }
        arms
    }
}

/// Network settings from the hyper-parameter table; the desk profile trims
/// the networks whose training would not fit a single core.
pub fn mlp_preset(kind: ScenarioKind, profile: Profile) -> MlpSettings {
    const SMALL: [usize; 3] = [100, 100, 100];
    const WIDE: [usize; 3] = [500, 500, 500];
    match (kind, profile) {
        (ScenarioKind::MultiGuess, _) => MlpSettings {
            data_preproc: MlpSchedule::uniform(&SMALL, 700, 1000),
            channel_preproc: MlpSchedule::uniform(&SMALL, 500, 1000),
        },
        (ScenarioKind::Location, Profile::Paper) => MlpSettings {
            data_preproc: MlpSchedule {
                hidden: WIDE.to_vec(),
                learning_rate: 1e-3,
                epochs: vec![1000],
                batch_size: vec![200, 500, 1000],
            },
            channel_preproc: MlpSchedule {
                hidden: WIDE.to_vec(),
                learning_rate: 1e-3,
                epochs: vec![200, 500, 1000],
                batch_size: vec![20, 200, 500],
            },
        },
        (ScenarioKind::Location, Profile::Desk) => MlpSettings {
            data_preproc: MlpSchedule::uniform(&SMALL, 200, 1000),
            channel_preproc: MlpSchedule::uniform(&SMALL, 200, 500),
        },
        (ScenarioKind::Dp, Profile::Paper) => MlpSettings {
            data_preproc: MlpSchedule::uniform(&SMALL, 500, 200),
            channel_preproc: MlpSchedule::uniform(&SMALL, 500, 200),
        },
        (ScenarioKind::Dp, Profile::Desk) => MlpSettings {
            data_preproc: MlpSchedule::uniform(&SMALL, 20, 200),
            channel_preproc: MlpSchedule::uniform(&SMALL, 20, 200),
        },
        (ScenarioKind::Password, _) => MlpSettings {
            data_preproc: MlpSchedule::uniform(&SMALL, 700, 1000),
            channel_preproc: MlpSchedule::uniform(&SMALL, 700, 1000),
        },
    }
}
