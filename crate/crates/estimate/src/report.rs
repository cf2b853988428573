use serde::{Deserialize, Serialize};

use crate::learner::LearnerKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DataPreproc,
    ChannelPreproc,
    Frequentist,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::DataPreproc => "data-preproc",
            Method::ChannelPreproc => "channel-preproc",
            Method::Frequentist => "frequentist",
        })
    }
}

/// Stream used by one phase of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStream {
    pub phase: String,
    pub stream: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    /// Empirical gain of the learnt strategy on the validation pairs, in
    /// original gain units.
    pub estimate: f64,
    pub method: Method,
    pub learner: LearnerKind,
    pub m: usize,
    pub n: usize,
    /// Factor `K` applied to the gain for duplication; the estimate is
    /// always computed with the unscaled gain.
    pub gain_scale: u64,
    /// Total weight of the pre-processed training set.
    pub training_weight: u64,
    pub master_seed: u64,
    pub streams: Vec<PhaseStream>,
    pub wall_time_secs: f64,
}
