use gleak_core::preprocess::WeightedSampleSet;
use gleak_core::{Classifier, StreamId};
use gleak_learn::{DistanceMetric, FeatureCodec, KnnClassifier, MlpClassifier, MlpConfig};
use serde::{Deserialize, Serialize};

use crate::error::{EstimateError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    Knn,
    Mlp,
    None,
}

impl std::fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LearnerKind::Knn => "knn",
            LearnerKind::Mlp => "mlp",
            LearnerKind::None => "none",
        })
    }
}

/// Everything needed to train one classifier on a weighted set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub metric: DistanceMetric,
    pub codec: FeatureCodec,
    pub mlp: Option<MlpConfig>,
}

pub fn train_learner(
    data: &WeightedSampleSet,
    spec: &LearnerSpec,
    master_seed: u64,
    stream: StreamId,
) -> Result<Box<dyn Classifier>> {
    match spec.kind {
        LearnerKind::Knn => Ok(Box::new(KnnClassifier::train(data, spec.metric)?)),
        LearnerKind::Mlp => {
            let cfg = spec
                .mlp
                .as_ref()
                .ok_or_else(|| EstimateError::InvalidConfig("mlp learner needs an mlp config".into()))?;
            Ok(Box::new(MlpClassifier::train(data, &spec.codec, cfg, master_seed, stream)?))
        }
        LearnerKind::None => Err(EstimateError::InvalidConfig(
            "learner `none` cannot be trained".into(),
        )),
    }
}
