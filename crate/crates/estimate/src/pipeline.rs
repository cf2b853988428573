use std::time::Instant;

use gleak_core::preprocess::{data_preprocess, sample_preprocessed_channel, GuessSecretSource};
use gleak_core::{empirical_functional, Classifier, Gain, IntegerGain, Mechanism, SampleSet, StreamId};

use crate::error::{EstimateError, Result};
use crate::learner::{train_learner, LearnerSpec};
use crate::report::{EstimateReport, Method, PhaseStream};

/// A classifier together with what it was trained on.
pub struct Trained {
    pub classifier: Box<dyn Classifier>,
    pub m: usize,
    pub training_weight: u64,
    pub gain_scale: u64,
}

impl std::fmt::Debug for Trained {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Trained")
            .field("m", &self.m)
            .field("training_weight", &self.training_weight)
            .field("gain_scale", &self.gain_scale)
            .finish_non_exhaustive()
    }
}

/// Duplicates each training pair by the integer gain and fits the learner.
pub fn train_data_preproc(
    train: &SampleSet,
    weights: &dyn IntegerGain,
    learner: &LearnerSpec,
    master_seed: u64,
    learner_stream: StreamId,
) -> Result<Trained> {
    let data = data_preprocess(train, weights)?;
    let classifier = train_learner(&data, learner, master_seed, learner_stream)?;
    Ok(Trained {
        classifier,
        m: train.len(),
        training_weight: data.total_weight(),
        gain_scale: weights.scale(),
    })
}

/// Draws `m` pairs `w ~ τ, x ~ R(w), y ~ C(x)` and fits the learner on them.
pub fn train_channel_preproc(
    source: &dyn GuessSecretSource,
    mechanism: &dyn Mechanism,
    m: usize,
    learner: &LearnerSpec,
    master_seed: u64,
    sample_stream: StreamId,
    learner_stream: StreamId,
) -> Result<Trained> {
    let data = sample_preprocessed_channel(source, mechanism, m, master_seed, sample_stream)?;
    let classifier = train_learner(&data, learner, master_seed, learner_stream)?;
    Ok(Trained {
        classifier,
        m,
        training_weight: data.total_weight(),
        gain_scale: 1,
    })
}

/// Empirical gain of `classifier` on the validation pairs, in original gain
/// units. Fails if the value leaves the gain range.
pub fn evaluate<C: Classifier + ?Sized>(classifier: &C, valid: &SampleSet, gain: &dyn Gain) -> Result<f64> {
    let v = empirical_functional(classifier, valid, gain)?;
    let (low, high) = gain.range();
    let slack = 1e-12 * high.abs().max(1.0);
    if v < low - slack || v > high + slack {
        return Err(EstimateError::OutOfRange {
            estimate: v,
            low,
            high,
        });
    }
    Ok(v - gain.shift())
}

fn phase(name: &str, s: StreamId) -> PhaseStream {
    PhaseStream {
        phase: name.into(),
        stream: s.0,
    }
}

/// Data pre-processing estimate: rewrite the training pairs, train, then
/// evaluate with the original gain on the `(x, y)` validation pairs.
#[allow(clippy::too_many_arguments)]
pub fn estimate_data_preproc(
    train: &SampleSet,
    valid: &SampleSet,
    gain: &dyn Gain,
    weights: &dyn IntegerGain,
    learner: &LearnerSpec,
    master_seed: u64,
    learner_stream: StreamId,
) -> Result<EstimateReport> {
    let start = Instant::now();
    let trained = train_data_preproc(train, weights, learner, master_seed, learner_stream)?;
    let estimate = evaluate(&trained.classifier, valid, gain)?;
    let mut streams = Vec::new();
    if let Some(p) = train.provenance {
        streams.push(phase("train", StreamId(p.stream)));
    }
    if let Some(p) = valid.provenance {
        streams.push(phase("validation", StreamId(p.stream)));
    }
    streams.push(phase("learner", learner_stream));
    Ok(EstimateReport {
        estimate,
        method: Method::DataPreproc,
        learner: learner.kind,
        m: train.len(),
        n: valid.len(),
        gain_scale: trained.gain_scale,
        training_weight: trained.training_weight,
        master_seed,
        streams,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Channel pre-processing estimate. The validation still uses `(x, y)`
/// pairs and the original gain, so the factor `β` never appears explicitly.
#[allow(clippy::too_many_arguments)]
pub fn estimate_channel_preproc(
    source: &dyn GuessSecretSource,
    mechanism: &dyn Mechanism,
    m: usize,
    valid: &SampleSet,
    gain: &dyn Gain,
    learner: &LearnerSpec,
    master_seed: u64,
    sample_stream: StreamId,
    learner_stream: StreamId,
) -> Result<EstimateReport> {
    if !(source.beta() > 0.0) {
        return Err(EstimateError::InvalidConfig(
            "pre-processed channel has zero mass (beta = 0)".into(),
        ));
    }
    let start = Instant::now();
    let trained = train_channel_preproc(
        source,
        mechanism,
        m,
        learner,
        master_seed,
        sample_stream,
        learner_stream,
    )?;
    let estimate = evaluate(&trained.classifier, valid, gain)?;
    let mut streams = vec![phase("train", sample_stream)];
    if let Some(p) = valid.provenance {
        streams.push(phase("validation", StreamId(p.stream)));
    }
    streams.push(phase("learner", learner_stream));
    Ok(EstimateReport {
        estimate,
        method: Method::ChannelPreproc,
        learner: learner.kind,
        m,
        n: valid.len(),
        gain_scale: 1,
        training_weight: trained.training_weight,
        master_seed,
        streams,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
