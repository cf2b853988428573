use gleak_core::{sample_pairs, Classifier, SampleSet, StreamId};
use gleak_estimate::pipeline::{evaluate, train_channel_preproc, train_data_preproc};
use gleak_estimate::scenarios::Scenario;
use gleak_estimate::{FrequentistClassifier, LearnerKind, LearnerSpec, Method};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::TrialMatrixConfig;
use crate::error::Result;
use crate::metrics::MetricsReport;

/// One `(method, learner, size)` block of the matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmResult {
    pub method: Method,
    pub learner: LearnerKind,
    pub m: usize,
    pub n: usize,
    /// `I × J` estimates in original gain units.
    pub estimates: Vec<Vec<f64>>,
    /// Total weight of each pre-processed training set.
    pub training_weights: Vec<u64>,
    pub metrics: MetricsReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixOutcome {
    pub scenario: String,
    pub exact: f64,
    pub arms: Vec<ArmResult>,
}

/// Stream of the `i`-th training set of size `m`. Training sets are drawn
/// independently for every size and index; all arms share them.
pub fn training_stream(m: usize, i: usize) -> StreamId {
    StreamId::named("train", &[m as u64, i as u64])
}

/// Stream of the `i`-th channel pre-processing training set of size `m`.
pub fn channel_training_stream(m: usize, i: usize) -> StreamId {
    StreamId::named("channel-train", &[m as u64, i as u64])
}

pub fn validation_stream(j: usize) -> StreamId {
    StreamId::named("validation", &[j as u64])
}

pub fn learner_stream(method: Method, learner: LearnerKind, m: usize, i: usize) -> StreamId {
    let method = match method {
        Method::DataPreproc => 0,
        Method::ChannelPreproc => 1,
        Method::Frequentist => 2,
    };
    let learner = match learner {
        LearnerKind::Knn => 0,
        LearnerKind::Mlp => 1,
        LearnerKind::None => 2,
    };
    StreamId::named("learner", &[method, learner, m as u64, i as u64])
}

struct Job {
    arm: usize,
    method: Method,
    learner: LearnerKind,
    size_index: usize,
    m: usize,
    i: usize,
}

fn train_one(config: &TrialMatrixConfig, scenario: &Scenario, job: &Job) -> Result<(Box<dyn Classifier>, u64)> {
    let seed = config.seed;
    let spec = || LearnerSpec {
        kind: job.learner,
        metric: scenario.metric,
        codec: scenario.codec.clone(),
        mlp: Some(config.mlp.for_method(job.method).at(job.size_index)),
    };
    let train = || -> SampleSet {
        sample_pairs(
            &*scenario.source,
            &*scenario.mechanism,
            job.m,
            seed,
            training_stream(job.m, job.i),
        )
    };
    let stream = learner_stream(job.method, job.learner, job.m, job.i);
    Ok(match job.method {
        Method::DataPreproc => {
            let t = train_data_preproc(&train(), &*scenario.weights, &spec(), seed, stream)?;
            (t.classifier, t.training_weight)
        }
        Method::ChannelPreproc => {
            let t = train_channel_preproc(
                &*scenario.preprocessed,
                &*scenario.mechanism,
                job.m,
                &spec(),
                seed,
                channel_training_stream(job.m, job.i),
                stream,
            )?;
            (t.classifier, t.training_weight)
        }
        Method::Frequentist => {
            let f = FrequentistClassifier::train(&train(), &*scenario.gain)?;
            (Box::new(f), job.m as u64)
        }
    })
}

/// Trains `I` models per arm and size, evaluates each on the `J` shared
/// validation sets and reduces the normalized errors. Jobs run on the rayon
/// pool; results are assembled in job order, so the outcome does not depend
/// on scheduling.
pub fn run_trial_matrix(config: &TrialMatrixConfig) -> Result<MatrixOutcome> {
    config.validate()?;
    let scenario = config.scenario.build()?;
    run_trial_matrix_on(config, &scenario)
}

pub fn run_trial_matrix_on(config: &TrialMatrixConfig, scenario: &Scenario) -> Result<MatrixOutcome> {
    config.validate()?;
    // fail before any training when normalization is impossible
    MetricsReport::from_estimates(&[vec![scenario.exact]], scenario.exact)?;
    let validation: Vec<SampleSet> = (0..config.validation_sets)
        .into_par_iter()
        .map(|j| {
            sample_pairs(
                &*scenario.source,
                &*scenario.mechanism,
                config.validation_size,
                config.seed,
                validation_stream(j),
            )
        })
        .collect();

    let arms = config.arms();
    let mut jobs = Vec::new();
    for (arm, &(method, learner)) in arms.iter().enumerate() {
        for (size_index, &m) in config.sizes.iter().enumerate() {
            for i in 0..config.training_sets {
                jobs.push(Job {
                    arm: arm * config.sizes.len() + size_index,
                    method,
                    learner,
                    size_index,
                    m,
                    i,
                });
            }
        }
    }
    let rows: Vec<(Vec<f64>, u64)> = jobs
        .par_iter()
        .map(|job| {
            let (model, weight) = train_one(config, scenario, job)?;
            let estimates = validation
                .iter()
                .map(|v| evaluate(&*model, v, &*scenario.gain))
                .collect::<std::result::Result<Vec<f64>, _>>()?;
            Ok((estimates, weight))
        })
        .collect::<Result<_>>()?;

    let mut results = Vec::new();
    let per_block = config.training_sets;
    for (block, chunk) in rows.chunks(per_block).enumerate() {
        let job = &jobs[block * per_block];
        debug_assert_eq!(job.arm, block);
        let estimates: Vec<Vec<f64>> = chunk.iter().map(|r| r.0.clone()).collect();
        results.push(ArmResult {
            method: job.method,
            learner: job.learner,
            m: job.m,
            n: config.validation_size,
            training_weights: chunk.iter().map(|r| r.1).collect(),
            metrics: MetricsReport::from_estimates(&estimates, scenario.exact)?,
            estimates,
        });
    }
    Ok(MatrixOutcome {
        scenario: scenario.name.clone(),
        exact: scenario.exact,
        arms: results,
    })
}
