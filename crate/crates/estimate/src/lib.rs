//! Black-box estimation of g-vulnerability.
//!
//! Pipelines reduce the problem to classification (through data or channel
//! pre-processing), train a learner and evaluate it on fresh validation
//! pairs with the original gain. A counting estimator and majority-vote
//! ensembles serve as baselines. The `scenarios` module generates the four
//! case studies: multiple guesses, location privacy, differential privacy
//! and a password checker.

pub mod ensemble;
pub mod error;
pub mod frequentist;
pub mod learner;
pub mod pipeline;
pub mod report;
pub mod scenarios;

pub use ensemble::{ensemble_majority, MajorityEnsemble};
pub use error::{EstimateError, Result};
pub use frequentist::{frequentist_estimate, FrequentistClassifier};
pub use learner::{train_learner, LearnerKind, LearnerSpec};
pub use pipeline::{
    estimate_channel_preproc, estimate_data_preproc, evaluate, train_channel_preproc, train_data_preproc,
    Trained,
};
pub use report::{EstimateReport, Method, PhaseStream};
