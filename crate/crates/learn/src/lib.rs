//! Learners that approximate the Bayes classifier on pre-processed data.
//!
//! [`KnnClassifier`] is a nearest-neighbour vote over the distinct training
//! observables; [`MlpClassifier`] is a small feed-forward network trained
//! on weighted cross-entropy.

pub mod codec;
pub mod error;
pub mod knn;
pub mod metric;
pub mod mlp;

pub use codec::FeatureCodec;
pub use error::{LearnError, Result};
pub use knn::{knn_k, KnnClassifier};
pub use metric::DistanceMetric;
pub use mlp::{gradient_check, MlpClassifier, MlpConfig, SoftRow};
