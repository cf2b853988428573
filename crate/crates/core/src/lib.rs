//! Core quantitative-information-flow machinery.
//!
//! Priors, channels and gain functions over finite alphabets, the exact
//! prior/posterior g-vulnerability and g-leakage, sampling of
//! secret/observable pairs, the two pre-processing reductions from
//! g-vulnerability to Bayes vulnerability, and closed-form calculators for
//! the estimation error bounds.

pub mod alphabet;
pub mod bounds;
pub mod channel;
pub mod error;
pub mod gain;
pub mod joint;
pub mod numeric;
pub mod preprocess;
pub mod prior;
pub mod rng;
pub mod sample;
pub mod strategy;
pub mod vulnerability;

pub use alphabet::Alphabet;
pub use channel::{Channel, ChannelSampler};
pub use error::{Error, Result};
pub use gain::{Gain, GainFunction, IntegerGain};
pub use joint::JointDistribution;
pub use prior::{Prior, PriorSampler};
pub use rng::{stream_rng, Provenance, StreamId, StreamRng};
pub use sample::{
    empirical_functional, sample_joint, sample_pairs, Classifier, Mechanism, Observable, Sample,
    SampleSet, Secret, SecretSource,
};
pub use strategy::Strategy;
pub use vulnerability::{
    bayes_vulnerability, enumerate_strategies_vulnerability, leakage, optimal_strategy,
    posterior_vulnerability, prior_vulnerability, strategy_gain, LeakageMode,
};

/// Absolute tolerance for row-stochasticity and normalization checks.
pub const STOCHASTIC_TOL: f64 = 1e-9;
