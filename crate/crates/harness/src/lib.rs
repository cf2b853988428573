//! Experiment driver: configuration profiles, the trial matrix, error
//! metrics and report files behind the `leak` command.

pub mod config;
pub mod error;
pub mod metrics;
pub mod report;
pub mod trials;

pub use config::{mlp_preset, MlpSchedule, MlpSettings, Profile, TrialMatrixConfig, SCHEMA_VERSION};
pub use error::{exit_code, HarnessError, Result};
pub use metrics::MetricsReport;
pub use report::{emit_reports, ReportFiles};
pub use trials::{run_trial_matrix, run_trial_matrix_on, ArmResult, MatrixOutcome};
