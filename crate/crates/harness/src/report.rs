use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::TrialMatrixConfig;
use crate::error::Result;
use crate::metrics::MetricsReport;
use crate::trials::MatrixOutcome;

#[derive(Serialize)]
struct ArmSummary<'a> {
    method: String,
    learner: String,
    m: usize,
    n: usize,
    training_weights: &'a [u64],
    metrics: &'a MetricsReport,
}

#[derive(Serialize)]
struct Summary<'a> {
    schema: u32,
    scenario: &'a str,
    exact: f64,
    config: &'a TrialMatrixConfig,
    notes: [&'static str; 3],
    arms: Vec<ArmSummary<'a>>,
}

const NOTES: [&str; 3] = [
    "training sets are drawn independently for every size and index; validation sets are shared by all models",
    "estimates are evaluated with the original gain on (secret, observable) pairs",
    "network optimizer (Adam) and weight initialization are implementation defaults, not taken from the hyper-parameter table",
];

/// Paths written by [`emit_reports`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportFiles {
    pub summary: PathBuf,
    pub trials: PathBuf,
    pub boxplot: PathBuf,
}

impl ReportFiles {
    pub fn for_prefix(prefix: &Path) -> Self {
        let with = |suffix: &str| {
            let mut s = prefix.as_os_str().to_owned();
            s.push(suffix);
            PathBuf::from(s)
        };
        ReportFiles {
            summary: with(".summary.json"),
            trials: with(".trials.csv"),
            boxplot: with(".boxplot.csv"),
        }
    }
}

/// Writes `<prefix>.summary.json`, `<prefix>.trials.csv` and
/// `<prefix>.boxplot.csv`. Nothing time-dependent is written, so reruns with
/// the same configuration produce identical files.
pub fn emit_reports(outcome: &MatrixOutcome, config: &TrialMatrixConfig, prefix: &Path) -> Result<ReportFiles> {
    let files = ReportFiles::for_prefix(prefix);
    if let Some(dir) = files.summary.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }

    let summary = Summary {
        schema: crate::config::SCHEMA_VERSION,
        scenario: &outcome.scenario,
        exact: outcome.exact,
        config,
        notes: NOTES,
        arms: outcome
            .arms
            .iter()
            .map(|a| ArmSummary {
                method: a.method.to_string(),
                learner: a.learner.to_string(),
                m: a.m,
                n: a.n,
                training_weights: &a.training_weights,
                metrics: &a.metrics,
            })
            .collect(),
    };
    let mut out = BufWriter::new(File::create(&files.summary)?);
    serde_json::to_writer_pretty(&mut out, &summary)?;
    out.write_all(b"\n")?;
    out.flush()?;

    let mut trials = csv::Writer::from_path(&files.trials)?;
    trials.write_record(["scenario", "method", "learner", "m", "n", "i", "j", "estimate", "exact", "delta"])?;
    for a in &outcome.arms {
        for (i, row) in a.estimates.iter().enumerate() {
            for (j, est) in row.iter().enumerate() {
                trials.write_record([
                    outcome.scenario.clone(),
                    a.method.to_string(),
                    a.learner.to_string(),
                    a.m.to_string(),
                    a.n.to_string(),
                    i.to_string(),
                    j.to_string(),
                    est.to_string(),
                    outcome.exact.to_string(),
                    a.metrics.deltas[i][j].to_string(),
                ])?;
            }
        }
    }
    trials.flush()?;

    let mut boxes = csv::Writer::from_path(&files.boxplot)?;
    boxes.write_record([
        "scenario",
        "method",
        "learner",
        "m",
        "min",
        "q1",
        "median",
        "q3",
        "max",
        "mean",
        "dispersion",
        "total_error",
    ])?;
    for a in &outcome.arms {
        let [lo, q1, med, q3, hi] = a.metrics.five_numbers();
        let mut rec = vec![
            outcome.scenario.clone(),
            a.method.to_string(),
            a.learner.to_string(),
            a.m.to_string(),
        ];
        rec.extend(
            [lo, q1, med, q3, hi, a.metrics.mean, a.metrics.dispersion, a.metrics.total_error]
                .iter()
                .map(f64::to_string),
        );
        boxes.write_record(&rec)?;
    }
    boxes.flush()?;
    Ok(files)
}
