use std::io::Read;

use gleak_core::{Alphabet, GainFunction, Mechanism, Observable, Prior, Secret, StreamRng};
use serde::{Deserialize, Serialize};

use super::noise::TwoSidedGeometric;
use crate::error::{EstimateError, Result};

/// Severity histogram (labels 0..=4) of the 303-record Cleveland dataset.
pub const CLEVELAND_COUNTS: [u64; 5] = [164, 55, 36, 35, 13];

pub const LABELS: usize = 5;

/// Two adjacent databases: secret 0 is the full histogram, secret 1 lacks
/// one record of `removed_label`. Each count is released with two-sided
/// geometric noise of decay `nu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpConfig {
    pub counts: [u64; LABELS],
    pub removed_label: usize,
    pub nu: f64,
    /// Prior probability of the full database.
    pub prior_full: f64,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig {
            counts: CLEVELAND_COUNTS,
            removed_label: 4,
            nu: 1.0,
            prior_full: 0.5,
        }
    }
}

impl DpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.removed_label >= LABELS {
            return Err(EstimateError::InvalidConfig(format!(
                "removed label must be in 0..{LABELS}, got {}",
                self.removed_label
            )));
        }
        if self.counts[self.removed_label] == 0 {
            return Err(EstimateError::InvalidConfig("no record with the removed label".into()));
        }
        if self.nu.is_nan() || self.nu <= 0.0 {
            return Err(EstimateError::InvalidConfig("noise decay must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.prior_full) {
            return Err(EstimateError::InvalidConfig("prior_full must be a probability".into()));
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn datasets(&self) -> [[i64; LABELS]; 2] {
        let full = self.counts.map(|c| c as i64);
        let mut reduced = full;
        reduced[self.removed_label] -= 1;
        [full, reduced]
    }

    pub fn prior(&self) -> Prior {
        Prior::new(
            Alphabet::new(["full", "reduced"]).expect("distinct labels"),
            vec![self.prior_full, 1.0 - self.prior_full],
        )
        .expect("validated probability")
    }

    /// Identifying the database pays 1, or 2 for the full database when
    /// the target record has a severe label (3 or 4).
    pub fn gain(&self) -> GainFunction {
        let severe = if self.removed_label >= 3 { 2.0 } else { 1.0 };
        let a = Alphabet::new(["full", "reduced"]).expect("distinct labels");
        GainFunction::new(a.clone(), a, vec![severe, 0.0, 0.0, 1.0]).expect("valid gain")
    }

    pub fn mechanism(&self) -> Result<NoisyHistogram> {
        self.validate()?;
        Ok(NoisyHistogram {
            datasets: self.datasets(),
            noise: TwoSidedGeometric::new(self.nu)?,
        })
    }

    /// Exact vulnerability. Only the removed label's count differs between
    /// the secrets, so the other coordinates integrate out and the sum runs
    /// over one noisy count, cut where the noise tail drops below 1e-12.
    pub fn exact_vulnerability(&self) -> Result<f64> {
        self.validate()?;
        let noise = TwoSidedGeometric::new(self.nu)?;
        let r = noise.radius(1e-12) as i64;
        let c = self.counts[self.removed_label] as i64;
        let centers = [c, c - 1];
        let pi = [self.prior_full, 1.0 - self.prior_full];
        let g = self.gain();
        let v: f64 = (c - 1 - r..=c + r)
            .map(|z| {
                (0..2)
                    .map(|w| {
                        (0..2)
                            .map(|x| pi[x] * noise.pmf(z - centers[x]) * g.get(w, x))
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max)
            })
            .sum();
        Ok(v)
    }
}

#[derive(Clone, Debug)]
pub struct NoisyHistogram {
    datasets: [[i64; LABELS]; 2],
    noise: TwoSidedGeometric,
}

impl Mechanism for NoisyHistogram {
    fn observe(&self, secret: Secret, rng: &mut StreamRng) -> Observable {
        let counts = &self.datasets[secret as usize];
        Observable::tuple(counts.iter().map(|&c| c + self.noise.sample(rng)).collect())
    }
}

/// Histogram of a severity column in a comma-separated file. The column
/// defaults to the last one; a first row that does not parse is taken as a
/// header.
pub fn cleveland_histogram<R: Read>(reader: R, column: Option<usize>) -> Result<[u64; LABELS]> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut counts = [0u64; LABELS];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let col = column.unwrap_or(rec.len() - 1);
        let field = rec
            .get(col)
            .ok_or_else(|| EstimateError::Input(format!("row {}: no column {col}", i + 1)))?;
        let label = match field.parse::<f64>() {
            Ok(v) if v.fract() == 0.0 && (0.0..LABELS as f64).contains(&v) => v as usize,
            Err(_) if i == 0 => continue,
            _ => {
                return Err(EstimateError::Input(format!(
                    "row {}: severity `{field}` is not a label in 0..{LABELS}",
                    i + 1
                )))
            }
        };
        counts[label] += 1;
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(EstimateError::Input("no records".into()));
    }
    Ok(counts)
}
