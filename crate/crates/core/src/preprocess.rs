//! Reductions from g-vulnerability estimation to Bayes classification.
//!
//! *Data pre-processing* rewrites each sampled `(x, y)` into `g(w, x)`
//! weighted copies of `(w, y)`; *channel pre-processing* builds a prior `τ`
//! on guesses and a channel `R : W → X` from `π` and `g` alone so that
//! `V_g(π, C) = β · V_gid(τ, RC)` for every channel `C`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_integer::Integer;
use rand::distributions::{Distribution, WeightedIndex};

use crate::alphabet::Alphabet;
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::gain::{GainFunction, IntegerGain};
use crate::numeric::kahan_sum;
use crate::prior::Prior;
use crate::rng::{stream_rng, StreamId, StreamRng};
use crate::sample::{Mechanism, Observable, SampleSet, Secret};

/// Largest denominator accepted when snapping real gains to rationals.
pub const MAX_DENOMINATOR: u64 = 1_000_000;

/// A `(w, y)` pair standing for `weight` identical copies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedEntry {
    pub guess: usize,
    pub observable: Observable,
    pub weight: u64,
}

/// Multiset of `(w, y)` pairs stored with multiplicities. Entries are unique
/// per `(w, y)` and sorted by guess, then observable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSampleSet {
    entries: Vec<WeightedEntry>,
    total_weight: u64,
    num_guesses: usize,
}

impl WeightedSampleSet {
    /// Merges the given entries; zero weights are rejected.
    pub fn new(num_guesses: usize, entries: impl IntoIterator<Item = WeightedEntry>) -> Result<Self> {
        let mut merged: BTreeMap<(usize, Observable), u64> = BTreeMap::new();
        for e in entries {
            if e.weight == 0 {
                return Err(Error::InvalidArgument("weights must be at least 1".into()));
            }
            if e.guess >= num_guesses {
                return Err(Error::InvalidArgument(format!(
                    "guess {} outside alphabet of size {num_guesses}",
                    e.guess
                )));
            }
            *merged.entry((e.guess, e.observable)).or_default() += e.weight;
        }
        Ok(Self::from_map(num_guesses, merged))
    }

    fn from_map(num_guesses: usize, merged: BTreeMap<(usize, Observable), u64>) -> Self {
        let total_weight = merged.values().sum();
        let entries = merged
            .into_iter()
            .map(|((guess, observable), weight)| WeightedEntry {
                guess,
                observable,
                weight,
            })
            .collect();
        WeightedSampleSet {
            entries,
            total_weight,
            num_guesses,
        }
    }

    /// Unit-weight pairs, merged.
    pub fn from_pairs(num_guesses: usize, pairs: impl IntoIterator<Item = (usize, Observable)>) -> Result<Self> {
        Self::new(
            num_guesses,
            pairs.into_iter().map(|(guess, observable)| WeightedEntry {
                guess,
                observable,
                weight: 1,
            }),
        )
    }

    pub fn entries(&self) -> &[WeightedEntry] {
        &self.entries
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn num_guesses(&self) -> usize {
        self.num_guesses
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Expands into the physical multiset, one pair per unit of weight.
    pub fn expand(&self) -> Vec<(usize, Observable)> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n((e.guess, e.observable.clone()), e.weight as usize))
            .collect()
    }

    /// Normalized weights, i.e. the empirical distribution on `W × Y`.
    pub fn distribution(&self) -> BTreeMap<(usize, Observable), f64> {
        let t = self.total_weight as f64;
        self.entries
            .iter()
            .map(|e| ((e.guess, e.observable.clone()), e.weight as f64 / t))
            .collect()
    }

    /// Writes CSV lines `w_label,y_encoding,weight`.
    pub fn write_csv<W: Write>(&self, w: W, guesses: Option<&Alphabet>) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for e in &self.entries {
            let label = guesses.map_or_else(|| e.guess.to_string(), |a| a.label(e.guess).to_string());
            wr.write_record([label, e.observable.encode(), e.weight.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, guesses: &Alphabet) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut entries = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            if rec.len() != 3 {
                return Err(Error::parse(i + 1, "expected `w_label,y_encoding,weight`"));
            }
            entries.push(WeightedEntry {
                guess: guesses.index_of(&rec[0])?,
                observable: Observable::decode(&rec[1])?,
                weight: rec[2]
                    .parse()
                    .map_err(|e| Error::parse(i + 1, format!("weight: {e}")))?,
            });
        }
        Self::new(guesses.size(), entries)
    }
}

/// Total-variation distance between the normalized distributions of two
/// weighted sets.
pub fn total_variation(a: &WeightedSampleSet, b: &WeightedSampleSet) -> f64 {
    let (da, db) = (a.distribution(), b.distribution());
    let mut diff: Vec<f64> = da
        .iter()
        .map(|(k, p)| (p - db.get(k).copied().unwrap_or(0.0)).abs())
        .collect();
    diff.extend(db.iter().filter(|(k, _)| !da.contains_key(*k)).map(|(_, p)| *p));
    0.5 * kahan_sum(diff)
}

/// Replaces each distinct `(x, y)` with multiplicity `u` by weight
/// `u · g(w, x)` on `(w, y)` for every guess `w`.
pub fn data_preprocess(train: &SampleSet, gain: &dyn IntegerGain) -> Result<WeightedSampleSet> {
    if train.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut multiplicity: BTreeMap<(Secret, &Observable), u64> = BTreeMap::new();
    for s in train.iter() {
        *multiplicity.entry((s.secret, &s.observable)).or_default() += 1;
    }
    let mut merged: BTreeMap<(usize, Observable), u64> = BTreeMap::new();
    for ((x, y), u) in multiplicity {
        for w in 0..gain.num_guesses() {
            let g = gain.weight(w, x);
            if g > 0 {
                *merged.entry((w, y.clone())).or_default() += u * g;
            }
        }
    }
    if merged.is_empty() {
        return Err(Error::Degenerate(
            "every training pair has zero gain for every guess".into(),
        ));
    }
    Ok(WeightedSampleSet::from_map(gain.num_guesses(), merged))
}

/// Non-negative integer gain matrix `K · G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerGainMatrix {
    guesses: Alphabet,
    secrets: Alphabet,
    matrix: Vec<u64>,
    scale: u64,
}

impl IntegerGainMatrix {
    /// Uses the gain as-is; fails unless every entry is a non-negative integer.
    pub fn from_gain(gain: &GainFunction) -> Result<Self> {
        let matrix = gain
            .matrix()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
                    Ok(v as u64)
                } else {
                    Err(Error::InvalidEntry { index: i, value: v })
                }
            })
            .collect::<Result<_>>()?;
        Ok(IntegerGainMatrix {
            guesses: gain.guesses().clone(),
            secrets: gain.secrets().clone(),
            matrix,
            scale: 1,
        })
    }

    pub fn get(&self, w: usize, x: usize) -> u64 {
        self.matrix[w * self.secrets.size() + x]
    }

    pub fn matrix(&self) -> &[u64] {
        &self.matrix
    }

    pub fn to_gain_function(&self) -> GainFunction {
        GainFunction::new(
            self.guesses.clone(),
            self.secrets.clone(),
            self.matrix.iter().map(|&v| v as f64).collect(),
        )
        .expect("integer matrix is a valid gain")
    }
}

impl IntegerGain for IntegerGainMatrix {
    fn num_guesses(&self) -> usize {
        self.guesses.size()
    }

    fn weight(&self, guess: usize, secret: Secret) -> u64 {
        self.get(guess, secret as usize)
    }

    fn scale(&self) -> u64 {
        self.scale
    }
}

/// Smallest-denominator continued-fraction convergent `p/q` (with
/// `q ≤ max_den`) within `1e-9 · max(1, v)` of `v ≥ 0`.
fn snap_rational(v: f64, max_den: u64) -> Option<(u64, u64)> {
    let tol = 1e-9 * v.max(1.0);
    let (mut h_prev, mut h) = (0u128, 1u128);
    let (mut k_prev, mut k) = (1u128, 0u128);
    let mut rest = v;
    for _ in 0..64 {
        let a = rest.floor();
        if a > u64::MAX as f64 {
            return None;
        }
        let a = a as u128;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > max_den as u128 {
            return None;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
        if (v - h as f64 / k as f64).abs() <= tol {
            return Some((u64::try_from(h).ok()?, k as u64));
        }
        let frac = rest - a as f64;
        if frac <= 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

/// Snaps each (shifted, non-negative) gain to a rational with denominator at
/// most [`MAX_DENOMINATOR`] and returns `K · G` with `K` the lcm of the
/// denominators. Vulnerabilities computed with the result scale by exactly
/// `K`.
pub fn rationalize_gain(gain: &GainFunction, expansion_cap: u64) -> Result<IntegerGainMatrix> {
    let mut fracs = Vec::with_capacity(gain.matrix().len());
    let mut k: u64 = 1;
    for &v in gain.matrix() {
        let (p, q) = snap_rational(v, MAX_DENOMINATOR).ok_or_else(|| {
            Error::ExpansionCap(format!(
                "gain {v} has no rational form with denominator <= {MAX_DENOMINATOR}"
            ))
        })?;
        let g = k.gcd(&q);
        k = (k / g)
            .checked_mul(q)
            .filter(|&k| k <= expansion_cap)
            .ok_or_else(|| Error::ExpansionCap(format!("lcm of denominators exceeds {expansion_cap}")))?;
        fracs.push((p, q));
    }
    let matrix = fracs
        .into_iter()
        .map(|(p, q)| {
            p.checked_mul(k / q)
                .filter(|&e| e <= expansion_cap)
                .ok_or_else(|| Error::ExpansionCap(format!("scaled gain exceeds {expansion_cap}")))
        })
        .collect::<Result<_>>()?;
    Ok(IntegerGainMatrix {
        guesses: gain.guesses().clone(),
        secrets: gain.secrets().clone(),
        matrix,
        scale: k,
    })
}

/// Ideal outcome of the data pre-processing: `U`, `α`, `ξ` and `E` with
/// `V_g(π, C) = α · V_gid(ξ, E)`.
#[derive(Clone, Debug)]
pub struct DataPreprocDerivation {
    /// `U(w, y) = Σ_x π_x C[x][y] g(w, x)`, row-major `|W| × |Y|`.
    pub u: Vec<f64>,
    pub alpha: f64,
    pub xi: Prior,
    /// `E[w][y] = U(w, y) / (α ξ_w)`; rows with `ξ_w = 0` are uniform.
    pub e: Channel,
}

impl DataPreprocDerivation {
    /// `P_WY(w, y) = U(w, y) / α`.
    pub fn joint(&self) -> Vec<f64> {
        self.u.iter().map(|v| v / self.alpha).collect()
    }
}

pub fn ideal_derivation(prior: &Prior, channel: &Channel, gain: &GainFunction) -> Result<DataPreprocDerivation> {
    prior
        .alphabet()
        .ensure_same(gain.secrets(), "prior vs gain secrets")?;
    prior
        .alphabet()
        .ensure_same(channel.input(), "prior vs channel input")?;
    let (nw, ny) = (gain.guesses().size(), channel.cols());
    let mut u = vec![0.0; nw * ny];
    for w in 0..nw {
        let row = &mut u[w * ny..(w + 1) * ny];
        for (x, (&g, &p)) in gain.row(w).iter().zip(prior.probs()).enumerate() {
            let coef = g * p;
            if coef == 0.0 {
                continue;
            }
            for (r, &c) in row.iter_mut().zip(channel.row(x)) {
                *r += coef * c;
            }
        }
    }
    let alpha = kahan_sum(u.iter().copied());
    if !(alpha > 0.0) {
        return Err(Error::Degenerate(
            "alpha is zero: no pair with positive prior and gain".into(),
        ));
    }
    let row_mass: Vec<f64> = u.chunks_exact(ny).map(|r| kahan_sum(r.iter().copied())).collect();
    let xi = Prior::new(
        gain.guesses().clone(),
        row_mass.iter().map(|m| m / alpha).collect(),
    )?;
    let mut e = Vec::with_capacity(nw * ny);
    for (row, &mass) in u.chunks_exact(ny).zip(&row_mass) {
        if mass > 0.0 {
            e.extend(row.iter().map(|v| v / mass));
        } else {
            e.extend(std::iter::repeat_n(1.0 / ny as f64, ny));
        }
    }
    let e = Channel::new(gain.guesses().clone(), channel.output().clone(), e)?;
    Ok(DataPreprocDerivation { u, alpha, xi, e })
}

/// `β`, `τ` and `R` of the channel pre-processing; they depend only on
/// `π` and `g`.
#[derive(Clone, Debug)]
pub struct ChannelPreprocDerivation {
    pub beta: f64,
    pub tau: Prior,
    /// `R[w][x] = π_x g(w, x) / (β τ_w)`; rows with `τ_w = 0` are uniform.
    pub r: Channel,
}

pub fn channel_preprocess(prior: &Prior, gain: &GainFunction) -> Result<ChannelPreprocDerivation> {
    prior
        .alphabet()
        .ensure_same(gain.secrets(), "prior vs gain secrets")?;
    let (nw, nx) = (gain.guesses().size(), prior.len());
    let weights: Vec<f64> = (0..nw)
        .flat_map(|w| gain.row(w).iter().zip(prior.probs()).map(|(g, p)| g * p))
        .collect();
    let row_mass: Vec<f64> = weights
        .chunks_exact(nx)
        .map(|r| kahan_sum(r.iter().copied()))
        .collect();
    let beta = kahan_sum(row_mass.iter().copied());
    if !(beta > 0.0) {
        return Err(Error::Degenerate(
            "beta is zero: no pair with positive prior and gain".into(),
        ));
    }
    let tau = Prior::new(
        gain.guesses().clone(),
        row_mass.iter().map(|m| m / beta).collect(),
    )?;
    let mut r = Vec::with_capacity(nw * nx);
    for (row, &mass) in weights.chunks_exact(nx).zip(&row_mass) {
        if mass > 0.0 {
            r.extend(row.iter().map(|v| v / mass));
        } else {
            r.extend(std::iter::repeat_n(1.0 / nx as f64, nx));
        }
    }
    let r = Channel::new(gain.guesses().clone(), prior.alphabet().clone(), r)?;
    Ok(ChannelPreprocDerivation { beta, tau, r })
}

impl ChannelPreprocDerivation {
    /// Largest `|β τ_w R[w][x] − g(w, x) π_x|` over all entries.
    pub fn identity_residual(&self, prior: &Prior, gain: &GainFunction) -> f64 {
        let mut worst: f64 = 0.0;
        for w in 0..self.r.rows() {
            for x in 0..self.r.cols() {
                let lhs = self.beta * self.tau.probs()[w] * self.r.get(w, x);
                let rhs = gain.get(w, x) * prior.probs()[x];
                worst = worst.max((lhs - rhs).abs());
            }
        }
        worst
    }

    pub fn sampler(&self) -> Result<ChannelPreprocSampler> {
        ChannelPreprocSampler::new(self)
    }
}

/// Sampling access to the pre-processed input side `τ ▷ R` of the channel
/// pre-processing: draw `w ~ τ`, then `x ~ R[w]`.
pub trait GuessSecretSource: Send + Sync {
    fn beta(&self) -> f64;
    fn num_guesses(&self) -> usize;
    fn draw_guess(&self, rng: &mut StreamRng) -> usize;
    fn draw_secret(&self, guess: usize, rng: &mut StreamRng) -> Secret;
}

#[derive(Clone, Debug)]
pub struct ChannelPreprocSampler {
    beta: f64,
    tau: WeightedIndex<f64>,
    rows: Vec<Option<WeightedIndex<f64>>>,
}

impl ChannelPreprocSampler {
    pub fn new(d: &ChannelPreprocDerivation) -> Result<Self> {
        let tau = WeightedIndex::new(d.tau.probs())
            .map_err(|e| Error::Degenerate(format!("tau: {e}")))?;
        let rows = (0..d.r.rows())
            .map(|w| WeightedIndex::new(d.r.row(w)).ok())
            .collect();
        Ok(ChannelPreprocSampler {
            beta: d.beta,
            tau,
            rows,
        })
    }
}

impl GuessSecretSource for ChannelPreprocSampler {
    fn beta(&self) -> f64 {
        self.beta
    }

    fn num_guesses(&self) -> usize {
        self.rows.len()
    }

    fn draw_guess(&self, rng: &mut StreamRng) -> usize {
        self.tau.sample(rng)
    }

    fn draw_secret(&self, guess: usize, rng: &mut StreamRng) -> Secret {
        let row = self.rows[guess]
            .as_ref()
            .expect("guesses with positive tau have a valid R row");
        row.sample(rng) as Secret
    }
}

/// Draws `count` pairs `(w, y)` from `τ ▷ RC`: `w ~ τ`, `x ~ R[w]`,
/// `y ~ C(x)`.
pub fn sample_preprocessed_channel(
    source: &dyn GuessSecretSource,
    mechanism: &dyn Mechanism,
    count: usize,
    master_seed: u64,
    stream: StreamId,
) -> Result<WeightedSampleSet> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let mut rng = stream_rng(master_seed, stream);
    let pairs: Vec<(usize, Observable)> = (0..count)
        .map(|_| {
            let w = source.draw_guess(&mut rng);
            let x = source.draw_secret(w, &mut rng);
            (w, mechanism.observe(x, &mut rng))
        })
        .collect();
    WeightedSampleSet::from_pairs(source.num_guesses(), pairs)
}
