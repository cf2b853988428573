//! Feed-forward network: ReLU hidden layers, softmax output, weighted
//! cross-entropy, Adam updates.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use gleak_core::numeric::argmax;
use gleak_core::preprocess::WeightedSampleSet;
use gleak_core::{stream_rng, Classifier, Observable, StreamId, StreamRng};
use ndarray::{Array1, Array2, Axis};
use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::codec::FeatureCodec;
use crate::error::{LearnError, Result};

const EXPORT_HEADER: &str = "gleak-mlp 1";
const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpConfig {
    /// Widths of the hidden layers.
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Target total weight per mini-batch (a weight-`k` row counts as `k`
    /// samples).
    pub batch_size: usize,
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(LearnError::InvalidConfig(
                "hidden layers must be non-empty with widths >= 1".into(),
            ));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(LearnError::InvalidConfig("epochs and batch size must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(LearnError::InvalidConfig("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Training row: the features of one observable, the distribution of guesses
/// recorded with it, and its total weight.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftRow {
    pub features: Vec<f64>,
    pub target: Vec<f64>,
    pub weight: f64,
}

/// Groups a weighted set by observable. Cross-entropy against the soft target
/// times the row weight equals the summed cross-entropy of the duplicated
/// pairs.
pub fn soft_rows(data: &WeightedSampleSet, codec: &FeatureCodec) -> Vec<SoftRow> {
    let nw = data.num_guesses();
    let mut by_obs: BTreeMap<&Observable, Vec<f64>> = BTreeMap::new();
    for e in data.entries() {
        by_obs.entry(&e.observable).or_insert_with(|| vec![0.0; nw])[e.guess] += e.weight as f64;
    }
    by_obs
        .into_iter()
        .map(|(y, counts)| {
            let weight: f64 = counts.iter().sum();
            SoftRow {
                features: codec.encode(y),
                target: counts.iter().map(|c| c / weight).collect(),
                weight,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
struct Layer {
    /// `fan_in × fan_out`.
    w: Array2<f64>,
    b: Array1<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpClassifier {
    codec: FeatureCodec,
    layers: Vec<Layer>,
    loss_history: Vec<f64>,
}

struct Adam {
    t: i32,
    m: Vec<Layer>,
    v: Vec<Layer>,
}

impl Adam {
    fn new(layers: &[Layer]) -> Self {
        let zeros: Vec<Layer> = layers
            .iter()
            .map(|l| Layer {
                w: Array2::zeros(l.w.raw_dim()),
                b: Array1::zeros(l.b.raw_dim()),
            })
            .collect();
        Adam {
            t: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    fn step(&mut self, layers: &mut [Layer], grads: &[Layer], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.t);
        let c2 = 1.0 - ADAM_BETA2.powi(self.t);
        let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            // moments of parameters whose gradient stays zero decay into
            // subnormals, which are very slow to compute with
            if m.abs() < f64::MIN_POSITIVE {
                *m = 0.0;
            }
            if *v < f64::MIN_POSITIVE {
                *v = 0.0;
            }
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPS);
        };
        for (((layer, g), m), v) in layers.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            ndarray::Zip::from(&mut layer.w)
                .and(&g.w)
                .and(&mut m.w)
                .and(&mut v.w)
                .for_each(|p, &g, m, v| update(p, g, m, v));
            ndarray::Zip::from(&mut layer.b)
                .and(&g.b)
                .and(&mut m.b)
                .and(&mut v.b)
                .for_each(|p, &g, m, v| update(p, g, m, v));
        }
    }
}

fn init_layers(dims: &[usize], rng: &mut StreamRng) -> Vec<Layer> {
    dims.windows(2)
        .map(|d| {
            let (fan_in, fan_out) = (d[0], d[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let u = Uniform::new_inclusive(-bound, bound);
            Layer {
                w: Array2::from_shape_simple_fn((fan_in, fan_out), || u.sample(rng)),
                b: Array1::zeros(fan_out),
            }
        })
        .collect()
}

/// Hidden activations (starting with the input) and output logits.
fn forward(layers: &[Layer], x: Array2<f64>) -> (Vec<Array2<f64>>, Array2<f64>) {
    let mut acts = Vec::with_capacity(layers.len());
    let mut a = x;
    for (i, layer) in layers.iter().enumerate() {
        let mut z = a.dot(&layer.w) + &layer.b;
        acts.push(a);
        if i + 1 == layers.len() {
            return (acts, z);
        }
        z.mapv_inplace(|v| v.max(0.0));
        a = z;
    }
    unreachable!("network has at least one layer")
}

/// Row-wise softmax in place; returns per-row log-sum-exp of the logits.
fn softmax_rows(z: &mut Array2<f64>) -> Vec<f64> {
    let mut lse = Vec::with_capacity(z.nrows());
    for mut row in z.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
        lse.push(max + s.ln());
    }
    lse
}

/// Weighted mean cross-entropy of a batch and its gradient.
fn loss_and_grad(
    layers: &[Layer],
    x: Array2<f64>,
    targets: &Array2<f64>,
    weights: &[f64],
) -> (f64, Vec<Layer>) {
    let total: f64 = weights.iter().sum();
    let (acts, logits) = forward(layers, x);
    let mut probs = logits.clone();
    let lse = softmax_rows(&mut probs);
    let mut loss = 0.0;
    for (r, (zrow, qrow)) in logits.rows().into_iter().zip(targets.rows()).enumerate() {
        let ce: f64 = zrow
            .iter()
            .zip(qrow)
            .filter(|(_, &q)| q > 0.0)
            .map(|(&z, &q)| -q * (z - lse[r]))
            .sum();
        loss += weights[r] * ce;
    }
    loss /= total;

    let mut delta = probs - targets;
    for (mut row, &w) in delta.rows_mut().into_iter().zip(weights) {
        row *= w / total;
    }
    let mut grads = Vec::with_capacity(layers.len());
    for (i, layer) in layers.iter().enumerate().rev() {
        let a = &acts[i];
        grads.push(Layer {
            w: a.t().dot(&delta),
            b: delta.sum_axis(Axis(0)),
        });
        if i > 0 {
            let mut back = delta.dot(&layer.w.t());
            ndarray::Zip::from(&mut back).and(a).for_each(|d, &act| {
                if act <= 0.0 {
                    *d = 0.0;
                }
            });
            delta = back;
        }
    }
    grads.reverse();
    (loss, grads)
}

fn rows_matrix(rows: &[&SoftRow], dims: usize, width: impl Fn(&SoftRow) -> &[f64]) -> Array2<f64> {
    let mut m = Array2::zeros((rows.len(), dims));
    for (mut out, r) in m.rows_mut().into_iter().zip(rows) {
        out.iter_mut().zip(width(r)).for_each(|(o, v)| *o = *v);
    }
    m
}

/// Splits shuffled rows into consecutive batches of total weight at least
/// `batch_size` (the last may be lighter).
fn weight_batches(order: &[usize], rows: &[SoftRow], batch_size: f64) -> Vec<Vec<usize>> {
    let mut batches = Vec::new();
    let mut cur = Vec::new();
    let mut w = 0.0;
    for &i in order {
        cur.push(i);
        w += rows[i].weight;
        if w >= batch_size {
            batches.push(std::mem::take(&mut cur));
            w = 0.0;
        }
    }
    if !cur.is_empty() {
        batches.push(cur);
    }
    batches
}

impl MlpClassifier {
    /// Trains on a weighted set; deterministic in `(master_seed, stream)`.
    pub fn train(
        data: &WeightedSampleSet,
        codec: &FeatureCodec,
        config: &MlpConfig,
        master_seed: u64,
        stream: StreamId,
    ) -> Result<Self> {
        if data.is_empty() {
            return Err(LearnError::EmptyData);
        }
        let rows = soft_rows(data, codec);
        Self::train_rows(&rows, data.num_guesses(), codec, config, master_seed, stream)
    }

    pub fn train_rows(
        rows: &[SoftRow],
        num_guesses: usize,
        codec: &FeatureCodec,
        config: &MlpConfig,
        master_seed: u64,
        stream: StreamId,
    ) -> Result<Self> {
        config.validate()?;
        if rows.is_empty() {
            return Err(LearnError::EmptyData);
        }
        if num_guesses == 0 {
            return Err(LearnError::InvalidConfig("no guesses".into()));
        }
        let mut rng = stream_rng(master_seed, stream);
        let dims: Vec<usize> = std::iter::once(codec.dims())
            .chain(config.hidden.iter().copied())
            .chain(std::iter::once(num_guesses))
            .collect();
        let mut layers = init_layers(&dims, &mut rng);
        let mut adam = Adam::new(&layers);
        let total_weight: f64 = rows.iter().map(|r| r.weight).sum();
        let mut order: Vec<usize> = (0..rows.len()).collect();
        let mut loss_history = Vec::with_capacity(config.epochs);

        for epoch in 1..=config.epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for batch in weight_batches(&order, rows, config.batch_size as f64) {
                let picked: Vec<&SoftRow> = batch.iter().map(|&i| &rows[i]).collect();
                let x = rows_matrix(&picked, codec.dims(), |r| &r.features);
                let q = rows_matrix(&picked, num_guesses, |r| &r.target);
                let w: Vec<f64> = picked.iter().map(|r| r.weight).collect();
                let batch_weight: f64 = w.iter().sum();
                let (loss, grads) = loss_and_grad(&layers, x, &q, &w);
                if !loss.is_finite() {
                    return Err(LearnError::Diverged { epoch, loss });
                }
                epoch_loss += loss * batch_weight / total_weight;
                adam.step(&mut layers, &grads, config.learning_rate);
            }
            let finite = layers
                .iter()
                .all(|l| l.w.iter().chain(l.b.iter()).all(|v| v.is_finite()));
            if !finite || !epoch_loss.is_finite() {
                return Err(LearnError::Diverged {
                    epoch,
                    loss: epoch_loss,
                });
            }
            loss_history.push(epoch_loss);
        }
        Ok(MlpClassifier {
            codec: codec.clone(),
            layers,
            loss_history,
        })
    }

    /// Builds a network from explicit `(weights[fan_in][fan_out], biases)`
    /// per layer.
    pub fn from_parameters(codec: FeatureCodec, params: Vec<(Vec<Vec<f64>>, Vec<f64>)>) -> Result<Self> {
        let mut layers = Vec::with_capacity(params.len());
        let mut fan_in = codec.dims();
        for (i, (w, b)) in params.into_iter().enumerate() {
            let fan_out = b.len();
            if w.len() != fan_in || w.iter().any(|r| r.len() != fan_out) || fan_out == 0 {
                return Err(LearnError::InvalidConfig(format!("layer {i} has inconsistent shape")));
            }
            let flat: Vec<f64> = w.into_iter().flatten().collect();
            layers.push(Layer {
                w: Array2::from_shape_vec((fan_in, fan_out), flat).expect("shape checked"),
                b: Array1::from(b),
            });
            fan_in = fan_out;
        }
        if layers.is_empty() {
            return Err(LearnError::InvalidConfig("network needs a layer".into()));
        }
        Ok(MlpClassifier {
            codec,
            layers,
            loss_history: Vec::new(),
        })
    }

    pub fn codec(&self) -> &FeatureCodec {
        &self.codec
    }

    pub fn num_guesses(&self) -> usize {
        self.layers.last().map_or(0, |l| l.b.len())
    }

    /// Mean weighted training loss per epoch.
    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    pub fn parameters(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.w.iter().chain(l.b.iter()).copied())
            .collect()
    }

    pub fn set_parameters(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.parameter_count());
        let mut it = values.iter();
        for l in &mut self.layers {
            for p in l.w.iter_mut().chain(l.b.iter_mut()) {
                *p = *it.next().expect("length checked");
            }
        }
    }

    /// Weighted cross-entropy over `rows` and its gradient, flattened in
    /// [`parameters`](Self::parameters) order.
    pub fn loss_gradient(&self, rows: &[SoftRow]) -> (f64, Vec<f64>) {
        let picked: Vec<&SoftRow> = rows.iter().collect();
        let x = rows_matrix(&picked, self.codec.dims(), |r| &r.features);
        let q = rows_matrix(&picked, self.num_guesses(), |r| &r.target);
        let w: Vec<f64> = rows.iter().map(|r| r.weight).collect();
        let (loss, grads) = loss_and_grad(&self.layers, x, &q, &w);
        let flat = grads
            .iter()
            .flat_map(|l| l.w.iter().chain(l.b.iter()).copied())
            .collect();
        (loss, flat)
    }

    pub fn loss(&self, rows: &[SoftRow]) -> f64 {
        self.loss_gradient(rows).0
    }

    pub fn logits(&self, y: &Observable) -> Vec<f64> {
        let x = Array2::from_shape_vec((1, self.codec.dims()), self.codec.encode(y))
            .expect("codec dims");
        forward(&self.layers, x).1.into_raw_vec_and_offset().0
    }

    /// Softmax output for `y`.
    pub fn probabilities(&self, y: &Observable) -> Vec<f64> {
        let mut z = Array2::from_shape_vec((1, self.num_guesses()), self.logits(y))
            .expect("output width");
        softmax_rows(&mut z);
        z.into_raw_vec_and_offset().0
    }

    /// Versioned text dump; floats use round-trip formatting.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let row = |v: &mut dyn Iterator<Item = &f64>| {
            v.map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
        };
        writeln!(out, "{EXPORT_HEADER}").unwrap();
        writeln!(out, "codec {} {:?}", self.codec.dims(), self.codec.scale()).unwrap();
        writeln!(out, "layers {}", self.layers.len()).unwrap();
        for l in &self.layers {
            writeln!(out, "layer {} {}", l.w.nrows(), l.w.ncols()).unwrap();
            for r in l.w.rows() {
                writeln!(out, "{}", row(&mut r.iter())).unwrap();
            }
            writeln!(out, "{}", row(&mut l.b.iter())).unwrap();
        }
        out
    }

    pub fn import(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| LearnError::Import {
                line: 0,
                msg: format!("unexpected end of input, expected {what}"),
            })
        };
        let err = |line: usize, msg: String| LearnError::Import { line, msg };
        let (n, header) = next("header")?;
        if header != EXPORT_HEADER {
            return Err(err(n, format!("unsupported header {header:?}")));
        }
        fn fields<T: std::str::FromStr>(line: usize, s: &str, tag: &str, count: usize) -> Result<Vec<T>> {
            let mut parts = s.split_whitespace();
            if !tag.is_empty() && parts.next() != Some(tag) {
                return Err(LearnError::Import {
                    line,
                    msg: format!("expected `{tag}`"),
                });
            }
            let vals = parts
                .map(|p| p.parse::<T>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| LearnError::Import {
                    line,
                    msg: "malformed number".into(),
                })?;
            if vals.len() != count {
                return Err(LearnError::Import {
                    line,
                    msg: format!("expected {count} values, found {}", vals.len()),
                });
            }
            Ok(vals)
        }
        let (n, l) = next("codec")?;
        let c: Vec<f64> = fields(n, l, "codec", 2)?;
        let codec = FeatureCodec::new(c[0] as usize, c[1]).map_err(|e| err(n, e.to_string()))?;
        let (n, l) = next("layers")?;
        let count = fields::<usize>(n, l, "layers", 1)?[0];
        let mut params = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, l) = next("layer")?;
            let shape: Vec<usize> = fields(n, l, "layer", 2)?;
            let mut w = Vec::with_capacity(shape[0]);
            for _ in 0..shape[0] {
                let (n, l) = next("weights")?;
                w.push(fields::<f64>(n, l, "", shape[1])?);
            }
            let (n, l) = next("biases")?;
            params.push((w, fields::<f64>(n, l, "", shape[1])?));
        }
        MlpClassifier::from_parameters(codec, params)
    }
}

impl Classifier for MlpClassifier {
    fn predict(&self, y: &Observable) -> usize {
        argmax(self.logits(y))
    }
}

/// Largest relative error between back-propagated gradients and central
/// differences (step `1e-5`) for a freshly initialised network on `rows`.
/// Gradient pairs below `1e-6` in magnitude are compared against `1e-6`.
pub fn gradient_check(
    codec: &FeatureCodec,
    hidden: &[usize],
    num_guesses: usize,
    rows: &[SoftRow],
    seed: u64,
) -> f64 {
    let mut rng = stream_rng(seed, StreamId::named("gradient-check", &[]));
    let dims: Vec<usize> = std::iter::once(codec.dims())
        .chain(hidden.iter().copied())
        .chain(std::iter::once(num_guesses))
        .collect();
    let mut net = MlpClassifier {
        codec: codec.clone(),
        layers: init_layers(&dims, &mut rng),
        loss_history: Vec::new(),
    };
    // random biases so that no unit starts exactly at a kink
    let bias = Uniform::new_inclusive(-0.5, 0.5);
    for l in &mut net.layers {
        l.b.mapv_inplace(|_| bias.sample(&mut rng));
    }
    let (_, analytic) = net.loss_gradient(rows);
    let base = net.parameters();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.iter().enumerate() {
        let mut p = base.clone();
        p[i] = base[i] + h;
        net.set_parameters(&p);
        let up = net.loss(rows);
        p[i] = base[i] - h;
        net.set_parameters(&p);
        let down = net.loss(rows);
        let numeric = (up - down) / (2.0 * h);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use gleak_core::preprocess::WeightedEntry;

    fn cfg(hidden: Vec<usize>, epochs: usize) -> MlpConfig {
        MlpConfig {
            hidden,
            learning_rate: 1e-2,
            epochs,
            batch_size: 4,
        }
    }

    #[test]
    fn config_validation() {
        assert!(cfg(vec![3, 0], 1).validate().is_err());
        assert!(cfg(vec![], 1).validate().is_err());
        assert!(cfg(vec![3], 0).validate().is_err());
        let table = MlpConfig {
            hidden: vec![100, 100, 100],
            learning_rate: 1e-3,
            epochs: 700,
            batch_size: 1000,
        };
        assert!(table.validate().is_ok());
    }

    #[test]
    fn separable_toy_set_is_learnt() {
        let data = WeightedSampleSet::new(
            2,
            vec![
                WeightedEntry {
                    guess: 0,
                    observable: Observable::scalar(1),
                    weight: 5,
                },
                WeightedEntry {
                    guess: 1,
                    observable: Observable::scalar(9),
                    weight: 5,
                },
            ],
        )
        .unwrap();
        let codec = FeatureCodec::scalar(10);
        let m = MlpClassifier::train(&data, &codec, &cfg(vec![4], 200), 1, StreamId(0)).unwrap();
        assert_eq!(m.predict(&Observable::scalar(1)), 0);
        assert_eq!(m.predict(&Observable::scalar(9)), 1);
        let h = m.loss_history();
        assert_eq!(h.len(), 200);
        assert!(h[199] <= h[0]);
    }

    #[test]
    fn prediction_tie_rules() {
        let codec = FeatureCodec::scalar(1);
        // logits ln(0.1), ln(0.9) through a single linear layer with zero weight
        let m = MlpClassifier::from_parameters(
            codec.clone(),
            vec![(vec![vec![0.0, 0.0]], vec![0.1f64.ln(), 0.9f64.ln()])],
        )
        .unwrap();
        let p = m.probabilities(&Observable::scalar(0));
        assert!((p[1] - 0.9).abs() < 1e-12);
        assert_eq!(m.predict(&Observable::scalar(0)), 1);
        let tie = MlpClassifier::from_parameters(codec.clone(), vec![(vec![vec![0.0, 0.0]], vec![0.3, 0.3])])
            .unwrap();
        assert_eq!(tie.predict(&Observable::scalar(0)), 0);
        let shifted =
            MlpClassifier::from_parameters(codec, vec![(vec![vec![0.0, 0.0]], vec![0.1f64.ln() + 7.0, 0.9f64.ln() + 7.0])])
                .unwrap();
        assert_eq!(shifted.predict(&Observable::scalar(0)), 1);
        assert_eq!(shifted.probabilities(&Observable::scalar(0)), p);
    }

    #[test]
    fn single_hidden_unit_gradient() {
        let rows = vec![SoftRow {
            features: vec![0.7],
            target: vec![1.0, 0.0],
            weight: 1.0,
        }];
        let err = gradient_check(&FeatureCodec::scalar(1), &[1], 2, &rows, 3);
        assert!(err <= 1e-4, "relative error {err}");
    }

    #[test]
    fn zero_network_on_uniform_targets_has_zero_gradient() {
        let codec = FeatureCodec::scalar(1);
        let net = MlpClassifier::from_parameters(
            codec,
            vec![
                (vec![vec![0.0, 0.0]], vec![0.0, 0.0]),
                (vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]], vec![0.0, 0.0, 0.0]),
            ],
        )
        .unwrap();
        let rows = vec![SoftRow {
            features: vec![0.4],
            target: vec![1.0 / 3.0; 3],
            weight: 2.0,
        }];
        let (loss, g) = net.loss_gradient(&rows);
        assert!((loss - 3f64.ln()).abs() < 1e-12);
        assert!(g.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn export_round_trip_is_exact() {
        let rows = vec![SoftRow {
            features: vec![0.2, 0.9],
            target: vec![0.25, 0.75],
            weight: 3.0,
        }];
        let codec = FeatureCodec::grid(5);
        let m = MlpClassifier::train_rows(&rows, 2, &codec, &cfg(vec![3, 2], 5), 9, StreamId(1)).unwrap();
        let text = m.export();
        let back = MlpClassifier::import(&text).unwrap();
        assert_eq!(back.parameters(), m.parameters());
        assert_eq!(back.export(), text);
        assert!(MlpClassifier::import("gleak-mlp 2\n").is_err());
        assert!(MlpClassifier::import(&text.replace("layer 2 3", "layer 2 4")).is_err());
    }
}
