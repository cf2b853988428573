use std::collections::HashMap;

use gleak_core::preprocess::{
    channel_preprocess, data_preprocess, ideal_derivation, sample_preprocessed_channel, IntegerGainMatrix,
    WeightedSampleSet,
};
use gleak_core::{
    empirical_functional, sample_joint, sample_pairs, strategy_gain, Alphabet, Channel, GainFunction,
    JointDistribution, Observable, Prior, Sample, SampleSet, Secret, StreamId, Strategy,
};

fn fixture() -> (Prior, Channel, GainFunction) {
    let prior = Prior::new(Alphabet::indexed(3), vec![0.2, 0.5, 0.3]).unwrap();
    let channel = Channel::from_rows(vec![
        vec![0.7, 0.2, 0.1, 0.0],
        vec![0.1, 0.3, 0.3, 0.3],
        vec![0.25, 0.25, 0.25, 0.25],
    ])
    .unwrap();
    let gain = GainFunction::from_rows(vec![
        vec![2.0, 1.0, 0.0],
        vec![0.0, 3.0, 1.0],
        vec![1.0, 0.0, 4.0],
    ])
    .unwrap();
    (prior, channel, gain)
}

/// Total variation between an empirical weighted set and a dense `|W|×|Y|`
/// distribution.
fn tv_against_dense(set: &WeightedSampleSet, dense: &[f64], ny: usize) -> f64 {
    let emp = set.distribution();
    let mut tv = 0.0;
    for (cell, p) in dense.iter().enumerate() {
        let key = (cell / ny, Observable::scalar((cell % ny) as i64));
        tv += (emp.get(&key).copied().unwrap_or(0.0) - p).abs();
    }
    0.5 * tv
}

#[test]
fn degenerate_joint_repeats_its_only_pair() {
    let j = JointDistribution::new(Alphabet::indexed(2), Alphabet::indexed(2), vec![0.0, 0.0, 1.0, 0.0])
        .unwrap();
    let s = sample_joint(&j, 5, 1, StreamId(0)).unwrap();
    assert_eq!(s.len(), 5);
    assert!(s.iter().all(|p| p.secret == 1 && p.observable == Observable::scalar(0)));
}

#[test]
fn sampling_is_deterministic_per_stream() {
    let (p, c, _) = fixture();
    let j = JointDistribution::from_prior_channel(&p, &c).unwrap();
    let a = sample_joint(&j, 500, 42, StreamId::named("train", &[0])).unwrap();
    let b = sample_joint(&j, 500, 42, StreamId::named("train", &[0])).unwrap();
    let other = sample_joint(&j, 500, 42, StreamId::named("train", &[1])).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.samples, other.samples);

    let src = p.sampler().unwrap();
    let mech = c.sampler().unwrap();
    let x = sample_pairs(&src, &mech, 300, 9, StreamId(3));
    let y = sample_pairs(&src, &mech, 300, 9, StreamId(3));
    assert_eq!(x, y);
}

#[test]
fn uniform_cells_have_expected_frequency() {
    let j = JointDistribution::new(Alphabet::indexed(2), Alphabet::indexed(2), vec![0.25; 4]).unwrap();
    let s = sample_joint(&j, 100_000, 7, StreamId(1)).unwrap();
    let mut counts = [0usize; 4];
    for p in s.iter() {
        counts[p.secret as usize * 2 + p.observable.as_index().unwrap()] += 1;
    }
    for c in counts {
        let f = c as f64 / 100_000.0;
        assert!((f - 0.25).abs() <= 0.01, "frequency {f}");
    }
}

#[test]
fn prior_channel_sampling_matches_joint() {
    let (p, c, _) = fixture();
    let j = JointDistribution::from_prior_channel(&p, &c).unwrap();
    let s = sample_pairs(&p.sampler().unwrap(), &c.sampler().unwrap(), 100_000, 3, StreamId(5));
    let mut counts: HashMap<(Secret, usize), usize> = HashMap::new();
    for x in s.iter() {
        *counts.entry((x.secret, x.observable.as_index().unwrap())).or_default() += 1;
    }
    for x in 0..3 {
        for y in 0..4 {
            let f = counts.get(&(x as Secret, y)).copied().unwrap_or(0) as f64 / 1e5;
            let sd = (j.get(x, y) * (1.0 - j.get(x, y)) / 1e5).sqrt();
            assert!((f - j.get(x, y)).abs() <= 6.0 * sd + 1e-12);
        }
    }
}

#[test]
fn exhaustive_support_gives_strategy_gain() {
    // joint with rational cells k/20 so that exact multiplicities exist
    let counts = [3usize, 1, 0, 2, 4, 2, 1, 0, 5, 2];
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / 20.0).collect();
    let j = JointDistribution::new(Alphabet::indexed(2), Alphabet::indexed(5), probs).unwrap();
    let gain = GainFunction::from_rows(vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![0.5, 0.5]]).unwrap();
    let strategy = Strategy::new(vec![0, 1, 2, 1, 0]);
    let samples = counts
        .iter()
        .enumerate()
        .flat_map(|(cell, &c)| {
            std::iter::repeat_n(Sample {
                secret: (cell / 5) as Secret,
                observable: Observable::scalar((cell % 5) as i64),
            }, c)
        })
        .collect();
    let v = empirical_functional(&strategy, &SampleSet::new(samples), &gain).unwrap();
    let exact = strategy_gain(&strategy, &j, &gain).unwrap();
    assert!((v - exact).abs() < 1e-15, "{v} vs {exact}");
}

#[test]
fn empirical_functional_is_unbiased() {
    let (p, c, g) = fixture();
    let j = JointDistribution::from_prior_channel(&p, &c).unwrap();
    let strategy = Strategy::new(vec![0, 1, 1, 2]);
    let target = strategy_gain(&strategy, &j, &g).unwrap();
    let reps = 1000;
    let estimates: Vec<f64> = (0..reps)
        .map(|r| {
            let s = sample_joint(&j, 1000, 11, StreamId::named("unbiased", &[r])).unwrap();
            empirical_functional(&strategy, &s, &g).unwrap()
        })
        .collect();
    let mean = estimates.iter().sum::<f64>() / reps as f64;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
    let se = var.sqrt() / (reps as f64).sqrt();
    assert!((mean - target).abs() <= 4.0 * se, "mean {mean} target {target} se {se}");
}

#[test]
fn data_preprocessing_converges_to_ideal_joint() {
    let (p, c, g) = fixture();
    let j = JointDistribution::from_prior_channel(&p, &c).unwrap();
    let train = sample_joint(&j, 100_000, 5, StreamId::named("train", &[0])).unwrap();
    let ig = IntegerGainMatrix::from_gain(&g).unwrap();
    let weighted = data_preprocess(&train, &ig).unwrap();
    let ideal = ideal_derivation(&p, &c, &g).unwrap();
    let tv = tv_against_dense(&weighted, &ideal.joint(), c.cols());
    assert!(tv <= 0.02, "tv {tv}");
}

#[test]
fn channel_preprocessing_samples_follow_tau_rc() {
    let (p, c, g) = fixture();
    let d = channel_preprocess(&p, &g).unwrap();
    let rc = d.r.compose(&c).unwrap();
    let dense: Vec<f64> = (0..rc.rows())
        .flat_map(|w| (0..rc.cols()).map(move |y| (w, y)))
        .map(|(w, y)| d.tau.probs()[w] * rc.get(w, y))
        .collect();
    let set = sample_preprocessed_channel(
        &d.sampler().unwrap(),
        &c.sampler().unwrap(),
        100_000,
        5,
        StreamId::named("channel", &[0]),
    )
    .unwrap();
    assert_eq!(set.total_weight(), 100_000);
    let tv = tv_against_dense(&set, &dense, c.cols());
    assert!(tv <= 0.02, "tv {tv}");
}

#[test]
fn sample_sets_round_trip_through_csv() {
    let (p, c, _) = fixture();
    let s = sample_pairs(&p.sampler().unwrap(), &c.sampler().unwrap(), 50, 1, StreamId(2));
    let mut buf = Vec::new();
    s.write_csv(&mut buf, None).unwrap();
    let back = SampleSet::read_csv(buf.as_slice(), None).unwrap();
    assert_eq!(back.samples, s.samples);
    back.validate(&Alphabet::indexed(3)).unwrap();
    assert!(back.validate(&Alphabet::indexed(1)).is_err());
}
