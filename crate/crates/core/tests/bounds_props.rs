use gleak_core::bounds::{
    bound_report, erf, expected_error_bounds, sample_complexity, training_suboptimality_prob,
    validation_deviation_prob, BoundInputs, GapBranch,
};
use gleak_core::{
    empirical_functional, sample_joint, strategy_gain, Alphabet, GainFunction, JointDistribution, StreamId,
    Strategy,
};
use proptest::prelude::*;

/// Power series `erf x = (2/√π) Σ (-1)ⁿ x^{2n+1} / (n! (2n+1))`, summed in
/// pairs; accurate on `[0, 3]`.
fn erf_taylor(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = x;
    let mut fact = 1.0;
    for n in 0..200 {
        let t = pow / (fact * (2 * n + 1) as f64);
        sum += if n % 2 == 0 { t } else { -t };
        pow *= x * x;
        fact *= (n + 1) as f64;
        if t.abs() < 1e-20 {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

#[test]
fn erf_matches_taylor_series() {
    for k in 0..=60 {
        let x = k as f64 * 0.05;
        assert!((erf(x) - erf_taylor(x)).abs() < 1e-10, "x={x}");
    }
    assert!((erf(1.0) - 0.8427).abs() < 1e-4);
}

#[test]
fn sample_complexity_independent_recomputation() {
    let cases: [(f64, f64, f64, f64, (f64, f64), f64); 4] = [
        (0.1, 0.05, 0.025, 0.25, (0.0, 1.0), 1.0),
        (0.05, 0.1, 0.01, 0.1, (0.0, 1.0), 45.0 * 45.0),
        (0.2, 0.01, 0.005, 1.0, (0.0, 2.0), 10.0),
        (0.01, 0.2, 0.15, 0.02, (0.0, 4.0), 1e6),
    ];
    for (eps, delta, split, s2, (a, b), h) in cases {
        let w: f64 = b - a;
        let m_expected = ((8.0 * s2 + 4.0 * w * eps / 3.0) / (eps * eps) * (2.0 * h / (delta - split)).ln()).ceil();
        let n_expected = ((2.0 * s2 + 2.0 * w * eps / 3.0) / (eps * eps) * (2.0 / split).ln()).ceil();
        let (m, n) = sample_complexity(eps, delta, split, s2, (a, b), f64::ln(h)).unwrap();
        assert_eq!(m as f64, m_expected, "M for {eps} {delta} {split}");
        assert_eq!(n as f64, n_expected, "N for {eps} {delta} {split}");
    }
    let (_, n) = sample_complexity(0.1, 0.05, 0.025, 0.25, (0.0, 1.0), 0.0).unwrap();
    assert_eq!(n, 249);
}

#[test]
fn halving_epsilon_roughly_quadruples_n() {
    let (_, n1) = sample_complexity(0.02, 0.05, 0.025, 0.25, (0.0, 1.0), 0.0).unwrap();
    let (_, n2) = sample_complexity(0.01, 0.05, 0.025, 0.25, (0.0, 1.0), 0.0).unwrap();
    let r = n2 as f64 / n1 as f64;
    assert!((3.5..=4.0).contains(&r), "ratio {r}");
}

#[test]
fn report_labels_branch() {
    let mut inputs = BoundInputs {
        m: 10_000,
        n: 10_000,
        sigma2: 0.05,
        range: (0.0, 1.0),
        ln_hypotheses: 2.0 * 45f64.ln(),
        epsilon: 0.1,
        delta: 0.05,
        split: 0.025,
    };
    let r = bound_report(&inputs).unwrap();
    assert_eq!(r.branch, GapBranch::SmallVariance);
    assert!(r.m_required >= 1 && r.n_required >= 1);
    inputs.sigma2 = 0.2;
    assert_eq!(bound_report(&inputs).unwrap().branch, GapBranch::LargeVariance);
    inputs.ln_hypotheses = 16_000.0 * 45f64.ln();
    let r = bound_report(&inputs).unwrap();
    assert_eq!(r.training_suboptimality_prob, 1.0);
    assert!(!r.warnings.is_empty());
}

proptest! {
    #[test]
    fn probabilities_are_clipped_and_monotone(
        n in 1u64..100_000,
        s2 in 0.001f64..0.25,
        eps in 0.001f64..1.0,
        ln_h in 0.0f64..50.0,
    ) {
        let p = validation_deviation_prob(n, s2, (0.0, 1.0), eps);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(validation_deviation_prob(n, s2, (0.0, 1.0), eps * 1.5) <= p);
        prop_assert!(validation_deviation_prob(n * 2, s2, (0.0, 1.0), eps) <= p);
        let q = training_suboptimality_prob(n, s2, ln_h, (0.0, 1.0), eps);
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert!(training_suboptimality_prob(n, s2, ln_h + 1.0, (0.0, 1.0), eps) >= q);
        prop_assert!(training_suboptimality_prob(n * 2, s2, ln_h, (0.0, 1.0), eps) <= q);
    }

    #[test]
    fn sample_sizes_move_with_split(
        eps in 0.01f64..0.5,
        s2 in 0.01f64..0.25,
        ln_h in 0.0f64..20.0,
        frac in 0.1f64..0.8,
    ) {
        let delta = 0.1;
        let (m1, n1) = sample_complexity(eps, delta, delta * frac, s2, (0.0, 1.0), ln_h).unwrap();
        let (m2, n2) = sample_complexity(eps, delta, delta * (frac + 0.1), s2, (0.0, 1.0), ln_h).unwrap();
        prop_assert!(n2 <= n1);
        prop_assert!(m2 >= m1);
    }

    #[test]
    fn validation_gap_vanishes(s2 in 0.001f64..0.25, eps in 0.001f64..0.5) {
        let mk = |n| BoundInputs {
            m: 1000, n, sigma2: s2, range: (0.0, 1.0), ln_hypotheses: 0.0,
            epsilon: eps, delta: 0.05, split: 0.01,
        };
        let small = expected_error_bounds(&mk(100)).validation;
        let large = expected_error_bounds(&mk(1_000_000)).validation;
        prop_assert!(large <= small);
        prop_assert!(large < 0.01);
    }
}

#[test]
fn validation_deviation_bound_is_empirically_sound() {
    // |X| = 2, |Y| = 4, |W| = 2, fixed strategy
    let probs = vec![0.20, 0.15, 0.10, 0.05, 0.05, 0.10, 0.15, 0.20];
    let j = JointDistribution::new(Alphabet::indexed(2), Alphabet::indexed(4), probs).unwrap();
    let gain = GainFunction::identity(&Alphabet::indexed(2));
    let f = Strategy::new(vec![0, 0, 1, 1]);
    let v = strategy_gain(&f, &j, &gain).unwrap();
    let s2 = v * (1.0 - v); // gain of f is Bernoulli(v)
    let n = 100;
    let reps = 2000;
    for eps in [0.05, 0.08, 0.1, 0.15] {
        let hits = (0..reps)
            .filter(|&r| {
                let s = sample_joint(&j, n, 77, StreamId::named("sound", &[r])).unwrap();
                (empirical_functional(&f, &s, &gain).unwrap() - v).abs() >= eps
            })
            .count();
        let freq = hits as f64 / reps as f64;
        let bound = validation_deviation_prob(n as u64, s2, (0.0, 1.0), eps);
        let slack = 3.0 * (bound * (1.0 - bound) / reps as f64).sqrt();
        assert!(freq <= bound + slack, "eps {eps}: freq {freq} bound {bound}");
    }
}
