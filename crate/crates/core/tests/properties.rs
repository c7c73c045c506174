use definetti_core::harness::{verify_theorem, Source};
use definetti_core::io::{measure_json, parse_measure};
use definetti_core::model::{
    mean_law_from_moments, mixture_prefix_prob, moments_from_measure, prefix_prob_from_mean_law,
    prefix_prob_from_moments, sample_mean_law,
};
use definetti_core::numerics::{a_i, b_i};
use definetti_core::oracle::random_rational_measure;
use definetti_core::recovery::recover_from_law;
use definetti_core::value::{format_rational, parse_rational};
use definetti_core::{Backend, MixingMeasure, PrefixEvent, Real, ResolvedBackend};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn measure(seed: u64) -> MixingMeasure {
    random_rational_measure(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn pattern() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=1, 1..=6)
}

fn rel_err(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / x.abs().max(y.abs())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_roundtrip(num in -10_000i64..10_000, den in 1i64..10_000) {
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn measure_json_roundtrip(seed in any::<u64>()) {
        let mu = measure(seed);
        prop_assert_eq!(parse_measure(&measure_json(&mu).to_string()).unwrap(), mu);
    }

    #[test]
    fn moments_invert_to_the_mean_law(seed in any::<u64>(), n in 1usize..=16) {
        let mu = measure(seed);
        let law = sample_mean_law(&mu, n as u64, ResolvedBackend::Exact).unwrap();
        let inverted = mean_law_from_moments(&moments_from_measure(&mu, n), n).unwrap();
        prop_assert_eq!(&inverted, &law);
        let back = recover_from_law(&law);
        // atoms at i/n keep the first moment
        prop_assert_eq!(moments_from_measure(&back.measure, 1).get(1), moments_from_measure(&mu, 1).get(1));
    }

    #[test]
    fn three_routes_agree(seed in any::<u64>(), p in pattern(), extra in 0u64..10) {
        let mu = measure(seed);
        let e = PrefixEvent::new(p).unwrap();
        let direct: Real = mixture_prefix_prob(&mu, &e).into();
        let law = sample_mean_law(&mu, e.k() + extra, ResolvedBackend::Exact).unwrap();
        prop_assert_eq!(&prefix_prob_from_mean_law(&law, &e).unwrap(), &direct);
        let c = moments_from_measure(&mu, e.k() as usize);
        prop_assert_eq!(&prefix_prob_from_moments(&c, &e).unwrap(), &direct);
    }

    // Exchangeability: the probability of a prefix depends only on its counts.
    #[test]
    fn pattern_order_does_not_matter(seed in any::<u64>(), p in pattern(), shift in 0usize..6, n in 8u64..60) {
        let mu = measure(seed);
        let mut q = p.clone();
        let len = q.len();
        q.rotate_left(shift % len);
        q.reverse();
        let (e, f) = (PrefixEvent::new(p).unwrap(), PrefixEvent::new(q).unwrap());
        prop_assert_eq!(mixture_prefix_prob(&mu, &e), mixture_prefix_prob(&mu, &f));
        let law = sample_mean_law(&mu, n, ResolvedBackend::Exact).unwrap();
        prop_assert_eq!(prefix_prob_from_mean_law(&law, &e).unwrap(), prefix_prob_from_mean_law(&law, &f).unwrap());
        let (r1, r2) = (
            verify_theorem(Source::Law(&law), &e, Backend::Exact).unwrap(),
            verify_theorem(Source::Law(&law), &f, Backend::Exact).unwrap(),
        );
        prop_assert_eq!(r1.abs_diff, r2.abs_diff);
        prop_assert_eq!(r1.sandwich_bound, r2.sandwich_bound);
    }

    // Consistency of the finite-dimensional laws: P(w) = P(w0) + P(w1).
    #[test]
    fn prefix_probabilities_are_consistent(seed in any::<u64>(), p in prop::collection::vec(0u8..=1, 0..=5), n in 8u64..40) {
        let law = sample_mean_law(&measure(seed), n, ResolvedBackend::Exact).unwrap();
        let prob = |w: &[u8]| -> BigRational {
            if w.is_empty() {
                return BigRational::from_integer(1.into());
            }
            match prefix_prob_from_mean_law(&law, &PrefixEvent::new(w.to_vec()).unwrap()).unwrap() {
                Real::Exact(r) => r,
                Real::Float(_) => unreachable!(),
            }
        };
        let (mut w0, mut w1) = (p.clone(), p.clone());
        w0.push(0);
        w1.push(1);
        prop_assert_eq!(prob(&p), prob(&w0) + prob(&w1));
    }

    #[test]
    fn backends_agree_on_kernels(n in 8u64..=2000, k in 1u64..=6, alpha_frac in 0.0f64..=1.0, i_frac in 0.0f64..=1.0) {
        let alpha = (alpha_frac * k as f64).round() as u64;
        let i = (i_frac * n as f64).round() as u64;
        for f in [a_i, b_i] {
            let exact = f(n, k, alpha, i, ResolvedBackend::Exact).unwrap();
            let log = f(n, k, alpha, i, ResolvedBackend::Log).unwrap();
            prop_assert_eq!(exact.is_zero(), log.is_zero());
            if !exact.is_zero() {
                prop_assert!((exact.ln() - log.ln()).abs() <= 1e-9 * exact.ln().abs().max(1.0), "{} vs {}", exact.ln(), log.ln());
            }
        }
    }
}

#[test]
fn backends_agree_on_verification() {
    for (seed, n) in [(1u64, 100u64), (2, 500), (3, 2000)] {
        let mu = measure(seed);
        let e = PrefixEvent::new(vec![1, 0, 1]).unwrap();
        let exact = verify_theorem(Source::Mixture { mu: &mu, n }, &e, Backend::Exact).unwrap();
        let log = verify_theorem(Source::Mixture { mu: &mu, n }, &e, Backend::Log).unwrap();
        assert_eq!(exact.backend, ResolvedBackend::Exact);
        assert_eq!(log.backend, ResolvedBackend::Log);
        assert!(rel_err(exact.lhs.to_f64(), log.lhs.to_f64()) < 1e-9);
        assert!(rel_err(exact.rhs.to_f64(), log.rhs.to_f64()) < 1e-9);
        assert!((exact.abs_diff.to_f64() - log.abs_diff.to_f64()).abs() < 1e-12);
        assert!(log.within_budget);
    }
}

#[test]
fn backends_agree_on_the_mean_law() {
    for n in [10u64, 257, 2000] {
        let mu = measure(n);
        let exact = sample_mean_law(&mu, n, ResolvedBackend::Exact).unwrap().weights_f64();
        let log = sample_mean_law(&mu, n, ResolvedBackend::Log).unwrap().weights_f64();
        for (x, y) in exact.iter().zip(&log) {
            assert!((x - y).abs() <= 1e-12, "N={n}: {x} vs {y}");
        }
    }
}
