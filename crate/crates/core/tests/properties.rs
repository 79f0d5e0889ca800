mod common;

use common::*;
use hadspec::convolution::*;
use hadspec::equipos::{probe_family, ProbeParams};
use hadspec::spectrum::*;
use hadspec::triples::*;
use hadspec::verify::*;
use hadspec::zeros::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn passes(t: &HadamardTriple, tol: f64) -> bool {
    verify_triple(t.scale(), t.digits(), t.frequencies(), tol).unwrap().passed
}

fn arb_digits() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(-6i64..=6, 2..=4).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn translation_preserves_hadamard(t in arb_triple(), b0 in -50i64..=50, l0 in -50i64..=50) {
        prop_assert!(passes(&translate_triple(&t, b0, l0), 1e-12));
    }

    #[test]
    fn composition_preserves_hadamard(ts in prop::collection::vec(arb_triple_sized(4), 1..=4)) {
        let c = compose_triples(&ts).unwrap();
        prop_assert!(passes(&c, 1e-10));
        let expected: usize = ts.iter().map(HadamardTriple::size).product();
        prop_assert_eq!(c.size(), expected);
    }

    #[test]
    fn reduction_is_idempotent(t in arb_triple()) {
        let r = reduce_frequencies(&t);
        prop_assert_eq!(reduce_frequencies(&r), r.clone());
        prop_assert!(passes(&r, 1e-12));
        let n = t.scale().abs();
        prop_assert!(r.frequencies().iter().all(|&l| (0..n).contains(&l)));
    }

    #[test]
    fn single_step_completeness(t in arb_triple(), xi in -2.0f64..2.0) {
        let n = t.scale() as f64;
        let s: f64 = t.frequencies().iter().map(|&l| mask(t.digits(), (xi + l as f64) / n).norm_sqr()).sum();
        prop_assert!((s - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn gcd_ignores_translation_and_sign(b in arb_digits(), shift in -40i64..=40) {
        let g = difference_gcd(&b);
        let moved: Vec<i64> = b.iter().map(|x| x + shift).collect();
        let negated: Vec<i64> = b.iter().map(|x| -x).collect();
        prop_assert_eq!(difference_gcd(&moved), g);
        prop_assert_eq!(difference_gcd(&negated), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn transform_matches_atom_sum(spec in arb_spec(), n in 1usize..=5, xi in -10.0f64..10.0) {
        let fast = fourier_finite(&spec, n, xi);
        prop_assert!((fast - brute_transform(&spec, n, xi)).norm() <= 1e-10);
        prop_assert!(fast.norm() <= 1.0 + 1e-12);
        prop_assert_eq!(fourier_finite(&spec, n, 0.0).re, 1.0);
        let mu = finite_level(&spec, n, LevelBudget::default()).unwrap();
        prop_assert!((mu.fourier(xi) - fast).norm() <= 1e-10);
    }

    #[test]
    fn levels_build_by_convolution(spec in arb_spec(), n in 1usize..=4) {
        let mu = finite_level(&spec, n, LevelBudget::default()).unwrap();
        prop_assert!(mu.total_mass().is_one());
        let scale: BigInt = (1..=n + 1).map(|k| spec.effective_scale_big(k)).product();
        let step = DiscreteMeasure::uniform(
            spec.digits_at(n + 1)
                .iter()
                .map(|&b| BigRational::new(BigInt::from(b), scale.clone())),
        )
        .unwrap();
        let next = finite_level(&spec, n + 1, LevelBudget::default()).unwrap();
        prop_assert_eq!(mu.convolve(&step), next);
    }

    #[test]
    fn tail_transform_stabilizes(spec in arb_spec(), skip in 0usize..4, xi in -5.0f64..5.0, depth in 4usize..20) {
        let tail = spec.tail(skip);
        let short = fourier_tail(&tail, xi, depth).value();
        let long = fourier_tail(&tail, xi, 2 * depth).value();
        prop_assert!((short - long).norm() <= tail_truncation_bound(&tail, xi, depth) + 1e-12);
        prop_assert!(tail_truncation_bound(&tail, xi, depth + 1) <= tail_truncation_bound(&tail, xi, depth));
    }

    #[test]
    fn mask_zeros_are_periodic(b in arb_digits(), k in -3i64..=3) {
        let base = mask_zeros(&b, 0.0, 1.0).unwrap();
        let moved = mask_zeros(&b, k as f64, k as f64 + 1.0).unwrap();
        let inside = |v: &[f64]| v.iter().copied().filter(|x| x - x.floor() > 1e-9 && x.ceil() - x > 1e-9).collect::<Vec<_>>();
        let a = inside(&base.values());
        let c: Vec<f64> = inside(&moved.values()).iter().map(|x| x - k as f64).collect();
        prop_assert_eq!(a.len(), c.len());
        for (x, y) in a.iter().zip(&c) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
        for z in &base.zeros {
            prop_assert!(mask(&b, z.value).norm() <= 1e-10);
            prop_assert!(z.radius >= 0.0);
        }
        for w in base.zeros.windows(2) {
            prop_assert!(w[0].value + w[0].radius < w[1].value - w[1].radius);
        }
    }

    #[test]
    fn zero_products_ignore_family_order(ts in prop::collection::vec(arb_triple_sized(4), 1..=3), h in 0.5f64..3.0) {
        let forward = enumerate_zero_products(&ts, h).unwrap().values();
        let mut rev = ts.clone();
        rev.reverse();
        let backward = enumerate_zero_products(&rev, h).unwrap().values();
        prop_assert_eq!(forward.len(), backward.len());
        for (x, y) in forward.iter().zip(&backward) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn propagation_invariants(spec in arb_spec(), xi0 in -3.0f64..3.0) {
        let tr = zero_propagation(&spec, xi0, 6, 1e-6).unwrap();
        prop_assert!(tr.cardinalities.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(tr.nondecreasing);
        prop_assert!(tr.cardinalities.iter().all(|&c| c as u128 <= tr.cardinality_bound));
        let r = xi0.abs() + 2.0;
        prop_assert!(tr.sets.iter().flatten().all(|x| x.abs() <= r + 1e-9));
    }
}

fn gcd_one_spec() -> impl Strategy<Value = ConvolutionSpec> {
    let family = vec![
        HadamardTriple::new(2, vec![0, 1], vec![0, 1]).unwrap(),
        HadamardTriple::new(3, vec![0, 1, 2], vec![0, 1, 2]).unwrap(),
        HadamardTriple::new(-2, vec![0, 1], vec![0, 1]).unwrap(),
    ];
    prop::collection::vec(1usize..=3, 1..=3).prop_map(move |period| {
        ConvolutionSpec::new(family.clone(), SelectionWord::new(vec![], period)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectrum_levels_are_nested_spectra(spec in gcd_one_spec()) {
        let s = build_spectrum(&spec, 3, &SpectrumParams::default()).unwrap();
        for i in 1..=3 {
            prop_assert!(s.levels[i].contains(&0));
            prop_assert!(s.levels[i - 1].iter().all(|x| s.levels[i].contains(x)));
            let card: usize = (1..=s.indices[i]).map(|k| spec.triple_at(k).size()).product();
            prop_assert_eq!(s.levels[i].len(), card);
            let mu = finite_level(&spec, s.indices[i], LevelBudget::default()).unwrap();
            prop_assert!(orthonormality_gram(&mu, &s.levels[i]) <= 1e-10);
            let reach = s.levels[i - 1].iter().map(|x| x.abs()).max().unwrap() as f64;
            let scale = cumulative_scale(&spec, s.indices[i]).unwrap().abs() as f64;
            prop_assert!(reach / scale < s.delta_used / 2.0);
        }
        for i in 1..3 {
            for xi in grid(-2.0, 2.0, 17) {
                let a = q_function(&spec, &s, i, 24, xi).unwrap();
                let b = q_function(&spec, &s, i + 1, 24, xi).unwrap();
                prop_assert!(a.q <= b.q + 1e-9 && b.q <= 1.0 + 1e-9);
            }
        }
        let m = s.indices[2];
        let xs = grid(-2.0, 2.0, 9);
        let completeness = level_completeness(&spec, &s, 2, &xs).unwrap();
        let worst = xs
            .iter()
            .map(|&xi| (1.0 - q_function(&spec, &s, 2, m, xi).unwrap().q).abs())
            .fold(0.0, f64::max);
        prop_assert!((worst - completeness).abs() <= 1e-12);
        let mu = finite_level(&spec, 2 * m, LevelBudget::default()).unwrap();
        for &a in &s.levels[2] {
            for &b in &s.levels[2] {
                if a != b {
                    prop_assert!(mu.fourier((a - b) as f64).norm() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn gram_is_hermitian(spec in arb_spec(), n in 1usize..=3, lambda in prop::collection::btree_set(-20i64..=20, 1..6)) {
        let mu = finite_level(&spec, n, LevelBudget::default()).unwrap();
        let lambda: Vec<i64> = lambda.into_iter().collect();
        let g = gram_matrix(&mu, &lambda);
        for i in 0..lambda.len() {
            prop_assert!((g[i][i].re - 1.0).abs() <= 1e-12 && g[i][i].im.abs() <= 1e-12);
            for j in 0..lambda.len() {
                prop_assert!((g[i][j] - g[j][i].conj()).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn wider_window_never_lowers_epsilon(spec in gcd_one_spec(), kmax in 0i64..3) {
        let base = ProbeParams { grid_n: 16, kmax, depth: 24, ..ProbeParams::default() };
        let wider = ProbeParams { kmax: kmax + 2, ..base };
        let a = probe_family(&spec, &[0, 1], &base).unwrap();
        let b = probe_family(&spec, &[0, 1], &wider).unwrap();
        prop_assert!(b.epsilon_hat >= a.epsilon_hat);
        prop_assert!(b.min_peak() >= a.min_peak());
    }

    #[test]
    fn nested_grids_lower_pointwise_minimum(spec in gcd_one_spec(), coarse in 4usize..12, factor in 2usize..4) {
        let a = probe_family(&spec, &[0, 1], &ProbeParams { grid_n: coarse, depth: 24, ..ProbeParams::default() }).unwrap();
        let b = probe_family(&spec, &[0, 1], &ProbeParams { grid_n: coarse * factor, depth: 24, ..ProbeParams::default() }).unwrap();
        prop_assert!(b.min_peak() <= a.min_peak());
    }

    #[test]
    fn certificates_are_reproducible(spec in gcd_one_spec()) {
        let p = ProbeParams { grid_n: 32, depth: 24, ..ProbeParams::default() };
        let a = probe_family(&spec, &[0, 1, 2], &p).unwrap();
        let b = probe_family(&spec, &[0, 1, 2], &p).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        prop_assert_eq!(a.table[0].k, 0);
        for row in &a.table {
            prop_assert!(row.peak + row.bound >= a.epsilon_hat);
        }
    }
}
