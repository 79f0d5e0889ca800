#![allow(dead_code)]

use std::f64::consts::PI;

use hadspec::convolution::{ConvolutionSpec, SelectionWord};
use hadspec::triples::HadamardTriple;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::sample::Index;

/// Proper divisors `d >= 2` of `n` that are at most `cap`, plus `n` itself
/// when `n <= cap`.
fn divisors(n: i64, cap: i64) -> Vec<i64> {
    (2..=n.min(cap)).filter(|d| n % d == 0).collect()
}

/// `B = (|N|/d){0..d-1} + N t`, `L = {0..d-1} + d s`: the normalized matrix
/// is a (conjugated) DFT matrix, so the triple is Hadamard for every choice
/// of integer lifts `t`, `s`.
pub fn dft_triple(n: i64, d: i64, b_lift: &[i64], l_lift: &[i64]) -> HadamardTriple {
    let step = n.abs() / d;
    let digits = (0..d).map(|j| step * j + n * b_lift[j as usize]).collect();
    let frequencies = (0..d).map(|j| j + d * l_lift[j as usize]).collect();
    HadamardTriple::new(n, digits, frequencies).expect("DFT triple")
}

/// Random Hadamard triples with `|N|` in `2..=8`, either sign, at most
/// `max_size` digits.
pub fn arb_triple_sized(max_size: i64) -> impl Strategy<Value = HadamardTriple> {
    (2i64..=8, any::<bool>(), any::<Index>())
        .prop_filter("needs a divisor", move |(a, _, _)| !divisors(*a, max_size).is_empty())
        .prop_flat_map(move |(a, neg, idx)| {
            let divs = divisors(a, max_size);
            let d = divs[idx.index(divs.len())];
            let n = if neg { -a } else { a };
            (
                Just(n),
                Just(d),
                prop::collection::vec(-2i64..=2, d as usize),
                prop::collection::vec(-2i64..=2, d as usize),
            )
        })
        .prop_map(|(n, d, bl, ll)| dft_triple(n, d, &bl, &ll))
}

pub fn arb_triple() -> impl Strategy<Value = HadamardTriple> {
    arb_triple_sized(8)
}

/// Random specs: 1 to 3 small triples, short prefixes and periods, exponents 1 or 2.
pub fn arb_spec() -> impl Strategy<Value = ConvolutionSpec> {
    prop::collection::vec(arb_triple_sized(4), 1..=3).prop_flat_map(|family| {
        let m = family.len();
        (
            Just(family),
            prop::collection::vec(1..=m, 0..=2),
            prop::collection::vec(1..=m, 1..=3),
            prop::collection::vec(1u32..=2, 0..=1),
            prop::collection::vec(1u32..=2, 1..=2),
        )
            .prop_map(|(family, prefix, period, ep, eq)| {
                let word = SelectionWord::new(prefix, period).with_exponents(ep, eq);
                ConvolutionSpec::new(family, word).expect("valid spec")
            })
    })
}

pub fn jp() -> ConvolutionSpec {
    ConvolutionSpec::single(HadamardTriple::new(4, vec![0, 2], vec![0, 1]).unwrap())
}

pub fn example14_family() -> Vec<HadamardTriple> {
    vec![
        HadamardTriple::new(2, vec![0, 1], vec![0, 1]).unwrap(),
        HadamardTriple::new(2, vec![0, 3], vec![0, 1]).unwrap(),
    ]
}

pub fn example14(prefix: Vec<usize>, period: Vec<usize>) -> ConvolutionSpec {
    ConvolutionSpec::new(example14_family(), SelectionWord::new(prefix, period)).unwrap()
}

pub fn mixed() -> ConvolutionSpec {
    ConvolutionSpec::new(
        vec![
            HadamardTriple::new(2, vec![0, 1], vec![0, 1]).unwrap(),
            HadamardTriple::new(3, vec![0, 1, 2], vec![0, 1, 2]).unwrap(),
        ],
        SelectionWord::new(vec![], vec![1, 2]),
    )
    .unwrap()
}

/// Cumulative scales `P_1, ..., P_n` computed directly from the word.
pub fn scales(spec: &ConvolutionSpec, n: usize) -> Vec<f64> {
    let w = spec.word();
    let mut p = 1.0;
    (1..=n)
        .map(|k| {
            let t = &spec.family()[w.symbol(k) - 1];
            p *= (t.scale() as f64).powi(w.exponent(k) as i32);
            p
        })
        .collect()
}

/// Transform of the level-`n` measure by summing over every digit tuple.
pub fn brute_transform(spec: &ConvolutionSpec, n: usize, xi: f64) -> Complex64 {
    let p = scales(spec, n);
    let w = spec.word();
    let mut atoms: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for k in 1..=n {
        let digits = spec.family()[w.symbol(k) - 1].digits();
        let weight = 1.0 / digits.len() as f64;
        let pk = p[k - 1];
        atoms = atoms
            .iter()
            .flat_map(|&(x, m)| digits.iter().map(move |&b| (x + b as f64 / pk, m * weight)))
            .collect();
    }
    atoms
        .iter()
        .map(|&(x, m)| Complex64::from_polar(m, -2.0 * PI * xi * x))
        .sum()
}

/// `(1/#B) sum_b exp(-2 pi i b xi)` written out independently.
pub fn mask_oracle(digits: &[i64], xi: f64) -> Complex64 {
    let s: Complex64 = digits
        .iter()
        .map(|&b| Complex64::from_polar(1.0, -2.0 * PI * b as f64 * xi))
        .sum();
    s / digits.len() as f64
}

/// CDF of the two-triple limit measure for the word `1 2 2 2 ...`: density
/// 1/3 on [0,1/2], 2/3 on [1/2,3/2], 1/3 on [3/2,2].
pub fn example14_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x <= 0.5 {
        x / 3.0
    } else if x <= 1.5 {
        1.0 / 6.0 + 2.0 * (x - 0.5) / 3.0
    } else if x <= 2.0 {
        5.0 / 6.0 + (x - 1.5) / 3.0
    } else {
        1.0
    }
}

/// `prod_{k >= 1} cos(2 pi / 4^{k+1})`, the JP tail transform at 1/4.
pub fn jp_quarter_oracle(terms: i32) -> f64 {
    (1..=terms).map(|k| (2.0 * PI / 4f64.powi(k + 1)).cos()).product()
}

pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect()
}
