use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ConvolutionSpec, TailSpec};

/// Default number of factors kept when truncating an infinite product.
pub const DEFAULT_DEPTH: usize = 40;

/// Factors summed explicitly before the geometric remainder takes over.
const SERIES_TERMS: usize = 64;

/// `M_B(xi) = (1/#B) sum_b exp(-2 pi i b xi)`.
pub fn mask(digits: &[i64], xi: f64) -> Complex64 {
    let sum: Complex64 = digits
        .iter()
        .map(|&b| Complex64::from_polar(1.0, -2.0 * PI * (b as f64 * xi).rem_euclid(1.0)))
        .sum();
    sum / digits.len() as f64
}

/// `d/dxi M_B(xi)`.
pub fn mask_derivative(digits: &[i64], xi: f64) -> Complex64 {
    let sum: Complex64 = digits
        .iter()
        .map(|&b| {
            let e = Complex64::from_polar(1.0, -2.0 * PI * (b as f64 * xi).rem_euclid(1.0));
            e * Complex64::new(0.0, -2.0 * PI * b as f64)
        })
        .sum();
    sum / digits.len() as f64
}

/// Precomputed factors `k = skip+1 ..= skip+depth` of a convolution: which
/// family member acts and the cumulative scale relative to the skip point.
#[derive(Debug, Clone)]
pub struct FactorSchedule<'a> {
    spec: &'a ConvolutionSpec,
    factors: Vec<(usize, f64)>,
}

impl<'a> FactorSchedule<'a> {
    pub fn new(spec: &'a ConvolutionSpec, skip: usize, depth: usize) -> Self {
        let mut cumulative = 1.0f64;
        let factors = (skip + 1..=skip + depth)
            .map(|k| {
                cumulative *= spec.effective_scale_f64(k);
                (spec.word().symbol(k) - 1, cumulative)
            })
            .collect();
        FactorSchedule { spec, factors }
    }

    pub fn depth(&self) -> usize {
        self.factors.len()
    }

    /// `prod_k M_{B_k}(xi / P_k)`.
    pub fn evaluate(&self, xi: f64) -> Complex64 {
        let family = self.spec.family();
        let mut acc = Complex64::new(1.0, 0.0);
        for &(j, scale) in &self.factors {
            acc *= mask(family[j].digits(), xi / scale);
            if acc == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        acc
    }
}

/// `hat{mu_n}(xi)` as the product of `n` masks.
pub fn fourier_finite(spec: &ConvolutionSpec, n: usize, xi: f64) -> Complex64 {
    FactorSchedule::new(spec, 0, n).evaluate(xi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailValue {
    pub re: f64,
    pub im: f64,
    /// Bound on the distance to the untruncated transform.
    pub bound: f64,
}

impl TailValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.value().norm()
    }
}

/// `hat{nu_{>n}}(xi)` truncated to `depth` factors, with its error bound.
pub fn fourier_tail(tail: &TailSpec, xi: f64, depth: usize) -> TailValue {
    let v = FactorSchedule::new(&tail.spec, tail.skip, depth).evaluate(xi);
    TailValue {
        re: v.re,
        im: v.im,
        bound: tail_truncation_bound(tail, xi, depth),
    }
}

/// Sum over `k > start` of `max|B_{skip+k}| / |P_k|`, with `P_k` the
/// cumulative scale from the skip point. Every `|N^n| >= 2`, so the part past
/// the explicit terms is at most the last term's denominator reciprocal times
/// the family's largest digit.
fn weighted_scale_series(spec: &ConvolutionSpec, skip: usize, start: usize) -> f64 {
    let mut cumulative = 1.0f64;
    for k in 1..=start {
        cumulative *= spec.effective_scale_f64(skip + k).abs();
    }
    let mut sum = 0.0;
    for k in start + 1..=start + SERIES_TERMS {
        cumulative *= spec.effective_scale_f64(skip + k).abs();
        sum += spec.triple_at(skip + k).max_abs_digit() as f64 / cumulative;
    }
    sum + spec.max_abs_digit() as f64 / cumulative
}

/// Rigorous bound on `|hat{nu}(xi) - truncated(xi)|`, from
/// `|1 - M_B(t)| <= 2 pi max|b| |t|` and `|prod a - prod b| <= sum |a_k - b_k|`.
pub fn tail_truncation_bound(tail: &TailSpec, xi: f64, depth: usize) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    2.0 * PI * xi.abs() * weighted_scale_series(&tail.spec, tail.skip, depth)
}

/// `R` with `spt(nu_{>skip}) in [-R, R]`.
pub fn tail_support_radius(spec: &ConvolutionSpec, skip: usize) -> f64 {
    weighted_scale_series(spec, skip, 0)
}
