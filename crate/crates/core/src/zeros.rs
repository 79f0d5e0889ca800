//! Zero sets of masks `M_B`, the finite set of zero products inside
//! `[-h, h]`, and numeric probes of integral periodic zero sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize, Serializer};

use crate::convolution::{fourier_tail, mask, mask_derivative, ConvolutionSpec};
use crate::error::{Error, Result};
use crate::numfmt::sig15;
use crate::triples::HadamardTriple;

/// A zero is accepted when `|M_B| <= ROOT_RESIDUAL` there.
pub const ROOT_RESIDUAL: f64 = 1e-10;
pub const DEFAULT_PROBE_TOL: f64 = 1e-6;
pub const INTEGER_PROXIMITY: f64 = 1e-8;

/// Refuse to track more points than this during zero propagation.
const MAX_PROPAGATION_POINTS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEnclosure {
    pub value: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSetReport {
    pub zeros: Vec<ZeroEnclosure>,
    pub interval: (f64, f64),
    pub source: String,
}

impl ZeroSetReport {
    pub fn values(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.value).collect()
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("zero,radius\n");
        for z in &self.zeros {
            out.push_str(&format!("{},{}\n", sig15(z.value), sig15(z.radius)));
        }
        out
    }
}

#[derive(Serialize)]
struct WireZero {
    value: String,
    radius: String,
}

#[derive(Serialize)]
struct WireReport<'a> {
    source: &'a str,
    interval: [String; 2],
    count: usize,
    zeros: Vec<WireZero>,
}

impl Serialize for ZeroSetReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireReport {
            source: &self.source,
            interval: [sig15(self.interval.0), sig15(self.interval.1)],
            count: self.zeros.len(),
            zeros: self
                .zeros
                .iter()
                .map(|z| WireZero {
                    value: sig15(z.value),
                    radius: sig15(z.radius),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

fn format_digits(digits: &[i64]) -> String {
    let inner: Vec<String> = digits.iter().map(i64::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

/// `d/dxi |M_B(xi)|^2`.
fn squared_modulus_slope(digits: &[i64], xi: f64) -> f64 {
    2.0 * (mask(digits, xi).conj() * mask_derivative(digits, xi)).re
}

/// Zeros of `M_B` in one period, reduced into `[0, 1)`, sorted.
fn period_zeros(digits: &[i64]) -> Vec<ZeroEnclosure> {
    let base = *digits.iter().min().expect("nonempty digits");
    let shifted: Vec<i64> = digits.iter().map(|b| b - base).collect();
    let spread = *shifted.iter().max().unwrap();
    if spread == 0 {
        return Vec::new();
    }
    let step = 1.0 / (8.0 * spread as f64 + 8.0);
    let samples = (1.0 / step).ceil() as usize;
    let at = |i: usize| -0.5 * step + i as f64 * step;

    let mut found: Vec<ZeroEnclosure> = Vec::new();
    let mut prev = squared_modulus_slope(&shifted, at(0));
    for i in 0..samples {
        let next = squared_modulus_slope(&shifted, at(i + 1));
        if prev < 0.0 && next >= 0.0 {
            if let Some(z) = locate_minimum(&shifted, at(i), at(i + 1), step) {
                found.push(z);
            }
        }
        prev = next;
    }

    for z in &mut found {
        z.value = z.value.rem_euclid(1.0);
        if z.value > 1.0 - 1e-12 {
            z.value = 0.0;
        }
    }
    found.sort_by(|a, b| a.value.total_cmp(&b.value));
    found.dedup_by(|a, b| (a.value - b.value).abs() < 1e-9);
    separate_enclosures(&mut found);
    found
}

/// Bisection on the slope of `|M|^2`, then Newton on `M` itself.
fn locate_minimum(digits: &[i64], mut lo: f64, mut hi: f64, step: f64) -> Option<ZeroEnclosure> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if squared_modulus_slope(digits, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let d = mask_derivative(digits, x);
        if d.norm() == 0.0 {
            break;
        }
        let candidate = x - (mask(digits, x) / d).re;
        if (candidate - x).abs() > step || mask(digits, candidate).norm() >= mask(digits, x).norm() {
            break;
        }
        x = candidate;
    }
    let residual = mask(digits, x).norm();
    if residual > ROOT_RESIDUAL {
        return None;
    }
    let slope = mask_derivative(digits, x).norm();
    let newton = if slope > 0.0 { 2.0 * residual / slope } else { f64::INFINITY };
    let floor = 4.0 * f64::EPSILON * x.abs().max(1.0);
    Some(ZeroEnclosure {
        value: x,
        radius: newton.max(floor).min(0.25 * step),
    })
}

fn separate_enclosures(zeros: &mut [ZeroEnclosure]) {
    for i in 1..zeros.len() {
        let gap = zeros[i].value - zeros[i - 1].value;
        if zeros[i].radius + zeros[i - 1].radius >= gap {
            let r = 0.49 * gap;
            zeros[i].radius = zeros[i].radius.min(r);
            zeros[i - 1].radius = zeros[i - 1].radius.min(r);
        }
    }
}

/// All zeros of `M_B` in `[lo, hi]`.
///
/// The search samples one period at step `1/(8 max|b| + 8)` (after shifting
/// `B` to start at 0), brackets sign changes of `d|M_B|^2/dxi`, bisects, and
/// polishes with Newton steps. Zeros in `[0, 1)` are then translated by
/// integers.
pub fn mask_zeros(digits: &[i64], lo: f64, hi: f64) -> Result<ZeroSetReport> {
    if digits.is_empty() {
        return Err(Error::InvalidInput("empty digit set".into()));
    }
    if digits.iter().collect::<BTreeSet<_>>().len() == 1 {
        return Err(Error::SingletonMask);
    }
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("interval [{lo}, {hi}] is empty")));
    }
    let base = period_zeros(digits);
    let mut zeros = Vec::new();
    let first = lo.floor() as i64 - 1;
    let last = hi.ceil() as i64 + 1;
    for k in first..=last {
        for z in &base {
            let v = z.value + k as f64;
            if v >= lo && v <= hi {
                zeros.push(ZeroEnclosure { value: v, radius: z.radius });
            }
        }
    }
    Ok(ZeroSetReport {
        zeros,
        interval: (lo, hi),
        source: format!("mask {}", format_digits(digits)),
    })
}

/// Half the smallest positive zero of `M_B`; infinite when the mask has no
/// real zeros.
pub fn zero_free_radius(digits: &[i64]) -> f64 {
    if digits.iter().collect::<BTreeSet<_>>().len() < 2 {
        return f64::INFINITY;
    }
    period_zeros(digits)
        .iter()
        .map(|z| z.value)
        .find(|&v| v > 0.0)
        .map_or(f64::INFINITY, |v| 0.5 * v)
}

/// `[-h, h]` intersected with the union over `j` and over exponent tuples of
/// `N_1^{k_1} ... N_m^{k_m} O(M_{B_j})`. Tuples are cut off at
/// `k_1 + ... + k_m <= log(h / delta_j) / log 2`, beyond which every scaled
/// zero leaves the window.
pub fn enumerate_zero_products(family: &[HadamardTriple], h: f64) -> Result<ZeroSetReport> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("window half-width {h} must be positive")));
    }
    let scales: Vec<i128> = family.iter().map(|t| t.scale() as i128).collect();
    let mut points: Vec<ZeroEnclosure> = Vec::new();
    for t in family {
        let delta = zero_free_radius(t.digits());
        if !(h >= delta) {
            continue;
        }
        let max_total = ((h / delta).ln() / 2f64.ln()).floor() as u32;
        for s in scale_products(&scales, max_total) {
            let reach = h / (s as f64).abs();
            let zeros = mask_zeros(t.digits(), -reach, reach)?;
            points.extend(zeros.zeros.iter().map(|z| ZeroEnclosure {
                value: z.value * s as f64,
                radius: z.radius * (s as f64).abs(),
            }));
        }
    }
    points.sort_by(|a, b| a.value.total_cmp(&b.value));
    points.dedup_by(|a, b| (a.value - b.value).abs() <= 1e-9 * a.value.abs().max(1.0));
    separate_enclosures(&mut points);
    Ok(ZeroSetReport {
        zeros: points,
        interval: (-h, h),
        source: format!("zero products of {} masks", family.len()),
    })
}

/// Distinct values of `prod N_i^{k_i}` over tuples with `sum k_i <= max_total`.
fn scale_products(scales: &[i128], max_total: u32) -> BTreeSet<i128> {
    let mut out = BTreeSet::new();
    fn walk(scales: &[i128], budget: u32, acc: i128, out: &mut BTreeSet<i128>) {
        let Some((&first, rest)) = scales.split_first() else {
            out.insert(acc);
            return;
        };
        let mut value = acc;
        for used in 0..=budget {
            walk(rest, budget - used, value, out);
            match value.checked_mul(first) {
                Some(v) => value = v,
                None => break,
            }
        }
    }
    walk(scales, max_total, 1, &mut out);
    out
}

/// Outcome of probing `xi` for membership in the integral periodic zero set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ProbeVerdict {
    /// `|hat{mu}(xi + k)| > tol`, so `xi` is not in `Z(mu)`.
    Witness { k: i64, value: f64, evidence: String },
    /// No shift in `[-K, K]` cleared `tol`; inconclusive numeric evidence.
    CandidateZero {
        max_value: f64,
        max_bound: f64,
        evidence: String,
    },
}

/// Shifts `0, 1, -1, 2, -2, ...` up to `K`.
pub(crate) fn shift_order(kmax: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=kmax).flat_map(|k| [k, -k]))
}

pub fn integral_periodic_zero_probe(
    spec: &ConvolutionSpec,
    xi: f64,
    kmax: i64,
    depth: usize,
    tol: f64,
) -> ProbeVerdict {
    let tail = spec.tail(0);
    let mut max_value = 0.0f64;
    let mut max_bound = 0.0f64;
    for k in shift_order(kmax) {
        let v = fourier_tail(&tail, xi + k as f64, depth);
        if v.norm() > tol {
            return ProbeVerdict::Witness {
                k,
                value: v.norm(),
                evidence: "numeric".into(),
            };
        }
        max_value = max_value.max(v.norm());
        max_bound = max_bound.max(v.bound);
    }
    ProbeVerdict::CandidateZero {
        max_value,
        max_bound,
        evidence: "numeric".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationTrace {
    pub start: f64,
    pub sets: Vec<Vec<f64>>,
    pub cardinalities: Vec<usize>,
    /// Product of `#L` over the steps taken.
    pub cardinality_bound: u128,
    pub nondecreasing: bool,
    /// First step from which the cardinality stays constant to the end.
    pub stabilized_from: Option<usize>,
    /// First `(step, point)` within [`INTEGER_PROXIMITY`] of an integer.
    pub integer_hit: Option<(usize, f64)>,
}

/// Iterates `Y_n = { (xi + l) / N : xi in Y_{n-1}, l in L, |M_B((xi + l)/N)| > tol }`
/// along the word, starting from `Y_0 = {xi0}`. Frequencies are first reduced
/// into `{0, ..., |N|-1}` so every `Y_n` stays inside `[-(|xi0|+2), |xi0|+2]`.
pub fn zero_propagation(spec: &ConvolutionSpec, xi0: f64, steps: usize, tol: f64) -> Result<PropagationTrace> {
    if steps == 0 {
        return Err(Error::InvalidInput("zero propagation needs at least one step".into()));
    }
    let spec = spec.normalized();
    let near_integer = |x: f64| (x - x.round()).abs() <= INTEGER_PROXIMITY;
    let mut current = vec![xi0];
    let mut sets = vec![current.clone()];
    let mut cardinality_bound: u128 = 1;
    let mut integer_hit = near_integer(xi0).then_some((0, xi0));

    for n in 1..=steps {
        let t = spec.effective_triple(n)?;
        cardinality_bound = cardinality_bound.saturating_mul(t.size() as u128);
        let scale = t.scale() as f64;
        let mut next = Vec::with_capacity(current.len() * t.size());
        for &xi in &current {
            for &l in t.frequencies() {
                let tau = (xi + l as f64) / scale;
                if mask(t.digits(), tau).norm() > tol {
                    next.push(tau);
                }
            }
        }
        next.sort_by(f64::total_cmp);
        next.dedup();
        if next.len() > MAX_PROPAGATION_POINTS {
            return Err(Error::DepthTooLarge {
                depth: n,
                reason: format!("{} points exceed the propagation budget", next.len()),
            });
        }
        if integer_hit.is_none() {
            integer_hit = next.iter().find(|&&x| near_integer(x)).map(|&x| (n, x));
        }
        sets.push(next.clone());
        current = next;
    }

    let cardinalities: Vec<usize> = sets.iter().map(Vec::len).collect();
    let nondecreasing = cardinalities.windows(2).all(|w| w[0] <= w[1]);
    let last = *cardinalities.last().unwrap();
    let stable_start = cardinalities.iter().rposition(|&c| c != last).map_or(0, |i| i + 1);
    let stabilized_from = (stable_start < steps).then_some(stable_start);
    Ok(PropagationTrace {
        start: xi0,
        sets,
        cardinalities,
        cardinality_bound,
        nondecreasing,
        stabilized_from,
        integer_hit,
    })
}
