//! Numeric equi-positivity probes for families of tail measures.
//!
//! A family of probability measures is equi-positive with constants
//! `(epsilon, delta)` when every `x` in `[0, 1)` admits an integer `k_x` with
//! `|nu_hat(x + y + k_x)| >= epsilon` for all `|y| < delta` and every member
//! `nu`, with `k_0 = 0`. The probe here samples `x` on a grid, searches
//! `k` in `[-K, K]`, and estimates the ball minimum by sampling plus
//! golden-section refinement. It is evidence, not a proof.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::{tail_support_radius, tail_truncation_bound, FactorSchedule, TailSpec, DEFAULT_DEPTH};
use crate::convolution::ConvolutionSpec;
use crate::numfmt::sig15;
use crate::zeros::shift_order;

pub const DEFAULT_GRID: usize = 128;
pub const DEFAULT_KMAX: i64 = 8;
pub const DEFAULT_THRESHOLD: f64 = 1e-4;

const GOLDEN_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub grid_n: usize,
    pub kmax: i64,
    pub depth: usize,
    pub threshold: f64,
}

impl Default for ProbeParams {
    fn default() -> Self {
        ProbeParams {
            grid_n: DEFAULT_GRID,
            kmax: DEFAULT_KMAX,
            depth: DEFAULT_DEPTH,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// Result of a shift search at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftChoice {
    pub k: i64,
    /// Minimum of `|nu_hat|` over the ball around `x + k`.
    pub value: f64,
    /// `max_k |nu_hat(x + k)|` at the center, over the whole window.
    pub peak: f64,
}

/// Evaluates `|nu_hat|` for one tail at a fixed depth.
pub struct TailProbe<'a> {
    schedule: FactorSchedule<'a>,
    sample_step: f64,
}

impl<'a> TailProbe<'a> {
    pub fn new(tail: &'a TailSpec, depth: usize) -> Self {
        let radius = tail_support_radius(&tail.spec, tail.skip);
        TailProbe {
            schedule: FactorSchedule::new(&tail.spec, tail.skip, depth),
            sample_step: 1.0 / (16.0 * (radius + 1.0)),
        }
    }

    pub fn modulus(&self, xi: f64) -> f64 {
        self.schedule.evaluate(xi).norm()
    }

    /// Minimum of `|nu_hat|` on `[center - radius, center + radius]`.
    ///
    /// `|nu_hat|` is Lipschitz with constant `2 pi R`, `R` the support radius,
    /// so sampling at step `1/(16 (R + 1))` followed by golden-section search
    /// around every sampled local minimum locates the minimum to high accuracy.
    pub fn ball_minimum(&self, center: f64, radius: f64) -> f64 {
        if radius <= 0.0 {
            return self.modulus(center);
        }
        let half = (radius / self.sample_step).ceil().max(2.0) as usize;
        let points: Vec<f64> = (0..=2 * half)
            .map(|j| center - radius + radius * j as f64 / half as f64)
            .collect();
        let values: Vec<f64> = points.iter().map(|&p| self.modulus(p)).collect();
        let mut best = values.iter().copied().fold(f64::INFINITY, f64::min);
        for j in 0..points.len() {
            let left = if j == 0 { f64::INFINITY } else { values[j - 1] };
            let right = values.get(j + 1).copied().unwrap_or(f64::INFINITY);
            if values[j] <= left && values[j] <= right {
                let a = points[j.saturating_sub(1)];
                let b = points[(j + 1).min(points.len() - 1)];
                best = best.min(self.golden_minimum(a, b));
            }
        }
        best
    }

    fn golden_minimum(&self, mut a: f64, mut b: f64) -> f64 {
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let mut fc = self.modulus(c);
        let mut fd = self.modulus(d);
        let mut best = fc.min(fd);
        for _ in 0..GOLDEN_STEPS {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = self.modulus(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = self.modulus(d);
            }
            best = best.min(fc).min(fd);
        }
        best
    }

    /// Best shift `k` in `[-K, K]` for the ball of the given radius around
    /// `x + k`. Ties go to the smaller `|k|`, then the positive one; `x = 0`
    /// forces `k = 0`.
    pub fn choose(&self, x: f64, radius: f64, kmax: i64) -> ShiftChoice {
        let order: Vec<i64> = shift_order(kmax).collect();
        let pointwise: Vec<f64> = order.iter().map(|&k| self.modulus(x + k as f64)).collect();
        let peak = pointwise.iter().copied().fold(0.0, f64::max);
        if x == 0.0 {
            return ShiftChoice {
                k: 0,
                value: self.ball_minimum(0.0, radius),
                peak,
            };
        }
        // The ball minimum never exceeds the center value, so candidates are
        // visited by decreasing center value and the scan stops once no
        // remaining center can beat the best ball minimum found.
        let mut ranked: Vec<usize> = (0..order.len()).collect();
        ranked.sort_by(|&a, &b| pointwise[b].total_cmp(&pointwise[a]).then(a.cmp(&b)));
        let mut best: Option<(usize, f64)> = None;
        for idx in ranked {
            if let Some((_, v)) = best {
                if pointwise[idx] < v {
                    break;
                }
            }
            let v = if radius > 0.0 {
                self.ball_minimum(x + order[idx] as f64, radius)
            } else {
                pointwise[idx]
            };
            best = match best {
                Some((i, bv)) if bv > v || (bv == v && i < idx) => Some((i, bv)),
                _ => Some((idx, v)),
            };
        }
        let (idx, value) = best.expect("shift window is nonempty");
        ShiftChoice { k: order[idx], value, peak }
    }
}

/// `k` in `[-K, K]` maximizing `|nu_hat(x + k)|`, with its value.
pub fn choose_k(tail: &TailSpec, x: f64, kmax: i64, depth: usize) -> (i64, f64) {
    let c = TailProbe::new(tail, depth).choose(x, 0.0, kmax);
    (c.k, c.value)
}

/// `k` in `[-K, K]` maximizing the minimum of `|nu_hat|` over the closed ball
/// of the given radius around `x + k`.
pub fn choose_k_on_ball(tail: &TailSpec, x: f64, radius: f64, kmax: i64, depth: usize) -> ShiftChoice {
    TailProbe::new(tail, depth).choose(x, radius, kmax)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub skip: usize,
    pub x: f64,
    pub k: i64,
    /// Minimum of `|nu_hat|` over the ball of radius `delta_hat` around `x + k`.
    pub value: f64,
    /// `max_k |nu_hat(x + k)|`, the plain grid-point value.
    pub peak: f64,
    /// Truncation bound at `x + k`.
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeStatus {
    Certified,
    Failed,
}

/// Outcome of [`probe_family`]: a certificate when `epsilon_hat` exceeds the
/// failure threshold, a failure report naming the worst `(x, skip)` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquiPositivityCertificate {
    pub status: ProbeStatus,
    pub family_id: String,
    pub evidence: String,
    pub epsilon_hat: f64,
    /// Ball radius honored around each grid point, `1/(2 grid_n)`.
    pub delta_hat: f64,
    pub threshold: f64,
    pub grid_n: usize,
    pub kmax: i64,
    pub depth: usize,
    pub skips: Vec<usize>,
    pub worst: ProbeRow,
    pub table: Vec<ProbeRow>,
}

impl EquiPositivityCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == ProbeStatus::Certified
    }

    /// Smallest grid-point value `max_k |nu_hat(x + k)|` over the table.
    pub fn min_peak(&self) -> f64 {
        self.table.iter().map(|r| r.peak).fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("skip,x,k,value,peak,bound\n");
        for r in &self.table {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.skip,
                sig15(r.x),
                r.k,
                sig15(r.value),
                sig15(r.peak),
                sig15(r.bound)
            ));
        }
        out
    }
}

pub(crate) fn describe_spec(spec: &ConvolutionSpec) -> String {
    let family: Vec<String> = spec
        .family()
        .iter()
        .map(|t| {
            let b: Vec<String> = t.digits().iter().map(i64::to_string).collect();
            let l: Vec<String> = t.frequencies().iter().map(i64::to_string).collect();
            format!("({},{{{}}},{{{}}})", t.scale(), b.join(","), l.join(","))
        })
        .collect();
    let w = spec.word();
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let joinu = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    format!(
        "family [{}] word {}:{} exponents {}:{}",
        family.join(" "),
        join(&w.prefix),
        join(&w.period),
        joinu(&w.exp_prefix),
        joinu(&w.exp_period)
    )
}

/// Probes the tails `nu_{>n}`, `n` in `skips`, on the grid `x = j / grid_n`.
pub fn probe_family(spec: &ConvolutionSpec, skips: &[usize], params: &ProbeParams) -> crate::Result<EquiPositivityCertificate> {
    if params.grid_n < 2 {
        return Err(crate::Error::InvalidInput("grid_n must be at least 2".into()));
    }
    if skips.is_empty() {
        return Err(crate::Error::InvalidInput("at least one tail skip is required".into()));
    }
    if params.depth == 0 || params.kmax < 0 {
        return Err(crate::Error::InvalidInput("depth must be positive and K nonnegative".into()));
    }
    let delta_hat = 0.5 / params.grid_n as f64;
    let tails: Vec<TailSpec> = skips.iter().map(|&n| spec.tail(n)).collect();
    let jobs: Vec<(usize, usize)> = (0..tails.len())
        .flat_map(|t| (0..params.grid_n).map(move |j| (t, j)))
        .collect();
    let table: Vec<ProbeRow> = jobs
        .par_iter()
        .map(|&(t, j)| {
            let tail = &tails[t];
            let probe = TailProbe::new(tail, params.depth);
            let x = j as f64 / params.grid_n as f64;
            let c = probe.choose(x, delta_hat, params.kmax);
            ProbeRow {
                skip: tail.skip,
                x,
                k: c.k,
                value: c.value,
                peak: c.peak,
                bound: tail_truncation_bound(tail, x + c.k as f64, params.depth),
            }
        })
        .collect();

    let worst = *table
        .iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("nonempty table");
    let status = if worst.value > params.threshold {
        ProbeStatus::Certified
    } else {
        ProbeStatus::Failed
    };
    Ok(EquiPositivityCertificate {
        status,
        family_id: describe_spec(spec),
        evidence: "numeric".into(),
        epsilon_hat: worst.value,
        delta_hat,
        threshold: params.threshold,
        grid_n: params.grid_n,
        kmax: params.kmax,
        depth: params.depth,
        skips: skips.to_vec(),
        worst,
        table,
    })
}
