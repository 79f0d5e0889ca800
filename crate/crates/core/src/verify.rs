//! Orthonormality and completeness checks for constructed spectrum levels.
//!
//! For a probability measure `mu` and a countable `Lambda`, the exponentials
//! `e_l(x) = exp(2 pi i l x)` form an orthonormal basis of `L^2(mu)` exactly
//! when `Q(xi) = sum_l |mu_hat(l + xi)|^2` is identically 1, and an
//! orthonormal set exactly when `Q <= 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::{
    fourier_finite, tail_support_radius, tail_truncation_bound, ConvolutionSpec, DiscreteMeasure,
};
use crate::error::{Error, Result};
use crate::numfmt::sig15;
use crate::spectrum::{cumulative_scale, SpectrumLevels};

pub const DEFAULT_GRID: usize = 64;
pub const DEFAULT_DEPTH: usize = 30;
pub const COMPLETENESS_TOL: f64 = 1e-9;
pub const Q_SLACK: f64 = 1e-3;
pub const BESSEL_SLACK: f64 = 1e-9;
const EXTRA_POINTS: usize = 10;

/// `G[a][b] = <e_{l_a}, e_{l_b}>_mu = mu_hat(l_a - l_b)`.
pub fn gram_matrix(measure: &DiscreteMeasure, lambda: &[i64]) -> Vec<Vec<Complex64>> {
    lambda
        .iter()
        .map(|&a| lambda.iter().map(|&b| measure.fourier((a - b) as f64)).collect())
        .collect()
}

/// Largest entrywise distance of the Gram matrix from the identity.
pub fn orthonormality_gram(measure: &DiscreteMeasure, lambda: &[i64]) -> f64 {
    let g = gram_matrix(measure, lambda);
    let mut worst = 0.0f64;
    for (a, row) in g.iter().enumerate() {
        for (b, entry) in row.iter().enumerate() {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((entry - target).norm());
        }
    }
    worst
}

fn check_level(levels: &SpectrumLevels, i: usize) -> Result<()> {
    if i == 0 || i >= levels.levels.len() {
        return Err(Error::InvalidInput(format!(
            "level {i} is not among the constructed levels 1..={}",
            levels.levels.len().saturating_sub(1)
        )));
    }
    Ok(())
}

/// `max_xi |1 - sum_{l in Lambda_i} |mu_hat_{m_i}(l + xi)|^2|`.
pub fn level_completeness(spec: &ConvolutionSpec, levels: &SpectrumLevels, i: usize, xi_grid: &[f64]) -> Result<f64> {
    check_level(levels, i)?;
    let m = levels.index(i);
    let lambda = levels.level(i);
    Ok(xi_grid
        .par_iter()
        .map(|&xi| {
            let s: f64 = lambda
                .iter()
                .map(|&l| fourier_finite(spec, m, l as f64 + xi).norm_sqr())
                .sum();
            (1.0 - s).abs()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max))
}

/// `Q_i(xi)` at a given depth, with bounds that together give
/// `Q_i(xi) >= 1 - tail_bound` whenever `Lambda_i` is a spectrum of `mu_{m_i}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QValue {
    pub xi: f64,
    pub q: f64,
    /// Effect of truncating the infinite product at `depth` factors.
    pub truncation_bound: f64,
    /// Loss from the factors beyond `m_i`, controlled by the tail's support radius.
    pub gap_bound: f64,
    pub tail_bound: f64,
}

pub fn q_function(spec: &ConvolutionSpec, levels: &SpectrumLevels, i: usize, depth: usize, xi: f64) -> Result<QValue> {
    check_level(levels, i)?;
    let m = levels.index(i);
    if depth < m {
        return Err(Error::InvalidInput(format!("depth {depth} is below m_{i} = {m}")));
    }
    let scale = cumulative_scale(spec, m)?.unsigned_abs() as f64;
    let radius = tail_support_radius(spec, m);
    let whole = spec.tail(0);
    let mut q = 0.0;
    let mut truncation_bound = 0.0;
    let mut gap_bound = 0.0;
    for &l in levels.level(i) {
        let zeta = l as f64 + xi;
        q += fourier_finite(spec, depth, zeta).norm_sqr();
        truncation_bound += 2.0 * tail_truncation_bound(&whole, zeta, depth);
        let weight = fourier_finite(spec, m, zeta).norm_sqr();
        gap_bound += weight * (4.0 * PI * radius * (zeta / scale).abs()).min(1.0);
    }
    Ok(QValue {
        xi,
        q,
        truncation_bound,
        gap_bound,
        tail_bound: truncation_bound + gap_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QReport {
    pub status: ReportStatus,
    pub level: usize,
    pub truncation_depth: usize,
    pub xi_grid: Vec<f64>,
    pub q_values: Vec<f64>,
    /// Per-point `tail_bound`.
    pub bounds: Vec<f64>,
    /// `max |1 - Q|` over the grid.
    pub max_defect: f64,
    pub min_q: f64,
    /// Largest per-point `tail_bound`.
    pub tail_bound: f64,
    pub completeness_defect: f64,
    pub completeness_tol: f64,
    pub q_slack: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl QReport {
    pub fn not_applicable(reason: impl Into<String>) -> Self {
        QReport {
            status: ReportStatus::NotApplicable,
            level: 0,
            truncation_depth: 0,
            xi_grid: Vec::new(),
            q_values: Vec::new(),
            bounds: Vec::new(),
            max_defect: f64::NAN,
            min_q: f64::NAN,
            tail_bound: f64::NAN,
            completeness_defect: f64::NAN,
            completeness_tol: COMPLETENESS_TOL,
            q_slack: Q_SLACK,
            note: Some(reason.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == ReportStatus::Pass
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,q,bound\n");
        for ((x, q), b) in self.xi_grid.iter().zip(&self.q_values).zip(&self.bounds) {
            out.push_str(&format!("{},{},{}\n", sig15(*x), sig15(*q), sig15(*b)));
        }
        out
    }
}

/// `n` uniform points from `-2` to `2`, endpoints included.
pub fn default_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|j| -2.0 + 4.0 * j as f64 / (n - 1) as f64).collect(),
    }
}

/// Checks the top level: completeness of `Lambda_i` for `mu_{m_i}` and
/// `Q_i(xi) >= 1 - (tail_bound(xi) + Q_SLACK)` on the uniform grid plus the
/// ten worst points of a four times finer scan.
pub fn spectral_report(spec: &ConvolutionSpec, levels: &SpectrumLevels, grid_n: usize, depth: usize) -> Result<QReport> {
    if levels.count() == 0 {
        return Ok(QReport::not_applicable("no spectrum levels were constructed"));
    }
    if grid_n < 2 {
        return Err(Error::InvalidInput("the grid needs at least two points".into()));
    }
    let i = levels.count();
    let eval = |xi: f64| q_function(spec, levels, i, depth, xi);

    let grid = default_grid(grid_n);
    let coarse: Vec<f64> = (0..4 * grid_n)
        .map(|j| -2.0 + 4.0 * (j as f64 + 0.5) / (4 * grid_n) as f64)
        .collect();
    let mut scanned = coarse
        .par_iter()
        .map(|&x| eval(x))
        .collect::<Result<Vec<_>>>()?;
    scanned.sort_by(|a, b| a.q.total_cmp(&b.q).then(a.xi.total_cmp(&b.xi)));
    let mut xi_grid = grid;
    xi_grid.extend(scanned.iter().take(EXTRA_POINTS).map(|v| v.xi));
    xi_grid.sort_by(f64::total_cmp);
    xi_grid.dedup();

    let values = xi_grid.par_iter().map(|&x| eval(x)).collect::<Result<Vec<_>>>()?;
    let completeness_defect = level_completeness(spec, levels, i, &xi_grid)?;
    let q_values: Vec<f64> = values.iter().map(|v| v.q).collect();
    let bounds: Vec<f64> = values.iter().map(|v| v.tail_bound).collect();
    let max_defect = q_values.iter().map(|q| (1.0 - q).abs()).fold(0.0, f64::max);
    let min_q = q_values.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_bound = bounds.iter().copied().fold(0.0, f64::max);
    let q_ok = values.iter().all(|v| v.q >= 1.0 - (v.tail_bound + Q_SLACK) && v.q <= 1.0 + BESSEL_SLACK);
    let status = if completeness_defect <= COMPLETENESS_TOL && q_ok {
        ReportStatus::Pass
    } else {
        ReportStatus::Fail
    };
    Ok(QReport {
        status,
        level: i,
        truncation_depth: depth,
        xi_grid,
        q_values,
        bounds,
        max_defect,
        min_q,
        tail_bound,
        completeness_defect,
        completeness_tol: COMPLETENESS_TOL,
        q_slack: Q_SLACK,
        note: None,
    })
}
