//! Hadamard triples `(N, B, L)` on the real line.
//!
//! A triple is Hadamard when the `#B x #B` matrix with entries
//! `exp(-2 pi i b l / N) / sqrt(#B)` (rows `b in B`, columns `l in L`) is
//! unitary. Equivalently, `L` is a spectrum of the uniform atomic measure on
//! `N^{-1} B`.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for the unitarity check.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A validated Hadamard triple. Digit and frequency sets are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct HadamardTriple {
    scale: i64,
    digits: Vec<i64>,
    frequencies: Vec<i64>,
}

/// Unvalidated wire form, `{"N": int, "B": [int], "L": [int]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTriple {
    #[serde(rename = "N")]
    pub scale: i64,
    #[serde(rename = "B")]
    pub digits: Vec<i64>,
    #[serde(rename = "L")]
    pub frequencies: Vec<i64>,
}

impl TryFrom<RawTriple> for HadamardTriple {
    type Error = Error;

    fn try_from(raw: RawTriple) -> Result<Self> {
        HadamardTriple::new(raw.scale, raw.digits, raw.frequencies)
    }
}

impl From<HadamardTriple> for RawTriple {
    fn from(t: HadamardTriple) -> Self {
        RawTriple {
            scale: t.scale,
            digits: t.digits,
            frequencies: t.frequencies,
        }
    }
}

impl HadamardTriple {
    /// Validates at [`DEFAULT_TOL`].
    pub fn new(scale: i64, digits: Vec<i64>, frequencies: Vec<i64>) -> Result<Self> {
        Self::with_tolerance(scale, digits, frequencies, DEFAULT_TOL)
    }

    pub fn with_tolerance(
        scale: i64,
        digits: Vec<i64>,
        frequencies: Vec<i64>,
        tol: f64,
    ) -> Result<Self> {
        let digits = sorted_unique(digits, "digit")?;
        let frequencies = sorted_unique(frequencies, "frequency")?;
        let report = verify_triple(scale, &digits, &frequencies, tol)?;
        match report.failure {
            None => Ok(HadamardTriple {
                scale,
                digits,
                frequencies,
            }),
            Some(TripleFailure::SizeMismatch {
                digits,
                frequencies,
            }) => Err(Error::SizeMismatch {
                digits,
                frequencies,
            }),
            Some(TripleFailure::TooFewElements) => Err(Error::InvalidInput(
                "a Hadamard triple needs at least two digits".into(),
            )),
            Some(TripleFailure::NotUnitary) => Err(Error::NotHadamard {
                deviation: report.max_deviation.unwrap_or(f64::INFINITY),
                tol,
            }),
        }
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    pub fn frequencies(&self) -> &[i64] {
        &self.frequencies
    }

    /// `#B`, which equals `#L`.
    pub fn size(&self) -> usize {
        self.digits.len()
    }

    pub fn max_abs_digit(&self) -> i64 {
        self.digits.iter().map(|b| b.abs()).max().unwrap_or(0)
    }

    /// Translate `L` (after reducing it into `{0, ..., |N|-1}`) so that it
    /// contains 0. Digits are untouched.
    pub fn normalized(&self) -> HadamardTriple {
        let reduced = reduce_frequencies(self);
        let shift = reduced.frequencies[0];
        translate_triple(&reduced, 0, -shift)
    }
}

fn sorted_unique(values: Vec<i64>, set: &'static str) -> Result<Vec<i64>> {
    let mut seen = BTreeSet::new();
    for &v in &values {
        if !seen.insert(v) {
            return Err(Error::DuplicateElement { set, value: v });
        }
    }
    Ok(seen.into_iter().collect())
}

/// Why a candidate triple was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TripleFailure {
    SizeMismatch { digits: usize, frequencies: usize },
    TooFewElements,
    NotUnitary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleReport {
    pub passed: bool,
    /// Largest `|<row_b, row_b'> - delta_{b b'}|`; absent when the sizes differ.
    pub max_deviation: Option<f64>,
    pub failure: Option<TripleFailure>,
    pub digits_distinct_mod_n: bool,
    pub frequencies_distinct_mod_n: bool,
}

/// Checks the unitarity of the normalized exponential matrix of `(N, B, L)`.
///
/// An invalid scale is an error; a size mismatch or a non-unitary matrix is
/// reported through the returned value.
pub fn verify_triple(scale: i64, digits: &[i64], frequencies: &[i64], tol: f64) -> Result<TripleReport> {
    if scale.unsigned_abs() < 2 {
        return Err(Error::InvalidScale(scale));
    }
    if digits.is_empty() || frequencies.is_empty() {
        return Err(Error::InvalidInput("digit and frequency sets must be nonempty".into()));
    }
    let digits_distinct_mod_n = distinct_residues(digits, scale);
    let frequencies_distinct_mod_n = distinct_residues(frequencies, scale);
    let mut report = TripleReport {
        passed: false,
        max_deviation: None,
        failure: None,
        digits_distinct_mod_n,
        frequencies_distinct_mod_n,
    };
    if digits.len() != frequencies.len() {
        report.failure = Some(TripleFailure::SizeMismatch {
            digits: digits.len(),
            frequencies: frequencies.len(),
        });
        return Ok(report);
    }
    let deviation = unitarity_deviation(scale, digits, frequencies);
    report.max_deviation = Some(deviation);
    report.failure = if digits.len() < 2 {
        Some(TripleFailure::TooFewElements)
    } else if deviation > tol {
        Some(TripleFailure::NotUnitary)
    } else {
        None
    };
    report.passed = report.failure.is_none();
    Ok(report)
}

/// `exp(-2 pi i m / N)` with `m` reduced modulo `|N|` first.
fn root_of_unity(m: i128, scale: i64) -> Complex64 {
    let r = m.rem_euclid(scale.unsigned_abs() as i128);
    Complex64::from_polar(1.0, -2.0 * PI * r as f64 / scale as f64)
}

fn unitarity_deviation(scale: i64, digits: &[i64], frequencies: &[i64]) -> f64 {
    let n = digits.len() as f64;
    let modulus = scale.unsigned_abs() as i128;
    // The row inner product only depends on the digit difference mod |N|.
    let mut inner_by_residue: HashMap<i128, Complex64> = HashMap::new();
    let mut worst = 0.0f64;
    for (i, &b) in digits.iter().enumerate() {
        for &b2 in &digits[i..] {
            let diff = (b as i128 - b2 as i128).rem_euclid(modulus);
            let inner = *inner_by_residue.entry(diff).or_insert_with(|| {
                frequencies
                    .iter()
                    .map(|&l| root_of_unity(diff * l as i128, scale))
                    .sum::<Complex64>()
                    / n
            });
            let target = if b == b2 { 1.0 } else { 0.0 };
            worst = worst.max((inner - target).norm());
        }
    }
    worst
}

/// True when the values occupy pairwise distinct residue classes mod `N`.
pub fn distinct_residues(values: &[i64], scale: i64) -> bool {
    let modulus = scale.unsigned_abs() as i128;
    let mut buckets = BTreeSet::new();
    values
        .iter()
        .all(|&v| buckets.insert((v as i128).rem_euclid(modulus)))
}

/// `(N, B + b0, L + l0)`.
pub fn translate_triple(t: &HadamardTriple, b0: i64, l0: i64) -> HadamardTriple {
    HadamardTriple {
        scale: t.scale,
        digits: t.digits.iter().map(|b| b + b0).collect(),
        frequencies: t.frequencies.iter().map(|l| l + l0).collect(),
    }
}

/// Replaces every frequency by its residue in `{0, ..., |N|-1}`.
pub fn reduce_frequencies(t: &HadamardTriple) -> HadamardTriple {
    let modulus = t.scale.abs();
    let mut frequencies: Vec<i64> = t.frequencies.iter().map(|l| l.rem_euclid(modulus)).collect();
    frequencies.sort_unstable();
    HadamardTriple {
        scale: t.scale,
        digits: t.digits.clone(),
        frequencies,
    }
}

/// Composite triple of `(N_1, B_1, L_1), ..., (N_n, B_n, L_n)`:
/// scale `N_n ... N_1`, digits `(N_n ... N_2) B_1 + ... + N_n B_{n-1} + B_n`,
/// frequencies `L_1 + N_1 L_2 + ... + (N_1 ... N_{n-1}) L_n`.
pub fn compose_triples(ts: &[HadamardTriple]) -> Result<HadamardTriple> {
    let (first, rest) = ts
        .split_first()
        .ok_or_else(|| Error::InvalidInput("cannot compose an empty list of triples".into()))?;
    let mut scale = first.scale;
    let mut digits = first.digits.clone();
    let mut frequencies = first.frequencies.clone();
    for t in rest {
        digits = sumset(&digits, t.scale, &t.digits).ok_or(Error::Overflow("composing digits"))?;
        frequencies = sumset(&t.frequencies, scale, &frequencies)
            .ok_or(Error::Overflow("composing frequencies"))?;
        scale = scale
            .checked_mul(t.scale)
            .ok_or(Error::Overflow("composing scales"))?;
    }
    digits.sort_unstable();
    frequencies.sort_unstable();
    Ok(HadamardTriple {
        scale,
        digits,
        frequencies,
    })
}

/// `factor * a + b` over all pairs.
pub(crate) fn sumset(a: &[i64], factor: i64, b: &[i64]) -> Option<Vec<i64>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        let scaled = x.checked_mul(factor)?;
        for &y in b {
            out.push(scaled.checked_add(y)?);
        }
    }
    Some(out)
}

/// gcd of all pairwise differences of `B`; 0 for a singleton.
pub fn difference_gcd(digits: &[i64]) -> u64 {
    let Some(&base) = digits.first() else {
        return 0;
    };
    digits
        .iter()
        .fold(0u64, |g, &b| g.gcd(&((b as i128 - base as i128).unsigned_abs() as u64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jp() -> HadamardTriple {
        HadamardTriple::new(4, vec![0, 2], vec![0, 1]).unwrap()
    }

    #[test]
    fn verify_known_triples() {
        assert!(verify_triple(4, &[0, 2], &[0, 1], 1e-12).unwrap().passed);
        assert!(verify_triple(2, &[0, 3], &[0, 1], 1e-12).unwrap().passed);
        assert!(verify_triple(2, &[0, 1], &[0, 1], 1e-12).unwrap().passed);
    }

    #[test]
    fn verify_rejects_scale_three_with_binary_digits() {
        let report = verify_triple(3, &[0, 1], &[0, 1], 1e-12).unwrap();
        assert!(!report.passed);
        assert_eq!(report.failure, Some(TripleFailure::NotUnitary));
        // |(1 + e^{2 pi i / 3}) / 2|, evaluated directly.
        let expected = (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 2.0 * PI / 3.0)).norm() / 2.0;
        assert!((report.max_deviation.unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.5).abs() < 1e-15);
    }

    #[test]
    fn verify_errors() {
        assert!(matches!(verify_triple(1, &[0, 1], &[0, 1], 1e-12), Err(Error::InvalidScale(1))));
        assert!(matches!(verify_triple(-1, &[0], &[0], 1e-12), Err(Error::InvalidScale(-1))));
        let r = verify_triple(4, &[0, 2], &[0, 1, 2], 1e-12).unwrap();
        assert_eq!(
            r.failure,
            Some(TripleFailure::SizeMismatch {
                digits: 2,
                frequencies: 3
            })
        );
        assert!(r.max_deviation.is_none());
    }

    #[test]
    fn duplicates_are_rejected() {
        assert!(matches!(
            HadamardTriple::new(4, vec![0, 2, 2], vec![0, 1, 3]),
            Err(Error::DuplicateElement { set: "digit", value: 2 })
        ));
    }

    #[test]
    fn negative_scale_is_allowed() {
        let t = HadamardTriple::new(-4, vec![0, 2], vec![0, 1]).unwrap();
        assert_eq!(t.scale(), -4);
        let r = reduce_frequencies(&HadamardTriple::new(-4, vec![0, 2], vec![-3, 4]).unwrap());
        assert_eq!(r.frequencies(), &[0, 1]);
    }

    #[test]
    fn translations() {
        assert_eq!(translate_triple(&jp(), 0, 0), jp());
        let t = translate_triple(&jp(), 1, 0);
        assert_eq!((t.digits(), t.frequencies()), (&[1, 3][..], &[0, 1][..]));
        assert!(verify_triple(t.scale(), t.digits(), t.frequencies(), 1e-12).unwrap().passed);

        let e = HadamardTriple::new(2, vec![0, 3], vec![0, 1]).unwrap();
        let t = translate_triple(&e, -3, 2);
        assert_eq!((t.digits(), t.frequencies()), (&[-3, 0][..], &[2, 3][..]));
        assert!(verify_triple(2, t.digits(), t.frequencies(), 1e-12).unwrap().passed);
    }

    #[test]
    fn reductions() {
        assert_eq!(reduce_frequencies(&jp()), jp());
        let t = HadamardTriple::new(4, vec![0, 2], vec![4, -3]).unwrap();
        assert_eq!(reduce_frequencies(&t), jp());
        let t = HadamardTriple::new(2, vec![0, 3], vec![2, 3]).unwrap();
        assert_eq!(reduce_frequencies(&t).frequencies(), &[0, 1]);
    }

    #[test]
    fn normalization_puts_zero_in_frequencies() {
        let t = HadamardTriple::new(4, vec![0, 2], vec![1, 2]).unwrap();
        let n = t.normalized();
        assert_eq!(n.frequencies(), &[0, 1]);
        assert!(verify_triple(4, n.digits(), n.frequencies(), 1e-12).unwrap().passed);
    }

    #[test]
    fn compositions() {
        assert_eq!(compose_triples(&[jp()]).unwrap(), jp());
        let c = compose_triples(&[jp(), jp()]).unwrap();
        assert_eq!(c.scale(), 16);
        assert_eq!(c.digits(), &[0, 2, 8, 10]);
        assert_eq!(c.frequencies(), &[0, 1, 4, 5]);
        assert!(verify_triple(16, c.digits(), c.frequencies(), 1e-12).unwrap().passed);

        let a = HadamardTriple::new(2, vec![0, 1], vec![0, 1]).unwrap();
        let b = HadamardTriple::new(2, vec![0, 3], vec![0, 1]).unwrap();
        let c = compose_triples(&[a, b]).unwrap();
        assert_eq!(c.scale(), 4);
        assert_eq!(c.digits(), &[0, 2, 3, 5]);
        assert_eq!(c.frequencies(), &[0, 1, 2, 3]);
        assert!(verify_triple(4, c.digits(), c.frequencies(), 1e-12).unwrap().passed);

        assert!(matches!(compose_triples(&[]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn gcds() {
        assert_eq!(difference_gcd(&[0, 3]), 3);
        assert_eq!(difference_gcd(&[5]), 0);
        assert_eq!(difference_gcd(&[0, 1, 2]), 1);
        assert_eq!(difference_gcd(&[0, 2]), 2);
        assert_eq!(difference_gcd(&[-2, 4, 10]), 6);
    }

    #[test]
    fn json_wire_format() {
        let json = serde_json::to_string(&jp()).unwrap();
        assert_eq!(json, r#"{"N":4,"B":[0,2],"L":[0,1]}"#);
        let back: HadamardTriple = serde_json::from_str(r#"{"N":4,"B":[2,0],"L":[1,0]}"#).unwrap();
        assert_eq!(back, jp());
        assert!(serde_json::from_str::<HadamardTriple>(r#"{"N":3,"B":[0,1],"L":[0,1]}"#).is_err());
    }
}
