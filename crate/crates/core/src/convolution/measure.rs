use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ConvolutionSpec;
use crate::error::{Error, Result};

/// Finitely many atoms at exact rational positions with exact rational
/// weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMeasure {
    atoms: BTreeMap<BigRational, BigRational>,
}

impl DiscreteMeasure {
    /// Builds a measure, merging repeated positions. Weights must be positive
    /// and sum to exactly one.
    pub fn new<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigRational, BigRational)>,
    {
        let mut map: BTreeMap<BigRational, BigRational> = BTreeMap::new();
        for (pos, w) in atoms {
            if !w.is_positive() {
                return Err(Error::InvalidInput(format!("atom weight {w} is not positive")));
            }
            *map.entry(pos).or_insert_with(BigRational::zero) += w;
        }
        let total: BigRational = map.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
        }
        Ok(DiscreteMeasure { atoms: map })
    }

    pub fn dirac(position: BigRational) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(position, BigRational::one());
        DiscreteMeasure { atoms }
    }

    /// `delta_A`: equal weights on the distinct points of `A`.
    pub fn uniform<I: IntoIterator<Item = BigRational>>(points: I) -> Result<Self> {
        let points: Vec<_> = points.into_iter().collect();
        if points.is_empty() {
            return Err(Error::InvalidInput("uniform measure on an empty set".into()));
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(points.len()));
        Self::new(points.into_iter().map(|p| (p, w.clone())))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&BigRational, &BigRational)> {
        self.atoms.iter()
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.values().sum()
    }

    pub fn min_position(&self) -> Option<&BigRational> {
        self.atoms.keys().next()
    }

    pub fn max_position(&self) -> Option<&BigRational> {
        self.atoms.keys().next_back()
    }

    /// Pushforward under `x -> x + y`, weights multiplied.
    pub fn convolve(&self, other: &DiscreteMeasure) -> DiscreteMeasure {
        let mut atoms: BTreeMap<BigRational, BigRational> = BTreeMap::new();
        for (p, w) in &self.atoms {
            for (q, v) in &other.atoms {
                *atoms.entry(p + q).or_insert_with(BigRational::zero) += w * v;
            }
        }
        DiscreteMeasure { atoms }
    }

    /// Direct atom sum `sum w exp(-2 pi i x xi)`.
    pub fn fourier(&self, xi: f64) -> Complex64 {
        self.atoms
            .iter()
            .map(|(p, w)| {
                let phase = (to_f64(p) * xi).rem_euclid(1.0);
                Complex64::from_polar(to_f64(w), -2.0 * PI * phase)
            })
            .sum()
    }

    /// Exact `mu((-inf, x])`.
    pub fn cdf(&self, x: &BigRational) -> BigRational {
        self.atoms.range(..=x.clone()).map(|(_, w)| w).sum()
    }

    /// `position,weight` rows; decimal when the denominator divides a power
    /// of ten, `p/q` otherwise.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("position,weight\n");
        for (p, w) in &self.atoms {
            let _ = writeln!(out, "{},{}", format_rational(p), format_rational(w));
        }
        out
    }
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Ratio of huge integers: divide after shifting both into range.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact decimal string when the reduced denominator is `2^a 5^b`, otherwise `p/q`.
pub fn format_rational(r: &BigRational) -> String {
    let mut d = r.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    if digits == 0 {
        return r.numer().to_string();
    }
    let scaled = r.numer() * num_traits::pow(BigInt::from(10), digits as usize) / r.denom();
    let sign = if scaled.is_negative() { "-" } else { "" };
    let body = scaled.abs().to_string();
    let body = format!("{body:0>width$}", width = digits as usize + 1);
    let (int, frac) = body.split_at(body.len() - digits as usize);
    format!("{sign}{int}.{frac}")
}

/// Limits guarding exact finite-level expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelBudget {
    pub max_denominator_bits: u64,
    pub max_atoms: usize,
}

impl Default for LevelBudget {
    fn default() -> Self {
        LevelBudget {
            max_denominator_bits: 1024,
            max_atoms: 1 << 20,
        }
    }
}

/// `mu_n = delta_{P_1^{-1} B_{w_1}} * ... * delta_{P_n^{-1} B_{w_n}}` with
/// `P_k = N_{w_1}^{n_1} ... N_{w_k}^{n_k}`.
pub fn finite_level(spec: &ConvolutionSpec, n: usize, budget: LevelBudget) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::InvalidInput("finite level needs n >= 1".into()));
    }
    let mut atom_bound: usize = 1;
    let mut scale = BigInt::one();
    for k in 1..=n {
        scale *= spec.effective_scale_big(k);
        atom_bound = atom_bound.saturating_mul(spec.digits_at(k).len());
        if scale.bits() > budget.max_denominator_bits {
            return Err(Error::DepthTooLarge {
                depth: n,
                reason: format!(
                    "denominator needs {} bits, budget is {}",
                    scale.bits(),
                    budget.max_denominator_bits
                ),
            });
        }
    }
    if atom_bound > budget.max_atoms {
        return Err(Error::DepthTooLarge {
            depth: n,
            reason: format!("up to {atom_bound} atoms, budget is {}", budget.max_atoms),
        });
    }

    let mut scale = BigInt::one();
    let mut measure = DiscreteMeasure::dirac(BigRational::zero());
    for k in 1..=n {
        scale *= spec.effective_scale_big(k);
        measure = measure.convolve(&scaled_digits(spec.digits_at(k), &scale));
    }
    Ok(measure)
}

/// `delta_{B / scale}`.
pub(crate) fn scaled_digits(digits: &[i64], scale: &BigInt) -> DiscreteMeasure {
    let w = BigRational::new(BigInt::one(), BigInt::from(digits.len()));
    let atoms = digits
        .iter()
        .map(|&b| (BigRational::new(BigInt::from(b), scale.clone()), w.clone()))
        .collect();
    DiscreteMeasure { atoms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::SelectionWord;
    use crate::triples::HadamardTriple;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn jp() -> ConvolutionSpec {
        ConvolutionSpec::single(HadamardTriple::new(4, vec![0, 2], vec![0, 1]).unwrap())
    }

    #[test]
    fn jp_levels_by_enumeration() {
        let m1 = finite_level(&jp(), 1, LevelBudget::default()).unwrap();
        let expect1 = DiscreteMeasure::new([(q(0, 1), q(1, 2)), (q(1, 2), q(1, 2))]).unwrap();
        assert_eq!(m1, expect1);

        let m2 = finite_level(&jp(), 2, LevelBudget::default()).unwrap();
        let expect2 = DiscreteMeasure::uniform([q(0, 1), q(1, 8), q(1, 2), q(5, 8)]).unwrap();
        assert_eq!(m2, expect2);
    }

    #[test]
    fn level_zero_is_rejected() {
        assert!(finite_level(&jp(), 0, LevelBudget::default()).is_err());
    }

    #[test]
    fn budgets() {
        let tight = LevelBudget {
            max_denominator_bits: 10,
            max_atoms: 1 << 20,
        };
        assert!(matches!(finite_level(&jp(), 6, tight), Err(Error::DepthTooLarge { .. })));
        let few = LevelBudget {
            max_denominator_bits: 1024,
            max_atoms: 8,
        };
        assert!(finite_level(&jp(), 3, few).is_ok());
        assert!(matches!(finite_level(&jp(), 4, few), Err(Error::DepthTooLarge { .. })));
    }

    #[test]
    fn convolution_examples() {
        let a = DiscreteMeasure::uniform([q(0, 1), q(1, 2)]).unwrap();
        let b = DiscreteMeasure::uniform([q(0, 1), q(1, 8)]).unwrap();
        let c = a.convolve(&b);
        assert_eq!(c, DiscreteMeasure::uniform([q(0, 1), q(1, 8), q(1, 2), q(5, 8)]).unwrap());
        assert_eq!(DiscreteMeasure::dirac(q(0, 1)).convolve(&a), a);
        assert!(c.total_mass().is_one());
    }

    #[test]
    fn colliding_atoms_merge() {
        let a = DiscreteMeasure::uniform([q(0, 1), q(1, 1)]).unwrap();
        let c = a.convolve(&a);
        assert_eq!(c.len(), 3);
        assert_eq!(c.cdf(&q(1, 1)), q(3, 4));
    }

    #[test]
    fn invalid_measures() {
        assert!(DiscreteMeasure::new([(q(0, 1), q(1, 2))]).is_err());
        assert!(DiscreteMeasure::new([(q(0, 1), q(3, 2)), (q(1, 1), q(-1, 2))]).is_err());
    }

    #[test]
    fn cdf_basics() {
        let m = finite_level(&jp(), 2, LevelBudget::default()).unwrap();
        assert!(m.cdf(&q(-1, 1)).is_zero());
        assert_eq!(m.cdf(&q(1, 8)), q(1, 2));
        assert!(m.cdf(m.max_position().unwrap()).is_one());
    }

    #[test]
    fn example14_atoms_stay_in_support() {
        let spec = ConvolutionSpec::new(
            vec![
                HadamardTriple::new(2, vec![0, 1], vec![0, 1]).unwrap(),
                HadamardTriple::new(2, vec![0, 3], vec![0, 1]).unwrap(),
            ],
            SelectionWord::new(vec![1], vec![2]),
        )
        .unwrap();
        let m = finite_level(&spec, 6, LevelBudget::default()).unwrap();
        assert!(*m.min_position().unwrap() >= q(0, 1));
        assert!(*m.max_position().unwrap() <= q(3, 1));
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&q(1, 8)), "0.125");
        assert_eq!(format_rational(&q(-5, 8)), "-0.625");
        assert_eq!(format_rational(&q(3, 1)), "3");
        assert_eq!(format_rational(&q(1, 20)), "0.05");
        assert_eq!(format_rational(&q(1, 3)), "1/3");
        assert_eq!(format_rational(&q(-7, 6)), "-7/6");
    }

    #[test]
    fn csv_export() {
        let m = finite_level(&jp(), 1, LevelBudget::default()).unwrap();
        assert_eq!(m.to_csv(), "position,weight\n0,0.5\n0.5,0.5\n");
    }
}
