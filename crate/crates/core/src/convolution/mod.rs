//! Infinite convolutions `mu_{w,{n_k}}` of scaled uniform digit measures.
//!
//! Factor `k` (1-based) of a [`ConvolutionSpec`] uses the triple selected by
//! symbol `w_k` raised to the exponent `n_k`; its atoms sit at
//! `B_{w_k} / (N_{w_1}^{n_1} ... N_{w_k}^{n_k})`. Both the word and the
//! exponent sequence are eventually periodic.

mod fourier;
mod measure;

pub use fourier::{
    fourier_finite, fourier_tail, mask, mask_derivative, tail_support_radius, tail_truncation_bound,
    FactorSchedule, TailValue, DEFAULT_DEPTH,
};
pub use measure::{finite_level, format_rational, DiscreteMeasure, LevelBudget};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triples::HadamardTriple;

/// Eventually periodic word over `{1..m}` with an eventually periodic
/// exponent sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionWord {
    #[serde(default)]
    pub prefix: Vec<usize>,
    pub period: Vec<usize>,
    #[serde(default)]
    pub exp_prefix: Vec<u32>,
    #[serde(default = "unit_period")]
    pub exp_period: Vec<u32>,
}

fn unit_period() -> Vec<u32> {
    vec![1]
}

fn eventually_periodic<T: Copy>(prefix: &[T], period: &[T], k: usize) -> T {
    debug_assert!(k >= 1);
    let i = k - 1;
    if i < prefix.len() {
        prefix[i]
    } else {
        period[(i - prefix.len()) % period.len()]
    }
}

impl SelectionWord {
    /// Word with every exponent equal to 1.
    pub fn new(prefix: Vec<usize>, period: Vec<usize>) -> Self {
        SelectionWord {
            prefix,
            period,
            exp_prefix: Vec::new(),
            exp_period: unit_period(),
        }
    }

    /// The constant word `j j j ...`.
    pub fn constant(symbol: usize) -> Self {
        Self::new(Vec::new(), vec![symbol])
    }

    pub fn with_exponents(mut self, exp_prefix: Vec<u32>, exp_period: Vec<u32>) -> Self {
        self.exp_prefix = exp_prefix;
        self.exp_period = exp_period;
        self
    }

    /// Symbol `w_k`, `k >= 1`.
    pub fn symbol(&self, k: usize) -> usize {
        eventually_periodic(&self.prefix, &self.period, k)
    }

    /// Exponent `n_k`, `k >= 1`.
    pub fn exponent(&self, k: usize) -> u32 {
        eventually_periodic(&self.exp_prefix, &self.exp_period, k)
    }

    /// Parses `"prefix:period"` (for example `"1:2"` is `1 2 2 2 ...`). Without
    /// a colon the whole string is the period. Symbols are single digits, or
    /// comma separated when any comma is present.
    pub fn parse_symbols(text: &str) -> Result<(Vec<usize>, Vec<usize>)> {
        let (prefix, period) = match text.split_once(':') {
            Some((a, b)) => (a, b),
            None => ("", text),
        };
        let commas = text.contains(',');
        let prefix = parse_list(prefix, commas)?;
        let period = parse_list(period, commas)?;
        if period.is_empty() {
            return Err(Error::InvalidInput(format!("word {text:?} has an empty period")));
        }
        Ok((prefix, period))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (prefix, period) = Self::parse_symbols(text)?;
        Ok(Self::new(prefix, period))
    }

    pub fn validate(&self, alphabet: usize) -> Result<()> {
        if self.period.is_empty() {
            return Err(Error::InvalidInput("word period must be nonempty".into()));
        }
        if self.exp_period.is_empty() {
            return Err(Error::InvalidInput("exponent period must be nonempty".into()));
        }
        if let Some(&s) = self
            .prefix
            .iter()
            .chain(&self.period)
            .find(|&&s| s == 0 || s > alphabet)
        {
            return Err(Error::InvalidInput(format!(
                "symbol {s} outside the family range 1..={alphabet}"
            )));
        }
        if self.exp_prefix.iter().chain(&self.exp_period).any(|&n| n == 0) {
            return Err(Error::InvalidInput("exponents must be at least 1".into()));
        }
        Ok(())
    }
}

fn parse_list(text: &str, commas: bool) -> Result<Vec<usize>> {
    let text = text.trim().trim_end_matches(['…', '.']);
    let bad = |t: &str| Error::InvalidInput(format!("cannot parse word symbols {t:?}"));
    if text.is_empty() {
        Ok(Vec::new())
    } else if commas {
        text.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad(text)))
            .collect()
    } else {
        text.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| bad(text)))
            .collect()
    }
}

/// A family of Hadamard triples together with the word selecting them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct ConvolutionSpec {
    family: Vec<HadamardTriple>,
    word: SelectionWord,
}

#[derive(Deserialize)]
struct RawSpec {
    family: Vec<HadamardTriple>,
    word: SelectionWord,
}

impl TryFrom<RawSpec> for ConvolutionSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        ConvolutionSpec::new(raw.family, raw.word)
    }
}

impl ConvolutionSpec {
    pub fn new(family: Vec<HadamardTriple>, word: SelectionWord) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::InvalidInput("the triple family is empty".into()));
        }
        word.validate(family.len())?;
        Ok(ConvolutionSpec { family, word })
    }

    /// The self-similar case: one triple, every exponent 1.
    pub fn single(triple: HadamardTriple) -> Self {
        ConvolutionSpec {
            family: vec![triple],
            word: SelectionWord::constant(1),
        }
    }

    pub fn family(&self) -> &[HadamardTriple] {
        &self.family
    }

    pub fn word(&self) -> &SelectionWord {
        &self.word
    }

    /// Triple used by factor `k >= 1`.
    pub fn triple_at(&self, k: usize) -> &HadamardTriple {
        &self.family[self.word.symbol(k) - 1]
    }

    pub fn digits_at(&self, k: usize) -> &[i64] {
        self.triple_at(k).digits()
    }

    /// `N_{w_k}^{n_k}` as a float (may be infinite for huge exponents).
    pub fn effective_scale_f64(&self, k: usize) -> f64 {
        (self.triple_at(k).scale() as f64).powi(self.word.exponent(k) as i32)
    }

    /// `N_{w_k}^{n_k}` exactly.
    pub fn effective_scale_big(&self, k: usize) -> BigInt {
        num_traits::pow(BigInt::from(self.triple_at(k).scale()), self.word.exponent(k) as usize)
    }

    /// `(N^{n_k}, B, N^{n_k - 1} L)` for factor `k`; this is the triple the
    /// spectrum construction works with.
    pub fn effective_triple(&self, k: usize) -> Result<HadamardTriple> {
        let t = self.triple_at(k);
        let n = self.word.exponent(k);
        let lift = t
            .scale()
            .checked_pow(n - 1)
            .ok_or(Error::Overflow("raising a scale to its exponent"))?;
        let scale = lift
            .checked_mul(t.scale())
            .ok_or(Error::Overflow("raising a scale to its exponent"))?;
        let frequencies = t
            .frequencies()
            .iter()
            .map(|l| l.checked_mul(lift))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::Overflow("lifting frequencies"))?;
        HadamardTriple::new(scale, t.digits().to_vec(), frequencies)
    }

    /// Largest `|b|` over the whole family.
    pub fn max_abs_digit(&self) -> i64 {
        self.family.iter().map(HadamardTriple::max_abs_digit).max().unwrap_or(0)
    }

    /// Same measure, frequencies reduced modulo `N` and translated to contain 0.
    pub fn normalized(&self) -> ConvolutionSpec {
        ConvolutionSpec {
            family: self.family.iter().map(HadamardTriple::normalized).collect(),
            word: self.word.clone(),
        }
    }

    /// The same family driven by a different word.
    pub fn with_word(&self, word: SelectionWord) -> Result<ConvolutionSpec> {
        ConvolutionSpec::new(self.family.clone(), word)
    }

    pub fn tail(&self, skip: usize) -> TailSpec {
        TailSpec {
            spec: self.clone(),
            skip,
        }
    }
}

/// `nu_{>n}`: the convolution with the first `skip` factors removed and the
/// remainder rescaled by `N_{w_1}^{n_1} ... N_{w_n}^{n_n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailSpec {
    pub spec: ConvolutionSpec,
    pub skip: usize,
}

/// `h = 1 + max |b|` over the family. Level measures live in `[-(h-1), h-1]`
/// and the tail after `n` factors in `[-2^{-n} h, 2^{-n} h]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportBound {
    pub h: f64,
}

impl SupportBound {
    pub fn level_radius(&self) -> f64 {
        self.h - 1.0
    }

    pub fn tail_radius(&self, n: usize) -> f64 {
        self.h * 0.5f64.powi(n as i32)
    }
}

pub fn support_bound(spec: &ConvolutionSpec) -> SupportBound {
    SupportBound {
        h: 1.0 + spec.max_abs_digit() as f64,
    }
}
