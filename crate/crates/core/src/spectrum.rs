//! Inductive construction of finite spectrum levels `Lambda_0 ⊆ Lambda_1 ⊆ ...`.
//!
//! With block triples `(N_{p,q}, B_{p,q}, L_{p,q})` composed from the effective
//! triples `p+1, ..., q`, each step picks an index `m_i` large enough that
//! `Lambda_{i-1}` is tiny at scale `N_{0,m_i}`, then sets
//!
//! ```text
//! Lambda_i = Lambda_{i-1} + N_{0,m_{i-1}} { l + k_l N_{m_{i-1},m_i} : l in L_{m_{i-1},m_i} }
//! ```
//!
//! where the integer shift `k_l` keeps the tail transform `nu_{>m_i}` bounded
//! away from zero near `l / N_{m_{i-1},m_i} + k_l`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::{ConvolutionSpec, DEFAULT_DEPTH};
use crate::equipos::{TailProbe, DEFAULT_KMAX};
use crate::error::{Error, Result};
use crate::triples::{compose_triples, difference_gcd, HadamardTriple};

pub const DEFAULT_DELTA: f64 = 0.2;
pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_HORIZON: usize = 64;

/// `(N_{p,q}, B_{p,q}, L_{p,q})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeBlocks {
    pub p: usize,
    pub q: usize,
    #[serde(rename = "N")]
    pub big_n: i64,
    #[serde(rename = "B")]
    pub big_b: Vec<i64>,
    #[serde(rename = "L")]
    pub big_l: Vec<i64>,
}

impl CompositeBlocks {
    pub fn triple(&self) -> HadamardTriple {
        HadamardTriple::new(self.big_n, self.big_b.clone(), self.big_l.clone())
            .expect("composite of Hadamard triples is Hadamard")
    }
}

/// Composite block of the effective triples `p+1, ..., q`.
pub fn block_frequencies(spec: &ConvolutionSpec, p: usize, q: usize) -> Result<CompositeBlocks> {
    if p >= q {
        return Err(Error::InvalidRange { p, q });
    }
    let triples = (p + 1..=q)
        .map(|k| spec.effective_triple(k))
        .collect::<Result<Vec<_>>>()?;
    let t = compose_triples(&triples)?;
    Ok(CompositeBlocks {
        p,
        q,
        big_n: t.scale(),
        big_b: t.digits().to_vec(),
        big_l: t.frequencies().to_vec(),
    })
}

/// `N_{0,m}` exactly, or an overflow error.
pub fn cumulative_scale(spec: &ConvolutionSpec, m: usize) -> Result<i64> {
    (1..=m).try_fold(1i64, |acc, k| {
        let t = spec.triple_at(k);
        t.scale()
            .checked_pow(spec.word().exponent(k))
            .and_then(|s| acc.checked_mul(s))
            .ok_or(Error::Overflow("accumulating scales"))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumParams {
    pub delta: f64,
    pub epsilon: f64,
    pub kmax: i64,
    pub depth: usize,
    /// Admissible indices `n_1 < n_2 < ...`; all positive integers when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsequence: Option<Vec<usize>>,
    /// Largest index considered when no explicit subsequence is given.
    pub horizon: usize,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        SpectrumParams {
            delta: DEFAULT_DELTA,
            epsilon: DEFAULT_EPSILON,
            kmax: DEFAULT_KMAX,
            depth: DEFAULT_DEPTH,
            subsequence: None,
            horizon: DEFAULT_HORIZON,
        }
    }
}

impl SpectrumParams {
    fn candidates_after(&self, previous: usize) -> Vec<usize> {
        match &self.subsequence {
            Some(list) => list.iter().copied().filter(|&m| m > previous).collect(),
            None => (previous + 1..=self.horizon.max(previous)).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) || !(self.epsilon > 0.0) {
            return Err(Error::InvalidInput("delta and epsilon must be positive".into()));
        }
        if self.kmax < 0 || self.depth == 0 {
            return Err(Error::InvalidInput("K must be nonnegative and depth positive".into()));
        }
        if let Some(list) = &self.subsequence {
            if list.is_empty() || list.contains(&0) || list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInput(
                    "the subsequence must be strictly increasing positive integers".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Shift chosen for one block frequency at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftRecord {
    pub level: usize,
    pub lambda: i64,
    pub x: f64,
    pub k: i64,
    /// Minimum of `|nu_hat_{>m_i}|` over `|y| <= delta` around `x + k_x`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLevels {
    /// `Lambda_0 = {0}, Lambda_1, ...`, each sorted.
    pub levels: Vec<Vec<i64>>,
    /// `m_0 = 0, m_1, ...`.
    pub indices: Vec<usize>,
    pub shifts: Vec<ShiftRecord>,
    pub delta_used: f64,
    pub epsilon_used: f64,
    pub kmax: i64,
    pub depth: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl SpectrumLevels {
    pub fn initial(params: &SpectrumParams) -> Self {
        SpectrumLevels {
            levels: vec![vec![0]],
            indices: vec![0],
            shifts: Vec::new(),
            delta_used: params.delta,
            epsilon_used: params.epsilon,
            kmax: params.kmax,
            depth: params.depth,
            warnings: Vec::new(),
        }
    }

    /// Number of constructed levels, not counting `Lambda_0`.
    pub fn count(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, i: usize) -> &[i64] {
        &self.levels[i]
    }

    pub fn index(&self, i: usize) -> usize {
        self.indices[i]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let levels: SpectrumLevels = serde_json::from_str(text)?;
        levels.check_shape()?;
        Ok(levels)
    }

    fn check_shape(&self) -> Result<()> {
        if self.levels.is_empty() || self.levels.len() != self.indices.len() {
            return Err(Error::InvalidInput(
                "levels and indices must be nonempty and of equal length".into(),
            ));
        }
        if self.indices[0] != 0 || self.indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("indices must start at 0 and increase".into()));
        }
        Ok(())
    }
}

/// Adds the next level to `state`.
pub fn next_level(spec: &ConvolutionSpec, state: &SpectrumLevels, params: &SpectrumParams) -> Result<SpectrumLevels> {
    params.validate()?;
    state.check_shape()?;
    let level = state.levels.len();
    let previous = *state.indices.last().unwrap();
    let lambda_prev = state.levels.last().unwrap();
    let reach = lambda_prev.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0) as f64;

    let mut chosen = None;
    for m in params.candidates_after(previous) {
        let scale = cumulative_scale(spec, m)?;
        if reach / (scale.unsigned_abs() as f64) < 0.5 * params.delta {
            chosen = Some(m);
            break;
        }
    }
    let horizon = params
        .subsequence
        .as_ref()
        .and_then(|s| s.last().copied())
        .unwrap_or(params.horizon);
    let m = chosen.ok_or(Error::HorizonExhausted { previous, horizon })?;

    let block = block_frequencies(spec, previous, m)?;
    let outer = cumulative_scale(spec, previous)?;
    let mut records = Vec::new();
    let shifted: Vec<i64> = if level == 1 {
        block.big_l.clone()
    } else {
        let tail = spec.tail(m);
        let choices: Vec<(i64, f64, i64, f64)> = block
            .big_l
            .par_iter()
            .map(|&lambda| {
                let q = Integer::div_floor(&lambda, &block.big_n);
                let rem = lambda - q * block.big_n;
                let x = rem as f64 / block.big_n as f64;
                let c = TailProbe::new(&tail, params.depth).choose(x, params.delta, params.kmax);
                (lambda, x, c.k - q, c.value)
            })
            .collect();
        let mut out = Vec::with_capacity(choices.len());
        for (lambda, x, k, value) in choices {
            if value < params.epsilon {
                return Err(Error::EquiPositivityViolation {
                    level,
                    index: m,
                    lambda,
                    x,
                    value,
                    epsilon: params.epsilon,
                });
            }
            records.push(ShiftRecord {
                level,
                lambda,
                x,
                k,
                value,
            });
            let moved = k
                .checked_mul(block.big_n)
                .and_then(|v| v.checked_add(lambda))
                .ok_or(Error::Overflow("shifting block frequencies"))?;
            out.push(moved);
        }
        out
    };

    let mut next = Vec::with_capacity(lambda_prev.len() * shifted.len());
    for &a in lambda_prev {
        for &s in &shifted {
            let v = s
                .checked_mul(outer)
                .and_then(|v| v.checked_add(a))
                .ok_or(Error::Overflow("building a level"))?;
            next.push(v);
        }
    }
    next.sort_unstable();

    let mut out = state.clone();
    out.levels.push(next);
    out.indices.push(m);
    out.shifts.extend(records);
    Ok(out)
}

/// Builds `Lambda_1, ..., Lambda_depth_i` after normalizing every frequency
/// set into `{0, ..., |N|-1}` with 0 included.
pub fn build_spectrum(spec: &ConvolutionSpec, depth_i: usize, params: &SpectrumParams) -> Result<SpectrumLevels> {
    if depth_i == 0 {
        return Err(Error::InvalidInput("at least one level is required".into()));
    }
    let spec = spec.normalized();
    let mut state = SpectrumLevels::initial(params);
    if let GcdCertificate {
        certified: false,
        gcds,
        offending,
    } = certify_gcd_condition(spec.family())
    {
        for j in offending {
            state.warnings.push(format!(
                "gcd(B_{j} - B_{j}) = {} != 1; spectrality is not certified by the gcd condition",
                gcds[j - 1]
            ));
        }
    }
    for _ in 0..depth_i {
        state = next_level(&spec, &state, params)?;
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdCertificate {
    pub certified: bool,
    /// `gcd(B_j - B_j)` for every family member.
    pub gcds: Vec<u64>,
    /// 1-based indices `j` with `gcd(B_j - B_j) != 1`.
    pub offending: Vec<usize>,
}

/// Certified when every digit set has difference gcd 1; then the measure is
/// spectral for every word and exponent sequence. Failing the condition does
/// not rule spectrality out (the single-triple case `(4, {0,2})` is spectral).
pub fn certify_gcd_condition(family: &[HadamardTriple]) -> GcdCertificate {
    let gcds: Vec<u64> = family.iter().map(|t| difference_gcd(t.digits())).collect();
    let offending: Vec<usize> = gcds
        .iter()
        .enumerate()
        .filter(|(_, &g)| g != 1)
        .map(|(j, _)| j + 1)
        .collect();
    GcdCertificate {
        certified: offending.is_empty(),
        gcds,
        offending,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::SelectionWord;

    fn jp() -> ConvolutionSpec {
        ConvolutionSpec::single(HadamardTriple::new(4, vec![0, 2], vec![0, 1]).unwrap())
    }

    fn mixed() -> ConvolutionSpec {
        ConvolutionSpec::new(
            vec![
                HadamardTriple::new(2, vec![0, 1], vec![0, 1]).unwrap(),
                HadamardTriple::new(3, vec![0, 1, 2], vec![0, 1, 2]).unwrap(),
            ],
            SelectionWord::new(vec![], vec![1, 2]),
        )
        .unwrap()
    }

    fn example14(word: SelectionWord) -> ConvolutionSpec {
        ConvolutionSpec::new(
            vec![
                HadamardTriple::new(2, vec![0, 1], vec![0, 1]).unwrap(),
                HadamardTriple::new(2, vec![0, 3], vec![0, 1]).unwrap(),
            ],
            word,
        )
        .unwrap()
    }

    #[test]
    fn blocks() {
        let b = block_frequencies(&jp(), 0, 2).unwrap();
        assert_eq!((b.big_n, b.big_l.clone()), (16, vec![0, 1, 4, 5]));
        b.triple();
        let b = block_frequencies(&jp(), 0, 1).unwrap();
        assert_eq!((b.big_n, b.big_l), (4, vec![0, 1]));
        let b = block_frequencies(&mixed(), 0, 2).unwrap();
        assert_eq!((b.big_n, b.big_l.clone()), (6, vec![0, 1, 2, 3, 4, 5]));
        b.triple();
        assert!(matches!(block_frequencies(&jp(), 2, 2), Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn jp_levels() {
        let s = build_spectrum(&jp(), 3, &SpectrumParams::default()).unwrap();
        assert_eq!(s.indices, vec![0, 1, 2, 3]);
        assert_eq!(s.levels[1], vec![0, 1]);
        assert_eq!(s.levels[2], vec![0, 1, 4, 5]);
        assert_eq!(s.levels[3], vec![0, 1, 4, 5, 16, 17, 20, 21]);
        assert!(s.shifts.iter().all(|r| r.k == 0));
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn mixed_levels() {
        let s = build_spectrum(&mixed(), 3, &SpectrumParams::default()).unwrap();
        assert_eq!(s.indices[..3], [0, 1, 3]);
        for i in 1..=3 {
            let expected: usize = (1..=s.indices[i]).map(|k| mixed().triple_at(k).size()).product();
            assert_eq!(s.levels[i].len(), expected);
            assert!(s.levels[i].contains(&0));
            assert!(s.levels[i - 1].iter().all(|l| s.levels[i].binary_search(l).is_ok()));
        }
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn uniform_tail_violates_equipositivity() {
        for word in [SelectionWord::constant(2), SelectionWord::new(vec![1], vec![2])] {
            let err = build_spectrum(&example14(word), 3, &SpectrumParams::default()).unwrap_err();
            assert!(matches!(err, Error::EquiPositivityViolation { level: 2, .. }), "{err}");
        }
    }

    #[test]
    fn explicit_subsequence_and_horizon() {
        let p = SpectrumParams {
            subsequence: Some(vec![2, 4, 6]),
            ..SpectrumParams::default()
        };
        let s = build_spectrum(&jp(), 2, &p).unwrap();
        assert_eq!(s.indices, vec![0, 2, 4]);
        assert_eq!(s.levels[1], vec![0, 1, 4, 5]);
        assert!(matches!(
            build_spectrum(&jp(), 4, &p),
            Err(Error::HorizonExhausted { previous: 6, .. })
        ));
    }

    #[test]
    fn gcd_certificates() {
        let m = certify_gcd_condition(mixed().family());
        assert!(m.certified);
        let e = certify_gcd_condition(example14(SelectionWord::constant(1)).family());
        assert_eq!((e.certified, e.offending.clone(), e.gcds[1]), (false, vec![2], 3));
        let j = certify_gcd_condition(jp().family());
        assert_eq!((j.certified, j.offending), (false, vec![1]));
    }

    #[test]
    fn json_round_trip() {
        let s = build_spectrum(&jp(), 2, &SpectrumParams::default()).unwrap();
        let back = SpectrumLevels::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(build_spectrum(&jp(), 0, &SpectrumParams::default()).is_err());
    }
}
