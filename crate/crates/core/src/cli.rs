//! Command-line front end: config ingestion, presets, and report emission.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure, 3 config or
//! I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::convolution::{ConvolutionSpec, SelectionWord, DEFAULT_DEPTH};
use crate::equipos::{probe_family, ProbeParams, DEFAULT_GRID as PROBE_GRID, DEFAULT_KMAX, DEFAULT_THRESHOLD};
use crate::error::Error;
use crate::spectrum::{build_spectrum, SpectrumLevels, SpectrumParams, DEFAULT_DELTA, DEFAULT_EPSILON};
use crate::triples::{difference_gcd, verify_triple, HadamardTriple, RawTriple, DEFAULT_TOL};
use crate::verify::{spectral_report, QReport, DEFAULT_DEPTH as Q_DEPTH, DEFAULT_GRID as Q_GRID};
use crate::zeros::{
    enumerate_zero_products, integral_periodic_zero_probe, mask_zeros, ProbeVerdict, DEFAULT_PROBE_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// Input file schema. Triples are kept unvalidated so `check` can report on
/// them; parameters are optional and overridden by flags.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub triples: Vec<RawTriple>,
    /// `"prefix:period"`, e.g. `"1:2"`; cycles through the family when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skips: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// (4, {0,2}, {0,1}).
    Jp,
    /// (2, {0,1}, {0,1}) and (2, {0,3}, {0,1}) with word 1 2 2 2 ...
    Example14,
    /// (2, {0,1}, {0,1}) and (3, {0,1,2}, {0,1,2}) with word 1 2 1 2 ...
    Mixed,
}

impl Preset {
    pub fn config(self) -> RunConfig {
        let t = |n: i64, b: &[i64], l: &[i64]| RawTriple {
            scale: n,
            digits: b.to_vec(),
            frequencies: l.to_vec(),
        };
        let (triples, word) = match self {
            Preset::Jp => (vec![t(4, &[0, 2], &[0, 1])], "1"),
            Preset::Example14 => (vec![t(2, &[0, 1], &[0, 1]), t(2, &[0, 3], &[0, 1])], "1:2"),
            Preset::Mixed => (vec![t(2, &[0, 1], &[0, 1]), t(3, &[0, 1, 2], &[0, 1, 2])], "12"),
        };
        RunConfig {
            triples,
            word: Some(word.into()),
            ..RunConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hadspec", version, about = "Spectra of infinite convolutions built from Hadamard triples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON config file with `triples`, `word`, `exponents` and parameters.
    #[arg(long, global = true, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub preset: Option<Preset>,
    /// Selection word as `prefix:period`, e.g. `1:2`.
    #[arg(long, global = true)]
    pub word: Option<String>,
    /// Exponent sequence as `prefix:period`.
    #[arg(long, global = true)]
    pub exponents: Option<String>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub output: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate every triple and the gcd condition.
    Check {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Build spectrum levels.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        build: BuildArgs,
    },
    /// Check completeness of spectrum levels.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        build: BuildArgs,
        /// Levels JSON produced by `spectrum`; built on the fly when absent.
        #[arg(long)]
        levels_file: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
        /// Truncation depth for Q.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Zeros of a mask, or zero products and zero-set probes of a family.
    Zeros {
        #[command(flatten)]
        common: CommonArgs,
        /// Digit set, e.g. `0,2`.
        #[arg(long, allow_hyphen_values = true)]
        mask: Option<String>,
        /// Interval `lo,hi` for `--mask`.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        /// Half-width `h` of the window for zero products.
        #[arg(long)]
        half_width: Option<f64>,
        /// Points to probe for membership in the integral periodic zero set.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        probe: Vec<f64>,
        #[arg(long)]
        kmax: Option<i64>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Numeric equi-positivity probe of the tails of a convolution.
    Equipos {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        kmax: Option<i64>,
        #[arg(long)]
        depth: Option<usize>,
        /// Failure threshold.
        #[arg(long)]
        tol: Option<f64>,
        /// Tail skips, e.g. `0,1,2,3,4`.
        #[arg(long, value_delimiter = ',')]
        skips: Vec<usize>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    /// Number of levels to construct.
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub kmax: Option<i64>,
    /// Truncation depth of the tail probes.
    #[arg(long)]
    pub probe_depth: Option<usize>,
    /// Admissible indices m_1 < m_2 < ..., e.g. `2,4,6`.
    #[arg(long, value_delimiter = ',')]
    pub subsequence: Vec<usize>,
}

/// Failure carrying an exit code and a message for stderr.
#[derive(Debug)]
struct Exit {
    code: i32,
    message: String,
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EquiPositivityViolation { .. } | Error::HorizonExhausted { .. } => EXIT_FAILURE,
            _ => EXIT_CONFIG,
        };
        Exit {
            code,
            message: e.to_string(),
        }
    }
}

fn config_error(message: impl Into<String>) -> Exit {
    Exit {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

struct Emitter<'a> {
    out: &'a mut dyn Write,
    format: OutputFormat,
    path: Option<PathBuf>,
}

impl Emitter<'_> {
    fn emit<T: Serialize>(&mut self, value: &T, csv: impl FnOnce() -> String) -> Result<(), Exit> {
        let text = match self.format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(value).map_err(|e| config_error(e.to_string()))?;
                s.push('\n');
                s
            }
            OutputFormat::Csv => csv(),
        };
        match &self.path {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| config_error(format!("cannot write {}: {e}", p.display()))),
            None => self
                .out
                .write_all(text.as_bytes())
                .map_err(|e| config_error(format!("cannot write output: {e}"))),
        }
    }
}

fn read_config(common: &CommonArgs) -> Result<Option<RunConfig>, Exit> {
    if let Some(preset) = common.preset {
        return Ok(Some(preset.config()));
    }
    let Some(path) = &common.config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| config_error(format!("invalid config {}: {e}", path.display())))
}

fn require_config(common: &CommonArgs) -> Result<RunConfig, Exit> {
    read_config(common)?.ok_or_else(|| config_error("no family given; use --config or --preset"))
}

fn parse_word(text: &str) -> Result<(Vec<usize>, Vec<usize>), Exit> {
    SelectionWord::parse_symbols(text).map_err(Exit::from)
}

fn parse_exponents(text: &str) -> Result<(Vec<u32>, Vec<u32>), Exit> {
    let (a, b) = parse_word(text)?;
    let cast = |v: Vec<usize>| {
        v.into_iter()
            .map(|n| u32::try_from(n).map_err(|_| config_error(format!("exponent {n} is too large"))))
            .collect::<Result<Vec<u32>, Exit>>()
    };
    Ok((cast(a)?, cast(b)?))
}

fn build_word(config: &RunConfig, common: &CommonArgs) -> Result<SelectionWord, Exit> {
    let word = common.word.as_deref().or(config.word.as_deref());
    let mut w = match word {
        Some(text) => {
            let (prefix, period) = parse_word(text)?;
            SelectionWord::new(prefix, period)
        }
        None => SelectionWord::new(vec![], (1..=config.triples.len()).collect()),
    };
    if let Some(text) = common.exponents.as_deref().or(config.exponents.as_deref()) {
        let (prefix, period) = parse_exponents(text)?;
        w = w.with_exponents(prefix, period);
    }
    Ok(w)
}

fn build_spec(config: &RunConfig, common: &CommonArgs) -> Result<ConvolutionSpec, Exit> {
    let family = config
        .triples
        .iter()
        .cloned()
        .map(HadamardTriple::try_from)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConvolutionSpec::new(family, build_word(config, common)?)?)
}

fn pick<T: Copy>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

fn spectrum_params(config: &RunConfig, build: &BuildArgs) -> SpectrumParams {
    SpectrumParams {
        delta: pick(build.delta, config.delta, DEFAULT_DELTA),
        epsilon: pick(build.epsilon, config.epsilon, DEFAULT_EPSILON),
        kmax: pick(build.kmax, config.kmax, DEFAULT_KMAX),
        depth: build.probe_depth.unwrap_or(DEFAULT_DEPTH),
        subsequence: (!build.subsequence.is_empty()).then(|| build.subsequence.clone()),
        ..SpectrumParams::default()
    }
}

#[derive(Serialize)]
struct TripleCheck {
    index: usize,
    #[serde(flatten)]
    triple: RawTriple,
    passed: bool,
    max_deviation: Option<f64>,
    failure: Option<String>,
    gcd: u64,
}

#[derive(Serialize)]
struct CheckReport {
    passed: bool,
    tol: f64,
    triples: Vec<TripleCheck>,
    gcd_certified: bool,
    gcd_offending: Vec<usize>,
    word_error: Option<String>,
    notes: Vec<String>,
}

fn cmd_check(common: &CommonArgs, tol: Option<f64>, emit: &mut Emitter, err: &mut dyn Write) -> Result<i32, Exit> {
    let config = require_config(common)?;
    if config.triples.is_empty() {
        return Err(config_error("the config lists no triples"));
    }
    let tol = pick(tol, config.tol, DEFAULT_TOL);
    let mut triples = Vec::new();
    for (i, t) in config.triples.iter().enumerate() {
        let report = verify_triple(t.scale, &t.digits, &t.frequencies, tol)?;
        triples.push(TripleCheck {
            index: i + 1,
            triple: t.clone(),
            passed: report.passed,
            max_deviation: report.max_deviation,
            failure: report.failure.map(|f| format!("{f:?}")),
            gcd: difference_gcd(&t.digits),
        });
    }
    let word_error = build_word(&config, common)
        .and_then(|w| w.validate(config.triples.len()).map_err(Exit::from))
        .err()
        .map(|e| e.message);
    let offending: Vec<usize> = triples.iter().filter(|t| t.gcd != 1).map(|t| t.index).collect();
    let mut notes = Vec::new();
    for t in &triples {
        if t.gcd != 1 {
            notes.push(format!("gcd(B_{0} - B_{0}) = {1}", t.index, t.gcd));
        }
    }
    if triples.len() == 1 && !offending.is_empty() {
        notes.push(
            "the gcd condition is sufficient, not necessary: single-triple self-similar measures such as (4,{0,2},{0,1}) can still be spectral".into(),
        );
    }
    let passed = triples.iter().all(|t| t.passed) && word_error.is_none();
    for n in &notes {
        let _ = writeln!(err, "note: {n}");
    }
    let report = CheckReport {
        passed,
        tol,
        gcd_certified: offending.is_empty(),
        gcd_offending: offending,
        triples,
        word_error,
        notes,
    };
    emit.emit(&report, || {
        let mut s = String::from("index,N,passed,max_deviation,gcd\n");
        for t in &report.triples {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                t.index,
                t.triple.scale,
                t.passed,
                t.max_deviation.map(|d| format!("{d:e}")).unwrap_or_default(),
                t.gcd
            ));
        }
        s
    })?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILURE })
}

#[derive(Serialize)]
struct Diagnostic {
    status: &'static str,
    message: String,
}

fn levels_csv(levels: &SpectrumLevels) -> String {
    let mut s = String::from("level,m,lambda\n");
    for (i, (level, m)) in levels.levels.iter().zip(&levels.indices).enumerate() {
        for l in level {
            s.push_str(&format!("{i},{m},{l}\n"));
        }
    }
    s
}

fn construct(config: &RunConfig, common: &CommonArgs, build: &BuildArgs, err: &mut dyn Write) -> Result<(ConvolutionSpec, Result<SpectrumLevels, Error>), Exit> {
    let levels = pick(build.levels, config.levels, 3);
    if levels == 0 {
        return Err(config_error("--levels must be at least 1"));
    }
    let spec = build_spec(config, common)?;
    let params = spectrum_params(config, build);
    let result = build_spectrum(&spec, levels, &params);
    if let Ok(s) = &result {
        for w in &s.warnings {
            let _ = writeln!(err, "warning: {w}");
        }
    }
    Ok((spec, result))
}

fn cmd_spectrum(common: &CommonArgs, build: &BuildArgs, emit: &mut Emitter, err: &mut dyn Write) -> Result<i32, Exit> {
    if build.levels == Some(0) {
        return Err(config_error("--levels must be at least 1"));
    }
    let config = require_config(common)?;
    let (_, result) = construct(&config, common, build, err)?;
    match result {
        Ok(levels) => {
            emit.emit(&levels, || levels_csv(&levels))?;
            Ok(EXIT_OK)
        }
        Err(e @ (Error::EquiPositivityViolation { .. } | Error::HorizonExhausted { .. })) => {
            let status = if matches!(e, Error::HorizonExhausted { .. }) {
                "horizon-exhausted"
            } else {
                "equi-positivity-violation"
            };
            let d = Diagnostic {
                status,
                message: e.to_string(),
            };
            emit.emit(&d, || format!("status,message\n{},\"{}\"\n", d.status, d.message))?;
            Err(Exit::from(e))
        }
        Err(e) => Err(e.into()),
    }
}

fn read_levels(path: &Path) -> Result<SpectrumLevels, Exit> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    SpectrumLevels::from_json(&text).map_err(|e| config_error(format!("invalid levels file {}: {e}", path.display())))
}

fn cmd_verify(
    common: &CommonArgs,
    build: &BuildArgs,
    levels_file: Option<&Path>,
    grid: Option<usize>,
    depth: Option<usize>,
    emit: &mut Emitter,
    err: &mut dyn Write,
) -> Result<i32, Exit> {
    let config = require_config(common)?;
    let grid = pick(grid, config.grid, Q_GRID);
    let depth = pick(depth, config.depth, Q_DEPTH);
    let (spec, levels) = match levels_file {
        Some(p) => (build_spec(&config, common)?, Ok(read_levels(p)?)),
        None => construct(&config, common, build, err)?,
    };
    let report = match levels {
        Ok(levels) => {
            if let Some(&m) = levels.indices.last() {
                if depth < m {
                    return Err(config_error(format!("--depth {depth} is below the last index m = {m}")));
                }
            }
            spectral_report(&spec, &levels, grid, depth)?
        }
        Err(e @ (Error::EquiPositivityViolation { .. } | Error::HorizonExhausted { .. })) => {
            QReport::not_applicable(format!("construction failed: {e}"))
        }
        Err(e) => return Err(e.into()),
    };
    emit.emit(&report, || report.to_csv())?;
    if !report.passed() {
        let _ = writeln!(
            err,
            "verification {:?}: min Q = {:.6}, completeness defect = {:.3e}",
            report.status, report.min_q, report.completeness_defect
        );
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

fn parse_ints(text: &str) -> Result<Vec<i64>, Exit> {
    text.split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| config_error(format!("cannot parse integer list {text:?}"))))
        .collect()
}

fn parse_range(text: &str) -> Result<(f64, f64), Exit> {
    let parts: Vec<&str> = text.split(',').collect();
    let bad = || config_error(format!("range must look like lo,hi; got {text:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let lo = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
    let hi = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
    Ok((lo, hi))
}

#[derive(Serialize)]
struct ProbeEntry {
    xi: f64,
    #[serde(flatten)]
    verdict: ProbeVerdict,
}

#[derive(Serialize)]
struct FamilyZeros {
    products: crate::zeros::ZeroSetReport,
    probes: Vec<ProbeEntry>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_zeros(
    common: &CommonArgs,
    mask: Option<&str>,
    range: Option<&str>,
    half_width: Option<f64>,
    probe: &[f64],
    kmax: Option<i64>,
    depth: Option<usize>,
    tol: Option<f64>,
    emit: &mut Emitter,
) -> Result<i32, Exit> {
    if let Some(m) = mask {
        let digits = parse_ints(m)?;
        let (lo, hi) = match range {
            Some(r) => parse_range(r)?,
            None => (0.0, 1.0),
        };
        let report = mask_zeros(&digits, lo, hi)?;
        emit.emit(&report, || report.to_csv())?;
        return Ok(EXIT_OK);
    }
    let config = require_config(common)?;
    let spec = build_spec(&config, common)?;
    let h = match (half_width, range) {
        (Some(h), _) => h,
        (None, Some(r)) => {
            let (lo, hi) = parse_range(r)?;
            lo.abs().max(hi.abs())
        }
        (None, None) => 2.0,
    };
    let products = enumerate_zero_products(spec.family(), h)?;
    let kmax = pick(kmax, config.kmax, DEFAULT_KMAX);
    let depth = pick(depth, config.depth, DEFAULT_DEPTH);
    let tol = pick(tol, config.tol, DEFAULT_PROBE_TOL);
    let probes = probe
        .iter()
        .map(|&xi| ProbeEntry {
            xi,
            verdict: integral_periodic_zero_probe(&spec, xi, kmax, depth, tol),
        })
        .collect();
    let report = FamilyZeros { products, probes };
    emit.emit(&report, || report.products.to_csv())?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_equipos(
    common: &CommonArgs,
    grid: Option<usize>,
    kmax: Option<i64>,
    depth: Option<usize>,
    tol: Option<f64>,
    skips: &[usize],
    emit: &mut Emitter,
    err: &mut dyn Write,
) -> Result<i32, Exit> {
    let config = require_config(common)?;
    let spec = build_spec(&config, common)?;
    let params = ProbeParams {
        grid_n: pick(grid, config.grid, PROBE_GRID),
        kmax: pick(kmax, config.kmax, DEFAULT_KMAX),
        depth: pick(depth, config.depth, DEFAULT_DEPTH),
        threshold: pick(tol, config.tol, DEFAULT_THRESHOLD),
    };
    let skips: Vec<usize> = if !skips.is_empty() {
        skips.to_vec()
    } else {
        config.skips.clone().unwrap_or_else(|| (0..=4).collect())
    };
    let cert = probe_family(&spec, &skips, &params)?;
    emit.emit(&cert, || cert.to_csv())?;
    if cert.is_certified() {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(
            err,
            "equi-positivity probe failed: |nu_hat| = {:.3e} at x = {:.6} for the tail after {} factors",
            cert.worst.value, cert.worst.x, cert.worst.skip
        );
        Ok(EXIT_FAILURE)
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Exit> {
    let common = match &cli.command {
        Command::Check { common, .. }
        | Command::Spectrum { common, .. }
        | Command::Verify { common, .. }
        | Command::Zeros { common, .. }
        | Command::Equipos { common, .. } => common.clone(),
    };
    let mut emit = Emitter {
        out,
        format: common.output,
        path: common.out.clone(),
    };
    match &cli.command {
        Command::Check { tol, .. } => cmd_check(&common, *tol, &mut emit, err),
        Command::Spectrum { build, .. } => cmd_spectrum(&common, build, &mut emit, err),
        Command::Verify {
            build,
            levels_file,
            grid,
            depth,
            ..
        } => cmd_verify(&common, build, levels_file.as_deref(), *grid, *depth, &mut emit, err),
        Command::Zeros {
            mask,
            range,
            half_width,
            probe,
            kmax,
            depth,
            tol,
            ..
        } => cmd_zeros(
            &common,
            mask.as_deref(),
            range.as_deref(),
            *half_width,
            probe,
            *kmax,
            *depth,
            *tol,
            &mut emit,
        ),
        Command::Equipos {
            grid,
            kmax,
            depth,
            tol,
            skips,
            ..
        } => cmd_equipos(&common, *grid, *kmax, *depth, *tol, skips, &mut emit, err),
    }
}

/// Parses `args` (program name first) and runs the command, writing reports
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
