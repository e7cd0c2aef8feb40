//! `diracbox` command line: boundary-condition checks, spectra, evolution,
//! parameter scans and the verification suite.
//!
//! Exit codes: 0 success, 1 a requested assertion or verification failed,
//! 2 invalid arguments, configuration or I/O.

pub mod config;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use diracbox::boundary::{
    classify, majorana_phase_scan, scan_diagonal_majorana_bcs, BCClassification, Family, WeylBranch,
};
use diracbox::evolution::{
    evolve, expand, make_majorana_state, observables, random_majorana_state, ChiralContent, GridWaveFunction,
    ModeExpansion, Observables, CONSISTENCY_TOL,
};
use diracbox::spectral::{eigenfunction, solve_spectrum, solve_spectrum_with, SolveOptions};
use diracbox::verify::{verify_all, VerifyOptions, VerifyReport, DEFAULT_SEED};
use diracbox::{BoundaryCondition, EnergyWindow, PhysicalParams, Spectrum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use config::{
    parse_complex, parse_range, resolve_bc, resolve_output_path, resolve_params, resolve_window, BcArgs, BcChoice,
    CommonArgs, Format, ParamArgs, RunConfig, WindowArgs,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Parser)]
#[command(name = "diracbox", version, about = "Dirac fields in a one-dimensional box")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a boundary condition.
    Check(CheckArgs),
    /// Solve for the eigenvalues inside an energy window.
    Spectrum(SpectrumArgs),
    /// Evolve an initial state in the eigenbasis and track observables.
    Evolve(EvolveArgs),
    /// Majorana phase filter, diagonal enumeration or family sweeps.
    Scan(ScanArgs),
    /// Run the ten verification criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub bc: BcArgs,
    #[arg(long)]
    pub assert_self_adjoint: bool,
    #[arg(long)]
    pub assert_majorana: bool,
    #[arg(long)]
    pub assert_chirality: bool,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub bc: BcArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Grid intervals for eigenfunction sampling.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Solve conditions that fail the self-adjointness check.
    #[arg(long)]
    pub allow_non_self_adjoint: bool,
    /// Index (in ascending energy order) of a mode to dump.
    #[arg(long, requires = "eigenfunction_output")]
    pub eigenfunction: Option<usize>,
    /// CSV file for the dumped mode: x,re_phi1,im_phi1,re_phi2,im_phi2.
    #[arg(long, requires = "eigenfunction")]
    pub eigenfunction_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("initial").required(true).args(["random_majorana", "mode", "majorana_file"])))]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub bc: BcArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Seeded random band-limited Majorana state.
    #[arg(long, value_name = "SEED")]
    pub random_majorana: Option<u64>,
    /// Band of the random state in units of ħc/L.
    #[arg(long, default_value_t = 20.0, requires = "random_majorana")]
    pub band: f64,
    #[arg(long, value_enum, default_value = "both", requires = "random_majorana")]
    pub chiral: ChiralArg,
    /// Mode coefficient `n` or `n=a+bi`; repeatable. The state is normalized.
    #[arg(long, value_name = "N[=COEF]")]
    pub mode: Vec<String>,
    /// CSV with header `u,v` and one row per grid node; φ1 = e^{iν/2}u, φ2 = e^{i(ν+π)/2}v.
    #[arg(long)]
    pub majorana_file: Option<PathBuf>,
    /// Final time in units of L/c.
    #[arg(long, default_value_t = 10.0)]
    pub t_final: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// CSV dump of Ψ(t_final): x,re_phi1,im_phi1,re_phi2,im_phi2.
    #[arg(long)]
    pub final_state: Option<PathBuf>,
    /// Exit 1 unless norm, endpoint current and (for Majorana-compatible
    /// conditions) the Majorana residual are conserved within 1e-9 + truncation.
    #[arg(long)]
    pub assert_conservation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ChiralArg {
    Both,
    Plus,
    Minus,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("scan_kind").required(true).args(["theta", "family1_m0", "family2_m1", "diagonal"])))]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Scan the Weyl phase θ on this many grid points.
    #[arg(long, value_name = "POINTS")]
    pub theta: Option<usize>,
    /// Weyl branch for --theta (1 or 2); both when omitted.
    #[arg(long, requires = "theta")]
    pub branch: Option<u8>,
    /// Sweep family I over m0 in a..b with m2 = +√(1 − m0²).
    #[arg(long, value_name = "A..B", allow_hyphen_values = true)]
    pub family1_m0: Option<String>,
    /// Sweep family II over m1 in a..b with m3 = +√(1 − m1²).
    #[arg(long, value_name = "A..B", allow_hyphen_values = true)]
    pub family2_m1: Option<String>,
    /// Brute-force diagonal conditions on a POINTS × POINTS phase grid.
    #[arg(long, value_name = "POINTS")]
    pub diagonal: Option<usize>,
    /// Sweep points, ends included.
    #[arg(long, default_value_t = 21)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Replace every upper bound by this value (0 forces failure).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Extra mass for the mass-independence comparison; repeatable.
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Everything a command hands back for rendering.
struct Outcome {
    command: &'static str,
    config: Value,
    results: Value,
    csv: String,
    passed: bool,
    /// Set when a requested assertion failed; the report is still emitted.
    failure: Option<String>,
    diagnostics: Vec<String>,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    arguments: &'a [String],
    config: &'a Value,
    results: &'a Value,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_clock_seconds: Option<f64>,
}

/// Parses `argv` (program name first) and runs the command, writing the
/// payload to `out` (or the output file) and diagnostics to `err`.
pub fn run<O: Write, E: Write>(argv: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let start = Instant::now();
    let common = match &cli.command {
        Command::Check(a) => &a.common,
        Command::Spectrum(a) => &a.common,
        Command::Evolve(a) => &a.common,
        Command::Scan(a) => &a.common,
        Command::Verify(a) => &a.common,
    }
    .clone();
    let result = load_config(&common).and_then(|cfg| {
        let outcome = match &cli.command {
            Command::Check(a) => cmd_check(a, &cfg),
            Command::Spectrum(a) => cmd_spectrum(a, &cfg),
            Command::Evolve(a) => cmd_evolve(a, &cfg),
            Command::Scan(a) => cmd_scan(a, &cfg),
            Command::Verify(a) => cmd_verify(a),
        }?;
        Ok((cfg, outcome))
    });
    let (cfg, outcome) = match result {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    for d in &outcome.diagnostics {
        let _ = writeln!(err, "{d}");
    }
    let format = common.format.or(cfg.output.format).unwrap_or_default();
    let payload = match format {
        Format::Json => {
            let args = &argv[1.min(argv.len())..];
            let report = Report {
                command: outcome.command,
                arguments: args,
                config: &outcome.config,
                results: &outcome.results,
                passed: outcome.passed,
                wall_clock_seconds: common.timing.then(|| start.elapsed().as_secs_f64()),
            };
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
        }
        Format::Csv => outcome.csv.clone(),
    };
    let target = common.output.clone().or(cfg.output.path.clone());
    if let Err(e) = emit(&payload, target.as_deref(), out) {
        let _ = writeln!(err, "error: {e}");
        return e.exit_code();
    }
    if let Some(f) = outcome.failure {
        let _ = writeln!(err, "assertion failed: {f}");
        return 1;
    }
    0
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    match &common.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn emit<O: Write>(payload: &str, path: Option<&Path>, out: &mut O) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, payload),
        None => out.write_all(payload.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let path = resolve_output_path(path);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Shortest round-trip text for CSV cells: plain decimals for ordinary
/// magnitudes, exponent form for very small or very large ones, and no
/// negative zero.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.is_finite() && (1e-4..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn family_fields(f: &Family) -> (&'static str, f64, f64) {
    match *f {
        Family::FamilyI { m0, m2 } => ("I", m0, m2),
        Family::FamilyII { m1, m3 } => ("II", m1, m3),
        Family::None => ("none", f64::NAN, f64::NAN),
    }
}

fn cmd_check(a: &CheckArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let choice = resolve_bc(&cfg.bc, &a.bc)?;
    let bc = choice.build()?;
    let c: BCClassification = classify(&bc);
    let mut failures = Vec::new();
    for (asked, check, name) in [
        (a.assert_self_adjoint, c.self_adjoint, "self_adjoint"),
        (a.assert_majorana, c.majorana_compatible, "majorana_compatible"),
        (a.assert_chirality, c.chirality_preserving, "chirality_preserving"),
    ] {
        if asked && !check.passed {
            failures.push(format!("{name} (residual {:e})", check.residual));
        }
    }
    let (fam, fa, fb) = family_fields(&c.family);
    let csv = format!(
        "self_adjoint,self_adjoint_residual,majorana_compatible,majorana_residual,chirality_preserving,chirality_residual,family,family_a,family_b\n{},{},{},{},{},{},{},{},{}\n",
        c.self_adjoint.passed,
        fmt_f64(c.self_adjoint.residual),
        c.majorana_compatible.passed,
        fmt_f64(c.majorana_compatible.residual),
        c.chirality_preserving.passed,
        fmt_f64(c.chirality_preserving.residual),
        fam,
        fmt_f64(fa),
        fmt_f64(fb)
    );
    Ok(Outcome {
        command: "check",
        config: json!({ "bc": to_value(&choice) }),
        results: json!({ "matrix": to_value(bc.matrix()), "classification": to_value(&c) }),
        csv,
        passed: failures.is_empty(),
        failure: (!failures.is_empty()).then(|| failures.join(", ")),
        diagnostics: Vec::new(),
    })
}

/// Multiplicity of the level each pair belongs to.
fn multiplicities(s: &Spectrum) -> Vec<usize> {
    let mut out = vec![1; s.len()];
    let mut start = 0;
    for i in 0..s.len() {
        if s.pairs[i].degeneracy_index == 0 {
            start = i;
        }
        for m in &mut out[start..=i] {
            *m = i - start + 1;
        }
    }
    out
}

fn spectrum_csv(s: &Spectrum) -> String {
    let mut csv = String::from("n,k,E,degeneracy\n");
    for (n, (p, m)) in s.pairs.iter().zip(multiplicities(s)).enumerate() {
        let _ = writeln!(csv, "{n},{},{},{m}", fmt_f64(p.k), fmt_f64(p.energy));
    }
    csv
}

fn spectrum_json(s: &Spectrum) -> Value {
    let mult = multiplicities(s);
    let pairs: Vec<Value> = s
        .pairs
        .iter()
        .zip(mult)
        .enumerate()
        .map(|(n, (p, m))| {
            json!({
                "n": n,
                "k": p.k,
                "energy": p.energy,
                "degeneracy": m,
                "degeneracy_index": p.degeneracy_index,
                "amplitude": to_value(&p.amplitude),
            })
        })
        .collect();
    let levels: Vec<Value> = s.levels().iter().map(|(e, m)| json!({ "energy": e, "multiplicity": m })).collect();
    json!({ "pairs": pairs, "levels": levels, "warnings": to_value(&s.warnings) })
}

fn state_csv(psi: &GridWaveFunction) -> String {
    let mut csv = String::from("x,re_phi1,im_phi1,re_phi2,im_phi2\n");
    for (x, v) in psi.positions().iter().zip(psi.samples()) {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_f64(*x),
            fmt_f64(v.c1.re),
            fmt_f64(v.c1.im),
            fmt_f64(v.c2.re),
            fmt_f64(v.c2.im)
        );
    }
    csv
}

fn run_config_echo(choice: &BcChoice, params: &PhysicalParams, window: &EnergyWindow, grid: usize) -> Value {
    json!({ "bc": to_value(choice), "params": to_value(params), "window": to_value(window), "grid": grid })
}

fn library(e: diracbox::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn warnings_to_diagnostics(s: &Spectrum) -> Vec<String> {
    s.warnings.iter().map(|w| format!("warning: {}", serde_json::to_string(w).expect("serializable"))).collect()
}

fn cmd_spectrum(a: &SpectrumArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let choice = resolve_bc(&cfg.bc, &a.bc)?;
    let bc = choice.build()?;
    let params = resolve_params(&cfg.params, &a.params)?;
    let window = resolve_window(&cfg.window, &a.window, &params, 20.0, 4000)?;
    let grid = a.grid.or(cfg.grid).unwrap_or(256);
    let options = SolveOptions { allow_non_self_adjoint: a.allow_non_self_adjoint };
    let s = solve_spectrum_with(&bc, &window, &params, &options).map_err(library)?;
    if let (Some(n), Some(path)) = (a.eigenfunction, &a.eigenfunction_output) {
        let pair = s
            .pairs
            .get(n)
            .ok_or_else(|| CliError::Config(format!("mode {n} requested but the window holds {} modes", s.len())))?;
        let psi = eigenfunction(pair, &BoundaryCondition::Matrix(bc), &params, grid).map_err(library)?;
        write_file(path, &state_csv(&psi))?;
    }
    Ok(Outcome {
        command: "spectrum",
        config: run_config_echo(&choice, &params, &window, grid),
        results: spectrum_json(&s),
        csv: spectrum_csv(&s),
        passed: true,
        failure: None,
        diagnostics: warnings_to_diagnostics(&s),
    })
}

fn parse_mode_spec(spec: &str) -> Result<(usize, Complex64), CliError> {
    let (n, coef) = match spec.split_once('=') {
        Some((n, c)) => (n, parse_complex(c)?),
        None => (spec, Complex64::new(1.0, 0.0)),
    };
    let n = n.trim().parse::<usize>().map_err(|_| CliError::Config(format!("bad mode index in '{spec}'")))?;
    Ok((n, coef))
}

fn read_majorana_file(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().map(|h| h.replace(' ', ""));
    if header.as_deref() != Some("u,v") {
        return Err(CliError::Config(format!("{}: header must be 'u,v'", path.display())));
    }
    let (mut u, mut v) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let bad = || CliError::Config(format!("{}: bad row {}", path.display(), i + 2));
        let (a, b) = line.split_once(',').ok_or_else(bad)?;
        u.push(a.trim().parse::<f64>().map_err(|_| bad())?);
        v.push(b.trim().parse::<f64>().map_err(|_| bad())?);
    }
    Ok((u, v))
}

#[derive(Serialize)]
struct SeriesRow {
    t: f64,
    norm: f64,
    j_at_0: f64,
    j_at_l: f64,
    chirality: f64,
    majorana_residual: f64,
}

impl SeriesRow {
    fn new(t: f64, o: &Observables) -> Self {
        Self {
            t,
            norm: o.norm,
            j_at_0: o.j_at_0,
            j_at_l: o.j_at_l,
            chirality: o.chirality,
            majorana_residual: o.majorana_residual,
        }
    }
}

fn cmd_evolve(a: &EvolveArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let choice = resolve_bc(&cfg.bc, &a.bc)?;
    let bc = choice.build()?;
    let params = resolve_params(&cfg.params, &a.params)?;
    let window = resolve_window(&cfg.window, &a.window, &params, 40.0, 8000)?;
    let grid = a.grid.or(cfg.grid).unwrap_or(256);
    if !(a.t_final.is_finite() && a.t_final >= 0.0) {
        return Err(CliError::Config("--t-final must be finite and non-negative".into()));
    }
    if a.steps == 0 {
        return Err(CliError::Config("--steps must be positive".into()));
    }
    let s = solve_spectrum(&bc, &window, &params).map_err(library)?;
    let unit = params.energy_unit();
    let (initial, description) = if let Some(seed) = a.random_majorana {
        let content = match a.chiral {
            ChiralArg::Both => ChiralContent::Both,
            ChiralArg::Plus => ChiralContent::Plus,
            ChiralArg::Minus => ChiralContent::Minus,
        };
        let psi = random_majorana_state(&s, a.band * unit, content, params.nu, grid, seed).map_err(library)?;
        (
            psi,
            json!({ "kind": "random_majorana", "seed": seed, "band": a.band, "chiral": format!("{:?}", a.chiral).to_lowercase() }),
        )
    } else if !a.mode.is_empty() {
        let mut coefficients = vec![Complex64::new(0.0, 0.0); s.len()];
        for spec in &a.mode {
            let (n, c) = parse_mode_spec(spec)?;
            let slot = coefficients.get_mut(n).ok_or_else(|| {
                CliError::Config(format!("mode {n} requested but the window holds {} modes", s.len()))
            })?;
            *slot += c;
        }
        let e = ModeExpansion::from_coefficients(s.clone(), coefficients, grid).map_err(library)?;
        let psi = evolve(&e, 0.0).normalized().map_err(library)?;
        (psi, json!({ "kind": "modes", "modes": a.mode }))
    } else {
        let path = a.majorana_file.as_ref().expect("argument group guarantees one initial state");
        let (u, v) = read_majorana_file(path)?;
        let psi = make_majorana_state(&u, &v, params.nu, &params).map_err(library)?;
        (psi, json!({ "kind": "majorana_file", "path": path }))
    };
    // Majorana files carry their own grid.
    let grid = initial.grid_size();
    let expansion = expand(&initial, &s).map_err(library)?;
    let mut diagnostics = warnings_to_diagnostics(&s);
    diagnostics.extend(
        expansion.warnings.iter().map(|w| format!("warning: {}", serde_json::to_string(w).expect("serializable"))),
    );

    let t_unit = params.length / params.c;
    let mut rows = Vec::with_capacity(a.steps + 1);
    let mut last = initial.clone();
    for i in 0..=a.steps {
        let t = a.t_final * t_unit * i as f64 / a.steps as f64;
        last = evolve(&expansion, t);
        rows.push(SeriesRow::new(t, &observables(&last, params.nu)));
    }
    if let Some(path) = &a.final_state {
        write_file(path, &state_csv(&last))?;
    }

    let n0 = rows[0].norm;
    let max_norm_drift = rows.iter().map(|r| (r.norm - n0).abs()).fold(0.0, f64::max);
    let max_majorana = rows.iter().map(|r| r.majorana_residual).fold(0.0, f64::max);
    let max_current = rows.iter().map(|r| (r.j_at_l - r.j_at_0).abs()).fold(0.0, f64::max);
    let chi = rows.iter().map(|r| r.chirality);
    let chi_range = chi.clone().fold(f64::NEG_INFINITY, f64::max) - chi.fold(f64::INFINITY, f64::min);
    let majorana_bc = diracbox::boundary::is_majorana_compatible(&bc).passed;

    let bound = CONSISTENCY_TOL + expansion.truncation_error.max(0.0);
    let mut failures = Vec::new();
    if a.assert_conservation {
        if !(max_norm_drift < bound) {
            failures.push(format!("norm drift {max_norm_drift:e}"));
        }
        if !(max_current < bound) {
            failures.push(format!("endpoint current mismatch {max_current:e}"));
        }
        if majorana_bc && !(max_majorana < bound) {
            failures.push(format!("Majorana residual {max_majorana:e}"));
        }
    }

    let mut csv = String::from("t,norm,j_at_0,j_at_L,chirality,majorana_residual\n");
    for r in &rows {
        let cells = [r.t, r.norm, r.j_at_0, r.j_at_l, r.chirality, r.majorana_residual].map(fmt_f64);
        let _ = writeln!(csv, "{}", cells.join(","));
    }
    let mut config = run_config_echo(&choice, &params, &window, grid);
    config["t_final"] = json!(a.t_final);
    config["steps"] = json!(a.steps);
    config["initial"] = description;
    Ok(Outcome {
        command: "evolve",
        config,
        results: json!({
            "modes": s.len(),
            "truncation_error": expansion.truncation_error,
            "warnings": to_value(&expansion.warnings),
            "summary": {
                "max_norm_drift": max_norm_drift,
                "max_majorana_residual": max_majorana,
                "max_current_mismatch": max_current,
                "chirality_range": chi_range,
            },
            "series": to_value(&rows),
        }),
        csv,
        passed: failures.is_empty(),
        failure: (!failures.is_empty()).then(|| failures.join(", ")),
        diagnostics,
    })
}

fn sweep_values(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, CliError> {
    match points {
        0 => Err(CliError::Config("--points must be positive".into())),
        1 => Ok(vec![lo]),
        n => Ok((0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()),
    }
}

fn cmd_scan(a: &ScanArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = resolve_params(&cfg.params, &a.params)?;
    if let Some(points) = a.theta {
        let branches =
            match a.branch {
                None => WeylBranch::ALL.to_vec(),
                Some(b) => vec![WeylBranch::from_index(b)
                    .ok_or_else(|| CliError::Config(format!("branch must be 1 or 2, got {b}")))?],
            };
        let mut csv = String::from("branch,theta\n");
        let mut results = Vec::new();
        for br in branches {
            let roots = majorana_phase_scan(br, points).map_err(library)?;
            for r in &roots {
                let _ = writeln!(csv, "{},{}", br.index(), fmt_f64(*r));
            }
            results.push(json!({ "branch": br.index(), "admissible_theta": roots }));
        }
        return Ok(Outcome {
            command: "scan",
            config: json!({ "kind": "theta", "points": points, "params": to_value(&params) }),
            results: Value::Array(results),
            csv,
            passed: true,
            failure: None,
            diagnostics: Vec::new(),
        });
    }
    if let Some(points) = a.diagonal {
        let found = scan_diagonal_majorana_bcs(points).map_err(library)?;
        let mut csv = String::from("re_m11,im_m11,re_m22,im_m22\n");
        for bc in &found {
            let m = bc.matrix();
            let cells = [m.m11.re, m.m11.im, m.m22.re, m.m22.im].map(fmt_f64);
            let _ = writeln!(csv, "{}", cells.join(","));
        }
        let matrices: Vec<Value> = found.iter().map(|b| to_value(b.matrix())).collect();
        return Ok(Outcome {
            command: "scan",
            config: json!({ "kind": "diagonal", "points": points }),
            results: json!({ "count": found.len(), "matrices": matrices }),
            csv,
            passed: true,
            failure: None,
            diagnostics: Vec::new(),
        });
    }
    let (kind, range) = match (&a.family1_m0, &a.family2_m1) {
        (Some(r), None) => ("family1_m0", r),
        (None, Some(r)) => ("family2_m1", r),
        _ => unreachable!("argument group allows exactly one scan"),
    };
    let (lo, hi) = parse_range(range)?;
    let window = resolve_window(&cfg.window, &a.window, &params, 20.0, 4000)?;
    let mut csv = String::from("parameter,n,k,E\n");
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    let mut skipped = Vec::new();
    for x in sweep_values(lo, hi, a.points)? {
        let partner = (1.0 - x * x).max(0.0).sqrt();
        let choice = if kind == "family1_m0" {
            BcChoice::Family1 { m0: x, m2: partner }
        } else {
            BcChoice::Family2 { m1: x, m3: partner }
        };
        let bc = match choice.build() {
            Ok(bc) => bc,
            Err(e) => {
                diagnostics.push(format!("skipping {kind} = {x}: {e}"));
                skipped.push(x);
                continue;
            }
        };
        let s = solve_spectrum(&bc, &window, &params).map_err(library)?;
        diagnostics.extend(warnings_to_diagnostics(&s));
        for (n, p) in s.pairs.iter().enumerate() {
            let _ = writeln!(csv, "{},{n},{},{}", fmt_f64(x), fmt_f64(p.k), fmt_f64(p.energy));
        }
        let lowest_positive_kl =
            s.pairs.iter().map(|p| p.k * params.length).filter(|&kl| kl > 0.0).fold(f64::INFINITY, f64::min);
        rows.push(json!({
            "parameter": x,
            "partner": partner,
            "energies": s.energies(),
            "k": s.pairs.iter().map(|p| p.k).collect::<Vec<_>>(),
            "lowest_positive_kl": lowest_positive_kl.is_finite().then_some(lowest_positive_kl),
        }));
    }
    Ok(Outcome {
        command: "scan",
        config: json!({
            "kind": kind, "range": [lo, hi], "points": a.points,
            "params": to_value(&params), "window": to_value(&window),
        }),
        results: json!({ "sweep": rows, "skipped": skipped }),
        csv,
        passed: true,
        failure: None,
        diagnostics,
    })
}

fn verify_table(r: &VerifyReport) -> Vec<String> {
    let mut lines: Vec<String> = r
        .criteria
        .iter()
        .map(|c| {
            format!(
                "[{}] {:>2} {:<45} residual {:.3e}  bound {:.1e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.id,
                c.name,
                c.residual,
                c.threshold
            )
        })
        .collect();
    lines.push(format!("seed {}, masses {:?}", r.seed, r.masses));
    lines
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    if let Some(t) = a.tolerance {
        if !(t >= 0.0) {
            return Err(CliError::Config(format!("--tolerance must be non-negative, got {t}")));
        }
    }
    if let Some(m) = a.mass.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
        return Err(CliError::Config(format!("--mass must be finite and non-negative, got {m}")));
    }
    let options = VerifyOptions { tolerance: a.tolerance, extra_masses: a.mass.clone(), seed: a.seed };
    let report = verify_all(&options);
    let mut csv = String::from("id,name,passed,residual,threshold\n");
    for c in &report.criteria {
        let _ = writeln!(csv, "{},{},{},{},{}", c.id, c.name, c.passed, fmt_f64(c.residual), fmt_f64(c.threshold));
    }
    let failed: Vec<String> =
        report.criteria.iter().filter(|c| !c.passed).map(|c| format!("{} ({})", c.id, c.name)).collect();
    Ok(Outcome {
        command: "verify",
        config: to_value(&options),
        results: to_value(&report),
        csv,
        passed: report.passed,
        failure: (!failed.is_empty()).then(|| format!("criteria failed: {}", failed.join(", "))),
        diagnostics: verify_table(&report),
    })
}
