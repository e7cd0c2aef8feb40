//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use diracbox::boundary::{family_one, family_two, MatrixBC, NamedBC};
use diracbox::{Complex2Matrix, EnergyWindow, PhysicalParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming the directory for relative output paths.
pub const OUTPUT_DIR_ENV: &str = "DIRACBOX_OUTPUT_DIR";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub params: ParamSpec,
    #[serde(default)]
    pub bc: BcSpec,
    #[serde(default)]
    pub window: WindowSpec,
    pub grid: Option<usize>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub hbar: Option<f64>,
    pub c: Option<f64>,
    pub length: Option<f64>,
    pub mass: Option<f64>,
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcSpec {
    pub named: Option<String>,
    pub family1: Option<[f64; 2]>,
    pub family2: Option<[f64; 2]>,
    pub matrix: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub e_min: Option<f64>,
    pub e_max: Option<f64>,
    pub scan_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with [params], [bc], [window], grid and [output] sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the payload here instead of stdout; relative paths resolve
    /// against $DIRACBOX_OUTPUT_DIR when set.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Include wall-clock time in the report (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub hbar: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub length: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Charge-conjugation phase ν.
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BcArgs {
    /// periodic | antiperiodic | plus_gamma5 | minus_gamma5
    #[arg(long)]
    pub named: Option<String>,
    #[arg(long, num_args = 2, value_names = ["M0", "M2"], allow_negative_numbers = true)]
    pub family1: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["M1", "M3"], allow_negative_numbers = true)]
    pub family2: Option<Vec<f64>>,
    /// Row-major "a,b;c,d" with complex entries such as 1-0.5i.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct WindowArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub emin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub emax: Option<f64>,
    #[arg(long)]
    pub scan_points: Option<usize>,
    /// Symmetric window holding the massless periodic levels |n| <= MODES.
    #[arg(long, conflicts_with_all = ["emin", "emax"])]
    pub modes: Option<u32>,
}

/// The boundary condition as the user specified it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BcChoice {
    Named { name: NamedBC },
    Family1 { m0: f64, m2: f64 },
    Family2 { m1: f64, m3: f64 },
    Matrix { matrix: Complex2Matrix },
}

impl BcChoice {
    pub fn build(&self) -> Result<MatrixBC, CliError> {
        let bc = match self {
            BcChoice::Named { name } => Ok(MatrixBC::named(*name)),
            BcChoice::Family1 { m0, m2 } => family_one(*m0, *m2),
            BcChoice::Family2 { m1, m3 } => family_two(*m1, *m3),
            BcChoice::Matrix { matrix } => MatrixBC::new(*matrix),
        };
        bc.map_err(|e| CliError::Config(e.to_string()))
    }
}

fn pair(v: &[f64], flag: &str) -> Result<(f64, f64), CliError> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::Config(format!("--{flag} takes two numbers"))),
    }
}

/// Flags replace the file's boundary condition wholesale, so a config file
/// and a flag never combine into two variants.
pub fn resolve_bc(file: &BcSpec, flags: &BcArgs) -> Result<BcChoice, CliError> {
    let any_flag =
        flags.named.is_some() || flags.family1.is_some() || flags.family2.is_some() || flags.matrix.is_some();
    let spec = if any_flag {
        BcSpec {
            named: flags.named.clone(),
            family1: flags.family1.as_deref().map(|v| pair(v, "family1")).transpose()?.map(|(a, b)| [a, b]),
            family2: flags.family2.as_deref().map(|v| pair(v, "family2")).transpose()?.map(|(a, b)| [a, b]),
            matrix: flags.matrix.clone(),
        }
    } else {
        file.clone()
    };
    let count = [spec.named.is_some(), spec.family1.is_some(), spec.family2.is_some(), spec.matrix.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if count != 1 {
        return Err(CliError::Config(format!(
            "exactly one of --named, --family1, --family2, --matrix is required (got {count})"
        )));
    }
    if let Some(n) = &spec.named {
        let name = NamedBC::parse(n).ok_or_else(|| CliError::Config(format!("unknown named condition '{n}'")))?;
        return Ok(BcChoice::Named { name });
    }
    if let Some([m0, m2]) = spec.family1 {
        return Ok(BcChoice::Family1 { m0, m2 });
    }
    if let Some([m1, m3]) = spec.family2 {
        return Ok(BcChoice::Family2 { m1, m3 });
    }
    let text = spec.matrix.expect("counted above");
    Ok(BcChoice::Matrix { matrix: parse_matrix(&text)? })
}

pub fn resolve_params(file: &ParamSpec, flags: &ParamArgs) -> Result<PhysicalParams, CliError> {
    let d = PhysicalParams::default();
    let p = PhysicalParams {
        hbar: flags.hbar.or(file.hbar).unwrap_or(d.hbar),
        c: flags.c.or(file.c).unwrap_or(d.c),
        length: flags.length.or(file.length).unwrap_or(d.length),
        mass: flags.mass.or(file.mass).unwrap_or(d.mass),
        nu: flags.nu.or(file.nu).unwrap_or(d.nu),
    };
    p.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(p)
}

/// Window in energy units; `default_half_width` is in units of ħc/L.
pub fn resolve_window(
    file: &WindowSpec,
    flags: &WindowArgs,
    params: &PhysicalParams,
    default_half_width: f64,
    default_points: usize,
) -> Result<EnergyWindow, CliError> {
    let unit = params.energy_unit();
    let half = match flags.modes {
        Some(n) => (n as f64 + 0.5) * std::f64::consts::TAU * unit,
        None => default_half_width * unit,
    };
    let use_modes = flags.modes.is_some();
    let e_min = if use_modes { -half } else { flags.emin.or(file.e_min).unwrap_or(-half) };
    let e_max = if use_modes { half } else { flags.emax.or(file.e_max).unwrap_or(half) };
    let points = flags.scan_points.or(file.scan_points).unwrap_or(default_points);
    EnergyWindow::new(e_min, e_max, points).map_err(|e| CliError::Config(e.to_string()))
}

pub fn resolve_output_path(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            return Path::new(&dir).join(path);
        }
    }
    path.to_path_buf()
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i` with optional exponents.
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Config(format!("cannot parse complex number '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not a leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (&body[..j], &body[j..]),
        None => ("", body),
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

pub fn parse_matrix(text: &str) -> Result<Complex2Matrix, CliError> {
    let rows: Vec<&str> = text.split(';').collect();
    let bad = || CliError::Config(format!("matrix must look like \"a,b;c,d\", got '{text}'"));
    if rows.len() != 2 {
        return Err(bad());
    }
    let mut e = Vec::with_capacity(4);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 2 {
            return Err(bad());
        }
        for c in cols {
            e.push(parse_complex(c)?);
        }
    }
    Ok(Complex2Matrix::new(e[0], e[1], e[2], e[3]))
}

/// `a..b` with inclusive ends.
pub fn parse_range(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("range must look like a..b, got '{text}'"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a <= b) {
        return Err(bad());
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1").unwrap(), z(1.0, 0.0));
        assert_eq!(parse_complex("-2.5").unwrap(), z(-2.5, 0.0));
        assert_eq!(parse_complex("1+2i").unwrap(), z(1.0, 2.0));
        assert_eq!(parse_complex("1-2i").unwrap(), z(1.0, -2.0));
        assert_eq!(parse_complex("-0.5i").unwrap(), z(0.0, -0.5));
        assert_eq!(parse_complex("i").unwrap(), z(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), z(0.0, -1.0));
        assert_eq!(parse_complex("3-i").unwrap(), z(3.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), z(1e-3, 20.0));
        assert_eq!(parse_complex(" 1 + 2i ").unwrap(), z(1.0, 2.0));
        for bad in ["", "x", "1+", "1+2j", "++i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn matrix_syntax() {
        let m = parse_matrix("0,1;1,0").unwrap();
        assert_eq!(m, Complex2Matrix::sigma_x());
        let m = parse_matrix("1, -0.5i; 0.5i, 1").unwrap();
        assert_eq!(m.m12, z(0.0, -0.5));
        assert!(parse_matrix("1,0,0;0,1").is_err());
        assert!(parse_matrix("1,0").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-0.9..0.9").unwrap(), (-0.9, 0.9));
        assert!(parse_range("1..0").is_err());
        assert!(parse_range("0.5").is_err());
    }

    #[test]
    fn bc_flags_must_be_unique() {
        let flags = BcArgs { named: Some("periodic".into()), matrix: Some("1,0;0,1".into()), ..Default::default() };
        assert!(matches!(resolve_bc(&BcSpec::default(), &flags), Err(CliError::Config(_))));
        assert!(resolve_bc(&BcSpec::default(), &BcArgs::default()).is_err());
        let file = BcSpec { family1: Some([0.6, 0.8]), ..Default::default() };
        assert_eq!(resolve_bc(&file, &BcArgs::default()).unwrap(), BcChoice::Family1 { m0: 0.6, m2: 0.8 });
        // A flag replaces the file's choice.
        let flags = BcArgs { named: Some("antiperiodic".into()), ..Default::default() };
        assert_eq!(resolve_bc(&file, &flags).unwrap(), BcChoice::Named { name: NamedBC::Antiperiodic });
    }

    #[test]
    fn config_file_round_trip() {
        let text = r#"
            grid = 128
            [params]
            mass = 0.5
            [bc]
            family2 = [0.8, 0.6]
            [window]
            e_min = -5.0
            e_max = 5.0
            scan_points = 500
            [output]
            format = "csv"
        "#;
        let cfg: RunConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.grid, Some(128));
        assert_eq!(cfg.output.format, Some(Format::Csv));
        let p = resolve_params(&cfg.params, &ParamArgs::default()).unwrap();
        assert_eq!(p.mass, 0.5);
        let w = resolve_window(&cfg.window, &WindowArgs::default(), &p, 20.0, 4000).unwrap();
        assert_eq!((w.e_min, w.e_max, w.scan_points), (-5.0, 5.0, 500));
        assert!(toml::from_str::<RunConfig>("[bc]\nnamd = \"periodic\"").is_err());
    }

    #[test]
    fn invalid_params_are_config_errors() {
        let flags = ParamArgs { length: Some(-1.0), ..Default::default() };
        assert!(matches!(resolve_params(&ParamSpec::default(), &flags), Err(CliError::Config(_))));
    }
}
