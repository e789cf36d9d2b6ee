//! Command-line front end. Reports go to stdout as JSON, diagnostics to
//! stderr, and pass/fail travels only through the exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::eqregion::{eq_region, eq_region_exact, jordan_data, EqRegionReport, Mode, Tolerances};
use crate::error::{Error, Result};
use crate::hmat::{HMatrix, MatrixDoc};
use crate::oracle::{verify_region, ProbeConfig};
use crate::{dynamics, spectral};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;
pub const EXIT_ILL_CONDITIONED: i32 = 4;
pub const EXIT_VERIFY_FAILED: i32 = 5;
pub const EXIT_UNSTABLE: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "quatdyn", version, about = "Dynamics of quaternionic projective transformations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dynamical type, Jordan data and right eigenvalue classes.
    Classify(Args),
    /// Complement of the equicontinuity region.
    Eqregion(Args),
    /// Check the region against the numerical oracle.
    Verify(Args),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    General,
    AssumeJordan,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::General => Mode::General,
            ModeArg::AssumeJordan => Mode::AssumeJordan,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Coords {
    Jordan,
    Original,
    #[default]
    Both,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// JSON file holding a matrix or a full input document.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Relative tolerance for spectral rank decisions.
    #[arg(long, env = "QUATDYN_TOL")]
    pub tol: Option<f64>,
    /// Distance from 1 under which a modulus counts as unit.
    #[arg(long, env = "QUATDYN_UNIT_TOL")]
    pub unit_tol: Option<f64>,
    #[arg(long, env = "QUATDYN_MAX_POWER")]
    pub max_power: Option<u32>,
    #[arg(long, env = "QUATDYN_SEED")]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Coords::Both)]
    pub coords: Coords,
    /// Exact rational arithmetic; requires Jordan-structured input.
    #[arg(long)]
    pub exact: bool,
}

/// Input document: either a bare matrix or a matrix with options.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum InputSpec {
    Full(FullInput),
    Bare(MatrixDoc),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullInput {
    pub matrix: MatrixDoc,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub unit_tol: Option<f64>,
    #[serde(default)]
    pub max_power: Option<u32>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl InputSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn into_full(self) -> FullInput {
        match self {
            InputSpec::Full(f) => f,
            InputSpec::Bare(matrix) => FullInput { matrix, mode: None, tol: None, unit_tol: None, max_power: None, seed: None },
        }
    }
}

/// Settings after merging flags and environment over the input document.
struct Settings {
    matrix: MatrixDoc,
    mode: Mode,
    tol: Tolerances,
    probe: ProbeConfig,
    coords: Coords,
    exact: bool,
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Parse(format!("{name} must be positive and finite")))
    }
}

fn settings(args: &Args) -> Result<Settings> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", args.input.display())))?;
    let input = InputSpec::parse(&text)?.into_full();
    let defaults = Tolerances::default();
    let tol = Tolerances {
        spectral: positive("tol", args.tol.or(input.tol).unwrap_or(defaults.spectral))?,
        unit: positive("unit_tol", args.unit_tol.or(input.unit_tol).unwrap_or(defaults.unit))?,
    };
    let mut probe = ProbeConfig::default();
    if let Some(m) = args.max_power.or(input.max_power) {
        probe.max_power = m;
    }
    if let Some(s) = args.seed.or(input.seed) {
        probe.seed = s;
    }
    Ok(Settings {
        matrix: input.matrix,
        mode: args.mode.map(Mode::from).or(input.mode).unwrap_or_default(),
        tol,
        probe,
        coords: args.coords,
        exact: args.exact,
    })
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::Singular { .. } => EXIT_SINGULAR,
        Error::IllConditioned { .. } => EXIT_ILL_CONDITIONED,
        Error::Unstable { .. } => EXIT_UNSTABLE,
        _ => EXIT_OTHER,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DivisionByZero => "DivisionByZero",
        Error::NonSquare { .. } => "NonSquare",
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::Singular { .. } => "Singular",
        Error::ZeroMatrix => "ZeroMatrix",
        Error::UnknownEigenvalue { .. } => "UnknownEigenvalue",
        Error::IllConditioned { .. } => "IllConditioned",
        Error::PowerOverflowGuard => "PowerOverflowGuard",
        Error::PowerCap { .. } => "PowerCap",
        Error::WrongType { .. } => "WrongType",
        Error::Unstable { .. } => "Unstable",
        Error::Parse(_) => "Parse",
    }
}

fn report(s: &Settings, gamma: &HMatrix) -> Result<EqRegionReport> {
    if s.exact {
        Ok(eq_region_exact(&s.matrix.to_exact()?)?.report)
    } else {
        eq_region(gamma, s.mode, &s.tol)
    }
}

#[derive(serde::Serialize)]
struct ClassifyOutput {
    #[serde(rename = "type")]
    dyn_type: dynamics::DynamicalType,
    jordan: spectral::JordanData,
    eigenclasses: Vec<spectral::EigenClass>,
}

fn classify(s: &Settings, gamma: &HMatrix) -> Result<ClassifyOutput> {
    let (t, jd) = if s.exact {
        let r = eq_region_exact(&s.matrix.to_exact()?)?.report;
        (r.dyn_type, r.jordan)
    } else {
        let jd = jordan_data(gamma, s.mode, &s.tol)?;
        (dynamics::classify(&jd, s.tol.unit), jd)
    };
    Ok(ClassifyOutput { dyn_type: t, eigenclasses: jd.classes(), jordan: jd })
}

fn restrict(mut r: EqRegionReport, coords: Coords) -> EqRegionReport {
    match coords {
        Coords::Original => r.complement_jordan = None,
        Coords::Jordan => r.complement = None,
        Coords::Both => {}
    }
    r
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Parse(e.to_string()))
}

/// Runs one command. Returns the JSON document for stdout and the exit code.
fn execute(cmd: &Command) -> Result<(String, i32)> {
    let (Command::Classify(args) | Command::Eqregion(args) | Command::Verify(args)) = cmd;
    let s = settings(args)?;
    let gamma = s.matrix.to_matrix()?;
    match cmd {
        Command::Classify(_) => Ok((to_json(&classify(&s, &gamma)?)?, EXIT_OK)),
        Command::Eqregion(_) => {
            let r = restrict(report(&s, &gamma)?, s.coords);
            Ok((to_json(&r)?, EXIT_OK))
        }
        Command::Verify(_) => {
            let r = report(&s, &gamma)?;
            let v = verify_region(&gamma, &r, &s.probe)?;
            let code = if v.passed { EXIT_OK } else { EXIT_VERIFY_FAILED };
            Ok((to_json(&v)?, code))
        }
    }
}

/// Parses `argv`, runs the command and writes the outcome. Returns the
/// process exit code.
pub fn run<I, T>(argv: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = write!(if e.use_stderr() { err as &mut dyn Write } else { out as &mut dyn Write }, "{}", e.render());
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((doc, code)) => {
            let _ = writeln!(out, "{doc}");
            code
        }
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(err, "quatdyn: {e}");
            if code != EXIT_PARSE {
                let _ = writeln!(out, "{}", json!({ "error": error_kind(&e), "message": e.to_string() }));
            }
            code
        }
    }
}
