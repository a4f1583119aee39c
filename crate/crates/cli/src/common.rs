//! Shared plumbing: error-to-exit-code mapping, resolved global flags,
//! provenance stamping, and the JSON/CSV writers every subcommand uses.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qturb_core::burgers::ForcingScale;
use qturb_core::circuits::AnsatzVariant;
use qturb_core::statistics::Baseline;

/// Command failures, each with its own exit code so scripts can tell a bad
/// config from a failed optimization from a diverged solver.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Training(String),
    BlowUp { step: usize },
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Training(msg) => write!(f, "training failed: {msg}"),
            CliError::BlowUp { step } => write!(f, "solver blew up at step {step}"),
            CliError::Io(err) => write!(f, "{err}"),
        }
    }
}

impl CliError {
    /// 2 bad configuration, 3 training failure, 4 solver blow-up, 1 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Training(_) => 3,
            CliError::BlowUp { .. } => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<qturb_core::Error> for CliError {
    fn from(err: qturb_core::Error) -> Self {
        match err {
            qturb_core::Error::BlowUp { step } => CliError::BlowUp { step },
            qturb_core::Error::Io(io) => CliError::Io(io),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Config(err.to_string())
    }
}

/// Whether the sampled readout sections are produced at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Statevector expectations only.
    Exact,
    /// Statevector expectations plus seeded shot sampling (the default).
    Shots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineArg {
    Classical,
    Statevector,
}

impl From<BaselineArg> for Baseline {
    fn from(arg: BaselineArg) -> Self {
        match arg {
            BaselineArg::Classical => Baseline::Classical,
            BaselineArg::Statevector => Baseline::Statevector,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Adjusted,
    Brickwall,
}

impl From<VariantArg> for AnsatzVariant {
    fn from(arg: VariantArg) -> Self {
        match arg {
            VariantArg::Adjusted => AnsatzVariant::Adjusted,
            VariantArg::Brickwall => AnsatzVariant::Brickwall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    /// Euler-Maruyama noise: each realization is divided by sqrt(dt).
    #[value(name = "inv_sqrt_dt")]
    InvSqrtDt,
    /// The sampled realization enters the tendency as-is.
    Unit,
}

impl From<ScaleArg> for ForcingScale {
    fn from(arg: ScaleArg) -> Self {
        match arg {
            ScaleArg::InvSqrtDt => ForcingScale::InvSqrtDt,
            ScaleArg::Unit => ForcingScale::Unit,
        }
    }
}

/// Global flags after defaulting: the created output directory plus the
/// overrides each subcommand layers onto its own config.
pub struct Globals {
    pub out: PathBuf,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub shots: Option<usize>,
    pub baseline: Option<Baseline>,
}

/// Flag wins, then the QTURB_OUT environment variable, then ./out. The
/// directory is created eagerly so commands can write without ceremony.
pub fn out_dir(flag: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    let dir = flag
        .clone()
        .or_else(|| std::env::var_os("QTURB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Subcommand settings from --config, or the defaults when no file is given.
/// Unknown keys are rejected so a config meant for another subcommand fails
/// loudly instead of half-applying.
pub fn load_config<T: DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|err| CliError::Config(format!("cannot read {}: {err}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|err| CliError::Config(format!("{}: {err}", path.display())))
}

/// Stamp embedded in every output file: tool, version, subcommand, and the
/// fully resolved config. Deliberately no timestamps or hostnames, so
/// re-running a config reproduces files byte for byte.
#[derive(Debug, Serialize)]
pub struct Provenance<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub config: &'a C,
}

pub fn provenance<'a, C: Serialize>(subcommand: &'static str, config: &'a C) -> Provenance<'a, C> {
    Provenance {
        tool: "qturb",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        config,
    }
}

/// Comment line carrying the same stamp for CSV outputs.
pub fn csv_provenance<C: Serialize>(subcommand: &str, config: &C) -> String {
    let config = serde_json::to_string(config).expect("config serializes");
    format!("# qturb v{} {subcommand} {config}\n", env!("CARGO_PKG_VERSION"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)?;
    Ok(())
}

/// println! that shrugs off a closed stdout (piping into `head` must not
/// panic after the output files are already written).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}
pub(crate) use say;
