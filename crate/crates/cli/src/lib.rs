//! Argument parsing and command dispatch for the `hl-atlas` binary.

mod commands;

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hl_atlas::atlas::AtlasError;
use hl_atlas::criteria::{CriteriaError, Predicate, Thresholds};
use hl_atlas::geometry::{Constraint, GeometryError, Locus};
use hl_atlas::liqiao::LiqiaoError;
use hl_atlas::quasirandom::{SequenceError, SequenceSpec};
use hl_atlas::states::{self, Family, StateError};

#[derive(Debug, Parser)]
#[command(name = "hl-atlas", version, about = "Entanglement atlas of the magic-simplex state families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tally boolean atoms over quasirandom feasible points and compare with closed forms.
    Estimate(EstimateArgs),
    /// Every criterion at one point, closed form and oracle.
    Classify(ClassifyArgs),
    /// Labelled point cloud of a boolean region, or the POCU-candidate layer.
    Cloud(CloudArgs),
    /// Points where s or p saturates a target, inside the PPT region or on its boundary.
    Surface(SurfaceArgs),
    /// Best separable approximation within the two-qutrit family.
    Bsa(BsaArgs),
    /// Check a separable-decomposition certificate.
    VerifyDecomposition(VerifyArgs),
    /// Closed-form reference probabilities.
    Reference(ReferenceArgs),
    /// Compare closed forms with matrix oracles over quasirandom feasible points.
    OracleCheck(OracleCheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Local dimension: 3 (two qutrits) or 4 (two ququarts).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(3..=4))]
    pub dim: u8,
    /// Override the s threshold (decimal or p/q).
    #[arg(long, value_parser = parse_real_arg)]
    pub s_threshold: Option<f64>,
    /// Override the p threshold (decimal or p/q).
    #[arg(long, value_parser = parse_real_arg)]
    pub p_threshold: Option<f64>,
    /// Use the lowered ququart product bound 1e-30.
    #[arg(long)]
    pub lowered_p: bool,
}

impl FamilyArgs {
    pub fn family(&self) -> Family {
        Family::from_dim(self.dim as usize).expect("clap restricts --dim to 3 or 4")
    }

    pub fn thresholds(&self) -> Result<Thresholds, CliError> {
        let family = self.family();
        if self.lowered_p && family != Family::Ququart {
            return Err(CliError::Usage("--lowered-p applies to --dim 4 only".into()));
        }
        let mut t = if self.lowered_p {
            Thresholds::ququart_lowered()
        } else {
            Thresholds::for_family(family)
        };
        if let Some(s) = self.s_threshold {
            t.s = s;
        }
        if let Some(p) = self.p_threshold {
            t.p = p;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SequenceArgs {
    /// Sequence offset in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub offset: f64,
    /// First raw index.
    #[arg(long, default_value_t = 1)]
    pub start: u64,
}

impl SequenceArgs {
    pub fn spec(&self, family: Family) -> Result<SequenceSpec, CliError> {
        let spec = SequenceSpec {
            offset: self.offset,
            start_index: self.start,
            ..SequenceSpec::new(family.n_coords())
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub sequence: SequenceArgs,
    /// Raw quasirandom indices to scan, e.g. 1e8.
    #[arg(long, default_value = "1e7", value_parser = parse_count)]
    pub points: u64,
    /// Comma-separated predicates; defaults to P,S,PPT,MUB,Choi,CCNR (d=3) or P,S,PPT (d=4).
    #[arg(long, value_delimiter = ',', value_parser = parse_predicate)]
    pub predicates: Option<Vec<Predicate>>,
    /// Worker threads; the result does not depend on it.
    #[arg(long, env = "ATLAS_WORKERS")]
    pub workers: Option<usize>,
    /// Checkpoint file, rewritten after every slice.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Continue from --checkpoint up to the --points budget.
    #[arg(long, requires = "checkpoint")]
    pub resume: bool,
    /// Raw indices between checkpoint writes.
    #[arg(long, default_value = "1e8", value_parser = parse_count)]
    pub checkpoint_every: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Closed,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Coordinates, e.g. 2/7,4/21,0.
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CloudArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub sequence: SequenceArgs,
    /// Boolean expression over P, S, PPT, MUB, Choi, CCNR.
    #[arg(long, required_unless_present = "pocu")]
    pub expr: Option<String>,
    /// Rows to collect (with --pocu: candidates examined for the minimum).
    #[arg(long, default_value = "5000", value_parser = parse_count)]
    pub count: u64,
    /// Raw indices to scan at most.
    #[arg(long, default_value = "1e10", value_parser = parse_count)]
    pub max_raw: u64,
    /// POCU-candidate layer: not PPT, neither P nor S (two qutrits).
    #[arg(long, conflicts_with = "expr")]
    pub pocu: bool,
    /// With --pocu, rows written to the output.
    #[arg(long, default_value = "5000", value_parser = parse_count)]
    pub keep: u64,
    /// Report single-linkage cluster sizes at this radius.
    #[arg(long)]
    pub clusters: Option<f64>,
    #[arg(long, env = "ATLAS_WORKERS")]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstraintArg {
    S,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LocusArg {
    InteriorPpt,
    PptBoundary,
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum)]
    pub constraint: ConstraintArg,
    /// Target value (decimal or p/q); defaults to the threshold.
    #[arg(long, value_parser = parse_real_arg)]
    pub target: Option<f64>,
    #[arg(long, value_enum, default_value = "interior-ppt")]
    pub locus: LocusArg,
    #[arg(long, default_value = "2000", value_parser = parse_count)]
    pub count: u64,
    /// Seeds of the (Q1, Q2) scan to try at most.
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    pub max_seeds: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BsaArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    /// Certificate JSON: {"q": [...], "terms": [{"w", "A", "B"}]}.
    #[arg(long, required_unless_present = "diagonal", conflicts_with = "diagonal")]
    pub certificate: Option<PathBuf>,
    /// Use the product decomposition of a diagonal state (Q1 = Q3).
    #[arg(long)]
    pub diagonal: bool,
    /// Also write the certificate that was checked.
    #[arg(long)]
    pub write_certificate: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReferenceArgs {
    /// List the whole catalog (the default).
    #[arg(long)]
    pub list: bool,
    /// A single entry by name.
    #[arg(long, conflicts_with = "list")]
    pub name: Option<String>,
    /// Only entries of this local dimension.
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=4))]
    pub dim: Option<u8>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleCheckArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub sequence: SequenceArgs,
    /// Feasible points to check.
    #[arg(long, default_value = "1e4", value_parser = parse_count)]
    pub points: u64,
    #[arg(long, default_value = "1e10", value_parser = parse_count)]
    pub max_raw: u64,
    /// Largest accepted relative s/p deviation.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Failure with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags or input values (exit 2).
    Usage(String),
    /// Closed forms and oracles, or estimates and references, disagree (exit 3).
    Inconsistent(String),
    /// File system or checkpoint problems (exit 4).
    Io(String),
    /// Any other module failure (exit 1).
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Inconsistent(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Inconsistent(m) | CliError::Io(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SequenceError> for CliError {
    fn from(e: SequenceError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CriteriaError> for CliError {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::OracleDisagreement { .. } => CliError::Inconsistent(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AtlasError> for CliError {
    fn from(e: AtlasError) -> Self {
        match e {
            AtlasError::Io(_) | AtlasError::CorruptCheckpoint(_) => CliError::Io(e.to_string()),
            AtlasError::Criteria(c) => c.into(),
            AtlasError::EmptyTally | AtlasError::IndexOverflow => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Criteria(c) => c.into(),
            GeometryError::Atlas(a) => a.into(),
            GeometryError::Sequence(s) => s.into(),
            GeometryError::WrongDimension(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<LiqiaoError> for CliError {
    fn from(e: LiqiaoError) -> Self {
        match e {
            LiqiaoError::NoSeparableSplit { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ConstraintArg> for Constraint {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::S => Constraint::S,
            ConstraintArg::P => Constraint::P,
        }
    }
}

impl From<LocusArg> for Locus {
    fn from(l: LocusArg) -> Self {
        match l {
            LocusArg::InteriorPpt => Locus::InteriorPpt,
            LocusArg::PptBoundary => Locus::PptBoundary,
        }
    }
}

/// Accepts `12345`, `1e8` or `2.5e6`; the value must be a whole number.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.trim().parse::<u64>() {
        return Ok(n);
    }
    let v: f64 = s.trim().parse().map_err(|_| format!("not a count: {s:?}"))?;
    if !(0.0..=u64::MAX as f64).contains(&v) || v.fract() != 0.0 {
        return Err(format!("not a whole non-negative count: {s:?}"));
    }
    Ok(v as u64)
}

fn parse_real_arg(s: &str) -> Result<f64, String> {
    states::parse_real(s).map_err(|e| e.to_string())
}

fn parse_predicate(s: &str) -> Result<Predicate, String> {
    s.trim().parse::<Predicate>().map_err(|e| e.to_string())
}

/// Runs one command, writing primary output to `--out` or `stdout` and
/// progress notes to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Estimate(a) => commands::estimate(a, stdout, stderr),
        Command::Classify(a) => commands::classify(a, stdout),
        Command::Cloud(a) => commands::cloud(a, stdout, stderr),
        Command::Surface(a) => commands::surface(a, stdout, stderr),
        Command::Bsa(a) => commands::bsa(a, stdout),
        Command::VerifyDecomposition(a) => commands::verify(a, stdout),
        Command::Reference(a) => commands::reference(a, stdout),
        Command::OracleCheck(a) => commands::oracle_check(a, stdout, stderr),
    }
}
