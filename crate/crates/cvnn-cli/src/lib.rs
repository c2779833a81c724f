//! Command-line front end: `classify`, `approximate`, `invariants` and
//! `floor`.
//!
//! Settings come from flags, then from a flat `key = value` config file,
//! then (for the seed only) from `CVNN_SEED`. Every JSON report carries the
//! resolved settings under `run_config`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cvnn::classifier::{classify, ClassifierConfig};
use cvnn::complexcore::{catalog_names, ExceptionalSet};
use cvnn::constructor::{lift_dimension, synthesize_deep, synthesize_shallow, Domain, LiftConfig, ShallowConfig};
use cvnn::targets::{target_names, Target};
use cvnn::verify::{check_network_invariant, error_floor_experiment, InvariantKind};
use cvnn::{find_activation, make_grid, ActivationSpec, Error, C64, VERSION};
use serde::Serialize;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUSED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "cvnn", version, about = "Universality tools for complex-valued neural networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide shallow and deep universality of a catalog activation.
    Classify(Flags),
    /// Synthesise a network approximating a target and certify its error.
    Approximate(Flags),
    /// Check a differential identity on random networks.
    Invariants(Flags),
    /// Tabulate least-squares error floors over widths.
    Floor(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long)]
    activation: Option<String>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    deep: bool,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    widths: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// `dbar_vanishes`, `d_vanishes` or `laplacian_power_vanishes(m)`.
    #[arg(long)]
    invariant: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the synthesised network as JSON.
    #[arg(long)]
    network_out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

/// Resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub activation: Option<String>,
    pub target: Option<String>,
    pub degree: usize,
    pub deep: bool,
    pub layers: usize,
    pub dims: usize,
    pub radius: f64,
    pub eps: f64,
    pub widths: Vec<usize>,
    pub seed: u64,
    pub invariant: String,
    pub trials: usize,
    pub tol: Option<f64>,
    pub format: String,
    pub out: Option<PathBuf>,
    pub library_version: String,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Refused(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Refused(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownActivation(_)
            | Error::UnknownTarget(_)
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::Format(_) => Self::Usage(e.to_string()),
            _ => Self::Refused(e.to_string()),
        }
    }
}

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected `key = value`", n + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

const CONFIG_KEYS: &[&str] = &[
    "activation", "target", "degree", "deep", "layers", "dims", "radius", "eps", "widths", "seed", "invariant", "trials",
    "tol", "out", "format",
];

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Usage(format!("invalid value `{v}` for `{key}`")))
}

fn parse_widths(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',').map(|w| parse_value("widths", w.trim())).collect()
}

fn resolve(command: &str, flags: Flags) -> Result<RunConfig, CliError> {
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text).map_err(CliError::Usage)?
        }
        None => BTreeMap::new(),
    };
    if let Some(k) = file.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
        return Err(CliError::Usage(format!("unknown config key `{k}`; expected one of {}", CONFIG_KEYS.join(", "))));
    }
    let get = |k: &str| file.get(k).map(String::as_str);
    fn pick<T: std::str::FromStr>(flag: Option<T>, key: &str, file: Option<&str>, default: T) -> Result<T, CliError> {
        match (flag, file) {
            (Some(v), _) => Ok(v),
            (None, Some(s)) => parse_value(key, s),
            (None, None) => Ok(default),
        }
    }
    let env_seed = match std::env::var("CVNN_SEED") {
        Ok(s) => Some(parse_value::<u64>("CVNN_SEED", s.trim())?),
        Err(_) => None,
    };
    let seed = match (flags.seed, get("seed")) {
        (Some(s), _) => s,
        (None, Some(s)) => parse_value("seed", s)?,
        (None, None) => env_seed.unwrap_or(0),
    };
    let widths = match (&flags.widths, get("widths")) {
        (Some(s), _) => parse_widths(s)?,
        (None, Some(s)) => parse_widths(s)?,
        (None, None) => vec![50, 100, 200],
    };
    let deep = flags.deep || get("deep").map(|v| parse_value::<bool>("deep", v)).transpose()?.unwrap_or(false);
    let format = flags.format.or_else(|| get("format").map(str::to_string)).unwrap_or_else(|| "json".into());
    if format != "json" && format != "csv" {
        return Err(CliError::Usage(format!("unknown format `{format}`; expected json or csv")));
    }
    Ok(RunConfig {
        command: command.to_string(),
        activation: flags.activation.or_else(|| get("activation").map(str::to_string)),
        target: flags.target.or_else(|| get("target").map(str::to_string)),
        degree: pick(flags.degree, "degree", get("degree"), 6)?,
        deep,
        layers: pick(flags.layers, "layers", get("layers"), if deep { 2 } else { 1 })?,
        dims: pick(flags.dims, "dims", get("dims"), 1)?,
        radius: pick(flags.radius, "radius", get("radius"), 1.0)?,
        eps: pick(flags.eps, "eps", get("eps"), 0.15)?,
        widths,
        seed,
        invariant: flags.invariant.or_else(|| get("invariant").map(str::to_string)).unwrap_or_else(|| "dbar_vanishes".into()),
        trials: pick(flags.trials, "trials", get("trials"), 20)?,
        tol: match (flags.tol, get("tol")) {
            (Some(t), _) => Some(t),
            (None, Some(s)) => Some(parse_value("tol", s)?),
            (None, None) => None,
        },
        format,
        out: flags.out.or_else(|| get("out").map(PathBuf::from)),
        library_version: VERSION.to_string(),
    })
}

fn activation(cfg: &RunConfig) -> Result<ActivationSpec, CliError> {
    let name = cfg
        .activation
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("--activation is required; catalog: {}", catalog_names().join(", "))))?;
    find_activation(name)
        .map_err(|_| CliError::Usage(format!("unknown activation `{name}`; catalog: {}", catalog_names().join(", "))))
}

fn target(cfg: &RunConfig, default: &str) -> Result<Target, CliError> {
    let name = cfg.target.as_deref().unwrap_or(default);
    Target::parse(name).map_err(|_| CliError::Usage(format!("unknown target `{name}`; available: {}", target_names().join(", "))))
}

/// Adds `run_config` to a JSON report.
fn with_echo<T: Serialize>(report: &T, cfg: &RunConfig) -> String {
    let mut value = serde_json::to_value(report).expect("reports serialise");
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("run_config".into(), serde_json::to_value(cfg).expect("configs serialise"));
    }
    let mut s = serde_json::to_string_pretty(&value).expect("values serialise");
    s.push('\n');
    s
}

fn emit(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn run_classify(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let sigma = activation(cfg)?;
    let ccfg = ClassifierConfig { seed: cfg.seed, tol: cfg.tol.unwrap_or(ClassifierConfig::default().tol), ..ClassifierConfig::default() };
    let report = classify(&sigma, &ccfg)?;
    emit(cfg, &with_echo(&report, cfg), out)
}

fn run_approximate(cfg: &RunConfig, network_out: Option<&PathBuf>, out: &mut dyn Write) -> Result<(), CliError> {
    let sigma = activation(cfg)?;
    let target = target(cfg, "cone")?;
    if cfg.dims == 0 || !(cfg.radius > 0.0) {
        return Err(CliError::Usage("--dims must be positive and --radius > 0".into()));
    }
    let domain = Domain { center: vec![C64::new(0.0, 0.0); cfg.dims], radius: cfg.radius };
    let (cert, network) = if cfg.deep {
        let lift = LiftConfig { eps: cfg.eps, seed: cfg.seed, ..LiftConfig::deep() };
        let (net, cert) = synthesize_deep(&sigma, &target, cfg.layers, &domain, &lift)?;
        (cert, net.to_json())
    } else if cfg.dims > 1 {
        let lift = LiftConfig { eps: cfg.eps, seed: cfg.seed, ..LiftConfig::default() };
        let (net, cert) = lift_dimension(&sigma, &target, &domain, &lift)?;
        (cert, net.to_network().to_json())
    } else {
        let scfg = ShallowConfig { seed: cfg.seed, ..ShallowConfig::default() };
        let (net, cert) = synthesize_shallow(&sigma, &target, &domain, cfg.degree, &scfg)?;
        (cert, net.to_network().to_json())
    };
    if let Some(path) = network_out {
        std::fs::write(path, network).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    emit(cfg, &with_echo(&cert, cfg), out)
}

fn run_invariants(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let sigma = activation(cfg)?;
    let kind: InvariantKind = cfg.invariant.parse()?;
    let grid = make_grid(&[C64::new(0.0, 0.0)], cfg.radius, 9, &ExceptionalSet::empty())?;
    let report = check_network_invariant(&sigma, cfg.layers, kind, &grid, cfg.trials, cfg.seed)?;
    emit(cfg, &with_echo(&report, cfg), out)?;
    let tol = cfg.tol.unwrap_or(match kind {
        InvariantKind::LaplacianPowerVanishes(_) => 1e-4,
        _ => 1e-5,
    });
    Ok(report.max_residual <= tol)
}

fn run_floor(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let sigma = activation(cfg)?;
    let target = target(cfg, "cone")?;
    let domain = Domain { center: vec![C64::new(0.0, 0.0); cfg.dims.max(1)], radius: cfg.radius };
    let table = error_floor_experiment(&sigma, &target, &cfg.widths, &domain, cfg.seed)?;
    let text = if cfg.format == "csv" { table.to_csv() } else { with_echo(&table, cfg) };
    emit(cfg, &text, out)
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code, writing reports to `stdout` unless `--out` is given.
pub fn run_cli_with<S: AsRef<str>>(argv: &[S], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    let (name, flags) = match cli.command {
        Command::Classify(f) => ("classify", f),
        Command::Approximate(f) => ("approximate", f),
        Command::Invariants(f) => ("invariants", f),
        Command::Floor(f) => ("floor", f),
    };
    let network_out = flags.network_out.clone();
    let result = resolve(name, flags).and_then(|cfg| match name {
        "classify" => run_classify(&cfg, stdout).map(|_| true),
        "approximate" => run_approximate(&cfg, network_out.as_ref(), stdout).map(|_| true),
        "invariants" => run_invariants(&cfg, stdout),
        _ => run_floor(&cfg, stdout).map(|_| true),
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(stderr, "invariant residual exceeds tolerance");
            EXIT_REFUSED
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Refused(_) => EXIT_REFUSED,
            }
        }
    }
}

/// [`run_cli_with`] on the process streams.
pub fn run_cli<S: AsRef<str>>(argv: &[S]) -> i32 {
    run_cli_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
