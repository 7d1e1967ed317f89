use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use wittkz_core::arrangement::{self, Arrangement, FIXTURE_NAMES};
use wittkz_core::milnor::GELFAND_FIXTURE;
use wittkz_core::suite::{self, Report, RunConfig, SuiteError};

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Operator identities on random E-forms
    DrwIdentities,
    /// W_a of the point, the E^0 closed form and Fil normal forms
    DrwNormalForm,
    /// Build the Orlik-Solomon algebra of an arrangement
    OsBuild,
    /// Compare psi images with the Orlik-Solomon algebra
    PsiVerify,
    /// Cohomology of the Aomoto complex
    Aomoto,
    /// Check a Milnor K derivation (the bundled Gelfand one by default)
    MilnorVerify,
    /// Rank probe of chi on degree-2 symbols
    MilnorProbe,
    /// The hypergeometric cocycle identities
    KzCocycle,
    /// Flatness of the KZ-Coulomb connection
    KzFlatness,
    /// The bosonization chain map
    Bosonization,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct Flags {
    /// JSON or TOML run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    p: Option<u64>,
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Fixture name or path to a JSON file
    #[arg(long = "in", global = true)]
    input: Option<String>,
    /// Write the JSON report here
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t, global = true)]
    format: Format,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long = "N", global = true)]
    level: Option<u32>,
    /// "symbolic" or comma-separated highest weights
    #[arg(long, global = true)]
    m: Option<String>,
    /// "symbolic" or a rational value
    #[arg(long, global = true)]
    kappa: Option<String>,
    /// standard or printed
    #[arg(long, global = true)]
    casimir: Option<String>,
    /// Comma-separated Aomoto weights
    #[arg(long, global = true)]
    weights: Option<String>,
    #[arg(long, global = true)]
    budget: Option<usize>,
}

#[derive(Parser)]
#[command(name = "wittkz", version, about = "Exact checks for de Rham-Witt forms, arrangements and the KZ cocycle")]
struct Invocation {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

/// Raised for anything wrong with the inputs; mapped to exit code 2.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    if is_toml {
        return toml::from_str(&text).with_context(|| format!("parsing {}", path.display()));
    }
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn merge(flags: &Flags) -> Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    cfg.p = flags.p.or(cfg.p);
    cfg.precision = flags.precision.or(cfg.precision);
    cfg.seed = flags.seed.unwrap_or(cfg.seed);
    cfg.samples = flags.samples.or(cfg.samples);
    cfg.input = flags.input.clone().or(cfg.input);
    cfg.n = flags.n.or(cfg.n);
    cfg.level = flags.level.or(cfg.level);
    if let Some(m) = &flags.m {
        cfg.m = Some(Value::String(m.clone()));
    }
    if let Some(k) = &flags.kappa {
        cfg.kappa = Some(Value::String(k.clone()));
    }
    if let Some(c) = &flags.casimir {
        cfg.casimir = Some(serde_json::from_value(Value::String(c.clone())).map_err(|_| anyhow!("unknown Casimir variant {c:?}"))?);
    }
    if let Some(w) = &flags.weights {
        cfg.weights = Some(w.split(',').map(|s| s.trim().to_string()).collect());
    }
    cfg.budget = flags.budget.or(cfg.budget);
    Ok(cfg)
}

/// A path to a JSON file if it exists, otherwise a bundled fixture name.
fn read_input(input: &str) -> Result<Option<Value>> {
    let path = Path::new(input);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {input}"))?;
        return Ok(Some(serde_json::from_str(&text).with_context(|| format!("parsing {input}"))?));
    }
    Ok(None)
}

fn fixture_name(input: &str) -> &str {
    let base = Path::new(input).file_name().and_then(|s| s.to_str()).unwrap_or(input);
    base.strip_suffix(".json").unwrap_or(base)
}

fn load_arrangement(input: &str) -> Result<Arrangement> {
    match read_input(input)? {
        Some(v) => Ok(Arrangement::from_json(&v)?),
        None => arrangement::fixture(fixture_name(input))
            .map_err(|_| anyhow!("{input:?} is neither a file nor a bundled fixture ({})", FIXTURE_NAMES.join(", "))),
    }
}

fn run_suite(command: Command, cfg: &RunConfig) -> std::result::Result<Report, ConfigError> {
    let input = cfg.input.as_deref();
    let arr = |default: &str| load_arrangement(input.unwrap_or(default)).map_err(ConfigError);
    let suite_err = |e: SuiteError| ConfigError(e.into());
    match command {
        Command::DrwIdentities => suite::drw_identities(cfg).map_err(suite_err),
        Command::DrwNormalForm => suite::drw_normal_form(cfg).map_err(suite_err),
        Command::OsBuild => suite::os_build(&arr("threelines")?, cfg).map_err(suite_err),
        Command::PsiVerify => {
            let arrs = match input {
                Some(i) => vec![(fixture_name(i).to_string(), arr("")?)],
                None => FIXTURE_NAMES
                    .iter()
                    .map(|n| (n.to_string(), arrangement::fixture(n).expect("bundled")))
                    .filter(|(_, a)| a.len() <= 6 && a.dim() <= 3)
                    .collect(),
            };
            suite::psi_verify(&arrs, cfg).map_err(suite_err)
        }
        Command::Aomoto => suite::aomoto(&arr("threelines")?, cfg).map_err(suite_err),
        Command::MilnorVerify => {
            let derivation = match input {
                Some(i) => read_input(i).map_err(ConfigError)?.ok_or_else(|| ConfigError(anyhow!("no such file: {i}")))?,
                None => serde_json::from_str(GELFAND_FIXTURE).expect("bundled fixture parses"),
            };
            suite::milnor_verify(&derivation, cfg).map_err(suite_err)
        }
        Command::MilnorProbe => suite::milnor_probe(&arr("threelines")?, cfg).map_err(suite_err),
        Command::KzCocycle => suite::kz_cocycle(cfg).map_err(suite_err),
        Command::KzFlatness => suite::kz_flatness(cfg).map_err(suite_err),
        Command::Bosonization => suite::bosonization(cfg).map_err(suite_err),
    }
}

fn emit(report: &Report, flags: &Flags) -> Result<()> {
    if let Some(out) = &flags.out {
        fs::write(out, report.to_json() + "\n").with_context(|| format!("writing {}", out.display()))?;
    }
    match flags.format {
        Format::Text => print!("{}", report.summary()),
        Format::Json => println!("{}", report.to_json()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let inv = Invocation::parse();
    let cfg = match merge(&inv.flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let report = match run_suite(inv.command, &cfg) {
        Ok(r) => r,
        Err(ConfigError(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, &inv.flags) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
