//! `nanoqed` command-line front end.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::RunConfig;
use output::Artifacts;

#[derive(Debug)]
pub enum CliError {
    Config { field: String, message: String },
    Io { path: String, message: String },
    Model(nanoqed::Error),
}

impl CliError {
    pub fn config_field(field: &str, e: nanoqed::Error) -> Self {
        let field = match &e {
            nanoqed::Error::InvalidParameter { name, .. } => format!("{field}.{name}"),
            _ => field.to_string(),
        };
        CliError::Config {
            field,
            message: e.to_string(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Io { .. } => "io",
            CliError::Model(_) => "model",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config { field, message } => write!(f, "config field `{field}`: {message}"),
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
            CliError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<nanoqed::Error> for CliError {
    fn from(e: nanoqed::Error) -> Self {
        CliError::Model(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "nanoqed", version, about = "Transmon, cavity and nanoresonator simulator")]
struct Cli {
    /// JSON run configuration; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for the Monte-Carlo studies (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (overrides the config).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Device estimators: beam, coupling, temperatures, thermal photons.
    Estimate,
    /// Transmon transition frequencies versus flux.
    TransmonSpectrum,
    /// Steady state at one flux and probe frequency.
    Steady,
    /// Single-tone transmission map over flux and probe frequency.
    Sweep,
    /// Fit of the transmon linewidth near the nanoresonator.
    Linewidth,
    /// Admittance seen by the transmon and the radiative T1.
    Admittance,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Estimate => "estimate",
            Command::TransmonSpectrum => "transmon-spectrum",
            Command::Steady => "steady",
            Command::Sweep => "sweep",
            Command::Linewidth => "linewidth",
            Command::Admittance => "admittance",
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    cfg.validate()?;
    let threads = cfg.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    // A second initialisation in the same process is harmless; keep the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();

    let mut out = Artifacts::new(&cli.out, cli.command.name(), &cfg)?;
    match cli.command {
        Command::Estimate => commands::estimate(&cfg, &mut out)?,
        Command::TransmonSpectrum => commands::transmon_spectrum(&cfg, &mut out)?,
        Command::Steady => commands::steady(&cfg, &mut out)?,
        Command::Sweep => commands::sweep_map(&cfg, &mut out)?,
        Command::Linewidth => commands::linewidth(&cfg, &mut out)?,
        Command::Admittance => commands::admittance(&cfg, &mut out)?,
    }
    out.finish(&cfg, threads)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                log::info!("wrote {}", cli.out.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let doc = json!({
                "error": {
                    "kind": e.kind(),
                    "command": cli.command.name(),
                    "message": e.to_string(),
                }
            });
            let text = serde_json::to_string_pretty(&doc).expect("error serializes");
            eprintln!("{text}");
            if std::fs::create_dir_all(&cli.out).is_ok() {
                let _ = std::fs::write(cli.out.join("error.json"), text + "\n");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
