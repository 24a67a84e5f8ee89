#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::CliError;
use crate::config::{load_config, ConfigError, Format, RunConfig};

/// Structured-bath Brownian motion: spectral density, memory kernel,
/// response, correlations and homodyne spectroscopy.
#[derive(Parser)]
#[command(name = "bathforge", version)]
struct Cli {
    /// Run configuration (.toml or .json); defaults to k = -2.30,
    /// Omega_R/2pi = 0.914 MHz, T = 300 K, Q = 215.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format (overrides output.format).
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// J_k(omega) and its log-slope on the frequency grid
    Spectral,
    /// Dissipation kernel mu_k(t) on the time grid
    Kernel,
    /// Stiffness and mass shifts, dressed mass, bare frequency, linewidth
    Renorm,
    /// Susceptibility and self-energy on the frequency grid
    Response,
    /// Position and momentum correlations: full, pole and memory tail
    Correlations,
    /// Synthetic homodyne records and the reconstructed bath
    Spectroscopy,
    /// Figure data for the spectral density (2) or the kernel (3)
    Figures {
        #[arg(long)]
        which: u8,
    },
    /// Oracle checks; prints PASS/FAIL per check and exits 1 on any failure
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectral => "spectral",
            Command::Kernel => "kernel",
            Command::Renorm => "renorm",
            Command::Response => "response",
            Command::Correlations => "correlations",
            Command::Spectroscopy => "spectroscopy",
            Command::Figures { .. } => "figures",
            Command::Selftest => "selftest",
        }
    }
}

fn threads_from_env() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("BATHFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(ConfigError::Invalid {
            field: "BATHFORGE_THREADS",
            message: format!("expected a positive integer, got '{raw}'"),
        })
    })?;
    bathforge::sweep::configure_threads(n)?;
    Ok(())
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.to_string_lossy().into_owned();
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    threads_from_env()?;
    let cfg = resolve(cli)?;
    let tables = match &cli.command {
        Command::Spectral => commands::spectral(&cfg)?,
        Command::Kernel => commands::kernel(&cfg)?,
        Command::Renorm => commands::renorm(&cfg)?,
        Command::Response => commands::response(&cfg)?,
        Command::Correlations => commands::correlations(&cfg)?,
        Command::Spectroscopy => commands::spectroscopy(&cfg)?,
        Command::Figures { which } => commands::figures(*which)?,
        Command::Selftest => {
            let checks = selftest::run();
            let failed = checks.iter().filter(|c| !c.pass).count();
            for c in &checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("selftest: {} passed, {failed} failed", checks.len() - failed);
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    };
    let dir = PathBuf::from(&cfg.output.dir);
    for t in &tables {
        let path = output::emit(&dir, cli.command.name(), &cfg, t)?;
        println!("{}", path.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("ERROR 2: {}", e.to_string().trim_end());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = e.exit_code();
            eprintln!("ERROR {code}: {e}");
            ExitCode::from(code as u8)
        }
    }
}
