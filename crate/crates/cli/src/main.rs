mod commands;
mod config;
mod output;

use anyhow::Result;
use clap::{Parser, Subcommand};
use commands::{Ctx, Status};
use config::{ConfigError, RunConfig};
use output::Sink;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CHECK: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const DEFAULT_SEED: u64 = 2024;

/// Contour-integral actions of regularized semigroups and their verification.
#[derive(Parser, Debug)]
#[command(name = "regsemi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: config `output`, else ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random probe states and matrix substrates (default 2024).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the node count of every contour.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Multiply residual tolerances.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weight sequence tables, associated function and condition report.
    Weights,
    /// Quadrature nodes and weights of the configured contour.
    ContourDump,
    /// Apply G(phi) or G_alpha(phi) to a state.
    Action,
    /// Mollified semigroup on a time grid, law residuals and derivative table.
    Semigroup,
    /// Full verification battery with negative controls.
    Verify,
    /// Run a built-in worked example.
    Example { name: Option<String> },
}

impl Command {
    fn label(&self) -> &'static str {
        match self {
            Command::Weights => "weights",
            Command::ContourDump => "contour-dump",
            Command::Action => "action",
            Command::Semigroup => "semigroup",
            Command::Verify => "verify",
            Command::Example { .. } => "example",
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    if !(cli.tol_scale > 0.0 && cli.tol_scale.is_finite()) {
        return config::config_err(format!("--tol-scale must be positive, got {}", cli.tol_scale));
    }
    if cli.nodes == Some(0) {
        return config::config_err("--nodes must be positive");
    }
    let (cfg, base) = match &cli.config {
        Some(p) => (RunConfig::load(p)?, p.parent().map(PathBuf::from).unwrap_or_default()),
        None => (RunConfig::default(), PathBuf::from(".")),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let out = cli.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let digest = commands::run_digest(&cfg, cli.command.label(), seed, cli.nodes, cli.tol_scale);
    let tol = commands::effective_tolerances(&cfg, cli.tol_scale);
    let sink = Sink::new(&out, digest, tol)?;
    let mut ctx = Ctx { cfg, base, seed, nodes: cli.nodes, tol_scale: cli.tol_scale, sink };
    let status = match &cli.command {
        Command::Weights => commands::weights(&mut ctx)?,
        Command::ContourDump => commands::contour_dump(&mut ctx)?,
        Command::Action => commands::action(&mut ctx)?,
        Command::Semigroup => commands::semigroup(&mut ctx)?,
        Command::Verify => commands::verify_battery(&mut ctx)?,
        Command::Example { name } => commands::example(&mut ctx, name.as_deref())?,
    };
    for p in ctx.sink.written() {
        println!("{}", p.display());
    }
    Ok(status)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() || e.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_CONFIG;
    }
    match e.downcast_ref::<regsemi::Error>() {
        Some(regsemi::Error::InvalidParameter(_) | regsemi::Error::Domain(_) | regsemi::Error::Mode(_)) => EXIT_CONFIG,
        Some(_) => EXIT_NUMERIC,
        None => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => {
            eprintln!("check failure");
            ExitCode::from(EXIT_CHECK)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
