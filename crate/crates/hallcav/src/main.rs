use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hallcav::{parse_config, run, Mode, RunError};

/// Hofstadter spectra, edge-state topology and cavity-assisted lattice dynamics.
///
/// Exit codes: 0 success, 1 I/O error, 2 config error, 3 numerical abort,
/// 4 ambiguous topology.
#[derive(Parser)]
#[command(name = "hallcav", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bulk spectrum over all fluxes p/q with q <= q_max.
    Butterfly(RunArgs),
    /// Cylinder bands and edge-counted gap invariants.
    Edges(RunArgs),
    /// Time evolution of the cavity amplitude and atomic density matrix.
    Evolve(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; defaults to the config's `output`, then `<mode>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace one config value, e.g. `params.flux=2/5`. Repeatable.
    #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Butterfly(a) => (Mode::Butterfly, a),
        Command::Edges(a) => (Mode::Edges, a),
        Command::Evolve(a) => (Mode::Evolve, a),
    };
    match execute(mode, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(mode: Mode, args: &RunArgs) -> Result<(), RunError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|source| RunError::Io { path: args.config.clone(), source })?;
    let cfg = parse_config(&text, mode, &args.overrides)?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{mode}.csv")));
    run(&cfg, &out)?;
    Ok(())
}
