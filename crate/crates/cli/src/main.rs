use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fibcurv::search::Mode;
use fibcurv_cli::commands::{self, CliError, Format, Outcome, ParamFlags};
use fibcurv_cli::config::Config;

#[derive(Parser)]
#[command(name = "fibcurv", version, about = "Commuting-pair condition for homogeneous fibrations")]
struct Cli {
    /// TOML file overriding search settings and tolerances.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Params {
    /// cos,sin of theta, e.g. 3/5,4/5
    #[arg(long)]
    theta: Option<String>,
    /// cos,sin of phi
    #[arg(long)]
    phi: Option<String>,
    /// integers p,q
    #[arg(long)]
    pq: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Star,
    DoubleStar,
}

#[derive(Subcommand)]
enum Command {
    /// Classify chains and compare with the expected verdicts.
    Verify {
        /// Chain IDs (g/k/h) or spec files.
        targets: Vec<String>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical search for a witness pair, with exact verification.
    Search {
        target: String,
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "star")]
        mode: ModeArg,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        /// Also write the machine-readable result here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classification table for the whole catalog.
    Report {
        /// Only chains whose ID starts with this prefix.
        filter: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn flags(p: Params) -> ParamFlags {
    ParamFlags { theta: p.theta, phi: p.phi, pq: p.pq }
}

fn format(f: FormatArg) -> Format {
    match f {
        FormatArg::Table => Format::Table,
        FormatArg::Machine => Format::Machine,
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Verify { targets, all, params, format: f, out } => {
            commands::verify(&targets, all, &flags(params), format(f), out.as_deref())
        }
        Command::Search { target, params, mode, restarts, seed, budget, format: f, out } => {
            let mut cfg = config.search_config();
            cfg.restarts = restarts.unwrap_or(cfg.restarts);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.budget = budget.unwrap_or(cfg.budget);
            if cfg.restarts == 0 {
                return Err(CliError::Usage("--restarts must be at least 1".into()));
            }
            let mode = match mode {
                ModeArg::Star => Mode::Star,
                ModeArg::DoubleStar => Mode::DoubleStar,
            };
            commands::search_cmd(&target, &flags(params), mode, &cfg, format(f), out.as_ref())
        }
        Command::Report { filter, format: f, out } => commands::report(format(f), filter.as_deref(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    let outcome = run(Cli::parse()).unwrap_or_else(|e| Outcome::error(&e));
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.code as u8)
}
