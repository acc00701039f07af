use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use uavshare::algorithms::{AllocationResult, MethodTag};
use uavshare::capacity::ConnectivityMode;
use uavshare::experiments::{
    emit_csv, run_mc_check, run_sweep, run_validation, write_csv, SweepSpec,
};
use uavshare::scenario::ScenarioConfig;
use uavshare::{Error, Result};

#[derive(Parser)]
#[command(
    name = "uavshare",
    version,
    about = "Spectrum sharing and power allocation for UAV links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario (or, for `sweep`, sweep-spec) file in TOML
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the seed
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Connectivity mode: mc-combined, mc-sum or sc
    #[arg(long)]
    mode: Option<ConnectivityMode>,
    /// Monte Carlo samples (mc-check: per pair; sweep: per pair outage, 0 = closed form)
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Allocate one scenario and print the results
    Allocate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated methods (default: all)
        #[arg(long, value_delimiter = ',')]
        methods: Vec<MethodTag>,
    },
    /// Run a parameter sweep and write CSV
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Run the small-instance oracle suite and scenario invariant checks
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Compare closed forms with Monte Carlo on the allocated pairs
    McCheck {
        #[command(flatten)]
        common: Common,
    },
}

fn load_scenario(common: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(m) = common.mode {
        cfg.mode = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct AllocateOutput {
    seed: u64,
    mode: ConnectivityMode,
    n_hcu: usize,
    n_lcu_pairs: usize,
    admissible_cells: usize,
    results: Vec<AllocationResult>,
}

/// Outcome of a subcommand that ran to completion.
enum Outcome {
    Ok,
    ChecksFailed,
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Allocate { common, methods } => {
            let cfg = load_scenario(&common)?;
            let (_, ctx) = cfg.prepare()?;
            let methods = if methods.is_empty() {
                MethodTag::ALL.to_vec()
            } else {
                methods
            };
            let results = methods
                .iter()
                .map(|&m| ctx.run(m))
                .collect::<Result<Vec<_>>>()?;
            let out = AllocateOutput {
                seed: cfg.seed,
                mode: cfg.mode,
                n_hcu: cfg.n_hcu,
                n_lcu_pairs: cfg.n_lcu_pairs,
                admissible_cells: ctx.matrix.feasible_count(),
                results,
            };
            let text = toml::to_string(&out).map_err(|e| Error::Parse(e.to_string()))?;
            write_text(common.out.as_deref(), &text)?;
            Ok(Outcome::Ok)
        }
        Command::Sweep { common } => {
            let path = common
                .config
                .as_ref()
                .ok_or_else(|| Error::Config("sweep requires --config <spec.toml>".into()))?;
            let mut spec = SweepSpec::load(path)?;
            if let Some(s) = common.seed {
                spec.base.seed = s;
            }
            if let Some(m) = common.mode {
                spec.base.mode = m;
                spec.modes.clear();
            }
            if let Some(n) = common.samples {
                spec.samples = n;
            }
            let result = run_sweep(&spec)?;
            for f in &result.failures {
                eprintln!("seed failed: {f}");
            }
            match &common.out {
                Some(p) => emit_csv(&result, p)?,
                None => write_csv(&result, std::io::stdout().lock())?,
            }
            Ok(Outcome::Ok)
        }
        Command::Validate { common } => {
            let cfg = load_scenario(&common)?;
            let report = run_validation(&cfg)?;
            write_text(common.out.as_deref(), &report.to_string())?;
            Ok(if report.all_passed() {
                Outcome::Ok
            } else {
                Outcome::ChecksFailed
            })
        }
        Command::McCheck { common } => {
            let cfg = load_scenario(&common)?;
            let samples = common.samples.unwrap_or(200_000);
            if samples == 0 {
                return Err(Error::Config("--samples must be >= 1".into()));
            }
            let report = run_mc_check(&cfg, samples)?;
            write_text(common.out.as_deref(), &report.to_string())?;
            Ok(Outcome::Ok)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        "config" => 3,
        "input" => 4,
        "numeric" => 5,
        "scenario" => 6,
        _ => 7,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error ({}): {e}", e.category());
            ExitCode::from(exit_code(&e))
        }
    }
}
