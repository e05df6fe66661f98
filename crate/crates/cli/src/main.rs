use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use critlab_cli::config::{ExperimentConfig, TaskKind};
use critlab_cli::runner::{run_single, run_sweep, RunOptions};
use critlab_cli::CliError;

#[derive(Parser)]
#[command(name = "critlab", version, about = "Critical functions and concentration experiments on model manifolds")]
struct Cli {
    /// Experiment config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides [output] directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// RNG seed (overrides the config seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Run whatever task the config declares (a sweep if it has one).
    Run,
    Constants,
    Solve,
    Classify,
    FindCritical,
    Aubin,
    Concentrate,
    GreenMass,
    ConformalCheck,
    /// Run the config's [sweep] list.
    Sweep,
}

impl Command {
    fn task(self) -> Option<TaskKind> {
        Some(match self {
            Command::Constants => TaskKind::Constants,
            Command::Solve => TaskKind::Solve,
            Command::Classify => TaskKind::Classify,
            Command::FindCritical => TaskKind::FindCritical,
            Command::Aubin => TaskKind::Aubin,
            Command::Concentrate => TaskKind::Concentrate,
            Command::GreenMass => TaskKind::GreenMass,
            Command::ConformalCheck => TaskKind::ConformalCheck,
            Command::Run | Command::Sweep => return None,
        })
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let Some(path) = &cli.config else {
        return Err(CliError::Usage("--config <path> is required".into()));
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(PathBuf::from).unwrap_or_default();
    let cfg = ExperimentConfig::parse(&text, &base)?;
    if let Some(kind) = cli.command.task() {
        if kind != cfg.task {
            return Err(CliError::Usage(format!(
                "subcommand `{}` does not match the config task `{}`",
                kind.name(),
                cfg.task.name()
            )));
        }
    }
    let dir = cli.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let opts = RunOptions {
        seed: cli.seed,
        jobs: cli.jobs,
    };
    if cli.command == Command::Sweep || cfg.sweep.is_some() {
        return run_sweep(&cfg, &dir, &opts);
    }
    let out = run_single(&cfg, &dir, &opts)?;
    for line in &out.report {
        println!("{line}");
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("critlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
