use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use contagion_lab::commands::{run, Command, Output};
use contagion_lab::config::{ExperimentConfig, Overrides, QOverride};
use contagion_lab::report::{save_tables, write_table, Provenance};
use contagion_lab::LabError;

/// Percolation experiments on independent-cascade contagion and audits of
/// count-release mechanisms.
#[derive(Parser, Debug)]
#[command(name = "contagion-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for trial randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for CSV outputs; tables go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// A rate, a comma list, or `start:stop:count`.
    #[arg(long, global = true)]
    q: Option<QOverride>,
    /// Worker threads; all cores by default. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Mean sizes of the two largest components of the percolated graph.
    Components,
    /// Component fractions across a grid of transmission rates.
    Sweep,
    /// How many nodes sit in the giant component above each frequency threshold.
    Membership,
    /// Wasserstein mechanism scale and a comparison mechanism's test error.
    Audit,
    /// Accuracy of the giant-component inference attack.
    Attack,
    /// Build the configured graph and print its canonical edge list.
    Gen,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Components => Command::Components,
            Sub::Sweep => Command::Sweep,
            Sub::Membership => Command::Membership,
            Sub::Audit => Command::Audit,
            Sub::Attack => Command::Attack,
            Sub::Gen => Command::Gen,
        }
    }
}

fn execute(cli: Cli) -> Result<(), LabError> {
    let path = cli
        .config
        .ok_or_else(|| LabError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(&path)?;
    cfg.apply(&Overrides {
        seed: cli.seed,
        out: cli.out,
        trials: cli.trials,
        q: cli.q,
    });
    let command = Command::from(cli.command);

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(LabError::Config("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| LabError::Config(e.to_string()))?;
    let output = pool.install(|| run(command, &cfg))?;

    let prov = Provenance {
        command: command.name(),
        hash: cfg.hash(),
    };
    let stdout_err = |source| LabError::Write {
        path: "<stdout>".into(),
        source,
    };
    match (output, &cfg.out) {
        (Output::Tables(tables), Some(dir)) => save_tables(&tables, &prov, dir),
        (Output::Tables(tables), None) => {
            let mut out = std::io::stdout().lock();
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    writeln!(out).map_err(stdout_err)?;
                }
                write_table(t, &prov, &mut out).map_err(stdout_err)?;
            }
            Ok(())
        }
        (Output::Graph(text), Some(dir)) => {
            let path = dir.join("graph.txt");
            std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(&path, text))
                .map_err(|source| LabError::Write { path, source })
        }
        (Output::Graph(text), None) => std::io::stdout().write_all(text.as_bytes()).map_err(stdout_err),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("contagion-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
