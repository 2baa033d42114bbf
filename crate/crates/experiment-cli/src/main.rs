use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use experiment_cli::{parse_config, run_experiment, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "lpp-exp", version, about = "Last passage percolation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML config; its `experiment.command` is replaced by the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Passage values from the origin
    Sample,
    /// Gap sheets with CSV, binary and SVG exports
    Gap,
    /// Agreement of the geometric and gap classifications
    Classify,
    /// Busemann profiles, exceptional directions and the Busemann gap
    Busemann,
    /// Zero-set dimension and slice Brownianity
    Dim,
    /// Engine against exhaustive enumeration
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Sample => Command::Sample,
            Cmd::Gap => Command::Gap,
            Cmd::Classify => Command::Classify,
            Cmd::Busemann => Command::Busemann,
            Cmd::Dim => Command::Dim,
            Cmd::Verify => Command::Verify,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    return ExitCode::from(2);
                }
            };
            match parse_config(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
        }
        None => ExperimentConfig::new(cli.command.into(), 1),
    };
    cfg.experiment.command = cli.command.into();
    if let Some(s) = cli.seed {
        cfg.experiment.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.experiment.threads = Some(t);
    }
    if let Some(o) = cli.out {
        cfg.experiment.out = Some(o);
    }
    let out = cfg.experiment.out.clone().unwrap_or_else(|| PathBuf::from(format!("out-{}", cfg.command().name())));
    match run_experiment(&cfg, &out) {
        Ok(o) => {
            println!("{} artifacts in {}", o.manifest.artifacts.len(), o.dir.display());
            for (k, v) in &o.manifest.summaries {
                match v {
                    Some(v) => println!("{k} = {v}"),
                    None => println!("{k} = undefined"),
                }
            }
            if o.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("acceptance checks failed; see verify.json");
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
