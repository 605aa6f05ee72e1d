use std::path::PathBuf;
use std::process::ExitCode;

use accessor_core::report::{run, Command, RunFlags, EXIT_FAILURE};
use accessor_core::closure::DEFAULT_TOL;
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    /// Conditions 1-3 only.
    Check,
    /// Conditions plus the dynamical Lie algebra.
    Closure,
    /// Exact evaluation of the lemma identities.
    VerifyLemmas,
    /// Pulse synthesis for the config's task block.
    Synthesize,
    /// Everything.
    Report,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Check => Command::Check,
            Cmd::Closure => Command::Closure,
            Cmd::VerifyLemmas => Command::VerifyLemmas,
            Cmd::Synthesize => Command::Synthesize,
            Cmd::Report => Command::Report,
        }
    }
}

/// Controllability analysis of a qudit driven through a qubit-chain accessor.
#[derive(Debug, Parser)]
#[command(name = "accessor-ctrl", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Model description file.
    #[arg(long)]
    config: PathBuf,
    /// Relative acceptance threshold for the floating closure.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for the initial pulse amplitudes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact rational arithmetic for conditions and closure.
    #[arg(long)]
    exact: bool,
    /// Report wall times as null.
    #[arg(long)]
    no_timing: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_threads() {
    let Ok(v) = std::env::var("ACCESSOR_CTRL_THREADS") else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring ACCESSOR_CTRL_THREADS={v}"),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    init_threads();
    let flags = RunFlags {
        tol: args.tol,
        seed: args.seed,
        exact: args.exact,
        no_timing: args.no_timing,
    };
    let (result, code) = run(args.command.into(), &args.config, &flags);
    match result {
        Ok(report) => {
            let json = report.to_json();
            match &args.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &json) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(EXIT_FAILURE as u8);
                    }
                }
                None => print!("{json}"),
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
