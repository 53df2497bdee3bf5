use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use sbpdiss_cli::config::Command as Cmd;
use sbpdiss_cli::output::write_all;
use sbpdiss_cli::{parse_config, run_command, ConfigError, RunError};

#[derive(Parser)]
#[command(name = "sbpdiss", version, about = "Volume-dissipation experiments for SBP discretizations")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default `sbpdiss-out/<command>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the configured RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the invariant suite.
    Verify(Common),
    /// Eigenvalues of the semi-discrete Jacobian.
    Spectra(Common),
    /// Grid-convergence study for linear advection.
    Convergence(Common),
    /// One-dimensional run with functional histories.
    Run1d(Common),
    /// Isentropic-vortex errors per grid.
    Vortex(Common),
    /// Small Kelvin-Helmholtz run reporting the crash time.
    KhiDemo(Common),
    /// Write D, Q, H and E.
    DumpOperator(Common),
    /// Write the undivided difference, B and the dense dissipation.
    DumpDissipation(Common),
}

impl Sub {
    fn split(&self) -> (Cmd, &Common) {
        match self {
            Sub::Verify(c) => (Cmd::Verify, c),
            Sub::Spectra(c) => (Cmd::Spectra, c),
            Sub::Convergence(c) => (Cmd::Convergence, c),
            Sub::Run1d(c) => (Cmd::Run1d, c),
            Sub::Vortex(c) => (Cmd::Vortex, c),
            Sub::KhiDemo(c) => (Cmd::KhiDemo, c),
            Sub::DumpOperator(c) => (Cmd::DumpOperator, c),
            Sub::DumpDissipation(c) => (Cmd::DumpDissipation, c),
        }
    }
}

const VALIDATION: u8 = 2;
const INVARIANT: u8 = 3;
const CRASH: u8 = 4;

fn fail(code: u8, record: serde_json::Value) -> ExitCode {
    eprintln!("{record}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = cli.command.split();

    let text = match &common.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                return fail(VALIDATION, json!({"error": "io", "path": path, "message": e.to_string()}));
            }
        },
        None => String::new(),
    };
    let mut cfg = match parse_config(&text, Some(cmd)) {
        Ok(c) => c,
        Err(e @ ConfigError::Parse { line, column, .. }) => {
            return fail(VALIDATION, json!({"error": "parse", "line": line, "column": column, "message": e.to_string()}));
        }
        Err(e @ ConfigError::Validation { .. }) => {
            let ConfigError::Validation { field, .. } = &e else { unreachable!() };
            return fail(VALIDATION, json!({"error": "validation", "field": field, "message": e.to_string()}));
        }
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(VALIDATION, json!({"error": "validation", "field": "threads", "message": e.to_string()}));
        }
    }
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("sbpdiss-out").join(cmd.name()));

    let outcome = match run_command(&cfg) {
        Ok(o) => o,
        Err(RunError::Setup(msg)) => {
            return fail(VALIDATION, json!({"error": "validation", "field": "config", "message": msg}));
        }
        Err(RunError::Runtime(msg)) => {
            return fail(CRASH, json!({"error": "runtime", "command": cmd.name(), "message": msg}));
        }
    };
    let status = if outcome.passed { "ok" } else { "invariant-failure" };
    if let Err(e) = write_all(&out, &cfg, &outcome.result, status) {
        return fail(CRASH, json!({"error": "io", "path": out, "message": e.to_string()}));
    }
    println!("{} {}: {status} ({})", cmd.name(), cfg.hash(), out.display());
    if !outcome.passed {
        let fails: Vec<_> = outcome
            .result
            .table("verify")
            .map(|t| t.rows.iter().filter(|r| r[4] == false.into()).map(|r| format!("{} {}", r[0].csv(), r[1].csv())).collect())
            .unwrap_or_default();
        return fail(INVARIANT, json!({"error": "invariant", "failed": fails}));
    }
    ExitCode::SUCCESS
}
