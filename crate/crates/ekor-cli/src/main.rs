use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ekor::Ctx;
use ekor_cli::{parse_config, recheck_report, render_json, render_text, run_analysis, AnalysisConfig, Command, RunError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Admissible sets, EKOR strata and classification verdicts for Coxeter data.
#[derive(Parser, Debug)]
#[command(name = "ekor", version)]
struct Cli {
    /// What to compute.
    #[arg(value_enum, required_unless_present = "recheck")]
    command: Option<Command>,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Cap on the admissible set size, overriding the config.
    #[arg(long)]
    budget: Option<usize>,
    /// Field sizes for the oracle, comma separated.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<u32>>,
    /// Re-verify the witnesses of a saved JSON report.
    #[arg(long, value_name = "REPORT")]
    recheck: Option<PathBuf>,
}

const USAGE: u8 = 1;
const BREACH: u8 = 2;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("ekor: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(USAGE);
        }
    };
    if let Some(path) = &cli.recheck {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(USAGE, format!("{}: {e}", path.display())),
        };
        return match recheck_report(&text) {
            Ok((n, failed)) if failed.is_empty() => {
                println!("recheck: {n} witnesses verified");
                ExitCode::SUCCESS
            }
            Ok((n, failed)) => {
                for f in &failed {
                    eprintln!("ekor: witness rejected: {f}");
                }
                fail(BREACH, format!("{} of {n} witnesses failed", failed.len()))
            }
            Err(e) => fail(USAGE, e),
        };
    }
    let command = cli.command.expect("clap enforces a command");
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return fail(USAGE, format!("{}: {e}", path.display())),
            };
            match parse_config(&text) {
                Ok(c) => c,
                Err(e) => return fail(USAGE, format!("{}: {e}", path.display())),
            }
        }
        None => AnalysisConfig::default(),
    };
    if let Some(b) = cli.budget {
        cfg.budget.max_size = b;
    }
    if let Some(q) = cli.q {
        cfg.q = q;
    }
    let ctx = Ctx { budget: cfg.budget, ..Ctx::default() };
    let report = match run_analysis(&cfg, command, ctx) {
        Ok(r) => r,
        Err(RunError::Usage(m)) => return fail(USAGE, m),
        Err(RunError::Invariant(m)) => return fail(BREACH, format!("invariant breach: {m}")),
    };
    let body = match cli.format {
        Format::Json => render_json(&report),
        Format::Text => render_text(&report),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                return fail(USAGE, format!("{}: {e}", path.display()));
            }
        }
        None => print!("{body}"),
    }
    let failures = report.failures();
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &failures {
            eprintln!("ekor: {f}");
        }
        ExitCode::from(BREACH)
    }
}
