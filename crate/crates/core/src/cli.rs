//! Command-line front end. Kept in the library so the exit-code contract can
//! be tested without spawning processes.

use clap::{Parser, Subcommand, ValueEnum};

use crate::catalog;
use crate::checks::{default_checks, run_checks};
use crate::io::{export, load_definition, Definition};
use crate::report::{CheckError, CheckReport, RunOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "gcrf", about = "Integrability checks for generalized F-structures and their metric companions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Comma-separated check names; defaults to the definition's own list.
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub report: ReportFormat,
    /// Report zero wall time so that reports are byte-stable.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run checks on a JSON definition or on `catalog:<name>`.
    Check {
        target: String,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Built-in fixtures.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Write a fixture as a JSON definition.
    Export { target: String, path: String },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    /// Run a fixture's checks and compare with its expected verdicts.
    Run {
        name: String,
        #[command(flatten)]
        args: RunArgs,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome { stdout: String::new(), stderr: format!("error: {msg}\n"), code: EXIT_INPUT }
    }
}

fn options(base: RunOptions, args: &RunArgs) -> Result<RunOptions, String> {
    let opts = RunOptions {
        samples: args.samples.unwrap_or(base.samples),
        seed: args.seed.unwrap_or(base.seed),
        tol: args.tol.unwrap_or(base.tol),
        timing: !args.no_timing,
    };
    if opts.samples == 0 {
        return Err("--samples must be at least 1".into());
    }
    if !(opts.tol > 0.0) {
        return Err("--tol must be positive".into());
    }
    Ok(opts)
}

fn resolve(target: &str) -> Result<Definition, String> {
    match target.strip_prefix("catalog:") {
        Some(name) => catalog::get(name).map(|f| f.definition).map_err(|e| e.to_string()),
        None => load_definition(target).map_err(|e| e.to_string()),
    }
}

fn render(reports: &[CheckReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let mut s = String::new();
            for r in reports {
                s.push_str(&r.to_string());
                s.push('\n');
            }
            let failed = reports.iter().filter(|r| !r.pass).count();
            s.push_str(&format!("{} checks, {} failed\n", reports.len(), failed));
            s
        }
    }
}

fn check_error(e: CheckError) -> Outcome {
    Outcome::input_error(e)
}

fn run_check_command(target: &str, args: &RunArgs) -> Outcome {
    let def = match resolve(target) {
        Ok(d) => d,
        Err(e) => return Outcome::input_error(e),
    };
    let opts = match options(def.options, args) {
        Ok(o) => o,
        Err(e) => return Outcome::input_error(e),
    };
    let names = match &args.checks {
        Some(c) => c.clone(),
        None if !def.checks.is_empty() => def.checks.clone(),
        None => default_checks(&def),
    };
    if let Some(bad) = names.iter().find(|n| !crate::checks::CHECK_NAMES.contains(&n.as_str())) {
        return Outcome::input_error(format!("unknown check {bad:?}"));
    }
    match run_checks(&def, &names, &opts) {
        Ok(reports) => {
            let code = if reports.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL };
            Outcome { stdout: render(&reports, args.report), stderr: String::new(), code }
        }
        Err(e) => check_error(e),
    }
}

fn run_catalog(name: &str, args: &RunArgs) -> Outcome {
    let fx = match catalog::get(name) {
        Ok(f) => f,
        Err(e) => return Outcome::input_error(e),
    };
    let opts = match options(fx.definition.options, args) {
        Ok(o) => o,
        Err(e) => return Outcome::input_error(e),
    };
    let mut reports = Vec::new();
    let mut text = format!("{}: {}\n", fx.name, fx.description);
    let mut mismatches = 0;
    for (check, expected) in &fx.expected {
        if let Some(only) = &args.checks {
            if !only.iter().any(|c| c == check) {
                continue;
            }
        }
        let (got, report) = match fx.run(check, &opts) {
            Ok(x) => x,
            Err(e) => return check_error(e),
        };
        if got != *expected {
            mismatches += 1;
        }
        let mark = if got == *expected { "ok" } else { "MISMATCH" };
        match &report {
            Some(r) => text.push_str(&format!("{r}  expected {expected} {mark}\n")),
            None => text.push_str(&format!("{check:<22} {got}  expected {expected} {mark}\n")),
        }
        reports.extend(report);
    }
    let stdout = match args.report {
        ReportFormat::Json => render(&reports, ReportFormat::Json),
        ReportFormat::Text => text,
    };
    Outcome { stdout, stderr: String::new(), code: if mismatches == 0 { EXIT_PASS } else { EXIT_FAIL } }
}

fn run_export(target: &str, path: &str) -> Outcome {
    let def = match resolve(target) {
        Ok(d) => d,
        Err(e) => return Outcome::input_error(e),
    };
    match std::fs::write(path, export(&def).to_json()) {
        Ok(()) => Outcome { stdout: format!("wrote {path}\n"), ..Default::default() },
        Err(e) => Outcome::input_error(format!("cannot write {path}: {e}")),
    }
}

/// Parses `argv` (including the program name) and executes the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stdout: String::new(), stderr: text, code }
            } else {
                Outcome { stdout: text, stderr: String::new(), code }
            };
        }
    };
    match &cli.command {
        Command::Check { target, args } => run_check_command(target, args),
        Command::Catalog { action: CatalogAction::List } => {
            let mut s = String::new();
            for name in catalog::list() {
                let fx = catalog::get(name).expect("listed");
                s.push_str(&format!("{name:<30} {}\n", fx.description));
            }
            Outcome { stdout: s, ..Default::default() }
        }
        Command::Catalog { action: CatalogAction::Run { name, args } } => run_catalog(name, args),
        Command::Export { target, path } => run_export(target, path),
    }
}
