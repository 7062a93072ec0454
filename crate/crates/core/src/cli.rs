//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the run completes but the answer is a
//! domain failure (violations, infeasible demand, solver limits), 2 on usage,
//! I/O or scenario parse errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::demand::augment_all;
use crate::report::{Format, Report, ReportStatus};
use crate::scenario::{parse_scenario, Scenario};
use crate::synthesis::{brute_force_optimum, synthesize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vodnet", version, about = "Validate and synthesize video-on-demand network topologies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check graph structure and any flows listed in the scenario.
    Validate(RunArgs),
    /// Choose physical links and route every request at minimum occupied bandwidth.
    Synthesize(RunArgs),
    /// Enumerate every link subset for the reference optimum (small scenarios only).
    Oracle(RunArgs),
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Scenario file (JSON).
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario's simplex pivot limit.
    #[arg(long)]
    max_pivots: Option<usize>,
    /// Overrides the scenario's branch-and-bound node limit.
    #[arg(long)]
    max_nodes: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Machine,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Machine => Format::Machine,
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let (command, args) = match &cli.command {
        Command::Validate(a) => ("validate", a),
        Command::Synthesize(a) => ("synthesize", a),
        Command::Oracle(a) => ("oracle", a),
    };
    let mut scenario = match load(&args.scenario) {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(stderr, "vodnet {command}: {msg}");
            return EXIT_USAGE;
        }
    };
    if matches!(args.max_pivots, Some(0)) || matches!(args.max_nodes, Some(0)) {
        let _ = writeln!(stderr, "vodnet {command}: limits must be at least 1");
        return EXIT_USAGE;
    }
    if let Some(v) = args.max_pivots {
        scenario.options.milp.simplex.max_pivots = v;
    }
    if let Some(v) = args.max_nodes {
        scenario.options.milp.max_nodes = v;
    }

    let outcome = match &cli.command {
        Command::Validate(_) => Ok(Report::validation(&scenario)),
        Command::Synthesize(_) => synthesize(&scenario.graph, &scenario.commodities, &scenario.options)
            .map(|r| Report::synthesis(&r, &scenario.graph)),
        Command::Oracle(_) => augment_all(scenario.graph.physical(), &scenario.commodities)
            .map_err(Into::into)
            .and_then(|aug| {
                brute_force_optimum(&aug, &scenario.roles(), &scenario.commodities, &scenario.options)
            })
            .map(|o| Report::oracle(&o, &scenario.graph)),
    };
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "vodnet {command}: {e}");
            return EXIT_DOMAIN;
        }
    };

    let text = report.render(args.format.into());
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let _ = writeln!(stderr, "vodnet {command}: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }

    let ok = match report.status {
        ReportStatus::Clean | ReportStatus::Optimal => report.validation.is_empty(),
        ReportStatus::Violations | ReportStatus::Infeasible | ReportStatus::Unbounded => false,
    };
    if ok {
        EXIT_OK
    } else {
        if report.status == ReportStatus::Violations {
            let _ = writeln!(stderr, "vodnet {command}: {} violation(s)", report.validation.len());
        } else if report.status != ReportStatus::Optimal {
            let _ = writeln!(stderr, "vodnet {command}: no feasible routing");
        } else {
            let _ = writeln!(stderr, "vodnet {command}: solution failed its own checks");
        }
        EXIT_DOMAIN
    }
}

fn load(path: &Path) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))
}
