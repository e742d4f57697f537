//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::builtin;
use crate::commands::{self, Mode};
use crate::error::{CliError, CliResult};
use crate::render;
use crate::scenario::{self, Overrides, Scenario};

#[derive(Debug, Parser)]
#[command(name = "qobserve", version, about = "Observability analysis for quantum control scenarios")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalFlags {
    /// Rank tolerance, replacing the scenario's `rank_tol`.
    #[arg(long, global = true, env = "QOBSERVE_TOL")]
    pub tol: Option<f64>,
    /// Largest number of measurements reported per order.
    #[arg(long, global = true)]
    pub max_k: Option<usize>,
    /// Seed for sampled experiments and output noise.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Permutation,
    Ancilla,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Algebra, observability spaces and verdicts for one or more scenarios.
    Analyze {
        /// Scenario files or `builtin:NAME`.
        #[arg(required = true)]
        scenarios: Vec<String>,
    },
    /// Whether two named states can be told apart with `k` measurements.
    Distinguish {
        scenario: String,
        state_a: String,
        state_b: String,
        #[arg(short, long, default_value_t = 1)]
        k: usize,
    },
    /// Runs a named script from a named initial state.
    Simulate {
        scenario: String,
        #[arg(long)]
        script: String,
        #[arg(long)]
        state: String,
    },
    /// Recovers a state from simulated measurement outputs.
    Reconstruct {
        scenario: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// Prints a built-in scenario, or lists them.
    Examples {
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

/// What a run produced: a rendered report, an error, or both (a report
/// whose expectations failed is still printed).
#[derive(Debug)]
pub struct Outcome {
    pub rendered: Option<String>,
    pub error: Option<CliError>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        self.error.as_ref().map_or(0, CliError::exit_code)
    }
}

fn json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn emit<T: Serialize>(format: Format, doc: &T, text: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Json => json(doc),
        Format::Text => text(doc),
    }
}

impl GlobalFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            tol: self.tol,
            max_k: self.max_k,
            seed: self.seed,
        }
    }

    fn load(&self, reference: &str) -> CliResult<Scenario> {
        scenario::load(reference, &self.overrides())
    }
}

#[derive(Serialize)]
struct CatalogEntry<'a> {
    name: &'a str,
    summary: &'a str,
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok((rendered, error)) => Outcome {
            rendered: Some(rendered),
            error,
        },
        Err(e) => Outcome {
            rendered: None,
            error: Some(e),
        },
    }
}

fn dispatch(cli: &Cli) -> CliResult<(String, Option<CliError>)> {
    let g = &cli.global;
    let f = g.format;
    match &cli.command {
        Command::Analyze { scenarios } => {
            let docs = analyze_batch(g, scenarios)?;
            let failed: Vec<String> = docs
                .iter()
                .filter(|d| !d.failed_expectations().is_empty())
                .map(|d| format!("{} ({})", d.scenario, d.failed_expectations().join(", ")))
                .collect();
            let error = (!failed.is_empty()).then(|| CliError::Expectation {
                scenario: "analyze".into(),
                fields: failed.join("; "),
            });
            let rendered = if docs.len() == 1 {
                emit(f, &docs[0], render::analyze)
            } else {
                emit(f, &docs, |d| render::batch(d))
            };
            Ok((rendered, error))
        }
        Command::Distinguish {
            scenario,
            state_a,
            state_b,
            k,
        } => {
            let s = g.load(scenario)?;
            let doc = commands::distinguish(&s, state_a, state_b, *k)?;
            Ok((emit(f, &doc, render::distinguish), None))
        }
        Command::Simulate { scenario, script, state } => {
            let s = g.load(scenario)?;
            let doc = commands::simulate(&s, script, state)?;
            Ok((emit(f, &doc, render::simulate), None))
        }
        Command::Reconstruct { scenario, mode } => {
            let s = g.load(scenario)?;
            let mode = match mode {
                ModeArg::Permutation => Mode::Permutation,
                ModeArg::Ancilla => Mode::Ancilla,
            };
            let doc = commands::reconstruct(&s, mode)?;
            Ok((emit(f, &doc, render::reconstruct), None))
        }
        Command::Examples { name, list } => match (name, list) {
            (Some(name), false) => {
                let doc = builtin::scenario(name)
                    .ok_or_else(|| CliError::validation("NAME", format!("unknown built-in scenario '{name}'")))?;
                Ok((json(&doc), None))
            }
            _ => {
                let entries: Vec<CatalogEntry> = builtin::CATALOG
                    .iter()
                    .map(|(name, summary)| CatalogEntry { name, summary })
                    .collect();
                Ok((emit(f, &entries, |_| render::catalog(builtin::CATALOG)), None))
            }
        },
    }
}

/// Loads every scenario first, then analyzes them in parallel. Results keep
/// the input order; the first failure (in input order) wins.
fn analyze_batch(g: &GlobalFlags, references: &[String]) -> CliResult<Vec<commands::AnalyzeDoc>> {
    let loaded = references.iter().map(|r| g.load(r)).collect::<CliResult<Vec<_>>>()?;
    let results: Vec<CliResult<commands::AnalyzeDoc>> = std::thread::scope(|scope| {
        let handles: Vec<_> = loaded
            .iter()
            .map(|s| scope.spawn(move || commands::analyze(s)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("analysis thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}
