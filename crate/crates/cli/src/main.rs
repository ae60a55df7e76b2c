//! `tmoments`: asymptotic moments of transducer input and output sums.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tmoments::combinatorics::{
    cycles_of_component, cycles_of_transducer, spanning_functional_digraphs, DEFAULT_CYCLE_BUDGET,
    DEFAULT_DIGRAPH_BUDGET,
};
use tmoments::model::{final_component, period};
use tmoments::report::{self, AnalysisOptions};
use tmoments::{builtins, exec, oracle, rational, Error, Execution, Transducer};

#[derive(Parser)]
#[command(
    name = "tmoments",
    version,
    about = "Asymptotic moments of transducer input and output sums"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis: moments, classification and certificates.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Require the functional-digraph route and its derivative identities.
        #[arg(long)]
        check_all: bool,
        /// Append the exact oracle slope table up to this length.
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Simple cycles with length, input sum and output sum.
    Cycles {
        #[command(flatten)]
        common: Common,
        /// Cycles of the whole transducer instead of the final component.
        #[arg(long)]
        whole: bool,
    },
    /// Functional digraphs with one and two components, and their sums.
    Digraphs {
        #[command(flatten)]
        common: Common,
    },
    /// Exact finite-length moments and their first differences.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
    },
    /// Check that the transducer is well formed and analyzable.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Common {
    /// Builtin transducer: naf, wnaf, gray, block01, block11, block10m01, simple.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    builtin: Option<String>,
    /// JSON transducer specification.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Builtin parameter as key=value, e.g. w=4 or a=(1,0,0,0).
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, String)>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Maximum number of functional digraphs to enumerate.
    #[arg(long, default_value_t = DEFAULT_DIGRAPH_BUDGET)]
    budget: u64,
    /// Maximum number of simple cycles to enumerate.
    #[arg(long, default_value_t = DEFAULT_CYCLE_BUDGET)]
    cycle_budget: usize,
    /// Worker threads for the enumerations; 1 runs sequentially.
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_param(text: &str) -> Result<(String, String), String> {
    text.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got `{text}`"))
}

impl Common {
    fn load(&self) -> tmoments::Result<Transducer> {
        match (&self.builtin, &self.file) {
            (Some(name), _) => builtins::builtin(name, &self.params),
            (None, Some(path)) => {
                if !self.params.is_empty() {
                    return Err(Error::BadParam("--param applies to builtins only".into()));
                }
                Transducer::load(path)
            }
            (None, None) => unreachable!("clap requires a source"),
        }
    }

    fn execution(&self) -> Execution {
        match self.threads {
            Some(1) => Execution::Sequential,
            Some(n) => {
                exec::configure_threads(n);
                Execution::Parallel
            }
            None => Execution::Parallel,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::UnknownBuiltin(_) | Error::BadParam(_) => 2,
        Error::DuplicateTransition { .. }
        | Error::Incomplete { .. }
        | Error::UnknownState { .. }
        | Error::AlphabetTooSmall { .. }
        | Error::SymbolNotInAlphabet { .. } => 3,
        Error::NotFinallyConnected { .. } | Error::Periodic { .. } | Error::NotWeaklyConnected => 4,
        Error::BudgetExceeded { .. } | Error::CycleBudgetExceeded { .. } => 5,
        _ => 1,
    }
}

fn emit(format: Format, value: serde_json::Value, text: impl FnOnce() -> String) {
    match format {
        Format::Json => print!("{}", report::to_json_string(&value)),
        Format::Text => print!("{}", text()),
    }
}

fn run(command: Command) -> tmoments::Result<()> {
    match command {
        Command::Analyze {
            common,
            check_all,
            n_max,
        } => {
            let t = common.load()?;
            let options = AnalysisOptions {
                digraph_budget: common.budget,
                cycle_budget: common.cycle_budget,
                check_all,
                oracle_n_max: n_max,
                exec: common.execution(),
            };
            let analysis = report::analyze(&t, &options)?;
            emit(common.format, report::report_json(&analysis), || {
                report::report_text(&analysis)
            });
        }
        Command::Cycles { common, whole } => {
            let t = common.load()?;
            let cycles = if whole {
                cycles_of_transducer(&t, common.cycle_budget)?
            } else {
                cycles_of_component(&final_component(&t)?, common.cycle_budget)?
            };
            let value = json!({
                "scope": if whole { "transducer" } else { "final-component" },
                "count": cycles.len(),
                "cycles": cycles.iter().map(report::cycle_json).collect::<Vec<_>>(),
            });
            emit(common.format, value, || {
                let mut out = format!("{} simple cycles\n", cycles.len());
                for c in &cycles {
                    out.push_str(&format!("  {}\n", report::cycle_text(c)));
                }
                out
            });
        }
        Command::Digraphs { common } => {
            let t = common.load()?;
            let fc = final_component(&t)?;
            let (d1, d2) = spanning_functional_digraphs(&fc, common.budget, common.execution())?;
            let total: u64 = report::digraph_space(&t)?.parse().expect("within budget");
            emit(common.format, report::digraphs_json(&d1, &d2, total), || {
                report::digraphs_text(&d1, &d2, total)
            });
        }
        Command::Oracle { common, n_max, n_min } => {
            let t = common.load()?;
            let slopes = oracle::slope_report(&t, n_min, n_max.max(n_min), common.execution())?;
            let m = &slopes.moments;
            let value = json!({
                "e2": rational::to_string(&m.e2),
                "v2": rational::to_string(&m.v2),
                "c": rational::to_string(&m.c),
                "rows": report::slope_rows_json(&slopes.rows),
            });
            emit(common.format, value, || {
                format!(
                    "e2 = {}\nv2 = {}\nc = {}\n{}",
                    rational::to_display(&m.e2),
                    rational::to_display(&m.v2),
                    rational::to_display(&m.c),
                    report::slope_rows_text(&slopes.rows)
                )
            });
        }
        Command::Validate { common } => {
            let t = common.load()?;
            t.require_moment_alphabet()?;
            let fc = final_component(&t)?;
            let p = period(&fc);
            if p != 1 {
                return Err(Error::Periodic { period: p });
            }
            let value = json!({
                "valid": true,
                "states": t.state_count(),
                "alphabet_size": t.alphabet_size(),
                "final_component": fc.states(),
                "period": p,
                "weakly_connected": t.is_weakly_connected(),
            });
            emit(common.format, value, || {
                format!(
                    "valid: {} states, K = {}, final component {:?}, aperiodic\n",
                    t.state_count(),
                    t.alphabet_size(),
                    fc.states()
                )
            });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
