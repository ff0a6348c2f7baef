//! Command-line front end. Exit codes: 0 success (or the tested condition
//! holds), 1 the condition fails or a check disagrees, 2 bad input, 3 type
//! error in an expression.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use blowup_cohomology::expr::{evaluate, parse_h11, Context, ExprError};
use blowup_cohomology::io::{builtin_json, load_map, load_model, BUILTIN_NAMES};
use blowup_cohomology::report::{example_json, example_text, reproduce_example, AnalysisReport};
use blowup_cohomology::{Error, PseudoIsoModel, VarietyModel};

#[derive(Parser)]
#[command(
    name = "blowcoh",
    version,
    about = "Exact cohomology of blowups of P3 and pseudo-isomorphisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical JSON of a built-in model (P3, X, Z) or map (JX).
    Builtin {
        name: String,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate an expression such as `triple(JX^*(H-E0))`.
    Eval {
        expr: String,
        /// Model name or file; defaults to the map's source, else X.
        #[arg(long)]
        model: Option<String>,
        /// Map name or file; defaults to JX when the model is X.
        #[arg(long)]
        map: Option<String>,
    },
    /// Condition (C), defect, mass and nef verdict for a divisor class.
    Analyze {
        #[arg(long, default_value = "JX")]
        map: String,
        /// Divisor class on the map's target, e.g. `2H-E0-E1-E2-E3`.
        #[arg(long)]
        theta: String,
        #[arg(long)]
        json: bool,
    },
    /// Re-derive the Cremona example and compare against reference tables.
    ReproducePaper {
        #[arg(long, default_value = "X")]
        model: String,
        #[arg(long, default_value = "JX")]
        map: String,
        #[arg(long)]
        json: bool,
    },
    /// Run consistency checks on a model, or load a map (which checks it).
    Validate {
        #[arg(long, conflicts_with = "map", required_unless_present = "map")]
        model: Option<String>,
        #[arg(long)]
        map: Option<String>,
    },
}

enum Failure {
    Input(String),
    Type(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => Failure::Type(format!("type error: {e}")),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Type(_) => Failure::Type(e.to_string()),
            ExprError::Parse(_) => Failure::Input(e.to_string()),
            ExprError::Eval(e) => e.into(),
        }
    }
}

fn model(spec: &str) -> Result<VarietyModel, Failure> {
    load_model(spec, None).map_err(|e| Failure::Input(format!("model {spec}: {e}")))
}

fn map(spec: &str) -> Result<PseudoIsoModel, Failure> {
    load_map(spec).map_err(|e| Failure::Input(format!("map {spec}: {e}")))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Builtin { name, output } => {
            let text = builtin_json(&name).ok_or_else(|| {
                Failure::Input(format!(
                    "unknown built-in {name:?}; expected one of {}",
                    BUILTIN_NAMES.join(", ")
                ))
            })?;
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Eval {
            expr,
            model: m,
            map: f,
        } => {
            let f = match (&f, &m) {
                (Some(spec), _) => Some(map(spec)?),
                (None, None) => Some(map("JX")?),
                (None, Some(spec)) if spec == "X" => Some(map("JX")?),
                (None, Some(_)) => None,
            };
            let model = match (&m, &f) {
                (Some(spec), _) => Arc::new(model(spec)?),
                (None, Some(f)) => f.source().clone(),
                (None, None) => unreachable!("a map is always chosen without --model"),
            };
            let ctx = Context {
                model: &model,
                map: f.as_ref().map(|f| (f.name(), f)),
            };
            println!("{}", evaluate(ctx, &expr)?.render(&model));
            Ok(0)
        }
        Command::Analyze {
            map: f,
            theta,
            json,
        } => {
            let f = map(&f)?;
            let theta = parse_h11(f.target(), &theta)?;
            let report = AnalysisReport::new(&f, &theta)?;
            if json {
                print_json(&report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            Ok(if report.condition_c { 0 } else { 1 })
        }
        Command::ReproducePaper {
            model: m,
            map: f,
            json,
        } => {
            let x = Arc::new(model(&m)?);
            let f = map(&f)?;
            let checks = reproduce_example(x, f.m11());
            if json {
                print_json(&example_json(&checks));
            } else {
                print!("{}", example_text(&checks));
            }
            Ok(if checks.iter().all(|c| c.passed) {
                0
            } else {
                1
            })
        }
        Command::Validate { model: m, map: f } => match (m, f) {
            (Some(spec), _) => {
                let report = model(&spec)?.validate();
                print!("{report}");
                Ok(if report.passed() { 0 } else { 1 })
            }
            (None, Some(spec)) => {
                let f = map(&spec)?;
                println!("PASS map {} loads and passes its invariants", f.name());
                Ok(0)
            }
            (None, None) => unreachable!("clap requires one of --model/--map"),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Type(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
    }
}
