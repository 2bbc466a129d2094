//! Command-line front end: `dglift <command> <instance-file> [flags]`.
//!
//! Every command prints one JSON document with sorted keys and a top-level
//! `"format": 1`. Exit codes: 0 for success or a positive verdict, 1 for a negative
//! verdict, 2 for input errors.

pub mod grammar;
pub mod instance;
pub mod report;
pub mod selftest;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::ext::{ext_group, truncated_homology};
use crate::lift::{lift, obstruction_solve, unique_iso, LiftError};
use instance::{parse_instance, parse_phi, Instance};
use report::{
    amap_json, expansion_json, group_json, instance_summary, instance_text, phi_text, scalars_json,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl InputError {
    fn to_json(&self) -> Value {
        match self {
            InputError::Syntax {
                line,
                column,
                message,
            } => {
                json!({"kind": "syntax", "line": line, "column": column, "message": message})
            }
            InputError::Semantic { line, message } => {
                json!({"kind": "semantic", "line": line, "message": message})
            }
            InputError::Io { path, message } => {
                json!({"kind": "io", "path": path, "message": message})
            }
            InputError::Invalid(message) => json!({"kind": "invalid", "message": message}),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dglift",
    version,
    about = "Lifting obstructions and liftings of semi-free DG modules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Add the elapsed wall-clock time to the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate an instance.
    Validate { instance: PathBuf },
    /// The obstruction Delta_N = j(d^N).
    Delta { instance: PathBuf },
    /// Ext^i_B(N, N).
    Ext {
        instance: PathBuf,
        #[arg(long = "i", allow_negative_numbers = true)]
        i: i64,
    },
    /// Construct a lifting with its certifying isomorphism.
    Lift { instance: PathBuf },
    /// Compare two liftings through a DG B-isomorphism between their extensions.
    Unique {
        instance: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[arg(long)]
        phi: PathBuf,
    },
    /// Homology of N in degrees up to --max.
    Homology {
        instance: PathBuf,
        #[arg(long)]
        max: i64,
    },
    /// Randomized checks on generated instances.
    Selftest {
        #[arg(long, env = "DGLIFT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Delta { .. } => "delta",
            Command::Ext { .. } => "ext",
            Command::Lift { .. } => "lift",
            Command::Unique { .. } => "unique",
            Command::Homology { .. } => "homology",
            Command::Selftest { .. } => "selftest",
        }
    }
}

/// A report body and the exit code that goes with it.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome {
            report,
            code: EXIT_OK,
        }
    }

    fn negative(report: Value) -> Self {
        Outcome {
            report,
            code: EXIT_NEGATIVE,
        }
    }
}

pub fn read_instance(path: &Path) -> Result<Instance, InputError> {
    parse_instance(&read(path)?)
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn run(cmd: &Command) -> Result<Outcome, InputError> {
    match cmd {
        Command::Validate { instance } => {
            let inst = read_instance(instance)?;
            Ok(Outcome::ok(
                json!({"valid": true, "instance": instance_summary(inst.module())}),
            ))
        }
        Command::Delta { instance } => {
            let inst = read_instance(instance)?;
            let n = inst.module();
            let ob = obstruction_solve(n).map_err(|e| InputError::Invalid(e.to_string()))?;
            Ok(Outcome::ok(json!({
                "delta": expansion_json(n.space(), &ob.delta),
                "zero": ob.delta.is_zero(),
                "class_vanishes": ob.gamma.is_some(),
            })))
        }
        Command::Ext { instance, i } => {
            let inst = read_instance(instance)?;
            let e = ext_group(inst.module(), *i).map_err(|e| InputError::Invalid(e.to_string()))?;
            Ok(Outcome::ok(json!({
                "index": e.index,
                "group": group_json(&e.group),
                "chain_dim": e.chain_dim,
            })))
        }
        Command::Lift { instance } => {
            let inst = read_instance(instance)?;
            let n = inst.module();
            let space = n.space();
            match lift(n) {
                Ok(res) => {
                    let lifted = res
                        .lifted_module(n)
                        .map_err(|e| InputError::Invalid(e.to_string()))?;
                    Ok(Outcome::ok(json!({
                        "liftable": true,
                        "certified": res.certified,
                        "gamma": expansion_json(space, &res.gamma),
                        "phi": expansion_json(space, &res.phi),
                        "phi_inverse": expansion_json(space, &res.phi_inverse),
                        "lifted_differential": amap_json(space, &res.lifted_diff.values),
                        "lifted_instance": instance_text(&lifted),
                        "phi_file": phi_text(space, &res.phi),
                    })))
                }
                Err(LiftError::NotLiftable { witness }) => {
                    let delta = space
                        .j(n.diff())
                        .map_err(|e| InputError::Invalid(e.to_string()))?;
                    Ok(Outcome::negative(json!({
                        "liftable": false,
                        "delta": expansion_json(space, &delta),
                        "witness": scalars_json(&witness),
                    })))
                }
                Err(e) => Ok(Outcome::negative(
                    json!({"liftable": false, "failure": e.to_string()}),
                )),
            }
        }
        Command::Unique {
            instance,
            other,
            phi,
        } => {
            let m = read_instance(instance)?;
            let m2 = read_instance(other)?;
            let phi = parse_phi(&read(phi)?, m.space())?;
            match unique_iso(m.module(), m2.module(), &phi) {
                Ok(res) => {
                    let space = m.space();
                    Ok(Outcome::ok(json!({
                        "isomorphic": true,
                        "psi": amap_json(space, &res.psi),
                        "psi_inverse": amap_json(space, &res.psi_inverse),
                        "gamma": expansion_json(space, &res.gamma),
                    })))
                }
                Err(LiftError::NoBoundaryWitness) => Ok(Outcome::negative(json!({
                    "isomorphic": false,
                    "failure": LiftError::NoBoundaryWitness.to_string(),
                }))),
                Err(e) => Err(InputError::Invalid(e.to_string())),
            }
        }
        Command::Homology { instance, max } => {
            let inst = read_instance(instance)?;
            let entries = truncated_homology(inst.module(), *max)
                .map_err(|e| InputError::Invalid(e.to_string()))?;
            let entries: Vec<Value> = entries
                .iter()
                .map(|h| {
                    json!({
                        "degree": h.degree,
                        "group": group_json(&h.group),
                        "near_truncation": h.near_truncation,
                    })
                })
                .collect();
            Ok(Outcome::ok(json!({"max": max, "entries": entries})))
        }
        Command::Selftest { seed, cases } => {
            let (report, all_passed) = selftest::run_selftest(*seed, *cases);
            Ok(if all_passed {
                Outcome::ok(report)
            } else {
                Outcome::negative(report)
            })
        }
    }
}

/// Runs a command and stamps the report with the format version and command name.
pub fn execute(cmd: &Command) -> Outcome {
    let mut outcome = run(cmd).unwrap_or_else(|e| Outcome {
        report: json!({"error": e.to_json()}),
        code: EXIT_INPUT,
    });
    outcome.report["format"] = json!(1);
    outcome.report["command"] = json!(cmd.name());
    outcome
}

pub fn render(report: &Value, pretty: bool) -> String {
    let text = if pretty {
        serde_json::to_string_pretty(report)
    } else {
        serde_json::to_string(report)
    };
    text.expect("JSON values always serialize")
}

/// Parses the process arguments, runs the command and prints the report.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let start = Instant::now();
    let mut outcome = execute(&cli.command);
    if cli.timing {
        outcome.report["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    if let Some(err) = outcome.report.get("error") {
        eprintln!(
            "dglift: {}",
            err["message"].as_str().unwrap_or("input error")
        );
    }
    println!("{}", render(&outcome.report, cli.pretty));
    outcome.code
}
