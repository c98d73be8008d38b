//! `cml`: evaluate, compare and prove over finite Markov kernels.

use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cml_core::equivalence::{bisimilar, bisimulation};
use cml_core::formula::{encode_abs, encode_down, encode_up};
use cml_core::harness::{self, Budget};
use cml_core::metric::distance;
use cml_core::mutation::Mutation;
use cml_core::orders::compare;
use cml_core::proofcheck::{check, translate_proof, Direction, Proof};
use cml_core::semantics::{default_grid, eval, sat, search_model_limited, DEFAULT_SEARCH_LIMIT};
use cml_core::{parse, Formula, Kernel, Rate};

const SCHEMA: &str = "cml-kit/1";

#[derive(Parser)]
#[command(name = "cml", version, about = "Parameterized continuous Markovian logic over finite kernels")]
struct Cli {
    /// Print compact, schema-tagged JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// States satisfying a formula at ε.
    Eval {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        formula: String,
        #[arg(short, long, default_value = "0")]
        epsilon: String,
    },
    /// Whether one state satisfies a formula at ε (exit 1 when not).
    Sat {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        state: String,
        #[arg(short, long)]
        formula: String,
        #[arg(short, long, default_value = "0")]
        epsilon: String,
    },
    /// Whether every state satisfies a formula at ε (exit 1 when not).
    Valid {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        formula: String,
        #[arg(short, long, default_value = "0")]
        epsilon: String,
    },
    /// Bounded search for a model of a formula (exit 1 when none is found).
    Search {
        #[arg(short, long)]
        formula: String,
        #[arg(short, long, default_value = "0")]
        epsilon: String,
        #[arg(long, default_value_t = 2)]
        max_states: usize,
        /// Comma-separated rates; defaults to the formula's indices closed under sums.
        #[arg(long)]
        grid: Option<String>,
        /// Most candidate kernels to examine.
        #[arg(long, default_value_t = DEFAULT_SEARCH_LIMIT)]
        limit: u64,
        /// Print the witness kernel as Graphviz.
        #[arg(long)]
        dot: bool,
    },
    /// Bisimulation classes, or whether two states are bisimilar.
    Bisim {
        #[arg(short, long, visible_alias = "m1")]
        model: PathBuf,
        #[arg(long)]
        m2: Option<PathBuf>,
        #[arg(long, requires = "s2")]
        s1: Option<String>,
        #[arg(long, requires = "s1")]
        s2: Option<String>,
        /// Print the kernel as Graphviz.
        #[arg(long)]
        dot: bool,
    },
    /// Whether s1 ≺_ε s2 (or ≺⁺_ε with --essential).
    Order {
        #[arg(long, visible_alias = "model")]
        m1: PathBuf,
        #[arg(long)]
        m2: Option<PathBuf>,
        #[arg(long)]
        s1: String,
        #[arg(long)]
        s2: String,
        #[arg(short, long)]
        epsilon: String,
        #[arg(long)]
        essential: bool,
    },
    /// Behavioral distance between two states.
    Distance {
        #[arg(long, visible_alias = "model")]
        m1: PathBuf,
        #[arg(long)]
        m2: Option<PathBuf>,
        #[arg(long)]
        s1: String,
        #[arg(long)]
        s2: String,
    },
    /// Shift the indices of a formula.
    #[command(group(ArgGroup::new("mode").required(true).args(["down", "up", "abs"])))]
    Encode {
        #[arg(long)]
        down: bool,
        #[arg(long)]
        up: bool,
        #[arg(long)]
        abs: bool,
        #[arg(short, long)]
        epsilon: String,
        #[arg(short, long)]
        formula: String,
    },
    /// Check a proof file (exit 1 when rejected).
    Prove {
        proof: PathBuf,
        /// Translate the proof before checking and print the result.
        #[arg(long, value_enum, requires = "by")]
        translate: Option<Shift>,
        #[arg(long)]
        by: Option<String>,
        /// Also check that the conclusion is valid on these models.
        #[arg(short, long)]
        model: Vec<PathBuf>,
    },
    /// Run property suites (exit 1 when any fails).
    Verify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "small")]
        budget: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Where to write the JSON report.
        #[arg(long, default_value = "cml-verify-report.json")]
        report: PathBuf,
        /// Inject a named fault into the checked code.
        #[arg(long)]
        mutation: Option<String>,
        /// Run every mutation against its detecting suites instead.
        #[arg(long, conflicts_with_all = ["mutation", "suite"])]
        mutations: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Shift {
    Up,
    Down,
}

enum Failure {
    Usage(String),
    Internal(String),
}

type Answer = Result<bool, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn load_model(path: &Path) -> Result<Kernel, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Kernel::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse(text).map_err(|e| usage(format!("formula `{text}`: {e}")))
}

fn rate(text: &str) -> Result<Rate, Failure> {
    text.parse().map_err(|e| usage(format!("rate `{text}`: {e}")))
}

struct Out {
    json: bool,
}

impl Out {
    fn emit(&self, mut value: Value, text: impl FnOnce() -> String) {
        if self.json {
            value.as_object_mut().expect("object").insert("schema".into(), SCHEMA.into());
            println!("{value}");
        } else {
            println!("{}", text());
        }
    }
}

fn run(cli: Cli) -> Answer {
    let out = Out { json: cli.json };
    match cli.command {
        Command::Eval { model, formula: f, epsilon } => {
            let k = load_model(&model)?;
            let f = formula(&f)?;
            let states = k.names_of(&eval(&k, &f, &rate(&epsilon)?));
            out.emit(json!({ "states": states }), || format!("{{{}}}", states.join(", ")));
            Ok(true)
        }
        Command::Sat { model, state, formula: f, epsilon } => {
            let k = load_model(&model)?;
            let holds = sat(&k, &state, &formula(&f)?, &rate(&epsilon)?).map_err(usage)?;
            out.emit(json!({ "state": state, "holds": holds }), || holds.to_string());
            Ok(holds)
        }
        Command::Valid { model, formula: f, epsilon } => {
            let k = load_model(&model)?;
            let ext = eval(&k, &formula(&f)?, &rate(&epsilon)?);
            let failing = k.names_of(&ext.complement());
            let valid = failing.is_empty();
            out.emit(json!({ "valid": valid, "failing": failing }), || {
                if valid {
                    "valid".to_string()
                } else {
                    format!("not valid; fails at {{{}}}", failing.join(", "))
                }
            });
            Ok(valid)
        }
        Command::Search { formula: f, epsilon, max_states, grid, limit, dot } => {
            let f = formula(&f)?;
            let e = rate(&epsilon)?;
            let grid = match grid {
                Some(g) => g.split(',').map(|s| rate(s.trim())).collect::<Result<Vec<_>, _>>()?,
                None => default_grid(&f, &e),
            };
            let found = search_model_limited(&f, &e, max_states, &grid, limit).map_err(usage)?;
            match found {
                Some(w) if dot && !out.json => {
                    print!("{}", w.kernel.to_dot());
                    Ok(true)
                }
                Some(w) => {
                    let model = serde_json::to_value(w.kernel.to_spec()).expect("spec serializes");
                    out.emit(json!({ "found": true, "state": w.state, "model": model }), || {
                        format!("{} in {}", w.state, w.kernel.to_json())
                    });
                    Ok(true)
                }
                None => {
                    out.emit(json!({ "found": false }), || {
                        format!("no model with at most {max_states} states over the grid")
                    });
                    Ok(false)
                }
            }
        }
        Command::Bisim { model, m2, s1, s2, dot } => {
            let k1 = load_model(&model)?;
            if let (Some(a), Some(b)) = (s1, s2) {
                let k2 = match &m2 {
                    Some(p) => load_model(p)?,
                    None => k1.clone(),
                };
                let same = bisimilar(&k1, &a, &k2, &b).map_err(usage)?;
                out.emit(json!({ "bisimilar": same }), || same.to_string());
                return Ok(same);
            }
            if m2.is_some() {
                return Err(usage("--m2 needs --s1 and --s2"));
            }
            if dot && !out.json {
                print!("{}", k1.to_dot());
                return Ok(true);
            }
            let p = bisimulation(&k1);
            let blocks = p.names(&k1);
            out.emit(json!({ "blocks": blocks, "rounds": p.rounds() }), || {
                blocks
                    .iter()
                    .map(|b| format!("{{{}}}", b.join(", ")))
                    .collect::<Vec<_>>()
                    .join(" ")
            });
            Ok(true)
        }
        Command::Order { m1, m2, s1, s2, epsilon, essential } => {
            let k1 = load_model(&m1)?;
            let k2 = match &m2 {
                Some(p) => load_model(p)?,
                None => k1.clone(),
            };
            let e = rate(&epsilon)?;
            let v = compare(&k1, &s1, &k2, &s2, &e, essential).map_err(usage)?;
            let symbol = if essential { "≺⁺" } else { "≺" };
            out.emit(
                json!({ "holds": v.holds, "essential": essential, "epsilon": e.to_string(), "witness_size": v.witness_size }),
                || {
                    let not = if v.holds { "" } else { "not " };
                    format!("{not}{s1} {symbol}_{e} {s2}")
                },
            );
            Ok(v.holds)
        }
        Command::Distance { m1, m2, s1, s2 } => {
            let k1 = load_model(&m1)?;
            let k2 = match &m2 {
                Some(p) => load_model(p)?,
                None => k1.clone(),
            };
            let d = distance(&k1, &s1, &k2, &s2).map_err(|e| match e {
                cml_core::metric::MetricError::Kernel(k) => usage(k),
                other => Failure::Internal(other.to_string()),
            })?;
            out.emit(json!({ "distance": d.value.to_string() }), || format!("d({s1}, {s2}) = {}", d.value));
            Ok(true)
        }
        Command::Encode { down, up, abs: _, epsilon, formula: f } => {
            let f = formula(&f)?;
            let e = rate(&epsilon)?;
            let g = if down {
                encode_down(&f, &e)
            } else if up {
                encode_up(&f, &e)
            } else {
                encode_abs(&f, &e)
            };
            out.emit(json!({ "formula": g.to_string() }), || g.to_string());
            Ok(true)
        }
        Command::Prove { proof, translate, by, model } => {
            let text = fs::read_to_string(&proof).map_err(|e| usage(format!("{}: {e}", proof.display())))?;
            let mut p = Proof::from_json(&text).map_err(|e| usage(format!("{}: {e}", proof.display())))?;
            if let Some(shift) = translate {
                let e = rate(by.as_deref().expect("clap requires --by"))?;
                let direction = match shift {
                    Shift::Up => Direction::Up,
                    Shift::Down => Direction::Down,
                };
                p = translate_proof(&p, &e, direction).map_err(usage)?;
            }
            let result = check(&p);
            let diagnostics: Vec<Value> = match &result {
                Ok(()) => vec![],
                Err(ds) => ds.iter().map(|d| json!({ "line": d.line, "message": d.message })).collect(),
            };
            let accepted = result.is_ok();
            let mut validity = Vec::new();
            for path in &model {
                let k = load_model(path)?;
                let failing = k.names_of(&eval(&k, &p.conclusion, &p.epsilon).complement());
                validity.push((path.display().to_string(), failing));
            }
            let sound = validity.iter().all(|(_, f)| f.is_empty());
            let mut value = json!({
                "accepted": accepted,
                "epsilon": p.epsilon.to_string(),
                "conclusion": p.conclusion.to_string(),
                "diagnostics": diagnostics,
                "valid_on": validity.iter().map(|(m, f)| json!({ "model": m, "failing": f })).collect::<Vec<_>>(),
            });
            if translate.is_some() {
                value["proof"] = p.to_json_value();
            }
            out.emit(value, || {
                let mut lines = Vec::new();
                if translate.is_some() {
                    lines.push(p.to_json());
                }
                match &result {
                    Ok(()) => lines.push(format!("accepted at ε={}: {}", p.epsilon, p.conclusion)),
                    Err(ds) => {
                        lines.push("rejected".to_string());
                        lines.extend(ds.iter().map(|d| format!("  {d}")));
                    }
                }
                for (m, f) in &validity {
                    if f.is_empty() {
                        lines.push(format!("valid on {m}"));
                    } else {
                        lines.push(format!("NOT valid on {m}: fails at {{{}}}", f.join(", ")));
                    }
                }
                lines.join("\n")
            });
            Ok(accepted && sound)
        }
        Command::Verify { suite, budget, seed, report, mutation, mutations } => {
            let budget: Budget = budget.parse().map_err(usage)?;
            if mutations {
                let matrix = harness::mutation_matrix(&budget, seed);
                let all_caught = matrix.iter().all(|(_, c)| !c.is_empty());
                let value = json!({
                    "mutations": matrix.iter().map(|(m, c)| json!({
                        "mutation": m.name(),
                        "detectors": harness::detectors(*m),
                        "caught_by": c,
                    })).collect::<Vec<_>>(),
                });
                write_report(&report, &value)?;
                out.emit(value, || {
                    matrix
                        .iter()
                        .map(|(m, c)| format!("{m}: caught by {}", if c.is_empty() { "nothing".into() } else { c.join(", ") }))
                        .collect::<Vec<_>>()
                        .join("\n")
                });
                return Ok(all_caught);
            }
            let mutation: Option<Mutation> = mutation.map(|m| m.parse()).transpose().map_err(usage)?;
            let reports = if suite == "all" {
                harness::suite_names()
                    .map(|n| harness::run_suite_with(n, &budget, seed, mutation).expect("registered"))
                    .collect::<Vec<_>>()
            } else {
                vec![harness::run_suite_with(&suite, &budget, seed, mutation).map_err(usage)?]
            };
            let passed = reports.iter().all(|r| r.passed());
            let value = json!({
                "budget": budget.name,
                "seed": seed,
                "passed": passed,
                "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            write_report(&report, &value)?;
            out.emit(value, || {
                let mut text: Vec<String> = reports.iter().map(|r| r.to_string()).collect();
                text.push(format!("report written to {}", report.display()));
                text.join("\n")
            });
            Ok(passed)
        }
    }
}

fn write_report(path: &Path, value: &Value) -> Result<(), Failure> {
    let mut value = value.clone();
    value.as_object_mut().expect("object").insert("schema".into(), SCHEMA.into());
    let text = serde_json::to_string_pretty(&value).expect("report serializes");
    fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// `-m1 a.json` style flags become `--m1 a.json`.
fn normalize(args: impl Iterator<Item = String>) -> Vec<String> {
    args.map(|a| match a.as_str() {
        "-m1" | "-m2" | "-s1" | "-s2" => format!("-{a}"),
        _ => a,
    })
    .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize(std::env::args())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(Failure::Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(Err(Failure::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
        Err(_) => ExitCode::from(3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbered_short_flags_become_long() {
        let args = ["cml", "distance", "-m1", "a.json", "-s1", "m", "-m", "-s"].map(String::from);
        assert_eq!(
            normalize(args.into_iter()),
            ["cml", "distance", "--m1", "a.json", "--s1", "m", "-m", "-s"].map(String::from)
        );
    }
}
