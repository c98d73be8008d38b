//! Formula enumeration, random kernels and the property suites.

mod oracle;
mod proofs;
mod shrink;
mod suites;

pub use oracle::{abs_pairs, definable_sets, logical_relation, positive_pairs, PairSet};
pub use proofs::random_proof;
pub use shrink::{shrink_kernel, shrink_pair};

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::formula::{Formula, Fragment};
use crate::kernel::{disjoint_union, Kernel};
use crate::mutation::Mutation;
use crate::rate::Rate;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationConfig {
    /// Constructor nesting, counting `∨` as one level.
    pub max_depth: usize,
    pub rate_grid: Vec<Rate>,
    pub fragment: Fragment,
    pub max_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub formulas: Vec<Formula>,
    /// Set when `max_count` cut the enumeration short.
    pub truncated: bool,
}

/// All formulas of the fragment up to `max_depth`, level by level. Within a
/// level the new formulas come as `L_r φ` for each grid rate, then `¬φ`
/// (full fragment only), then `φ ∧ ψ`, then `φ ∨ ψ` (positive fragment only).
/// The negative fragment is `¬` applied to the positive enumeration.
pub fn enumerate_formulas(cfg: &EnumerationConfig) -> Enumeration {
    if cfg.fragment == Fragment::Negative {
        let positive = enumerate_formulas(&EnumerationConfig {
            fragment: Fragment::Positive,
            ..cfg.clone()
        });
        return Enumeration {
            formulas: positive.formulas.into_iter().map(Formula::not).collect(),
            truncated: positive.truncated,
        };
    }
    let mut seen: HashSet<Formula> = HashSet::new();
    let mut out: Vec<Formula> = Vec::new();
    let push = |f: Formula, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>| -> bool {
        if out.len() >= cfg.max_count {
            return false;
        }
        if seen.insert(f.clone()) {
            out.push(f);
        }
        true
    };
    if cfg.max_count == 0 {
        return Enumeration {
            formulas: out,
            truncated: true,
        };
    }
    push(Formula::Top, &mut seen, &mut out);
    let full = cfg.fragment == Fragment::Full;
    for _ in 0..cfg.max_depth {
        let prev = out.clone();
        let mut step = || -> bool {
            for f in &prev {
                for r in &cfg.rate_grid {
                    if !push(Formula::l(r.clone(), f.clone()), &mut seen, &mut out) {
                        return false;
                    }
                }
            }
            if full {
                for f in &prev {
                    if !push(Formula::not(f.clone()), &mut seen, &mut out) {
                        return false;
                    }
                }
            }
            for a in &prev {
                for b in &prev {
                    if !push(Formula::and(a.clone(), b.clone()), &mut seen, &mut out) {
                        return false;
                    }
                }
            }
            if !full {
                for a in &prev {
                    for b in &prev {
                        if !push(Formula::or(a.clone(), b.clone()), &mut seen, &mut out) {
                            return false;
                        }
                    }
                }
            }
            true
        };
        if !step() {
            return Enumeration {
                formulas: out,
                truncated: true,
            };
        }
    }
    Enumeration {
        formulas: out,
        truncated: false,
    }
}

/// A random formula of the fragment, at most `depth` levels deep.
pub fn random_formula(rng: &mut impl Rng, depth: usize, grid: &[Rate], fragment: Fragment) -> Formula {
    if fragment == Fragment::Negative {
        return Formula::not(random_formula(rng, depth, grid, Fragment::Positive));
    }
    if depth == 0 || grid.is_empty() || rng.gen_ratio(1, 6) {
        return Formula::Top;
    }
    let choices = if fragment == Fragment::Full { 4 } else { 3 };
    match rng.gen_range(0..choices) {
        0 => {
            let r = grid.choose(rng).expect("grid is nonempty").clone();
            Formula::l(r, random_formula(rng, depth - 1, grid, fragment))
        }
        1 => Formula::and(
            random_formula(rng, depth - 1, grid, fragment),
            random_formula(rng, depth - 1, grid, fragment),
        ),
        2 if fragment == Fragment::Positive => Formula::or(
            random_formula(rng, depth - 1, grid, fragment),
            random_formula(rng, depth - 1, grid, fragment),
        ),
        2 => {
            let r = grid.choose(rng).expect("grid is nonempty").clone();
            Formula::l(r, random_formula(rng, depth - 1, grid, fragment))
        }
        _ => Formula::not(random_formula(rng, depth - 1, grid, fragment)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelGenConfig {
    /// The generated kernel has exactly this many states.
    pub max_states: usize,
    pub rate_pool: Vec<Rate>,
    /// Probability in `[0, 1]` that a transition gets a pool rate.
    pub density: Rate,
    pub seed: u64,
}

/// A kernel on states `s0, s1, …`. Each transition is nonzero with
/// probability `density` and then takes a nonzero pool rate uniformly.
pub fn gen_kernel(cfg: &KernelGenConfig) -> Kernel {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.max_states;
    let nonzero: Vec<&Rate> = cfg.rate_pool.iter().filter(|r| !r.is_zero()).collect();
    let one = Rate::from_integer(1);
    let density = if cfg.density > one { one } else { cfg.density.clone() };
    let (numer, denom) = small_fraction(&density);
    let mut rates = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if nonzero.is_empty() || numer == 0 {
                continue;
            }
            if rng.gen_range(0..denom) < numer {
                let r = (*nonzero.choose(&mut rng).expect("nonempty")).clone();
                rates.push((a, b, r));
            }
        }
    }
    Kernel::new((0..n).map(|i| format!("s{i}")), rates).expect("generated names are unique")
}

fn small_fraction(r: &Rate) -> (u64, u64) {
    use num_traits::ToPrimitive;
    let q = r.as_ratio();
    match (q.numer().to_u64(), q.denom().to_u64()) {
        (Some(a), Some(b)) => (a, b),
        // a coarse stand-in for huge fractions
        _ => ((q * num_bigint::BigInt::from(1_000_000)).to_integer().to_u64().unwrap_or(0), 1_000_000),
    }
}

/// Size knobs shared by the suites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    pub name: &'static str,
    pub kernels: usize,
    pub max_states: usize,
    pub max_depth: usize,
    pub max_triples: usize,
    /// Kernels and their size for the order and metric suites.
    pub order_kernels: usize,
    pub order_states: usize,
    pub metric_kernels: usize,
    pub metric_states: usize,
}

impl Budget {
    pub fn small() -> Budget {
        Budget {
            name: "small",
            kernels: 12,
            max_states: 4,
            max_depth: 2,
            max_triples: 1500,
            order_kernels: 12,
            order_states: 3,
            metric_kernels: 10,
            metric_states: 4,
        }
    }

    pub fn medium() -> Budget {
        Budget {
            name: "medium",
            kernels: 30,
            max_states: 6,
            max_depth: 3,
            max_triples: 5000,
            order_kernels: 50,
            order_states: 4,
            metric_kernels: 30,
            metric_states: 8,
        }
    }

    pub fn large() -> Budget {
        Budget {
            name: "large",
            kernels: 60,
            max_states: 8,
            max_depth: 3,
            max_triples: 20000,
            order_kernels: 120,
            order_states: 4,
            metric_kernels: 60,
            metric_states: 8,
        }
    }
}

impl FromStr for Budget {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "small" => Ok(Budget::small()),
            "medium" | "default" => Ok(Budget::medium()),
            "large" => Ok(Budget::large()),
            _ => Err(HarnessError::UnknownBudget(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown budget `{0}` (expected small, medium or large)")]
    UnknownBudget(String),
}

/// One failed check, minimized where the suite knows how.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub message: String,
    pub kernel: Option<Kernel>,
    pub formula: Option<Formula>,
}

impl Failure {
    pub fn new(message: impl Into<String>) -> Failure {
        Failure {
            message: message.into(),
            kernel: None,
            formula: None,
        }
    }

    pub fn with_kernel(mut self, k: &Kernel) -> Failure {
        self.kernel = Some(k.clone());
        self
    }

    pub fn with_formula(mut self, f: &Formula) -> Failure {
        self.formula = Some(f.clone());
        self
    }

    fn to_json(&self) -> Value {
        let kernel = self
            .kernel
            .as_ref()
            .map(|k| serde_json::to_value(k.to_spec()).expect("spec serializes"));
        json!({
            "message": self.message,
            "kernel": kernel,
            "formula": self.formula.as_ref().map(Formula::to_string),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: String,
    pub checked: usize,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
    pub mutation: Option<Mutation>,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "checked": self.checked,
            "passed": self.passed(),
            "failures": self.failures.iter().map(Failure::to_json).collect::<Vec<_>>(),
            "notes": self.notes,
            "mutation": self.mutation.map(|m| m.name()),
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "ok" } else { "FAILED" };
        write!(
            f,
            "{}: {} ({} checked, {} failures, {} ms)",
            self.suite,
            verdict,
            self.checked,
            self.failures.len(),
            self.elapsed_ms
        )?;
        if let Some(m) = self.mutation {
            write!(f, " [mutation {m}]")?;
        }
        for note in &self.notes {
            write!(f, "\n  note: {note}")?;
        }
        for fail in self.failures.iter().take(5) {
            write!(f, "\n  failure: {}", fail.message)?;
            if let Some(formula) = &fail.formula {
                write!(f, "\n    formula: {formula}")?;
            }
            if let Some(k) = &fail.kernel {
                write!(f, "\n    kernel: {}", serde_json::to_string(&k.to_spec()).expect("spec serializes"))?;
            }
        }
        if self.failures.len() > 5 {
            write!(f, "\n  … {} more", self.failures.len() - 5)?;
        }
        Ok(())
    }
}

/// Shared state handed to each suite.
pub struct Context {
    pub budget: Budget,
    pub seed: u64,
    pub mutation: Option<Mutation>,
}

impl Context {
    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    /// `count` kernels with 1 to `max_states` states. Every third kernel is
    /// a copy of a smaller kernel placed next to itself, so bisimilar but
    /// distinct states are common.
    pub fn kernels(&self, count: usize, max_states: usize, salt: u64) -> Vec<Kernel> {
        let mut rng = self.rng(salt);
        let pools: [Vec<Rate>; 3] = [
            ["0", "1", "2", "3"].map(crate::rate::rate).to_vec(),
            ["1/2", "1", "3/2", "2"].map(crate::rate::rate).to_vec(),
            ["1", "2"].map(crate::rate::rate).to_vec(),
        ];
        let densities = ["1/3", "1/2", "2/3"].map(crate::rate::rate);
        (0..count)
            .map(|i| {
                let pool = pools[i % 3].clone();
                let density = densities[(i / 3) % 3].clone();
                let doubled = i % 3 == 2 && max_states >= 2;
                let states = if doubled {
                    rng.gen_range(1..=max_states / 2)
                } else {
                    rng.gen_range(1..=max_states)
                };
                let k = gen_kernel(&KernelGenConfig {
                    max_states: states,
                    rate_pool: pool,
                    density,
                    seed: rng.gen(),
                });
                if doubled {
                    disjoint_union(&k, &k)
                } else {
                    k
                }
            })
            .collect()
    }

    /// Fixed ε samples plus half the least positive gap between exit rates.
    pub fn epsilons(&self, k: &Kernel) -> Vec<Rate> {
        let mut out: Vec<Rate> = EPSILONS.iter().map(|s| crate::rate::rate(s)).collect();
        let mut exits: Vec<Rate> = (0..k.len()).map(|m| k.exit_rate(m)).collect();
        exits.sort();
        exits.dedup();
        if let Some(gap) = exits
            .windows(2)
            .filter_map(|w| w[1].checked_sub(&w[0]))
            .filter(|g| !g.is_zero())
            .min()
        {
            out.push(gap.div_int(2));
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn grid(&self) -> Vec<Rate> {
        GRID.iter().map(|s| crate::rate::rate(s)).collect()
    }

    /// Enumerated formulas of depth at most 2 followed by random ones of
    /// the budget depth.
    pub fn formulas(&self, fragment: Fragment, extra: usize, salt: u64) -> Vec<Formula> {
        let grid = self.grid();
        let mut out = enumerate_formulas(&EnumerationConfig {
            max_depth: self.budget.max_depth.min(2),
            rate_grid: grid.clone(),
            fragment,
            max_count: 400,
        })
        .formulas;
        let mut rng = self.rng(salt);
        for _ in 0..extra {
            out.push(random_formula(&mut rng, self.budget.max_depth, &grid, fragment));
        }
        out
    }
}

pub const EPSILONS: [&str; 5] = ["0", "1/10", "1/3", "1", "5/2"];
pub const GRID: [&str; 5] = ["0", "1/2", "1", "2", "3"];

type SuiteFn = fn(&Context) -> (usize, Vec<Failure>, Vec<String>);

/// Registered suites, in the order `run_all` reports them.
pub const SUITES: &[(&str, SuiteFn)] = &[
    ("enumeration", suites::enumeration),
    ("t2", suites::t2),
    ("c2", suites::c2),
    ("l1-positive-monotonicity", suites::l1_positive),
    ("l1-negative-antitonicity", suites::l1_negative),
    ("l2-limit", suites::l2_limit),
    ("boolean-coherence", suites::boolean),
    ("t1-generators", suites::t1),
    ("c1-definability", suites::c1),
    ("paramcharact", suites::paramcharact),
    ("characterization", suites::characterization),
    ("generalization", suites::generalization),
    ("l5-bisimulation-order", suites::l5),
    ("order-monotonicity", suites::order_monotonicity),
    ("pseudometric", suites::pseudometric),
    ("axioms", suites::axioms),
    ("soundness", suites::soundness),
    ("deduction", suites::deduction),
    ("translation", suites::translation),
];

const ALIASES: &[(&str, &str)] = &[
    ("l1", "l1-positive-monotonicity"),
    ("l1-negative", "l1-negative-antitonicity"),
    ("l2", "l2-limit"),
    ("boolean", "boolean-coherence"),
    ("t1", "t1-generators"),
    ("c1", "c1-definability"),
    ("l5", "l5-bisimulation-order"),
    ("l4", "translation"),
];

pub fn suite_names() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|(n, _)| *n)
}

fn lookup(name: &str) -> Result<(&'static str, SuiteFn), HarnessError> {
    let name = ALIASES
        .iter()
        .find(|(a, _)| *a == name)
        .map_or(name, |(_, full)| full);
    SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .copied()
        .ok_or_else(|| HarnessError::UnknownSuite(name.to_string()))
}

pub fn run_suite(name: &str, budget: &Budget, seed: u64) -> Result<Report, HarnessError> {
    run_suite_with(name, budget, seed, None)
}

/// Runs a suite against the evaluator with `mutation` injected.
pub fn run_suite_with(
    name: &str,
    budget: &Budget,
    seed: u64,
    mutation: Option<Mutation>,
) -> Result<Report, HarnessError> {
    let (suite, run) = lookup(name)?;
    let ctx = Context {
        budget: budget.clone(),
        seed,
        mutation,
    };
    let start = Instant::now();
    let (checked, failures, notes) = run(&ctx);
    Ok(Report {
        suite: suite.to_string(),
        checked,
        failures,
        notes,
        mutation,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Every registered suite, run in parallel, reported in registry order.
pub fn run_all(budget: &Budget, seed: u64) -> Vec<Report> {
    SUITES
        .par_iter()
        .map(|(name, _)| run_suite(name, budget, seed).expect("registered"))
        .collect()
}

/// Suites expected to notice each mutation.
pub fn detectors(m: Mutation) -> &'static [&'static str] {
    match m {
        Mutation::DropEpsilon => &["t2", "c2", "axioms"],
        Mutation::StrictComparison => &["t2", "axioms", "soundness"],
        Mutation::SkipTruncation => &["t2", "c2"],
        Mutation::ForgetBisimSaturation => &["l5-bisimulation-order"],
        Mutation::SubsetRefinementStop => &["t1-generators", "pseudometric"],
    }
}

/// For each mutation, the suites among its detectors that reported a
/// failure with the mutation injected.
pub fn mutation_matrix(budget: &Budget, seed: u64) -> Vec<(Mutation, Vec<String>)> {
    Mutation::ALL
        .par_iter()
        .map(|&m| {
            let caught = detectors(m)
                .iter()
                .filter(|s| !run_suite_with(s, budget, seed, Some(m)).expect("registered").passed())
                .map(|s| s.to_string())
                .collect();
            (m, caught)
        })
        .collect()
}
