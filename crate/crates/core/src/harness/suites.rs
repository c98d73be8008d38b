//! The property suites. Each returns the number of checks made, the
//! failures found and free-form notes.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::{
    abs_pairs, definable_sets, enumerate_formulas, logical_relation, positive_pairs, random_formula, random_proof,
    shrink_kernel, shrink_pair, Context, EnumerationConfig, Failure, EPSILONS,
};
use crate::equivalence::{bisimulation, bisimulation_with, generators, Partition};
use crate::fixtures;
use crate::formula::{encode_abs, encode_down_with, encode_up, in_fragment, parse, Formula, Fragment};
use crate::kernel::{Kernel, Relation, StateSet};
use crate::metric::{distance_by_scan, exhaustive_candidates, feasible, Chain};
use crate::mutation::Mutation;
use crate::orders::{is_order, saturate, OrderEngine};
use crate::proofcheck::{axiom_instance, check, translate_proof, AxiomName, Direction, Proof};
use crate::rate::{rate, Rate};
use crate::semantics::{eval_with, valid_on_with};

type Outcome = (usize, Vec<Failure>, Vec<String>);

const MAX_FAILURES: usize = 25;
const MAX_SHRINKS: usize = 3;

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<Failure>,
    dropped: usize,
    notes: Vec<String>,
}

impl Tally {
    fn fail(&mut self, f: Failure) {
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(f);
        } else {
            self.dropped += 1;
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.checked += other.checked;
        self.dropped += other.dropped;
        self.notes.extend(other.notes);
        for f in other.failures {
            self.fail(f);
        }
    }

    fn finish(mut self) -> Outcome {
        if self.dropped > 0 {
            self.notes.push(format!("{} further failures not recorded", self.dropped));
        }
        (self.checked, self.failures, self.notes)
    }
}

fn merge(parts: Vec<Tally>) -> Tally {
    let mut out = Tally::default();
    for p in parts {
        out.absorb(p);
    }
    out
}

fn shipped() -> Vec<Kernel> {
    vec![
        fixtures::figure1(),
        fixtures::figure3_n(),
        fixtures::figure3_o(),
        fixtures::figure4_n(),
        fixtures::figure4_o(),
        fixtures::single_loop(rate("2")),
    ]
}

/// Shipped models followed by `count` generated kernels.
fn corpus(ctx: &Context, count: usize, max_states: usize, salt: u64) -> Vec<Kernel> {
    let mut out: Vec<Kernel> = shipped().into_iter().filter(|k| k.len() <= max_states.max(6)).collect();
    out.extend(ctx.kernels(count, max_states, salt));
    out
}

fn ev(ctx: &Context, k: &Kernel, f: &Formula, e: &Rate) -> StateSet {
    eval_with(k, f, e, ctx.mutation)
}

fn names(k: &Kernel, s: &StateSet) -> String {
    format!("{{{}}}", k.names_of(s).join(","))
}

fn pair_list(k: &Kernel, pairs: impl Iterator<Item = (usize, usize)>) -> String {
    let shown: Vec<String> = pairs.take(6).map(|(a, b)| format!("({},{})", k.name(a), k.name(b))).collect();
    format!("[{}]", shown.join(" "))
}

fn relation_diff(k: &Kernel, got: &Relation, want: &Relation) -> String {
    let extra = pair_list(k, got.pairs().filter(|&(a, b)| !want.contains(a, b)));
    let missing = pair_list(k, want.pairs().filter(|&(a, b)| !got.contains(a, b)));
    format!("fixpoint has extra {extra}, lacks {missing}")
}

/// A failing (kernel, formula) check, minimized for the first few failures.
fn pair_failure(
    shrinks: &AtomicUsize,
    message: String,
    k: &Kernel,
    f: &Formula,
    fails: impl Fn(&Kernel, &Formula) -> bool,
) -> Failure {
    if shrinks.fetch_add(1, Ordering::Relaxed) < MAX_SHRINKS {
        let (k2, f2) = shrink_pair(k, f, fails);
        Failure::new(format!("{message} (shrunk)")).with_kernel(&k2).with_formula(&f2)
    } else {
        Failure::new(message).with_kernel(k).with_formula(f)
    }
}

fn kernel_failure(shrinks: &AtomicUsize, message: String, k: &Kernel, fails: impl Fn(&Kernel) -> bool) -> Failure {
    if shrinks.fetch_add(1, Ordering::Relaxed) < MAX_SHRINKS {
        Failure::new(format!("{message} (shrunk)")).with_kernel(&shrink_kernel(k, fails))
    } else {
        Failure::new(message).with_kernel(k)
    }
}

pub fn enumeration(ctx: &Context) -> Outcome {
    let mut t = Tally::default();
    for fragment in [Fragment::Full, Fragment::Positive, Fragment::Negative] {
        let cfg = EnumerationConfig {
            max_depth: ctx.budget.max_depth.min(2),
            rate_grid: ctx.grid(),
            fragment,
            max_count: 2000,
        };
        let first = enumerate_formulas(&cfg);
        if enumerate_formulas(&cfg) != first {
            t.fail(Failure::new(format!("{fragment:?} enumeration is not deterministic")));
        }
        let mut seen = std::collections::HashSet::new();
        for f in &first.formulas {
            t.checked += 1;
            if !seen.insert(f) {
                t.fail(Failure::new("duplicate emission").with_formula(f));
            }
            if !in_fragment(f, fragment) {
                t.fail(Failure::new(format!("emission outside {fragment:?}")).with_formula(f));
            }
            match parse(&f.to_string()) {
                Ok(g) if &g == f => {}
                Ok(g) => t.fail(Failure::new(format!("round trip gave `{g}`")).with_formula(f)),
                Err(e) => t.fail(Failure::new(format!("printed form does not parse: {e}")).with_formula(f)),
            }
        }
    }
    t.finish()
}

/// `m ⊨_{ε+ε′} φ ⇔ m ⊨_ε ⟨φ⟩_{ε′}` and `m ⊨_ε φ ⇔ m ⊨_{ε+ε′} ⟨φ⟩^{ε′}`.
pub fn t2(ctx: &Context) -> Outcome {
    let shrinks = AtomicUsize::new(0);
    let kernels = corpus(ctx, ctx.budget.kernels, ctx.budget.max_states, 11);
    let epsilons: Vec<Vec<Rate>> = kernels.iter().map(|k| ctx.epsilons(k)).collect();
    let formulas = ctx.formulas(Fragment::Full, 300, 12);
    let mut rng = ctx.rng(13);
    let jobs: Vec<(usize, usize, Rate, Rate)> = (0..ctx.budget.max_triples)
        .map(|i| {
            let ki = i % kernels.len();
            let fi = rng.gen_range(0..formulas.len());
            let e = epsilons[ki].choose(&mut rng).expect("nonempty").clone();
            let e2 = epsilons[ki].choose(&mut rng).expect("nonempty").clone();
            (ki, fi, e, e2)
        })
        .collect();
    let m = ctx.mutation;
    let down_fails = |k: &Kernel, f: &Formula, e: &Rate, e2: &Rate| {
        eval_with(k, f, &(e + e2), m) != eval_with(k, &encode_down_with(f, e2, m), e, m)
    };
    let up_fails = |k: &Kernel, f: &Formula, e: &Rate, e2: &Rate| {
        eval_with(k, f, e, m) != eval_with(k, &encode_up(f, e2), &(e + e2), m)
    };
    let parts: Vec<Tally> = jobs
        .par_iter()
        .map(|(ki, fi, e, e2)| {
            let mut t = Tally::default();
            let (k, f) = (&kernels[*ki], &formulas[*fi]);
            t.checked += 1;
            if down_fails(k, f, e, e2) {
                let msg = format!("down-encoding at ε={e}, ε′={e2}");
                t.fail(pair_failure(&shrinks, msg, k, f, |k, f| down_fails(k, f, e, e2)));
            }
            if up_fails(k, f, e, e2) {
                let msg = format!("up-encoding at ε={e}, ε′={e2}");
                t.fail(pair_failure(&shrinks, msg, k, f, |k, f| up_fails(k, f, e, e2)));
            }
            t
        })
        .collect();
    merge(parts).finish()
}

/// `m ⊨_ε φ ⇔ m ⊨ ⟨φ⟩_ε`.
pub fn c2(ctx: &Context) -> Outcome {
    let shrinks = AtomicUsize::new(0);
    let kernels = corpus(ctx, ctx.budget.kernels, ctx.budget.max_states, 21);
    let formulas = ctx.formulas(Fragment::Full, 200, 22);
    let m = ctx.mutation;
    let zero = Rate::zero();
    let fails = |k: &Kernel, f: &Formula, e: &Rate| eval_with(k, f, e, m) != eval_with(k, &encode_down_with(f, e, m), &zero, m);
    let per_kernel = (ctx.budget.max_triples / kernels.len()).max(1);
    let parts: Vec<Tally> = kernels
        .par_iter()
        .enumerate()
        .map(|(i, k)| {
            let mut t = Tally::default();
            let eps = ctx.epsilons(k);
            for j in 0..per_kernel {
                let f = &formulas[(i * 7919 + j) % formulas.len()];
                let e = &eps[j % eps.len()];
                t.checked += 1;
                if fails(k, f, e) {
                    t.fail(pair_failure(&shrinks, format!("specialization at ε={e}"), k, f, |k, f| fails(k, f, e)));
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}

/// For each kernel, every enumerated formula against every ordered pair of
/// sampled ε values `e ≤ e + d`.
fn monotone(ctx: &Context, fragment: Fragment, salt: u64, grows: bool) -> Outcome {
    let shrinks = AtomicUsize::new(0);
    let kernels = corpus(ctx, ctx.budget.kernels, ctx.budget.max_states, salt);
    let formulas = ctx.formulas(fragment, 150, salt + 1);
    let m = ctx.mutation;
    let fails = move |k: &Kernel, f: &Formula, e: &Rate, d: &Rate| {
        let low = eval_with(k, f, e, m);
        let high = eval_with(k, f, &(e + d), m);
        if grows {
            !low.is_subset(&high)
        } else {
            !high.is_subset(&low)
        }
    };
    let budget = ctx.budget.max_triples;
    let parts: Vec<Tally> = kernels
        .par_iter()
        .enumerate()
        .map(|(i, k)| {
            let mut t = Tally::default();
            let eps = ctx.epsilons(k);
            let per_kernel = (budget / kernels.len()).max(1);
            for j in 0..per_kernel {
                let f = &formulas[(i * 104_729 + j) % formulas.len()];
                let e = &eps[j % eps.len()];
                let d = &eps[(j / eps.len()) % eps.len()];
                t.checked += 1;
                if fails(k, f, e, d) {
                    let what = if grows { "shrinks" } else { "grows" };
                    let msg = format!("extension {what} from ε={e} to ε={}", e + d);
                    t.fail(pair_failure(&shrinks, msg, k, f, |k, f| fails(k, f, e, d)));
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}

pub fn l1_positive(ctx: &Context) -> Outcome {
    monotone(ctx, Fragment::Positive, 31, true)
}

pub fn l1_negative(ctx: &Context) -> Outcome {
    monotone(ctx, Fragment::Negative, 41, false)
}

/// Least amount by which any modal clause of a positive formula fails at
/// `e`, computed by direct recursion on masses.
fn least_shortfall(k: &Kernel, f: &Formula, e: &Rate, gap: &mut Option<Rate>) -> StateSet {
    match f {
        Formula::Top => k.all_states(),
        Formula::Not(inner, _) => least_shortfall(k, inner, e, gap).complement(),
        Formula::And(a, b) => least_shortfall(k, a, e, gap).intersection(&least_shortfall(k, b, e, gap)),
        Formula::L(r, inner) => {
            let s = least_shortfall(k, inner, e, gap);
            let mut out = k.no_states();
            for x in 0..k.len() {
                let reach = k.mass(x, &s) + e;
                match r.checked_sub(&reach) {
                    Some(short) if !short.is_zero() => {
                        if gap.as_ref().map_or(true, |g| &short < g) {
                            *gap = Some(short);
                        }
                    }
                    _ => out.insert(x),
                }
            }
            out
        }
    }
}

/// Positive extensions are unchanged by any increase smaller than the least
/// shortfall, which is the finite form of `⟦φ⟧_ε = ∩_{δ>0} ⟦φ⟧_{ε+δ}`.
pub fn l2_limit(ctx: &Context) -> Outcome {
    let kernels = corpus(ctx, ctx.budget.kernels, ctx.budget.max_states, 51);
    let formulas = ctx.formulas(Fragment::Positive, 150, 52);
    let m = ctx.mutation;
    let per_kernel = (ctx.budget.max_triples / kernels.len()).max(1);
    let parts: Vec<Tally> = kernels
        .par_iter()
        .enumerate()
        .map(|(i, k)| {
            let mut t = Tally::default();
            let eps = ctx.epsilons(k);
            for j in 0..per_kernel {
                let f = &formulas[(i * 7 + j * 13) % formulas.len()];
                let e = &eps[j % eps.len()];
                let mut gap = None;
                let direct = least_shortfall(k, f, e, &mut gap);
                let base = eval_with(k, f, e, m);
                t.checked += 1;
                if direct != base {
                    t.fail(Failure::new(format!("recursive extension differs at ε={e}")).with_kernel(k).with_formula(f));
                    continue;
                }
                let gap = gap.unwrap_or_else(|| Rate::from_integer(2));
                for delta in [gap.div_int(2), gap.div_int(10)] {
                    if eval_with(k, f, &(e + &delta), m) != base {
                        t.fail(
                            Failure::new(format!("extension moved between ε={e} and ε={}", e + &delta))
                                .with_kernel(k)
                                .with_formula(f),
                        );
                    }
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}

pub fn boolean(ctx: &Context) -> Outcome {
    let kernels = corpus(ctx, ctx.budget.kernels, ctx.budget.max_states, 61);
    let formulas = ctx.formulas(Fragment::Full, 100, 62);
    let per_kernel = (ctx.budget.max_triples / kernels.len()).max(1);
    let parts: Vec<Tally> = kernels
        .par_iter()
        .enumerate()
        .map(|(i, k)| {
            let mut t = Tally::default();
            let eps = ctx.epsilons(k);
            for j in 0..per_kernel {
                let f = &formulas[(i * 31 + j) % formulas.len()];
                let g = &formulas[(i * 17 + j * 7 + 3) % formulas.len()];
                let e = &eps[j % eps.len()];
                let (a, b) = (ev(ctx, k, f, e), ev(ctx, k, g, e));
                t.checked += 1;
                let checks = [
                    (Formula::not(f.clone()), a.complement()),
                    (Formula::and(f.clone(), g.clone()), a.intersection(&b)),
                    (Formula::or(f.clone(), g.clone()), a.union(&b)),
                    (Formula::implies(f.clone(), g.clone()), a.complement().union(&b)),
                ];
                for (h, want) in checks {
                    if ev(ctx, k, &h, e) != want {
                        t.fail(Failure::new(format!("connective mismatch at ε={e}")).with_kernel(k).with_formula(&h));
                    }
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}

/// States grouped by their masses into each set of `family`.
fn signature_partition(k: &Kernel, family: &[StateSet]) -> Partition {
    let mut groups: Vec<(Vec<Rate>, StateSet)> = Vec::new();
    for x in 0..k.len() {
        let sig: Vec<Rate> = family.iter().map(|c| k.mass(x, c)).collect();
        match groups.iter_mut().find(|(s, _)| *s == sig) {
            Some((_, block)) => block.insert(x),
            None => groups.push((sig, StateSet::from_indices(k.len(), [x]))),
        }
    }
    Partition::from_blocks(k.len(), groups.into_iter().map(|(_, b)| b))
}

fn same_partition(a: &Partition, b: &Partition) -> bool {
    a.blocks() == b.blocks()
}

/// Related states are exactly those agreeing on every generator.
pub fn t1(ctx: &Context) -> Outcome {
    let shrinks = AtomicUsize::new(0);
    let kernels = corpus(ctx, ctx.budget.kernels, 8, 71);
    let m = ctx.mutation;
    let parts: Vec<Tally> = kernels
        .par_iter()
        .map(|k| {
            let mut t = Tally::default();
            let part = bisimulation_with(k, m);
            for extended in [false, true] {
                let family = generators(k, extended);
                t.checked += 1;
                let sig = signature_partition(k, family.sets());
                if !same_partition(&sig, &part) {
                    let msg = format!(
                        "generator signatures give {:?}, refinement gives {:?} (extended {extended})",
                        sig.names(k),
                        part.names(k)
                    );
                    let fails = |k: &Kernel| {
                        signature_partition(k, generators(k, extended).sets()).blocks() != bisimulation_with(k, m).blocks()
                    };
                    t.fail(kernel_failure(&shrinks, msg, k, fails));
                }
                for c in family.iter() {
                    t.checked += 1;
                    if !part.is_closed(c) {
                        t.fail(Failure::new(format!("generator {} is not closed", names(k, c))).with_kernel(k));
                    }
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}

/// Positive extensions lie in the plain family, all extensions in the
/// extended family.
pub fn c1(ctx: &Context) -> Outcome {
    let kernels = corpus(ctx, ctx.budget.kernels, ctx.budget.max_states, 81);
    let positive = ctx.formulas(Fragment::Positive, 100, 82);
    let full = ctx.formulas(Fragment::Full, 100, 83);
    let per_kernel = (ctx.budget.max_triples / kernels.len()).max(1);
    let parts: Vec<Tally> = kernels
        .par_iter()
        .enumerate()
        .map(|(i, k)| {
            let mut t = Tally::default();
            let plain = generators(k, false);
            let extended = generators(k, true);
            let eps = ctx.epsilons(k);
            for j in 0..per_kernel {
                let e = &eps[j % eps.len()];
                let (f, family) = if j % 2 == 0 {
                    (&positive[(i + j * 3) % positive.len()], &plain)
                } else {
                    (&full[(i + j * 5) % full.len()], &extended)
                };
                let s = ev(ctx, k, f, e);
                t.checked += 1;
                if !family.contains(&s) {
                    let msg = format!("extension {} at ε={e} is not a generator", names(k, &s));
                    t.fail(Failure::new(msg).with_kernel(k).with_formula(f));
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}

/// Bisimilar states agree on every enumerated formula; distinct blocks are
/// separated by a formula of modal depth at most the number of refinement
/// rounds.
pub fn paramcharact(ctx: &Context) -> Outcome {
    let kernels = corpus(ctx, ctx.budget.kernels, ctx.budget.max_states, 91);
    let formulas = ctx.formulas(Fragment::Full, 80, 92);
    let samples: Vec<Rate> = EPSILONS.iter().map(|s| rate(s)).collect();
    let parts: Vec<Tally> = kernels
        .par_iter()
        .map(|k| {
            let mut t = Tally::default();
            let part = bisimulation(k);
            for e in &samples {
                for f in &formulas {
                    let s = ev(ctx, k, f, e);
                    t.checked += 1;
                    if !part.is_closed(&s) {
                        t.fail(Failure::new(format!("bisimilar states disagree at ε={e}")).with_kernel(k).with_formula(f));
                    }
                }
                let defs = definable_sets(k, e, part.rounds());
                for a in 0..k.len() {
                    for b in (a + 1)..k.len() {
                        if part.same_block(a, b) {
                            continue;
                        }
                        t.checked += 1;
                        let witness = defs.iter().find(|(s, _)| s.contains(a) != s.contains(b));
                        match witness {
                            Some((s, f)) if ev(ctx, k, f, e) == *s => {}
                            Some((_, f)) => t.fail(
                                Failure::new(format!("witness for {} vs {} does not evaluate to its set", k.name(a), k.name(b)))
                                    .with_kernel(k)
                                    .with_formula(f),
                            ),
                            None => t.fail(
                                Failure::new(format!(
                                    "no formula of depth {} separates {} from {} at ε={e}",
                                    part.rounds(),
                                    k.name(a),
                                    k.name(b)
                                ))
                                .with_kernel(k),
                            ),
                        }
                    }
                }
                if k.len() <= 4 {
                    for (s, f) in definable_sets(k, e, part.rounds() + 1) {
                        t.checked += 1;
                        if !part.is_closed(&s) {
                            t.fail(
                                Failure::new(format!("deeper formula splits a block at ε={e}")).with_kernel(k).with_formula(&f),
                            );
                        }
                    }
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}

/// Fixpoint orders against the logical transfer relation on every state pair.
fn transfer(ctx: &Context, essential: bool, salt: u64) -> Outcome {
    let shrinks = AtomicUsize::new(0);
    let mut kernels = vec![fixtures::single_loop(rate("2"))];
    kernels.extend(ctx.kernels(ctx.budget.order_kernels, ctx.budget.order_states, salt));
    let (fragment, extra) = if essential { (Fragment::Full, 60) } else { (Fragment::Positive, 60) };
    let formulas = ctx.formulas(fragment, extra, salt + 1);
    let probe: Vec<&Formula> = formulas.iter().step_by(7).collect();
    let oracle = move |k: &Kernel, e: &Rate| {
        let pairs = if essential { abs_pairs(k, e) } else { positive_pairs(k, e) };
        (logical_relation(k.len(), &pairs), pairs)
    };
    let fixpoint = move |k: &Kernel, e: &Rate| OrderEngine::new(k, essential).largest(e).relation;
    let parts: Vec<Tally> = kernels
        .par_iter()
        .map(|k| {
            let mut t = Tally::default();
            let engine = OrderEngine::new(k, essential);
            for e in ctx.epsilons(k) {
                let got = engine.largest(&e).relation;
                let (want, pairs) = oracle(k, &e);
                t.checked += k.len() * k.len();
                if got != want {
                    let msg = format!("at ε={e}: {}", relation_diff(k, &got, &want));
                    let e2 = e.clone();
                    let fails = move |k: &Kernel| fixpoint(k, &e2) != oracle(k, &e2).0;
                    t.fail(kernel_failure(&shrinks, msg, k, fails));
                }
                let zero = Rate::zero();
                for f in &probe {
                    let lifted = if essential { encode_abs(f, &e) } else { (*f).clone() };
                    let pair = (eval_with(k, f, &zero, ctx.mutation), eval_with(k, &lifted, &e, ctx.mutation));
                    t.checked += 1;
                    if !pairs.contains(&pair) {
                        let msg = format!("extension pair at ε={e} missing from the closure");
                        t.fail(Failure::new(msg).with_kernel(k).with_formula(f));
                    }
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}

pub fn characterization(ctx: &Context) -> Outcome {
    transfer(ctx, false, 101)
}

pub fn generalization(ctx: &Context) -> Outcome {
    transfer(ctx, true, 111)
}

/// Bisimilarity, saturated identity and the diagonal of the largest order.
pub fn l5(ctx: &Context) -> Outcome {
    let kernels = corpus(ctx, ctx.budget.kernels, ctx.budget.order_states.max(4), 121);
    let forget = ctx.mutation == Some(Mutation::ForgetBisimSaturation);
    let parts: Vec<Tally> = kernels
        .par_iter()
        .map(|k| {
            let mut t = Tally::default();
            let part = bisimulation(k);
            let identity = Relation::identity(k.len());
            let base = if forget { identity } else { saturate(&identity, &part) };
            let sim = part.relation();
            for e in ctx.epsilons(k) {
                for essential in [false, true] {
                    t.checked += 1;
                    if !is_order(k, &base, &e, essential) {
                        let msg = format!("closed identity is not an order at ε={e} (essential {essential})");
                        t.fail(Failure::new(msg).with_kernel(k));
                    }
                    t.checked += 1;
                    if !is_order(k, &sim, &e, essential) {
                        let msg = format!("bisimilarity is not an order at ε={e} (essential {essential})");
                        t.fail(Failure::new(msg).with_kernel(k));
                    }
                }
            }
            if k.len() <= 6 {
                for essential in [false, true] {
                    let order = OrderEngine::new(k, essential).largest(&Rate::zero()).relation;
                    t.checked += 1;
                    if !sim.is_subset(&order) {
                        let msg = format!("largest 0-order misses bisimilar pairs (essential {essential})");
                        t.fail(Failure::new(msg).with_kernel(k));
                    }
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}

/// Larger ε gives larger orders, essential orders lie in plain ones, and
/// orders need not be symmetric.
pub fn order_monotonicity(ctx: &Context) -> Outcome {
    let mut kernels = shipped().into_iter().filter(|k| k.len() <= 6).collect::<Vec<_>>();
    kernels.extend(ctx.kernels(ctx.budget.order_kernels, ctx.budget.order_states, 131));
    let parts: Vec<(Tally, bool, usize)> = kernels
        .par_iter()
        .map(|k| {
            let mut t = Tally::default();
            let plain = OrderEngine::new(k, false);
            let essential = OrderEngine::new(k, true);
            let mut eps = ctx.epsilons(k);
            eps.sort();
            let mut asymmetric = false;
            let mut non_orders = 0;
            let mut prev: Option<(Relation, Relation)> = None;
            for e in &eps {
                let p = plain.largest(e).relation;
                let q = if k.len() <= 6 { essential.largest(e).relation } else { Relation::empty(k.len()) };
                t.checked += 1;
                if !q.is_subset(&p) {
                    t.fail(Failure::new(format!("essential order exceeds plain order at ε={e}")).with_kernel(k));
                }
                if !plain.satisfies(&p, &crate::orders::Bound::AtMost(e.clone())) {
                    t.fail(Failure::new(format!("largest plain relation is not an order at ε={e}")).with_kernel(k));
                }
                if k.len() <= 6 && !essential.satisfies(&q, &crate::orders::Bound::AtMost(e.clone())) {
                    non_orders += 1;
                }
                if p.pairs().any(|(a, b)| !p.contains(b, a)) {
                    asymmetric = true;
                }
                if let Some((pp, pq)) = &prev {
                    t.checked += 1;
                    if !pp.is_subset(&p) || !pq.is_subset(&q) {
                        t.fail(Failure::new(format!("order shrank when ε grew to {e}")).with_kernel(k));
                    }
                }
                prev = Some((p, q));
            }
            (t, asymmetric, non_orders)
        })
        .collect();
    let asymmetric = parts.iter().any(|(_, a, _)| *a);
    let non_orders: usize = parts.iter().map(|(_, _, n)| n).sum();
    let mut t = merge(parts.into_iter().map(|(t, _, _)| t).collect());
    t.checked += 1;
    if !asymmetric {
        t.fail(Failure::new("no asymmetric order found in the corpus"));
    }
    if non_orders > 0 {
        t.notes.push(format!(
            "union of essential orders is not itself an essential order in {non_orders} (kernel, ε) cases"
        ));
    }
    t.finish()
}

/// Pseudometric axioms, zero distance exactly on bisimilar pairs, and the
/// infimum attained at a candidate value.
pub fn pseudometric(ctx: &Context) -> Outcome {
    let mut kernels = vec![fixtures::figure4_n(), fixtures::figure4_o()];
    kernels.extend(ctx.kernels(ctx.budget.metric_kernels, ctx.budget.metric_states, 141));
    let m = ctx.mutation;
    let parts: Vec<Tally> = kernels
        .par_iter()
        .map(|k| {
            let mut t = Tally::default();
            let chain = match Chain::new(k) {
                Ok(c) => c,
                Err(e) => {
                    t.fail(Failure::new(format!("chain construction failed: {e}")).with_kernel(k));
                    return t;
                }
            };
            let n = k.len();
            let d: Vec<Vec<Rate>> = (0..n).map(|a| (0..n).map(|b| chain.distance(a, b)).collect()).collect();
            let part = bisimulation_with(k, m);
            for a in 0..n {
                for b in 0..n {
                    t.checked += 1;
                    if d[a][b] != d[b][a] {
                        t.fail(Failure::new(format!("asymmetric at ({}, {})", k.name(a), k.name(b))).with_kernel(k));
                    }
                    if d[a][b].is_zero() != part.same_block(a, b) {
                        let msg = format!("d({}, {}) = {} disagrees with the partition", k.name(a), k.name(b), d[a][b]);
                        t.fail(Failure::new(msg).with_kernel(k));
                    }
                    for c in 0..n {
                        if d[a][c] > &d[a][b] + &d[b][c] {
                            t.fail(Failure::new(format!(
                                "triangle fails on {}, {}, {}",
                                k.name(a),
                                k.name(b),
                                k.name(c)
                            ))
                            .with_kernel(k));
                        }
                    }
                }
            }
            if n <= 4 {
                let candidates = exhaustive_candidates(k);
                for a in 0..n {
                    for b in (a + 1)..n {
                        t.checked += 1;
                        let scan = distance_by_scan(k, a, b);
                        if scan != d[a][b] {
                            let msg = format!("chain gives {} but scan gives {scan} for ({}, {})", d[a][b], k.name(a), k.name(b));
                            t.fail(Failure::new(msg).with_kernel(k));
                            continue;
                        }
                        if !feasible(k, a, b, &d[a][b]) {
                            t.fail(Failure::new(format!("infimum not attained for ({}, {})", k.name(a), k.name(b))).with_kernel(k));
                        }
                        if let Some(below) = candidates.iter().filter(|c| **c < d[a][b]).max() {
                            let mid = below.midpoint(&d[a][b]);
                            if feasible(k, a, b, &mid) {
                                let msg = format!("({}, {}) already feasible at {mid}", k.name(a), k.name(b));
                                t.fail(Failure::new(msg).with_kernel(k));
                            }
                        }
                    }
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}

fn axiom_corpus(ctx: &Context) -> Vec<Kernel> {
    corpus(ctx, ctx.budget.kernels.min(24), ctx.budget.max_states, 151)
}

/// Random instances of A1 to A4, each checked for validity on one kernel.
pub fn axioms(ctx: &Context) -> Outcome {
    let shrinks = AtomicUsize::new(0);
    let kernels = axiom_corpus(ctx);
    let grid = ctx.grid();
    let mut rng = ctx.rng(152);
    let count = 1200.max(ctx.budget.max_triples / 4);
    let names = [AxiomName::A1, AxiomName::A2, AxiomName::A3, AxiomName::A4];
    let mut jobs = Vec::with_capacity(count);
    for i in 0..count {
        let name = names[i % 4];
        let k = rng.gen_range(0..kernels.len());
        let e = rate(EPSILONS.choose(&mut rng).expect("nonempty"));
        let phi = random_formula(&mut rng, 2, &grid, Fragment::Full);
        let psi = random_formula(&mut rng, 2, &grid, Fragment::Full);
        let r = grid.choose(&mut rng).expect("nonempty").clone();
        let s = grid.choose(&mut rng).expect("nonempty").clone();
        let r = match name {
            AxiomName::A3 | AxiomName::A4 => r + &e,
            _ => r,
        };
        jobs.push((name, k, e, phi, psi, r, s));
    }
    let m = ctx.mutation;
    let parts: Vec<Tally> = jobs
        .par_iter()
        .map(|(name, ki, e, phi, psi, r, s)| {
            let mut t = Tally::default();
            let inst = match axiom_instance(*name, e, phi, Some(psi), Some(r), Some(s)) {
                Ok(f) => f,
                Err(err) => {
                    t.fail(Failure::new(format!("{name:?} did not instantiate: {err}")));
                    return t;
                }
            };
            let k = &kernels[*ki];
            t.checked += 1;
            if !valid_on_with(k, &inst, e, m) {
                let msg = format!("{name:?} instance not valid at ε={e}");
                t.fail(pair_failure(&shrinks, msg, k, &inst, |k, f| !valid_on_with(k, f, e, m)));
            }
            t
        })
        .collect();
    let mut t = merge(parts);
    t.notes.push(format!("{count} axiom instances"));
    t.finish()
}

fn proof_batch(ctx: &Context, salt: u64, count: usize) -> Vec<Proof> {
    let grid = ctx.grid();
    let mut rng = ctx.rng(salt);
    (0..count)
        .map(|i| {
            let e = rate(EPSILONS[i % EPSILONS.len()]);
            let steps = rng.gen_range(2..12);
            random_proof(&mut rng, &e, &grid, steps)
        })
        .collect()
}

fn conclusion_failures(ctx: &Context, t: &mut Tally, p: &Proof, kernels: &[Kernel], label: &str) {
    for k in kernels {
        t.checked += 1;
        if !valid_on_with(k, &p.conclusion, &p.epsilon, ctx.mutation) {
            let msg = format!("{label} conclusion not valid at ε={}", p.epsilon);
            t.fail(Failure::new(msg).with_kernel(k).with_formula(&p.conclusion));
            return;
        }
    }
}

/// Accepted hypothesis-free proofs have ε-valid conclusions.
pub fn soundness(ctx: &Context) -> Outcome {
    let kernels = axiom_corpus(ctx);
    let proofs = proof_batch(ctx, 161, 200);
    let parts: Vec<Tally> = proofs
        .par_iter()
        .map(|p| {
            let mut t = Tally::default();
            match check(p) {
                Ok(()) => conclusion_failures(ctx, &mut t, p, &kernels, "proof"),
                Err(d) => t.fail(Failure::new(format!("generated proof rejected: {}", d[0].message))),
            }
            t
        })
        .collect();
    merge(parts).finish()
}

/// Both clauses of the deduction theorem with validity over the corpus in
/// place of provability.
pub fn deduction(ctx: &Context) -> Outcome {
    let kernels = corpus(ctx, ctx.budget.kernels.min(20), ctx.budget.max_states, 171);
    let positive: Vec<Formula> = ctx.formulas(Fragment::Positive, 20, 172).into_iter().step_by(9).take(40).collect();
    let full: Vec<Formula> = ctx.formulas(Fragment::Full, 20, 173).into_iter().step_by(9).take(40).collect();
    let samples: Vec<Rate> = ["1/10", "1/3", "1"].iter().map(|s| rate(s)).collect();
    let mut levels: Vec<Rate> = samples.clone();
    for a in &samples {
        for b in &samples {
            levels.push(a + b);
        }
    }
    levels.sort();
    levels.dedup();
    let level = |r: &Rate| levels.binary_search(r).expect("listed");
    let extensions = |fs: &[Formula]| -> Vec<Vec<Vec<StateSet>>> {
        kernels
            .par_iter()
            .map(|k| fs.iter().map(|f| levels.iter().map(|e| ev(ctx, k, f, e)).collect()).collect())
            .collect()
    };
    let pos_ext = extensions(&positive);
    let full_ext = extensions(&full);
    let everywhere = |test: &dyn Fn(usize) -> bool| (0..kernels.len()).all(test);
    let mut t = Tally::default();
    for (pi, phi) in positive.iter().enumerate() {
        for e1 in &samples {
            let l1 = level(e1);
            if !everywhere(&|k| pos_ext[k][pi][l1].len() == kernels[k].len()) {
                continue;
            }
            for e in &samples {
                let l2 = level(&(e1 + e));
                for (qi, psi) in full.iter().enumerate() {
                    t.checked += 1;
                    let conclusion = everywhere(&|k| full_ext[k][qi][l2].len() == kernels[k].len());
                    let forward = everywhere(&|k| pos_ext[k][pi][l2].is_subset(&full_ext[k][qi][l2]));
                    let backward = everywhere(&|k| {
                        full_ext[k][qi][l2].complement().is_subset(&pos_ext[k][pi][l2].complement())
                    });
                    if (forward || backward) && !conclusion {
                        let which = if forward { "implication" } else { "contrapositive" };
                        let msg = format!("{which} clause fails for φ = {phi} at ε′={e1}, ε={e}");
                        t.fail(Failure::new(msg).with_formula(psi));
                    }
                }
            }
        }
    }
    t.finish()
}

/// Proofs moved up (and, where admissible, down) still check and stay sound.
pub fn translation(ctx: &Context) -> Outcome {
    let kernels = corpus(ctx, 8, ctx.budget.max_states.min(4), 181);
    let proofs = proof_batch(ctx, 182, 120);
    let shifts: Vec<Rate> = ["1/10", "1/2", "1", "2"].iter().map(|s| rate(s)).collect();
    let parts: Vec<Tally> = proofs
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut t = Tally::default();
            if check(p).is_err() {
                t.fail(Failure::new("generated proof rejected"));
                return t;
            }
            let e = &shifts[i % shifts.len()];
            for direction in [Direction::Up, Direction::Down] {
                let moved = match translate_proof(p, e, direction) {
                    Ok(q) => q,
                    Err(err) if direction == Direction::Down => {
                        t.notes.extend((i == 0).then(|| format!("down-translation refused: {err}")));
                        continue;
                    }
                    Err(err) => {
                        t.fail(Failure::new(format!("up-translation refused: {err}")));
                        continue;
                    }
                };
                t.checked += 1;
                match check(&moved) {
                    Ok(()) => conclusion_failures(ctx, &mut t, &moved, &kernels, "translated"),
                    Err(d) => {
                        let msg = format!("{direction:?}-translated proof by {e} rejected: {}", d[0].message);
                        t.fail(Failure::new(msg).with_formula(&moved.conclusion));
                    }
                }
            }
            t
        })
        .collect();
    merge(parts).finish()
}
