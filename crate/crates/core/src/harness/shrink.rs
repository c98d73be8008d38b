//! Greedy counterexample minimization.

use crate::formula::Formula;
use crate::kernel::Kernel;

fn kernel_candidates(k: &Kernel) -> Vec<Kernel> {
    let mut out = Vec::new();
    if k.len() > 1 {
        for m in (0..k.len()).rev() {
            out.push(k.without_state(m));
        }
    }
    for a in 0..k.len() {
        for b in 0..k.len() {
            if !k.rate(a, b).is_zero() {
                out.push(k.with_rate(a, b, crate::rate::Rate::zero()));
            }
        }
    }
    out
}

fn formula_candidates(f: &Formula) -> Vec<Formula> {
    let mut out: Vec<Formula> = f.children().into_iter().cloned().collect();
    if *f != Formula::Top {
        out.push(Formula::Top);
    }
    match f {
        Formula::Not(inner, sugar) => {
            for g in formula_candidates(inner) {
                out.push(Formula::Not(Box::new(g), *sugar));
            }
        }
        Formula::And(a, b) => {
            for g in formula_candidates(a) {
                out.push(Formula::and(g, (**b).clone()));
            }
            for g in formula_candidates(b) {
                out.push(Formula::and((**a).clone(), g));
            }
        }
        Formula::L(r, inner) => {
            for g in formula_candidates(inner) {
                out.push(Formula::l(r.clone(), g));
            }
        }
        Formula::Top => {}
    }
    out
}

/// Drops states and zeroes rates while `fails` keeps returning true.
pub fn shrink_kernel(k: &Kernel, fails: impl Fn(&Kernel) -> bool) -> Kernel {
    let mut current = k.clone();
    'outer: loop {
        for c in kernel_candidates(&current) {
            if fails(&c) {
                current = c;
                continue 'outer;
            }
        }
        return current;
    }
}

/// Alternates kernel and formula steps while `fails` keeps returning true.
pub fn shrink_pair(
    k: &Kernel,
    f: &Formula,
    fails: impl Fn(&Kernel, &Formula) -> bool,
) -> (Kernel, Formula) {
    let mut kernel = k.clone();
    let mut formula = f.clone();
    'outer: loop {
        for c in kernel_candidates(&kernel) {
            if fails(&c, &formula) {
                kernel = c;
                continue 'outer;
            }
        }
        for g in formula_candidates(&formula) {
            if g.size() < formula.size() && fails(&kernel, &g) {
                formula = g;
                continue 'outer;
            }
        }
        return (kernel, formula);
    }
}
