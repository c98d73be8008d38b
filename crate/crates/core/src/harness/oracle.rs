//! Exact semantic closures used as oracles for the characterization
//! theorems and the distinguishing-formula search.
//!
//! Every extension of an `L_r` formula is a threshold set `{x | θ(x)(S) + e ≥ r}`
//! that only changes when `r` crosses a value `θ(x)(S) + e`. Taking each such
//! value, plus one value above all of them, reaches every extension any
//! index could produce.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::formula::Formula;
use crate::kernel::{Kernel, Relation, StateSet};
use crate::rate::Rate;

/// A set of extension pairs `(⟦φ⟧_0, ⟦φ'⟧_e)`.
pub type PairSet = HashSet<(StateSet, StateSet)>;

fn above(k: &Kernel, s: &StateSet, shift: &Rate, r: &Rate) -> StateSet {
    StateSet::from_indices(k.len(), (0..k.len()).filter(|&x| &(k.mass(x, s) + shift) >= r))
}

fn masses<'a>(k: &'a Kernel, s: &'a StateSet, shift: &Rate) -> impl Iterator<Item = Rate> + 'a {
    let shift = shift.clone();
    (0..k.len()).map(move |x| k.mass(x, s) + &shift)
}

fn with_ceiling(mut values: BTreeSet<Rate>) -> BTreeSet<Rate> {
    let top = values.iter().max().cloned().unwrap_or_default() + Rate::from_integer(1);
    values.insert(top);
    values
}

/// Closes `seeds` under the literal step `step` and componentwise `∪`, `∩`.
fn close(
    seeds: Vec<(StateSet, StateSet)>,
    mut step: impl FnMut(&(StateSet, StateSet)) -> Vec<(StateSet, StateSet)>,
) -> PairSet {
    let mut set: PairSet = HashSet::new();
    let mut members: Vec<(StateSet, StateSet)> = Vec::new();
    let mut queue: Vec<(StateSet, StateSet)> = Vec::new();
    for s in seeds {
        if set.insert(s.clone()) {
            members.push(s.clone());
            queue.push(s);
        }
    }
    while let Some(p) = queue.pop() {
        let mut new = step(&p);
        for q in &members {
            new.push((p.0.intersection(&q.0), p.1.intersection(&q.1)));
            new.push((p.0.union(&q.0), p.1.union(&q.1)));
        }
        for s in new {
            if set.insert(s.clone()) {
                members.push(s.clone());
                queue.push(s);
            }
        }
    }
    set
}

/// `{(⟦φ⟧_0, ⟦φ⟧_e) | φ ∈ L⁺}`.
pub fn positive_pairs(k: &Kernel, e: &Rate) -> PairSet {
    let zero = Rate::zero();
    close(vec![(k.all_states(), k.all_states())], |(a, b)| {
        let values: BTreeSet<Rate> = masses(k, a, &zero).chain(masses(k, b, e)).collect();
        with_ceiling(values)
            .iter()
            .map(|r| (above(k, a, &zero, r), above(k, b, e, r)))
            .collect()
    })
}

/// `{(⟦φ⟧_0, ⟦|φ|_e⟧_e) | φ ∈ L}`. Normal forms are built from literals
/// by `∧` and `∨`; a positive literal `L_r ψ` contributes
/// `(⟦L_r ψ⟧_0, ⟦L_r |ψ|_e⟧_e)` and a negated one
/// `(⟦¬L_r ψ⟧_0, ⟦¬L_{r+e} |ψ|_e⟧_e)`.
pub fn abs_pairs(k: &Kernel, e: &Rate) -> PairSet {
    let zero = Rate::zero();
    let n = k.len();
    close(
        vec![(k.all_states(), k.all_states()), (k.no_states(), k.no_states())],
        |(a, b)| {
            let values: BTreeSet<Rate> = masses(k, a, &zero)
                .chain(masses(k, b, e))
                .chain(masses(k, b, &zero))
                .collect();
            let mut out = Vec::new();
            for r in with_ceiling(values) {
                let pos0 = above(k, a, &zero, &r);
                out.push((pos0.clone(), above(k, b, e, &r)));
                let neg_e = StateSet::from_indices(n, (0..n).filter(|&x| k.mass(x, b) < r));
                out.push((pos0.complement(), neg_e));
            }
            out
        },
    )
}

/// `{(m, n) | ∀(A, B) ∈ pairs. n ∈ A ⇒ m ∈ B}`.
pub fn logical_relation(n: usize, pairs: &PairSet) -> Relation {
    let mut r = Relation::full(n);
    for (a, b) in pairs {
        for target in a.iter() {
            for source in 0..n {
                if !b.contains(source) {
                    r.remove(source, target);
                }
            }
        }
    }
    r
}

/// Extensions at `e` of formulas with modal depth at most `depth`, each with
/// a formula that defines it. Indices are the values `θ(x)(S) + e` for
/// already definable `S`; the family is Boolean closed at every level.
pub fn definable_sets(k: &Kernel, e: &Rate, depth: usize) -> Vec<(StateSet, Formula)> {
    let mut family: HashMap<StateSet, Formula> = HashMap::new();
    let mut order: Vec<StateSet> = Vec::new();
    let insert = |s: StateSet, f: Formula, family: &mut HashMap<StateSet, Formula>, order: &mut Vec<StateSet>| {
        if !family.contains_key(&s) {
            family.insert(s.clone(), f);
            order.push(s);
        }
    };
    insert(k.all_states(), Formula::Top, &mut family, &mut order);
    boolean_close(&mut family, &mut order);
    for _ in 0..depth {
        let current: Vec<(StateSet, Formula)> = order.iter().map(|s| (s.clone(), family[s].clone())).collect();
        for (s, f) in current {
            let values: BTreeSet<Rate> = masses(k, &s, e).collect();
            for r in values {
                insert(above(k, &s, e, &r), Formula::l(r, f.clone()), &mut family, &mut order);
            }
        }
        boolean_close(&mut family, &mut order);
    }
    order.into_iter().map(|s| {
        let f = family[&s].clone();
        (s, f)
    }).collect()
}

fn boolean_close(family: &mut HashMap<StateSet, Formula>, order: &mut Vec<StateSet>) {
    let mut i = 0;
    while i < order.len() {
        let s = order[i].clone();
        let f = family[&s].clone();
        let mut new = vec![(s.complement(), Formula::not(f.clone()))];
        for t in order.iter().take(i + 1) {
            new.push((s.intersection(t), Formula::and(f.clone(), family[t].clone())));
        }
        for (set, g) in new {
            if !family.contains_key(&set) {
                family.insert(set.clone(), g);
                order.push(set);
            }
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::{encode_abs, parse};
    use crate::rate::rate;
    use crate::semantics::eval;

    #[test]
    fn enumerated_formulas_land_in_the_closures() {
        let k = fixtures::figure3_n();
        let e = rate("1/10");
        let pos = positive_pairs(&k, &e);
        let abs = abs_pairs(&k, &e);
        for text in ["T", "L{5} T", "L{1} T | L{6} L{4} T", "L{39/10} T & L{0} T"] {
            let f = parse(text).unwrap();
            assert!(pos.contains(&(eval(&k, &f, &Rate::zero()), eval(&k, &f, &e))), "{text}");
        }
        for text in ["!L{5} T", "L{1} !L{4} T", "!(L{1} T & !L{2} L{1} T)", "F"] {
            let f = parse(text).unwrap();
            let pair = (eval(&k, &f, &Rate::zero()), eval(&k, &encode_abs(&f, &e), &e));
            assert!(abs.contains(&pair), "{text}");
        }
    }

    #[test]
    fn definable_sets_have_witnesses() {
        let k = fixtures::figure1();
        for e in ["0", "1/3"] {
            let e = rate(e);
            for (s, f) in definable_sets(&k, &e, 2) {
                assert_eq!(eval(&k, &f, &e), s);
            }
        }
    }

    #[test]
    fn logical_relation_of_trivial_pairs_is_full() {
        let k = fixtures::single_loop(rate("1"));
        let mut pairs = PairSet::new();
        pairs.insert((k.all_states(), k.all_states()));
        assert_eq!(logical_relation(1, &pairs), Relation::full(1));
    }
}
