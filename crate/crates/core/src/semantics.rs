//! ε-satisfiability over finite kernels.
//!
//! `m ⊨_ε L_r φ` holds iff `θ(m)(⟦φ⟧_ε) + ε ≥ r`; the Boolean connectives are
//! classical. Extensions are computed bottom-up with exact comparisons.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::Formula;
use crate::kernel::{Kernel, KernelError, StateSet};
use crate::mutation::Mutation;
use crate::rate::Rate;

/// `⟦φ⟧_ε` on one kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub formula: Formula,
    pub epsilon: Rate,
    pub states: StateSet,
}

impl Extension {
    pub fn compute(k: &Kernel, f: &Formula, e: &Rate) -> Extension {
        Extension {
            formula: f.clone(),
            epsilon: e.clone(),
            states: eval(k, f, e),
        }
    }
}

/// Memoizing evaluator for one kernel and one ε.
pub struct Evaluator<'k, 'f> {
    kernel: &'k Kernel,
    epsilon: Rate,
    memo: HashMap<&'f Formula, StateSet>,
    mutation: Option<Mutation>,
}

impl<'k, 'f> Evaluator<'k, 'f> {
    pub fn new(kernel: &'k Kernel, epsilon: &Rate) -> Self {
        Evaluator {
            kernel,
            epsilon: epsilon.clone(),
            memo: HashMap::new(),
            mutation: None,
        }
    }

    pub(crate) fn with_mutation(mut self, mutation: Option<Mutation>) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn eval(&mut self, f: &'f Formula) -> StateSet {
        if let Some(hit) = self.memo.get(f) {
            return hit.clone();
        }
        let n = self.kernel.len();
        let out = match f {
            Formula::Top => StateSet::full(n),
            Formula::Not(inner, _) => self.eval(inner).complement(),
            Formula::And(a, b) => {
                let a = self.eval(a);
                a.intersection(&self.eval(b))
            }
            Formula::L(r, inner) => {
                let target = self.eval(inner);
                let mut out = StateSet::empty(n);
                for m in 0..n {
                    if self.modal_holds(&self.kernel.mass(m, &target), r) {
                        out.insert(m);
                    }
                }
                out
            }
        };
        self.memo.insert(f, out.clone());
        out
    }

    fn modal_holds(&self, mass: &Rate, r: &Rate) -> bool {
        match self.mutation {
            Some(Mutation::DropEpsilon) => mass >= r,
            Some(Mutation::StrictComparison) => &(mass + &self.epsilon) > r,
            _ => &(mass + &self.epsilon) >= r,
        }
    }
}

/// `⟦f⟧_e`.
pub fn eval(k: &Kernel, f: &Formula, e: &Rate) -> StateSet {
    Evaluator::new(k, e).eval(f)
}

pub(crate) fn eval_with(
    k: &Kernel,
    f: &Formula,
    e: &Rate,
    mutation: Option<Mutation>,
) -> StateSet {
    Evaluator::new(k, e).with_mutation(mutation).eval(f)
}

/// `m ⊨_e f` for the named state.
pub fn sat(k: &Kernel, m: &str, f: &Formula, e: &Rate) -> Result<bool, KernelError> {
    let idx = k.index_of(m)?;
    Ok(eval(k, f, e).contains(idx))
}

/// Whether every state of `k` ε-satisfies `f`.
pub fn valid_on(k: &Kernel, f: &Formula, e: &Rate) -> bool {
    eval(k, f, e).len() == k.len()
}

pub(crate) fn valid_on_with(k: &Kernel, f: &Formula, e: &Rate, m: Option<Mutation>) -> bool {
    eval_with(k, f, e, m).len() == k.len()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search over {states}-state kernels needs {needed} candidates, over the limit of {limit}")]
    ResourceLimit {
        states: usize,
        needed: String,
        limit: u64,
    },
    #[error("invalid search bounds: {0}")]
    InvalidBounds(&'static str),
}

/// A satisfying process found by [`search_model`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kernel: Kernel,
    pub state: String,
}

/// Upper limit on kernels examined by [`search_model`] unless overridden.
pub const DEFAULT_SEARCH_LIMIT: u64 = 2_000_000;

/// Bounded search for a finite model: tries every kernel with `1..=max_states`
/// states and rates from `grid`, smallest first. `Ok(None)` only says no such
/// kernel exists within the bounds; it is not a proof of unsatisfiability.
pub fn search_model(
    f: &Formula,
    e: &Rate,
    max_states: usize,
    grid: &[Rate],
) -> Result<Option<Witness>, SearchError> {
    search_model_limited(f, e, max_states, grid, DEFAULT_SEARCH_LIMIT)
}

pub fn search_model_limited(
    f: &Formula,
    e: &Rate,
    max_states: usize,
    grid: &[Rate],
    limit: u64,
) -> Result<Option<Witness>, SearchError> {
    if max_states == 0 {
        return Err(SearchError::InvalidBounds("max_states must be at least 1"));
    }
    let grid: Vec<Rate> = grid
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if grid.is_empty() {
        return Err(SearchError::InvalidBounds("rate grid is empty"));
    }
    let mut budget = limit;
    for n in 1..=max_states {
        let cells = (n * n) as u32;
        let needed = (grid.len() as u64).checked_pow(cells);
        match needed {
            Some(c) if c <= budget => budget -= c,
            _ => {
                let needed = num_bigint::BigUint::from(grid.len()).pow(cells);
                return Err(SearchError::ResourceLimit {
                    states: n,
                    needed: needed.to_string(),
                    limit,
                });
            }
        }
        let names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let mut digits = vec![0usize; n * n];
        loop {
            let rates = digits
                .iter()
                .enumerate()
                .filter(|(_, &d)| !grid[d].is_zero())
                .map(|(cell, &d)| (cell / n, cell % n, grid[d].clone()));
            let kernel = Kernel::new(names.iter().cloned(), rates).expect("generated names are unique");
            if let Some(m) = eval(&kernel, f, e).iter().next() {
                let state = kernel.name(m).to_string();
                return Ok(Some(Witness { kernel, state }));
            }
            if !advance(&mut digits, grid.len()) {
                break;
            }
        }
    }
    Ok(None)
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// The indices of `f` and 0, closed under pairwise sums that stay at most
/// `max index + e`.
pub fn default_grid(f: &Formula, e: &Rate) -> Vec<Rate> {
    let mut grid: BTreeSet<Rate> = f.indices().into_iter().collect();
    grid.insert(Rate::zero());
    let bound = grid.iter().max().cloned().unwrap_or_default() + e;
    loop {
        let current: Vec<Rate> = grid.iter().cloned().collect();
        let mut grew = false;
        for (i, a) in current.iter().enumerate() {
            for b in &current[i..] {
                let sum = a + b;
                if sum <= bound && grid.insert(sum) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    grid.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::parse;
    use crate::rate::rate;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn at(k: &Kernel, text: &str, e: &str) -> Vec<String> {
        k.names_of(&eval(k, &p(text), &rate(e)))
    }

    #[test]
    fn figure_one_classic_and_parameterized() {
        let k = fixtures::figure1();
        // L_{s+s'} L_u T with s+s' = 5, u = 4
        assert!(sat(&k, "m", &p("L{5} L{4} T"), &Rate::zero()).unwrap());
        assert_eq!(at(&k, "L{5} L{4} T", "0"), ["m"]);
        let e = "1/10";
        let shifted = p("L{51/10} L{41/10} T");
        assert!(sat(&k, "m", &shifted, &rate(e)).unwrap());
        assert!(!sat(&k, "m", &shifted, &Rate::zero()).unwrap());
    }

    #[test]
    fn l_zero_holds_everywhere() {
        let k = fixtures::figure1();
        assert!(valid_on(&k, &p("L{0} T"), &Rate::zero()));
        assert!(valid_on(&k, &p("L{0} F"), &Rate::zero()));
    }

    #[test]
    fn negation_counterexample() {
        let r = rate("2");
        let k = fixtures::single_loop(r.clone());
        for delta in ["1/100", "1/2", "3"] {
            let f = Formula::not(Formula::l(&r + &rate(delta), Formula::Top));
            assert!(sat(&k, "m", &f, &Rate::zero()).unwrap());
            // fails as soon as delta <= epsilon
            assert!(!sat(&k, "m", &f, &rate(delta)).unwrap());
            assert!(!sat(&k, "m", &f, &(rate(delta) + rate("1"))).unwrap());
        }
        assert!(sat(&k, "m", &Formula::Top, &rate("7")).unwrap());
        assert!(sat(&k, "nope", &Formula::Top, &Rate::zero()).is_err());
    }

    #[test]
    fn axioms_one_and_two_are_valid_here() {
        let k = fixtures::figure3_o();
        for e in ["0", "1/10", "2"] {
            let a1 = Formula::l(rate(e), p("L{3} T"));
            assert!(valid_on(&k, &a1, &rate(e)));
            assert!(valid_on(&k, &p("L{7/2} L{1} T -> L{1/2} L{1} T"), &rate(e)));
        }
        assert!(valid_on(&k, &Formula::Top, &rate("1")));
    }

    #[test]
    fn memo_shares_repeated_subformulas() {
        let k = fixtures::figure1();
        let leaf = p("L{4} T");
        let f = Formula::and(leaf.clone(), Formula::not(leaf.clone()));
        let mut ev = Evaluator::new(&k, &Rate::zero());
        assert!(ev.eval(&f).is_empty());
        assert_eq!(ev.memo.len(), 4);
    }

    #[test]
    fn mutations_change_the_modal_clause() {
        let k = fixtures::single_loop(rate("1"));
        let f = p("L{2} T");
        assert!(eval(&k, &f, &rate("1")).contains(0));
        assert!(!eval_with(&k, &f, &rate("1"), Some(Mutation::DropEpsilon)).contains(0));
        assert!(!eval_with(&k, &f, &rate("1"), Some(Mutation::StrictComparison)).contains(0));
    }

    #[test]
    fn search_examples() {
        let w = search_model(&p("L{2} T"), &Rate::zero(), 1, &[rate("0"), rate("2")])
            .unwrap()
            .unwrap();
        assert_eq!(w.kernel.rate(0, 0), &rate("2"));
        assert_eq!(w.state, "w0");
        let w = search_model(&p("L{3} T"), &rate("1"), 1, &[rate("0"), rate("2")])
            .unwrap()
            .unwrap();
        assert_eq!(w.kernel.rate(0, 0), &rate("2"));
        for bound in 1..=2 {
            let none = search_model(&p("F"), &rate("1"), bound, &[rate("0"), rate("1")]);
            assert_eq!(none, Ok(None));
        }
        assert!(search_model(&p("L{3} T"), &Rate::zero(), 1, &[rate("0"), rate("2")])
            .unwrap()
            .is_none());
    }

    #[test]
    fn search_limits_are_distinct_from_none() {
        let err = search_model_limited(&p("F"), &Rate::zero(), 3, &[rate("0"), rate("1")], 100)
            .unwrap_err();
        assert!(matches!(err, SearchError::ResourceLimit { states: 3, .. }));
        assert!(search_model(&p("T"), &Rate::zero(), 0, &[rate("0")]).is_err());
        assert!(search_model(&p("T"), &Rate::zero(), 1, &[]).is_err());
    }

    #[test]
    fn search_finds_two_state_models() {
        // needs a successor that itself has no exit: L_1 !L_1 T
        let f = p("L{1} !L{1} T & L{1} T");
        let w = search_model(&f, &Rate::zero(), 2, &default_grid(&f, &Rate::zero()))
            .unwrap()
            .unwrap();
        assert!(sat(&w.kernel, &w.state, &f, &Rate::zero()).unwrap());
        assert_eq!(w.kernel.len(), 2);
    }

    #[test]
    fn default_grid_closes_under_sums() {
        let g = default_grid(&p("L{1} L{3/2} T"), &rate("1/2"));
        let expected: Vec<Rate> = ["0", "1", "3/2", "2"].iter().map(|s| rate(s)).collect();
        assert_eq!(g, expected);
    }
}
