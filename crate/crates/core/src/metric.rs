//! The behavioral pseudometric `d(m, n) = inf{ε | m ≺_ε n and n ≺_ε m}`.
//!
//! Feasibility of `m ≺_ε n` is a step function of `ε`. Starting from a bound
//! where `M × M` is an order, the largest order `R` at the current level has
//! some maximal slack `σ`; for every `ε ∈ [σ, previous)` the largest order is
//! `R` itself, and just below `σ` it is the largest order with every slack
//! strictly under `σ`. Walking these levels down to 0 yields every distance
//! of a kernel at once.

use std::collections::BTreeSet;

use num_traits::Signed;
use thiserror::Error;

use crate::equivalence::{generators, Partition};
use crate::kernel::{disjoint_union, Kernel, KernelError, Relation, StateSet};
use crate::orders::{Bound, OrderEngine};
use crate::rate::Rate;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distance {
    pub value: Rate,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("internal error: the full relation is not an order at {0}")]
    Infeasible(Rate),
}

/// The descending levels of the largest plain order on one kernel.
pub struct Chain {
    /// `(σ, R)`: for `ε ≥ σ` up to the previous level the largest order is
    /// the relation of the previous step; `R` is the largest order below `σ`.
    steps: Vec<(Rate, Relation)>,
}

impl Chain {
    pub fn new(k: &Kernel) -> Result<Chain, MetricError> {
        let engine = OrderEngine::new(k, false);
        let start = (0..k.len()).map(|m| k.exit_rate(m)).max().unwrap_or_default();
        let mut r = engine.gfp(&Bound::AtMost(start.clone()));
        if r != Relation::full(k.len()) {
            return Err(MetricError::Infeasible(start));
        }
        let mut steps = Vec::new();
        loop {
            let sigma = match engine.max_slack(&r) {
                Some(s) if s.is_positive() => Rate::clamp_ratio(s),
                _ => break,
            };
            let next = engine.gfp(&Bound::Below(sigma.clone()));
            steps.push((sigma, next.clone()));
            r = next;
        }
        Ok(Chain { steps })
    }

    /// `d(m, n)` for two states of the chain's kernel.
    pub fn distance(&self, m: usize, n: usize) -> Rate {
        for (sigma, r) in &self.steps {
            if !(r.contains(m, n) && r.contains(n, m)) {
                return sigma.clone();
            }
        }
        Rate::zero()
    }

    /// The levels at which the largest order changes, largest first.
    pub fn levels(&self) -> impl Iterator<Item = &Rate> {
        self.steps.iter().map(|(s, _)| s)
    }
}

/// `d` between states of one kernel.
pub fn distance_within(k: &Kernel, m: usize, n: usize) -> Result<Distance, MetricError> {
    let chain = Chain::new(k)?;
    let value = chain.distance(m, n);
    if !feasible(k, m, n, &value) {
        return Ok(Distance {
            value: distance_by_scan(k, m, n),
        });
    }
    Ok(Distance { value })
}

/// `d((k1, m), (k2, n))`, computed on `k1 ⊎ k2`.
pub fn distance(k1: &Kernel, m: &str, k2: &Kernel, n: &str) -> Result<Distance, MetricError> {
    let m = k1.index_of(m)?;
    let n = k2.index_of(n)? + k1.len();
    distance_within(&disjoint_union(k1, k2), m, n)
}

/// All pairwise distances of one kernel.
pub fn distance_matrix(k: &Kernel) -> Result<Vec<Vec<Rate>>, MetricError> {
    let chain = Chain::new(k)?;
    Ok((0..k.len())
        .map(|m| (0..k.len()).map(|n| chain.distance(m, n)).collect())
        .collect())
}

/// Whether `m ≺_e n` and `n ≺_e m`.
pub fn feasible(k: &Kernel, m: usize, n: usize, e: &Rate) -> bool {
    let r = OrderEngine::new(k, false).gfp(&Bound::AtMost(e.clone()));
    r.contains(m, n) && r.contains(n, m)
}

/// Every nonnegative `θ(y)(C) − θ(x)(S)` with `C` a generator and `S ⊇ C` a
/// union of bisimulation blocks, together with 0.
pub fn exhaustive_candidates(k: &Kernel) -> Vec<Rate> {
    let part = crate::equivalence::bisimulation(k);
    let family = generators(k, false);
    let closed = closed_sets(k, &part);
    let n = k.len();
    let mut out: BTreeSet<Rate> = BTreeSet::new();
    out.insert(Rate::zero());
    for c in family.iter() {
        let ups: BTreeSet<Rate> = (0..n).map(|y| k.mass(y, c)).collect();
        for s in closed.iter().filter(|s| c.is_subset(s)) {
            for x in 0..n {
                let low = k.mass(x, s);
                for up in &ups {
                    if let Some(v) = up.checked_sub(&low) {
                        out.insert(v);
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

fn closed_sets(k: &Kernel, part: &Partition) -> Vec<StateSet> {
    let blocks = part.blocks();
    assert!(blocks.len() < 24, "too many blocks to enumerate closed sets");
    (0u32..1 << blocks.len())
        .map(|mask| {
            let mut s = k.no_states();
            for (j, b) in blocks.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    s.union_with(b);
                }
            }
            s
        })
        .collect()
}

/// Sorted scan over [`exhaustive_candidates`]: the least candidate at which
/// both directions hold.
pub fn distance_by_scan(k: &Kernel, m: usize, n: usize) -> Rate {
    let engine = OrderEngine::new(k, false);
    for c in exhaustive_candidates(k) {
        let r = engine.gfp(&Bound::AtMost(c.clone()));
        if r.contains(m, n) && r.contains(n, m) {
            return c;
        }
    }
    unreachable!("the largest candidate is at least every exit rate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::bisimulation;
    use crate::fixtures;
    use crate::rate::rate;

    #[test]
    fn figure_four_distances() {
        let m = fixtures::figure1();
        let o = fixtures::figure4_o();
        let n = fixtures::figure4_n();
        assert_eq!(distance(&m, "m", &o, "o").unwrap().value, rate("3/10"));
        assert_eq!(distance(&m, "m", &n, "n").unwrap().value, rate("1/10"));
    }

    #[test]
    fn reflexive() {
        let k = fixtures::figure1();
        for s in k.states() {
            assert_eq!(distance(&k, s, &k, s).unwrap().value, Rate::zero());
        }
        assert!(distance(&k, "x", &k, "m").is_err());
    }

    #[test]
    fn chain_matches_scan() {
        let u = disjoint_union(&fixtures::figure1(), &fixtures::figure4_n());
        let d = distance_matrix(&u).unwrap();
        let part = bisimulation(&u);
        for m in 0..u.len() {
            for n in 0..u.len() {
                assert_eq!(d[m][n], d[n][m]);
                assert_eq!(d[m][n].is_zero(), part.same_block(m, n));
            }
        }
        for (m, n) in [(0, 6), (2, 8), (1, 7)] {
            assert_eq!(d[m][n], distance_by_scan(&u, m, n));
        }
    }

    #[test]
    fn single_loops() {
        let a = fixtures::single_loop(rate("1"));
        let b = fixtures::single_loop(rate("5/2"));
        assert_eq!(distance(&a, "m", &b, "m").unwrap().value, rate("3/2"));
    }

    #[test]
    fn empty_kernel_has_no_levels() {
        let k = Kernel::new(Vec::<String>::new(), []).unwrap();
        assert_eq!(Chain::new(&k).unwrap().levels().count(), 0);
    }
}
