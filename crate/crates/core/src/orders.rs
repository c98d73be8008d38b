//! ε-behavioral orders and their essential variant, as greatest fixpoints.
//!
//! A pair `(m, n)` of a relation `R` reads `m ≺ n`. For every generator set
//! `C` the condition is `θ(n)(C) − θ(m)(C^R) ≤ ε`, where `C^R` adds to `C`
//! every state `R`-related to one of its members; the essential variant also
//! asks for the slack to be nonnegative and ranges over the complement-closed
//! family.

use num_rational::BigRational;
use num_traits::Signed;

use crate::equivalence::{bisimulation, generators, GeneratorFamily, Partition};
use crate::kernel::{disjoint_union, Kernel, KernelError, Relation, StateSet};
use crate::rate::Rate;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonOrder {
    pub epsilon: Rate,
    pub relation: Relation,
    pub essential: bool,
}

/// Bound imposed on every slack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    AtMost(Rate),
    Below(Rate),
}

impl Bound {
    fn admits(&self, slack: &BigRational) -> bool {
        match self {
            Bound::AtMost(e) => slack <= e.as_ratio(),
            Bound::Below(e) => slack < e.as_ratio(),
        }
    }
}

/// Precomputed data for repeated fixpoint runs on one kernel.
pub struct OrderEngine<'k> {
    kernel: &'k Kernel,
    partition: Partition,
    family: GeneratorFamily,
    essential: bool,
    /// `upper[b][i] = θ(b)(C_i)`
    upper: Vec<Vec<Rate>>,
}

impl<'k> OrderEngine<'k> {
    pub fn new(kernel: &'k Kernel, essential: bool) -> Self {
        let partition = bisimulation(kernel);
        let family = generators(kernel, essential);
        Self::with_parts(kernel, partition, family, essential)
    }

    pub fn with_parts(
        kernel: &'k Kernel,
        partition: Partition,
        family: GeneratorFamily,
        essential: bool,
    ) -> Self {
        let upper = (0..kernel.len())
            .map(|b| family.iter().map(|c| kernel.mass(b, c)).collect())
            .collect();
        OrderEngine {
            kernel,
            partition,
            family,
            essential,
            upper,
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn family(&self) -> &GeneratorFamily {
        &self.family
    }

    /// `θ(a)(C^R)` for every generator `C`, indexed like the family.
    fn lower(&self, a: usize, closures: &[StateSet]) -> Vec<Rate> {
        debug_assert_eq!(closures.len(), self.family.len());
        closures.iter().map(|c| self.kernel.mass(a, c)).collect()
    }

    fn closures(&self, r: &Relation) -> Vec<StateSet> {
        self.family.iter().map(|c| r.preimage_closure(c)).collect()
    }

    fn pair_ok(&self, lower: &[Rate], b: usize, bound: &Bound) -> bool {
        self.upper[b].iter().zip(lower).all(|(up, low)| {
            let slack = up.diff(low);
            bound.admits(&slack) && (!self.essential || !slack.is_negative())
        })
    }

    /// Deletion fixpoint from `M × M`: drops every pair that fails `bound`
    /// against the current relation until nothing changes. For plain orders
    /// the condition is monotone in the relation and this is the largest
    /// `∼`-closed relation meeting `bound`. The essential condition is not
    /// monotone, so there it only yields some fixpoint; see
    /// [`OrderEngine::essential_union`].
    pub fn gfp(&self, bound: &Bound) -> Relation {
        let n = self.kernel.len();
        let mut r = Relation::full(n);
        loop {
            let closures = self.closures(&r);
            let mut next = Relation::empty(n);
            for a in 0..n {
                let row = r.successors(a);
                if row.is_empty() {
                    continue;
                }
                let lower = self.lower(a, &closures);
                for b in row.iter() {
                    if self.pair_ok(&lower, b, bound) {
                        next.insert(a, b);
                    }
                }
            }
            let next = interior(&next, &self.partition);
            if next == r {
                return r;
            }
            r = next;
        }
    }

    /// Whether `r` is `∼`-closed and every pair meets `bound` against `r`.
    pub fn satisfies(&self, r: &Relation, bound: &Bound) -> bool {
        if saturate(r, &self.partition) != *r {
            return false;
        }
        let closures = self.closures(r);
        (0..self.kernel.len()).all(|a| {
            let row = r.successors(a);
            if row.is_empty() {
                return true;
            }
            let lower = self.lower(a, &closures);
            let ok = row.iter().all(|b| self.pair_ok(&lower, b, bound));
            ok
        })
    }

    /// The largest slack over all pairs of `r` and all generators, or `None`
    /// when `r` is empty.
    pub fn max_slack(&self, r: &Relation) -> Option<BigRational> {
        let closures = self.closures(r);
        let mut best: Option<BigRational> = None;
        for a in 0..self.kernel.len() {
            let row = r.successors(a);
            if row.is_empty() {
                continue;
            }
            let lower = self.lower(a, &closures);
            for b in row.iter() {
                for (up, low) in self.upper[b].iter().zip(&lower) {
                    let slack = up.diff(low);
                    if best.as_ref().map_or(true, |m| &slack > m) {
                        best = Some(slack);
                    }
                }
            }
        }
        best
    }

    /// `≺_e` as the deletion fixpoint, or `≺⁺_e` as the union of all
    /// essential e-orders.
    pub fn largest(&self, e: &Rate) -> EpsilonOrder {
        let bound = Bound::AtMost(e.clone());
        let relation = if self.essential {
            self.essential_union(&bound)
        } else {
            self.gfp(&bound)
        };
        EpsilonOrder {
            epsilon: e.clone(),
            relation,
            essential: self.essential,
        }
    }

    /// The union of every `∼`-closed relation meeting `bound` and the
    /// essential condition, found by branch and bound over block pairs.
    /// Enlarging a relation can only grow closures, so a failed lower bound
    /// `θ(m)(C^R) ≤ θ(n)(C)` never recovers, while the upper bound is tested
    /// against the most generous completion.
    pub fn essential_union(&self, bound: &Bound) -> Relation {
        let search = BlockSearch::new(self, bound.clone());
        let nb = search.blocks;
        let mut found = vec![0u64; nb];
        for a in 0..nb {
            for b in 0..nb {
                if found[a] >> b & 1 == 1 {
                    continue;
                }
                if let Some(rows) = search.witness(a, b) {
                    for (f, r) in found.iter_mut().zip(rows) {
                        *f |= r;
                    }
                }
            }
        }
        let n = self.kernel.len();
        let mut out = Relation::empty(n);
        let blocks = self.partition.blocks();
        for (a, row) in found.iter().enumerate() {
            for b in 0..nb {
                if row >> b & 1 == 1 {
                    for x in blocks[a].iter() {
                        for y in blocks[b].iter() {
                            out.insert(x, y);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Block-level view used by [`OrderEngine::essential_union`]. Generator sets
/// and relations are bit masks over bisimulation blocks.
struct BlockSearch {
    blocks: usize,
    family: Vec<u64>,
    /// `to_block[a][j] = θ(a)(B_j)` for a representative of block `a`
    to_block: Vec<Vec<Rate>>,
    /// `upper[b][i] = θ(b)(C_i)`
    upper: Vec<Vec<Rate>>,
    bound: Bound,
}

impl BlockSearch {
    fn new(engine: &OrderEngine<'_>, bound: Bound) -> Self {
        let blocks = engine.partition.blocks();
        let nb = blocks.len();
        assert!(nb <= 64, "block search supports at most 64 blocks");
        let family: Vec<u64> = engine
            .family
            .iter()
            .map(|c| {
                let mut mask = 0u64;
                for (j, blk) in blocks.iter().enumerate() {
                    if blk.is_subset(c) {
                        mask |= 1 << j;
                    } else {
                        assert!(blk.is_disjoint(c), "generator is not a union of blocks");
                    }
                }
                mask
            })
            .collect();
        let reps: Vec<usize> = blocks.iter().map(|b| b.iter().next().unwrap()).collect();
        let to_block: Vec<Vec<Rate>> = reps
            .iter()
            .map(|&a| blocks.iter().map(|b| engine.kernel.mass(a, b)).collect())
            .collect();
        let mut search = BlockSearch {
            blocks: nb,
            family,
            to_block,
            upper: Vec::new(),
            bound,
        };
        search.upper = (0..nb)
            .map(|b| search.family.iter().map(|&c| search.mass(b, c)).collect())
            .collect();
        search
    }

    fn mass(&self, a: usize, mask: u64) -> Rate {
        (0..self.blocks)
            .filter(|j| mask >> j & 1 == 1)
            .map(|j| &self.to_block[a][j])
            .sum()
    }

    fn closure(&self, c: u64, rows: &[u64]) -> u64 {
        let mut out = c;
        for (a, row) in rows.iter().enumerate() {
            if row & c != 0 {
                out |= 1 << a;
            }
        }
        out
    }

    /// Some good relation containing `(a, b)`, as block rows.
    fn witness(&self, a: usize, b: usize) -> Option<Vec<u64>> {
        let nb = self.blocks;
        let mut included = vec![0u64; nb];
        included[a] |= 1 << b;
        let mut open = vec![mask_all(nb); nb];
        open[a] &= !(1 << b);
        let order: Vec<(usize, usize)> = (0..nb)
            .flat_map(|x| (0..nb).map(move |y| (x, y)))
            .filter(|&p| p != (a, b))
            .collect();
        if self.dfs(&order, 0, &mut included, &mut open) {
            Some(included)
        } else {
            None
        }
    }

    fn dfs(&self, order: &[(usize, usize)], at: usize, inc: &mut [u64], open: &mut [u64]) -> bool {
        if !self.viable(inc, open) {
            return false;
        }
        let Some(&(x, y)) = order.get(at) else {
            return true;
        };
        open[x] &= !(1 << y);
        if self.dfs(order, at + 1, inc, open) {
            return true;
        }
        inc[x] |= 1 << y;
        if self.dfs(order, at + 1, inc, open) {
            return true;
        }
        inc[x] &= !(1 << y);
        open[x] |= 1 << y;
        false
    }

    /// Every included pair meets the lower bound now and can still meet the
    /// upper bound if all open pairs are added.
    fn viable(&self, inc: &[u64], open: &[u64]) -> bool {
        let generous: Vec<u64> = inc.iter().zip(open).map(|(i, o)| i | o).collect();
        let tight: Vec<u64> = self.family.iter().map(|&c| self.closure(c, inc)).collect();
        let loose: Vec<u64> = self.family.iter().map(|&c| self.closure(c, &generous)).collect();
        for (x, row) in inc.iter().enumerate() {
            if *row == 0 {
                continue;
            }
            let low_tight: Vec<Rate> = tight.iter().map(|&c| self.mass(x, c)).collect();
            let low_loose: Vec<Rate> = loose.iter().map(|&c| self.mass(x, c)).collect();
            for y in (0..self.blocks).filter(|y| row >> y & 1 == 1) {
                for i in 0..self.family.len() {
                    let up = &self.upper[y][i];
                    if up.diff(&low_tight[i]).is_negative() {
                        return false;
                    }
                    if !self.bound.admits(&up.diff(&low_loose[i])) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn mask_all(nb: usize) -> u64 {
    if nb == 64 {
        u64::MAX
    } else {
        (1u64 << nb) - 1
    }
}

/// `∼ ∘ R ∘ ∼`.
pub fn saturate(r: &Relation, partition: &Partition) -> Relation {
    let n = r.universe();
    let mut out = Relation::empty(n);
    for (a, b) in r.pairs() {
        for x in partition.block_of(a).iter() {
            for y in partition.block_of(b).iter() {
                out.insert(x, y);
            }
        }
    }
    out
}

/// The largest `∼`-closed relation inside `r`.
fn interior(r: &Relation, partition: &Partition) -> Relation {
    let mut out = r.clone();
    for a in partition.blocks() {
        for b in partition.blocks() {
            let full = a.iter().all(|x| b.is_subset(&r.successors(x)));
            if !full {
                for x in a.iter() {
                    for y in b.iter() {
                        out.remove(x, y);
                    }
                }
            }
        }
    }
    out
}

/// `≺_e` (or `≺⁺_e` when `essential`) on one kernel.
pub fn largest_order(k: &Kernel, e: &Rate, essential: bool) -> EpsilonOrder {
    OrderEngine::new(k, essential).largest(e)
}

/// Whether `r` is an ε-behavioral order (essential when asked) on `k`.
pub fn is_order(k: &Kernel, r: &Relation, e: &Rate, essential: bool) -> bool {
    OrderEngine::new(k, essential).satisfies(r, &Bound::AtMost(e.clone()))
}

/// Outcome of a cross-kernel comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// Pairs of the largest order on `k1 ⊎ k2` going from `k1` to `k2`.
    pub witness_size: usize,
}

/// `(k1, m) ≺_e (k2, n)` decided on `k1 ⊎ k2`.
pub fn compare(
    k1: &Kernel,
    m: &str,
    k2: &Kernel,
    n: &str,
    e: &Rate,
    essential: bool,
) -> Result<Verdict, KernelError> {
    let offset = k1.len();
    let m = k1.index_of(m)?;
    let n = k2.index_of(n)? + offset;
    let u = disjoint_union(k1, k2);
    let order = largest_order(&u, e, essential);
    let witness_size = order
        .relation
        .pairs()
        .filter(|&(a, b)| a < offset && b >= offset)
        .count();
    Ok(Verdict {
        holds: order.relation.contains(m, n),
        witness_size,
    })
}

pub fn holds(
    k1: &Kernel,
    m: &str,
    k2: &Kernel,
    n: &str,
    e: &Rate,
    essential: bool,
) -> Result<bool, KernelError> {
    compare(k1, m, k2, n, e, essential).map(|v| v.holds)
}
