//! Stochastic bisimulation and the bisimulation generator families.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::kernel::{disjoint_union, Kernel, KernelError, Relation, StateSet};
use crate::mutation::Mutation;
use crate::rate::Rate;

/// The blocks of an equivalence on the states of one kernel, ordered by their
/// least member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<StateSet>,
    block_of: Vec<usize>,
    rounds: usize,
}

impl Partition {
    pub fn from_blocks(n: usize, blocks: impl IntoIterator<Item = StateSet>) -> Partition {
        let mut blocks: Vec<StateSet> = blocks.into_iter().filter(|b| !b.is_empty()).collect();
        blocks.sort_by_key(|b| b.iter().next());
        let mut block_of = vec![usize::MAX; n];
        for (i, b) in blocks.iter().enumerate() {
            for m in b.iter() {
                assert_eq!(block_of[m], usize::MAX, "blocks overlap at state {m}");
                block_of[m] = i;
            }
        }
        assert!(
            block_of.iter().all(|&b| b != usize::MAX),
            "blocks do not cover every state"
        );
        Partition {
            blocks,
            block_of,
            rounds: 0,
        }
    }

    pub fn blocks(&self) -> &[StateSet] {
        &self.blocks
    }

    pub fn block_of(&self, m: usize) -> &StateSet {
        &self.blocks[self.block_of[m]]
    }

    pub fn block_index(&self, m: usize) -> usize {
        self.block_of[m]
    }

    pub fn same_block(&self, m: usize, n: usize) -> bool {
        self.block_of[m] == self.block_of[n]
    }

    /// Number of refinement rounds that split some block.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Whether `s` is a union of blocks.
    pub fn is_closed(&self, s: &StateSet) -> bool {
        s.iter().all(|m| self.block_of(m).is_subset(s))
    }

    /// The smallest union of blocks containing `s`.
    pub fn saturate_set(&self, s: &StateSet) -> StateSet {
        let mut out = s.clone();
        for m in s.iter() {
            out.union_with(self.block_of(m));
        }
        out
    }

    /// The equivalence as a relation.
    pub fn relation(&self) -> Relation {
        let n = self.block_of.len();
        let mut r = Relation::empty(n);
        for b in &self.blocks {
            for x in b.iter() {
                for y in b.iter() {
                    r.insert(x, y);
                }
            }
        }
        r
    }

    pub fn names(&self, k: &Kernel) -> Vec<Vec<String>> {
        self.blocks.iter().map(|b| k.names_of(b)).collect()
    }
}

/// The largest stochastic bisimulation, by partition refinement from the
/// single-block partition.
pub fn bisimulation(k: &Kernel) -> Partition {
    bisimulation_with(k, None)
}

pub(crate) fn bisimulation_with(k: &Kernel, mutation: Option<Mutation>) -> Partition {
    let n = k.len();
    let mut part = Partition::from_blocks(n, [k.all_states()]);
    loop {
        let mut groups: HashMap<(usize, Vec<Rate>), Vec<usize>> = HashMap::new();
        for m in 0..n {
            let signature = part.blocks.iter().map(|b| k.mass(m, b)).collect();
            groups
                .entry((part.block_of[m], signature))
                .or_default()
                .push(m);
        }
        if groups.len() == part.blocks.len() {
            return part;
        }
        let rounds = part.rounds + 1;
        part = Partition::from_blocks(
            n,
            groups
                .into_values()
                .map(|members| StateSet::from_indices(n, members)),
        );
        part.rounds = rounds;
        if mutation == Some(Mutation::SubsetRefinementStop) {
            return part;
        }
    }
}

/// `(k1, m) ∼ (k2, n)`, decided on `k1 ⊎ k2`.
pub fn bisimilar(k1: &Kernel, m: &str, k2: &Kernel, n: &str) -> Result<bool, KernelError> {
    let m = k1.index_of(m)?;
    let n = k2.index_of(n)? + k1.len();
    Ok(bisimulation(&disjoint_union(k1, k2)).same_block(m, n))
}

/// A family of state sets closed under union and intersection, and under
/// complement when `extended`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorFamily {
    sets: Vec<StateSet>,
    extended: bool,
}

impl GeneratorFamily {
    pub fn sets(&self) -> &[StateSet] {
        &self.sets
    }

    pub fn extended(&self) -> bool {
        self.extended
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, s: &StateSet) -> bool {
        self.sets.binary_search(s).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &StateSet> {
        self.sets.iter()
    }
}

/// Saturation from `{∅, M}`: each member `C` contributes the threshold sets
/// `{m | θ(m)(C) ≥ r}` for every achievable value `r = θ(x)(C)`, and the
/// family is closed under `∪`, `∩` (and complement when `extended`).
pub fn generators(k: &Kernel, extended: bool) -> GeneratorFamily {
    let n = k.len();
    let mut family: BTreeSet<StateSet> = BTreeSet::new();
    let mut members: Vec<StateSet> = Vec::new();
    let mut queue: VecDeque<StateSet> = VecDeque::new();
    let add = |s: StateSet,
                   family: &mut BTreeSet<StateSet>,
                   members: &mut Vec<StateSet>,
                   queue: &mut VecDeque<StateSet>| {
        if family.insert(s.clone()) {
            members.push(s.clone());
            queue.push_back(s);
        }
    };
    add(k.all_states(), &mut family, &mut members, &mut queue);
    add(k.no_states(), &mut family, &mut members, &mut queue);
    while let Some(c) = queue.pop_front() {
        let masses: Vec<Rate> = (0..n).map(|m| k.mass(m, &c)).collect();
        let values: BTreeSet<&Rate> = masses.iter().collect();
        for r in values {
            let above = StateSet::from_indices(n, (0..n).filter(|&m| &masses[m] >= r));
            add(above, &mut family, &mut members, &mut queue);
        }
        if extended {
            add(c.complement(), &mut family, &mut members, &mut queue);
        }
        let mut i = 0;
        while i < members.len() {
            let d = members[i].clone();
            add(c.union(&d), &mut family, &mut members, &mut queue);
            add(c.intersection(&d), &mut family, &mut members, &mut queue);
            i += 1;
        }
    }
    GeneratorFamily {
        sets: family.into_iter().collect(),
        extended,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rate::rate;

    fn names(k: &Kernel, p: &Partition) -> Vec<Vec<String>> {
        p.names(k)
    }

    #[test]
    fn figure_one_blocks() {
        let k = fixtures::figure1();
        let p = bisimulation(&k);
        assert_eq!(
            names(&k, &p),
            vec![vec!["m"], vec!["m1", "m3", "m5"], vec!["m2", "m4"]]
        );
        let idx = |s| k.index_of(s).unwrap();
        assert!(p.same_block(idx("m2"), idx("m4")));
        assert!(p.same_block(idx("m3"), idx("m5")));
        assert!(!p.same_block(idx("m"), idx("m2")));
        assert_eq!(p.rounds(), 1);
    }

    #[test]
    fn trivial_partitions() {
        let zero = Kernel::new(["a", "b", "c"], []).unwrap();
        assert_eq!(bisimulation(&zero).blocks().len(), 1);
        assert_eq!(bisimulation(&zero).rounds(), 0);
        let two = Kernel::new(["a", "b"], [(0, 0, rate("1")), (1, 1, rate("2"))]).unwrap();
        assert_eq!(bisimulation(&two).blocks().len(), 2);
        let empty = Kernel::new(Vec::<String>::new(), []).unwrap();
        assert!(bisimulation(&empty).blocks().is_empty());
    }

    #[test]
    fn cross_kernel_bisimilarity() {
        let k = fixtures::figure1();
        assert!(bisimilar(&k, "m", &k, "m").unwrap());
        assert!(bisimilar(&k, "m2", &k.clone(), "m4").unwrap());
        let o = fixtures::figure4_o();
        assert!(!bisimilar(&k, "m", &o, "o").unwrap());
        assert!(bisimilar(&k, "m3", &o, "o1").unwrap());
        assert!(bisimilar(&k, "zz", &o, "o").is_err());
    }

    #[test]
    fn early_stop_is_too_coarse() {
        // a -> b -> c needs a second round to separate a from b
        let k = Kernel::new(["a", "b", "c"], [(0, 1, rate("1")), (1, 2, rate("1"))]).unwrap();
        assert_eq!(bisimulation(&k).blocks().len(), 3);
        assert_eq!(bisimulation(&k).rounds(), 2);
        let p = bisimulation_with(&k, Some(Mutation::SubsetRefinementStop));
        assert!(p.same_block(0, 1));
    }

    #[test]
    fn single_state_families() {
        let k = fixtures::single_loop(rate("2"));
        for extended in [false, true] {
            let g = generators(&k, extended);
            assert_eq!(g.sets(), &[k.no_states(), k.all_states()]);
        }
    }

    #[test]
    fn figure_one_families() {
        let k = fixtures::figure1();
        let p = bisimulation(&k);
        let plain = generators(&k, false);
        let ext = generators(&k, true);
        let terminal = k.set_of(["m1", "m3", "m5"]).unwrap();
        let busy = k.set_of(["m", "m2", "m4"]).unwrap();
        // positive definability only reaches upward threshold sets
        assert_eq!(
            plain.sets(),
            &[k.no_states(), k.set_of(["m"]).unwrap(), busy, k.all_states()]
        );
        assert!(!plain.contains(&terminal));
        assert!(ext.contains(&terminal));
        assert!(ext.contains(&k.set_of(["m2", "m4"]).unwrap()));
        for c in plain.iter().chain(ext.iter()) {
            assert!(p.is_closed(c));
        }
        for c in plain.iter() {
            assert!(ext.contains(c));
        }
        // three blocks, so the complement-closed family is the full powerset
        assert_eq!(ext.len(), 8);
    }

    #[test]
    fn families_are_lattices() {
        let k = fixtures::figure3_n();
        for extended in [false, true] {
            let g = generators(&k, extended);
            for a in g.iter() {
                for b in g.iter() {
                    assert!(g.contains(&a.union(b)));
                    assert!(g.contains(&a.intersection(b)));
                }
                if extended {
                    assert!(g.contains(&a.complement()));
                }
            }
        }
    }
}
