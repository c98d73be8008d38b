//! Finite continuous Markov kernels.
//!
//! A [`Kernel`] is a finite list of named states and a total rate function
//! `theta(m, n)`. On a finite state space the σ-algebra is the full powerset,
//! so `theta(m)` is the measure `C ↦ Σ_{n ∈ C} theta(m, n)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rate::{Rate, RateError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("{field}: negative rate `{literal}`")]
    NegativeRate { field: String, literal: String },
    #[error("{field}: malformed rate literal `{literal}`")]
    MalformedRate { field: String, literal: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {index} out of range for a kernel with {len} states")]
    StateOutOfRange { index: usize, len: usize },
    #[error("state set over {found} states used with a kernel of {expected} states")]
    SizeMismatch { expected: usize, found: usize },
    #[error("line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A subset of the states of one kernel.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet(FixedBitSet);

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        StateSet(bits)
    }

    pub fn from_indices(n: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut set = StateSet::empty(n);
        for m in members {
            set.insert(m);
        }
        set
    }

    /// Number of states of the owning kernel.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, m: usize) -> bool {
        self.0.contains(m)
    }

    pub fn insert(&mut self, m: usize) {
        self.0.insert(m);
    }

    pub fn remove(&mut self, m: usize) {
        self.0.set(m, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.0.union_with(&other.0);
        out
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.0.intersect_with(&other.0);
        out
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.0.difference_with(&other.0);
        out
    }

    pub fn complement(&self) -> StateSet {
        let mut out = self.clone();
        out.0.toggle_range(..);
        out
    }

    pub fn union_with(&mut self, other: &StateSet) {
        self.0.union_with(&other.0);
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &StateSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A binary relation on the states of one kernel, stored as successor rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<FixedBitSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            rows: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut row = FixedBitSet::with_capacity(n);
        row.insert_range(..);
        Relation { rows: vec![row; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut rel = Relation::empty(n);
        for m in 0..n {
            rel.insert(m, m);
        }
        rel
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rel = Relation::empty(n);
        for (a, b) in pairs {
            rel.insert(a, b);
        }
        rel
    }

    pub fn universe(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a].insert(b);
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.rows[a].set(b, false);
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.ones().map(move |b| (a, b)))
    }

    /// `{b | (a, b) ∈ R}`.
    pub fn successors(&self, a: usize) -> StateSet {
        StateSet(self.rows[a].clone())
    }

    pub fn converse(&self) -> Relation {
        Relation::from_pairs(self.universe(), self.pairs().map(|(a, b)| (b, a)))
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows
            .iter()
            .zip(&other.rows)
            .all(|(a, b)| a.is_subset(b))
    }

    pub fn union(&self, other: &Relation) -> Relation {
        let mut out = self.clone();
        for (row, o) in out.rows.iter_mut().zip(&other.rows) {
            row.union_with(o);
        }
        out
    }

    /// `C ∪ {m | ∃c ∈ C, (m, c) ∈ R}`: the members of `C` together with every
    /// state related to one of them.
    pub fn preimage_closure(&self, c: &StateSet) -> StateSet {
        let mut out = c.clone();
        for (m, row) in self.rows.iter().enumerate() {
            if !row.is_disjoint(&c.0) {
                out.insert(m);
            }
        }
        out
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// `C ∪ {m | ∃n ∈ C, (n, m) ∈ R}`.
pub fn closure(c: &StateSet, r: &Relation) -> Result<StateSet, KernelError> {
    if c.universe() != r.universe() {
        return Err(KernelError::SizeMismatch {
            expected: r.universe(),
            found: c.universe(),
        });
    }
    let mut out = c.clone();
    for n in c.iter() {
        out.0.union_with(&r.rows[n]);
    }
    Ok(out)
}

/// The serialized form of a kernel: state names and sparse rate literals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub states: Vec<String>,
    #[serde(default)]
    pub rates: BTreeMap<String, BTreeMap<String, String>>,
}

impl KernelSpec {
    pub fn from_json(text: &str) -> Result<Self, KernelError> {
        serde_json::from_str(text).map_err(|e| KernelError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

/// A validated finite kernel.
#[derive(Clone, PartialEq, Eq)]
pub struct Kernel {
    states: Vec<String>,
    index: HashMap<String, usize>,
    theta: Vec<Vec<Rate>>,
}

/// Checks every invariant of `spec` and builds the kernel. The error names the
/// first violation found, in state order.
pub fn validate(spec: &KernelSpec) -> Result<Kernel, KernelError> {
    let mut index = HashMap::with_capacity(spec.states.len());
    for (i, name) in spec.states.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(KernelError::DuplicateState(name.clone()));
        }
    }
    let n = spec.states.len();
    let mut theta = vec![vec![Rate::zero(); n]; n];
    for (from, row) in &spec.rates {
        let &a = index
            .get(from)
            .ok_or_else(|| KernelError::UnknownState(from.clone()))?;
        for (to, literal) in row {
            let &b = index
                .get(to)
                .ok_or_else(|| KernelError::UnknownState(to.clone()))?;
            let field = format!("rates.{from}.{to}");
            theta[a][b] = literal.parse().map_err(|e| match e {
                RateError::Negative(_) => KernelError::NegativeRate {
                    field: field.clone(),
                    literal: literal.clone(),
                },
                RateError::Malformed(_) => KernelError::MalformedRate {
                    field: field.clone(),
                    literal: literal.clone(),
                },
            })?;
        }
    }
    Ok(Kernel {
        states: spec.states.clone(),
        index,
        theta,
    })
}

impl Kernel {
    /// Builds a kernel from names and `(from, to, rate)` triples.
    pub fn new<S: Into<String>>(
        states: impl IntoIterator<Item = S>,
        rates: impl IntoIterator<Item = (usize, usize, Rate)>,
    ) -> Result<Self, KernelError> {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(states.len());
        for (i, name) in states.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(KernelError::DuplicateState(name.clone()));
            }
        }
        let n = states.len();
        let mut theta = vec![vec![Rate::zero(); n]; n];
        for (a, b, r) in rates {
            for i in [a, b] {
                if i >= n {
                    return Err(KernelError::StateOutOfRange { index: i, len: n });
                }
            }
            theta[a][b] = r;
        }
        Ok(Kernel {
            states,
            index,
            theta,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, KernelError> {
        validate(&KernelSpec::from_json(text)?)
    }

    pub fn to_spec(&self) -> KernelSpec {
        let mut rates = BTreeMap::new();
        for (a, row) in self.theta.iter().enumerate() {
            let entries: BTreeMap<String, String> = row
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.is_zero())
                .map(|(b, r)| (self.states[b].clone(), r.to_string()))
                .collect();
            if !entries.is_empty() {
                rates.insert(self.states[a].clone(), entries);
            }
        }
        KernelSpec {
            description: None,
            states: self.states.clone(),
            rates,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("kernel spec serializes")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn name(&self, m: usize) -> &str {
        &self.states[m]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, KernelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| KernelError::UnknownState(name.to_string()))
    }

    pub fn rate(&self, from: usize, to: usize) -> &Rate {
        &self.theta[from][to]
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.len())
    }

    pub fn no_states(&self) -> StateSet {
        StateSet::empty(self.len())
    }

    /// Set of named states.
    pub fn set_of<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<StateSet, KernelError> {
        let mut set = self.no_states();
        for name in names {
            set.insert(self.index_of(name)?);
        }
        Ok(set)
    }

    pub fn names_of(&self, set: &StateSet) -> Vec<String> {
        set.iter().map(|m| self.states[m].clone()).collect()
    }

    /// `theta(m)(C)`, checking that `m` and `C` belong to this kernel.
    pub fn measure(&self, m: usize, c: &StateSet) -> Result<Rate, KernelError> {
        if m >= self.len() {
            return Err(KernelError::StateOutOfRange {
                index: m,
                len: self.len(),
            });
        }
        if c.universe() != self.len() {
            return Err(KernelError::SizeMismatch {
                expected: self.len(),
                found: c.universe(),
            });
        }
        Ok(self.mass(m, c))
    }

    /// `theta(m)(C)` without bounds checks beyond the slice indexing.
    pub(crate) fn mass(&self, m: usize, c: &StateSet) -> Rate {
        let row = &self.theta[m];
        c.iter().map(|n| &row[n]).sum()
    }

    /// Total exit rate `theta(m)(M)`.
    pub fn exit_rate(&self, m: usize) -> Rate {
        self.theta[m].iter().sum()
    }

    /// Graphviz rendering of the nonzero transitions.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph kernel {\n");
        for name in &self.states {
            out.push_str(&format!("  {name:?};\n"));
        }
        for (a, row) in self.theta.iter().enumerate() {
            for (b, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    out.push_str(&format!(
                        "  {:?} -> {:?} [label={:?}];\n",
                        self.states[a],
                        self.states[b],
                        r.to_string()
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Removes state `m` and every transition touching it.
    pub fn without_state(&self, m: usize) -> Kernel {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != m).collect();
        let states = keep.iter().map(|&i| self.states[i].clone());
        let mut rates = Vec::new();
        for (a2, &a) in keep.iter().enumerate() {
            for (b2, &b) in keep.iter().enumerate() {
                if !self.theta[a][b].is_zero() {
                    rates.push((a2, b2, self.theta[a][b].clone()));
                }
            }
        }
        Kernel::new(states, rates).expect("sub-kernel of a valid kernel is valid")
    }

    /// Same kernel with one rate replaced.
    pub fn with_rate(&self, from: usize, to: usize, value: Rate) -> Kernel {
        let mut out = self.clone();
        out.theta[from][to] = value;
        out
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (a, row) in self.theta.iter().enumerate() {
            for (b, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    map.entry(&format!("{}->{}", self.states[a], self.states[b]), r);
                }
            }
        }
        map.finish()?;
        write!(f, " over {:?}", self.states)
    }
}

pub const LEFT_TAG: &str = "L:";
pub const RIGHT_TAG: &str = "R:";

/// `k1 ⊎ k2`. States of `k1` keep their indices and gain the prefix `L:`;
/// states of `k2` are shifted by `k1.len()` and gain the prefix `R:`.
pub fn disjoint_union(k1: &Kernel, k2: &Kernel) -> Kernel {
    let offset = k1.len();
    let states = k1
        .states
        .iter()
        .map(|s| format!("{LEFT_TAG}{s}"))
        .chain(k2.states.iter().map(|s| format!("{RIGHT_TAG}{s}")));
    let mut rates = Vec::new();
    for (a, row) in k1.theta.iter().enumerate() {
        for (b, r) in row.iter().enumerate() {
            if !r.is_zero() {
                rates.push((a, b, r.clone()));
            }
        }
    }
    for (a, row) in k2.theta.iter().enumerate() {
        for (b, r) in row.iter().enumerate() {
            if !r.is_zero() {
                rates.push((a + offset, b + offset, r.clone()));
            }
        }
    }
    Kernel::new(states, rates).expect("tagged names are unique")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rate::rate;

    #[test]
    fn smallest_kernel_validates() {
        let spec = KernelSpec::from_json(r#"{"states":["m"],"rates":{"m":{"m":"0"}}}"#).unwrap();
        let k = validate(&spec).unwrap();
        assert_eq!(k.len(), 1);
        assert!(k.rate(0, 0).is_zero());
    }

    #[test]
    fn duplicate_state_is_rejected() {
        let spec = KernelSpec::from_json(r#"{"states":["m","m"]}"#).unwrap();
        let err = validate(&spec).unwrap_err();
        assert_eq!(err, KernelError::DuplicateState("m".into()));
        assert!(err.to_string().contains("duplicate state"));
    }

    #[test]
    fn bad_rate_literals_name_the_field() {
        let neg = Kernel::from_json(r#"{"states":["a","b"],"rates":{"a":{"b":"-1/2"}}}"#);
        assert_eq!(
            neg.unwrap_err(),
            KernelError::NegativeRate {
                field: "rates.a.b".into(),
                literal: "-1/2".into()
            }
        );
        let bad = Kernel::from_json(r#"{"states":["a"],"rates":{"a":{"a":"x"}}}"#);
        assert!(matches!(bad, Err(KernelError::MalformedRate { .. })));
        let unknown = Kernel::from_json(r#"{"states":["a"],"rates":{"a":{"z":"1"}}}"#);
        assert_eq!(unknown.unwrap_err(), KernelError::UnknownState("z".into()));
    }

    #[test]
    fn json_syntax_errors_carry_position() {
        let err = Kernel::from_json("{\n  \"states\": [\"a\",\n}").unwrap_err();
        match err {
            KernelError::Json { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn figure_one_validates_and_measures() {
        let k = fixtures::figure1();
        assert_eq!(k.len(), 6);
        let m = k.index_of("m").unwrap();
        let c = k.set_of(["m2", "m4"]).unwrap();
        // s + s' with s = 2, s' = 3
        assert_eq!(k.measure(m, &c).unwrap(), rate("5"));
        assert_eq!(k.measure(m, &k.no_states()).unwrap(), Rate::zero());
        let c = k.set_of(["m1", "m2", "m4"]).unwrap();
        assert_eq!(k.measure(m, &c).unwrap(), rate("6"));
    }

    #[test]
    fn measure_rejects_foreign_sets() {
        let k = fixtures::figure1();
        assert!(matches!(
            k.measure(0, &StateSet::empty(3)),
            Err(KernelError::SizeMismatch { .. })
        ));
        assert!(matches!(
            k.measure(9, &k.all_states()),
            Err(KernelError::StateOutOfRange { .. })
        ));
    }

    #[test]
    fn union_of_single_states() {
        let a = Kernel::new(["m"], [(0, 0, rate("1"))]).unwrap();
        let b = Kernel::new(["m"], [(0, 0, rate("2"))]).unwrap();
        let u = disjoint_union(&a, &b);
        assert_eq!(u.states(), ["L:m", "R:m"]);
        assert_eq!(u.rate(0, 0), &rate("1"));
        assert_eq!(u.rate(1, 1), &rate("2"));
        assert!(u.rate(0, 1).is_zero() && u.rate(1, 0).is_zero());
    }

    #[test]
    fn union_preserves_figure_one_measures() {
        let k = fixtures::figure1();
        let u = disjoint_union(&k, &fixtures::figure3_n());
        assert_eq!(u.len(), 10);
        let c = u.set_of(["L:m2", "L:m4"]).unwrap();
        assert_eq!(u.measure(0, &c).unwrap(), rate("5"));
    }

    #[test]
    fn union_with_empty_kernel_is_isomorphic() {
        let k = fixtures::figure1();
        let empty = Kernel::new(Vec::<String>::new(), []).unwrap();
        let u = disjoint_union(&k, &empty);
        assert_eq!(u.len(), k.len());
        for a in 0..k.len() {
            for b in 0..k.len() {
                assert_eq!(u.rate(a, b), k.rate(a, b));
            }
        }
    }

    #[test]
    fn closure_examples() {
        let k = fixtures::figure1();
        let n = k.len();
        let c = k.set_of(["m2", "m3"]).unwrap();
        assert_eq!(closure(&c, &Relation::identity(n)).unwrap(), c);
        let r = Relation::from_pairs(n, [(0, 1), (2, 3)]);
        assert!(closure(&k.no_states(), &r).unwrap().is_empty());
        assert!(closure(&c, &Relation::identity(4)).is_err());

        // The witness relation of the three-process example, on their union.
        let u = disjoint_union(&k, &fixtures::figure3_n());
        let idx = |s: &str| u.index_of(s).unwrap();
        let pairs = [
            ("L:m", "R:n"),
            ("L:m1", "R:n1"),
            ("L:m2", "R:n2"),
            ("L:m4", "R:n2"),
            ("L:m3", "R:n3"),
            ("L:m5", "R:n3"),
        ];
        let rel = Relation::from_pairs(u.len(), pairs.iter().map(|(a, b)| (idx(a), idx(b))));
        let got = closure(&u.set_of(["L:m1"]).unwrap(), &rel).unwrap();
        assert_eq!(got, u.set_of(["L:m1", "R:n1"]).unwrap());
    }

    #[test]
    fn spec_round_trip() {
        let k = fixtures::figure1();
        let back = Kernel::from_json(&k.to_json()).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn dot_lists_nonzero_edges() {
        let dot = fixtures::figure1().to_dot();
        assert!(dot.contains("\"m\" -> \"m1\" [label=\"1\"]"));
        assert_eq!(dot.matches("->").count(), 5);
    }
}
