//! Continuous Markovian logic over finite Markov kernels: ε-parameterized
//! satisfaction, stochastic bisimulation, ε-orders, the induced
//! pseudometric, and a checker for Hilbert-style proofs.

pub mod fixtures;
pub mod formula;
pub mod harness;
pub mod kernel;
pub mod metric;
pub mod mutation;
pub mod orders;
pub mod proofcheck;
pub mod rate;
pub mod equivalence;
pub mod semantics;

pub use formula::{parse, Formula, Fragment};
pub use kernel::{Kernel, KernelError, Relation, StateSet};
pub use rate::Rate;
