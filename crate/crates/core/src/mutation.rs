//! Deliberate faults used to check that the property suites can fail.

use std::fmt;
use std::str::FromStr;

/// One injected defect. Library entry points never enable these; the
/// harness threads them through its suites to measure sensitivity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// Evaluate `L_r φ` as `θ(m)(⟦φ⟧) ≥ r`, ignoring the error term.
    DropEpsilon,
    /// Compare with `>` instead of `≥` in the modal clause.
    StrictComparison,
    /// `⟨·⟩_ε` leaves indices below `ε` unchanged instead of clamping to 0.
    SkipTruncation,
    /// Relations are used as given, without closing them under bisimilarity.
    ForgetBisimSaturation,
    /// Partition refinement stops as soon as the new partition refines the
    /// old one, which is true after the first round.
    SubsetRefinementStop,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::DropEpsilon,
        Mutation::StrictComparison,
        Mutation::SkipTruncation,
        Mutation::ForgetBisimSaturation,
        Mutation::SubsetRefinementStop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::DropEpsilon => "drop-epsilon",
            Mutation::StrictComparison => "strict-comparison",
            Mutation::SkipTruncation => "skip-truncation",
            Mutation::ForgetBisimSaturation => "forget-bisim-saturation",
            Mutation::SubsetRefinementStop => "subset-refinement-stop",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mutation `{s}`"))
    }
}
