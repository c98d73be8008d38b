//! Abstract syntax of continuous Markovian logic.
//!
//! The stored tree only has `⊤`, `¬`, `∧` and `L_r`. Disjunction, implication
//! and falsity are written in terms of those, and the negation node at the root
//! of each expansion remembers which connective produced it (see [`Sugar`]).
//! The tag never changes the meaning of a formula. It lets the printer
//! reproduce the source text, and it keeps `∨` recognizable for membership in
//! the positive fragment.

mod encode;
mod parse;
mod print;

pub use encode::{encode_abs, encode_down, encode_up, nnf_dnf};
pub(crate) use encode::encode_down_with;
pub use parse::{parse, ParseError};

use std::fmt;

use crate::rate::Rate;

/// Which derived connective a negation node encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Sugar {
    #[default]
    None,
    /// `⊥ = ¬⊤`
    Bot,
    /// `a ∨ b = ¬(¬a ∧ ¬b)`
    Or,
    /// `a → b = ¬(a ∧ ¬b)`
    Implies,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Not(Box<Formula>, Sugar),
    And(Box<Formula>, Box<Formula>),
    L(Rate, Box<Formula>),
}

/// Sublanguages of interest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// Generated by `⊤`, `∧`, `∨`, `L_r`.
    Positive,
    /// Negations of positive formulas.
    Negative,
    Full,
}

/// A formula seen through its derived connectives.
#[derive(Debug, Clone, Copy)]
pub enum View<'a> {
    Top,
    Bot,
    Not(&'a Formula),
    And(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    L(&'a Rate, &'a Formula),
}

impl Formula {
    pub fn top() -> Formula {
        Formula::Top
    }

    pub fn bot() -> Formula {
        Formula::Not(Box::new(Formula::Top), Sugar::Bot)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f), Sugar::None)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Not(
            Box::new(Formula::and(Formula::not(a), Formula::not(b))),
            Sugar::Or,
        )
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Not(Box::new(Formula::and(a, Formula::not(b))), Sugar::Implies)
    }

    pub fn l(r: Rate, f: Formula) -> Formula {
        Formula::L(r, Box::new(f))
    }

    /// Conjunction of a list, `⊤` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Disjunction of a list, `⊥` when empty.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::bot)
    }

    /// Classifies the node, recognizing a tagged negation only when the
    /// subtree has the exact shape of its expansion.
    pub fn view(&self) -> View<'_> {
        match self {
            Formula::Top => View::Top,
            Formula::And(a, b) => View::And(a, b),
            Formula::L(r, f) => View::L(r, f),
            Formula::Not(inner, sugar) => match (sugar, inner.as_ref()) {
                (Sugar::Bot, Formula::Top) => View::Bot,
                (Sugar::Or, Formula::And(a, b)) => match (a.as_ref(), b.as_ref()) {
                    (Formula::Not(a, Sugar::None), Formula::Not(b, Sugar::None)) => {
                        View::Or(a, b)
                    }
                    _ => View::Not(inner),
                },
                (Sugar::Implies, Formula::And(a, b)) => match b.as_ref() {
                    Formula::Not(b, Sugar::None) => View::Implies(a, b),
                    _ => View::Not(inner),
                },
                _ => View::Not(inner),
            },
        }
    }

    /// The same tree with every sugar tag cleared.
    pub fn desugared(&self) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Not(f, _) => Formula::not(f.desugared()),
            Formula::And(a, b) => Formula::and(a.desugared(), b.desugared()),
            Formula::L(r, f) => Formula::l(r.clone(), f.desugared()),
        }
    }

    /// Equality of the core trees, ignoring sugar tags.
    pub fn core_eq(&self, other: &Formula) -> bool {
        match (self, other) {
            (Formula::Top, Formula::Top) => true,
            (Formula::Not(a, _), Formula::Not(b, _)) => a.core_eq(b),
            (Formula::And(a1, b1), Formula::And(a2, b2)) => a1.core_eq(a2) && b1.core_eq(b2),
            (Formula::L(r1, a), Formula::L(r2, b)) => r1 == r2 && a.core_eq(b),
            _ => false,
        }
    }

    /// Constructor nesting depth; `⊤` has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Top => 0,
            Formula::Not(f, _) | Formula::L(_, f) => 1 + f.depth(),
            Formula::And(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Nesting depth of `L_r` operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top => 0,
            Formula::Not(f, _) => f.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::L(_, f) => 1 + f.modal_depth(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top => 1,
            Formula::Not(f, _) | Formula::L(_, f) => 1 + f.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Every modal index occurring in the formula.
    pub fn indices(&self) -> Vec<Rate> {
        let mut out = Vec::new();
        self.collect_indices(&mut out);
        out
    }

    fn collect_indices(&self, out: &mut Vec<Rate>) {
        match self {
            Formula::Top => {}
            Formula::Not(f, _) => f.collect_indices(out),
            Formula::And(a, b) => {
                a.collect_indices(out);
                b.collect_indices(out);
            }
            Formula::L(r, f) => {
                out.push(r.clone());
                f.collect_indices(out);
            }
        }
    }

    /// Applies `f` to every modal index, keeping the shape and tags.
    pub fn map_indices(&self, f: &mut impl FnMut(&Rate) -> Rate) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Not(inner, sugar) => Formula::Not(Box::new(inner.map_indices(f)), *sugar),
            Formula::And(a, b) => Formula::and(a.map_indices(f), b.map_indices(f)),
            Formula::L(r, inner) => {
                let r = f(r);
                Formula::l(r, inner.map_indices(f))
            }
        }
    }

    /// Direct subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top => vec![],
            Formula::Not(f, _) | Formula::L(_, f) => vec![f],
            Formula::And(a, b) => vec![a, b],
        }
    }

    /// Splits `a → b` (in its core encoding `¬(a ∧ ¬b)`), ignoring tags.
    pub fn as_implication(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner, _) => match inner.as_ref() {
                Formula::And(a, b) => match b.as_ref() {
                    Formula::Not(b, _) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print(self))
    }
}

/// Renders `f` in the concrete grammar.
pub fn print(f: &Formula) -> String {
    print::print(f)
}

/// Membership in a fragment, judged on the tagged tree.
pub fn in_fragment(f: &Formula, frag: Fragment) -> bool {
    match frag {
        Fragment::Full => true,
        Fragment::Positive => is_positive(f),
        Fragment::Negative => match f {
            Formula::Not(inner, sugar) => *sugar != Sugar::Or && is_positive(inner),
            _ => false,
        },
    }
}

fn is_positive(f: &Formula) -> bool {
    match f.view() {
        View::Top => true,
        View::And(a, b) | View::Or(a, b) => is_positive(a) && is_positive(b),
        View::L(_, a) => is_positive(a),
        View::Bot | View::Not(_) | View::Implies(..) => false,
    }
}
