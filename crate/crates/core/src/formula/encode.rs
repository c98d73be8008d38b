//! Index-shifting encodings between parameterized semantics.

use super::Formula;
use crate::mutation::Mutation;
use crate::rate::Rate;

/// `⟨f⟩_e`: every index `r` becomes `r ∸ e = max(0, r - e)`.
pub fn encode_down(f: &Formula, e: &Rate) -> Formula {
    encode_down_with(f, e, None)
}

pub(crate) fn encode_down_with(f: &Formula, e: &Rate, mutation: Option<Mutation>) -> Formula {
    f.map_indices(&mut |r| {
        if mutation == Some(Mutation::SkipTruncation) {
            // the classic slip: leave small indices alone instead of clamping
            r.checked_sub(e).unwrap_or_else(|| r.clone())
        } else {
            r.monus(e)
        }
    })
}

/// `⟨f⟩^e`: every index `r` becomes `r + e`.
pub fn encode_up(f: &Formula, e: &Rate) -> Formula {
    f.map_indices(&mut |r| r + e)
}

/// Negation normal form pushed to disjunctive normal form, treating each
/// `L_r ψ` as an atom. Each `ψ` is normalized the same way, recursively.
pub fn nnf_dnf(f: &Formula) -> Formula {
    to_formula(dnf(f, true, None))
}

/// `|f|_e`: normalize as in [`nnf_dnf`], then raise the index of every
/// negated modal literal by `e` (`¬L_r ψ ↦ ¬L_{r+e} |ψ|_e`), leaving positive
/// literals `L_r ψ ↦ L_r |ψ|_e` and the Boolean skeleton unchanged.
pub fn encode_abs(f: &Formula, e: &Rate) -> Formula {
    to_formula(dnf(f, true, Some(e)))
}

struct Literal {
    negated: bool,
    rate: Rate,
    inner: Formula,
}

/// A disjunction of conjunctions; `[]` is `⊥` and `[[]]` is `⊤`.
type Dnf = Vec<Vec<Literal>>;

fn dnf(f: &Formula, polarity: bool, shift: Option<&Rate>) -> Dnf {
    match f {
        Formula::Top => {
            if polarity {
                vec![vec![]]
            } else {
                vec![]
            }
        }
        Formula::Not(inner, _) => dnf(inner, !polarity, shift),
        Formula::And(a, b) => {
            let left = dnf(a, polarity, shift);
            let right = dnf(b, polarity, shift);
            if polarity {
                let mut out = Vec::with_capacity(left.len() * right.len());
                for l in &left {
                    for r in &right {
                        out.push(l.iter().chain(r).map(Literal::clone_lit).collect());
                    }
                }
                out
            } else {
                let mut out = left;
                out.extend(right);
                out
            }
        }
        Formula::L(r, inner) => {
            let inner = to_formula(dnf(inner, true, shift));
            let rate = match (polarity, shift) {
                (false, Some(e)) => r + e,
                _ => r.clone(),
            };
            vec![vec![Literal {
                negated: !polarity,
                rate,
                inner,
            }]]
        }
    }
}

impl Literal {
    fn clone_lit(&self) -> Literal {
        Literal {
            negated: self.negated,
            rate: self.rate.clone(),
            inner: self.inner.clone(),
        }
    }

    fn into_formula(self) -> Formula {
        let atom = Formula::l(self.rate, self.inner);
        if self.negated {
            Formula::not(atom)
        } else {
            atom
        }
    }
}

fn to_formula(d: Dnf) -> Formula {
    Formula::or_all(
        d.into_iter()
            .map(|term| Formula::and_all(term.into_iter().map(Literal::into_formula))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::rate::rate;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn down_examples() {
        assert_eq!(encode_down(&p("L{5} T"), &rate("2")), p("L{3} T"));
        assert_eq!(encode_down(&p("L{1} T"), &rate("2")), p("L{0} T"));
        assert_eq!(
            encode_down(&p("!(L{3} T & L{1} L{2} T)"), &rate("1")),
            p("!(L{2} T & L{0} L{1} T)")
        );
    }

    #[test]
    fn up_examples() {
        assert_eq!(encode_up(&p("L{5} T"), &rate("2")), p("L{7} T"));
        let f = p("!(L{3} T | L{1} L{0} T)");
        assert_eq!(encode_up(&f, &Rate::zero()), f);
        let g = p("L{1} L{0} T");
        assert_eq!(encode_down(&encode_up(&g, &rate("2")), &rate("2")), g);
    }

    #[test]
    fn abs_examples() {
        assert_eq!(encode_abs(&p("L{2} T"), &rate("1")), p("L{2} T"));
        assert_eq!(encode_abs(&p("!L{2} T"), &rate("1")), p("!L{3} T"));
        assert_eq!(
            encode_abs(&p("!(L{1} T & !L{2} T)"), &rate("1")),
            p("!L{2} T | L{2} T")
        );
        assert_eq!(encode_abs(&p("T"), &rate("1")), p("T"));
        assert_eq!(encode_abs(&p("F"), &rate("1")), p("F"));
        // nested literals are normalized and shifted as well
        assert_eq!(
            encode_abs(&p("L{1} !(L{2} T & T)"), &rate("1/2")),
            p("L{1} !L{5/2} T")
        );
    }

    #[test]
    fn nnf_dnf_distributes() {
        assert_eq!(
            nnf_dnf(&p("(L{1} T | L{2} T) & !L{3} T")),
            p("L{1} T & !L{3} T | L{2} T & !L{3} T")
        );
        assert_eq!(nnf_dnf(&p("!!L{1} T")), p("L{1} T"));
        assert_eq!(nnf_dnf(&p("!(T & T)")), p("F"));
        assert_eq!(nnf_dnf(&p("!T | T")), p("T"));
    }

    #[test]
    fn skipping_truncation_keeps_small_indices() {
        let f = p("L{1} T");
        let mutated = encode_down_with(&f, &rate("2"), Some(Mutation::SkipTruncation));
        assert_eq!(mutated, f);
    }
}
