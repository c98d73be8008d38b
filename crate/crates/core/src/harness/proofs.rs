//! Random hypothesis-free proofs for the soundness and translation suites.

use rand::seq::SliceRandom;
use rand::Rng;

use super::random_formula;
use crate::formula::{Formula, Fragment};
use crate::proofcheck::{axiom_instance, AxiomName, Justification, Proof, ProofLine};
use crate::rate::Rate;

fn axiom_line(
    name: AxiomName,
    epsilon: &Rate,
    phi: Formula,
    psi: Option<Formula>,
    r: Option<Rate>,
    s: Option<Rate>,
) -> Option<ProofLine> {
    let formula = axiom_instance(name, epsilon, &phi, psi.as_ref(), r.as_ref(), s.as_ref()).ok()?;
    Some(ProofLine {
        formula,
        justification: Justification::Axiom { name, phi, psi, r, s },
    })
}

/// A proof at `epsilon` with roughly `steps` derivation steps. Steps are
/// axiom instances, A2 followed by modus ponens on an earlier modal line,
/// R1 on an earlier implication, conjunction of two earlier lines, and
/// excluded middle.
pub fn random_proof(rng: &mut impl Rng, epsilon: &Rate, grid: &[Rate], steps: usize) -> Proof {
    let mut lines: Vec<ProofLine> = Vec::new();
    let first = axiom_line(AxiomName::A1, epsilon, small(rng, grid), None, None, None).expect("A1 always instantiates");
    lines.push(first);
    for _ in 0..steps {
        match rng.gen_range(0..6) {
            0 => {
                let line = axiom_line(AxiomName::A1, epsilon, small(rng, grid), None, None, None);
                lines.extend(line);
            }
            1 => {
                let modal: Vec<usize> = lines
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| matches!(l.formula, Formula::L(..)))
                    .map(|(i, _)| i)
                    .collect();
                let Some(&i) = modal.choose(rng) else { continue };
                let Formula::L(t, phi) = &lines[i].formula else { unreachable!() };
                let (t, phi) = (t.clone(), (**phi).clone());
                let r = if rng.gen_bool(0.5) { t.div_int(2) } else { Rate::zero() };
                let s = t.checked_sub(&r).expect("r is at most t");
                let Some(a2) = axiom_line(AxiomName::A2, epsilon, phi.clone(), None, Some(r.clone()), Some(s)) else {
                    continue;
                };
                lines.push(a2);
                let j = lines.len();
                lines.push(ProofLine {
                    formula: Formula::l(r, phi),
                    justification: Justification::ModusPonens(i + 1, j),
                });
            }
            2 => {
                let implications: Vec<usize> = lines
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| l.formula.as_implication().is_some())
                    .map(|(i, _)| i)
                    .collect();
                let Some(&i) = implications.choose(rng) else { continue };
                let (a, b) = lines[i].formula.as_implication().expect("filtered");
                let r = grid.choose(rng).cloned().unwrap_or_default();
                let formula = Formula::implies(Formula::l(r.clone(), a.clone()), Formula::l(r.clone(), b.clone()));
                lines.push(ProofLine {
                    formula,
                    justification: Justification::RuleR1 { line: i + 1, r },
                });
            }
            3 => {
                let name = if rng.gen_bool(0.5) { AxiomName::A3 } else { AxiomName::A4 };
                let r = grid.choose(rng).cloned().unwrap_or_default() + epsilon;
                let s = grid.choose(rng).cloned().unwrap_or_default();
                let line = axiom_line(name, epsilon, small(rng, grid), Some(small(rng, grid)), Some(r), Some(s));
                lines.extend(line);
            }
            4 => {
                let i = rng.gen_range(0..lines.len());
                let j = rng.gen_range(0..lines.len());
                let formula = Formula::and(lines[i].formula.clone(), lines[j].formula.clone());
                lines.push(ProofLine {
                    formula,
                    justification: Justification::Tautology { premises: vec![i + 1, j + 1] },
                });
            }
            _ => {
                let x = small(rng, grid);
                let formula = if rng.gen_bool(0.5) {
                    Formula::or(x.clone(), Formula::not(x))
                } else {
                    Formula::implies(x.clone(), x)
                };
                lines.push(ProofLine {
                    formula,
                    justification: Justification::Tautology { premises: vec![] },
                });
            }
        }
    }
    let conclusion = lines.last().expect("at least one line").formula.clone();
    Proof {
        epsilon: epsilon.clone(),
        hypotheses: vec![],
        lines,
        conclusion,
    }
}

fn small(rng: &mut impl Rng, grid: &[Rate]) -> Formula {
    random_formula(rng, 1, grid, Fragment::Full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofcheck::check;
    use crate::rate::rate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_proofs_check() {
        let grid: Vec<Rate> = ["0", "1/2", "1", "2"].iter().map(|s| rate(s)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for e in ["0", "1/2", "1"] {
            for _ in 0..30 {
                let p = random_proof(&mut rng, &rate(e), &grid, 8);
                assert_eq!(check(&p), Ok(()), "{}", p.to_json());
            }
        }
    }
}
