//! Checking finite derivations in the ε-parameterized Hilbert system.
//!
//! Axioms, for a fixed `ε`:
//!
//! ```text
//! A1  L_ε φ
//! A2  L_{r+s} φ → L_r φ
//! A3  L_r(φ ∧ ψ) ∧ L_s(φ ∧ ¬ψ) → L_{r+s−ε} φ
//! A4  ¬L_r(φ ∧ ψ) ∧ ¬L_s(φ ∧ ¬ψ) → ¬L_{r+s−ε} φ
//! R1  from φ → ψ infer L_r φ → L_r ψ
//! ```
//!
//! plus propositional tautologies (over `L`-atoms) and modus ponens. The
//! infinitary rules of the full system have no finite proof objects and are
//! not accepted.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::formula::{encode_down, encode_up, parse, Formula, ParseError};
use crate::rate::Rate;

/// Limit on distinct atoms in a tautology line.
pub const MAX_ATOMS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxiomName {
    A1,
    A2,
    A3,
    A4,
}

impl fmt::Display for AxiomName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomName::A1 => "A1",
            AxiomName::A2 => "A2",
            AxiomName::A3 => "A3",
            AxiomName::A4 => "A4",
        })
    }
}

/// Lines are numbered from 1; every reference points to an earlier line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom {
        name: AxiomName,
        phi: Formula,
        psi: Option<Formula>,
        r: Option<Rate>,
        s: Option<Rate>,
    },
    Tautology {
        premises: Vec<usize>,
    },
    ModusPonens(usize, usize),
    RuleR1 {
        line: usize,
        r: Rate,
    },
    /// 1-based position in the hypothesis list.
    Hypothesis(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub epsilon: Rate,
    pub hypotheses: Vec<Formula>,
    pub lines: Vec<ProofLine>,
    pub conclusion: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("does not match the {axiom} schema; expected `{expected}`")]
    SchemaMismatch { axiom: AxiomName, expected: String },
    #[error("{axiom} needs the `{field}` parameter")]
    MissingParameter { axiom: AxiomName, field: &'static str },
    #[error("reference to line {0}, which is not an earlier line")]
    DanglingReference(usize),
    #[error("no hypothesis number {0}")]
    UnknownHypothesis(usize),
    #[error("hypothesis {index} is `{found}`, not the line's formula")]
    HypothesisMismatch { index: usize, found: String },
    #[error("not a propositional consequence of the cited lines")]
    TautologyFailed,
    #[error("{0} distinct atoms exceed the limit of {MAX_ATOMS}")]
    TooManyAtoms(usize),
    #[error("the schema would produce the negative index {0}")]
    NegativeIndex(String),
    #[error("line {line} is not `{antecedent} -> ...` with this line as consequent")]
    ModusPonensMismatch { line: usize, antecedent: String },
    #[error("line {0} is not an implication")]
    NotAnImplication(usize),
    #[error("R1 applies only to lines that do not depend on hypotheses (line {0} does)")]
    RuleOnHypotheses(usize),
    #[error("expected `{expected}`")]
    RuleMismatch { expected: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based line number, or 0 for proof-level problems.
    pub line: usize,
    pub message: String,
    pub error: Option<LineError>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "proof: {}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

/// Checks every line; returns all diagnostics on failure.
pub fn check(p: &Proof) -> Result<(), Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut depends: Vec<bool> = Vec::with_capacity(p.lines.len());
    for (i, line) in p.lines.iter().enumerate() {
        let number = i + 1;
        let result = check_line(p, number, line, &depends);
        let dep = match &line.justification {
            Justification::Hypothesis(_) => true,
            Justification::Axiom { .. } => false,
            Justification::Tautology { premises } => premises
                .iter()
                .any(|&j| j < number && j >= 1 && depends[j - 1]),
            Justification::ModusPonens(a, b) => [*a, *b]
                .iter()
                .any(|&j| j < number && j >= 1 && depends[j - 1]),
            Justification::RuleR1 { line: j, .. } => *j < number && *j >= 1 && depends[j - 1],
        };
        depends.push(dep);
        if let Err(error) = result {
            diags.push(Diagnostic {
                line: number,
                message: error.to_string(),
                error: Some(error),
            });
        }
    }
    match p.lines.last() {
        None => diags.push(Diagnostic {
            line: 0,
            message: "the proof has no lines".into(),
            error: None,
        }),
        Some(last) if !last.formula.core_eq(&p.conclusion) => diags.push(Diagnostic {
            line: 0,
            message: format!(
                "conclusion `{}` differs from the last line `{}`",
                p.conclusion, last.formula
            ),
            error: None,
        }),
        Some(_) => {}
    }
    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

fn earlier<'p>(p: &'p Proof, number: usize, j: usize) -> Result<&'p Formula, LineError> {
    if j == 0 || j >= number {
        return Err(LineError::DanglingReference(j));
    }
    Ok(&p.lines[j - 1].formula)
}

fn check_line(p: &Proof, number: usize, line: &ProofLine, depends: &[bool]) -> Result<(), LineError> {
    match &line.justification {
        Justification::Axiom {
            name,
            phi,
            psi,
            r,
            s,
        } => {
            let expected = axiom_instance(*name, &p.epsilon, phi, psi.as_ref(), r.as_ref(), s.as_ref())?;
            if expected.core_eq(&line.formula) {
                Ok(())
            } else {
                Err(LineError::SchemaMismatch {
                    axiom: *name,
                    expected: expected.to_string(),
                })
            }
        }
        Justification::Hypothesis(k) => {
            let h = k
                .checked_sub(1)
                .and_then(|i| p.hypotheses.get(i))
                .ok_or(LineError::UnknownHypothesis(*k))?;
            if h.core_eq(&line.formula) {
                Ok(())
            } else {
                Err(LineError::HypothesisMismatch {
                    index: *k,
                    found: h.to_string(),
                })
            }
        }
        Justification::ModusPonens(i, j) => {
            let antecedent = earlier(p, number, *i)?;
            let implication = earlier(p, number, *j)?;
            match implication.as_implication() {
                Some((a, b)) if a.core_eq(antecedent) && b.core_eq(&line.formula) => Ok(()),
                _ => Err(LineError::ModusPonensMismatch {
                    line: *j,
                    antecedent: antecedent.to_string(),
                }),
            }
        }
        Justification::RuleR1 { line: i, r } => {
            let source = earlier(p, number, *i)?;
            if depends[*i - 1] {
                return Err(LineError::RuleOnHypotheses(*i));
            }
            let (a, b) = source
                .as_implication()
                .ok_or(LineError::NotAnImplication(*i))?;
            let expected = Formula::implies(
                Formula::l(r.clone(), a.clone()),
                Formula::l(r.clone(), b.clone()),
            );
            if expected.core_eq(&line.formula) {
                Ok(())
            } else {
                Err(LineError::RuleMismatch {
                    expected: expected.to_string(),
                })
            }
        }
        Justification::Tautology { premises } => {
            let mut cited = Vec::with_capacity(premises.len());
            for &j in premises {
                cited.push(earlier(p, number, j)?.clone());
            }
            let goal = Formula::implies(Formula::and_all(cited), line.formula.clone());
            if is_tautology(&goal)? {
                Ok(())
            } else {
                Err(LineError::TautologyFailed)
            }
        }
    }
}

/// The instance of an axiom schema at `epsilon`.
pub fn axiom_instance(
    name: AxiomName,
    epsilon: &Rate,
    phi: &Formula,
    psi: Option<&Formula>,
    r: Option<&Rate>,
    s: Option<&Rate>,
) -> Result<Formula, LineError> {
    let need_rate = |v: Option<&Rate>, field| {
        v.cloned()
            .ok_or(LineError::MissingParameter { axiom: name, field })
    };
    match name {
        AxiomName::A1 => Ok(Formula::l(epsilon.clone(), phi.clone())),
        AxiomName::A2 => {
            let r = need_rate(r, "r")?;
            let s = need_rate(s, "s")?;
            Ok(Formula::implies(
                Formula::l(&r + &s, phi.clone()),
                Formula::l(r, phi.clone()),
            ))
        }
        AxiomName::A3 | AxiomName::A4 => {
            let psi = psi
                .cloned()
                .ok_or(LineError::MissingParameter { axiom: name, field: "psi" })?;
            let r = need_rate(r, "r")?;
            let s = need_rate(s, "s")?;
            let sum = &r + &s;
            let t = sum.checked_sub(epsilon).ok_or_else(|| {
                LineError::NegativeIndex(format!("{}", num_rational::BigRational::from(sum.diff(epsilon))))
            })?;
            let with = Formula::and(phi.clone(), psi.clone());
            let without = Formula::and(phi.clone(), Formula::not(psi));
            let (a, b, c) = (
                Formula::l(r, with),
                Formula::l(s, without),
                Formula::l(t, phi.clone()),
            );
            Ok(if name == AxiomName::A3 {
                Formula::implies(Formula::and(a, b), c)
            } else {
                Formula::implies(
                    Formula::and(Formula::not(a), Formula::not(b)),
                    Formula::not(c),
                )
            })
        }
    }
}

/// Truth-table check treating each `L_r ψ` subformula (up to sugar) as an
/// atom.
pub fn is_tautology(f: &Formula) -> Result<bool, LineError> {
    let mut atoms: HashMap<Formula, usize> = HashMap::new();
    collect_atoms(f, &mut atoms);
    if atoms.len() > MAX_ATOMS {
        return Err(LineError::TooManyAtoms(atoms.len()));
    }
    let n = atoms.len();
    Ok((0u32..1 << n).all(|v| truth(f, &atoms, v)))
}

fn collect_atoms(f: &Formula, atoms: &mut HashMap<Formula, usize>) {
    match f {
        Formula::Top => {}
        Formula::Not(a, _) => collect_atoms(a, atoms),
        Formula::And(a, b) => {
            collect_atoms(a, atoms);
            collect_atoms(b, atoms);
        }
        Formula::L(..) => {
            let next = atoms.len();
            atoms.entry(f.desugared()).or_insert(next);
        }
    }
}

fn truth(f: &Formula, atoms: &HashMap<Formula, usize>, v: u32) -> bool {
    match f {
        Formula::Top => true,
        Formula::Not(a, _) => !truth(a, atoms, v),
        Formula::And(a, b) => truth(a, atoms, v) && truth(b, atoms, v),
        Formula::L(..) => v >> atoms[&f.desugared()] & 1 == 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("index {index} is below the shift {shift}")]
    IndexUnderflow { index: Rate, shift: Rate },
    #[error("the target epsilon {epsilon} minus {shift} would be negative")]
    NegativeEpsilon { epsilon: Rate, shift: Rate },
}

/// Moves a proof at `ε` to `ε + e` (up) or `ε − e` (down) by shifting every
/// index by `e`. Going down needs every index, and `ε` itself, to be at
/// least `e` so that no two distinct indices collapse.
pub fn translate_proof(p: &Proof, e: &Rate, direction: Direction) -> Result<Proof, TranslateError> {
    let shift = |r: &Rate| -> Result<Rate, TranslateError> {
        match direction {
            Direction::Up => Ok(r + e),
            Direction::Down => r.checked_sub(e).ok_or_else(|| TranslateError::IndexUnderflow {
                index: r.clone(),
                shift: e.clone(),
            }),
        }
    };
    let formula = |f: &Formula| -> Result<Formula, TranslateError> {
        if direction == Direction::Down {
            if let Some(low) = f.indices().into_iter().find(|r| r < e) {
                return Err(TranslateError::IndexUnderflow {
                    index: low,
                    shift: e.clone(),
                });
            }
            Ok(encode_down(f, e))
        } else {
            Ok(encode_up(f, e))
        }
    };
    let epsilon = match direction {
        Direction::Up => &p.epsilon + e,
        Direction::Down => p.epsilon.checked_sub(e).ok_or_else(|| TranslateError::NegativeEpsilon {
            epsilon: p.epsilon.clone(),
            shift: e.clone(),
        })?,
    };
    let mut lines = Vec::with_capacity(p.lines.len());
    for line in &p.lines {
        let justification = match &line.justification {
            Justification::Axiom {
                name,
                phi,
                psi,
                r,
                s,
            } => {
                let shift_opt = |v: &Option<Rate>| v.as_ref().map(&shift).transpose();
                let (r, s) = match name {
                    AxiomName::A1 => (r.clone(), s.clone()),
                    AxiomName::A2 => (shift_opt(r)?, s.clone()),
                    AxiomName::A3 | AxiomName::A4 => (shift_opt(r)?, shift_opt(s)?),
                };
                Justification::Axiom {
                    name: *name,
                    phi: formula(phi)?,
                    psi: psi.as_ref().map(&formula).transpose()?,
                    r,
                    s,
                }
            }
            Justification::RuleR1 { line, r } => Justification::RuleR1 {
                line: *line,
                r: shift(r)?,
            },
            other => other.clone(),
        };
        lines.push(ProofLine {
            formula: formula(&line.formula)?,
            justification,
        });
    }
    Ok(Proof {
        epsilon,
        hypotheses: p.hypotheses.iter().map(&formula).collect::<Result<_, _>>()?,
        lines,
        conclusion: formula(&p.conclusion)?,
    })
}

#[derive(Debug, Error)]
pub enum ProofFileError {
    #[error("invalid proof JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {source}")]
    Formula {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error("{context}: invalid rate `{literal}`")]
    Rate { context: String, literal: String },
    #[error("line {line}: {message}")]
    Justification { line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
struct ProofJson {
    epsilon: String,
    #[serde(default)]
    hypotheses: Vec<String>,
    lines: Vec<LineJson>,
    conclusion: String,
}

#[derive(Serialize, Deserialize)]
struct LineJson {
    formula: String,
    by: ByJson,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ByJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    axiom: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tautology: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mp: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hypothesis: Option<usize>,
}

fn formula_field(text: &str, context: impl Into<String>) -> Result<Formula, ProofFileError> {
    parse(text).map_err(|source| ProofFileError::Formula {
        context: context.into(),
        source,
    })
}

fn rate_field(text: &str, context: impl Into<String>) -> Result<Rate, ProofFileError> {
    text.parse().map_err(|_| ProofFileError::Rate {
        context: context.into(),
        literal: text.to_string(),
    })
}

impl Proof {
    pub fn from_json(text: &str) -> Result<Proof, ProofFileError> {
        let raw: ProofJson = serde_json::from_str(text)?;
        let epsilon = rate_field(&raw.epsilon, "epsilon")?;
        let hypotheses = raw
            .hypotheses
            .iter()
            .enumerate()
            .map(|(i, h)| formula_field(h, format!("hypothesis {}", i + 1)))
            .collect::<Result<_, _>>()?;
        let mut lines = Vec::with_capacity(raw.lines.len());
        for (i, line) in raw.lines.iter().enumerate() {
            let number = i + 1;
            let formula = formula_field(&line.formula, format!("line {number}"))?;
            let justification = justification(number, &line.by)?;
            lines.push(ProofLine {
                formula,
                justification,
            });
        }
        Ok(Proof {
            epsilon,
            hypotheses,
            lines,
            conclusion: formula_field(&raw.conclusion, "conclusion")?,
        })
    }

    pub fn to_json_value(&self) -> Value {
        let lines: Vec<Value> = self
            .lines
            .iter()
            .map(|l| {
                let mut by = ByJson::default();
                match &l.justification {
                    Justification::Axiom {
                        name,
                        phi,
                        psi,
                        r,
                        s,
                    } => {
                        by.axiom = Some(name.to_string());
                        by.phi = Some(phi.to_string());
                        by.psi = psi.as_ref().map(Formula::to_string);
                        by.r = r.as_ref().map(Rate::to_string);
                        by.s = s.as_ref().map(Rate::to_string);
                    }
                    Justification::Tautology { premises } => by.tautology = Some(premises.clone()),
                    Justification::ModusPonens(i, j) => by.mp = Some([*i, *j]),
                    Justification::RuleR1 { line, r } => {
                        by.r1 = Some(*line);
                        by.r = Some(r.to_string());
                    }
                    Justification::Hypothesis(k) => by.hypothesis = Some(*k),
                }
                json!({"formula": l.formula.to_string(), "by": by})
            })
            .collect();
        json!({
            "epsilon": self.epsilon.to_string(),
            "hypotheses": self.hypotheses.iter().map(Formula::to_string).collect::<Vec<_>>(),
            "lines": lines,
            "conclusion": self.conclusion.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("proof serializes")
    }
}

fn justification(number: usize, by: &ByJson) -> Result<Justification, ProofFileError> {
    let bad = |message: &str| ProofFileError::Justification {
        line: number,
        message: message.to_string(),
    };
    let kinds = [
        by.axiom.is_some(),
        by.tautology.is_some(),
        by.mp.is_some(),
        by.r1.is_some(),
        by.hypothesis.is_some(),
    ]
    .iter()
    .filter(|&&k| k)
    .count();
    if kinds != 1 {
        return Err(bad(
            "`by` needs exactly one of axiom, tautology, mp, r1, hypothesis",
        ));
    }
    let ctx = |field: &str| format!("line {number} `{field}`");
    let rate_opt = |v: &Option<String>, field| v.as_deref().map(|t| rate_field(t, ctx(field))).transpose();
    if let Some(name) = &by.axiom {
        let name = match name.as_str() {
            "A1" => AxiomName::A1,
            "A2" => AxiomName::A2,
            "A3" => AxiomName::A3,
            "A4" => AxiomName::A4,
            _ => return Err(bad(&format!("unknown axiom `{name}`"))),
        };
        let phi = by.phi.as_deref().ok_or_else(|| bad("axiom needs `phi`"))?;
        return Ok(Justification::Axiom {
            name,
            phi: formula_field(phi, ctx("phi"))?,
            psi: by
                .psi
                .as_deref()
                .map(|t| formula_field(t, ctx("psi")))
                .transpose()?,
            r: rate_opt(&by.r, "r")?,
            s: rate_opt(&by.s, "s")?,
        });
    }
    if let Some(premises) = &by.tautology {
        return Ok(Justification::Tautology {
            premises: premises.clone(),
        });
    }
    if let Some([i, j]) = by.mp {
        return Ok(Justification::ModusPonens(i, j));
    }
    if let Some(line) = by.r1 {
        let r = rate_opt(&by.r, "r")?.ok_or_else(|| bad("r1 needs `r`"))?;
        return Ok(Justification::RuleR1 { line, r });
    }
    Ok(Justification::Hypothesis(by.hypothesis.unwrap_or_default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::rate;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn a1_proof() -> Proof {
        Proof {
            epsilon: rate("1/2"),
            hypotheses: vec![],
            lines: vec![ProofLine {
                formula: p("L{1/2} T"),
                justification: Justification::Axiom {
                    name: AxiomName::A1,
                    phi: Formula::Top,
                    psi: None,
                    r: None,
                    s: None,
                },
            }],
            conclusion: p("L{1/2} T"),
        }
    }

    #[test]
    fn a1_one_liner() {
        assert_eq!(check(&a1_proof()), Ok(()));
    }

    #[test]
    fn a2_with_modus_ponens_from_hypothesis() {
        let text = r#"{
            "epsilon": "0",
            "hypotheses": ["L{3} T"],
            "lines": [
                {"formula": "L{3} T", "by": {"hypothesis": 1}},
                {"formula": "L{3} T -> L{1} T", "by": {"axiom": "A2", "phi": "T", "r": "1", "s": "2"}},
                {"formula": "L{1} T", "by": {"mp": [1, 2]}}
            ],
            "conclusion": "L{1} T"
        }"#;
        let proof = Proof::from_json(text).unwrap();
        assert_eq!(check(&proof), Ok(()));
        let again = Proof::from_json(&proof.to_json()).unwrap();
        assert_eq!(again, proof);
    }

    #[test]
    fn negative_index_is_rejected() {
        let err = axiom_instance(
            AxiomName::A3,
            &rate("1"),
            &Formula::Top,
            Some(&Formula::Top),
            Some(&Rate::zero()),
            Some(&Rate::zero()),
        )
        .unwrap_err();
        assert_eq!(err, LineError::NegativeIndex("-1".into()));
    }

    #[test]
    fn a3_and_a4_instances() {
        let e = rate("1");
        let a3 = axiom_instance(AxiomName::A3, &e, &p("L{1} T"), Some(&Formula::Top), Some(&rate("2")), Some(&rate("1"))).unwrap();
        assert!(a3.core_eq(&p("L{2} (L{1} T & T) & L{1} (L{1} T & !T) -> L{2} L{1} T")));
        let a4 = axiom_instance(AxiomName::A4, &e, &Formula::Top, Some(&Formula::Top), Some(&rate("1")), Some(&rate("1"))).unwrap();
        assert!(a4.core_eq(&p("!L{1} (T & T) & !L{1} (T & !T) -> !L{1} T")));
    }

    #[test]
    fn diagnostics_name_the_line() {
        let mut proof = a1_proof();
        proof.lines[0].formula = p("L{1} T");
        proof.conclusion = p("L{1} T");
        let diags = check(&proof).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].line, 1);
        assert!(matches!(diags[0].error, Some(LineError::SchemaMismatch { .. })));

        proof.lines.push(ProofLine {
            formula: p("T"),
            justification: Justification::ModusPonens(1, 5),
        });
        proof.conclusion = p("T");
        let diags = check(&proof).unwrap_err();
        assert_eq!(diags[1].error, Some(LineError::DanglingReference(5)));
    }

    #[test]
    fn tautologies_over_atoms() {
        assert_eq!(is_tautology(&p("L{1} T | !L{1} T")), Ok(true));
        assert_eq!(is_tautology(&p("L{1} T -> L{2} T")), Ok(false));
        assert_eq!(is_tautology(&p("T")), Ok(true));
        // sugar differences do not split atoms
        let a = p("L{1} (T -> T)");
        let b = Formula::l(rate("1"), p("T -> T").desugared());
        assert_eq!(is_tautology(&Formula::implies(a, b)), Ok(true));
        let many = Formula::and_all((1..=17).map(|i| Formula::l(Rate::from_integer(i), Formula::Top)));
        assert_eq!(is_tautology(&many), Err(LineError::TooManyAtoms(17)));
    }

    #[test]
    fn r1_rejects_hypothesis_lines() {
        let text = r#"{
            "epsilon": "0",
            "hypotheses": ["T -> L{1} T"],
            "lines": [
                {"formula": "T -> L{1} T", "by": {"hypothesis": 1}},
                {"formula": "L{2} T -> L{2} L{1} T", "by": {"r1": 1, "r": "2"}}
            ],
            "conclusion": "L{2} T -> L{2} L{1} T"
        }"#;
        let diags = check(&Proof::from_json(text).unwrap()).unwrap_err();
        assert_eq!(diags[0].error, Some(LineError::RuleOnHypotheses(1)));
    }

    #[test]
    fn translation_examples() {
        let up = translate_proof(&a1_proof(), &rate("1/2"), Direction::Up).unwrap();
        assert_eq!(up.epsilon, rate("1"));
        assert_eq!(up.conclusion, p("L{1} T"));
        assert_eq!(check(&up), Ok(()));
        assert_eq!(translate_proof(&a1_proof(), &Rate::zero(), Direction::Up).unwrap(), a1_proof());
        assert_eq!(translate_proof(&a1_proof(), &Rate::zero(), Direction::Down).unwrap(), a1_proof());

        let mut zero = a1_proof();
        zero.epsilon = Rate::zero();
        zero.lines[0].formula = p("L{0} T");
        zero.conclusion = p("L{0} T");
        assert!(matches!(
            translate_proof(&zero, &rate("1/10"), Direction::Down),
            Err(TranslateError::NegativeEpsilon { .. })
        ));
        let down = translate_proof(&a1_proof(), &rate("1/2"), Direction::Down).unwrap();
        assert_eq!(check(&down), Ok(()));
        let mut low = a1_proof();
        low.hypotheses.push(p("L{0} T"));
        assert!(matches!(
            translate_proof(&low, &rate("1/4"), Direction::Down),
            Err(TranslateError::IndexUnderflow { .. })
        ));
    }

    #[test]
    fn malformed_files() {
        assert!(Proof::from_json("{").is_err());
        let two_kinds = r#"{"epsilon":"0","lines":[{"formula":"T","by":{"mp":[1,1],"r1":1}}],"conclusion":"T"}"#;
        assert!(matches!(Proof::from_json(two_kinds), Err(ProofFileError::Justification { line: 1, .. })));
        let bad_formula = r#"{"epsilon":"0","lines":[{"formula":"T &","by":{"tautology":[]}}],"conclusion":"T"}"#;
        assert!(matches!(Proof::from_json(bad_formula), Err(ProofFileError::Formula { .. })));
    }
}
