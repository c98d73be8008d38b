use thiserror::Error;

use super::Formula;
use crate::rate::{Rate, RateError};

/// A parse failure; `position` is a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("negative rate `{literal}` at {position}")]
    NegativeRate { position: usize, literal: String },
    #[error("malformed rate `{literal}` at {position}")]
    MalformedRate { position: usize, literal: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::NegativeRate { position, .. }
            | ParseError::MalformedRate { position, .. } => *position,
        }
    }
}

/// Parses the ASCII grammar
///
/// ```text
/// phi ::= "T" | "F" | "!" phi | phi "&" phi | phi "|" phi | phi "->" phi
///       | "L{" rate "}" phi | "(" phi ")"
/// ```
///
/// with `!`/`L{r}` binding tightest, then `&`, `|`, and `->` loosest. `&` and
/// `|` associate to the left, `->` to the right.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let f = p.implication()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn error(&self, message: &str) -> ParseError {
        let found = match self.rest().chars().next() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_string(),
        };
        ParseError::Syntax {
            position: self.pos,
            message: format!("{message}, found {found}"),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat("|") {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat("!") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat("L") {
            if !self.eat("{") {
                return Err(self.error("expected `{` after `L`"));
            }
            let start = self.pos;
            let close = self
                .rest()
                .find('}')
                .ok_or_else(|| ParseError::Syntax {
                    position: self.pos,
                    message: "unterminated rate, expected `}` before the end of input".into(),
                })?;
            let literal = &self.src[start..start + close];
            let r: Rate = literal.parse().map_err(|e| match e {
                RateError::Negative(_) => ParseError::NegativeRate {
                    position: start,
                    literal: literal.trim().to_string(),
                },
                RateError::Malformed(_) => ParseError::MalformedRate {
                    position: start,
                    literal: literal.trim().to_string(),
                },
            })?;
            self.pos = start + close + 1;
            return Ok(Formula::l(r, self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        if self.eat("T") {
            Ok(Formula::Top)
        } else if self.eat("F") {
            Ok(Formula::bot())
        } else if self.eat("(") {
            let f = self.implication()?;
            if !self.eat(")") {
                return Err(self.error("expected `)`"));
            }
            Ok(f)
        } else {
            Err(self.error("expected a formula"))
        }
    }
}
