//! Low-level text parsing: a positioned character cursor, `A`-elements and
//! bracketed matrices of `A`-elements.

use num_bigint::BigInt;

use super::InputError;
use crate::dga::{AElem, ExteriorDGAlgebra};

/// A character with its 1-based line and column.
#[derive(Clone, Copy, Debug)]
pub struct PosChar {
    pub ch: char,
    pub line: usize,
    pub column: usize,
}

pub fn positioned(text: &str, line: usize, first_column: usize) -> Vec<PosChar> {
    text.chars()
        .enumerate()
        .map(|(k, ch)| PosChar {
            ch,
            line,
            column: first_column + k,
        })
        .collect()
}

pub struct Cursor<'a> {
    chars: &'a [PosChar],
    at: usize,
    /// Position reported for errors at the end of input.
    end: (usize, usize),
}

impl<'a> Cursor<'a> {
    pub fn new(chars: &'a [PosChar], end: (usize, usize)) -> Self {
        Cursor { chars, at: 0, end }
    }

    pub fn position(&self) -> (usize, usize) {
        self.chars
            .get(self.at)
            .map_or(self.end, |c| (c.line, c.column))
    }

    pub fn error(&self, message: impl Into<String>) -> InputError {
        let (line, column) = self.position();
        InputError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|c| c.ch)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.at += 1;
        }
        c
    }

    pub fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.at += 1;
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }

    pub fn expect_end(&mut self) -> Result<(), InputError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected '{}'", self.peek().unwrap_or(' '))))
        }
    }

    pub fn expect(&mut self, ch: char) -> Result<(), InputError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == ch => {
                self.at += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected '{ch}', found '{c}'"))),
            None => Err(self.error(format!("expected '{ch}', found end of input"))),
        }
    }

    pub fn ident(&mut self) -> Result<String, InputError> {
        self.skip_ws();
        let start = self.at;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.at += 1;
        }
        let name: String = self.chars[start..self.at].iter().map(|c| c.ch).collect();
        if name.is_empty() || name.starts_with(|c: char| c.is_ascii_digit()) {
            self.at = start;
            return Err(self.error("expected a name"));
        }
        Ok(name)
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.at;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.at += 1;
        }
        let s: String = self.chars[start..self.at].iter().map(|c| c.ch).collect();
        s.parse().ok()
    }

    pub fn integer(&mut self) -> Result<i64, InputError> {
        self.skip_ws();
        let neg = self.peek() == Some('-');
        if neg {
            self.at += 1;
        }
        let here = self.error("expected an integer");
        let v = self.digits().ok_or(here)?;
        let v: i64 = i64::try_from(v).map_err(|_| self.error("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }
}

/// Parses a sum of terms `c*Y1*Y2` in `alg`, stopping before `,`, `]` or the end.
pub fn parse_aelem(cur: &mut Cursor<'_>, alg: &ExteriorDGAlgebra) -> Result<AElem, InputError> {
    let ring = alg.ring();
    let mut total = AElem::zero();
    cur.skip_ws();
    let mut negative = match cur.peek() {
        Some('-') => {
            cur.bump();
            true
        }
        Some('+') => {
            cur.bump();
            false
        }
        _ => false,
    };
    loop {
        let mut term = AElem::scalar(ring.one());
        loop {
            cur.skip_ws();
            match cur.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let num = cur.digits().expect("at least one digit");
                    let value = if cur.peek() == Some('/') {
                        cur.bump();
                        let err = cur.error("expected a denominator");
                        let den = cur.digits().ok_or(err)?;
                        let err =
                            cur.error(format!("denominator {den} is not invertible in {ring}"));
                        ring.from_fraction(&num, &den).map_err(|_| err)?
                    } else {
                        ring.from_bigint(&num)
                    };
                    term = term.scale(&value);
                }
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                    let (line, column) = cur.position();
                    let name = cur.ident()?;
                    let j = alg.var_index(&name).ok_or_else(|| InputError::Syntax {
                        line,
                        column,
                        message: format!("unknown variable {name}"),
                    })?;
                    term = alg.mul(&term, &alg.variable(j));
                }
                Some(c) => {
                    return Err(
                        cur.error(format!("expected a coefficient or a variable, found '{c}'"))
                    )
                }
                None => return Err(cur.error("expected a coefficient or a variable")),
            }
            cur.skip_ws();
            if cur.peek() == Some('*') {
                cur.bump();
            } else {
                break;
            }
        }
        if negative {
            term = term.neg();
        }
        total = total.add(&term);
        cur.skip_ws();
        match cur.peek() {
            Some('+') => negative = false,
            Some('-') => negative = true,
            _ => return Ok(total),
        }
        cur.bump();
    }
}

/// An element together with the position where it started.
pub struct Located<T> {
    pub value: T,
    pub line: usize,
    pub column: usize,
}

/// Parses `[[a, b], [c, d]]`; rows may be empty only for an empty matrix `[]`.
pub fn parse_matrix(
    cur: &mut Cursor<'_>,
    alg: &ExteriorDGAlgebra,
) -> Result<Vec<Vec<Located<AElem>>>, InputError> {
    cur.expect('[')?;
    let mut rows = Vec::new();
    cur.skip_ws();
    if cur.peek() == Some(']') {
        cur.bump();
        return Ok(rows);
    }
    loop {
        cur.expect('[')?;
        let mut row = Vec::new();
        loop {
            cur.skip_ws();
            let (line, column) = cur.position();
            row.push(Located {
                value: parse_aelem(cur, alg)?,
                line,
                column,
            });
            cur.skip_ws();
            match cur.bump() {
                Some(',') => continue,
                Some(']') => break,
                _ => return Err(cur.error("expected ',' or ']' in a matrix row")),
            }
        }
        rows.push(row);
        cur.skip_ws();
        match cur.bump() {
            Some(',') => continue,
            Some(']') => return Ok(rows),
            _ => return Err(cur.error("expected ',' or ']' after a matrix row")),
        }
    }
}

/// True once every `[` has been closed.
pub fn is_bracket_balanced(chars: &[PosChar]) -> bool {
    let mut depth = 0i64;
    for c in chars {
        match c.ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
    }
    depth <= 0
}
