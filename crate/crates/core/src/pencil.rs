//! Pencil expressions such as `"A1, A2 A2^H"`: one product of (possibly
//! adjointed) tuple slots per pencil variable.
//!
//! ```text
//! list   := term ("," term)*
//! term   := factor+
//! factor := atom ("^H")*
//! atom   := A1 | A2 | A3 | H | E | F
//! ```
//!
//! `^H` binds to the atom in front of it, and an even number of them
//! cancels.

use std::fmt;

use crate::error::{Error, Result};
use crate::generators::GeneratorTuple;
use crate::matrix::ComplexMatrix;

/// A tuple slot. `H`, `E`, `F` are aliases for `A1`, `A2`, `A3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    A1,
    A2,
    A3,
}

impl Atom {
    pub fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub atom: Atom,
    pub adjoint: bool,
}

/// A product of factors, evaluated left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PencilExpr {
    pub factors: Vec<Factor>,
}

impl PencilExpr {
    pub fn atom(atom: Atom) -> Self {
        PencilExpr { factors: vec![Factor { atom, adjoint: false }] }
    }

    /// Evaluates against the slots `(A1, A2, A3)`.
    pub fn eval(&self, slots: [&ComplexMatrix; 3]) -> ComplexMatrix {
        let pick = |f: &Factor| {
            let m = slots[f.atom.slot()];
            if f.adjoint {
                m.adjoint()
            } else {
                m.clone()
            }
        };
        let mut it = self.factors.iter();
        let mut acc = pick(it.next().expect("expression has at least one factor"));
        for f in it {
            acc = &acc * &pick(f);
        }
        acc
    }

    pub fn eval_tuple(&self, t: &GeneratorTuple) -> ComplexMatrix {
        self.eval(t.slots())
    }
}

impl fmt::Display for PencilExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "A{}", x.atom.slot() + 1)?;
            if x.adjoint {
                f.write_str("^H")?;
            }
        }
        Ok(())
    }
}

/// Formats a list back into parseable source.
pub fn format_pencil(exprs: &[PencilExpr]) -> String {
    exprs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn atom(&mut self) -> Result<Atom> {
        let start = self.pos;
        let c = self.peek().ok_or_else(|| syntax(start, "expected an atom"))?;
        self.pos += 1;
        match c {
            b'H' => Ok(Atom::A1),
            b'E' => Ok(Atom::A2),
            b'F' => Ok(Atom::A3),
            b'A' => {
                let d = self.peek();
                self.pos += 1;
                match d {
                    Some(b'1') => Ok(Atom::A1),
                    Some(b'2') => Ok(Atom::A2),
                    Some(b'3') => Ok(Atom::A3),
                    _ => Err(syntax(start, "unknown atom; expected A1, A2 or A3")),
                }
            }
            b'^' => Err(syntax(start, "'^H' must follow an atom")),
            b',' => Err(syntax(start, "empty term")),
            _ => {
                let end = self.src[start..]
                    .iter()
                    .position(|b| !b.is_ascii_alphanumeric())
                    .map_or(self.src.len(), |p| start + p.max(1));
                let word = String::from_utf8_lossy(&self.src[start..end]);
                Err(syntax(start, format!("unknown atom '{word}'")))
            }
        }
    }

    fn factor(&mut self) -> Result<Factor> {
        let atom = self.atom()?;
        let mut adjoint = false;
        loop {
            self.skip_ws();
            if self.peek() != Some(b'^') {
                break;
            }
            let at = self.pos;
            self.pos += 1;
            self.skip_ws();
            if self.peek() != Some(b'H') {
                return Err(syntax(at, "expected 'H' after '^'"));
            }
            self.pos += 1;
            adjoint = !adjoint;
        }
        Ok(Factor { atom, adjoint })
    }

    fn term(&mut self) -> Result<PencilExpr> {
        self.skip_ws();
        let mut factors = vec![self.factor()?];
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(b',') => break,
                _ => factors.push(self.factor()?),
            }
        }
        Ok(PencilExpr { factors })
    }
}

/// Parses a comma-separated list of pencil terms. Errors carry the byte
/// offset of the offending token.
pub fn parse_pencil(src: &str) -> Result<Vec<PencilExpr>> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let mut out = vec![p.term()?];
    while p.peek() == Some(b',') {
        p.pos += 1;
        out.push(p.term()?);
    }
    Ok(out)
}

/// Evaluates every expression against a tuple.
pub fn eval_pencil(exprs: &[PencilExpr], t: &GeneratorTuple) -> Vec<ComplexMatrix> {
    exprs.iter().map(|e| e.eval_tuple(t)).collect()
}
