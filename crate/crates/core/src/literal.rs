//! Text form of forests and series.
//!
//! A tree is `[` followed by an optional one-character label, its children
//! and `]`, e.g. `[[][]]` or `[a[b][c]]`. A forest is a run of trees
//! (whitespace between trees is allowed) and the empty forest is `1`.
//! Series read and print as `[][] - 2*[[]] + 1/2*[[[]]]`; a ζ-basis series
//! wraps every forest as `z(...)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;
use crate::forest::{Forest, Label, Tree};
use crate::series::{Basis, ForestSeries, TensorSeries, Q};

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let mut msg = msg.into();
        match self.peek() {
            Some(c) => {
                let _ = write!(msg, ", found '{c}'");
            }
            None => msg.push_str(", found end of input"),
        }
        ParseError::new(self.pos, msg)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn tree(&mut self) -> Result<Tree, ParseError> {
        self.expect('[')?;
        let label = match self.peek() {
            Some(c) if c.is_ascii_alphanumeric() => {
                self.pos += 1;
                Label::new(c).expect("alphanumeric labels are valid")
            }
            _ => Label::PLAIN,
        };
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('[') => children.push(self.tree()?),
                Some(']') => {
                    self.pos += 1;
                    return Ok(Tree::new(label, children));
                }
                _ => return Err(self.error("expected '[' or ']' inside a tree")),
            }
        }
    }

    /// A nonempty run of trees, or `1`.
    fn forest(&mut self) -> Result<Forest, ParseError> {
        self.skip_ws();
        if self.eat('1') {
            return Ok(Forest::empty());
        }
        if self.peek() != Some('[') {
            return Err(self.error("expected a forest"));
        }
        let mut trees = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() == Some('[') {
                trees.push(self.tree()?);
            } else {
                break;
            }
        }
        Ok(Forest::new(trees))
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits
            .parse()
            .map_err(|_| ParseError::new(start, "invalid integer"))
    }

    fn rational(&mut self) -> Result<Q, ParseError> {
        let num = self.integer()?;
        if self.eat('/') {
            let at = self.pos;
            let den = self.integer()?;
            if den.is_zero() {
                return Err(ParseError::new(at, "zero denominator"));
            }
            Ok(Q::new(num, den))
        } else {
            Ok(Q::from_integer(num))
        }
    }

    /// One forest, optionally wrapped in `z(...)`; returns the wrapping.
    fn basis_forest(&mut self) -> Result<(Forest, Basis), ParseError> {
        self.skip_ws();
        if self.eat('z') {
            self.skip_ws();
            self.expect('(')?;
            let f = self.forest()?;
            self.skip_ws();
            self.expect(')')?;
            Ok((f, Basis::Zeta))
        } else {
            Ok((self.forest()?, Basis::Delta))
        }
    }

    fn series(&mut self) -> Result<(ForestSeries, Option<Basis>), ParseError> {
        let mut out = ForestSeries::zero();
        let mut basis: Option<Basis> = None;
        let mut first = true;
        loop {
            self.skip_ws();
            if self.at_end() {
                if first {
                    return Err(self.error("expected a series"));
                }
                break;
            }
            let mut sign = Q::one();
            if self.eat('-') {
                sign = -sign;
            } else if !first && !self.eat('+') {
                return Err(self.error("expected '+' or '-'"));
            } else if first {
                self.eat('+');
            }
            self.skip_ws();
            let term_start = self.pos;
            let (coef, forest, b) = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                // a coefficient without "*" multiplies the empty forest
                let c = self.rational()?;
                self.skip_ws();
                if self.eat('*') {
                    let (f, b) = self.basis_forest()?;
                    (c, f, Some(b))
                } else {
                    (c, Forest::empty(), None)
                }
            } else {
                let (f, b) = self.basis_forest()?;
                (Q::one(), f, Some(b))
            };
            if let Some(b) = b {
                match basis {
                    None => basis = Some(b),
                    Some(prev) if prev != b => {
                        return Err(ParseError::new(term_start, "mixed δ and ζ terms"));
                    }
                    _ => {}
                }
            }
            out.add_term(forest, sign * coef);
            first = false;
        }
        Ok((out, basis))
    }
}

/// Parses a single tree such as `[a[b]]`.
pub fn parse_tree(src: &str) -> Result<Tree, ParseError> {
    let mut c = Cursor::new(src);
    c.skip_ws();
    let t = c.tree()?;
    c.skip_ws();
    if !c.at_end() {
        return Err(c.error("trailing input after tree"));
    }
    Ok(t)
}

/// Parses a forest such as `[][[]]` or `1`.
pub fn parse_forest(src: &str) -> Result<Forest, ParseError> {
    let mut c = Cursor::new(src);
    let f = c.forest()?;
    c.skip_ws();
    if !c.at_end() {
        return Err(c.error("trailing input after forest"));
    }
    Ok(f)
}

/// Parses a δ-basis series. A `z(...)` series is rejected.
pub fn parse_series(src: &str) -> Result<ForestSeries, ParseError> {
    let (s, basis) = Cursor::new(src).series()?;
    if basis == Some(Basis::Zeta) {
        return Err(ParseError::new(0, "ζ-basis series where a δ-basis series was expected"));
    }
    Ok(s)
}

/// Parses a series and reports which basis its terms were written in.
/// Series without any `z(...)` term are read in the δ basis.
pub fn parse_tagged_series(src: &str) -> Result<(ForestSeries, Basis), ParseError> {
    let (s, basis) = Cursor::new(src).series()?;
    Ok((s, basis.unwrap_or(Basis::Delta)))
}

fn write_tree(f: &mut impl Write, t: &Tree) -> fmt::Result {
    f.write_char('[')?;
    if let Some(c) = t.label().as_char() {
        f.write_char(c)?;
    }
    for c in t.children() {
        write_tree(f, c)?;
    }
    f.write_char(']')
}

fn write_forest(f: &mut impl Write, h: &Forest) -> fmt::Result {
    if h.is_empty() {
        return f.write_char('1');
    }
    for t in h.trees() {
        write_tree(f, t)?;
    }
    Ok(())
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tree(f, self)
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tree(f, self)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_forest(f, self)
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_forest(f, self)
    }
}

fn write_rational(f: &mut impl Write, q: &Q) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

fn write_signed_terms<'a, T: 'a>(
    f: &mut impl Write,
    terms: impl Iterator<Item = (&'a T, &'a Q)>,
    mut write_item: impl FnMut(&mut dyn Write, &T) -> Result<bool, fmt::Error>,
) -> fmt::Result {
    let mut first = true;
    for (item, c) in terms {
        let neg = c.is_negative();
        match (first, neg) {
            (true, true) => f.write_char('-')?,
            (true, false) => {}
            (false, true) => f.write_str(" - ")?,
            (false, false) => f.write_str(" + ")?,
        }
        let a = c.abs();
        let mut body = String::new();
        let is_unit = write_item(&mut body, item)?;
        if is_unit {
            write_rational(f, &a)?;
        } else {
            if !a.is_one() {
                write_rational(f, &a)?;
                f.write_char('*')?;
            }
            f.write_str(&body)?;
        }
        first = false;
    }
    if first {
        f.write_char('0')?;
    }
    Ok(())
}

/// Writes a series in the given basis. For the ζ basis the coefficients are
/// taken as ζ-coefficients, i.e. no conversion happens here.
pub fn write_series(f: &mut impl Write, s: &ForestSeries, basis: Basis) -> fmt::Result {
    write_signed_terms(f, s.iter(), |w, h| match basis {
        Basis::Delta => {
            if h.is_empty() {
                Ok(true)
            } else {
                write_forest(&mut WriteAdapter(w), h)?;
                Ok(false)
            }
        }
        Basis::Zeta => {
            w.write_str("z(")?;
            write_forest(&mut WriteAdapter(w), h)?;
            w.write_char(')')?;
            Ok(false)
        }
    })
}

pub(crate) fn write_tensor(f: &mut impl Write, s: &TensorSeries) -> fmt::Result {
    let items: Vec<_> = s.iter().collect();
    write_signed_terms(f, items.into_iter(), |w, (l, r)| {
        let mut w = WriteAdapter(w);
        write_forest(&mut w, l)?;
        w.write_char('⊗')?;
        write_forest(&mut w, r)?;
        Ok(false)
    })
}

struct WriteAdapter<'a>(&'a mut dyn Write);

impl Write for WriteAdapter<'_> {
    fn write_str(&mut self, s: &str) -> fmt::Result {
        self.0.write_str(s)
    }
}

/// Renders a series, in the ζ basis if requested.
pub fn series_to_string(s: &ForestSeries, basis: Basis) -> String {
    let mut out = String::new();
    write_series(&mut out, s, basis).expect("writing to a String cannot fail");
    out
}
