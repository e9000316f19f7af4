//! Series expressions as written in system files.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' power)?
//! power  := ['-'] rational | 'q' | '(' expr ')'
//! atom   := rational | 'h'INT | 'q' | '(' expr ')' | 'exp(' expr ')' | 'log(' expr ')'
//! ```
//!
//! A parenthesized power must evaluate to a constant.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::TruncatedSeries;
use crate::error::{Error, Result};
use crate::rational::{self, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesExpr {
    Num(Q),
    /// `h_k`, 1-based.
    Var(usize),
    /// The operator-degree parameter of a family.
    Param,
    Neg(Box<SeriesExpr>),
    Add(Box<SeriesExpr>, Box<SeriesExpr>),
    Sub(Box<SeriesExpr>, Box<SeriesExpr>),
    Mul(Box<SeriesExpr>, Box<SeriesExpr>),
    Pow(Box<SeriesExpr>, Box<SeriesExpr>),
    Exp(Box<SeriesExpr>),
    Log(Box<SeriesExpr>),
}

impl SeriesExpr {
    pub fn num(c: Q) -> Self {
        SeriesExpr::Num(c)
    }

    pub fn scaled(c: Q, e: SeriesExpr) -> Self {
        SeriesExpr::Mul(Box::new(SeriesExpr::Num(c)), Box::new(e))
    }

    fn children(&self) -> Vec<&SeriesExpr> {
        use SeriesExpr::*;
        match self {
            Num(_) | Var(_) | Param => vec![],
            Neg(a) | Exp(a) | Log(a) => vec![a],
            Add(a, b) | Sub(a, b) | Mul(a, b) | Pow(a, b) => vec![a, b],
        }
    }

    pub fn uses_param(&self) -> bool {
        matches!(self, SeriesExpr::Param) || self.children().iter().any(|c| c.uses_param())
    }

    /// Replaces the family parameter by the constant `q`.
    pub fn bind(&self, q: &Q) -> SeriesExpr {
        use SeriesExpr::*;
        let b = |e: &SeriesExpr| Box::new(e.bind(q));
        match self {
            Param => Num(q.clone()),
            Num(_) | Var(_) => self.clone(),
            Neg(a) => Neg(b(a)),
            Exp(a) => Exp(b(a)),
            Log(a) => Log(b(a)),
            Add(x, y) => Add(b(x), b(y)),
            Sub(x, y) => Sub(b(x), b(y)),
            Mul(x, y) => Mul(b(x), b(y)),
            Pow(x, y) => Pow(b(x), b(y)),
        }
    }

    /// Largest variable index referenced, 0 if none.
    pub fn max_var(&self) -> usize {
        let own = if let SeriesExpr::Var(k) = self { *k } else { 0 };
        self.children()
            .iter()
            .map(|c| c.max_var())
            .fold(own, usize::max)
    }

    /// Evaluates in `nvars` variables to degree `trunc`, with `q` bound to
    /// the family parameter when given.
    pub fn eval(&self, nvars: usize, trunc: u32, q: Option<&Q>) -> Result<TruncatedSeries> {
        use SeriesExpr::*;
        Ok(match self {
            Num(c) => TruncatedSeries::constant(nvars, trunc, c.clone()),
            Var(k) => {
                if *k == 0 || *k > nvars {
                    return Err(Error::InvalidSystem(format!(
                        "h{} out of range for {} variables",
                        k, nvars
                    )));
                }
                TruncatedSeries::var(nvars, trunc, *k)
            }
            Param => match q {
                Some(q) => TruncatedSeries::constant(nvars, trunc, q.clone()),
                None => {
                    return Err(Error::InvalidSystem(
                        "q is only allowed in an operator family".into(),
                    ))
                }
            },
            Neg(a) => a.eval(nvars, trunc, q)?.neg(),
            Add(a, b) => a.eval(nvars, trunc, q)?.add(&b.eval(nvars, trunc, q)?)?,
            Sub(a, b) => a.eval(nvars, trunc, q)?.sub(&b.eval(nvars, trunc, q)?)?,
            Mul(a, b) => a.eval(nvars, trunc, q)?.mul(&b.eval(nvars, trunc, q)?)?,
            Pow(a, b) => {
                let e = b.eval(nvars, trunc, q)?;
                if !e.is_constant() {
                    return Err(Error::InvalidSystem("exponent is not a constant".into()));
                }
                a.eval(nvars, trunc, q)?.pow_rational(&e.constant_term())?
            }
            Exp(a) => a.eval(nvars, trunc, q)?.exp()?,
            Log(a) => a.eval(nvars, trunc, q)?.log()?,
        })
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
        use SeriesExpr::*;
        // levels: 0 expr, 1 term, 2 factor, 3 atom
        let own = match self {
            Neg(_) | Add(..) | Sub(..) => 0,
            Num(c) if c.is_negative() => 0,
            Num(c) if !c.is_integer() => 2,
            Mul(..) => 1,
            Pow(..) => 2,
            _ => 3,
        };
        let wrap = own < level;
        if wrap {
            write!(f, "(")?;
        }
        match self {
            Num(c) => write!(f, "{}", rational::format(c))?,
            Var(k) => write!(f, "h{}", k)?,
            Param => write!(f, "q")?,
            Neg(a) => {
                write!(f, "-")?;
                a.write_at(f, 1)?;
            }
            Add(a, b) => {
                a.write_at(f, 0)?;
                write!(f, " + ")?;
                b.write_at(f, 1)?;
            }
            Sub(a, b) => {
                a.write_at(f, 0)?;
                write!(f, " - ")?;
                b.write_at(f, 1)?;
            }
            Mul(a, b) => {
                a.write_at(f, 1)?;
                write!(f, "*")?;
                b.write_at(f, 2)?;
            }
            Pow(a, b) => {
                a.write_at(f, 3)?;
                write!(f, "^")?;
                match &**b {
                    Num(c) => write!(f, "{}", rational::format(c))?,
                    Param => write!(f, "q")?,
                    other => {
                        write!(f, "(")?;
                        other.write_at(f, 0)?;
                        write!(f, ")")?;
                    }
                }
            }
            Exp(a) => {
                write!(f, "exp(")?;
                a.write_at(f, 0)?;
                write!(f, ")")?;
            }
            Log(a) => {
                write!(f, "log(")?;
                a.write_at(f, 0)?;
                write!(f, ")")?;
            }
        }
        if wrap {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for SeriesExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// Parses a series expression; error positions are reported at `line`,
/// with columns shifted by `col_offset`.
pub fn parse_expr_at(text: &str, line: usize, col_offset: usize) -> Result<SeriesExpr> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        line,
        col_offset,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected '{}'", p.chars[p.pos])));
    }
    Ok(e)
}

pub fn parse_expr(text: &str) -> Result<SeriesExpr> {
    parse_expr_at(text, 1, 0)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col_offset: usize,
}

impl Parser {
    fn error(&self, message: String) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.col_offset + self.pos + 1,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c)))
        }
    }

    fn expr(&mut self) -> Result<SeriesExpr> {
        let mut acc = if self.eat('-') {
            negate(self.term()?)
        } else {
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = SeriesExpr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = SeriesExpr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SeriesExpr> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = SeriesExpr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SeriesExpr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let power = match self.peek() {
            Some('q') => {
                self.pos += 1;
                SeriesExpr::Param
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                e
            }
            Some('-') => {
                self.pos += 1;
                SeriesExpr::Num(-self.rational()?)
            }
            Some(c) if c.is_ascii_digit() => SeriesExpr::Num(self.rational()?),
            _ => return Err(self.error("expected an exponent".into())),
        };
        Ok(SeriesExpr::Pow(Box::new(base), Box::new(power)))
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer".into()));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits"))
    }

    fn rational(&mut self) -> Result<Q> {
        let num = self.integer()?;
        let save = self.pos;
        if self.eat('/') {
            let at = self.pos;
            let den = self.integer()?;
            if den.is_zero() {
                self.pos = at;
                return Err(self.error("zero denominator".into()));
            }
            return Ok(Q::new(num, den));
        }
        self.pos = save;
        Ok(Q::from_integer(num))
    }

    fn keyword(&mut self, word: &str) -> bool {
        let w: Vec<char> = word.chars().collect();
        if self.chars[self.pos..].starts_with(&w) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<SeriesExpr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('h') => {
                self.pos += 1;
                let at = self.pos;
                let k = self.integer()?;
                match usize::try_from(k) {
                    Ok(k) if k >= 1 => Ok(SeriesExpr::Var(k)),
                    _ => {
                        self.pos = at;
                        Err(self.error("variable index must be positive".into()))
                    }
                }
            }
            Some('q') => {
                self.pos += 1;
                Ok(SeriesExpr::Param)
            }
            Some('e') if self.keyword("exp") => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(SeriesExpr::Exp(Box::new(e)))
            }
            Some('l') if self.keyword("log") => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(SeriesExpr::Log(Box::new(e)))
            }
            Some(c) if c.is_ascii_digit() => Ok(SeriesExpr::Num(self.rational()?)),
            Some(c) => Err(self.error(format!("unexpected '{}'", c))),
            None => Err(self.error("unexpected end of expression".into())),
        }
    }
}

fn negate(e: SeriesExpr) -> SeriesExpr {
    match e {
        SeriesExpr::Num(c) => SeriesExpr::Num(-c),
        other => SeriesExpr::Neg(Box::new(other)),
    }
}
