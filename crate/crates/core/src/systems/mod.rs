//! Builders and checkers for the classified families: single equations,
//! extended fundamental systems and quasi-cyclic systems.

mod fundamental;
mod quasicyclic;
mod single;

pub use fundamental::{
    check_prop25, check_theorem23, Class, DependenceGraph, FundamentalData, FundamentalVertex,
};
pub use quasicyclic::{check_theorem27, QuasiCyclicData, QuasiCyclicVertex};
pub use single::{
    build_case1, build_case2, build_case2_split, classify_sdse, classify_single, Classification,
};

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::series::SeriesExpr;

/// Operator degrees of one equation: finitely many, plus optionally every
/// degree from some point on.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DegreeSpec {
    pub explicit: BTreeSet<u32>,
    pub from: Option<u32>,
}

impl DegreeSpec {
    pub fn finite(items: &[u32]) -> DegreeSpec {
        DegreeSpec {
            explicit: items.iter().copied().collect(),
            from: None,
        }
    }

    pub fn from(q0: u32) -> DegreeSpec {
        DegreeSpec {
            explicit: BTreeSet::new(),
            from: Some(q0),
        }
    }

    pub fn contains(&self, q: u32) -> bool {
        self.explicit.contains(&q) || self.from.is_some_and(|f| q >= f)
    }

    /// Explicit degrees below the open tail.
    pub fn explicit_below_tail(&self) -> Vec<u32> {
        self.explicit
            .iter()
            .copied()
            .filter(|&q| self.from.is_none_or(|f| q < f))
            .collect()
    }

    pub fn up_to(&self, bound: u32) -> Vec<u32> {
        (1..=bound).filter(|&q| self.contains(q)).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.explicit.contains(&0) || self.from == Some(0) {
            return Err(Error::InvalidData("operator degree 0".into()));
        }
        if self.explicit.is_empty() && self.from.is_none() {
            return Err(Error::InvalidData("empty operator degree set".into()));
        }
        Ok(())
    }

    /// Parses `1,2,5..` (a trailing `q0..` opens the tail).
    pub fn parse(text: &str) -> Option<DegreeSpec> {
        let mut spec = DegreeSpec::default();
        for part in text.split(',') {
            let part = part.trim();
            if let Some(start) = part.strip_suffix("..") {
                if spec.from.is_some() {
                    return None;
                }
                spec.from = Some(start.trim().parse().ok()?);
            } else {
                spec.explicit.insert(part.parse().ok()?);
            }
        }
        Some(spec)
    }
}

impl fmt::Display for DegreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.explicit_below_tail().iter().map(u32::to_string).collect();
        if let Some(q0) = self.from {
            parts.push(format!("{}..", q0));
        }
        write!(f, "{}", parts.join(","))
    }
}

fn num(c: Q) -> SeriesExpr {
    SeriesExpr::Num(c)
}

fn var(j: usize) -> SeriesExpr {
    SeriesExpr::Var(j)
}

fn add(a: SeriesExpr, b: SeriesExpr) -> SeriesExpr {
    SeriesExpr::Add(Box::new(a), Box::new(b))
}

fn sub(a: SeriesExpr, b: SeriesExpr) -> SeriesExpr {
    SeriesExpr::Sub(Box::new(a), Box::new(b))
}

fn mul(a: SeriesExpr, b: SeriesExpr) -> SeriesExpr {
    SeriesExpr::Mul(Box::new(a), Box::new(b))
}

/// `c * e`, omitting a unit coefficient.
fn times(c: &Q, e: SeriesExpr) -> SeriesExpr {
    if c.is_one() {
        e
    } else {
        mul(num(c.clone()), e)
    }
}

/// `acc ± |c|·e`, choosing the sign from `c`; `None` for `acc` means the
/// sum starts here.
fn push_term(acc: Option<SeriesExpr>, c: &Q, e: SeriesExpr) -> Option<SeriesExpr> {
    if c.is_zero() {
        return acc;
    }
    Some(match acc {
        None if c.is_negative() => SeriesExpr::Neg(Box::new(times(&-c.clone(), e))),
        None => times(c, e),
        Some(a) if c.is_negative() => sub(a, times(&-c.clone(), e)),
        Some(a) => add(a, times(c, e)),
    })
}

/// `c0 + ∑ c_j h_j`.
fn linear(c0: &Q, terms: &[(usize, Q)]) -> SeriesExpr {
    let mut acc = if c0.is_zero() { None } else { Some(num(c0.clone())) };
    for (j, c) in terms {
        acc = push_term(acc, c, var(*j));
    }
    acc.unwrap_or_else(|| num(Q::zero()))
}

/// `c0 + c1·q`.
fn q_affine(c0: &Q, c1: &Q) -> SeriesExpr {
    let acc = if c0.is_zero() { None } else { Some(num(c0.clone())) };
    push_term(acc, c1, SeriesExpr::Param).unwrap_or_else(|| num(Q::zero()))
}

/// `∑_n ∏_{k<n}(start + k·step)/n! h_j^n` with `start = s0 + s1·q`:
/// `(1 - step·h_j)^{-start/step}`, or `exp(start·h_j)` when `step = 0`.
/// `None` when the factor is identically 1.
fn rising_expr(j: usize, s0: &Q, s1: &Q, step: &Q) -> Option<SeriesExpr> {
    if s0.is_zero() && s1.is_zero() {
        return None;
    }
    if step.is_zero() {
        let coeff = q_affine(s0, s1);
        let arg = match coeff {
            SeriesExpr::Num(c) => times(&c, var(j)),
            other => mul(other, var(j)),
        };
        return Some(SeriesExpr::Exp(Box::new(arg)));
    }
    let base = linear(&Q::one(), &[(j, -step.clone())]);
    let exponent = q_affine(&(-s0 / step), &(-s1 / step));
    Some(SeriesExpr::Pow(Box::new(base), Box::new(exponent)))
}

/// Product of optional factors; the empty product is 1.
fn product(factors: impl IntoIterator<Item = Option<SeriesExpr>>) -> SeriesExpr {
    factors
        .into_iter()
        .flatten()
        .reduce(mul)
        .unwrap_or_else(|| num(Q::one()))
}

/// Replaces every `h_j` by `s_j h_j`.
pub fn rescale_expr(e: &SeriesExpr, scale: &dyn Fn(usize) -> Q) -> SeriesExpr {
    use SeriesExpr::*;
    let r = |x: &SeriesExpr| Box::new(rescale_expr(x, scale));
    match e {
        Var(j) => {
            let s = scale(*j);
            if s.is_one() {
                Var(*j)
            } else {
                Mul(Box::new(Num(s)), Box::new(Var(*j)))
            }
        }
        Num(_) | Param => e.clone(),
        Neg(a) => Neg(r(a)),
        Exp(a) => Exp(r(a)),
        Log(a) => Log(r(a)),
        Add(a, b) => Add(r(a), r(b)),
        Sub(a, b) => Sub(r(a), r(b)),
        Mul(a, b) => Mul(r(a), r(b)),
        Pow(a, b) => Pow(r(a), b.clone()),
    }
}

/// One named identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn push(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.lines.push(CheckLine {
            label: label.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    /// Lines whose label starts with `prefix`.
    pub fn section(&self, prefix: &str) -> Vec<&CheckLine> {
        self.lines.iter().filter(|l| l.label.starts_with(prefix)).collect()
    }

    pub fn section_passed(&self, prefix: &str) -> bool {
        self.section(prefix).iter().all(|l| l.passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(
                f,
                "{} {}{}",
                if l.passed { "ok  " } else { "FAIL" },
                l.label,
                if l.detail.is_empty() { String::new() } else { format!(": {}", l.detail) }
            )?;
        }
        Ok(())
    }
}

fn fmt_q(q: &Q) -> String {
    rational::format(q)
}
