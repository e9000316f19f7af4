//! Dyson-Schwinger systems: representation, normalization, solving, Hopf
//! verification and structure constants.

mod hopf;
mod lambda;
mod solve;

pub use hopf::{
    check_hopf, coproduct_in_monomial_basis, monomial_rank, monomials, Certificate, HopfVerdict,
    Monomial,
};
pub use lambda::{
    extract_lambda, lambda_oracle, verify_lemma7, AffineFit, LambdaEntry, LambdaTable,
    Lemma7Report, Lemma7Violation,
};
pub use solve::{is_fixed_point, solve, solve_oracle, Solution};

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::forest::Decoration;
use crate::rational::{self, int, Q};
use crate::series::{SeriesExpr, TruncatedSeries};

/// Strict mode rejects systems that violate the necessary Hopf conditions
/// at normalization; permissive mode keeps them for `check_hopf` to refute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Strict,
    Permissive,
}

/// Degree to which series are compared during normalization.
pub const INSPECTION_DEPTH: u32 = 6;

/// `B_{(i,degree)}(f(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operator {
    pub degree: u32,
    pub expr: SeriesExpr,
}

/// Operators of every degree `q ≥ from`, with series given by a template in `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub from: u32,
    pub expr: SeriesExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Equation {
    pub ops: Vec<Operator>,
    pub family: Option<Family>,
}

/// A system `x_i = ∑_q B_{(i,q)}(f^{(i,q)}(x_1..x_N))`, equations 1..=N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sdse {
    pub nvars: usize,
    pub equations: Vec<Equation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalizeNote {
    Dropped { eq: usize, degree: u32 },
    Merged { eq: usize, degree: u32 },
    Rescaled { eq: usize, degree: u32, factor: Q },
    ZeroConstantKept { eq: usize, degree: u32 },
}

impl std::fmt::Display for NormalizeNote {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormalizeNote::Dropped { eq, degree } => {
                write!(f, "dropped zero operator ({}.{})", eq, degree)
            }
            NormalizeNote::Merged { eq, degree } => {
                write!(f, "merged equal operators ({}.{})", eq, degree)
            }
            NormalizeNote::Rescaled { eq, degree, factor } => write!(
                f,
                "rescaled ({}.{}) by {}",
                eq,
                degree,
                rational::format(factor)
            ),
            NormalizeNote::ZeroConstantKept { eq, degree } => {
                write!(f, "kept ({}.{}) with f(0) = 0", eq, degree)
            }
        }
    }
}

/// Per-equation operator series instantiated for all degrees up to a bound.
/// The series of `(i,q)` is truncated at `bound - q`, which is all the
/// solution up to `bound` can see.
#[derive(Clone, Debug)]
pub struct Instance {
    nvars: usize,
    bound: u32,
    ops: Vec<Vec<(u32, TruncatedSeries)>>,
}

impl Instance {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Operators of equation `i` (1-based), ascending degree.
    pub fn ops(&self, i: usize) -> &[(u32, TruncatedSeries)] {
        &self.ops[i - 1]
    }

    pub fn series(&self, i: usize, q: u32) -> Option<&TruncatedSeries> {
        self.ops(i).iter().find(|(d, _)| *d == q).map(|(_, s)| s)
    }

    /// Every decoration `(i,q)` in use.
    pub fn decorations(&self) -> Vec<Decoration> {
        (1..=self.nvars)
            .flat_map(|i| self.ops(i).iter().map(move |(q, _)| Decoration::new(i as u32, *q)))
            .collect()
    }
}

impl Sdse {
    pub fn new(nvars: usize) -> Sdse {
        Sdse {
            nvars,
            equations: vec![Equation::default(); nvars],
        }
    }

    pub fn equation(&self, i: usize) -> &Equation {
        &self.equations[i - 1]
    }

    pub fn equation_mut(&mut self, i: usize) -> &mut Equation {
        &mut self.equations[i - 1]
    }

    /// Adds an explicit operator to equation `i`.
    pub fn with_op(mut self, i: usize, degree: u32, expr: SeriesExpr) -> Sdse {
        self.equation_mut(i).ops.push(Operator { degree, expr });
        self
    }

    pub fn with_family(mut self, i: usize, from: u32, expr: SeriesExpr) -> Sdse {
        self.equation_mut(i).family = Some(Family { from, expr });
        self
    }

    /// Operator degrees of equation `i` up to `bound`, ascending.
    pub fn degrees(&self, i: usize, bound: u32) -> Vec<u32> {
        let eq = self.equation(i);
        let mut ds: Vec<u32> = eq.ops.iter().map(|o| o.degree).filter(|&d| d <= bound).collect();
        if let Some(fam) = &eq.family {
            ds.extend(fam.from..=bound);
        }
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// The expression for operator `(i,q)`, with the family parameter bound.
    pub fn expr(&self, i: usize, q: u32) -> Option<SeriesExpr> {
        let eq = self.equation(i);
        if let Some(op) = eq.ops.iter().find(|o| o.degree == q) {
            return Some(op.expr.clone());
        }
        match &eq.family {
            Some(fam) if q >= fam.from => Some(fam.expr.bind(&int(q as i64))),
            _ => None,
        }
    }

    /// Series of operator `(i,q)` to degree `trunc`.
    pub fn series(&self, i: usize, q: u32, trunc: u32) -> Result<Option<TruncatedSeries>> {
        match self.expr(i, q) {
            Some(e) => Ok(Some(e.eval(self.nvars, trunc, None)?)),
            None => Ok(None),
        }
    }

    fn check_vars(&self) -> Result<()> {
        if self.equations.len() != self.nvars {
            return Err(Error::InvalidSystem(format!(
                "{} equations for {} variables",
                self.equations.len(),
                self.nvars
            )));
        }
        for (i, eq) in self.equations.iter().enumerate() {
            let exprs = eq
                .ops
                .iter()
                .map(|o| (o.degree, &o.expr))
                .chain(eq.family.iter().map(|f| (f.from, &f.expr)));
            for (q, e) in exprs {
                if q == 0 {
                    return Err(Error::InvalidSystem(format!(
                        "operator degree 0 in equation {}",
                        i + 1
                    )));
                }
                if e.max_var() > self.nvars {
                    return Err(Error::InvalidSystem(format!(
                        "equation {} refers to h{} but only {} variables exist",
                        i + 1,
                        e.max_var(),
                        self.nvars
                    )));
                }
            }
            for op in &eq.ops {
                if op.expr.uses_param() {
                    return Err(Error::InvalidSystem(format!(
                        "q used outside a family in equation {}",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Series of the family of equation `i` at `q`, required to start with 1.
    fn family_series(&self, i: usize, fam: &Family, q: u32, trunc: u32) -> Result<TruncatedSeries> {
        let s = fam.expr.eval(self.nvars, trunc, Some(&int(q as i64)))?;
        if !s.constant_term().is_one() {
            return Err(Error::InvalidSystem(format!(
                "family of equation {} has f(0) = {} at q = {}",
                i,
                rational::format(&s.constant_term()),
                q
            )));
        }
        Ok(s)
    }

    /// Drops zero operators, merges equal operators of equal degree and
    /// rescales so that every `f(0) = 1`.
    pub fn normalize(&self, mode: Mode) -> Result<(Sdse, Vec<NormalizeNote>)> {
        self.check_vars()?;
        let depth = INSPECTION_DEPTH;
        let mut notes = Vec::new();
        let mut out = Sdse::new(self.nvars);
        for i in 1..=self.nvars {
            let eq = self.equation(i);
            let mut by_degree: BTreeMap<u32, Vec<(SeriesExpr, TruncatedSeries)>> = BTreeMap::new();
            for op in &eq.ops {
                let s = op.expr.eval(self.nvars, depth, None)?;
                if s.is_zero() {
                    notes.push(NormalizeNote::Dropped { eq: i, degree: op.degree });
                    continue;
                }
                by_degree.entry(op.degree).or_default().push((op.expr.clone(), s));
            }
            if let Some(fam) = &eq.family {
                let last = by_degree.keys().next_back().copied().unwrap_or(0);
                for q in fam.from..=last.max(fam.from + depth) {
                    self.family_series(i, fam, q, 0)?;
                }
            }
            let mut ops = Vec::new();
            for (degree, group) in by_degree {
                let (expr, s) = &group[0];
                if group[1..].iter().any(|(_, t)| t != s) {
                    return Err(Error::CannotBeHopf(format!(
                        "equation {} has operators of degree {} with different series",
                        i, degree
                    )));
                }
                if group.len() > 1 {
                    notes.push(NormalizeNote::Merged { eq: i, degree });
                }
                if let Some(fam) = eq.family.as_ref().filter(|f| degree >= f.from) {
                    let t = self.family_series(i, fam, degree, depth)?;
                    if &t != s {
                        return Err(Error::CannotBeHopf(format!(
                            "equation {} has an operator of degree {} differing from its family",
                            i, degree
                        )));
                    }
                    notes.push(NormalizeNote::Merged { eq: i, degree });
                    continue;
                }
                let c = s.constant_term();
                let expr = if c.is_zero() {
                    if mode == Mode::Strict {
                        return Err(Error::CannotBeHopf(format!(
                            "operator ({}.{}) has f(0) = 0 with f nonzero",
                            i, degree
                        )));
                    }
                    notes.push(NormalizeNote::ZeroConstantKept { eq: i, degree });
                    expr.clone()
                } else if c.is_one() {
                    expr.clone()
                } else {
                    let factor = Q::one() / c;
                    notes.push(NormalizeNote::Rescaled {
                        eq: i,
                        degree,
                        factor: factor.clone(),
                    });
                    SeriesExpr::scaled(factor, expr.clone())
                };
                ops.push(Operator { degree, expr });
            }
            let target = out.equation_mut(i);
            target.ops = ops;
            target.family = eq.family.clone();
        }
        Ok((out, notes))
    }

    /// Evaluates every operator of degree at most `bound`.
    pub fn instantiate(&self, bound: u32) -> Result<Instance> {
        self.check_vars()?;
        let mut ops = Vec::with_capacity(self.nvars);
        for i in 1..=self.nvars {
            let eq = self.equation(i);
            let mut list = Vec::new();
            for q in self.degrees(i, bound) {
                let trunc = bound - q;
                let explicit: Vec<&Operator> = eq.ops.iter().filter(|o| o.degree == q).collect();
                let s = match explicit.first() {
                    Some(op) => {
                        let s = op.expr.eval(self.nvars, trunc, None)?;
                        for other in &explicit[1..] {
                            if other.expr.eval(self.nvars, trunc, None)? != s {
                                return Err(Error::CannotBeHopf(format!(
                                    "equation {} has operators of degree {} with different series",
                                    i, q
                                )));
                            }
                        }
                        s
                    }
                    None => {
                        let fam = eq.family.as_ref().expect("degree comes from the family");
                        self.family_series(i, fam, q, trunc)?
                    }
                };
                list.push((q, s));
            }
            ops.push(list);
        }
        Ok(Instance {
            nvars: self.nvars,
            bound,
            ops,
        })
    }

    /// Keeps only the degree-1 operator of each equation.
    pub fn truncate_at_1(&self) -> Result<Sdse> {
        let mut out = Sdse::new(self.nvars);
        for i in 1..=self.nvars {
            let expr = self.expr(i, 1).ok_or_else(|| {
                Error::NotApplicable(format!("equation {} has no operator of degree 1", i))
            })?;
            out.equation_mut(i).ops.push(Operator { degree: 1, expr });
        }
        Ok(out)
    }

    /// Whether every equation has an operator of degree 1.
    pub fn has_degree_one_everywhere(&self) -> bool {
        (1..=self.nvars).all(|i| self.expr(i, 1).is_some())
    }
}
