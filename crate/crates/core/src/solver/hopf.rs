use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::Solution;
use crate::algebra::{coproduct, ForestSum, TensorSum};
use crate::combinat::{runs, weighted_multisets};
use crate::forest::Forest;
use crate::linalg::{apply, Span, SparseVec};
use crate::rational::{self, Q};

/// A product of solution components `x_i(m)`, as sorted `(i, m)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<(usize, u32)>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, m)| m).sum()
    }

    pub fn eval(&self, sol: &Solution) -> ForestSum {
        let mut acc = ForestSum::one();
        for &(i, m) in &self.0 {
            acc = acc.multiply(sol.component(i, m));
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = runs(&self.0)
            .into_iter()
            .map(|(&(i, m), k)| {
                if k == 1 {
                    format!("x{}({})", i, m)
                } else {
                    format!("x{}({})^{}", i, m, k)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// All monomials of degree `d` in the nonzero components, with their values.
pub fn monomials(sol: &Solution, d: u32) -> Vec<(Monomial, ForestSum)> {
    let mut gens = Vec::new();
    for i in 1..=sol.nvars() {
        for m in 1..=d.min(sol.bound()) {
            if !sol.component(i, m).is_zero() {
                gens.push((i, m));
            }
        }
    }
    let weights: Vec<u32> = gens.iter().map(|g| g.1).collect();
    weighted_multisets(&weights, d)
        .into_iter()
        .map(|ms| {
            let mono = Monomial(ms.into_iter().map(|k| gens[k]).collect());
            let value = mono.eval(sol);
            (mono, value)
        })
        .collect()
}

/// Number of degree-`d` monomials and the rank of their values; equal
/// counts mean the components are algebraically independent in degree `d`.
pub fn monomial_rank(sol: &Solution, d: u32) -> (usize, usize) {
    let monos = monomials(sol, d);
    let span = Span::from_generators(monos.iter().map(|(_, v)| v.terms()));
    (monos.len(), span.rank())
}

/// A functional `left ⊗ right` that vanishes on the tensor product of the
/// monomial spans but not on a bidegree component of `Δ(x_i(n))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub eq: usize,
    pub degree: u32,
    pub left_degree: u32,
    pub left: SparseVec<Forest>,
    pub right: SparseVec<Forest>,
    pub value: Q,
}

impl Certificate {
    pub fn right_degree(&self) -> u32 {
        self.degree - self.left_degree
    }

    /// `(left ⊗ right)` applied to a tensor.
    pub fn evaluate(&self, tensor: &TensorSum) -> Q {
        let mut acc = Q::zero();
        for ((f, g), c) in tensor.iter() {
            if let (Some(a), Some(b)) = (self.left.get(f), self.right.get(g)) {
                acc += c * a * b;
            }
        }
        acc
    }

    /// Rechecks the certificate from scratch against a solution.
    pub fn verify(&self, sol: &Solution) -> bool {
        if self.eq == 0
            || self.eq > sol.nvars()
            || self.degree > sol.bound()
            || self.left_degree == 0
            || self.left_degree >= self.degree
        {
            return false;
        }
        let comp = coproduct(sol.component(self.eq, self.degree))
            .bidegree_part(self.left_degree, self.right_degree());
        let value = self.evaluate(&comp);
        if value.is_zero() || value != self.value {
            return false;
        }
        let kills = |phi: &SparseVec<Forest>, d: u32| {
            monomials(sol, d)
                .iter()
                .all(|(_, v)| apply(phi, v.terms()).is_zero())
        };
        kills(&self.left, self.left_degree) || kills(&self.right, self.right_degree())
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &SparseVec<Forest>| {
            v.iter()
                .map(|(k, c)| format!("{} * {}", rational::format(c), k))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        write!(
            f,
            "eq={} degree={} bidegree=({},{}) value={} left=[{}] right=[{}]",
            self.eq,
            self.degree,
            self.left_degree,
            self.right_degree(),
            rational::format(&self.value),
            show(&self.left),
            show(&self.right)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HopfVerdict {
    HopfUpTo(u32),
    Counterexample(Box<Certificate>),
}

impl HopfVerdict {
    pub fn is_hopf(&self) -> bool {
        matches!(self, HopfVerdict::HopfUpTo(_))
    }
}

/// Splits a tensor into its columns (left vectors per right forest) and
/// rows (right vectors per left forest).
type Slices = BTreeMap<Forest, SparseVec<Forest>>;

fn slices(t: &TensorSum) -> (Slices, Slices) {
    let mut cols: Slices = BTreeMap::new();
    let mut rows: Slices = BTreeMap::new();
    for ((f, g), c) in t.iter() {
        cols.entry(g.clone()).or_default().insert(f.clone(), c.clone());
        rows.entry(f.clone()).or_default().insert(g.clone(), c.clone());
    }
    (cols, rows)
}

fn span_of(sol: &Solution, d: u32) -> Span<Forest> {
    let monos = monomials(sol, d);
    Span::from_generators(monos.iter().map(|(_, v)| v.terms()))
}

fn delta(f: &Forest) -> SparseVec<Forest> {
    let mut v = SparseVec::new();
    v.insert(f.clone(), Q::one());
    v
}

/// Tests whether each `(k, n-k)` component of `Δ(x_i(n))` lies in the span of
/// `u ⊗ v` with `u`, `v` monomials in the components. A tensor lies in
/// `U ⊗ V` exactly when all its columns lie in `U` and all its rows in `V`.
pub fn check_hopf(sol: &Solution) -> HopfVerdict {
    let bound = sol.bound();
    let spans: Vec<Span<Forest>> = (0..bound).map(|d| span_of(sol, d)).collect();
    for n in 2..=bound {
        for i in 1..=sol.nvars() {
            let x = sol.component(i, n);
            if x.is_zero() {
                continue;
            }
            let full = coproduct(x);
            for k in 1..n {
                let part = full.bidegree_part(k, n - k);
                if let Some(cert) = bidegree_failure(i, n, k, &part, &spans) {
                    return HopfVerdict::Counterexample(Box::new(cert));
                }
            }
        }
    }
    HopfVerdict::HopfUpTo(bound)
}

fn bidegree_failure(
    i: usize,
    n: u32,
    k: u32,
    part: &TensorSum,
    spans: &[Span<Forest>],
) -> Option<Certificate> {
    let (cols, rows) = slices(part);
    let make = |left: SparseVec<Forest>, right: SparseVec<Forest>| {
        let mut cert = Certificate {
            eq: i,
            degree: n,
            left_degree: k,
            left,
            right,
            value: Q::zero(),
        };
        cert.value = cert.evaluate(part);
        cert
    };
    let u = &spans[k as usize];
    for (g, col) in &cols {
        if let Some(phi) = u.separating_functional(col) {
            return Some(make(phi, delta(g)));
        }
    }
    let v = &spans[(n - k) as usize];
    for (f, row) in &rows {
        if let Some(psi) = v.separating_functional(row) {
            return Some(make(delta(f), psi));
        }
    }
    None
}

/// Generators of a span that are independent, greedily from the front.
fn independent(monos: Vec<(Monomial, ForestSum)>) -> (Vec<Monomial>, Span<Forest>) {
    let mut span = Span::new();
    let mut kept = Vec::new();
    for (m, v) in monos {
        let mut probe = span.clone();
        if probe.push(v.terms()) {
            span = probe;
            kept.push(m);
        }
    }
    (kept, span)
}

/// Writes the `(k, n-k)` component of `Δ(x_i(n))` as `∑ c u⊗v` over
/// independent monomials, or `None` when it is not in their span.
pub fn coproduct_in_monomial_basis(
    sol: &Solution,
    i: usize,
    n: u32,
    k: u32,
) -> Option<Vec<(Monomial, Monomial, Q)>> {
    let part = coproduct(sol.component(i, n)).bidegree_part(k, n - k);
    let (left, lspan) = independent(monomials(sol, k));
    let (right, rspan) = independent(monomials(sol, n - k));
    let (cols, _) = slices(&part);
    // d[a][G]: coordinate of column G on left basis element a.
    let mut d: Vec<SparseVec<Forest>> = vec![SparseVec::new(); left.len()];
    for (g, col) in &cols {
        let coords = lspan.coordinates(col)?;
        for (a, c) in coords.into_iter().enumerate() {
            if !c.is_zero() {
                d[a].insert(g.clone(), c);
            }
        }
    }
    let mut out = Vec::new();
    for (a, row) in d.iter().enumerate() {
        if row.is_empty() {
            continue;
        }
        let coords = rspan.coordinates(row)?;
        for (b, c) in coords.into_iter().enumerate() {
            if !c.is_zero() {
                out.push((left[a].clone(), right[b].clone(), c));
            }
        }
    }
    Some(out)
}
