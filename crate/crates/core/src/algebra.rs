//! The Connes-Kreimer Hopf algebra of decorated rooted forests: linear
//! combinations, the forest product, the admissible-cut coproduct, the
//! grafting operators `B_d` and the symmetry pairing with the dual.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::forest::{parse_forest_prefix, Decoration, Forest, Tree};
use crate::rational::{self, Q};

/// Finite rational combination of forests. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ForestSum {
    terms: BTreeMap<Forest, Q>,
}

impl ForestSum {
    pub fn zero() -> Self {
        ForestSum::default()
    }

    pub fn one() -> Self {
        ForestSum::from(Forest::unit())
    }

    pub fn term(f: Forest, c: Q) -> Self {
        let mut s = ForestSum::zero();
        s.add_term(f, c);
        s
    }

    pub fn tree(t: Tree) -> Self {
        ForestSum::from(Forest::single(t))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Forest, &Q)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> &BTreeMap<Forest, Q> {
        &self.terms
    }

    pub fn coeff(&self, f: &Forest) -> Q {
        self.terms.get(f).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff_of_tree(&self, t: &Tree) -> Q {
        self.coeff(&Forest::single(t.clone()))
    }

    pub fn add_term(&mut self, f: Forest, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(f) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &ForestSum, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (f, v) in &other.terms {
            self.add_term(f.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Q) -> ForestSum {
        let mut out = ForestSum::zero();
        out.add_scaled(self, c);
        out
    }

    /// Restriction to forests of degree `n`.
    pub fn homogeneous_part(&self, n: u32) -> ForestSum {
        ForestSum {
            terms: self
                .terms
                .iter()
                .filter(|(f, _)| f.degree() == n)
                .map(|(f, c)| (f.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops every forest of degree above `n`.
    pub fn truncate(&self, n: u32) -> ForestSum {
        ForestSum {
            terms: self
                .terms
                .iter()
                .filter(|(f, _)| f.degree() <= n)
                .map(|(f, c)| (f.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Forest::unit())
    }

    /// Lowest degree present, `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(Forest::degree).min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(Forest::degree).max()
    }

    /// Product truncated to forests of degree at most `n`.
    pub fn mul_truncated(&self, other: &ForestSum, n: u32) -> ForestSum {
        let mut out = ForestSum::zero();
        for (f, a) in &self.terms {
            if f.degree() > n {
                continue;
            }
            for (g, b) in &other.terms {
                if f.degree() + g.degree() > n {
                    continue;
                }
                out.add_term(f.union(g), a * b);
            }
        }
        out
    }

    pub fn multiply(&self, other: &ForestSum) -> ForestSum {
        let mut out = ForestSum::zero();
        for (f, a) in &self.terms {
            for (g, b) in &other.terms {
                out.add_term(f.union(g), a * b);
            }
        }
        out
    }

    /// Power truncated at degree `n`.
    pub fn pow_truncated(&self, e: u32, n: u32) -> ForestSum {
        let mut acc = ForestSum::one();
        for _ in 0..e {
            acc = acc.mul_truncated(self, n);
        }
        acc
    }

    /// Counit: the coefficient of the empty forest.
    pub fn counit(&self) -> Q {
        self.constant_term()
    }

    /// Parses the `coeff * forest + ...` syntax; `0` is the zero sum.
    pub fn parse(text: &str) -> Result<ForestSum> {
        let text = text.trim();
        let mut out = ForestSum::zero();
        if text == "0" {
            return Ok(out);
        }
        let syntax = |msg: &str| Error::Syntax {
            line: 1,
            column: 1,
            message: msg.to_string(),
        };
        for piece in text.split(" + ") {
            let (coeff, forest) = piece
                .split_once(" * ")
                .ok_or_else(|| syntax("expected 'coeff * forest'"))?;
            let c = rational::parse(coeff).ok_or_else(|| syntax("bad coefficient"))?;
            let (f, rest) = parse_forest_prefix(forest)?;
            if !rest.trim().is_empty() {
                return Err(syntax("trailing input after forest"));
            }
            out.add_term(f, c);
        }
        Ok(out)
    }
}

impl From<Forest> for ForestSum {
    fn from(f: Forest) -> Self {
        ForestSum::term(f, Q::one())
    }
}

impl From<Tree> for ForestSum {
    fn from(t: Tree) -> Self {
        ForestSum::tree(t)
    }
}

impl fmt::Display for ForestSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (forest, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{} * {}", rational::format(c), forest)?;
        }
        Ok(())
    }
}

impl Add for &ForestSum {
    type Output = ForestSum;
    fn add(self, rhs: &ForestSum) -> ForestSum {
        let mut out = self.clone();
        out.add_scaled(rhs, &Q::one());
        out
    }
}

impl Sub for &ForestSum {
    type Output = ForestSum;
    fn sub(self, rhs: &ForestSum) -> ForestSum {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl Neg for &ForestSum {
    type Output = ForestSum;
    fn neg(self) -> ForestSum {
        self.scale(&-Q::one())
    }
}

impl Mul for &ForestSum {
    type Output = ForestSum;
    fn mul(self, rhs: &ForestSum) -> ForestSum {
        self.multiply(rhs)
    }
}

/// Finite rational combination of `F ⊗ G`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TensorSum {
    terms: BTreeMap<(Forest, Forest), Q>,
}

impl TensorSum {
    pub fn zero() -> Self {
        TensorSum::default()
    }

    pub fn one() -> Self {
        TensorSum::pure(Forest::unit(), Forest::unit(), Q::one())
    }

    pub fn pure(left: Forest, right: Forest, c: Q) -> Self {
        let mut t = TensorSum::zero();
        t.add_term(left, right, c);
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Forest, Forest), &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, left: &Forest, right: &Forest) -> Q {
        self.terms
            .get(&(left.clone(), right.clone()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, left: Forest, right: Forest, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((left, right)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &TensorSum, c: &Q) {
        if c.is_zero() {
            return;
        }
        for ((l, r), v) in &other.terms {
            self.add_term(l.clone(), r.clone(), v * c);
        }
    }

    /// Componentwise product `(a⊗b)(c⊗d) = ac⊗bd`.
    pub fn multiply(&self, other: &TensorSum) -> TensorSum {
        let mut out = TensorSum::zero();
        for ((l1, r1), a) in &self.terms {
            for ((l2, r2), b) in &other.terms {
                out.add_term(l1.union(l2), r1.union(r2), a * b);
            }
        }
        out
    }

    /// Terms of bidegree `(k, l)`.
    pub fn bidegree_part(&self, k: u32, l: u32) -> TensorSum {
        TensorSum {
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| a.degree() == k && b.degree() == l)
                .map(|(key, c)| (key.clone(), c.clone()))
                .collect(),
        }
    }

    /// `∑ c a⊗b ↦ ∑ c ε(a) b`.
    pub fn counit_left(&self) -> ForestSum {
        let mut out = ForestSum::zero();
        for ((l, r), c) in &self.terms {
            if l.is_unit() {
                out.add_term(r.clone(), c.clone());
            }
        }
        out
    }

    /// `∑ c a⊗b ↦ ∑ c a ε(b)`.
    pub fn counit_right(&self) -> ForestSum {
        let mut out = ForestSum::zero();
        for ((l, r), c) in &self.terms {
            if r.is_unit() {
                out.add_term(l.clone(), c.clone());
            }
        }
        out
    }

    /// Applies a linear map to the left factor.
    pub fn map_left(&self, f: impl Fn(&Forest) -> ForestSum) -> TensorSum {
        let mut out = TensorSum::zero();
        for ((l, r), c) in &self.terms {
            for (l2, c2) in f(l).iter() {
                out.add_term(l2.clone(), r.clone(), c * c2);
            }
        }
        out
    }

    /// Applies a linear map to the right factor.
    pub fn map_right(&self, f: impl Fn(&Forest) -> ForestSum) -> TensorSum {
        let mut out = TensorSum::zero();
        for ((l, r), c) in &self.terms {
            for (r2, c2) in f(r).iter() {
                out.add_term(l.clone(), r2.clone(), c * c2);
            }
        }
        out
    }
}

impl fmt::Display for TensorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((l, r), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{} * {} ⊗ {}", rational::format(c), l, r)?;
        }
        Ok(())
    }
}

/// Every way to cut `t` admissibly, including the empty cut, as
/// (pruned trees, remaining root tree). Each child edge is either cut, or
/// kept with an admissible cut chosen inside the child.
pub fn cut_options(t: &Tree) -> Vec<(Vec<Tree>, Tree)> {
    let mut partial: Vec<(Vec<Tree>, Vec<Tree>)> = vec![(Vec::new(), Vec::new())];
    for child in t.children() {
        let inner = cut_options(child);
        let mut next = Vec::with_capacity(partial.len() * (inner.len() + 1));
        for (pruned, kept) in &partial {
            let mut p = pruned.clone();
            p.push(child.clone());
            next.push((p, kept.clone()));
            for (ip, ir) in &inner {
                let mut p = pruned.clone();
                p.extend(ip.iter().cloned());
                let mut k = kept.clone();
                k.push(ir.clone());
                next.push((p, k));
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|(pruned, kept)| (pruned, Tree::new(t.root(), kept)))
        .collect()
}

/// `Δ(t) = t⊗1 + 1⊗t + ∑_c P^c(t)⊗R^c(t)`.
pub fn coproduct_tree(t: &Tree) -> TensorSum {
    let mut out = TensorSum::pure(Forest::single(t.clone()), Forest::unit(), Q::one());
    for (pruned, root) in cut_options(t) {
        out.add_term(Forest::new(pruned), Forest::single(root), Q::one());
    }
    out
}

/// Multiplicative extension of the tree coproduct.
pub fn coproduct_forest(f: &Forest) -> TensorSum {
    let mut acc = TensorSum::one();
    for t in f.trees() {
        acc = acc.multiply(&coproduct_tree(t));
    }
    acc
}

/// Linear extension of the coproduct.
pub fn coproduct(x: &ForestSum) -> TensorSum {
    let mut out = TensorSum::zero();
    for (f, c) in x.iter() {
        out.add_scaled(&coproduct_forest(f), c);
    }
    out
}

/// The grafting operator `B_d`, linear; sends a forest to the tree with
/// root `d` whose children are the forest's trees.
pub fn graft_operator(d: Decoration, x: &ForestSum) -> ForestSum {
    let mut out = ForestSum::zero();
    for (f, c) in x.iter() {
        out.add_term(
            Forest::single(Tree::new(d, f.trees().to_vec())),
            c.clone(),
        );
    }
    out
}

/// `⟨F, G⟩ = s_F δ_{F,G}`.
pub fn pairing(f: &Forest, g: &Forest) -> Q {
    if f == g {
        Q::from_integer(f.symmetry_factor())
    } else {
        Q::zero()
    }
}

/// Bilinear extension of [`pairing`].
pub fn pairing_sums(a: &ForestSum, b: &ForestSum) -> Q {
    let mut acc = Q::zero();
    for (f, c) in a.iter() {
        let d = b.coeff(f);
        if !d.is_zero() {
            acc += c * d * Q::from_integer(f.symmetry_factor());
        }
    }
    acc
}

/// Homogeneous component of degree `n`.
pub fn homogeneous_part(x: &ForestSum, n: u32) -> ForestSum {
    x.homogeneous_part(n)
}
