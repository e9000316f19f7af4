use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use super::{Sdse, Solution};
use crate::algebra::coproduct;
use crate::combinat::exponent_vectors;
use crate::error::{Error, Result};
use crate::forest::{Catalog, Decoration, Forest, RawTree, Tree};
use crate::rational::{self, int, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaEntry {
    Value(Q),
    /// The ratio differs between witness trees, or a tree outside the
    /// support is reached by a cut.
    Inconsistent,
    /// No tree of that degree has a nonzero coefficient.
    Vacuous,
}

impl fmt::Display for LambdaEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaEntry::Value(q) => write!(f, "{}", rational::format(q)),
            LambdaEntry::Inconsistent => write!(f, "inconsistent"),
            LambdaEntry::Vacuous => write!(f, "vacuous"),
        }
    }
}

/// `λ_n^{(i,(i',q))}` keyed by `(i, (i',q), n)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LambdaTable {
    pub entries: BTreeMap<(usize, Decoration, u32), LambdaEntry>,
}

/// `λ_n = first + slope·(n-1)` over the defined entries of one key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineFit {
    pub first: Q,
    pub slope: Q,
    /// Whether every defined value lies on the line.
    pub exact: bool,
    pub points: usize,
}

impl AffineFit {
    /// `(α, β)` with `λ_n = α(1 + (1+β)(n-1))`, when `α ≠ 0`.
    pub fn alpha_beta(&self) -> Option<(Q, Q)> {
        if self.first.is_zero() {
            return None;
        }
        let beta = &self.slope / &self.first - int(1);
        Some((self.first.clone(), beta))
    }
}

impl LambdaTable {
    pub fn get(&self, i: usize, d: Decoration, n: u32) -> Option<&LambdaEntry> {
        self.entries.get(&(i, d, n))
    }

    /// The defined value, if any.
    pub fn value(&self, i: usize, d: Decoration, n: u32) -> Option<&Q> {
        match self.get(i, d, n) {
            Some(LambdaEntry::Value(q)) => Some(q),
            _ => None,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.entries.values().all(|e| *e != LambdaEntry::Inconsistent)
    }

    pub fn keys(&self) -> BTreeSet<(usize, Decoration)> {
        self.entries.keys().map(|&(i, d, _)| (i, d)).collect()
    }

    /// Affine fit through the first two defined values of `(i, d)`.
    pub fn fit(&self, i: usize, d: Decoration) -> Option<AffineFit> {
        let pts: Vec<(u32, &Q)> = self
            .entries
            .iter()
            .filter(|((a, b, _), _)| *a == i && *b == d)
            .filter_map(|((_, _, n), e)| match e {
                LambdaEntry::Value(q) => Some((*n, q)),
                _ => None,
            })
            .collect();
        let (n0, v0) = *pts.first()?;
        let slope = match pts.get(1) {
            Some(&(n1, v1)) => (v1 - v0) / int(n1 as i64 - n0 as i64),
            None => Q::zero(),
        };
        let first = v0 - &slope * int(n0 as i64 - 1);
        let exact = pts
            .iter()
            .all(|&(n, v)| &(&first + &slope * int(n as i64 - 1)) == v);
        Some(AffineFit {
            first,
            slope,
            exact,
            points: pts.len(),
        })
    }
}

impl fmt::Display for LambdaTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((i, d, n), e) in &self.entries {
            writeln!(f, "lambda[{}; {}; n={}] = {}", i, d, n, e)?;
        }
        Ok(())
    }
}

fn leaf_labels(system: &Sdse, bound: u32) -> Vec<Decoration> {
    (1..=system.nvars)
        .flat_map(|j| {
            system
                .degrees(j, bound)
                .into_iter()
                .map(move |q| Decoration::new(j as u32, q))
        })
        .collect()
}

fn classify(sol: &Solution, i: usize, n: u32, r: &BTreeMap<Tree, Q>) -> LambdaEntry {
    let mut ratio: Option<Q> = None;
    for (forest, a) in sol.component(i, n).iter() {
        let t = forest.as_tree().expect("components are linear in trees");
        let v = r.get(t).cloned().unwrap_or_else(Q::zero) / a;
        match &ratio {
            None => ratio = Some(v),
            Some(prev) if *prev != v => return LambdaEntry::Inconsistent,
            _ => {}
        }
    }
    let outside = r
        .iter()
        .any(|(t, c)| !c.is_zero() && sol.coefficient(t).is_zero());
    match ratio {
        _ if outside => LambdaEntry::Inconsistent,
        Some(v) => LambdaEntry::Value(v),
        None => LambdaEntry::Vacuous,
    }
}

/// Reads `R(t)`, the coefficient of `•_{(i',q)} ⊗ t` in `Δ(x_i(n+q))`, and
/// divides by `a_t`, for all `n + q ≤ bound`.
pub fn extract_lambda(system: &Sdse, sol: &Solution) -> LambdaTable {
    let bound = sol.bound();
    let labels = leaf_labels(system, bound);
    let mut table = LambdaTable::default();
    for i in 1..=sol.nvars() {
        for m in 2..=bound {
            let delta = coproduct(sol.component(i, m));
            for &d in labels.iter().filter(|d| d.degree < m) {
                let left = Forest::single(Tree::leaf(d));
                let n = m - d.degree;
                let mut r: BTreeMap<Tree, Q> = BTreeMap::new();
                for ((f, g), c) in delta.iter() {
                    if *f == left {
                        if let Some(t) = g.as_tree() {
                            r.insert(t.clone(), c.clone());
                        }
                    }
                }
                table.entries.insert((i, d, n), classify(sol, i, n, &r));
            }
        }
    }
    table
}

/// Removes the leaf at `path`, which must not be the root.
fn remove_leaf(t: &RawTree, path: &[usize]) -> RawTree {
    let mut out = t.clone();
    let (last, parent) = path.split_last().expect("not the root");
    out.vertex_mut(parent).children.remove(*last);
    out
}

/// Same table computed from the definition: graft `•_{(i',q)}` at every vertex
/// of every tree `t`, deduplicate, and count the leaves of each result whose
/// removal gives back `t`.
pub fn lambda_oracle(system: &Sdse, sol: &Solution) -> LambdaTable {
    let bound = sol.bound();
    let labels = leaf_labels(system, bound);
    let catalog = Catalog::new(&labels, bound.saturating_sub(1));
    let mut table = LambdaTable::default();
    for i in 1..=sol.nvars() {
        for &d in &labels {
            for n in 1..=bound.saturating_sub(d.degree) {
                let mut r: BTreeMap<Tree, Q> = BTreeMap::new();
                for t in catalog.trees_of_degree(n) {
                    if t.root().eq as usize != i {
                        continue;
                    }
                    let raw = t.to_raw();
                    let mut grown: BTreeSet<Tree> = BTreeSet::new();
                    for path in raw.vertex_paths() {
                        let mut g = raw.clone();
                        g.vertex_mut(&path).children.push(RawTree::leaf(d));
                        grown.insert(g.canonical());
                    }
                    let mut total = Q::zero();
                    for big in grown {
                        let braw = big.to_raw();
                        let count = braw
                            .vertex_paths()
                            .into_iter()
                            .filter(|p| {
                                let v = braw.vertex(p);
                                !p.is_empty()
                                    && v.children.is_empty()
                                    && v.root == d
                                    && remove_leaf(&braw, p).canonical() == *t
                            })
                            .count();
                        total += sol.coefficient(&big) * int(count as i64);
                    }
                    if !total.is_zero() {
                        r.insert(t.clone(), total);
                    }
                }
                table.entries.insert((i, d, n), classify(sol, i, n, &r));
            }
        }
    }
    table
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma7Violation {
    pub eq: usize,
    pub degree: u32,
    pub var: usize,
    pub exponents: Vec<u32>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Lemma7Report {
    pub checked: usize,
    pub violations: Vec<Lemma7Violation>,
}

impl Lemma7Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `(p_j+1) a^{(i,q)}_{p+e_j} = (λ^{(i,(j,1))}_{|p|+q} - ∑_l a_j^{(l,1)} p_l) a^{(i,q)}_p`
/// for `|p| + q + 1 ≤ bound`.
pub fn verify_lemma7(system: &Sdse, sol: &Solution, table: &LambdaTable) -> Result<Lemma7Report> {
    if !system.has_degree_one_everywhere() {
        return Err(Error::NotApplicable(
            "some equation has no operator of degree 1".into(),
        ));
    }
    let bound = sol.bound();
    let nvars = system.nvars;
    let inst = system.instantiate(bound)?;
    // a_j^{(l,1)}
    let lin: Vec<Vec<Q>> = (1..=nvars)
        .map(|l| {
            let f = inst.series(l, 1).expect("degree-1 operator");
            (1..=nvars)
                .map(|j| if f.trunc() >= 1 { f.linear_coeff(j) } else { Q::zero() })
                .collect()
        })
        .collect();
    let mut report = Lemma7Report::default();
    for i in 1..=nvars {
        for (q, f) in inst.ops(i) {
            if q + 1 > bound {
                continue;
            }
            for p in exponent_vectors(nvars, bound - q - 1) {
                let total: u32 = p.iter().sum();
                let ap = f.coeff(&p);
                for j in 1..=nvars {
                    let mut next = p.clone();
                    next[j - 1] += 1;
                    let lhs = f.coeff(&next) * int(p[j - 1] as i64 + 1);
                    report.checked += 1;
                    let violation = |detail: String| Lemma7Violation {
                        eq: i,
                        degree: *q,
                        var: j,
                        exponents: p.clone(),
                        detail,
                    };
                    if ap.is_zero() {
                        if !lhs.is_zero() {
                            report
                                .violations
                                .push(violation("a_p = 0 but a_{p+e_j} ≠ 0".into()));
                        }
                        continue;
                    }
                    let d = Decoration::new(j as u32, 1);
                    let lambda = match table.get(i, d, total + q) {
                        Some(LambdaEntry::Value(v)) => v.clone(),
                        other => {
                            let what = other.map(|e| e.to_string()).unwrap_or("missing".into());
                            report.violations.push(violation(format!("λ is {}", what)));
                            continue;
                        }
                    };
                    let mut shift = Q::zero();
                    for (l, &pl) in p.iter().enumerate() {
                        shift += &lin[l][j - 1] * int(pl as i64);
                    }
                    let rhs = (lambda - shift) * &ap;
                    if lhs != rhs {
                        report.violations.push(violation(format!(
                            "{} ≠ {}",
                            rational::format(&lhs),
                            rational::format(&rhs)
                        )));
                    }
                }
            }
        }
    }
    Ok(report)
}
