//! The dual side: grafting pre-Lie products, their Oudom-Guin extension to
//! symmetric algebras, the Grossman-Larson product, the Faà di Bruno pre-Lie
//! family and the morphism from trees onto it.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::algebra::ForestSum;
use crate::combinat::runs;
use crate::forest::{Catalog, Decoration, Forest, RawTree, Tree};
use crate::rational::{factorial_q, int, Q};
use crate::solver::{coproduct_in_monomial_basis, Monomial, Solution};

/// A pre-Lie algebra given on a basis.
pub trait PreLie {
    type Basis: Ord + Clone;
    fn product(&self, x: &Self::Basis, y: &Self::Basis) -> Vec<(Self::Basis, Q)>;
}

/// Elements of the symmetric algebra: sorted words with coefficients.
pub type Sym<B> = BTreeMap<Vec<B>, Q>;

fn sym_add<B: Ord + Clone>(acc: &mut Sym<B>, mut word: Vec<B>, c: Q) {
    if c.is_zero() {
        return;
    }
    word.sort();
    let e = acc.entry(word.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&word);
    }
}

/// Splits the positions of `a` into every (chosen, rest) pair.
fn deshuffle<B: Clone>(a: &[B]) -> Vec<(Vec<B>, Vec<B>)> {
    let n = a.len();
    (0u32..1 << n)
        .map(|mask| {
            let mut chosen = Vec::new();
            let mut rest = Vec::new();
            for (k, x) in a.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    chosen.push(x.clone());
                } else {
                    rest.push(x.clone());
                }
            }
            (chosen, rest)
        })
        .collect()
}

type Memo<B> = BTreeMap<(Vec<B>, Vec<B>), Sym<B>>;

/// The extension of a pre-Lie product to `S(g)`:
/// `a∘1 = ε(a)`, `1∘b = b`, `(xa)∘b = x∘(a∘b) - (x∘a)∘b`,
/// `a∘(bc) = ∑ (a'∘b)(a''∘c)`.
pub struct OudomGuin<'a, P: PreLie> {
    alg: &'a P,
    memo: RefCell<Memo<P::Basis>>,
}

impl<'a, P: PreLie> OudomGuin<'a, P> {
    pub fn new(alg: &'a P) -> Self {
        OudomGuin {
            alg,
            memo: RefCell::new(BTreeMap::new()),
        }
    }

    /// `a ∘ b` on words (sorted or not).
    pub fn circ(&self, a: &[P::Basis], b: &[P::Basis]) -> Sym<P::Basis> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort();
        b.sort();
        let key = (a, b);
        if let Some(hit) = self.memo.borrow().get(&key) {
            return hit.clone();
        }
        let out = self.compute(&key.0, &key.1);
        self.memo.borrow_mut().insert(key, out.clone());
        out
    }

    fn compute(&self, a: &[P::Basis], b: &[P::Basis]) -> Sym<P::Basis> {
        let mut out = Sym::new();
        if a.is_empty() {
            sym_add(&mut out, b.to_vec(), Q::one());
            return out;
        }
        if b.is_empty() {
            return out;
        }
        if b.len() >= 2 {
            let (head, tail) = b.split_at(1);
            for (chosen, rest) in deshuffle(a) {
                let left = self.circ(&chosen, head);
                if left.is_empty() {
                    continue;
                }
                let right = self.circ(&rest, tail);
                for (w1, c1) in &left {
                    for (w2, c2) in &right {
                        let mut w = w1.clone();
                        w.extend(w2.iter().cloned());
                        sym_add(&mut out, w, c1 * c2);
                    }
                }
            }
            return out;
        }
        if a.len() == 1 {
            for (z, c) in self.alg.product(&a[0], &b[0]) {
                sym_add(&mut out, vec![z], c);
            }
            return out;
        }
        let (x, rest) = a.split_at(1);
        for (w, c) in self.circ(rest, b) {
            for (w2, c2) in self.circ(x, &w) {
                sym_add(&mut out, w2, &c * c2);
            }
        }
        for (w, c) in self.circ(x, rest) {
            for (w2, c2) in self.circ(&w, b) {
                sym_add(&mut out, w2, -(&c * c2));
            }
        }
        out
    }
}

/// The free pre-Lie algebra on decorated trees.
pub struct Grafting;

impl PreLie for Grafting {
    type Basis = Tree;
    fn product(&self, x: &Tree, y: &Tree) -> Vec<(Tree, Q)> {
        graft(x, y)
            .iter()
            .map(|(f, c)| (f.as_tree().expect("single tree").clone(), c.clone()))
            .collect()
    }
}

/// `t ∘ u`: the sum over vertices `v` of `u` of `u` with `t` attached below `v`.
pub fn graft(t: &Tree, u: &Tree) -> ForestSum {
    let raw = u.to_raw();
    let piece = t.to_raw();
    let mut out = ForestSum::zero();
    for path in raw.vertex_paths() {
        let mut g = raw.clone();
        g.vertex_mut(&path).children.push(piece.clone());
        out.add_term(Forest::single(g.canonical()), Q::one());
    }
    out
}

fn sym_to_sum(s: Sym<Tree>) -> ForestSum {
    let mut out = ForestSum::zero();
    for (w, c) in s {
        out.add_term(Forest::new(w), c);
    }
    out
}

/// `F ∘ G` in closed form: every way of sending each tree of `F` to a vertex
/// of `G`, grafted simultaneously.
pub fn circ(f: &Forest, g: &Forest) -> ForestSum {
    let mut out = ForestSum::zero();
    let raws: Vec<RawTree> = g.trees().iter().map(Tree::to_raw).collect();
    let vertices: Vec<(usize, Vec<usize>)> = raws
        .iter()
        .enumerate()
        .flat_map(|(k, r)| r.vertex_paths().into_iter().map(move |p| (k, p)))
        .collect();
    let pieces: Vec<RawTree> = f.trees().iter().map(Tree::to_raw).collect();
    let n = pieces.len();
    if n == 0 {
        out.add_term(g.clone(), Q::one());
        return out;
    }
    if vertices.is_empty() {
        return out;
    }
    let mut choice = vec![0usize; n];
    loop {
        let mut grown = raws.clone();
        for (piece, &v) in pieces.iter().zip(&choice) {
            let (k, path) = &vertices[v];
            grown[*k].vertex_mut(path).children.push(piece.clone());
        }
        out.add_term(Forest::new(grown.iter().map(RawTree::canonical).collect()), Q::one());
        let mut pos = 0;
        loop {
            if pos == n {
                return out;
            }
            choice[pos] += 1;
            if choice[pos] < vertices.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// `F ∘ G` through the recursive extension of the grafting product.
pub fn circ_recursive(f: &Forest, g: &Forest) -> ForestSum {
    sym_to_sum(OudomGuin::new(&Grafting).circ(f.trees(), g.trees()))
}

/// Grossman-Larson product: every subset of the trees of `F` is grafted into
/// `G`, the others multiplied alongside.
pub fn star(f: &Forest, g: &Forest) -> ForestSum {
    let mut out = ForestSum::zero();
    for (chosen, rest) in deshuffle(f.trees()) {
        let rest = ForestSum::from(Forest::new(rest));
        out.add_scaled(&rest.multiply(&circ(&Forest::new(chosen), g)), &Q::one());
    }
    out
}

/// `a ⋆ b = ∑ a'(a''∘b)` with the recursive `∘`.
pub fn star_sweedler(f: &Forest, g: &Forest) -> ForestSum {
    let og = OudomGuin::new(&Grafting);
    let mut out = ForestSum::zero();
    for (a1, a2) in deshuffle(f.trees()) {
        let left = ForestSum::from(Forest::new(a1));
        out.add_scaled(&left.multiply(&sym_to_sum(og.circ(&a2, g.trees()))), &Q::one());
    }
    out
}

/// Bilinear `⋆` on sums.
pub fn star_sums(a: &ForestSum, b: &ForestSum) -> ForestSum {
    let mut out = ForestSum::zero();
    for (f, c) in a.iter() {
        for (g, d) in b.iter() {
            out.add_scaled(&star(f, g), &(c * d));
        }
    }
    out
}

/// The Faà di Bruno pre-Lie algebra `e_i ∘ e_j = (λj - μ) e_{i+j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FdB {
    pub lambda: Q,
    pub mu: Q,
}

/// Words in the `e_i`, as sorted index lists.
pub type FdbWord = Sym<u32>;

impl PreLie for FdB {
    type Basis = u32;
    fn product(&self, i: &u32, j: &u32) -> Vec<(u32, Q)> {
        vec![(i + j, &self.lambda * int(*j as i64) - &self.mu)]
    }
}

impl FdB {
    pub fn new(lambda: Q, mu: Q) -> FdB {
        FdB { lambda, mu }
    }

    /// `P_m(j) = (λj - μ)(λj)(λj + μ)…(λj + (m-2)μ)`, with `P_0 = 1`.
    pub fn p(&self, m: usize, j: u32) -> Q {
        let lj = &self.lambda * int(j as i64);
        (0..m).fold(Q::one(), |acc, k| {
            acc * (&lj + &self.mu * int(k as i64 - 1))
        })
    }

    /// `(e_{i_1}…e_{i_m}) ∘ e_j` in closed form.
    pub fn circ_generator(&self, word: &[u32], j: u32) -> (Q, u32) {
        (self.p(word.len(), j), word.iter().sum::<u32>() + j)
    }

    /// `∘` on `S(g_FdB)` through the recursive extension.
    pub fn circ(&self, a: &FdbWord, b: &FdbWord) -> FdbWord {
        let og = OudomGuin::new(self);
        let mut out = FdbWord::new();
        for (w1, c1) in a {
            for (w2, c2) in b {
                for (w, c) in og.circ(w1, w2) {
                    sym_add(&mut out, w, c * c1 * c2);
                }
            }
        }
        out
    }

    /// `[e_i, e_j] = e_i∘e_j - e_j∘e_i`, as a coefficient of `e_{i+j}`.
    pub fn bracket(&self, i: u32, j: u32) -> Q {
        let c = |x: u32, y: u32| self.product(&x, &y)[0].1.clone();
        c(i, j) - c(j, i)
    }

    /// `μ_t` with `φ(t) = μ_t e_{|t|}`: `μ_{•_j} = 1`, and for
    /// `t = B_j(t_1…t_m)`, `μ_t = μ_{t_1}…μ_{t_m} P_m(j)`.
    pub fn mu_t(&self, t: &Tree) -> Q {
        let own = self.p(t.children().len(), t.root().degree);
        t.children().iter().fold(own, |acc, c| acc * self.mu_t(c))
    }

    /// `ν_t = μ_t / s_t` by its own recursion:
    /// `ν_t = P_m(j)/(p_1!…p_k!) ν_{t_1}^{p_1}…ν_{t_k}^{p_k}`.
    pub fn nu_t(&self, t: &Tree) -> Q {
        let mut acc = self.p(t.children().len(), t.root().degree);
        for (c, p) in runs(t.children()) {
            let v = self.nu_t(c);
            for _ in 0..p {
                acc *= &v;
            }
            acc /= factorial_q(p);
        }
        acc
    }

    /// Image of a forest in `S(g_FdB)`.
    pub fn phi_forest(&self, f: &Forest) -> FdbWord {
        let mut out = FdbWord::new();
        let c = f.trees().iter().fold(Q::one(), |acc, t| acc * self.mu_t(t));
        sym_add(&mut out, f.trees().iter().map(Tree::degree).collect(), c);
        out
    }

    /// Linear extension of `phi_forest`.
    pub fn phi(&self, x: &ForestSum) -> FdbWord {
        let mut out = FdbWord::new();
        for (f, c) in x.iter() {
            for (w, d) in self.phi_forest(f) {
                sym_add(&mut out, w, c * d);
            }
        }
        out
    }

    /// `y(n) = ∑_{|t|=n} μ_t/s_t t` for `n ≤ bound`, trees decorated by `degrees`.
    pub fn build_y(&self, degrees: &[u32], bound: u32) -> Vec<ForestSum> {
        self.build_y_with(degrees, bound, |t| self.mu_t(t) / Q::from_integer(t.symmetry_factor()))
    }

    /// `y(n)` through the `ν_t` recursion.
    pub fn build_y_nu(&self, degrees: &[u32], bound: u32) -> Vec<ForestSum> {
        self.build_y_with(degrees, bound, |t| self.nu_t(t))
    }

    fn build_y_with(&self, degrees: &[u32], bound: u32, coeff: impl Fn(&Tree) -> Q) -> Vec<ForestSum> {
        let labels: Vec<Decoration> = degrees.iter().map(|&j| Decoration::single(j)).collect();
        let catalog = Catalog::new(&labels, bound);
        (0..=bound)
            .map(|n| {
                let mut y = ForestSum::zero();
                if n > 0 {
                    for t in catalog.trees_of_degree(n) {
                        y.add_term(Forest::single(t.clone()), coeff(t));
                    }
                }
                y
            })
            .collect()
    }
}

/// A set of positive degrees, possibly all of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeSet {
    All,
    Finite(BTreeSet<u32>),
}

impl DegreeSet {
    pub fn finite(items: &[u32]) -> DegreeSet {
        DegreeSet::Finite(items.iter().copied().collect())
    }

    pub fn contains(&self, j: u32) -> bool {
        match self {
            DegreeSet::All => j >= 1,
            DegreeSet::Finite(s) => s.contains(&j),
        }
    }
}

/// Whether the morphism from trees decorated by `J` onto `g_FdB` is onto.
pub fn surjective(j: &DegreeSet, lambda: &Q, mu: &Q) -> bool {
    if !lambda.is_zero() {
        j.contains(1) && (j.contains(2) || mu != lambda)
    } else {
        (!mu.is_zero() && j.contains(1)) || *j == DegreeSet::All
    }
}

/// The pre-Lie algebra dual to `x = ∑_{m|j} B_j(1+αx) + ∑_{m∤j} B_j(1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondType {
    pub degrees: BTreeSet<u32>,
    pub m: u32,
    pub alpha: Q,
}

impl SecondType {
    /// `e_i ∘ e_j = α e_{i+j}` if `m | j`, else 0.
    pub fn product(&self, i: u32, j: u32) -> (Q, u32) {
        let c = if j.is_multiple_of(self.m) { self.alpha.clone() } else { Q::zero() };
        (c, i + j)
    }

    /// `f_i ∘ f_j` in the basis `f_i = e_i/α`: `Some(i+j)` for `f_{i+j}`, `None` for 0.
    pub fn product_normalized(&self, i: u32, j: u32) -> Option<u32> {
        j.is_multiple_of(self.m).then_some(i + j)
    }

    /// Indices `s + j ≤ bound`, `s` a sum of degrees divisible by `m`
    /// (possibly empty) and `j` any degree.
    pub fn index_set(&self, bound: u32) -> BTreeSet<u32> {
        let gens: Vec<u32> = self.degrees.iter().copied().filter(|j| j % self.m == 0).collect();
        let mut sums = vec![false; bound as usize + 1];
        sums[0] = true;
        for s in 0..=bound as usize {
            if sums[s] {
                for &g in &gens {
                    if s + (g as usize) <= bound as usize {
                        sums[s + g as usize] = true;
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        for s in 0..=bound {
            if sums[s as usize] {
                for &j in &self.degrees {
                    if s + j <= bound {
                        out.insert(s + j);
                    }
                }
            }
        }
        out
    }
}

/// `η_{i,j} = (e_i ⊗ e_j)(Δ(x(i+j)))` for a single equation: the coefficient
/// of `x(i)⊗x(j)` when the component is written in monomials.
pub fn eta_from_solution(sol: &Solution, i: u32, j: u32) -> Option<Q> {
    if sol.component(1, i).is_zero() || sol.component(1, j).is_zero() || i + j > sol.bound() {
        return None;
    }
    let terms = coproduct_in_monomial_basis(sol, 1, i + j, i)?;
    let (u, v) = (Monomial(vec![(1, i)]), Monomial(vec![(1, j)]));
    Some(
        terms
            .into_iter()
            .find(|(a, b, _)| *a == u && *b == v)
            .map(|(_, _, c)| c)
            .unwrap_or_else(Q::zero),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn leaf(j: u32) -> Tree {
        Tree::leaf(Decoration::single(j))
    }

    #[test]
    fn graft_examples() {
        let (a, b, c) = (leaf(1), leaf(2), leaf(3));
        assert_eq!(graft(&a, &b), ForestSum::tree(Tree::new(b.root(), vec![a.clone()])));
        let u = Tree::new(b.root(), vec![c.clone()]);
        let mut expected = ForestSum::tree(Tree::new(b.root(), vec![c.clone(), a.clone()]));
        expected.add_term(
            Forest::single(Tree::new(b.root(), vec![Tree::new(c.root(), vec![a.clone()])])),
            Q::one(),
        );
        assert_eq!(graft(&a, &u), expected);
    }

    #[test]
    fn circ_units_and_corolla() {
        let (a, b) = (leaf(1), leaf(2));
        let g = Forest::single(b.clone());
        assert_eq!(circ(&Forest::unit(), &g), ForestSum::from(g.clone()));
        assert!(circ(&Forest::single(a.clone()), &Forest::unit()).is_zero());
        assert_eq!(circ(&Forest::unit(), &Forest::unit()), ForestSum::one());
        let aa = Forest::new(vec![a.clone(), a.clone()]);
        let corolla = Tree::new(b.root(), vec![a.clone(), a.clone()]);
        assert_eq!(circ(&aa, &g), ForestSum::tree(corolla.clone()));
        assert_eq!(circ_recursive(&aa, &g), circ(&aa, &g));
    }

    #[test]
    fn star_examples() {
        let (a, b) = (leaf(1), leaf(2));
        let fa = Forest::single(a.clone());
        let fb = Forest::single(b.clone());
        let mut expected = ForestSum::from(Forest::new(vec![a.clone(), b.clone()]));
        expected.add_term(Forest::single(Tree::new(b.root(), vec![a.clone()])), Q::one());
        assert_eq!(star(&fa, &fb), expected);
        assert_eq!(star(&Forest::unit(), &fb), ForestSum::from(fb.clone()));
        assert_eq!(star(&fa, &Forest::unit()), ForestSum::from(fa.clone()));
        assert_eq!(star_sweedler(&fa, &fb), expected);
    }

    #[test]
    fn fdb_products() {
        let (l, m) = (frac(3, 2), frac(-2, 5));
        let fdb = FdB::new(l.clone(), m.clone());
        let w = |v: Vec<u32>| -> FdbWord { [(v, Q::one())].into_iter().collect() };
        let out = fdb.circ(&w(vec![1, 2]), &w(vec![3]));
        let expected = (&l * int(3) - &m) * (&l * int(3));
        assert_eq!(out, [(vec![6], expected)].into_iter().collect());
        let fdb = FdB::new(int(1), int(-1));
        assert_eq!(fdb.circ_generator(&[1, 1, 1], 1), (Q::zero(), 4));
        assert!(fdb.circ(&w(vec![1, 1, 1]), &w(vec![1])).is_empty());
        assert_eq!(fdb.bracket(1, 3), int(2));
    }

    #[test]
    fn mu_examples() {
        let fdb = FdB::new(int(1), int(-1));
        assert_eq!(fdb.mu_t(&leaf(4)), int(1));
        let d = Decoration::single(1);
        assert_eq!(fdb.mu_t(&Tree::ladder(&[d, d])), int(2));
        let zero = FdB::new(int(0), int(0));
        assert!(zero.mu_t(&Tree::ladder(&[d, d])).is_zero());
    }

    #[test]
    fn y_low_degrees() {
        let fdb = FdB::new(int(1), int(-1));
        let y = fdb.build_y(&[1], 3);
        assert_eq!(y[1], ForestSum::tree(leaf(1)));
        let d = Decoration::single(1);
        assert_eq!(y[2], ForestSum::tree(Tree::ladder(&[d, d])).scale(&int(2)));
        assert_eq!(y, fdb.build_y_nu(&[1], 3));
    }

    #[test]
    fn surjectivity() {
        let one = DegreeSet::finite(&[1]);
        assert!(surjective(&one, &int(1), &int(-1)));
        assert!(!surjective(&one, &int(1), &int(1)));
        assert!(surjective(&DegreeSet::finite(&[1, 2]), &int(1), &int(1)));
        assert!(!surjective(&DegreeSet::finite(&[1, 2, 3]), &int(0), &int(0)));
        assert!(surjective(&DegreeSet::All, &int(0), &int(0)));
        assert!(surjective(&one, &int(0), &int(2)));
    }

    #[test]
    fn second_type_table() {
        let s = SecondType {
            degrees: [2, 3].into_iter().collect(),
            m: 2,
            alpha: int(1),
        };
        assert_eq!(s.product(1, 2), (int(1), 3));
        assert_eq!(s.product(2, 1), (int(0), 3));
        assert_eq!(s.product_normalized(1, 2), Some(3));
        assert_eq!(s.product_normalized(2, 1), None);
        assert_eq!(
            s.index_set(8),
            [2, 3, 4, 5, 6, 7, 8].into_iter().collect::<BTreeSet<_>>()
        );
    }
}
