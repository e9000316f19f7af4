//! Decorated rooted trees and forests in canonical form.
//!
//! A [`Tree`] is an immutable value whose children are kept sorted under the
//! total order (degree, root decoration, children lexicographically). Two
//! trees are isomorphic exactly when their canonical forms are equal, so
//! structural equality doubles as isomorphism testing.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::combinat::{runs, weighted_multisets};
use crate::error::{Error, Result};
use crate::rational::factorial;

/// A vertex label `(eq, degree)`: the equation the operator belongs to and
/// its operator degree. Ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decoration {
    pub eq: u32,
    pub degree: u32,
}

impl Decoration {
    pub fn new(eq: u32, degree: u32) -> Self {
        assert!(degree >= 1, "operator degree must be positive");
        Decoration { eq, degree }
    }

    /// Single-equation label.
    pub fn single(degree: u32) -> Self {
        Decoration::new(1, degree)
    }
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.eq, self.degree)
    }
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Node {
    degree: u32,
    root: Decoration,
    children: Vec<Tree>,
    size: u32,
}

/// Canonical decorated rooted tree.
#[derive(Clone, Debug)]
pub struct Tree(Arc<Node>);

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Tree {}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.cmp(&other.0)
    }
}

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl Tree {
    /// `B_root(children)`; the children are sorted into canonical order.
    pub fn new(root: Decoration, mut children: Vec<Tree>) -> Tree {
        children.sort();
        let degree = root.degree + children.iter().map(Tree::degree).sum::<u32>();
        let size = 1 + children.iter().map(Tree::size).sum::<u32>();
        Tree(Arc::new(Node {
            degree,
            root,
            children,
            size,
        }))
    }

    pub fn leaf(root: Decoration) -> Tree {
        Tree::new(root, Vec::new())
    }

    /// Ladder of the given decorations, first element at the root.
    pub fn ladder(decorations: &[Decoration]) -> Tree {
        let (first, rest) = decorations.split_first().expect("ladder needs a vertex");
        if rest.is_empty() {
            Tree::leaf(*first)
        } else {
            Tree::new(*first, vec![Tree::ladder(rest)])
        }
    }

    pub fn root(&self) -> Decoration {
        self.0.root
    }

    pub fn children(&self) -> &[Tree] {
        &self.0.children
    }

    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    /// Number of vertices.
    pub fn size(&self) -> u32 {
        self.0.size
    }

    pub fn is_leaf(&self) -> bool {
        self.0.children.is_empty()
    }

    /// Order of the group of root-fixing automorphisms:
    /// `s_t = prod p_i! * s_{t_i}^{p_i}` over distinct children `t_i`.
    pub fn symmetry_factor(&self) -> BigInt {
        let mut s = BigInt::one();
        for (child, mult) in runs(self.children()) {
            s *= factorial(mult);
            s *= num_traits::pow(child.symmetry_factor(), mult as usize);
        }
        s
    }

    pub fn to_raw(&self) -> RawTree {
        RawTree {
            root: self.root(),
            children: self.children().iter().map(Tree::to_raw).collect(),
        }
    }

    /// All decorations appearing in the tree, in preorder.
    pub fn decorations(&self) -> Vec<Decoration> {
        let mut out = vec![self.root()];
        for c in self.children() {
            out.extend(c.decorations());
        }
        out
    }

    pub fn parse(text: &str) -> Result<Tree> {
        let mut p = TextParser::new(text);
        let t = p.tree()?;
        p.skip_ws();
        if !p.at_end() {
            return Err(p.error("trailing input after tree"));
        }
        Ok(t)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:", self.root())?;
        for c in self.children() {
            write!(f, " {}", c)?;
        }
        write!(f, ")")
    }
}

/// A tree with unordered children, as produced by grafting or by callers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTree {
    pub root: Decoration,
    pub children: Vec<RawTree>,
}

impl RawTree {
    pub fn leaf(root: Decoration) -> Self {
        RawTree {
            root,
            children: Vec::new(),
        }
    }

    pub fn canonical(&self) -> Tree {
        canonical(self)
    }

    /// Number of vertices.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(RawTree::size).sum::<usize>()
    }

    /// Paths (child index sequences) of every vertex, preorder.
    pub fn vertex_paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        collect_paths(self, &mut path, &mut out);
        out
    }

    pub fn vertex_mut(&mut self, path: &[usize]) -> &mut RawTree {
        let mut node = self;
        for &i in path {
            node = &mut node.children[i];
        }
        node
    }

    pub fn vertex(&self, path: &[usize]) -> &RawTree {
        let mut node = self;
        for &i in path {
            node = &node.children[i];
        }
        node
    }
}

fn collect_paths(t: &RawTree, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(path.clone());
    for (i, c) in t.children.iter().enumerate() {
        path.push(i);
        collect_paths(c, path, out);
        path.pop();
    }
}

/// Canonical form of an unordered tree.
pub fn canonical(raw: &RawTree) -> Tree {
    Tree::new(raw.root, raw.children.iter().map(canonical).collect())
}

/// Commutative monomial in trees; the empty forest is the unit `1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Forest {
    degree: u32,
    trees: Vec<Tree>,
}

impl Forest {
    pub fn unit() -> Forest {
        Forest::default()
    }

    pub fn new(mut trees: Vec<Tree>) -> Forest {
        trees.sort();
        let degree = trees.iter().map(Tree::degree).sum();
        Forest { degree, trees }
    }

    pub fn single(t: Tree) -> Forest {
        Forest {
            degree: t.degree(),
            trees: vec![t],
        }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_unit(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// The tree if this forest has exactly one.
    pub fn as_tree(&self) -> Option<&Tree> {
        match self.trees.as_slice() {
            [t] => Some(t),
            _ => None,
        }
    }

    /// Multiset union.
    pub fn union(&self, other: &Forest) -> Forest {
        let mut trees = Vec::with_capacity(self.trees.len() + other.trees.len());
        let (mut i, mut j) = (0, 0);
        while i < self.trees.len() && j < other.trees.len() {
            if self.trees[i] <= other.trees[j] {
                trees.push(self.trees[i].clone());
                i += 1;
            } else {
                trees.push(other.trees[j].clone());
                j += 1;
            }
        }
        trees.extend_from_slice(&self.trees[i..]);
        trees.extend_from_slice(&other.trees[j..]);
        Forest {
            degree: self.degree + other.degree,
            trees,
        }
    }

    /// `s_F = prod s_{t_i} * prod (multiplicity)!`.
    pub fn symmetry_factor(&self) -> BigInt {
        let mut s = BigInt::one();
        for (t, mult) in runs(&self.trees) {
            s *= factorial(mult);
            s *= num_traits::pow(t.symmetry_factor(), mult as usize);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Forest> {
        let mut p = TextParser::new(text);
        let f = p.forest()?;
        p.skip_ws();
        if !p.at_end() {
            return Err(p.error("trailing input after forest"));
        }
        Ok(f)
    }
}

impl From<Tree> for Forest {
    fn from(t: Tree) -> Self {
        Forest::single(t)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.trees.is_empty() {
            return write!(f, "1");
        }
        for (i, t) in self.trees.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", t)?;
        }
        Ok(())
    }
}

/// All canonical trees of degree exactly `n` decorated by `labels`, in
/// ascending canonical order.
pub fn enumerate(labels: &[Decoration], n: u32) -> Vec<Tree> {
    Catalog::new(labels, n).trees_of_degree(n).to_vec()
}

/// All forests of degree exactly `n` (the unit for `n = 0`).
pub fn enumerate_forests(labels: &[Decoration], n: u32) -> Vec<Forest> {
    Catalog::new(labels, n).forests_of_degree(n)
}

/// Trees over a label set, stratified by degree up to a bound.
#[derive(Clone, Debug)]
pub struct Catalog {
    by_degree: Vec<Vec<Tree>>,
}

impl Catalog {
    pub fn new(labels: &[Decoration], max_degree: u32) -> Catalog {
        let mut labels = labels.to_vec();
        labels.sort();
        labels.dedup();
        let mut cat = Catalog {
            by_degree: vec![Vec::new(); max_degree as usize + 1],
        };
        for n in 1..=max_degree {
            let mut level = Vec::new();
            for &d in &labels {
                if d.degree > n {
                    continue;
                }
                for children in cat.forests_of_degree(n - d.degree) {
                    level.push(Tree::new(d, children.trees));
                }
            }
            level.sort();
            cat.by_degree[n as usize] = level;
        }
        cat
    }

    pub fn max_degree(&self) -> u32 {
        self.by_degree.len() as u32 - 1
    }

    pub fn trees_of_degree(&self, n: u32) -> &[Tree] {
        &self.by_degree[n as usize]
    }

    /// Forests of degree `n` over the catalogued trees.
    pub fn forests_of_degree(&self, n: u32) -> Vec<Forest> {
        let pool: Vec<&Tree> = self.by_degree[1..=n as usize].iter().flatten().collect();
        let weights: Vec<u32> = pool.iter().map(|t| t.degree()).collect();
        weighted_multisets(&weights, n)
            .into_iter()
            .map(|idx| Forest::new(idx.into_iter().map(|i| pool[i].clone()).collect()))
            .collect()
    }

    pub fn all_trees(&self) -> impl Iterator<Item = &Tree> {
        self.by_degree.iter().flatten()
    }
}

struct TextParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> TextParser<'a> {
    fn new(text: &'a str) -> Self {
        TextParser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            line: 1,
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn number(&mut self) -> Result<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected integer"))
    }

    fn tree(&mut self) -> Result<Tree> {
        self.skip_ws();
        self.expect(b'(')?;
        let eq = self.number()?;
        self.expect(b'.')?;
        let degree = self.number()?;
        if degree == 0 {
            return Err(self.error("operator degree must be positive"));
        }
        self.expect(b':')?;
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(b'(') => children.push(self.tree()?),
                _ => return Err(self.error("expected '(' or ')'")),
            }
        }
        Ok(Tree::new(Decoration { eq, degree }, children))
    }

    fn forest(&mut self) -> Result<Forest> {
        self.skip_ws();
        if self.peek() == Some(b'1') {
            self.pos += 1;
            return Ok(Forest::unit());
        }
        let mut trees = Vec::new();
        while self.peek() == Some(b'(') {
            trees.push(self.tree()?);
            self.skip_ws();
        }
        if trees.is_empty() {
            return Err(self.error("expected a forest"));
        }
        Ok(Forest::new(trees))
    }
}

/// Parses a forest from the front of `text`, returning it with the rest.
pub(crate) fn parse_forest_prefix(text: &str) -> Result<(Forest, &str)> {
    let mut p = TextParser::new(text);
    let f = p.forest()?;
    Ok((f, &text[p.pos..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(eq: u32, q: u32) -> Decoration {
        Decoration::new(eq, q)
    }

    #[test]
    fn leaf_is_canonical() {
        let raw = RawTree::leaf(d(1, 1));
        let t = canonical(&raw);
        assert_eq!(t, Tree::leaf(d(1, 1)));
        assert_eq!(canonical(&t.to_raw()), t);
    }

    #[test]
    fn children_sorted() {
        let a = d(1, 1);
        let b = d(2, 1);
        let c = d(3, 1);
        let raw = RawTree {
            root: a,
            children: vec![RawTree::leaf(c), RawTree::leaf(b)],
        };
        let t = canonical(&raw);
        assert_eq!(t.children(), &[Tree::leaf(b), Tree::leaf(c)]);
        assert_eq!(t.to_string(), "(1.1: (2.1:) (3.1:))");
    }

    #[test]
    fn symmetry_examples() {
        let (a, b, c) = (d(1, 1), d(2, 1), d(3, 1));
        assert_eq!(Tree::leaf(a).symmetry_factor(), BigInt::from(1));
        let bb = Tree::new(a, vec![Tree::leaf(b), Tree::leaf(b)]);
        assert_eq!(bb.symmetry_factor(), BigInt::from(2));
        let bc = Tree::new(a, vec![Tree::leaf(b), Tree::leaf(c)]);
        assert_eq!(bc.symmetry_factor(), BigInt::from(1));
    }

    #[test]
    fn enumerate_small() {
        let a = d(1, 1);
        assert_eq!(enumerate(&[a], 1), vec![Tree::leaf(a)]);
        let three = enumerate(&[a], 3);
        assert_eq!(three.len(), 2);
        assert!(three.contains(&Tree::ladder(&[a, a, a])));
        assert!(three.contains(&Tree::new(a, vec![Tree::leaf(a), Tree::leaf(a)])));
        assert_eq!(enumerate(&[a], 4).len(), 4);
    }

    #[test]
    fn enumerate_respects_label_degrees() {
        // labels of degree 1 and 2: trees of degree 2 are the 1-ladder and the 2-leaf
        let trees = enumerate(&[d(1, 1), d(1, 2)], 2);
        assert_eq!(trees.len(), 2);
        assert!(trees.iter().all(|t| t.degree() == 2));
    }

    #[test]
    fn text_round_trip() {
        let t = Tree::parse("(1.1: (2.1:) (1.1:))").unwrap();
        assert_eq!(t.to_string(), "(1.1: (1.1:) (2.1:))");
        assert_eq!(Tree::parse(&t.to_string()).unwrap(), t);
        let f = Forest::parse("(2.1:) (1.1: (1.1:))").unwrap();
        assert_eq!(Forest::parse(&f.to_string()).unwrap(), f);
        assert_eq!(Forest::parse("1").unwrap(), Forest::unit());
        assert_eq!(Forest::unit().to_string(), "1");
        assert!(Tree::parse("(1.0:)").is_err());
        assert!(Tree::parse("(1.1: ").is_err());
    }

    #[test]
    fn forest_symmetry() {
        let a = Tree::leaf(d(1, 1));
        let f = Forest::new(vec![a.clone(), a.clone()]);
        assert_eq!(f.symmetry_factor(), BigInt::from(2));
    }

    #[test]
    fn total_order_starts_with_degree() {
        let heavy = Tree::leaf(d(1, 2));
        let light = Tree::ladder(&[d(2, 1)]);
        assert!(light < heavy);
    }
}
