//! Exact sparse linear algebra over the rationals: incremental echelon
//! spans with membership, coordinates and separating functionals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::Q;

/// Sparse vector keyed by an ordered basis label.
pub type SparseVec<K> = BTreeMap<K, Q>;

fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Q, x: &SparseVec<K>) {
    for (k, v) in x {
        let entry = y.entry(k.clone()).or_insert_with(Q::zero);
        *entry += a * v;
        if entry.is_zero() {
            y.remove(k);
        }
    }
}

/// Evaluates the coordinate functional `phi` on `v`.
pub fn apply<K: Ord>(phi: &SparseVec<K>, v: &SparseVec<K>) -> Q {
    let mut acc = Q::zero();
    for (k, a) in phi {
        if let Some(b) = v.get(k) {
            acc += a * b;
        }
    }
    acc
}

#[derive(Clone, Debug)]
struct Row<K> {
    pivot: K,
    vec: SparseVec<K>,
    /// The row as a combination of the original generators.
    combo: Vec<Q>,
}

/// Span of a sequence of generators, kept in echelon form.
#[derive(Clone, Debug)]
pub struct Span<K: Ord + Clone> {
    rows: Vec<Row<K>>,
    generators: usize,
}

impl<K: Ord + Clone> Default for Span<K> {
    fn default() -> Self {
        Span {
            rows: Vec::new(),
            generators: 0,
        }
    }
}

impl<K: Ord + Clone> Span<K> {
    pub fn new() -> Self {
        Span::default()
    }

    pub fn from_generators<'a>(gens: impl IntoIterator<Item = &'a SparseVec<K>>) -> Self
    where
        K: 'a,
    {
        let mut s = Span::new();
        for g in gens {
            s.push(g);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Adds a generator; returns whether it raised the rank.
    pub fn push(&mut self, v: &SparseVec<K>) -> bool {
        let idx = self.generators;
        self.generators += 1;
        for row in &mut self.rows {
            row.combo.push(Q::zero());
        }
        let mut combo = vec![Q::zero(); self.generators];
        combo[idx] = Q::one();
        let (residual, combo) = self.reduce_tracked(v.clone(), combo);
        match residual.keys().next().cloned() {
            Some(pivot) => {
                self.rows.push(Row {
                    pivot,
                    vec: residual,
                    combo,
                });
                true
            }
            None => false,
        }
    }

    fn reduce_tracked(&self, mut v: SparseVec<K>, mut combo: Vec<Q>) -> (SparseVec<K>, Vec<Q>) {
        for row in &self.rows {
            if let Some(c) = v.get(&row.pivot).cloned() {
                let factor = -(c / &row.vec[&row.pivot]);
                axpy(&mut v, &factor, &row.vec);
                for (slot, r) in combo.iter_mut().zip(&row.combo) {
                    *slot += &factor * r;
                }
            }
        }
        (v, combo)
    }

    /// Residual of `v` after elimination; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut v = v.clone();
        for row in &self.rows {
            if let Some(c) = v.get(&row.pivot).cloned() {
                let factor = -(c / &row.vec[&row.pivot]);
                axpy(&mut v, &factor, &row.vec);
            }
        }
        v
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Coefficients `c` with `v = ∑ c_g g` over the generators, if `v` is in
    /// the span. When generators are dependent, one solution is returned.
    pub fn coordinates(&self, v: &SparseVec<K>) -> Option<Vec<Q>> {
        let (residual, combo) = self.reduce_tracked(v.clone(), vec![Q::zero(); self.generators]);
        if !residual.is_empty() {
            return None;
        }
        // reduce_tracked computed v - ∑ factor*rows; the combo holds -coords.
        Some(combo.into_iter().map(|c| -c).collect())
    }

    /// A coordinate functional vanishing on the span but not on `w`, or
    /// `None` when `w` lies in the span.
    pub fn separating_functional(&self, w: &SparseVec<K>) -> Option<SparseVec<K>> {
        let residual = self.reduce(w);
        let (key, _) = residual.iter().next()?;
        // phi = e_key - ∑ x_t e_{pivot_t}, with phi(row_s) = 0 for every row.
        // Row s is zero at the pivots of earlier rows, so solve from the last row up.
        let n = self.rows.len();
        let mut x = vec![Q::zero(); n];
        for s in (0..n).rev() {
            let row = &self.rows[s].vec;
            let mut acc = row.get(key).cloned().unwrap_or_else(Q::zero);
            for (t, xt) in x.iter().enumerate().skip(s + 1) {
                if let Some(v) = row.get(&self.rows[t].pivot) {
                    acc -= xt * v;
                }
            }
            x[s] = acc / &row[&self.rows[s].pivot];
        }
        let mut phi = SparseVec::new();
        phi.insert(key.clone(), Q::one());
        for (s, xs) in x.into_iter().enumerate() {
            if !xs.is_zero() {
                let e = phi.entry(self.rows[s].pivot.clone()).or_insert_with(Q::zero);
                *e -= xs;
                if e.is_zero() {
                    let p = self.rows[s].pivot.clone();
                    phi.remove(&p);
                }
            }
        }
        Some(phi)
    }
}

/// Rank of a list of sparse vectors.
pub fn rank<K: Ord + Clone>(vectors: &[SparseVec<K>]) -> usize {
    Span::from_generators(vectors.iter()).rank()
}
