use std::fmt;

use num_traits::{One, Zero};

use super::{Instance, Sdse};
use crate::algebra::{graft_operator, ForestSum};
use crate::combinat::{runs, weighted_multisets};
use crate::error::Result;
use crate::forest::{Decoration, Tree};
use crate::rational::{factorial_q, Q};

/// Homogeneous components `x_i(n)` for `1 ≤ i ≤ nvars`, `0 ≤ n ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    nvars: usize,
    bound: u32,
    comps: Vec<Vec<ForestSum>>,
}

impl Solution {
    fn empty(nvars: usize, bound: u32) -> Solution {
        Solution {
            nvars,
            bound,
            comps: vec![vec![ForestSum::zero(); bound as usize + 1]; nvars],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// `x_i(n)`, equation `i` 1-based.
    pub fn component(&self, i: usize, n: u32) -> &ForestSum {
        &self.comps[i - 1][n as usize]
    }

    /// `x_i` truncated at the bound.
    pub fn total(&self, i: usize) -> ForestSum {
        let mut out = ForestSum::zero();
        for c in &self.comps[i - 1] {
            out.add_scaled(c, &Q::one());
        }
        out
    }

    /// `a_t`, read from the component of the root's equation.
    pub fn coefficient(&self, t: &Tree) -> Q {
        let i = t.root().eq as usize;
        if i == 0 || i > self.nvars || t.degree() > self.bound {
            return Q::zero();
        }
        self.component(i, t.degree()).coeff_of_tree(t)
    }

    /// Restriction to a smaller bound.
    pub fn truncated(&self, bound: u32) -> Solution {
        let bound = bound.min(self.bound);
        Solution {
            nvars: self.nvars,
            bound,
            comps: self
                .comps
                .iter()
                .map(|c| c[..=bound as usize].to_vec())
                .collect(),
        }
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.nvars {
            for n in 1..=self.bound {
                writeln!(f, "x{}({}) = {}", i, n, self.component(i, n))?;
            }
        }
        Ok(())
    }
}

/// Solves through the coefficient recursion: for
/// `t = B_{(i,q)}(∏ t_{l,k}^{p_{l,k}})` with roots of `t_{l,k}` in equation `l`,
/// `a_t = a^{(i,q)}_{(p_1..p_N)} ∏_l p_l!/∏_k p_{l,k}! ∏ a_{t_{l,k}}^{p_{l,k}}`.
pub fn solve(system: &Sdse, bound: u32) -> Result<Solution> {
    let inst = system.instantiate(bound)?;
    Ok(solve_instance(&inst))
}

pub(crate) fn solve_instance(inst: &Instance) -> Solution {
    let nvars = inst.nvars();
    let bound = inst.bound();
    let mut sol = Solution::empty(nvars, bound);
    let mut support: Vec<(Tree, Q)> = Vec::new();
    for n in 1..=bound {
        let weights: Vec<u32> = support.iter().map(|(t, _)| t.degree()).collect();
        let mut fresh = Vec::new();
        for i in 1..=nvars {
            let mut comp = ForestSum::zero();
            for (q, f) in inst.ops(i) {
                if *q > n {
                    continue;
                }
                let root = Decoration::new(i as u32, *q);
                for multiset in weighted_multisets(&weights, n - q) {
                    let mut p = vec![0u32; nvars];
                    for &idx in &multiset {
                        p[support[idx].0.root().eq as usize - 1] += 1;
                    }
                    let a = f.coeff(&p);
                    if a.is_zero() {
                        continue;
                    }
                    let mut c = a;
                    for &pl in &p {
                        c *= factorial_q(pl);
                    }
                    for (&idx, mult) in runs(&multiset) {
                        let at = &support[idx].1;
                        for _ in 0..mult {
                            c *= at;
                        }
                        c /= factorial_q(mult);
                    }
                    let children = multiset.iter().map(|&idx| support[idx].0.clone()).collect();
                    comp.add_term(Tree::new(root, children).into(), c);
                }
            }
            for (forest, c) in comp.iter() {
                let t = forest.as_tree().expect("components are linear in trees");
                fresh.push((t.clone(), c.clone()));
            }
            sol.comps[i - 1][n as usize] = comp;
        }
        support.extend(fresh);
    }
    sol
}

/// Independent route: iterates `x_i ← ∑_q B_{(i,q)}(f^{(i,q)}(x))` from zero;
/// `bound` rounds suffice because grafting raises the degree.
pub fn solve_oracle(system: &Sdse, bound: u32) -> Result<Solution> {
    let inst = system.instantiate(bound)?;
    let nvars = inst.nvars();
    let mut x: Vec<ForestSum> = vec![ForestSum::zero(); nvars];
    for _ in 0..bound {
        x = rhs(&inst, &x, bound)?;
    }
    let mut sol = Solution::empty(nvars, bound);
    for i in 1..=nvars {
        for n in 1..=bound {
            sol.comps[i - 1][n as usize] = x[i - 1].homogeneous_part(n);
        }
    }
    Ok(sol)
}

/// Right-hand sides of the system evaluated at `x`, truncated at `bound`.
pub(crate) fn rhs(inst: &Instance, x: &[ForestSum], bound: u32) -> Result<Vec<ForestSum>> {
    let mut next = Vec::with_capacity(x.len());
    for i in 1..=inst.nvars() {
        let mut xi = ForestSum::zero();
        for (q, f) in inst.ops(i) {
            if *q > bound {
                continue;
            }
            let inner = f.substitute(x, bound - q)?;
            xi.add_scaled(&graft_operator(Decoration::new(i as u32, *q), &inner), &Q::one());
        }
        next.push(xi);
    }
    Ok(next)
}

/// Whether substituting the solution into the system reproduces it.
pub fn is_fixed_point(system: &Sdse, sol: &Solution) -> Result<bool> {
    let inst = system.instantiate(sol.bound())?;
    let x: Vec<ForestSum> = (1..=sol.nvars()).map(|i| sol.total(i)).collect();
    Ok(rhs(&inst, &x, sol.bound())? == x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::Forest;
    use crate::rational::int;
    use crate::series::parse_expr;

    fn quadratic() -> Sdse {
        Sdse::new(1).with_op(1, 1, parse_expr("(1+h1)^2").unwrap())
    }

    #[test]
    fn quadratic_equation_low_degrees() {
        let sol = solve(&quadratic(), 3).unwrap();
        let d = Decoration::single(1);
        let leaf = Tree::leaf(d);
        assert_eq!(sol.component(1, 1), &ForestSum::tree(leaf.clone()));
        assert_eq!(sol.coefficient(&Tree::ladder(&[d, d])), int(2));
        assert_eq!(sol.coefficient(&Tree::ladder(&[d, d, d])), int(4));
        let corolla = Tree::new(d, vec![leaf.clone(), leaf]);
        assert_eq!(sol.coefficient(&corolla), int(1));
        assert_eq!(sol.component(1, 3).len(), 2);
    }

    #[test]
    fn oracle_agrees() {
        let s = quadratic();
        assert_eq!(solve(&s, 5).unwrap(), solve_oracle(&s, 5).unwrap());
        assert!(is_fixed_point(&s, &solve(&s, 5).unwrap()).unwrap());
    }

    #[test]
    fn empty_system_is_zero() {
        let sol = solve(&Sdse::new(1), 3).unwrap();
        assert!(sol.total(1).is_zero());
    }

    #[test]
    fn degree_one_components_are_leaves() {
        let s = Sdse::new(2)
            .with_op(1, 1, parse_expr("1+h2").unwrap())
            .with_op(1, 2, parse_expr("1").unwrap())
            .with_op(2, 1, parse_expr("1+h1").unwrap());
        let sol = solve_oracle(&s, 1).unwrap();
        assert_eq!(
            sol.component(1, 1),
            &ForestSum::from(Forest::single(Tree::leaf(Decoration::new(1, 1))))
        );
        assert_eq!(sol, solve(&s, 1).unwrap());
    }
}
