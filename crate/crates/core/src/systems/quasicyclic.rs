use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::{fmt_q, linear, CheckReport, DegreeSpec};
use crate::algebra::ForestSum;
use crate::error::{Error, Result};
use crate::forest::{Decoration, Forest, Tree};
use crate::rational::Q;
use crate::series::TruncatedSeries;
use crate::solver::{check_hopf, solve, HopfVerdict, Sdse};

/// A vertex in class `class` of `Z/modulus`; `f^{(i,1)} = 1 + weight·∑_{j ∈ succ} h_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiCyclicVertex {
    pub class: u32,
    pub weight: Q,
    pub succ: BTreeSet<usize>,
    pub degrees: DegreeSpec,
}

impl QuasiCyclicVertex {
    pub fn new(class: u32, weight: Q, succ: &[usize], degrees: DegreeSpec) -> Self {
        QuasiCyclicVertex {
            class,
            weight,
            succ: succ.iter().copied().collect(),
            degrees,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiCyclicData {
    pub modulus: u32,
    pub vertices: Vec<QuasiCyclicVertex>,
}

impl QuasiCyclicData {
    pub fn new(modulus: u32, vertices: Vec<QuasiCyclicVertex>) -> Self {
        QuasiCyclicData { modulus, vertices }
    }

    /// `x_p = ∑_{j ∈ degrees} B_j(1 + x_{p+j})` on `Z/modulus`.
    pub fn cyclic(modulus: u32, degrees: &[u32]) -> Self {
        let vertices = (0..modulus)
            .map(|p| {
                let next = ((p + 1) % modulus) as usize + 1;
                QuasiCyclicVertex::new(p, Q::one(), &[next], DegreeSpec::finite(degrees))
            })
            .collect();
        QuasiCyclicData::new(modulus, vertices)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn v(&self, i: usize) -> &QuasiCyclicVertex {
        &self.vertices[i - 1]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidData(m));
        if self.modulus == 0 {
            return bad("modulus 0".into());
        }
        let n = self.len();
        for i in 1..=n {
            let v = self.v(i);
            v.degrees.validate()?;
            if v.degrees.from.is_some() {
                return bad(format!("vertex {}: open degree ranges are not supported here", i));
            }
            if !v.degrees.contains(1) {
                return bad(format!("vertex {} has no operator of degree 1", i));
            }
            if v.class >= self.modulus {
                return bad(format!("vertex {} has class {} outside Z/{}", i, v.class, self.modulus));
            }
            if !v.succ.is_empty() && v.weight.is_zero() {
                return bad(format!("vertex {} has weight 0", i));
            }
            for &j in &v.succ {
                if j == 0 || j > n {
                    return bad(format!("vertex {} points to unknown vertex {}", i, j));
                }
                if self.v(j).class != (v.class + 1) % self.modulus {
                    return bad(format!("edge {} -> {} does not advance the class", i, j));
                }
            }
            let mut children = v.succ.iter().map(|&j| self.v(j));
            if let Some(first) = children.next() {
                if children.any(|c| c.succ != first.succ || c.weight != first.weight) {
                    return bad(format!("children of vertex {} differ in series or descendants", i));
                }
            }
        }
        self.check_chain()
    }

    fn reach(&self, i: usize, q: u32) -> BTreeSet<usize> {
        let mut cur: BTreeSet<usize> = [i].into();
        for _ in 0..q {
            cur = cur.iter().flat_map(|&v| self.v(v).succ.iter().copied()).collect();
        }
        cur
    }

    /// `b_n^{(i)}`: product of the weights along a path of length `n` from
    /// `i`, or `None` when no such path exists.
    pub fn b(&self, i: usize, n: u32) -> Option<Q> {
        let mut acc = Q::one();
        let mut cur = i;
        for _ in 0..n {
            let v = self.v(cur);
            cur = *v.succ.iter().next()?;
            acc *= &v.weight;
        }
        Some(acc)
    }

    /// `b_m^{(i)} b_n^{(j)} = b_{m+n}^{(i)}` whenever `i →^m j`, for lengths
    /// up to the number of vertices.
    fn check_chain(&self) -> Result<()> {
        let depth = self.len() as u32 + 1;
        for i in 1..=self.len() {
            for m in 1..=depth {
                for j in self.reach(i, m) {
                    for n in 1..=depth {
                        if let (Some(bm), Some(bn), Some(bmn)) = (self.b(i, m), self.b(j, n), self.b(i, m + n)) {
                            if bm * bn != bmn {
                                return Err(Error::InvalidData(format!(
                                    "chain consistency fails for b_{}^({}) b_{}^({})",
                                    m, i, n, j
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `f^{(i,q)} = 1 + b_q^{(i)} ∑_{i →^q j} h_j` on a fixed number of variables.
    pub fn series(&self, i: usize, q: u32, trunc: u32) -> TruncatedSeries {
        let n = self.len();
        let mut f = TruncatedSeries::one(n, trunc);
        if let Some(b) = self.b(i, q) {
            if trunc >= 1 {
                for j in self.reach(i, q) {
                    f.set(unit(n, j), b.clone());
                }
            }
        }
        f
    }

    pub fn build(&self) -> Result<Sdse> {
        self.validate()?;
        let mut sys = Sdse::new(self.len());
        for i in 1..=self.len() {
            for q in self.v(i).degrees.explicit_below_tail() {
                let terms: Vec<(usize, Q)> = match self.b(i, q) {
                    Some(b) => self.reach(i, q).into_iter().map(|j| (j, b.clone())).collect(),
                    None => Vec::new(),
                };
                sys = sys.with_op(i, q, linear(&Q::one(), &terms));
            }
        }
        Ok(sys)
    }

    /// Weighted sum of the ladders `(i_1,p_1) → … → (i_k,p_k)` of degree
    /// `n` rooted at `i`, where `p_r ∈ J_{i_r}` and `i_r →^{p_r} i_{r+1}`.
    /// With `weighted`, a ladder carries `∏_{r<k} b_{p_r}^{(i_r)}`.
    pub fn ladder_sum(&self, i: usize, n: u32, weighted: bool) -> ForestSum {
        let mut out = ForestSum::zero();
        let mut path = Vec::new();
        self.ladders(i, n, &Q::one(), weighted, &mut path, &mut out);
        out
    }

    fn ladders(&self, i: usize, left: u32, w: &Q, weighted: bool, path: &mut Vec<Decoration>, out: &mut ForestSum) {
        for p in self.v(i).degrees.up_to(left) {
            path.push(Decoration::new(i as u32, p));
            if p == left {
                out.add_term(Forest::single(Tree::ladder(path)), w.clone());
            } else if let Some(b) = self.b(i, p) {
                let w2 = if weighted { w * b } else { w.clone() };
                for j in self.reach(i, p) {
                    self.ladders(j, left - p, &w2, weighted, path, out);
                }
            }
            path.pop();
        }
    }
}

fn unit(n: usize, j: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[j - 1] = 1;
    e
}

/// Checks the affine series of every operator up to `bound`, the ladder
/// expansion of the solution, and the Hopf property.
pub fn check_theorem27(system: &Sdse, data: &QuasiCyclicData, bound: u32) -> Result<CheckReport> {
    data.validate()?;
    if system.nvars != data.len() {
        return Err(Error::ShapeMismatch(format!(
            "system has {} equations, data {} vertices",
            system.nvars,
            data.len()
        )));
    }
    let mut report = CheckReport::default();
    for i in 1..=data.len() {
        let degs = system.degrees(i, bound);
        if degs != data.v(i).degrees.up_to(bound) {
            report.push(format!("thm27 degrees {}", i), false, "operator degrees differ from the data");
            continue;
        }
        for q in degs {
            let got = system.series(i, q, bound)?.expect("degree listed");
            report.push(format!("thm27 f({},{})", i, q), got == data.series(i, q, bound), "");
        }
    }
    let sol = solve(system, bound)?;
    for i in 1..=data.len() {
        let mut bad = Vec::new();
        for n in 1..=bound {
            if *sol.component(i, n) != data.ladder_sum(i, n, true) {
                bad.push(n.to_string());
            }
        }
        report.push(format!("thm27 ladders {}", i), bad.is_empty(), if bad.is_empty() { String::new() } else { format!("degrees {}", bad.join(",")) });
        let mut off = Vec::new();
        for n in 1..=bound {
            let expected = match data.b(i, n) {
                Some(b) => data.ladder_sum(i, n, false).scale(&b),
                None => ForestSum::zero(),
            };
            if *sol.component(i, n) != expected {
                off.push(format!("x_{}({}) != b_{} * ladders (b = {})", i, n, n, data.b(i, n).map_or("none".into(), |b| fmt_q(&b))));
            }
        }
        report.push(format!("thm27 unweighted-ladder form {}", i), off.is_empty(), off.join("; "));
    }
    match check_hopf(&sol) {
        HopfVerdict::HopfUpTo(n) => report.push("thm27 hopf", true, format!("up to {}", n)),
        HopfVerdict::Counterexample(c) => report.push("thm27 hopf", false, c.to_string()),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::series::parse_expr;

    #[test]
    fn cyclic_example_builds_and_holds() {
        let data = QuasiCyclicData::cyclic(3, &[1, 2, 4]);
        let sys = data.build().unwrap();
        assert_eq!(sys.expr(1, 2).unwrap().to_string(), "1 + h3");
        assert_eq!(sys.expr(2, 4).unwrap().to_string(), "1 + h3");
        let report = check_theorem27(&sys, &data, 5).unwrap();
        assert!(report.passed(), "{}", report);
    }

    #[test]
    fn single_class_reduces_to_affine_equation() {
        let data = QuasiCyclicData::new(1, vec![QuasiCyclicVertex::new(0, int(2), &[1], DegreeSpec::finite(&[1]))]);
        let sys = data.build().unwrap();
        let direct = Sdse::new(1).with_op(1, 1, parse_expr("1+2*h1").unwrap());
        assert_eq!(sys, direct);
        let report = check_theorem27(&sys, &data, 4).unwrap();
        assert!(report.section_passed("thm27 ladders"), "{}", report);
        assert!(report.section_passed("thm27 hopf"));
        // x(n) carries 2^(n-1), not b_n = 2^n.
        assert!(!report.section_passed("thm27 unweighted-ladder form"));
    }

    #[test]
    fn missing_ladders_give_zero() {
        let data = QuasiCyclicData::new(
            2,
            vec![
                QuasiCyclicVertex::new(0, int(1), &[2], DegreeSpec::finite(&[1])),
                QuasiCyclicVertex::new(1, int(1), &[], DegreeSpec::finite(&[1])),
            ],
        );
        let sol = solve(&data.build().unwrap(), 4).unwrap();
        assert!(sol.component(1, 3).is_zero());
        assert!(data.ladder_sum(1, 3, true).is_zero());
    }

    #[test]
    fn invalid_data() {
        let wrong_class = QuasiCyclicData::new(2, vec![QuasiCyclicVertex::new(0, int(1), &[1], DegreeSpec::finite(&[1]))]);
        assert!(wrong_class.build().is_err());
        let split = QuasiCyclicData::new(
            2,
            vec![
                QuasiCyclicVertex::new(0, int(1), &[2, 3], DegreeSpec::finite(&[1])),
                QuasiCyclicVertex::new(1, int(1), &[1], DegreeSpec::finite(&[1])),
                QuasiCyclicVertex::new(1, int(2), &[1], DegreeSpec::finite(&[1])),
            ],
        );
        assert!(split.build().is_err());
    }
}
