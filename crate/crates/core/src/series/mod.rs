//! Truncated multivariate formal power series over the rationals, with the
//! operations needed to write and evaluate Dyson-Schwinger right-hand sides.

mod expr;

pub use expr::{parse_expr, parse_expr_at, SeriesExpr};

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::ForestSum;
use crate::error::{Error, Result};
use crate::rational::{self, int, Q};

/// Power series in `h_1..h_N` with every monomial of total degree above
/// `trunc` discarded. Variables are 1-based in the public API.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    nvars: usize,
    trunc: u32,
    coeffs: BTreeMap<Vec<u32>, Q>,
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, trunc: u32) -> Self {
        TruncatedSeries {
            nvars,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, trunc: u32, c: Q) -> Self {
        let mut s = TruncatedSeries::zero(nvars, trunc);
        s.set(vec![0; nvars], c);
        s
    }

    pub fn one(nvars: usize, trunc: u32) -> Self {
        TruncatedSeries::constant(nvars, trunc, Q::one())
    }

    /// The variable `h_var` (1-based).
    pub fn var(nvars: usize, trunc: u32, var: usize) -> Self {
        assert!(var >= 1 && var <= nvars, "variable index out of range");
        let mut s = TruncatedSeries::zero(nvars, trunc);
        let mut e = vec![0; nvars];
        e[var - 1] = 1;
        s.set(e, Q::one());
        s
    }

    /// Univariate series from its coefficient list.
    pub fn univariate(trunc: u32, coeffs: &[Q]) -> Self {
        let mut s = TruncatedSeries::zero(1, trunc);
        for (k, c) in coeffs.iter().enumerate() {
            s.set(vec![k as u32], c.clone());
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<u32>, Q> {
        &self.coeffs
    }

    pub fn coeff(&self, exps: &[u32]) -> Q {
        self.coeffs.get(exps).cloned().unwrap_or_else(Q::zero)
    }

    /// Coefficient of `h_var^k` in a series (other exponents zero).
    pub fn coeff_pure(&self, var: usize, k: u32) -> Q {
        let mut e = vec![0; self.nvars];
        e[var - 1] = k;
        self.coeff(&e)
    }

    /// Coefficient of the single variable `h_var`.
    pub fn linear_coeff(&self, var: usize) -> Q {
        self.coeff_pure(var, 1)
    }

    pub fn set(&mut self, exps: Vec<u32>, c: Q) {
        assert_eq!(exps.len(), self.nvars);
        if exps.iter().sum::<u32>() > self.trunc || c.is_zero() {
            self.coeffs.remove(&exps);
        } else {
            self.coeffs.insert(exps, c);
        }
    }

    fn add_to(&mut self, exps: Vec<u32>, c: Q) {
        if c.is_zero() || exps.iter().sum::<u32>() > self.trunc {
            return;
        }
        let entry = self.coeffs.entry(exps.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&exps);
        }
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every non-constant coefficient vanishes.
    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|e| e.iter().all(|&p| p == 0))
    }

    /// Homogeneous part of total degree `k`.
    pub fn degree_part(&self, k: u32) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.nvars, self.trunc);
        for (e, c) in &self.coeffs {
            if e.iter().sum::<u32>() == k {
                out.set(e.clone(), c.clone());
            }
        }
        out
    }

    /// Same series viewed at a lower (or equal) truncation degree.
    pub fn with_trunc(&self, trunc: u32) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.nvars, trunc);
        for (e, c) in &self.coeffs {
            out.set(e.clone(), c.clone());
        }
        out
    }

    /// Same coefficients in a space of `nvars` variables; variable `k`
    /// of `self` becomes variable `k` of the result.
    pub fn widen(&self, nvars: usize) -> TruncatedSeries {
        assert!(nvars >= self.nvars);
        let mut out = TruncatedSeries::zero(nvars, self.trunc);
        for (e, c) in &self.coeffs {
            let mut e2 = e.clone();
            e2.resize(nvars, 0);
            out.set(e2, c.clone());
        }
        out
    }

    fn check_shape(&self, other: &TruncatedSeries) -> Result<()> {
        if self.nvars != other.nvars || self.trunc != other.trunc {
            return Err(Error::ShapeMismatch(format!(
                "({} vars, degree {}) vs ({} vars, degree {})",
                self.nvars, self.trunc, other.nvars, other.trunc
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_to(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_to(e.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Cauchy product, discarding terms above the truncation degree.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_shape(other)?;
        let mut out = TruncatedSeries::zero(self.nvars, self.trunc);
        for (e1, c1) in &self.coeffs {
            let d1: u32 = e1.iter().sum();
            for (e2, c2) in &other.coeffs {
                if d1 + e2.iter().sum::<u32>() > self.trunc {
                    continue;
                }
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_to(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.nvars, self.trunc);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.coeffs {
            out.set(e.clone(), v * c);
        }
        out
    }

    pub fn neg(&self) -> TruncatedSeries {
        self.scale(&-Q::one())
    }

    /// `self - constant_term`.
    fn without_constant(&self) -> TruncatedSeries {
        let mut out = self.clone();
        out.coeffs.remove(&vec![0; self.nvars]);
        out
    }

    /// `∑_k c_k u^k` for a `u` without constant term; only `k ≤ trunc`
    /// contribute.
    fn compose_univariate(u: &TruncatedSeries, coeff: impl Fn(u32) -> Q) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(u.nvars, u.trunc);
        let mut power = TruncatedSeries::one(u.nvars, u.trunc);
        for k in 0..=u.trunc {
            let c = coeff(k);
            if !c.is_zero() {
                out = out.add(&power.scale(&c)).expect("same shape");
            }
            if k < u.trunc {
                power = power.mul(u).expect("same shape");
                if power.is_zero() {
                    break;
                }
            }
        }
        out
    }

    pub fn pow_u32(&self, e: u32) -> TruncatedSeries {
        let mut acc = TruncatedSeries::one(self.nvars, self.trunc);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same shape");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same shape");
            }
        }
        acc
    }

    /// Generalized binomial power. Non-integer exponents need constant
    /// term 1; negative integers need a nonzero constant term; nonnegative
    /// integers are unrestricted.
    pub fn pow_rational(&self, e: &Q) -> Result<TruncatedSeries> {
        if rational::is_nonneg_integer(e) {
            let k = rational::to_i64(e)
                .ok_or_else(|| Error::ConstantTerm("exponent too large".into()))?;
            return Ok(self.pow_u32(k as u32));
        }
        let c = self.constant_term();
        if e.is_integer() {
            if c.is_zero() {
                return Err(Error::ConstantTerm(
                    "negative power of a series with zero constant term".into(),
                ));
            }
        } else if !c.is_one() {
            return Err(Error::ConstantTerm(format!(
                "non-integer power requires constant term 1, found {}",
                rational::format(&c)
            )));
        }
        // c^e (1 + u)^e with u = self/c - 1
        let u = self.scale(&(Q::one() / &c)).without_constant();
        let body = TruncatedSeries::compose_univariate(&u, |k| rational::binomial(e, k));
        let scale = if c.is_one() {
            Q::one()
        } else {
            let k = rational::to_i64(e).expect("integer exponent");
            num_traits::pow::Pow::pow(&c, k as i32)
        };
        Ok(body.scale(&scale))
    }

    pub fn exp(&self) -> Result<TruncatedSeries> {
        if !self.constant_term().is_zero() {
            return Err(Error::ConstantTerm("exp requires constant term 0".into()));
        }
        Ok(TruncatedSeries::compose_univariate(self, |k| {
            Q::one() / rational::factorial_q(k)
        }))
    }

    pub fn log(&self) -> Result<TruncatedSeries> {
        if !self.constant_term().is_one() {
            return Err(Error::ConstantTerm("log requires constant term 1".into()));
        }
        let u = self.without_constant();
        Ok(TruncatedSeries::compose_univariate(&u, |k| {
            if k == 0 {
                Q::zero()
            } else if k % 2 == 1 {
                Q::one() / int(k as i64)
            } else {
                -Q::one() / int(k as i64)
            }
        }))
    }

    /// Evaluates at solution components: `∑ c_p ∏ args[k]^{p_k}`, every
    /// product truncated to tree degree `n`. Each argument must have zero
    /// constant term; `args[k]` stands for `h_{k+1}`.
    pub fn substitute(&self, args: &[ForestSum], n: u32) -> Result<ForestSum> {
        if args.len() != self.nvars {
            return Err(Error::ShapeMismatch(format!(
                "{} arguments for {} variables",
                args.len(),
                self.nvars
            )));
        }
        for (k, a) in args.iter().enumerate() {
            if !a.constant_term().is_zero() {
                return Err(Error::NonzeroValuation(format!("argument h{}", k + 1)));
            }
        }
        let mut powers: Vec<Vec<ForestSum>> = Vec::with_capacity(args.len());
        for a in args {
            let a = a.truncate(n);
            let mut pw = vec![ForestSum::one()];
            for _ in 0..n {
                let next = pw.last().unwrap().mul_truncated(&a, n);
                pw.push(next);
            }
            powers.push(pw);
        }
        let mut out = ForestSum::zero();
        for (e, c) in &self.coeffs {
            if e.iter().sum::<u32>() > n {
                continue;
            }
            let mut term = ForestSum::one();
            for (k, &p) in e.iter().enumerate() {
                if p > 0 {
                    term = term.mul_truncated(&powers[k][p as usize], n);
                    if term.is_zero() {
                        break;
                    }
                }
            }
            out.add_scaled(&term, c);
        }
        Ok(out)
    }
}

/// `∑_n [∏_{k<n} (start + k·step)] / n! · h_var^n`, which is
/// `(1 - step·h)^{-start/step}` for `step ≠ 0` and `exp(start·h)` for
/// `step = 0`.
pub fn rising_series(nvars: usize, trunc: u32, var: usize, start: &Q, step: &Q) -> TruncatedSeries {
    let mut out = TruncatedSeries::zero(nvars, trunc);
    let mut c = Q::one();
    for n in 0..=trunc {
        if n > 0 {
            c = c * (start + step * int(n as i64 - 1)) / int(n as i64);
        }
        if c.is_zero() {
            break;
        }
        let mut e = vec![0; nvars];
        e[var - 1] = n;
        out.set(e, c.clone());
    }
    out
}

/// `F_β(scale·h_var)`: `(1 - β·scale·h)^{-1/β}`, or `exp(scale·h)` at β = 0.
pub fn f_beta(beta: &Q, nvars: usize, var: usize, scale: &Q, trunc: u32) -> TruncatedSeries {
    rising_series(nvars, trunc, var, scale, &(beta * scale))
}

/// `F_{β/(1+β)}((1+β)h_var)`, taken to be the constant 1 at β = −1.
pub fn f_beta_shifted(beta: &Q, nvars: usize, var: usize, trunc: u32) -> TruncatedSeries {
    rising_series(nvars, trunc, var, &(Q::one() + beta), beta)
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(k, &p)| {
                    if p == 1 {
                        format!("h{}", k + 1)
                    } else {
                        format!("h{}^{}", k + 1, p)
                    }
                })
                .collect();
            let neg = c < &Q::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{}", rational::format(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", rational::format(&abs), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{Decoration, Forest, Tree};
    use crate::rational::frac;

    fn h(trunc: u32) -> TruncatedSeries {
        TruncatedSeries::var(1, trunc, 1)
    }

    fn uni(trunc: u32, c: &[Q]) -> TruncatedSeries {
        TruncatedSeries::univariate(trunc, c)
    }

    #[test]
    fn arithmetic() {
        let one = TruncatedSeries::one(1, 2);
        let a = one.add(&h(2)).unwrap();
        let b = one.sub(&h(2)).unwrap();
        assert_eq!(a.mul(&b).unwrap(), uni(2, &[int(1), int(0), int(-1)]));
        assert_eq!(a.add(&TruncatedSeries::zero(1, 2)).unwrap(), a);
        let geo = uni(4, &[int(1), int(1), int(1), int(1), int(1)]);
        let lin = TruncatedSeries::one(1, 4).sub(&h(4)).unwrap();
        assert_eq!(geo.mul(&lin).unwrap(), TruncatedSeries::one(1, 4));
        assert!(a.add(&TruncatedSeries::one(2, 2)).is_err());
    }

    #[test]
    fn rational_powers() {
        let lin = TruncatedSeries::one(1, 3).sub(&h(3)).unwrap();
        assert_eq!(
            lin.pow_rational(&int(-1)).unwrap(),
            uni(3, &[int(1), int(1), int(1), int(1)])
        );
        let a = TruncatedSeries::one(1, 4).add(&h(4)).unwrap();
        let root = a.pow_rational(&frac(1, 2)).unwrap();
        assert_eq!(root.mul(&root).unwrap(), a);
        assert!(h(3).pow_rational(&frac(1, 2)).is_err());
        assert!(h(3).pow_rational(&int(-1)).is_err());
        assert_eq!(h(3).pow_rational(&int(2)).unwrap(), uni(3, &[int(0), int(0), int(1)]));
        // (2 + h)^-1 = 1/2 - h/4 + h^2/8
        let two = TruncatedSeries::constant(1, 2, int(2)).add(&h(2)).unwrap();
        assert_eq!(
            two.pow_rational(&int(-1)).unwrap(),
            uni(2, &[frac(1, 2), frac(-1, 4), frac(1, 8)])
        );
    }

    #[test]
    fn beta_two_family() {
        // (1 - 2h)^{-1/2} = 1 + h + 3/2 h^2 + 5/2 h^3
        let s = f_beta(&int(2), 1, 1, &int(1), 3);
        assert_eq!(s, uni(3, &[int(1), int(1), frac(3, 2), frac(5, 2)]));
        let base = TruncatedSeries::one(1, 3).sub(&h(3).scale(&int(2))).unwrap();
        assert_eq!(base.pow_rational(&frac(-1, 2)).unwrap(), s);
    }

    #[test]
    fn exp_and_log() {
        assert_eq!(
            TruncatedSeries::zero(1, 3).exp().unwrap(),
            TruncatedSeries::one(1, 3)
        );
        assert_eq!(
            h(3).exp().unwrap(),
            uni(3, &[int(1), int(1), frac(1, 2), frac(1, 6)])
        );
        let geo = uni(3, &[int(1), int(1), int(1), int(1)]);
        assert_eq!(geo.log().unwrap(), uni(3, &[int(0), int(1), frac(1, 2), frac(1, 3)]));
        assert!(TruncatedSeries::one(1, 3).exp().is_err());
        assert!(h(3).log().is_err());
    }

    #[test]
    fn f_beta_family() {
        assert_eq!(f_beta(&int(0), 1, 1, &int(1), 4), h(4).exp().unwrap());
        let lin = TruncatedSeries::one(1, 4).sub(&h(4)).unwrap();
        assert_eq!(f_beta(&int(1), 1, 1, &int(1), 4), lin.pow_rational(&int(-1)).unwrap());
        assert_eq!(f_beta_shifted(&int(-1), 1, 1, 4), TruncatedSeries::one(1, 4));
    }

    #[test]
    fn substitution() {
        let leaf = Tree::leaf(Decoration::single(1));
        let x = ForestSum::tree(leaf.clone());
        let f = TruncatedSeries::one(1, 2).add(&h(2)).unwrap();
        let mut expected = ForestSum::one();
        expected.add_term(Forest::single(leaf.clone()), int(1));
        assert_eq!(f.substitute(std::slice::from_ref(&x), 2).unwrap(), expected);

        let sq = h(2).mul(&h(2)).unwrap();
        assert_eq!(
            sq.substitute(std::slice::from_ref(&x), 2).unwrap(),
            ForestSum::from(Forest::new(vec![leaf.clone(), leaf.clone()]))
        );

        let lin = TruncatedSeries::one(1, 2).sub(&h(2)).unwrap();
        let geo = lin.pow_rational(&int(-1)).unwrap();
        let mut expected = ForestSum::one();
        expected.add_term(Forest::single(leaf.clone()), int(1));
        expected.add_term(Forest::new(vec![leaf.clone(), leaf.clone()]), int(1));
        assert_eq!(geo.substitute(&[x], 2).unwrap(), expected);

        let bad = ForestSum::one();
        assert!(f.substitute(&[bad], 2).is_err());
    }

    #[test]
    fn display() {
        let s = TruncatedSeries::one(2, 2)
            .sub(&TruncatedSeries::var(2, 2, 2).scale(&frac(1, 2)))
            .unwrap();
        assert_eq!(s.to_string(), "1 - 1/2*h2");
    }
}
