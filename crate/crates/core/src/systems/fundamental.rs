use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use super::{fmt_q, linear, product, push_term, rescale_expr, rising_expr, times, CheckReport, DegreeSpec};
use crate::error::{Error, Result};
use crate::forest::Decoration;
use crate::rational::{int, Q};
use crate::series::{SeriesExpr, TruncatedSeries};
use crate::solver::{extract_lambda, solve, LambdaEntry, Sdse, INSPECTION_DEPTH};

/// Vertex classes of an extended fundamental system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    I0,
    J0,
    K0,
    L0,
    I1,
    J1,
    E,
}

impl Class {
    pub fn name(self) -> &'static str {
        match self {
            Class::I0 => "I0",
            Class::J0 => "J0",
            Class::K0 => "K0",
            Class::L0 => "L0",
            Class::I1 => "I1",
            Class::J1 => "J1",
            Class::E => "E",
        }
    }

    pub fn parse(s: &str) -> Option<Class> {
        Some(match s {
            "I0" => Class::I0,
            "J0" => Class::J0,
            "K0" => Class::K0,
            "L0" => Class::L0,
            "I1" => Class::I1,
            "J1" => Class::J1,
            "E" => Class::E,
            _ => return None,
        })
    }

    fn is_base(self) -> bool {
        matches!(self, Class::I0 | Class::J0 | Class::K0)
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One vertex. `beta` is read for `I0`, `nu` for `I1`/`J1`, and `a` holds
/// the coefficients for `L0` and `I1` (over `I0 ∪ J0 ∪ K0`), `J1` (over `L0`)
/// and `E` (over all vertices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalVertex {
    pub class: Class,
    pub beta: Q,
    pub nu: Q,
    pub a: BTreeMap<usize, Q>,
    pub degrees: DegreeSpec,
}

impl FundamentalVertex {
    fn new(class: Class) -> Self {
        FundamentalVertex {
            class,
            beta: Q::zero(),
            nu: Q::zero(),
            a: BTreeMap::new(),
            degrees: DegreeSpec::finite(&[1]),
        }
    }

    pub fn i0(beta: Q) -> Self {
        FundamentalVertex { beta, ..Self::new(Class::I0) }
    }

    pub fn j0() -> Self {
        Self::new(Class::J0)
    }

    pub fn k0() -> Self {
        Self::new(Class::K0)
    }

    pub fn l0(a: &[(usize, Q)]) -> Self {
        Self::new(Class::L0).with_a(a)
    }

    pub fn i1(nu: Q, a: &[(usize, Q)]) -> Self {
        FundamentalVertex { nu, ..Self::new(Class::I1) }.with_a(a)
    }

    pub fn j1(nu: Q, a: &[(usize, Q)]) -> Self {
        FundamentalVertex { nu, ..Self::new(Class::J1) }.with_a(a)
    }

    pub fn e(a: &[(usize, Q)]) -> Self {
        Self::new(Class::E).with_a(a)
    }

    fn with_a(mut self, a: &[(usize, Q)]) -> Self {
        self.a = a.iter().filter(|(_, c)| !c.is_zero()).cloned().collect();
        self
    }

    pub fn with_degrees(mut self, degrees: DegreeSpec) -> Self {
        self.degrees = degrees;
        self
    }

    fn coeff(&self, j: usize) -> Q {
        self.a.get(&j).cloned().unwrap_or_else(Q::zero)
    }
}

/// An extended fundamental system, with optional rescalings `h_j → s_j h_j`
/// applied to every series.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FundamentalData {
    pub vertices: Vec<FundamentalVertex>,
    pub scale: BTreeMap<usize, Q>,
}

impl FundamentalData {
    pub fn new(vertices: Vec<FundamentalVertex>) -> Self {
        FundamentalData {
            vertices,
            scale: BTreeMap::new(),
        }
    }

    pub fn with_scale(mut self, j: usize, s: Q) -> Self {
        self.scale.insert(j, s);
        self
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn v(&self, i: usize) -> &FundamentalVertex {
        &self.vertices[i - 1]
    }

    pub fn class(&self, i: usize) -> Class {
        self.v(i).class
    }

    fn members(&self, c: Class) -> Vec<usize> {
        (1..=self.len()).filter(|&i| self.class(i) == c).collect()
    }

    fn base(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&i| self.class(i).is_base()).collect()
    }

    fn scale_of(&self, j: usize) -> Q {
        self.scale.get(&j).cloned().unwrap_or_else(Q::one)
    }

    /// `b_j`.
    pub fn b(&self, j: usize) -> Q {
        match self.class(j) {
            Class::I0 => Q::one() + &self.v(j).beta,
            Class::J0 => Q::one(),
            _ => Q::zero(),
        }
    }

    /// `b_j - a_j^{(j)}`, the step of the rising factor in `h_j`.
    fn step(&self, j: usize) -> Q {
        match self.class(j) {
            Class::I0 => self.v(j).beta.clone(),
            Class::J0 => Q::one(),
            _ => Q::zero(),
        }
    }

    /// `a_j^{(j)}` profile of a `K0` vertex: `1+β_j`, `1`, `0` on `I0`, `J0`, `K0`.
    fn k0_profile(&self, j: usize) -> Q {
        self.b(j)
    }

    /// `L0` vertices with a nonzero coefficient in the `J1` vertex `i`.
    fn l0_support(&self, i: usize) -> Vec<usize> {
        self.v(i).a.keys().copied().filter(|&l| self.class(l) == Class::L0).collect()
    }

    /// `c_j^{(i)}` of a `J1` vertex.
    fn c(&self, i: usize, j: usize) -> Q {
        match self.l0_support(i).first() {
            Some(&l) => self.v(l).coeff(j),
            None => Q::zero(),
        }
    }

    /// `a_j^{(i)}`, the coefficient of `h_j` in `f^{(i,1)}` before rescaling.
    pub fn a(&self, i: usize, j: usize) -> Q {
        let cj = self.class(j);
        let vi = self.v(i);
        match vi.class {
            Class::I0 | Class::J0 | Class::K0 => match cj {
                _ if i == j => self.b(j) - self.step(j),
                Class::I0 | Class::J0 => self.k0_profile(j),
                _ => Q::zero(),
            },
            Class::L0 | Class::I1 if cj.is_base() => vi.coeff(j),
            Class::L0 | Class::I1 => Q::zero(),
            Class::J1 => {
                let c = self.c(i, j);
                match cj {
                    Class::I0 => (c - Q::one() - &self.v(j).beta) / &vi.nu,
                    Class::J0 => (c - Q::one()) / &vi.nu,
                    Class::K0 => c / &vi.nu,
                    Class::L0 => vi.coeff(j),
                    _ => Q::zero(),
                }
            }
            Class::E => vi.coeff(j),
        }
    }

    /// `ã_j^{(i)}`.
    pub fn a_tilde(&self, i: usize, j: usize) -> Q {
        let cj = self.class(j);
        if !cj.is_base() {
            return Q::zero();
        }
        let vi = self.v(i);
        match vi.class {
            Class::I0 | Class::J0 | Class::K0 | Class::L0 => self.a(i, j),
            Class::I1 => &vi.nu * vi.coeff(j),
            Class::J1 => {
                let c = self.c(i, j);
                match cj {
                    Class::I0 => c - Q::one() - &self.v(j).beta,
                    Class::J0 => c - Q::one(),
                    _ => c,
                }
            }
            Class::E => match vi.a.keys().next() {
                Some(&s) => self.a_tilde(s, j) - self.b(j),
                None => Q::zero(),
            },
        }
    }

    /// Checks the class conditions and returns the level of each vertex.
    pub fn levels(&self) -> Result<Vec<u32>> {
        let n = self.len();
        let bad = |msg: String| Err(Error::InvalidData(msg));
        if self.members(Class::I0).is_empty() && self.members(Class::J0).is_empty() {
            return bad("I0 and J0 are both empty".into());
        }
        for (&j, s) in &self.scale {
            if j == 0 || j > n || s.is_zero() {
                return bad(format!("invalid rescaling of h{}", j));
            }
        }
        for i in 1..=n {
            let v = self.v(i);
            v.degrees.validate()?;
            if !v.degrees.contains(1) {
                return bad(format!("vertex {} has no operator of degree 1", i));
            }
            let allowed = |j: &usize| match v.class {
                Class::L0 | Class::I1 => self.class(*j).is_base(),
                Class::J1 => self.class(*j) == Class::L0,
                Class::E => true,
                _ => false,
            };
            if let Some(j) = v.a.keys().find(|j| **j == 0 || **j > n || !allowed(j)) {
                return bad(format!("vertex {} ({}) cannot have a coefficient on {}", i, v.class, j));
            }
            match v.class {
                Class::L0 => {
                    if self.base().iter().all(|&j| v.coeff(j) == self.k0_profile(j)) {
                        return bad(format!("L0 vertex {} has the coefficients of a K0 vertex", i));
                    }
                }
                Class::I1 if v.nu.is_one() => return bad(format!("I1 vertex {} has nu = 1", i)),
                Class::J1 => {
                    if v.nu.is_zero() {
                        return bad(format!("J1 vertex {} has nu = 0", i));
                    }
                    let support = self.l0_support(i);
                    if support.is_empty() {
                        return bad(format!("J1 vertex {} has no L0 successor", i));
                    }
                    if support.iter().any(|&l| self.v(l).a != self.v(support[0]).a) {
                        return bad(format!("J1 vertex {} has L0 successors with different series", i));
                    }
                }
                Class::E => self.check_e_successors(i)?,
                _ => {}
            }
        }
        let mut level: Vec<Option<u32>> = (1..=n)
            .map(|i| match self.class(i) {
                Class::I1 | Class::J1 => Some(1),
                Class::E => None,
                _ => Some(0),
            })
            .collect();
        for _ in 0..n {
            for i in 1..=n {
                if level[i - 1].is_some() {
                    continue;
                }
                let succ: Vec<Option<u32>> = self.v(i).a.keys().map(|&j| level[j - 1]).collect();
                if succ.iter().any(Option::is_none) {
                    continue;
                }
                let ls: BTreeSet<u32> = succ.into_iter().flatten().collect();
                if ls.len() != 1 {
                    return bad(format!("E vertex {} has successors on different levels", i));
                }
                let l = *ls.iter().next().unwrap();
                level[i - 1] = Some(l + 1);
            }
        }
        level
            .into_iter()
            .enumerate()
            .map(|(k, l)| l.ok_or_else(|| Error::InvalidData(format!("E vertex {} lies on a cycle of E vertices", k + 1))))
            .collect()
    }

    fn check_e_successors(&self, i: usize) -> Result<()> {
        let succ: Vec<usize> = self.v(i).a.keys().copied().collect();
        let Some(&first) = succ.first() else {
            return Err(Error::InvalidData(format!("E vertex {} has no successor", i)));
        };
        let n = self.len();
        let f0 = self.degree_one(first).eval(n, INSPECTION_DEPTH, None)?;
        for &s in &succ[1..] {
            if self.degree_one(s).eval(n, INSPECTION_DEPTH, None)? != f0 {
                return Err(Error::InvalidData(format!(
                    "E vertex {} has successors {} and {} with different series",
                    i, first, s
                )));
            }
            if self.base().iter().any(|&j| self.a_tilde(s, j) != self.a_tilde(first, j)) {
                return Err(Error::InvalidData(format!(
                    "E vertex {} has successors {} and {} with different structure constants",
                    i, first, s
                )));
            }
        }
        Ok(())
    }

    /// `∏_j F(ã_j + b_j(q-1))` over `I0 ∪ J0 ∪ K0`, at a fixed `q` or as a
    /// template in `q`.
    fn generic(&self, i: usize, q: Option<u32>) -> SeriesExpr {
        product(self.base().into_iter().map(|j| {
            let b = self.b(j);
            let s0 = self.a_tilde(i, j) - &b;
            match q {
                Some(q) => rising_expr(j, &(s0 + b * int(q as i64)), &Q::zero(), &self.step(j)),
                None => rising_expr(j, &s0, &b, &self.step(j)),
            }
        }))
    }

    /// `f^{(i,1)}` before rescaling.
    fn degree_one(&self, i: usize) -> SeriesExpr {
        let v = self.v(i);
        match v.class {
            Class::I0 | Class::J0 | Class::K0 | Class::L0 => self.generic(i, Some(1)),
            Class::I1 if v.nu.is_zero() => {
                let mut acc = Some(SeriesExpr::Num(Q::one()));
                for j in self.base() {
                    let a = v.coeff(j);
                    let step = self.step(j);
                    acc = if step.is_zero() {
                        push_term(acc, &a, SeriesExpr::Var(j))
                    } else {
                        let log = SeriesExpr::Log(Box::new(linear(&Q::one(), &[(j, -step.clone())])));
                        push_term(acc, &(-a / step), log)
                    };
                }
                acc.unwrap()
            }
            Class::I1 | Class::J1 => {
                let inv = Q::one() / &v.nu;
                let mut acc = Some(times(&inv, self.generic(i, Some(1))));
                if v.class == Class::J1 {
                    for l in self.l0_support(i) {
                        acc = push_term(acc, &v.coeff(l), SeriesExpr::Var(l));
                    }
                }
                push_term(acc, &(Q::one() - inv), SeriesExpr::Num(Q::one())).unwrap()
            }
            Class::E => {
                let terms: Vec<(usize, Q)> = v.a.iter().map(|(j, c)| (*j, c.clone())).collect();
                linear(&Q::one(), &terms)
            }
        }
    }

    /// `f^{(i,q)}` before rescaling.
    fn series_expr(&self, i: usize, q: u32, levels: &[u32]) -> SeriesExpr {
        if q > levels[i - 1] {
            self.generic(i, Some(q))
        } else if q == 1 {
            self.degree_one(i)
        } else {
            let succ = *self.v(i).a.keys().next().expect("E vertex has a successor");
            self.series_expr(succ, q - 1, levels)
        }
    }

    fn rescale(&self, e: SeriesExpr) -> SeriesExpr {
        if self.scale.values().all(One::is_one) {
            return e;
        }
        rescale_expr(&e, &|j| self.scale_of(j))
    }

    /// The system `x_i = ∑_{q ∈ J_i} B_{(i,q)}(f^{(i,q)}(x))`.
    pub fn build(&self) -> Result<Sdse> {
        let levels = self.levels()?;
        let mut sys = Sdse::new(self.len());
        for i in 1..=self.len() {
            let spec = &self.v(i).degrees;
            let level = levels[i - 1];
            let mut explicit = spec.explicit_below_tail();
            if let Some(q0) = spec.from {
                explicit.extend(q0..=level);
            }
            for q in explicit {
                let e = self.rescale(self.series_expr(i, q, &levels));
                sys = sys.with_op(i, q, e);
            }
            if let Some(q0) = spec.from {
                let e = self.rescale(self.generic(i, None));
                sys = sys.with_family(i, q0.max(level + 1), e);
            }
        }
        Ok(sys)
    }

    /// `λ_n^{(i,j)}` of the built system: `a_j^{(i)}` for `n = 1` and
    /// `ã_j^{(i)} + b_j(n-1)` for `n` above the level of `i`, times `s_j`.
    pub fn expected_lambda(&self, i: usize, j: usize, n: u32) -> Result<Q> {
        let levels = self.levels()?;
        if i == 0 || i > self.len() || j == 0 || j > self.len() || n == 0 {
            return Err(Error::InvalidData(format!("no entry ({}, {}, {})", i, j, n)));
        }
        let raw = if n == 1 {
            self.a(i, j)
        } else if n > levels[i - 1] {
            self.a_tilde(i, j) + self.b(j) * int(n as i64 - 1)
        } else {
            return Err(Error::Undefined(format!(
                "lambda_{} of vertex {} lies at or below its level {}",
                n,
                i,
                levels[i - 1]
            )));
        };
        Ok(raw * self.scale_of(j))
    }

    fn rescale_series(&self, s: &TruncatedSeries) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(s.nvars(), s.trunc());
        for (exps, c) in s.coeffs() {
            let mut c = c.clone();
            for (k, e) in exps.iter().enumerate() {
                for _ in 0..*e {
                    c *= self.scale_of(k + 1);
                }
            }
            out.set(exps.clone(), c);
        }
        out
    }

    /// `(1 - step·h_j)^{-start/step}`, or `exp(start·h_j)` when `step = 0`.
    fn power_factor(&self, j: usize, start: &Q, step: &Q, trunc: u32) -> Result<TruncatedSeries> {
        let n = self.len();
        let h = TruncatedSeries::var(n, trunc, j);
        if step.is_zero() {
            return h.scale(start).exp();
        }
        TruncatedSeries::one(n, trunc)
            .sub(&h.scale(step))?
            .pow_rational(&(-start / step))
    }

    /// `Q = ∏_{I0} (1 - β_j h_j)^{-(1+β_j)/β_j} ∏_{J0} (1 - h_j)^{-1}`, before rescaling.
    pub fn q_series(&self, trunc: u32) -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::one(self.len(), trunc);
        for j in self.members(Class::I0).into_iter().chain(self.members(Class::J0)) {
            acc = acc.mul(&self.power_factor(j, &self.b(j), &self.step(j), trunc)?)?;
        }
        Ok(acc)
    }

    /// `g^{(i)} = ∏_j (1 - (b_j - a_j^{(j)}) h_j)^{-(ã_j^{(i)} - b_j)/(b_j - a_j^{(j)})}`,
    /// read as `exp((ã_j^{(i)} - b_j) h_j)` when the step vanishes.
    pub fn g_series(&self, i: usize, trunc: u32) -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::one(self.len(), trunc);
        for j in self.base() {
            let start = self.a_tilde(i, j) - self.b(j);
            acc = acc.mul(&self.power_factor(j, &start, &self.step(j), trunc)?)?;
        }
        Ok(acc)
    }

    /// The closed forms listed for `g`: `1 - β_i h_i` on `I0`, `1 - h_i` on
    /// `J0`, `1` on `K0` and `Q^{-1}` on `E`.
    pub fn g_closed_form(&self, i: usize, trunc: u32) -> Result<Option<TruncatedSeries>> {
        let n = self.len();
        let one = TruncatedSeries::one(n, trunc);
        let h = TruncatedSeries::var(n, trunc, i);
        Ok(match self.class(i) {
            Class::I0 => Some(one.sub(&h.scale(&self.v(i).beta))?),
            Class::J0 => Some(one.sub(&h)?),
            Class::K0 => Some(one),
            Class::E => Some(self.q_series(trunc)?.pow_rational(&-Q::one())?),
            _ => None,
        })
    }
}

/// Edges `i → j` whenever `h_j` appears linearly in `f^{(i,1)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependenceGraph {
    succ: Vec<BTreeSet<usize>>,
}

impl DependenceGraph {
    pub fn from_sdse(system: &Sdse) -> Result<Self> {
        let mut succ = Vec::with_capacity(system.nvars);
        for i in 1..=system.nvars {
            let f = system.series(i, 1, 1)?.ok_or_else(|| {
                Error::NotApplicable(format!("equation {} has no operator of degree 1", i))
            })?;
            succ.push((1..=system.nvars).filter(|&j| !f.linear_coeff(j).is_zero()).collect());
        }
        Ok(DependenceGraph { succ })
    }

    pub fn successors(&self, i: usize) -> &BTreeSet<usize> {
        &self.succ[i - 1]
    }

    /// Vertices `j` with `i →^q j`.
    pub fn reach(&self, i: usize, q: u32) -> BTreeSet<usize> {
        let mut cur: BTreeSet<usize> = [i].into();
        for _ in 0..q {
            cur = cur.iter().flat_map(|&v| self.successors(v).iter().copied()).collect();
        }
        cur
    }

    pub fn has_path(&self, i: usize, q: u32, j: usize) -> bool {
        self.reach(i, q).contains(&j)
    }
}

fn lambda_lines(report: &mut CheckReport, system: &Sdse, data: &FundamentalData, levels: &[u32], bound: u32) -> Result<()> {
    let sol = solve(system, bound)?;
    let table = extract_lambda(system, &sol);
    for i in 1..=data.len() {
        let mut checked = 0;
        let mut problems = Vec::new();
        for j in 1..=data.len() {
            for n in 1..bound {
                if n != 1 && n <= levels[i - 1] {
                    continue;
                }
                let want = data.expected_lambda(i, j, n)?;
                match table.get(i, Decoration::new(j as u32, 1), n) {
                    Some(LambdaEntry::Value(v)) if *v == want => checked += 1,
                    Some(LambdaEntry::Value(v)) => problems.push(format!(
                        "lambda_{}^({},{}) = {}, expected {}",
                        n,
                        i,
                        j,
                        fmt_q(v),
                        fmt_q(&want)
                    )),
                    Some(LambdaEntry::Inconsistent) => problems.push(format!("lambda_{}^({},{}) inconsistent", n, i, j)),
                    Some(LambdaEntry::Vacuous) | None => {}
                }
            }
        }
        let detail = if problems.is_empty() {
            format!("{} entries", checked)
        } else {
            problems.join("; ")
        };
        report.push(format!("thm23 lambda {}", i), problems.is_empty(), detail);
    }
    Ok(())
}

/// Checks `f^{(i,q)} = g^{(i)} Q^q` above each level, the closed forms of
/// `g`, and the structure constants of the solution, up to degree `bound`.
pub fn check_theorem23(system: &Sdse, data: &FundamentalData, bound: u32) -> Result<CheckReport> {
    let levels = data.levels()?;
    let mut report = CheckReport::default();
    let trunc = bound;
    let q_series = data.q_series(trunc)?;
    for i in 1..=data.len() {
        let g = data.g_series(i, trunc)?;
        for q in system.degrees(i, bound) {
            if q <= levels[i - 1] {
                continue;
            }
            let got = system.series(i, q, trunc)?.expect("degree listed");
            let want = data.rescale_series(&g.mul(&q_series.pow_u32(q))?);
            report.push(format!("thm23 f({},{})", i, q), got == want, "");
        }
        if let Some(closed) = data.g_closed_form(i, trunc)? {
            let ok = closed == g;
            let detail = if ok { String::new() } else { format!("g = {}, closed form {}", g, closed) };
            report.push(format!("thm23 g({}) {}", i, data.class(i)), ok, detail);
        }
    }
    lambda_lines(&mut report, system, data, &levels, bound)?;
    Ok(report)
}

/// Checks the series of `E` vertices of level `n` at degrees up to `bound`:
/// `f^{(i,q)} = f^{(i',1)}` for `q ≤ n` and `i →^{q-1} i'`; for `q > n`
/// both `f^{(i,q)} = Q^{q-1}` and `f^{(i,q)} = f^{(i',q-1)}` for `i → i'`.
pub fn check_prop25(system: &Sdse, data: &FundamentalData, bound: u32) -> Result<CheckReport> {
    let levels = data.levels()?;
    let graph = DependenceGraph::from_sdse(system)?;
    let q_series = data.q_series(bound)?;
    let mut report = CheckReport::default();
    for i in (1..=data.len()).filter(|&i| data.class(i) == Class::E) {
        let n = levels[i - 1];
        for q in system.degrees(i, bound) {
            let got = system.series(i, q, bound)?.expect("degree listed");
            if q <= n {
                let mut ok = true;
                for t in graph.reach(i, q - 1) {
                    ok &= system.series(t, 1, bound)?.as_ref() == Some(&got);
                }
                report.push(format!("prop25 low ({},{})", i, q), ok, "");
                continue;
            }
            let power_form = data.rescale_series(&q_series.pow_u32(q - 1));
            report.push(format!("prop25 tail Q^(q-1) ({},{})", i, q), got == power_form, "");
            let mut ok = true;
            let mut seen = 0;
            for &t in graph.successors(i) {
                if let Some(s) = system.series(t, q - 1, bound)? {
                    seen += 1;
                    ok &= s == got;
                }
            }
            if seen > 0 {
                report.push(format!("prop25 tail successor ({},{})", i, q), ok, "");
            }
        }
    }
    Ok(report)
}
