use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use super::{fmt_q, linear, rising_expr, DegreeSpec};
use crate::error::{Error, Result};
use crate::rational::{int, Q};
use crate::series::{rising_series, SeriesExpr, TruncatedSeries};
use crate::solver::{Sdse, INSPECTION_DEPTH};

/// Which of the two Hopf families a single equation belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// `f^(j) = (1 - μh)^{1 - λj/μ}`, or `exp(λjh)` when `μ = 0`.
    Case1 { lambda: Q, mu: Q },
    /// `f^(j) = 1 + αh` when `m | j`, and `1` otherwise.
    Case2 { m: u32, alpha: Q },
    Both { lambda: Q, mu: Q, m: u32, alpha: Q },
    Unclassifiable { reason: String },
}

impl Classification {
    pub fn is_hopf(&self) -> bool {
        !matches!(self, Classification::Unclassifiable { .. })
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Case1 { lambda, mu } => {
                write!(f, "case 1: lambda = {}, mu = {}", fmt_q(lambda), fmt_q(mu))
            }
            Classification::Case2 { m, alpha } => {
                write!(f, "case 2: m = {}, alpha = {}", m, fmt_q(alpha))
            }
            Classification::Both { lambda, mu, m, alpha } => write!(
                f,
                "case 1: lambda = {}, mu = {}; case 2: m = {}, alpha = {}",
                fmt_q(lambda),
                fmt_q(mu),
                m,
                fmt_q(alpha)
            ),
            Classification::Unclassifiable { reason } => write!(f, "not Hopf: {}", reason),
        }
    }
}

fn case1_series(j: u32, lambda: &Q, mu: &Q, trunc: u32) -> TruncatedSeries {
    rising_series(1, trunc, 1, &(lambda * int(j as i64) - mu), mu)
}

/// Classifies `x = ∑_j B_j(f^(j)(x))` from its operator series, each given
/// to the same truncation degree (at least 3).
pub fn classify_single(ops: &[(u32, TruncatedSeries)]) -> Result<Classification> {
    let trunc = match ops.first() {
        Some((_, s)) => s.trunc(),
        None => return Err(Error::InvalidSystem("equation without operators".into())),
    };
    if trunc < 3 {
        return Err(Error::SeriesTooShort(format!(
            "classification needs series to degree 3, got {}",
            trunc
        )));
    }
    for (q, s) in ops {
        if s.nvars() != 1 {
            return Err(Error::NotApplicable("classification needs one variable".into()));
        }
        if s.trunc() != trunc {
            return Err(Error::ShapeMismatch(format!("operator {} truncated differently", q)));
        }
        if !s.constant_term().is_one() {
            return Err(Error::ConstantTerm(format!(
                "operator {} has f(0) = {}",
                q,
                fmt_q(&s.constant_term())
            )));
        }
    }
    let nonconst: Vec<&(u32, TruncatedSeries)> = ops.iter().filter(|(_, s)| !s.is_constant()).collect();
    let Some((j0, f0)) = nonconst.first() else {
        return Ok(Classification::Case1 {
            lambda: Q::zero(),
            mu: Q::zero(),
        });
    };

    let alpha = f0.linear_coeff(1);
    if alpha.is_zero() {
        return Ok(Classification::Unclassifiable {
            reason: format!("operator {} is nonconstant with vanishing linear term", j0),
        });
    }
    let a2 = f0.coeff_pure(1, 2);
    let beta = int(2) * a2 / (&alpha * &alpha) - Q::one();
    let mu = &alpha * &beta;
    let lambda = &alpha * (Q::one() + &beta) / int(*j0 as i64);

    let case1 = ops
        .iter()
        .all(|(j, s)| *s == case1_series(*j, &lambda, &mu, trunc));

    let m = nonconst.iter().fold(0u32, |g, (j, _)| g.gcd(j));
    let affine = TruncatedSeries::one(1, trunc).add(&TruncatedSeries::var(1, trunc, 1).scale(&alpha))?;
    let case2 = nonconst.iter().all(|(_, s)| *s == affine)
        && ops.iter().all(|(j, s)| !s.is_constant() || j % m != 0);

    Ok(match (case1, case2) {
        (true, true) => Classification::Both { lambda, mu, m, alpha },
        (true, false) => Classification::Case1 { lambda, mu },
        (false, true) => Classification::Case2 { m, alpha },
        (false, false) => Classification::Unclassifiable {
            reason: describe_failure(ops, &lambda, &mu, trunc),
        },
    })
}

fn describe_failure(ops: &[(u32, TruncatedSeries)], lambda: &Q, mu: &Q, trunc: u32) -> String {
    for (j, s) in ops {
        let want = case1_series(*j, lambda, mu, trunc);
        if *s != want {
            let k = (0..=trunc)
                .find(|&k| s.degree_part(k) != want.degree_part(k))
                .unwrap_or(trunc);
            return format!(
                "operator {} leaves the fitted family (lambda = {}, mu = {}) at degree {} and is not of the second type",
                j,
                fmt_q(lambda),
                fmt_q(mu),
                k
            );
        }
    }
    "no family fits".into()
}

/// Classifies a one-variable, one-equation system, reading series to
/// `depth` and family members up to `depth` past the last explicit degree.
pub fn classify_sdse(system: &Sdse, depth: u32) -> Result<Classification> {
    if system.nvars != 1 {
        return Err(Error::NotApplicable(format!(
            "classification applies to a single equation, got {}",
            system.nvars
        )));
    }
    let eq = system.equation(1);
    let last = eq.ops.iter().map(|o| o.degree).max().unwrap_or(0);
    let reach = match &eq.family {
        Some(f) => last.max(f.from) + depth.max(INSPECTION_DEPTH),
        None => last,
    };
    let mut ops = Vec::new();
    for q in system.degrees(1, reach) {
        let s = system.series(1, q, depth)?.expect("degree listed");
        if !s.is_zero() {
            ops.push((q, s));
        }
    }
    classify_single(&ops)
}

/// The first-family equation with operator degrees `degrees`.
pub fn build_case1(degrees: &DegreeSpec, lambda: &Q, mu: &Q) -> Result<Sdse> {
    degrees.validate()?;
    let one = || SeriesExpr::Num(Q::one());
    let mut sys = Sdse::new(1);
    for q in degrees.explicit_below_tail() {
        let start = lambda * int(q as i64) - mu;
        let f = rising_expr(1, &start, &Q::zero(), mu).unwrap_or_else(one);
        sys = sys.with_op(1, q, f);
    }
    if let Some(q0) = degrees.from {
        let template = rising_expr(1, &-mu.clone(), lambda, mu).unwrap_or_else(one);
        sys = sys.with_family(1, q0, template);
    }
    Ok(sys)
}

fn case2_checks(m: u32, alpha: &Q) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidData("case 2 needs m >= 1".into()));
    }
    if alpha.is_zero() {
        return Err(Error::InvalidData("case 2 needs alpha != 0".into()));
    }
    Ok(())
}

/// The second-family equation: `B_j(1 + αx)` for `m | j`, `B_j(1)` otherwise.
pub fn build_case2(degrees: &DegreeSpec, m: u32, alpha: &Q) -> Result<Sdse> {
    degrees.validate()?;
    case2_checks(m, alpha)?;
    let affine = linear(&Q::one(), &[(1, alpha.clone())]);
    let mut sys = Sdse::new(1);
    for q in degrees.explicit_below_tail() {
        let f = if q % m == 0 { affine.clone() } else { SeriesExpr::Num(Q::one()) };
        sys = sys.with_op(1, q, f);
    }
    if let Some(q0) = degrees.from {
        if m != 1 {
            return Err(Error::InvalidData(
                "an open degree range with m > 1 cannot be written as one family".into(),
            ));
        }
        sys = sys.with_family(1, q0, affine);
    }
    Ok(sys)
}

/// Like [`build_case2`] with the affine and constant degrees given apart;
/// fails unless `m` divides every affine degree and no constant one.
pub fn build_case2_split(affine: &[u32], constant: &[u32], m: u32, alpha: &Q) -> Result<Sdse> {
    case2_checks(m, alpha)?;
    if let Some(j) = affine.iter().find(|&&j| j % m != 0) {
        return Err(Error::InvalidData(format!(
            "case-2 divisibility violated: {} does not divide {}",
            m, j
        )));
    }
    if let Some(j) = constant.iter().find(|&&j| j % m == 0) {
        return Err(Error::InvalidData(format!(
            "case-2 divisibility violated: {} divides the constant degree {}",
            m, j
        )));
    }
    let mut all: Vec<u32> = affine.iter().chain(constant).copied().collect();
    all.sort_unstable();
    all.dedup();
    if all.len() != affine.len() + constant.len() {
        return Err(Error::InvalidData("a degree is both affine and constant".into()));
    }
    build_case2(&DegreeSpec::finite(&all), m, alpha)
}
