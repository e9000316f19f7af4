//! Exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn factorial_q(n: u32) -> Q {
    Q::from_integer(factorial(n))
}

/// `p` or `p/q`, sign on the numerator.
pub fn format(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `INT` or `INT/INT`, with an optional leading sign.
pub fn parse(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// Integer value of `q` if it is a (small) integer.
pub fn to_i64(q: &Q) -> Option<i64> {
    use num_traits::ToPrimitive;
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn is_nonneg_integer(q: &Q) -> bool {
    q.is_integer() && !q.is_negative()
}

/// Generalized binomial coefficient `e(e-1)...(e-k+1)/k!`.
pub fn binomial(e: &Q, k: u32) -> Q {
    let mut acc = one();
    for i in 0..k {
        acc = acc * (e - int(i as i64)) / int(i as i64 + 1);
    }
    acc
}
