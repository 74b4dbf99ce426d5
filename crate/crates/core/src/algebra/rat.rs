//! Exact rationals and the extended value `Rat ∪ {+∞}`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Reduced arbitrary-precision rational with positive denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p`, `p/q` (surrounding whitespace ignored).
pub fn parse_rat(text: &str) -> Result<Rat> {
    let s = text.trim();
    let bad = |msg: &str| Error::Syntax { pos: 0, msg: format!("{msg} in rational `{text}`") };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad("bad numerator"))?;
    if den.starts_with('-') || den.starts_with('+') {
        return Err(bad("signed denominator"));
    }
    let den: BigInt = den.parse().map_err(|_| bad("bad denominator"))?;
    if den.is_zero() {
        return Err(Error::ZeroDenominator { pos: 0 });
    }
    Ok(Rat::new(num, den))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact `n`-th root of a rational, if it is rational. Negative radicands
/// are accepted for odd `n`.
pub fn rational_root(r: &Rat, n: u32) -> Option<Rat> {
    if n == 0 {
        return None;
    }
    if n == 1 || r.is_zero() {
        return Some(r.clone());
    }
    if r.is_negative() {
        if n.is_multiple_of(2) {
            return None;
        }
        return rational_root(&-r, n).map(|x| -x);
    }
    let num = r.numer().nth_root(n);
    let den = r.denom().nth_root(n);
    if num.pow(n) == *r.numer() && den.pow(n) == *r.denom() {
        Some(Rat::new(num, den))
    } else {
        None
    }
}

/// Scales a list of positive rationals to the primitive integer vector on
/// the same ray.
pub fn primitive_ray(entries: &[Rat]) -> Vec<BigInt> {
    let lcm = entries.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = entries.iter().map(|r| (r * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

/// A rational or `+∞`; `+∞` compares greater than every rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRat {
    Finite(Rat),
    Infinity,
}

impl ExtRat {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtRat::Finite(r) => Some(r),
            ExtRat::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRat::Infinity)
    }
}

impl From<Rat> for ExtRat {
    fn from(r: Rat) -> Self {
        ExtRat::Finite(r)
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => a.cmp(b),
            (ExtRat::Finite(_), ExtRat::Infinity) => Ordering::Less,
            (ExtRat::Infinity, ExtRat::Finite(_)) => Ordering::Greater,
            (ExtRat::Infinity, ExtRat::Infinity) => Ordering::Equal,
        }
    }
}

impl std::ops::Add for ExtRat {
    type Output = ExtRat;
    fn add(self, rhs: ExtRat) -> ExtRat {
        match (self, rhs) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a + b),
            _ => ExtRat::Infinity,
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Finite(r) => write!(f, "{r}"),
            ExtRat::Infinity => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("5/6").unwrap(), rat(5, 6));
        assert_eq!(parse_rat(" -4/8 ").unwrap(), rat(-1, 2));
        assert_eq!(fmt_rat(&rat(4, 2)), "2");
        assert_eq!(fmt_rat(&rat(-2, 6)), "-1/3");
        assert!(matches!(parse_rat("1/0"), Err(Error::ZeroDenominator { .. })));
        assert!(parse_rat("1/-2").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn roots() {
        assert_eq!(rational_root(&rat(8, 27), 3), Some(rat(2, 3)));
        assert_eq!(rational_root(&rat(-8, 27), 3), Some(rat(-2, 3)));
        assert_eq!(rational_root(&rat(4, 1), 3), None);
        assert_eq!(rational_root(&rat(-4, 1), 2), None);
    }

    #[test]
    fn rays() {
        let r = primitive_ray(&[rat(3, 4), int(1)]);
        assert_eq!(r, vec![BigInt::from(3), BigInt::from(4)]);
        let r = primitive_ray(&[int(4), int(6)]);
        assert_eq!(r, vec![BigInt::from(2), BigInt::from(3)]);
    }

    #[test]
    fn infinity_orders_last() {
        assert!(ExtRat::Finite(int(1_000_000)) < ExtRat::Infinity);
        assert_eq!(ExtRat::Finite(int(1)) + ExtRat::Infinity, ExtRat::Infinity);
    }
}
