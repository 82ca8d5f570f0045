//! Real numbers given by refinable rational enclosures, used by the
//! interval backend for parameters outside any number field we model.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, SrsError};
use crate::interval::{fmt_rat, parse_rat, pow2, sqrt_lower, sqrt_upper, RatInterval};

#[derive(Clone, Debug, PartialEq)]
pub enum RealAtom {
    /// A decimal literal known to within `radius`. Does not refine.
    Literal { value: BigRational, radius: BigRational },
    /// `sqrt(q)` for a non-negative rational `q`.
    Sqrt(BigRational),
    Pi,
}

/// `scale * atom`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedReal {
    pub scale: BigRational,
    pub atom: RealAtom,
}

/// `atan(1/x)` for an integer `x >= 2`, enclosed via the alternating series.
fn atan_inv(x: i64, bits: u32) -> RatInterval {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let eps = BigRational::new(BigInt::one(), pow2(bits + 4));
    let mut sum = BigRational::zero();
    let mut pw = x.clone();
    let mut k = 0u64;
    loop {
        let term = BigRational::new(BigInt::one(), BigInt::from(2 * k + 1) * &pw);
        if term < eps {
            // Alternating with decreasing terms: the limit lies between the
            // current partial sum and the next one.
            let next = if k % 2 == 0 { &sum + &term } else { &sum - &term };
            let (lo, hi) = if sum <= next { (sum, next) } else { (next, sum) };
            return RatInterval::new(lo, hi);
        }
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pw *= &x2;
        k += 1;
    }
}

impl CertifiedReal {
    pub fn literal(value: BigRational, radius: BigRational) -> Self {
        CertifiedReal { scale: BigRational::one(), atom: RealAtom::Literal { value, radius } }
    }

    /// Can the enclosure be made arbitrarily tight?
    pub fn refinable(&self) -> bool {
        !matches!(self.atom, RealAtom::Literal { .. }) || self.scale.is_zero()
    }

    /// Enclosure whose width is at most about `2^-bits` (for refinable atoms).
    pub fn enclosure(&self, bits: u32) -> RatInterval {
        let b = bits + 8 + self.scale.numer().bits() as u32;
        let base = match &self.atom {
            RealAtom::Literal { value, radius } => {
                RatInterval::new(value - radius, value + radius)
            }
            RealAtom::Sqrt(q) => RatInterval::new(sqrt_lower(q, b), sqrt_upper(q, b)),
            RealAtom::Pi => {
                let a = atan_inv(5, b).scale(&BigRational::from_integer(16.into()));
                let c = atan_inv(239, b).scale(&BigRational::from_integer(4.into()));
                a.sub(&c)
            }
        };
        base.scale(&self.scale)
    }

    /// Parses `[k*]atom` where atom is a decimal literal, `sqrt(q)` or `pi`.
    /// Literals carry a radius of half a unit in their last digit.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (scale, atom) = match s.rsplit_once('*') {
            Some((k, a)) => (
                parse_rat(k).ok_or_else(|| SrsError::Parse(format!("bad scale '{k}'")))?,
                a.trim(),
            ),
            None => (BigRational::one(), s),
        };
        let (scale, atom) = match atom.strip_prefix('-') {
            Some(rest) if rest.starts_with("sqrt") || rest == "pi" => (-scale, rest),
            _ => (scale, atom),
        };
        let atom = if atom == "pi" {
            RealAtom::Pi
        } else if let Some(inner) = atom.strip_prefix("sqrt(").and_then(|t| t.strip_suffix(')')) {
            let q = parse_rat(inner).ok_or_else(|| SrsError::Parse(format!("bad radicand '{inner}'")))?;
            if q.is_negative() {
                return Err(SrsError::Parse("negative radicand".into()));
            }
            RealAtom::Sqrt(q)
        } else {
            let value = parse_rat(atom).ok_or_else(|| SrsError::Parse(format!("bad real literal '{atom}'")))?;
            let decimals = atom.split_once('.').map_or(0, |(_, f)| f.len());
            let radius = BigRational::new(BigInt::from(5), num_traits::pow(BigInt::from(10), decimals + 1));
            RealAtom::Literal { value, radius }
        };
        Ok(CertifiedReal { scale, atom })
    }
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match &self.atom {
            RealAtom::Literal { value, radius } => format!("{}±{}", fmt_rat(value), fmt_rat(radius)),
            RealAtom::Sqrt(q) => format!("sqrt({})", fmt_rat(q)),
            RealAtom::Pi => "pi".to_string(),
        };
        if self.scale.is_one() {
            write!(f, "{a}")
        } else {
            write!(f, "{}*{a}", fmt_rat(&self.scale))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    #[test]
    fn pi_enclosure() {
        let p = CertifiedReal::parse("pi").unwrap().enclosure(60);
        assert!(p.lo < rat(314159265358979324, 100000000000000000));
        assert!(p.hi > rat(314159265358979323, 100000000000000000));
        assert!(p.width() < rat(1, 1 << 58));
    }

    #[test]
    fn scaled_sqrt() {
        let x = CertifiedReal::parse("1/2*sqrt(2)").unwrap();
        let e = x.enclosure(50);
        let sq = e.mul(&e);
        assert!(sq.contains(&rat(1, 2)));
        let y = CertifiedReal::parse("-sqrt(2)").unwrap().enclosure(30);
        assert!(y.hi < rat(-14142, 10000));
    }

    #[test]
    fn literal_radius() {
        let x = CertifiedReal::parse("0.71").unwrap();
        assert!(!x.refinable());
        assert_eq!(x.enclosure(100).width(), rat(1, 100));
    }
}
