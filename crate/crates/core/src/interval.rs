//! Closed intervals with rational endpoints, plus the rounding helpers used
//! to keep endpoint sizes bounded.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

pub fn floor_rat(q: &BigRational) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn ceil_rat(q: &BigRational) -> BigInt {
    -((-q.numer()).div_floor(q.denom()))
}

/// Fractional part `q - floor(q)`, in `[0, 1)`.
pub fn frac_rat(q: &BigRational) -> BigRational {
    q - rat_int(&floor_rat(q))
}

pub fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// Largest multiple of `2^-bits` that is `<= q`.
pub fn round_down(q: &BigRational, bits: u32) -> BigRational {
    let s = pow2(bits);
    BigRational::new((q.numer() * &s).div_floor(q.denom()), s)
}

/// Smallest multiple of `2^-bits` that is `>= q`.
pub fn round_up(q: &BigRational, bits: u32) -> BigRational {
    let s = pow2(bits);
    let n = q.numer() * &s;
    BigRational::new(-((-n).div_floor(q.denom())), s)
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division for extreme exponents.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact rational value of a finite `f64`.
pub fn f64_to_rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Rational upper bound of `sqrt(q)` with absolute error below `2^-bits`.
pub fn sqrt_upper(q: &BigRational, bits: u32) -> BigRational {
    assert!(!q.is_negative());
    let scale = pow2(bits);
    // sqrt(n/d) = sqrt(n*d)/d; scale by 2^bits.
    let nd = q.numer() * q.denom() * &scale * &scale;
    let s = nd.sqrt();
    let s = if &s * &s == nd { s } else { s + 1 };
    BigRational::new(s, q.denom() * scale)
}

/// Rational lower bound of `sqrt(q)` with absolute error below `2^-bits`.
pub fn sqrt_lower(q: &BigRational, bits: u32) -> BigRational {
    assert!(!q.is_negative());
    let scale = pow2(bits);
    let nd = q.numer() * q.denom() * &scale * &scale;
    BigRational::new(nd.sqrt(), q.denom() * scale)
}

/// Exact rational power with integer exponent.
pub fn rat_pow(q: &BigRational, n: usize) -> BigRational {
    num_traits::pow(q.clone(), n)
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn fmt_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `p/q` or a decimal literal such as `-0.55` exactly.
pub fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit())
            || !ip_digits.chars().all(|c| c.is_ascii_digit())
            || (ip_digits.is_empty() && fp.is_empty())
        {
            return None;
        }
        let digits = format!("{}{}", ip_digits, fp);
        let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let q = BigRational::new(n, d);
        return Some(if neg { -q } else { q });
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "empty interval");
        RatInterval { lo, hi }
    }

    pub fn point(q: BigRational) -> Self {
        RatInterval { lo: q.clone(), hi: q }
    }

    pub fn from_int(n: &BigInt) -> Self {
        Self::point(rat_int(n))
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn mid_f64(&self) -> f64 {
        rat_to_f64(&self.mid())
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn add(&self, o: &Self) -> Self {
        RatInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RatInterval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Self {
        RatInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_negative() {
            RatInterval { lo: &self.hi * q, hi: &self.lo * q }
        } else {
            RatInterval { lo: &self.lo * q, hi: &self.hi * q }
        }
    }

    pub fn scale_int(&self, n: &BigInt) -> Self {
        self.scale(&rat_int(n))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_point() {
            return o.scale(&self.lo);
        }
        if o.is_point() {
            return self.scale(&o.lo);
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    /// Interval division; `None` when the divisor contains zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let inv = RatInterval { lo: o.hi.recip(), hi: o.lo.recip() };
        Some(self.mul(&inv))
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let m = if -&self.lo > self.hi { -&self.lo } else { self.hi.clone() };
            RatInterval { lo: BigRational::zero(), hi: m }
        }
    }

    /// Enclosure of `max(a, b)` over all choices in the two intervals.
    pub fn max(&self, o: &Self) -> Self {
        RatInterval {
            lo: std::cmp::max(&self.lo, &o.lo).clone(),
            hi: std::cmp::max(&self.hi, &o.hi).clone(),
        }
    }

    pub fn hull(&self, o: &Self) -> Self {
        RatInterval {
            lo: std::cmp::min(&self.lo, &o.lo).clone(),
            hi: std::cmp::max(&self.hi, &o.hi).clone(),
        }
    }

    /// Outward rounding of both endpoints to the dyadic grid `2^-bits`.
    pub fn round(&self, bits: u32) -> Self {
        if self.is_point() && self.lo.denom().bits() <= bits as u64 + 1 {
            return self.clone();
        }
        RatInterval { lo: round_down(&self.lo, bits), hi: round_up(&self.hi, bits) }
    }

    /// `Some(floor)` when every point of the interval has the same floor.
    pub fn floor_if_determined(&self) -> Option<BigInt> {
        let a = floor_rat(&self.lo);
        let b = floor_rat(&self.hi);
        (a == b).then_some(a)
    }

    /// Certain comparison with a rational: `Some(ordering)` if decided.
    pub fn cmp_rat(&self, q: &BigRational) -> Option<Ordering> {
        if &self.hi < q {
            Some(Ordering::Less)
        } else if &self.lo > q {
            Some(Ordering::Greater)
        } else if self.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", fmt_rat(&self.lo))
        } else {
            write!(f, "[{}, {}]", fmt_rat(&self.lo), fmt_rat(&self.hi))
        }
    }
}

/// Complex number with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl ComplexRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ComplexRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        ComplexRat { re, im: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        ComplexRat { re: &self.re * q, im: &self.im * q }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        ComplexRat { re: self.re.clone(), im: -&self.im }
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        let n = o.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let p = self.mul(&o.conj());
        Some(ComplexRat { re: p.re / &n, im: p.im / n })
    }

    pub fn round(&self, bits: u32) -> Self {
        ComplexRat { re: round_down(&self.re, bits), im: round_down(&self.im, bits) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("13/20").unwrap(), rat(13, 20));
        assert_eq!(parse_rat("-0.55").unwrap(), rat(-11, 20));
        assert_eq!(parse_rat("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("3").unwrap(), rat(3, 1));
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("abc").is_none());
        assert_eq!(fmt_rat(&rat(-7, 20)), "-7/20");
        assert_eq!(fmt_rat(&rat(4, 2)), "2");
    }

    #[test]
    fn floors_and_rounding() {
        assert_eq!(floor_rat(&rat(-7, 20)), BigInt::from(-1));
        assert_eq!(ceil_rat(&rat(-7, 20)), BigInt::from(0));
        assert_eq!(frac_rat(&rat(-7, 20)), rat(13, 20));
        let q = rat(1, 3);
        assert!(round_down(&q, 10) <= q && q <= round_up(&q, 10));
        assert!(round_up(&q, 10) - round_down(&q, 10) <= rat(1, 1024));
    }

    #[test]
    fn sqrt_bounds() {
        let two = rat(2, 1);
        let lo = sqrt_lower(&two, 40);
        let hi = sqrt_upper(&two, 40);
        assert!(&lo * &lo <= two && two <= &hi * &hi);
        assert!(hi - lo <= rat(1, 1 << 39));
    }

    #[test]
    fn interval_mul_contains_products() {
        let a = RatInterval::new(rat(-1, 2), rat(3, 4));
        let b = RatInterval::new(rat(-2, 1), rat(1, 3));
        let p = a.mul(&b);
        for x in [rat(-1, 2), rat(0, 1), rat(3, 4)] {
            for y in [rat(-2, 1), rat(1, 3)] {
                assert!(p.contains(&(&x * &y)));
            }
        }
    }
}
