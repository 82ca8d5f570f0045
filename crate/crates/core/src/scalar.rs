//! Backend scalars: exact rationals, exact elements of Q(β), or rational
//! enclosures of reals. Mixed operations promote rationals into the other kind.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Result, SrsError};
use crate::field::FieldElem;
use crate::interval::{floor_rat, fmt_rat, rat_int, rat_to_f64, RatInterval};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Algebraic(FieldElem),
    Interval(RatInterval),
}

impl Scalar {
    pub fn zero_like(&self) -> Scalar {
        match self {
            Scalar::Rational(_) => Scalar::Rational(BigRational::zero()),
            Scalar::Algebraic(e) => Scalar::Algebraic(FieldElem::zero(e.field())),
            Scalar::Interval(_) => Scalar::Interval(RatInterval::zero()),
        }
    }

    pub fn one_like(&self) -> Scalar {
        self.int_like(&BigInt::one())
    }

    pub fn int_like(&self, n: &BigInt) -> Scalar {
        match self {
            Scalar::Rational(_) => Scalar::Rational(rat_int(n)),
            Scalar::Algebraic(e) => Scalar::Algebraic(FieldElem::from_int(e.field(), n)),
            Scalar::Interval(_) => Scalar::Interval(RatInterval::from_int(n)),
        }
    }

    fn promote(a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
        use Scalar::*;
        match (a, b) {
            (Rational(q), Algebraic(e)) => (Algebraic(FieldElem::from_rat(e.field(), q.clone())), b.clone()),
            (Algebraic(e), Rational(q)) => (a.clone(), Algebraic(FieldElem::from_rat(e.field(), q.clone()))),
            (Rational(q), Interval(_)) => (Interval(RatInterval::point(q.clone())), b.clone()),
            (Interval(_), Rational(q)) => (a.clone(), Interval(RatInterval::point(q.clone()))),
            (Algebraic(e), Interval(_)) => (Interval(e.enclose(160)), b.clone()),
            (Interval(_), Algebraic(e)) => (a.clone(), Interval(e.enclose(160))),
            _ => (a.clone(), b.clone()),
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        use Scalar::*;
        match (self, o) {
            (Rational(a), Rational(b)) => Rational(a + b),
            (Algebraic(a), Algebraic(b)) => Algebraic(a.add(b)),
            (Interval(a), Interval(b)) => Interval(a.add(b)),
            _ => {
                let (a, b) = Self::promote(self, o);
                a.add(&b)
            }
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Algebraic(a) => Scalar::Algebraic(a.neg()),
            Scalar::Interval(a) => Scalar::Interval(a.neg()),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        use Scalar::*;
        match (self, o) {
            (Rational(a), Rational(b)) => Rational(a * b),
            (Algebraic(a), Algebraic(b)) => Algebraic(a.mul(b)),
            (Interval(a), Interval(b)) => Interval(a.mul(b)),
            (Rational(q), Algebraic(e)) | (Algebraic(e), Rational(q)) => Algebraic(e.scale(q)),
            _ => {
                let (a, b) = Self::promote(self, o);
                a.mul(&b)
            }
        }
    }

    pub fn scale_int(&self, n: &BigInt) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(a * rat_int(n)),
            Scalar::Algebraic(a) => Scalar::Algebraic(a.scale_int(n)),
            Scalar::Interval(a) => Scalar::Interval(a.scale_int(n)),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(a * q),
            Scalar::Algebraic(a) => Scalar::Algebraic(a.scale(q)),
            Scalar::Interval(a) => Scalar::Interval(a.scale(q)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(a) => a.is_zero(),
            Scalar::Algebraic(a) => a.is_zero(),
            Scalar::Interval(a) => a.is_point() && a.lo.is_zero(),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Interval(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_field(&self) -> Option<&FieldElem> {
        match self {
            Scalar::Algebraic(e) => Some(e),
            _ => None,
        }
    }

    /// Rational enclosure of width at most `2^-bits` where refinable.
    pub fn enclose(&self, bits: u32) -> RatInterval {
        match self {
            Scalar::Rational(a) => RatInterval::point(a.clone()),
            Scalar::Algebraic(a) => a.enclose(bits),
            Scalar::Interval(a) => a.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(a) => rat_to_f64(a),
            Scalar::Algebraic(a) => a.to_f64(),
            Scalar::Interval(a) => a.mid_f64(),
        }
    }

    pub fn floor(&self) -> Result<BigInt> {
        match self {
            Scalar::Rational(a) => Ok(floor_rat(a)),
            Scalar::Algebraic(a) => a.floor(),
            Scalar::Interval(a) => a.floor_if_determined().ok_or_else(|| {
                SrsError::PrecisionCap(format!("floor of {} not determined", a))
            }),
        }
    }

    /// Exact textual form: `p/q`, a polynomial in `b` (for β), or `[lo, hi]`.
    pub fn exact_string(&self) -> String {
        match self {
            Scalar::Rational(a) => fmt_rat(a),
            Scalar::Algebraic(a) => a.to_string(),
            Scalar::Interval(a) => a.to_string(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact_string())
    }
}
