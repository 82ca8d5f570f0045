//! Exact arithmetic in Q(β) for a real algebraic integer β given by its
//! monic minimal polynomial. Elements are stored in the power basis.
//! Real-valued questions (floor, sign) are answered from a shrinking
//! isolating interval of β, shared by all elements of the field.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::Ball;
use crate::error::{Result, SrsError};
use crate::interval::{
    floor_rat, fmt_rat, rat_int, rat_to_f64, sqrt_upper, ComplexRat, RatInterval,
};
use crate::poly::{certify_roots, degree, rational_roots, refine_real_root, RootDisc};

/// Working-precision cap (bits of the isolating interval of β).
pub const MAX_BITS: u32 = 8192;

/// Scale (bits) of the fixed-point table of powers of β.
const FIXED_BITS: u32 = 320;

#[derive(Debug)]
pub struct NumberField {
    minpoly: Vec<BigInt>,
    degree: usize,
    /// Certified discs for all roots, ordered as in `certify_roots`.
    roots: Vec<RootDisc>,
    beta_index: usize,
    beta: RwLock<(RatInterval, u32)>,
    /// `floor(β^k 2^P)` and `ceil(β^k 2^P)` for `k < degree`.
    fixed: OnceLock<Vec<(BigInt, BigInt)>>,
}

impl NumberField {
    /// Field generated by the largest real root of a monic integer
    /// polynomial. Irreducibility is certified either by the rational root
    /// test (degree <= 3) or by a Pisot configuration of the roots (a monic
    /// integer factor with all roots inside the unit disc would have
    /// constant term 0, which is excluded by `p(0) != 0`).
    pub fn new(minpoly: &[BigInt]) -> Result<Arc<NumberField>> {
        let minpoly = crate::poly::trim(minpoly.to_vec());
        let d = degree(&minpoly).ok_or_else(|| SrsError::InvalidPolynomial("zero polynomial".into()))?;
        if d < 2 {
            return Err(SrsError::InvalidPolynomial("degree must be at least 2".into()));
        }
        if !minpoly[d].is_one() {
            return Err(SrsError::InvalidPolynomial("polynomial must be monic".into()));
        }
        if minpoly[0].is_zero() {
            return Err(SrsError::InvalidPolynomial("constant term must be non-zero".into()));
        }
        let tight = BigRational::new(BigInt::one(), crate::interval::pow2(64));
        let roots = certify_roots(&minpoly, &tight)?;
        let beta_index = roots
            .iter()
            .rposition(|r| r.is_real)
            .ok_or_else(|| SrsError::InvalidPolynomial("no real root".into()))?;
        let irreducible = if d <= 3 {
            rational_roots(&minpoly).is_empty()
        } else {
            let others_inside = roots
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != beta_index)
                .all(|(_, r)| r.inside_unit_disc() == Some(true));
            others_inside && roots[beta_index].inside_unit_disc() == Some(false)
        };
        if !irreducible {
            return Err(SrsError::InvalidPolynomial(
                "irreducibility over Q could not be certified".into(),
            ));
        }
        let iv = refine_real_root(&minpoly, &roots[beta_index].real_interval(), 128);
        Ok(Arc::new(NumberField {
            degree: d,
            minpoly,
            roots,
            beta_index,
            beta: RwLock::new((iv, 128)),
            fixed: OnceLock::new(),
        }))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn roots(&self) -> &[RootDisc] {
        &self.roots
    }

    pub fn beta_index(&self) -> usize {
        self.beta_index
    }

    /// Discs of the roots other than β, in the canonical order.
    pub fn conjugate_discs(&self) -> Vec<RootDisc> {
        self.roots
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.beta_index)
            .map(|(_, r)| r.clone())
            .collect()
    }

    /// Current isolating interval of β together with its precision.
    pub fn beta_interval(&self) -> (RatInterval, u32) {
        self.beta.read().unwrap().clone()
    }

    /// Ensures the isolating interval has width at most `2^-bits`.
    pub fn refine_beta(&self, bits: u32) {
        {
            let g = self.beta.read().unwrap();
            if g.1 >= bits {
                return;
            }
        }
        let mut g = self.beta.write().unwrap();
        if g.1 < bits {
            let iv = refine_real_root(&self.minpoly, &g.0, bits);
            *g = (iv, bits);
        }
    }

    fn fixed_powers(&self) -> &[(BigInt, BigInt)] {
        self.fixed.get_or_init(|| {
            self.refine_beta(FIXED_BITS + 64);
            let (iv, _) = self.beta_interval();
            let scale = rat_int(&crate::interval::pow2(FIXED_BITS));
            let mut p = RatInterval::point(BigRational::one());
            let mut out = Vec::with_capacity(self.degree);
            for _ in 0..self.degree {
                out.push((floor_rat(&(&p.lo * &scale)), crate::interval::ceil_rat(&(&p.hi * &scale))));
                p = p.mul(&iv).round(FIXED_BITS + 64);
            }
            out
        })
    }

    /// Enclosure `lo/s <= Σ n_k β^k <= hi/s` for integers `n_k`, returned
    /// as `(lo, hi, s)`.
    pub fn fixed_eval(&self, n: &[BigInt]) -> (BigInt, BigInt, BigInt) {
        let pw = self.fixed_powers();
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (c, (l, h)) in n.iter().zip(pw) {
            if c.is_positive() {
                lo += c * l;
                hi += c * h;
            } else if c.is_negative() {
                lo += c * h;
                hi += c * l;
            }
        }
        (lo, hi, crate::interval::pow2(FIXED_BITS))
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta_interval().0.mid_f64()
    }
}

#[derive(Clone)]
pub struct FieldElem {
    field: Arc<NumberField>,
    c: Vec<BigRational>,
}

impl PartialEq for FieldElem {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}
impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c.hash(state)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match k {
                0 => fmt_rat(c),
                1 => format!("{}*b", fmt_rat(c)),
                _ => format!("{}*b^{}", fmt_rat(c), k),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl FieldElem {
    pub fn new(field: &Arc<NumberField>, mut c: Vec<BigRational>) -> Self {
        let d = field.degree;
        assert!(c.len() <= d, "coefficient vector longer than the field degree");
        c.resize(d, BigRational::zero());
        FieldElem { field: field.clone(), c }
    }

    pub fn from_rat(field: &Arc<NumberField>, q: BigRational) -> Self {
        Self::new(field, vec![q])
    }

    pub fn from_int(field: &Arc<NumberField>, n: &BigInt) -> Self {
        Self::from_rat(field, rat_int(n))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::new(field, vec![])
    }

    /// The generator β.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::new(field, vec![BigRational::zero(), BigRational::one()])
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(|x| x.is_zero())
    }

    /// Membership in Z[β] (integer power-basis coefficients).
    pub fn is_integral(&self) -> bool {
        self.c.iter().all(|x| x.is_integer())
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect();
        FieldElem { field: self.field.clone(), c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect();
        FieldElem { field: self.field.clone(), c }
    }

    pub fn neg(&self) -> Self {
        FieldElem { field: self.field.clone(), c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        FieldElem { field: self.field.clone(), c: self.c.iter().map(|a| a * q).collect() }
    }

    pub fn scale_int(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return FieldElem::zero(&self.field);
        }
        FieldElem {
            field: self.field.clone(),
            c: self.c.iter().map(|a| a * rat_int(n)).collect(),
        }
    }

    pub fn add_int(&self, n: &BigInt) -> Self {
        let mut c = self.c.clone();
        c[0] += rat_int(n);
        FieldElem { field: self.field.clone(), c }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.field.degree;
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let f = &self.field.minpoly;
        for k in (d..prod.len()).rev() {
            let t = std::mem::replace(&mut prod[k], BigRational::zero());
            if t.is_zero() {
                continue;
            }
            for i in 0..d {
                prod[k - d + i] -= &t * rat_int(&f[i]);
            }
        }
        prod.truncate(d);
        FieldElem { field: self.field.clone(), c: prod }
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = FieldElem::from_rat(&self.field, BigRational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse, by solving `self * y = 1` in the power basis.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.field.degree;
        // Column j of the multiplication matrix is self * β^j.
        let mut cols = Vec::with_capacity(d);
        let mut bj = FieldElem::from_rat(&self.field, BigRational::one());
        let b = FieldElem::generator(&self.field);
        for _ in 0..d {
            cols.push(self.mul(&bj).c);
            bj = bj.mul(&b);
        }
        let mut a: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..d).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        let x = crate::linalg::solve_rational(&mut a)?;
        Some(FieldElem { field: self.field.clone(), c: x })
    }

    /// `(lo, hi, s)` with `lo/s <= value <= hi/s`, from the fixed-point
    /// power table. Integer arithmetic only.
    fn enclose_fixed(&self) -> (BigInt, BigInt, BigInt) {
        let den = self.c.iter().fold(BigInt::one(), |l, q| num_integer::Integer::lcm(&l, q.denom()));
        let nums: Vec<BigInt> = self.c.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        let (lo, hi, s) = self.field.fixed_eval(&nums);
        (lo, hi, s * den)
    }

    fn floor_fixed(&self) -> Option<BigInt> {
        use num_integer::Integer;
        let (lo, hi, s) = self.enclose_fixed();
        let a = lo.div_floor(&s);
        if a == hi.div_floor(&s) {
            Some(a)
        } else {
            None
        }
    }

    /// Enclosure of the real value from the current interval of β.
    fn enclose_current(&self) -> RatInterval {
        let (iv, _) = self.field.beta_interval();
        if self.is_rational() {
            return RatInterval::point(self.c[0].clone());
        }
        let m = iv.mid();
        let h = &iv.hi - &m;
        // Exact value at the midpoint plus a Taylor-type remainder bound:
        // |P(m+e) - P(m)| <= Q(|m|+h) - Q(|m|), Q with |coefficients|.
        let mut val = BigRational::zero();
        for c in self.c.iter().rev() {
            val = val * &m + c;
        }
        let am = m.abs();
        let ah = &am + &h;
        let mut q1 = BigRational::zero();
        let mut q0 = BigRational::zero();
        for c in self.c.iter().rev() {
            q1 = q1 * &ah + c.abs();
            q0 = q0 * &am + c.abs();
        }
        let err = q1 - q0;
        RatInterval::new(&val - &err, &val + &err)
    }

    /// Enclosure of the real value of width at most `2^-bits`.
    pub fn enclose(&self, bits: u32) -> RatInterval {
        if self.is_rational() {
            return RatInterval::point(self.c[0].clone());
        }
        let target = BigRational::new(BigInt::one(), crate::interval::pow2(bits));
        if bits + 64 <= FIXED_BITS {
            let (lo, hi, s) = self.enclose_fixed();
            let e = RatInterval::new(BigRational::new(lo, s.clone()), BigRational::new(hi, s));
            if e.width() <= target {
                return e;
            }
        }
        loop {
            let e = self.enclose_current();
            let cur = self.field.beta_interval().1;
            if e.width() <= target || cur >= MAX_BITS {
                return e;
            }
            self.field.refine_beta((cur + 32).max(cur * 3 / 2).min(MAX_BITS));
        }
    }

    /// Exact floor of the real value.
    pub fn floor(&self) -> Result<BigInt> {
        if self.is_rational() {
            return Ok(floor_rat(&self.c[0]));
        }
        if let Some(f) = self.floor_fixed() {
            return Ok(f);
        }
        loop {
            let e = self.enclose_current();
            if let Some(f) = e.floor_if_determined() {
                return Ok(f);
            }
            let cur = self.field.beta_interval().1;
            if cur >= MAX_BITS {
                return Err(SrsError::PrecisionCap(format!(
                    "floor of {} unresolved at {} bits",
                    self, cur
                )));
            }
            self.field.refine_beta((cur + 32).max(cur * 3 / 2).min(MAX_BITS));
        }
    }

    /// Fractional part, exactly.
    pub fn fract(&self) -> Result<Self> {
        let f = self.floor()?;
        Ok(self.add_int(&-f))
    }

    /// Sign of the real value (exact: non-zero elements are separated from 0).
    pub fn signum(&self) -> Result<Ordering> {
        if self.is_rational() {
            return Ok(self.c[0].cmp(&BigRational::zero()));
        }
        let (lo, hi, _) = self.enclose_fixed();
        if lo.is_positive() {
            return Ok(Ordering::Greater);
        }
        if hi.is_negative() {
            return Ok(Ordering::Less);
        }
        loop {
            let e = self.enclose_current();
            if let Some(o) = e.cmp_rat(&BigRational::zero()) {
                return Ok(o);
            }
            let cur = self.field.beta_interval().1;
            if cur >= MAX_BITS {
                return Err(SrsError::PrecisionCap("sign unresolved".into()));
            }
            self.field.refine_beta((cur + 32).max(cur * 3 / 2).min(MAX_BITS));
        }
    }

    pub fn cmp_real(&self, o: &Self) -> Result<Ordering> {
        self.sub(o).signum()
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(64).mid_f64()
    }

    /// Value at a conjugate root given by a certified disc, as a complex
    /// ball with a rigorous radius.
    pub fn eval_conjugate(&self, disc: &RootDisc) -> Ball {
        let z = &disc.center;
        let mut v = ComplexRat::zero();
        for c in self.c.iter().rev() {
            v = v.mul(z).add(&ComplexRat::real(c.clone()));
        }
        let am = sqrt_upper(&z.norm_sqr(), 80);
        let ah = &am + &disc.radius;
        let mut q1 = BigRational::zero();
        let mut q0 = BigRational::zero();
        for c in self.c.iter().rev() {
            q1 = q1 * &ah + c.abs();
            q0 = q0 * &am + c.abs();
        }
        let err = rat_to_f64(&(q1 - q0));
        let (re, im) = v.to_f64();
        let conv = (re.abs() + im.abs()) * f64::EPSILON;
        Ball::new(num_complex::Complex64::new(re, im), (err + conv) * (1.0 + 1e-12) + 1e-300)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    fn golden() -> Arc<NumberField> {
        NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]).unwrap()
    }

    #[test]
    fn golden_ratio_arithmetic() {
        let k = golden();
        let b = FieldElem::generator(&k);
        // β^2 = β + 1
        let b2 = b.mul(&b);
        assert_eq!(b2, b.add_int(&BigInt::one()));
        // 1/β = β - 1
        assert_eq!(b.inv().unwrap(), b.add_int(&BigInt::from(-1)));
        assert_eq!(b.floor().unwrap(), BigInt::one());
        assert_eq!(b.scale_int(&BigInt::from(10)).floor().unwrap(), BigInt::from(16));
        assert!((b.to_f64() - 1.618033988749895).abs() < 1e-15);
    }

    #[test]
    fn reducible_rejected() {
        let p: Vec<BigInt> = [-2, 1, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert!(NumberField::new(&p).is_err());
    }

    #[test]
    fn conjugate_value() {
        let k = golden();
        let disc = &k.conjugate_discs()[0];
        let b = FieldElem::generator(&k);
        let v = b.eval_conjugate(disc);
        assert!((v.mid.re - (-0.6180339887498949)).abs() <= v.rad + 1e-15);
        let x = FieldElem::from_rat(&k, rat(3, 7));
        assert!((x.eval_conjugate(disc).mid.re - 3.0 / 7.0).abs() < 1e-15);
    }
}
