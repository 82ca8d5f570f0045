//! Integer polynomials: certified root discs, stability tests, small helpers.
//! Coefficient vectors are stored constant term first.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, SrsError};
use crate::interval::{f64_to_rat, rat_int, sqrt_upper, ComplexRat, RatInterval};

pub fn degree(p: &[BigInt]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn eval_rat(p: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + rat_int(c);
    }
    acc
}

pub fn eval_complex(p: &[BigInt], z: &ComplexRat) -> ComplexRat {
    let mut acc = ComplexRat::zero();
    for c in p.iter().rev() {
        acc = acc.mul(z).add(&ComplexRat::real(rat_int(c)));
    }
    acc
}

pub fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    if p.len() <= 1 {
        return vec![BigInt::zero()];
    }
    p.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect()
}

/// Rational roots of an integer polynomial (rational root theorem).
pub fn rational_roots(p: &[BigInt]) -> Vec<BigRational> {
    let p = trim(p.to_vec());
    let Some(n) = degree(&p) else { return vec![] };
    let mut out = Vec::new();
    // Strip factors of x.
    let low = p.iter().position(|c| !c.is_zero()).unwrap();
    if low > 0 {
        out.push(BigRational::zero());
    }
    let q = &p[low..=n];
    let a0 = q[0].abs();
    let an = q[q.len() - 1].abs();
    let divs = |m: &BigInt| -> Vec<BigInt> {
        let mut v = Vec::new();
        let mut i = BigInt::one();
        while &i * &i <= *m {
            if (m % &i).is_zero() {
                v.push(i.clone());
                v.push(m / &i);
            }
            i += 1;
        }
        v
    };
    if q.len() == 1 {
        return out;
    }
    for num in divs(&a0) {
        for den in divs(&an) {
            for s in [1i32, -1] {
                let x = BigRational::new(&num * BigInt::from(s), den.clone());
                if eval_rat(q, &x).is_zero() && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
    }
    out.sort();
    out
}

/// Schur–Cohn test on interval coefficients: `Some(true)` when every root
/// certainly lies in the open unit disc, `Some(false)` when some root
/// certainly does not, `None` when the enclosures are too wide to decide.
pub fn schur_stable(coeffs: &[RatInterval]) -> Option<bool> {
    let mut p: Vec<RatInterval> = coeffs.to_vec();
    while p.len() > 1 && p.last().unwrap().is_point() && p.last().unwrap().lo.is_zero() {
        p.pop();
    }
    let mut n = p.len() - 1;
    if p[n].contains_zero() {
        return None;
    }
    while n >= 1 {
        let a0 = p[0].abs();
        let an = p[n].abs();
        if a0.hi < an.lo {
            // strictly smaller: continue with the reduced polynomial
        } else if a0.lo >= an.hi {
            return Some(false);
        } else {
            return None;
        }
        let q: Vec<RatInterval> = (0..n)
            .map(|i| p[n].mul(&p[i + 1]).sub(&p[0].mul(&p[n - 1 - i])))
            .collect();
        p = q;
        n -= 1;
    }
    Some(true)
}

/// Aberth–Ehrlich iteration for all complex roots of a real polynomial.
pub fn approx_roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = c[n];
    let c: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, t)
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

/// A disc that provably contains exactly one root of a polynomial.
#[derive(Clone, Debug)]
pub struct RootDisc {
    pub center: ComplexRat,
    pub radius: BigRational,
    pub is_real: bool,
}

impl RootDisc {
    pub fn center_f64(&self) -> Complex64 {
        let (re, im) = self.center.to_f64();
        Complex64::new(re, im)
    }

    pub fn radius_f64(&self) -> f64 {
        // Round up so the float disc still contains the root.
        let r = crate::interval::rat_to_f64(&self.radius);
        r * (1.0 + 1e-15) + 1e-300
    }

    /// Certified `|root| < 1`.
    pub fn inside_unit_disc(&self) -> Option<bool> {
        let one = BigRational::one();
        if self.radius >= one {
            return None;
        }
        let c2 = self.center.norm_sqr();
        let inner = &one - &self.radius;
        if c2 < &inner * &inner {
            return Some(true);
        }
        let outer = &one + &self.radius;
        if c2 >= &outer * &outer {
            return Some(false);
        }
        None
    }

    /// Interval on the real line for a real root.
    pub fn real_interval(&self) -> RatInterval {
        RatInterval::new(&self.center.re - &self.radius, &self.center.re + &self.radius)
    }
}

fn newton_step(p: &[BigInt], dp: &[BigInt], z: &ComplexRat, bits: u32) -> Option<ComplexRat> {
    let v = eval_complex(p, z);
    let d = eval_complex(dp, z);
    let step = v.div(&d)?;
    Some(z.sub(&step).round(bits))
}

/// Certified root discs for a squarefree integer polynomial.
///
/// Uses the Gerschgorin-type inclusion: with approximations `z_i` and
/// Weierstrass corrections `W_i = p(z_i) / (lc * prod_{j != i} (z_i - z_j))`,
/// every connected component of the union of discs `|z - z_i| <= n |W_i|`
/// holds as many roots as discs. Pairwise disjoint discs therefore isolate
/// the roots. Real roots get discs centred on the real axis.
///
/// Output order: real roots ascending, then complex pairs by the argument of
/// the member with positive imaginary part, each followed by its conjugate.
pub fn certify_roots(p: &[BigInt], max_radius: &BigRational) -> Result<Vec<RootDisc>> {
    let p = trim(p.to_vec());
    let n = degree(&p).ok_or_else(|| SrsError::InvalidPolynomial("zero polynomial".into()))?;
    if n == 0 {
        return Ok(vec![]);
    }
    let cf: Vec<f64> = p.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let approx = approx_roots(&cf);
    let scale = approx.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let mut reals: Vec<f64> = Vec::new();
    let mut uppers: Vec<Complex64> = Vec::new();
    for z in &approx {
        if z.im.abs() <= 1e-7 * scale {
            reals.push(z.re);
        } else if z.im > 0.0 {
            uppers.push(*z);
        }
    }
    if reals.len() + 2 * uppers.len() != n {
        return Err(SrsError::PrecisionCap(
            "root approximations do not pair into conjugates".into(),
        ));
    }
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    uppers.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
    let mut centers: Vec<ComplexRat> = Vec::with_capacity(n);
    for x in &reals {
        centers.push(ComplexRat::real(f64_to_rat(*x)));
    }
    for z in &uppers {
        let c = ComplexRat::new(f64_to_rat(z.re), f64_to_rat(z.im));
        centers.push(c.conj());
        centers.push(c);
    }
    let nreal = reals.len();
    let dp = derivative(&p);
    let lc = ComplexRat::real(rat_int(&p[n]));
    let nn = BigRational::from_integer(BigInt::from(n as u64));
    let mut bits = 64u32;
    loop {
        // Newton refinement at the current precision.
        for _ in 0..3 {
            let mut next = Vec::with_capacity(n);
            let mut k = 0;
            while k < n {
                let z = newton_step(&p, &dp, &centers[k], bits).unwrap_or_else(|| centers[k].clone());
                if k < nreal {
                    next.push(ComplexRat::real(z.re));
                    k += 1;
                } else {
                    // keep conjugate pairs exactly symmetric
                    let upper = if z.im.is_positive() { z } else { z.conj() };
                    next.push(upper.conj());
                    next.push(upper);
                    k += 2;
                }
            }
            centers = next;
        }
        let mut discs: Vec<RootDisc> = Vec::with_capacity(n);
        let mut ok = true;
        for i in 0..n {
            let mut den = lc.clone();
            for j in 0..n {
                if i != j {
                    den = den.mul(&centers[i].sub(&centers[j]));
                }
            }
            let w = match eval_complex(&p, &centers[i]).div(&den) {
                Some(w) => w,
                None => {
                    ok = false;
                    break;
                }
            };
            let r = &nn * sqrt_upper(&w.norm_sqr(), bits + 8);
            discs.push(RootDisc { center: centers[i].clone(), radius: r, is_real: i < nreal });
        }
        if ok {
            'outer: for i in 0..n {
                if &discs[i].radius > max_radius {
                    ok = false;
                    break;
                }
                for j in i + 1..n {
                    let d2 = discs[i].center.sub(&discs[j].center).norm_sqr();
                    let s = &discs[i].radius + &discs[j].radius;
                    if d2 <= &s * &s {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            let mut out: Vec<RootDisc> = discs[..nreal].to_vec();
            let mut k = nreal;
            while k < n {
                out.push(discs[k + 1].clone());
                out.push(discs[k].clone());
                k += 2;
            }
            return Ok(out);
        }
        bits *= 2;
        if bits > 4096 {
            return Err(SrsError::PrecisionCap(
                "root isolation failed (repeated roots or cap reached)".into(),
            ));
        }
    }
}

/// Shrinks an isolating interval of a simple real root by bisection until
/// its width is at most `2^-bits`.
pub fn refine_real_root(p: &[BigInt], iv: &RatInterval, bits: u32) -> RatInterval {
    let target = BigRational::new(BigInt::one(), crate::interval::pow2(bits));
    let mut lo = iv.lo.clone();
    let mut hi = iv.hi.clone();
    let slo = eval_rat(p, &lo).signum();
    if slo.is_zero() {
        return RatInterval::point(lo);
    }
    while &hi - &lo > target {
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        let s = eval_rat(p, &mid).signum();
        if s.is_zero() {
            return RatInterval::point(mid);
        }
        if s == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RatInterval::new(lo, hi)
}

/// Quotient of `p` by the monic `x - c` over any ring-like coefficients,
/// using synthetic division; returns `(quotient, remainder)`.
pub fn synthetic_division<T, FA, FM>(p: &[T], c: &T, add: FA, mul: FM) -> (Vec<T>, T)
where
    T: Clone,
    FA: Fn(&T, &T) -> T,
    FM: Fn(&T, &T) -> T,
{
    let n = p.len() - 1;
    let mut q: Vec<T> = vec![p[n].clone(); n];
    let mut acc = p[n].clone();
    for k in (1..n).rev() {
        acc = add(&p[k], &mul(c, &acc));
        q[k - 1] = acc.clone();
    }
    let rem = add(&p[0], &mul(c, &acc));
    if n >= 1 {
        q[n - 1] = p[n].clone();
    }
    (q, rem)
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}
