//! Canonical number systems and their SRS parameters.
//!
//! For `A = a_d x^d + ... + a_0` with `a_0 >= 2` the backward division
//! `D_A` on `Z[x]/A` is conjugate, on the Brunotte module `Λ_A`, to
//! `τ_r` with `r = (a_d/a_0, ..., a_1/a_0)`. Elements of `Λ_A` are stored
//! by their Brunotte coordinates `z`; `V z` gives monomial coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::dynamics::{decide_finiteness, tau, tau_iter, Caps, FinitenessVerdict};
use crate::error::{Result, SrsError};
use crate::interval::{rat, rat_int, rat_pow};
use crate::linalg::{rat_mat_inverse, rat_mat_mul, rat_mat_vec, rat_mat_vec_int, IntVec, RatMat};
use crate::params::{contraction_data, ContractionOptions, SrsParameter};
use crate::tiles::tile_preimages;

/// An expanding integer polynomial with `a_0 >= 2`, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    a: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(a: Vec<BigInt>) -> Result<Self> {
        let a = crate::poly::trim(a);
        if a.len() < 2 {
            return Err(SrsError::InvalidPolynomial("degree must be at least 1".into()));
        }
        if a[0] < BigInt::from(2) {
            return Err(SrsError::InvalidPolynomial(format!("a_0 = {} must be at least 2", a[0])));
        }
        let p = IntPolynomial { a };
        if !p.param_unchecked().is_interior()? {
            return Err(SrsError::InvalidPolynomial("polynomial is not expanding".into()));
        }
        Ok(p)
    }

    pub fn from_i64(a: &[i64]) -> Result<Self> {
        Self::new(a.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Parses `a0,a1,...,ad`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(crate::params::parse_int_list(s)?)
    }

    pub fn degree(&self) -> usize {
        self.a.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.a
    }

    pub fn is_monic(&self) -> bool {
        self.a[self.degree()].abs().is_one()
    }

    fn param_unchecked(&self) -> SrsParameter {
        let d = self.degree();
        let r = (0..d).map(|i| BigRational::new(self.a[d - i].clone(), self.a[0].clone())).collect();
        SrsParameter::rational(r).expect("d >= 1")
    }

    /// `r = (a_d/a_0, a_{d-1}/a_0, ..., a_1/a_0)`.
    pub fn srs_param(&self) -> SrsParameter {
        self.param_unchecked()
    }

    /// `V` with `V_{ik} = a_{d-k+i}` for `k >= i`: column `k` holds the
    /// monomial coefficients of `W_k = a_d X^k + ... + a_{d-k}`.
    pub fn v_matrix(&self) -> RatMat {
        let d = self.degree();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|k| if k >= i { rat_int(&self.a[d - k + i]) } else { BigRational::zero() })
                    .collect()
            })
            .collect()
    }

    /// Monomial coefficients `V z` of the element with Brunotte coordinates `z`.
    pub fn monomial(&self, z: &[BigInt]) -> IntVec {
        let d = self.degree();
        (0..d)
            .map(|i| (i..d).map(|k| &self.a[d - k + i] * &z[k]).sum())
            .collect()
    }

    /// Brunotte coordinates of a polynomial of degree `< d`, if it lies in `Λ_A`.
    pub fn brunotte_coords(&self, p: &[BigInt]) -> Option<IntVec> {
        let d = self.degree();
        let ad = &self.a[d];
        let mut z = vec![BigInt::zero(); d];
        // Back substitution on the upper-triangular V.
        for i in (0..d).rev() {
            let mut s = p.get(i).cloned().unwrap_or_else(BigInt::zero);
            for k in i + 1..d {
                s -= &self.a[d - k + i] * &z[k];
            }
            let (q, rem) = s.div_rem(ad);
            if !rem.is_zero() {
                return None;
            }
            z[i] = q;
        }
        Some(z)
    }

    /// `B = V M_r^{-1} V^{-1}`: multiplication by `X` on monomial coordinates.
    pub fn b_matrix(&self) -> RatMat {
        let v = self.v_matrix();
        let vi = rat_mat_inverse(&v).expect("a_d != 0");
        let m = self.srs_param().companion().dense();
        let m: RatMat = m.iter().map(|row| row.iter().map(|s| s.as_rational().unwrap().clone()).collect()).collect();
        let mi = rat_mat_inverse(&m).expect("reduced");
        rat_mat_mul(&rat_mat_mul(&v, &mi), &vi)
    }

    /// Remainder of a polynomial (constant first) modulo `A` over `Q`.
    pub fn reduce(&self, p: &[BigRational]) -> Vec<BigRational> {
        let d = self.degree();
        let mut p = p.to_vec();
        let ad = rat_int(&self.a[d]);
        for k in (d..p.len()).rev() {
            let t = std::mem::replace(&mut p[k], BigRational::zero()) / &ad;
            if t.is_zero() {
                continue;
            }
            for i in 0..d {
                p[k - d + i] -= &t * rat_int(&self.a[i]);
            }
        }
        p.resize(d, BigRational::zero());
        p
    }
}

/// One step of backward division on monomial coordinates:
/// `P = b + X·D_A(P) + qA` with `q = ⌊p_0/a_0⌋`, `b = p_0 - q a_0`.
pub fn backward_divide_monomial(a: &IntPolynomial, p: &[BigInt]) -> (BigInt, IntVec) {
    let d = a.degree();
    let q = p[0].div_floor(&a.a[0]);
    let b = &p[0] - &q * &a.a[0];
    let next = (0..d)
        .map(|i| {
            let pi = p.get(i + 1).cloned().unwrap_or_else(BigInt::zero);
            pi - &q * &a.a[i + 1]
        })
        .collect();
    (b, next)
}

/// Backward division on Brunotte coordinates: the quotient is `τ_r(z)` and
/// the digit is read off from `P - X·D_A(P)` reduced modulo `A`.
pub fn backward_divide(a: &IntPolynomial, z: &[BigInt]) -> Result<(BigInt, IntVec)> {
    let d = a.degree();
    let r = a.srs_param();
    let next = tau(&r, z)?;
    let p = a.monomial(z);
    let xq = a.monomial(&next);
    let mut diff: Vec<BigRational> = vec![BigRational::zero(); d + 1];
    for i in 0..d {
        diff[i] += rat_int(&p[i]);
        diff[i + 1] -= rat_int(&xq[i]);
    }
    let red = a.reduce(&diff);
    if red[1..].iter().any(|c| !c.is_zero()) || !red[0].is_integer() {
        return Err(SrsError::Unsupported("remainder is not a constant".into()));
    }
    Ok((red[0].to_integer(), next))
}

/// Digits from both routes: iterated division on monomial coordinates, and
/// `b_n = a_0 {r·τ^n(z)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnsDigits {
    pub division: Vec<BigInt>,
    pub formula: Vec<BigInt>,
}

impl CnsDigits {
    pub fn agree(&self) -> bool {
        self.division == self.formula
    }
}

pub fn cns_digits(a: &IntPolynomial, z: &[BigInt], n: usize) -> Result<CnsDigits> {
    let r = a.srs_param();
    let mut p = a.monomial(z);
    let mut division = Vec::with_capacity(n);
    for _ in 0..n {
        let (b, next) = backward_divide_monomial(a, &p);
        division.push(b);
        p = next;
    }
    let mut y = z.to_vec();
    let mut formula = Vec::with_capacity(n);
    for _ in 0..n {
        let f = r.frac_dot(&y)?;
        let b = f.as_rational().unwrap() * rat_int(&a.a[0]);
        formula.push(b.to_integer());
        y = tau(&r, &y)?;
    }
    Ok(CnsDigits { division, formula })
}

/// `P ≡ Σ_{k<n} b_k X^k + X^n D_A^n(P) (mod A)` with an integral quotient.
pub fn reconstruction_holds(a: &IntPolynomial, p: &[BigInt], digits: &[BigInt], rest: &[BigInt]) -> bool {
    let n = digits.len();
    let d = a.degree();
    let len = (n + d).max(p.len()) + 1;
    let mut poly = vec![BigInt::zero(); len];
    for (i, c) in p.iter().enumerate() {
        poly[i] += c;
    }
    for (k, b) in digits.iter().enumerate() {
        poly[k] -= b;
    }
    for (i, c) in rest.iter().enumerate() {
        poly[n + i] -= c;
    }
    divides(&a.a, &poly)
}

/// Exact division test in `Z[x]`.
fn divides(a: &[BigInt], p: &[BigInt]) -> bool {
    let d = a.len() - 1;
    let mut p = crate::poly::trim(p.to_vec());
    while p.len() > d {
        let k = p.len() - 1;
        let (q, rem) = p[k].div_rem(&a[d]);
        if !rem.is_zero() {
            return false;
        }
        for i in 0..=d {
            p[k - d + i] -= &q * &a[i];
        }
        p = crate::poly::trim(p);
    }
    p.iter().all(|c| c.is_zero())
}

/// `D_A^k Ψ^{-1}(z) = Ψ^{-1} τ^k(z)` for all `k <= n`, compared on monomial
/// coefficients.
pub fn conjugacy_check(a: &IntPolynomial, z: &[BigInt], n: usize) -> Result<bool> {
    let r = a.srs_param();
    let mut p = a.monomial(z);
    let mut y = z.to_vec();
    for _ in 0..n {
        p = backward_divide_monomial(a, &p).1;
        y = tau(&r, &y)?;
        if p != a.monomial(&y) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(A, N)` is a CNS iff the associated parameter has the finiteness property.
pub fn is_cns(a: &IntPolynomial, caps: &Caps) -> Result<FinitenessVerdict> {
    decide_finiteness(&a.srs_param(), caps)
}

fn digit_tuples(a0: usize, n: usize, cap: usize) -> Result<usize> {
    let mut total = 1usize;
    for _ in 0..n {
        total = total.checked_mul(a0).filter(|&t| t <= cap).ok_or(SrsError::PointCap(cap))?;
    }
    Ok(total)
}

/// Digit tuple number `idx` in lexicographic order, `c_1` most significant.
fn tuple(idx: usize, a0: usize, n: usize) -> Vec<usize> {
    let mut c = vec![0; n];
    let mut x = idx;
    for i in (0..n).rev() {
        c[i] = x % a0;
        x /= a0;
    }
    c
}

/// `{Σ_{i=1}^n B^{-i} (c_i, 0, ..., 0)^t : c ∈ N^n}` in lexicographic order
/// of `c`.
pub fn self_affine_tile_approx(a: &IntPolynomial, n: usize, caps: &Caps) -> Result<Vec<Vec<BigRational>>> {
    let a0 = a.a[0].to_usize().ok_or(SrsError::PointCap(caps.points))?;
    let total = digit_tuples(a0, n, caps.points)?;
    let binv = rat_mat_inverse(&a.b_matrix()).expect("expanding");
    let d = a.degree();
    let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut v: Vec<BigRational> = (0..d).map(|i| if i == 0 { BigRational::one() } else { BigRational::zero() }).collect();
    for _ in 0..n {
        v = rat_mat_vec(&binv, &v);
        cols.push(v.clone());
    }
    Ok((0..total)
        .into_par_iter()
        .map(|idx| {
            let c = tuple(idx, a0, n);
            let mut p = vec![BigRational::zero(); d];
            for (ci, col) in c.iter().zip(&cols) {
                if *ci != 0 {
                    let k = rat(*ci as i64, 1);
                    for (x, y) in p.iter_mut().zip(col) {
                        *x += y * &k;
                    }
                }
            }
            p
        })
        .collect())
}

/// The same set through `B^{-n} V Ψ_A(D_A^{-n}(0))`: each
/// `Σ c_i X^{n-i}` is reduced modulo `A` and multiplied by `B^{-n}`.
pub fn self_affine_tile_via_division(a: &IntPolynomial, n: usize, caps: &Caps) -> Result<Vec<Vec<BigRational>>> {
    let a0 = a.a[0].to_usize().ok_or(SrsError::PointCap(caps.points))?;
    let total = digit_tuples(a0, n, caps.points)?;
    let binv = rat_mat_inverse(&a.b_matrix()).expect("expanding");
    let mut bn = crate::linalg::rat_identity(a.degree());
    for _ in 0..n {
        bn = rat_mat_mul(&binv, &bn);
    }
    Ok((0..total)
        .into_par_iter()
        .map(|idx| {
            let c = tuple(idx, a0, n);
            let poly: Vec<BigRational> = (0..n).map(|k| rat(c[n - 1 - k] as i64, 1)).collect();
            rat_mat_vec(&bn, &a.reduce(&poly))
        })
        .collect())
}

/// `V M^n τ^{-n}(z)`, the level-n approximation of the Brunotte tile
/// `G_A(Ψ^{-1}(z))`, in the order of the sorted preimages.
pub fn brunotte_tile_approx(a: &IntPolynomial, z: &[BigInt], n: usize, caps: &Caps) -> Result<Vec<Vec<BigRational>>> {
    let r = a.srs_param();
    let pre = tile_preimages(&r, z, n, caps)?;
    let m = r.companion().dense();
    let m: RatMat = m.iter().map(|row| row.iter().map(|s| s.as_rational().unwrap().clone()).collect()).collect();
    let vm = rat_mat_mul(&a.v_matrix(), &crate::linalg::rat_mat_pow(&m, n));
    Ok(pre.par_iter().map(|y| rat_mat_vec_int(&vm, y)).collect())
}

/// For monic `A`: `V M^n τ^{-n}(z) = V z + F_{A,n}` as point sets.
pub fn monic_identity_holds(a: &IntPolynomial, z: &[BigInt], n: usize, caps: &Caps) -> Result<bool> {
    if !a.is_monic() {
        return Err(SrsError::Unsupported("the translation identity needs a monic polynomial".into()));
    }
    let mut lhs = brunotte_tile_approx(a, z, n, caps)?;
    let vz = a.monomial(z);
    let mut rhs: Vec<Vec<BigRational>> = self_affine_tile_approx(a, n, caps)?
        .into_iter()
        .map(|p| p.iter().zip(&vz).map(|(x, y)| x + rat_int(y)).collect())
        .collect();
    lhs.sort();
    rhs.sort();
    Ok(lhs == rhs)
}

/// Radix-`p/q` digits of `N`: `b_k = p {-(q/p) τ^k(-N)}` with `r = -q/p`.
pub fn rational_base_digits(p: i64, q: i64, big_n: &BigInt, n: usize) -> Result<Vec<BigInt>> {
    if !(p > q && q >= 1) || p.gcd(&q) != 1 {
        return Err(SrsError::InvalidParameter(format!("need coprime p > q >= 1, got {p}/{q}")));
    }
    let r = SrsParameter::from_fractions(&[(-q, p)]);
    let mut z = vec![-big_n];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let f = r.frac_dot(&z)?;
        out.push((f.as_rational().unwrap() * rat(p, 1)).to_integer());
        z = tau(&r, &z)?;
    }
    Ok(out)
}

/// `N = (1/q) Σ_{k<m} b_k (p/q)^k - (p/q)^m τ^m(-N)` for every `m <= n`.
pub fn rational_base_reconstruction(p: i64, q: i64, big_n: &BigInt, digits: &[BigInt]) -> Result<bool> {
    let r = SrsParameter::from_fractions(&[(-q, p)]);
    let pq = rat(p, q);
    let target = rat_int(big_n);
    let mut sum = BigRational::zero();
    for m in 0..=digits.len() {
        let t = tau_iter(&r, &[-big_n], m)?;
        let val = &sum / rat(q, 1) - rat_pow(&pq, m) * rat_int(&t[0]);
        if val != target {
            return Ok(false);
        }
        if m < digits.len() {
            sum += rat_int(&digits[m]) * rat_pow(&pq, m);
        }
    }
    Ok(true)
}

/// Contraction data for the parameter of `A`.
pub fn contraction(a: &IntPolynomial) -> Result<crate::params::ContractionData> {
    contraction_data(&a.srs_param(), &ContractionOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;

    #[test]
    fn parameters_from_polynomials() {
        let a = IntPolynomial::from_i64(&[2, -1, 1]).unwrap();
        assert_eq!(a.srs_param().rational_coords().unwrap(), &[rat(1, 2), rat(-1, 2)]);
        let a = IntPolynomial::from_i64(&[4, 4, 3]).unwrap();
        assert_eq!(a.srs_param().rational_coords().unwrap(), &[rat(3, 4), rat(1, 1)]);
        let a = IntPolynomial::from_i64(&[3, -2]).unwrap();
        assert_eq!(a.srs_param().rational_coords().unwrap(), &[rat(-2, 3)]);
        assert!(IntPolynomial::from_i64(&[2, 0, 3]).is_err());
    }

    #[test]
    fn division_examples() {
        let a = IntPolynomial::from_i64(&[2, 2, 1]).unwrap();
        assert_eq!(backward_divide_monomial(&a, &int_vec(&[-1, 0])), (BigInt::one(), int_vec(&[2, 1])));
        let z = a.brunotte_coords(&int_vec(&[-1, 0])).unwrap();
        let (b, next) = backward_divide(&a, &z).unwrap();
        assert_eq!(b, BigInt::one());
        assert_eq!(a.monomial(&next), int_vec(&[2, 1]));
        let a = IntPolynomial::from_i64(&[2, -1, 1]).unwrap();
        assert_eq!(backward_divide_monomial(&a, &int_vec(&[1, 0])), (BigInt::one(), int_vec(&[0, 0])));
    }

    #[test]
    fn b_matrix_identity() {
        for c in [[2, -1, 1], [4, 4, 3], [20, -11, 18]] {
            let a = IntPolynomial::from_i64(&c).unwrap();
            let m = a.srs_param().companion().dense();
            let m: RatMat = m.iter().map(|row| row.iter().map(|s| s.as_rational().unwrap().clone()).collect()).collect();
            let lhs = rat_mat_mul(&a.b_matrix(), &a.v_matrix());
            let rhs = rat_mat_mul(&a.v_matrix(), &rat_mat_inverse(&m).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rational_base_small() {
        let d = rational_base_digits(3, 2, &BigInt::one(), 3).unwrap();
        assert_eq!(d, int_vec(&[2, 0, 0]));
        let d = rational_base_digits(3, 2, &BigInt::from(2), 3).unwrap();
        assert_eq!(d, int_vec(&[1, 2, 0]));
        assert!(rational_base_reconstruction(3, 2, &BigInt::from(2), &d).unwrap());
    }

    #[test]
    fn lemma_route_matches_direct_sum() {
        let a = IntPolynomial::from_i64(&[4, 4, 3]).unwrap();
        let caps = Caps::default();
        for n in 0..=4 {
            let mut x = self_affine_tile_approx(&a, n, &caps).unwrap();
            let mut y = self_affine_tile_via_division(&a, n, &caps).unwrap();
            x.sort();
            y.sort();
            assert_eq!(x, y);
        }
    }
}
