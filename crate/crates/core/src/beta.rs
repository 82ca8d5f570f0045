//! Beta-expansions for Pisot numbers and their link with SRS.
//!
//! Writing the minimal polynomial as `(x - β)(x^d + r_{d-1}x^{d-1} + ... + r_0)`
//! gives a parameter `r ∈ Q(β)^d` with `{r·τ_r^n(z)} = T_β^n({r·z})`. All
//! dynamics are done exactly on integer vectors or in `Q(β)`; the conjugate
//! embedding `Φ_β` and the matrix `U` are only evaluated at output time.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::ball::Ball;
use crate::dynamics::{decide_finiteness, tau, Caps, FinitenessVerdict};
use crate::error::{Result, SrsError};
use crate::field::{FieldElem, NumberField};
use crate::hausdorff::{euclidean, hausdorff_f64};
use crate::interval::{rat_int, rat_to_f64, RatInterval};
use crate::linalg::{solve_rational, IntVec};
use crate::params::SrsParameter;
use crate::poly::{synthetic_division, RootDisc};
use crate::scalar::Scalar;
use crate::tiles::tile_preimages;

/// A certified Pisot number with its SRS parameter.
#[derive(Clone, Debug)]
pub struct PisotSpec {
    field: Arc<NumberField>,
    r: SrsParameter,
    coeffs: Vec<FieldElem>,
    conjugates: Vec<RootDisc>,
    /// `β_j^k` as balls, `k < deg`, one row per conjugate.
    conj_powers: Vec<Vec<Ball>>,
}

/// Splits `minpoly` at its largest real root without checking the Pisot
/// condition. Returns the field and `r_0, ..., r_{d-1}`.
pub fn split_minpoly(minpoly: &[BigInt]) -> Result<(Arc<NumberField>, Vec<FieldElem>)> {
    let field = NumberField::new(minpoly)?;
    let coeffs: Vec<FieldElem> = field.minpoly().iter().map(|c| FieldElem::from_int(&field, c)).collect();
    let beta = FieldElem::generator(&field);
    let (q, rem) = synthetic_division(&coeffs, &beta, |a, b| a.add(b), |a, b| a.mul(b));
    if !rem.is_zero() {
        return Err(SrsError::InvalidPolynomial("β is not a root".into()));
    }
    // q is monic of degree d; drop the leading 1.
    let d = q.len() - 1;
    Ok((field, q[..d].to_vec()))
}

impl PisotSpec {
    /// Builds the spec from a monic integer polynomial, constant term first.
    /// Fails with [`SrsError::NotPisot`] naming the first conjugate that is
    /// not certified to lie inside the unit disc.
    pub fn new(minpoly: &[BigInt]) -> Result<Self> {
        let (field, coeffs) = split_minpoly(minpoly)?;
        let (beta, _) = field.beta_interval();
        if beta.lo <= BigRational::one() {
            return Err(SrsError::NotPisot(format!("dominant root {} is not > 1", beta.mid_f64())));
        }
        let conjugates = field.conjugate_discs();
        for (j, c) in conjugates.iter().enumerate() {
            if c.inside_unit_disc() != Some(true) {
                let z = c.center_f64();
                return Err(SrsError::NotPisot(format!(
                    "conjugate {} = {:.12}{:+.12}i has modulus {:.12} (±{:.1e}), not certified < 1",
                    j + 1,
                    z.re,
                    z.im,
                    z.norm(),
                    c.radius_f64()
                )));
            }
        }
        let r = SrsParameter::algebraic(&field, coeffs.clone())?;
        let conj_powers = conjugates
            .iter()
            .map(|c| {
                let b = disc_ball(c);
                let mut p = Ball::exact(1.0);
                (0..field.degree())
                    .map(|_| {
                        let cur = p;
                        p = p.mul(&b);
                        cur
                    })
                    .collect()
            })
            .collect();
        Ok(PisotSpec { field, r, coeffs, conjugates, conj_powers })
    }

    pub fn param(&self) -> &SrsParameter {
        &self.r
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Conjugates `β_1, ..., β_d`: real ones ascending, then complex pairs.
    pub fn conjugates(&self) -> &[RootDisc] {
        &self.conjugates
    }

    pub fn beta(&self) -> FieldElem {
        FieldElem::generator(&self.field)
    }

    /// Number of real conjugates and of complex pairs.
    pub fn signature(&self) -> (usize, usize) {
        let real = self.conjugates.iter().filter(|c| c.is_real).count();
        (real, (self.conjugates.len() - real) / 2)
    }

    pub fn is_unit(&self) -> bool {
        self.field.minpoly()[0].abs().is_one()
    }

    pub fn elem(&self, c: &[BigRational]) -> FieldElem {
        FieldElem::new(&self.field, c.to_vec())
    }

    /// `x ∈ Z[β]`: integer coordinates in the basis `{r_0, ..., r_{d-1}, 1}`.
    /// Returns `(z, k)` with `x = r·z + k`.
    pub fn basis_coords(&self, x: &FieldElem) -> Option<(IntVec, BigInt)> {
        let d = self.dim();
        let n = d + 1;
        let col = |j: usize, i: usize| -> BigRational {
            let c = if j < d { self.coeffs[j].coeffs() } else { &[][..] };
            if j == d {
                if i == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            } else {
                c.get(i).cloned().unwrap_or_else(BigRational::zero)
            }
        };
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..n).map(|j| col(j, i)).collect();
                row.push(x.coeffs().get(i).cloned().unwrap_or_else(BigRational::zero));
                row
            })
            .collect();
        let s = solve_rational(&mut a)?;
        if !s.iter().all(|q| q.is_integer()) {
            return None;
        }
        let ints: Vec<BigInt> = s.iter().map(|q| q.to_integer()).collect();
        Some((ints[..d].to_vec(), ints[d].clone()))
    }

    /// Same answer as [`Self::basis_coords`]`.is_some()`: β is an algebraic
    /// integer, so `Z[β]` is the integer span of the power basis.
    pub fn in_z_beta(&self, x: &FieldElem) -> bool {
        x.is_integral()
    }

    /// Checks `x ∈ Z[β] ∩ [0, 1)` and returns `z` with `{r·z} = x`.
    pub fn z_for(&self, x: &FieldElem) -> Result<IntVec> {
        let (z, _) = self
            .basis_coords(x)
            .ok_or_else(|| SrsError::NotBetaPoint(format!("{} is not in Z[β]", x)))?;
        if x.signum()? == std::cmp::Ordering::Less || x.cmp_real(&FieldElem::from_int(&self.field, &BigInt::one()))? != std::cmp::Ordering::Less {
            return Err(SrsError::NotBetaPoint(format!("{} is not in [0,1)", x)));
        }
        Ok(z)
    }

    /// `{r·z}` as an element of `Q(β)`.
    pub fn frac_rz(&self, z: &[BigInt]) -> Result<FieldElem> {
        match self.r.frac_dot(z)? {
            Scalar::Algebraic(f) => Ok(f),
            Scalar::Rational(q) => Ok(FieldElem::from_rat(&self.field, q)),
            Scalar::Interval(_) => unreachable!("algebraic parameter"),
        }
    }
}

/// `T_β(x) = {βx}`.
pub fn beta_transform(spec: &PisotSpec, x: &FieldElem) -> Result<FieldElem> {
    spec.beta().mul(x).fract()
}

/// Greedy digits `b_k = ⌊β T_β^{k-1}(x)⌋`, `k = 1..=n`.
pub fn beta_digits(spec: &PisotSpec, x: &FieldElem, n: usize) -> Result<Vec<BigInt>> {
    spec.z_for(x)?;
    let beta = spec.beta();
    let mut v = x.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let bx = beta.mul(&v);
        let b = bx.floor()?;
        v = bx.add_int(&-&b);
        out.push(b);
    }
    Ok(out)
}

/// Digits from the SRS orbit of `z` with `{r·z} = x`:
/// `b_k = β v_k - v_{k+1}` with `v_k = {r·τ^{k-1}(z)}`.
pub fn beta_digits_via_srs(spec: &PisotSpec, x: &FieldElem, n: usize) -> Result<Vec<BigInt>> {
    let mut z = spec.z_for(x)?;
    let beta = spec.beta();
    let mut v = spec.frac_rz(&z)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        z = tau(&spec.r, &z)?;
        let next = spec.frac_rz(&z)?;
        let b = beta.mul(&v).sub(&next);
        if !b.is_integral() || !b.is_rational() {
            return Err(SrsError::Unsupported(format!("non-integer digit {}", b)));
        }
        out.push(b.coeffs()[0].to_integer());
        v = next;
    }
    Ok(out)
}

/// Both digit formulas side by side.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaDigits {
    pub direct: Vec<BigInt>,
    pub via_srs: Vec<BigInt>,
}

impl BetaDigits {
    pub fn agree(&self) -> bool {
        self.direct == self.via_srs
    }
}

pub fn beta_digits_both(spec: &PisotSpec, x: &FieldElem, n: usize) -> Result<BetaDigits> {
    Ok(BetaDigits { direct: beta_digits(spec, x, n)?, via_srs: beta_digits_via_srs(spec, x, n)? })
}

/// `{r·τ^k(z)} = T_β^k({r·z})` for all `k <= n`, exactly.
pub fn conjugacy_check_beta(spec: &PisotSpec, z: &[BigInt], n: usize) -> Result<bool> {
    let mut y = z.to_vec();
    let mut x = spec.frac_rz(z)?;
    for _ in 0..n {
        y = tau(&spec.r, &y)?;
        x = beta_transform(spec, &x)?;
        if spec.frac_rz(&y)? != x {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Property (F) via the finiteness decision for the associated parameter.
pub fn satisfies_f(spec: &PisotSpec, caps: &Caps) -> Result<FinitenessVerdict> {
    decide_finiteness(&spec.r, caps)
}

/// `T_β^{-1}(x) ∩ Z[β]`, sorted by value.
pub fn beta_preimages(spec: &PisotSpec, x: &FieldElem) -> Result<Vec<FieldElem>> {
    let beta = spec.beta();
    let inv = beta.inv().expect("β != 0");
    let top = beta.floor()?;
    let mut out = Vec::new();
    let mut b = BigInt::zero();
    while b <= top {
        let s = x.add_int(&b);
        if s.cmp_real(&beta)? == std::cmp::Ordering::Less {
            let w = s.mul(&inv);
            if spec.in_z_beta(&w) {
                out.push(w);
            }
        }
        b += 1;
    }
    Ok(out)
}

fn ball_of_interval(iv: &RatInterval) -> Ball {
    let mid = iv.mid_f64();
    let rad = rat_to_f64(&iv.width()) * 0.5 * (1.0 + 1e-12) + mid.abs() * f64::EPSILON + 1e-300;
    Ball::real(mid, rad)
}

fn disc_ball(c: &RootDisc) -> Ball {
    Ball::new(c.center_f64(), c.radius_f64() + c.center_f64().norm() * f64::EPSILON)
}

/// Real coordinates of `Φ_β` from one value per conjugate: real conjugates
/// contribute the value, each complex pair its real and imaginary part.
fn assemble(conj: &[RootDisc], vals: &[Ball]) -> Vec<Ball> {
    let mut out = Vec::with_capacity(conj.len());
    for (c, v) in conj.iter().zip(vals) {
        if c.is_real {
            out.push(v.re());
        } else if c.center.im.is_positive() {
            out.push(v.re());
            out.push(v.im());
        }
    }
    out
}

fn rat_ball(q: &BigRational) -> Ball {
    let v = rat_to_f64(q);
    Ball::real(v, v.abs() * f64::EPSILON)
}

/// `Φ_β(x)` with per-coordinate error radii.
pub fn phi_embedding(spec: &PisotSpec, x: &FieldElem) -> Vec<Ball> {
    let cs: Vec<Ball> = x.coeffs().iter().map(rat_ball).collect();
    let vals: Vec<Ball> = spec
        .conj_powers
        .iter()
        .map(|pw| cs.iter().zip(pw).fold(Ball::zero(), |s, (c, p)| s.add(&c.mul(p))))
        .collect();
    assemble(&spec.conjugates, &vals)
}

/// `Φ_β(x)` evaluated from the exact conjugate discs; slower, used to
/// cross-check [`phi_embedding`].
pub fn phi_embedding_exact(spec: &PisotSpec, x: &FieldElem) -> Vec<Ball> {
    let vals: Vec<Ball> = spec.conjugates.iter().map(|c| x.eval_conjugate(c)).collect();
    assemble(&spec.conjugates, &vals)
}

/// Coefficients `(q^{(j)}_0, ..., q^{(j)}_{d-2}, 1)` of
/// `(x^d + r_{d-1}x^{d-1} + ... + r_0) / (x - β_j)`, and the remainder.
fn quotient_row(r: &[Ball], bj: &Ball) -> (Vec<Ball>, Ball) {
    let d = r.len();
    let mut poly: Vec<Ball> = r.to_vec();
    poly.push(Ball::exact(1.0));
    let (q, rem) = synthetic_division(&poly, bj, |a, b| a.add(b), |a, b| a.mul(b));
    debug_assert_eq!(q.len(), d);
    (q, rem)
}

fn r_balls(spec: &PisotSpec) -> Vec<Ball> {
    spec.coeffs.iter().map(|c| ball_of_interval(&c.enclose(80))).collect()
}

/// Row eigenvectors of `M_r`, one per conjugate, before the Re/Im split.
pub fn eigen_rows(spec: &PisotSpec) -> Vec<Vec<Ball>> {
    let r = r_balls(spec);
    spec.conjugates.iter().map(|c| quotient_row(&r, &disc_ball(c)).0).collect()
}

/// The matrix `U`: rows `(q^{(j)}, 1)` for real conjugates, then
/// `(Re q^{(j)}, 1)` and `(Im q^{(j)}, 0)` for each complex pair.
pub fn u_matrix(spec: &PisotSpec) -> Vec<Vec<Ball>> {
    let rows = eigen_rows(spec);
    let mut out = Vec::new();
    for (c, row) in spec.conjugates.iter().zip(&rows) {
        if c.is_real {
            out.push(row.iter().map(|b| b.re()).collect());
        } else if c.center.im.is_positive() {
            out.push(row.iter().map(|b| b.re()).collect());
            out.push(row.iter().map(|b| b.im()).collect());
        }
    }
    out
}

/// Largest `|(q^{(j)},1)·M_r - β_j (q^{(j)},1)|` over all conjugates and
/// entries, together with whether every residual ball contains zero.
pub fn u_eigen_residual(spec: &PisotSpec) -> (f64, bool) {
    let r = r_balls(spec);
    let d = r.len();
    let mut worst = 0.0f64;
    let mut ok = true;
    for c in &spec.conjugates {
        let bj = disc_ball(c);
        let (u, rem) = quotient_row(&r, &bj);
        ok &= rem.contains_zero();
        for k in 0..d {
            let mut v = r[k].mul(&u[d - 1]).neg();
            if k > 0 {
                v = v.add(&u[k - 1]);
            }
            let res = v.sub(&bj.mul(&u[k]));
            worst = worst.max(res.mid.norm());
            ok &= res.contains_zero();
        }
    }
    (worst, ok)
}

/// `Λ_β`: `diag(β_1, ..., β_r)` followed by `[[a, -b], [b, a]]` blocks for
/// `β_j = a + bi`, one per complex pair.
pub fn lambda_matrix(spec: &PisotSpec) -> Vec<Vec<Ball>> {
    let d = spec.dim();
    let mut m = vec![vec![Ball::zero(); d]; d];
    let mut i = 0;
    for c in &spec.conjugates {
        let b = disc_ball(c);
        if c.is_real {
            m[i][i] = b.re();
            i += 1;
        } else if c.center.im.is_positive() {
            m[i][i] = b.re();
            m[i][i + 1] = b.im().neg();
            m[i + 1][i] = b.im();
            m[i + 1][i + 1] = b.re();
            i += 2;
        }
    }
    m
}

fn ball_mat_vec(a: &[Vec<Ball>], v: &[Ball]) -> Vec<Ball> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Ball::zero(), |s, (x, y)| s.add(&x.mul(y))))
        .collect()
}

fn ball_det(a: &[Vec<Ball>]) -> Ball {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    let mut acc = Ball::zero();
    for j in 0..n {
        let minor: Vec<Vec<Ball>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).collect())
            .collect();
        let t = a[0][j].mul(&ball_det(&minor));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

/// `U(M_r - βI)` as balls.
pub fn u_times_m_minus_beta(spec: &PisotSpec) -> Vec<Vec<Ball>> {
    let u = u_matrix(spec);
    let d = spec.dim();
    let r = r_balls(spec);
    let beta = ball_of_interval(&spec.beta().enclose(80));
    let mut m = vec![vec![Ball::zero(); d]; d];
    for i in 0..d {
        if i + 1 < d {
            m[i][i + 1] = Ball::exact(1.0);
        }
        m[i][i] = m[i][i].sub(&beta);
    }
    for k in 0..d {
        m[d - 1][k] = m[d - 1][k].sub(&r[k]);
    }
    u.iter()
        .map(|row| (0..d).map(|k| (0..d).fold(Ball::zero(), |s, i| s.add(&row[i].mul(&m[i][k])))).collect())
        .collect()
}

/// Certified `det U(M_r - βI) != 0`.
pub fn u_transform_invertible(spec: &PisotSpec) -> bool {
    !ball_det(&u_times_m_minus_beta(spec)).contains_zero()
}

/// A point set with a uniform bound on the coordinate error radii.
#[derive(Clone, Debug, Default)]
pub struct EmbeddedPoints {
    pub points: Vec<Vec<f64>>,
    pub radius: f64,
}

fn split_balls(v: Vec<Vec<Ball>>) -> EmbeddedPoints {
    let radius = v.iter().flatten().fold(0.0f64, |m, b| m.max(b.rad + b.mid.im.abs()));
    EmbeddedPoints { points: v.iter().map(|p| p.iter().map(|b| b.mid.re).collect()).collect(), radius }
}

/// `T_β^{-n}(x) ∩ Z[β]`, sorted by value.
pub fn beta_preimages_iter(spec: &PisotSpec, x: &FieldElem, n: usize, caps: &Caps) -> Result<Vec<FieldElem>> {
    let mut set = vec![x.clone()];
    for _ in 0..n {
        let parts: Vec<Vec<FieldElem>> = set.par_iter().map(|w| beta_preimages(spec, w)).collect::<Result<_>>()?;
        let total: usize = parts.iter().map(|p| p.len()).sum();
        if total > caps.points {
            return Err(SrsError::PointCap(caps.points));
        }
        set = parts.into_iter().flatten().collect();
    }
    Ok(set)
}

/// Level-n approximation of the integral β-tile from its definition:
/// `Φ_β(β^n w)` for `w ∈ T_β^{-n}({r·z}) ∩ Z[β]`.
pub fn beta_tile_route_a(spec: &PisotSpec, z: &[BigInt], n: usize, caps: &Caps) -> Result<EmbeddedPoints> {
    let x = spec.frac_rz(z)?;
    let pre = beta_preimages_iter(spec, &x, n, caps)?;
    let bn = spec.beta().pow(n);
    let pts: Vec<Vec<Ball>> = pre.par_iter().map(|w| phi_embedding(spec, &bn.mul(w))).collect();
    Ok(split_balls(pts))
}

/// Level-n approximation through the SRS tile: for `y ∈ τ^{-n}(z)`,
/// `linear = U(M_r - βI)M^n y` and `corrected = linear + U M^n e_d {r·y}`.
/// The corrected points coincide with route (a) at every level; the
/// linear ones converge to the same tile.
#[derive(Clone, Debug, Default)]
pub struct RouteB {
    pub corrected: EmbeddedPoints,
    pub linear: EmbeddedPoints,
}

/// `(U(M_r - βI)M^n, U M^n e_d)` as balls.
pub fn route_b_maps(spec: &PisotSpec, n: usize) -> (Vec<Vec<Ball>>, Vec<Ball>) {
    let d = spec.dim();
    let pow = spec.r.companion().pow(n);
    let pn: Vec<Vec<Ball>> = pow.iter().map(|row| row.iter().map(|s| ball_of_interval(&s.enclose(64))).collect()).collect();
    let a = u_times_m_minus_beta(spec);
    let lin = a
        .iter()
        .map(|row| (0..d).map(|k| (0..d).fold(Ball::zero(), |s, i| s.add(&row[i].mul(&pn[i][k])))).collect())
        .collect();
    let ed: Vec<Ball> = (0..d).map(|i| pn[i][d - 1]).collect();
    (lin, ball_mat_vec(&u_matrix(spec), &ed))
}

pub fn beta_tile_route_b(spec: &PisotSpec, z: &[BigInt], n: usize, caps: &Caps) -> Result<RouteB> {
    let pre = tile_preimages(&spec.r, z, n, caps)?;
    route_b_points(spec, &pre, n)
}

fn route_b_points(spec: &PisotSpec, pre: &[IntVec], n: usize) -> Result<RouteB> {
    let (lin_map, corr) = route_b_maps(spec, n);
    let results: Vec<(Vec<Ball>, Vec<Ball>)> = pre
        .par_iter()
        .map(|y| -> Result<(Vec<Ball>, Vec<Ball>)> {
            let yb: Vec<Ball> = y.iter().map(|v| rat_ball(&rat_int(v))).collect();
            let lin = ball_mat_vec(&lin_map, &yb);
            let (f, fr) = spec.r.frac_dot_f64(y)?;
            let fb = Ball::real(f, fr);
            let full = lin.iter().zip(&corr).map(|(a, c)| a.add(&c.mul(&fb))).collect();
            Ok((full, lin))
        })
        .collect::<Result<_>>()?;
    let (full, lin): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(RouteB { corrected: split_balls(full), linear: split_balls(lin) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    A,
    B,
    Both,
}

/// Route comparison for one level.
#[derive(Clone, Debug, Default)]
pub struct BetaTileApprox {
    pub level: usize,
    pub route_a: Option<EmbeddedPoints>,
    pub route_b: Option<RouteB>,
    /// Euclidean Hausdorff distance between route (a) and corrected route (b),
    /// plus both error radii.
    pub deviation: Option<f64>,
    /// The same for the uncorrected linear image.
    pub linear_deviation: Option<f64>,
}

pub fn integral_beta_tile_approx(spec: &PisotSpec, z: &[BigInt], n: usize, route: Route, caps: &Caps) -> Result<BetaTileApprox> {
    let a = if route != Route::B { Some(beta_tile_route_a(spec, z, n, caps)?) } else { None };
    let b = if route != Route::A { Some(beta_tile_route_b(spec, z, n, caps)?) } else { None };
    let (deviation, linear_deviation) = match (&a, &b) {
        (Some(a), Some(b)) => {
            let h = |p: &EmbeddedPoints| hausdorff_f64(&a.points, &p.points, euclidean) + a.radius + p.radius;
            (Some(h(&b.corrected)), Some(h(&b.linear)))
        }
        _ => (None, None),
    };
    Ok(BetaTileApprox { level: n, route_a: a, route_b: b, deviation, linear_deviation })
}

/// Route comparison for every level `0..=n_max`, sharing the preimage
/// expansions between levels.
pub fn integral_beta_tile_levels(spec: &PisotSpec, z: &[BigInt], n_max: usize, caps: &Caps) -> Result<Vec<BetaTileApprox>> {
    let x = spec.frac_rz(z)?;
    let mut wa = vec![x];
    let mut yb = vec![z.to_vec()];
    let mut out = Vec::with_capacity(n_max + 1);
    let mut bn = int_elem(spec, 1);
    for n in 0..=n_max {
        if n > 0 {
            let parts: Vec<Vec<FieldElem>> = wa.par_iter().map(|w| beta_preimages(spec, w)).collect::<Result<_>>()?;
            wa = parts.into_iter().flatten().collect();
            yb = crate::tiles::expand(&spec.r, &yb, caps)?;
            if wa.len() > caps.points {
                return Err(SrsError::PointCap(caps.points));
            }
            bn = bn.mul(&spec.beta());
        }
        let a = split_balls(wa.par_iter().map(|w| phi_embedding(spec, &bn.mul(w))).collect());
        let b = route_b_points(spec, &yb, n)?;
        let h = |p: &EmbeddedPoints| hausdorff_f64(&a.points, &p.points, euclidean) + a.radius + p.radius;
        let (dev, lin) = (h(&b.corrected), h(&b.linear));
        out.push(BetaTileApprox { level: n, route_a: Some(a), route_b: Some(b), deviation: Some(dev), linear_deviation: Some(lin) });
    }
    Ok(out)
}

/// Level-n set equation `S_n(x) = ⋃_{y ∈ T_β^{-1}(x) ∩ Z[β]} Λ_β S_{n-1}(y)`;
/// returns the Euclidean Hausdorff distance between both sides plus radii.
pub fn beta_set_equation_check(spec: &PisotSpec, z: &[BigInt], n: usize, caps: &Caps) -> Result<f64> {
    if n == 0 {
        return Err(SrsError::InvalidParameter("level must be at least 1".into()));
    }
    let lhs = beta_tile_route_a(spec, z, n, caps)?;
    let x = spec.frac_rz(z)?;
    let lam = lambda_matrix(spec);
    let bn1 = spec.beta().pow(n - 1);
    let mut rhs = Vec::new();
    for y in beta_preimages(spec, &x)? {
        let pre = beta_preimages_iter(spec, &y, n - 1, caps)?;
        for w in &pre {
            rhs.push(ball_mat_vec(&lam, &phi_embedding(spec, &bn1.mul(w))));
        }
    }
    let rhs = split_balls(rhs);
    Ok(hausdorff_f64(&lhs.points, &rhs.points, euclidean) + lhs.radius + rhs.radius)
}

/// Complex value of a conjugate, for display.
pub fn conjugate_values(spec: &PisotSpec) -> Vec<Complex64> {
    spec.conjugates.iter().map(|c| c.center_f64()).collect()
}

/// `r` as exact strings.
pub fn param_strings(spec: &PisotSpec) -> Vec<String> {
    spec.coeffs.iter().map(|c| c.to_string()).collect()
}

pub fn rational_elem(spec: &PisotSpec, q: &BigRational) -> FieldElem {
    FieldElem::from_rat(&spec.field, q.clone())
}

pub fn int_elem(spec: &PisotSpec, n: i64) -> FieldElem {
    FieldElem::from_rat(&spec.field, rat_int(&BigInt::from(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;

    fn spec(c: &[i64]) -> PisotSpec {
        PisotSpec::new(&int_vec(c)).unwrap()
    }

    #[test]
    fn golden_parameter() {
        let s = spec(&[-1, -1, 1]);
        let b = s.beta();
        assert_eq!(s.coeffs()[0], b.add_int(&BigInt::from(-1)));
        assert_eq!(b.mul(&s.coeffs()[0]), int_elem(&s, 1));
    }

    #[test]
    fn cubic_minus_three_parameter() {
        let s = spec(&[1, 0, -3, 1]);
        let inv = s.beta().inv().unwrap();
        assert_eq!(s.coeffs()[0], inv.neg());
        assert_eq!(s.coeffs()[1], inv.mul(&inv).neg());
        assert_eq!(s.signature(), (2, 0));
    }

    #[test]
    fn non_pisot_rejected() {
        let e = PisotSpec::new(&int_vec(&[-1, -3, 0, 1])).unwrap_err();
        assert!(matches!(e, SrsError::NotPisot(_)));
    }

    #[test]
    fn golden_digits() {
        let s = spec(&[-1, -1, 1]);
        let x = s.beta().inv().unwrap();
        let d = beta_digits_both(&s, &x, 6).unwrap();
        assert!(d.agree());
        assert_eq!(d.direct, int_vec(&[1, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn tribonacci_u_matrix() {
        let s = spec(&[-1, -1, -1, 1]);
        assert_eq!(s.signature(), (0, 1));
        let (res, ok) = u_eigen_residual(&s);
        assert!(ok, "residual {}", res);
        assert!(u_transform_invertible(&s));
    }

    #[test]
    fn routes_agree_small_level() {
        let s = spec(&[-1, -1, -1, 1]);
        let t = integral_beta_tile_approx(&s, &int_vec(&[0, 0]), 6, Route::Both, &Caps::default()).unwrap();
        assert!(t.deviation.unwrap() < 1e-9, "{:?}", t.deviation);
        assert_eq!(t.route_a.unwrap().points.len(), t.route_b.unwrap().corrected.points.len());
    }
}
