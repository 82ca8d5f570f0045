//! SRS parameters, the companion matrix, the interior test for D_d and the
//! certified contraction data (adapted norm, ρ̃, R̄).

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Result, SrsError};
use crate::field::{FieldElem, NumberField};
use crate::interval::{
    ceil_rat, floor_rat, fmt_rat, parse_rat, rat, rat_int, rat_pow, rat_to_f64, round_up, RatInterval,
};
use crate::linalg::{
    interval_mat_mul, interval_mat_norm_inf_upper, interval_vec_norm_inf, rat_mat_mul, IntVec,
    IntervalMat, RatMat, ScalarMat,
};
use crate::poly::schur_stable;
use crate::real::CertifiedReal;
use crate::scalar::Scalar;

/// Default cap on refinement for interval-backend floors, in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 4096;
const ENCLOSURE_BITS: u32 = 192;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Algebraic,
    Interval,
}

#[derive(Clone, Debug)]
enum Coords {
    Rational(Vec<BigRational>),
    Algebraic(Arc<NumberField>, Vec<FieldElem>),
    Real(Vec<CertifiedReal>),
}

/// A parameter `r = (r_0, ..., r_{d-1})` of the shift radix system
/// `τ_r(z) = (z_1, ..., z_{d-1}, -⌊r·z⌋)`.
#[derive(Clone, Debug)]
pub struct SrsParameter {
    coords: Coords,
    /// For rational parameters: numerators over a common denominator.
    int_form: Option<(Vec<BigInt>, BigInt)>,
    /// For algebraic parameters: power-basis numerators of each `r_i` over
    /// a common denominator.
    alg_form: Option<(Vec<Vec<BigInt>>, BigInt)>,
    precision_cap: u32,
}

impl SrsParameter {
    pub fn rational(r: Vec<BigRational>) -> Result<Self> {
        if r.is_empty() {
            return Err(SrsError::InvalidParameter("empty parameter".into()));
        }
        let den = r.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let nums = r.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        Ok(SrsParameter {
            coords: Coords::Rational(r),
            int_form: Some((nums, den)),
            alg_form: None,
            precision_cap: DEFAULT_PRECISION_BITS,
        })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_fractions(r: &[(i64, i64)]) -> Self {
        Self::rational(r.iter().map(|&(n, d)| rat(n, d)).collect()).expect("non-empty")
    }

    pub fn algebraic(field: &Arc<NumberField>, r: Vec<FieldElem>) -> Result<Self> {
        if r.is_empty() {
            return Err(SrsError::InvalidParameter("empty parameter".into()));
        }
        let den = r
            .iter()
            .flat_map(|e| e.coeffs().iter())
            .fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let nums = r
            .iter()
            .map(|e| e.coeffs().iter().map(|q| q.numer() * (&den / q.denom())).collect())
            .collect();
        Ok(SrsParameter {
            coords: Coords::Algebraic(field.clone(), r),
            int_form: None,
            alg_form: Some((nums, den)),
            precision_cap: crate::field::MAX_BITS,
        })
    }

    pub fn real(r: Vec<CertifiedReal>, precision_cap: u32) -> Result<Self> {
        if r.is_empty() {
            return Err(SrsError::InvalidParameter("empty parameter".into()));
        }
        Ok(SrsParameter { coords: Coords::Real(r), int_form: None, alg_form: None, precision_cap })
    }

    /// Parses `p/q,...` (rational; decimals are read exactly),
    /// `pisot:c0,c1,...` (minimal polynomial, constant term first) or
    /// `real:x0,x1,...` (interval backend; see [`CertifiedReal::parse`]).
    pub fn parse(s: &str, precision_bits: Option<u32>) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("pisot:") {
            let coeffs = parse_int_list(rest)?;
            return Ok(crate::beta::PisotSpec::new(&coeffs)?.param().clone());
        }
        if let Some(rest) = s.strip_prefix("real:") {
            let v = rest.split(',').map(CertifiedReal::parse).collect::<Result<Vec<_>>>()?;
            return Self::real(v, precision_bits.unwrap_or(DEFAULT_PRECISION_BITS));
        }
        let v = s
            .split(',')
            .map(|t| parse_rat(t).ok_or_else(|| SrsError::Parse(format!("bad rational '{}'", t.trim()))))
            .collect::<Result<Vec<_>>>()?;
        Self::rational(v)
    }

    pub fn dim(&self) -> usize {
        match &self.coords {
            Coords::Rational(v) => v.len(),
            Coords::Algebraic(_, v) => v.len(),
            Coords::Real(v) => v.len(),
        }
    }

    pub fn backend(&self) -> Backend {
        match &self.coords {
            Coords::Rational(_) => Backend::Rational,
            Coords::Algebraic(..) => Backend::Algebraic,
            Coords::Real(_) => Backend::Interval,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.backend() != Backend::Interval
    }

    pub fn rational_coords(&self) -> Option<&[BigRational]> {
        match &self.coords {
            Coords::Rational(v) => Some(v),
            _ => None,
        }
    }

    /// Common denominator of a rational parameter.
    pub fn common_denominator(&self) -> Option<&BigInt> {
        self.int_form.as_ref().map(|(_, d)| d)
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        match &self.coords {
            Coords::Algebraic(k, _) => Some(k),
            _ => None,
        }
    }

    pub fn field_coords(&self) -> Option<&[FieldElem]> {
        match &self.coords {
            Coords::Algebraic(_, v) => Some(v),
            _ => None,
        }
    }

    pub fn precision_cap(&self) -> u32 {
        self.precision_cap
    }

    pub fn with_precision_cap(mut self, bits: u32) -> Self {
        self.precision_cap = bits;
        self
    }

    pub fn coord(&self, i: usize) -> Scalar {
        match &self.coords {
            Coords::Rational(v) => Scalar::Rational(v[i].clone()),
            Coords::Algebraic(_, v) => Scalar::Algebraic(v[i].clone()),
            Coords::Real(v) => Scalar::Interval(v[i].enclosure(ENCLOSURE_BITS)),
        }
    }

    pub fn coords_scalar(&self) -> Vec<Scalar> {
        (0..self.dim()).map(|i| self.coord(i)).collect()
    }

    pub fn scalar_from_int(&self, n: &BigInt) -> Scalar {
        match &self.coords {
            Coords::Rational(_) => Scalar::Rational(rat_int(n)),
            Coords::Algebraic(k, _) => Scalar::Algebraic(FieldElem::from_int(k, n)),
            Coords::Real(_) => Scalar::Interval(RatInterval::from_int(n)),
        }
    }

    pub fn scalar_zero(&self) -> Scalar {
        self.scalar_from_int(&BigInt::zero())
    }

    /// Enclosures of the coordinates, of width about `2^-bits` when refinable.
    pub fn enclosures(&self, bits: u32) -> Vec<RatInterval> {
        match &self.coords {
            Coords::Rational(v) => v.iter().cloned().map(RatInterval::point).collect(),
            Coords::Algebraic(_, v) => v.iter().map(|e| e.enclose(bits)).collect(),
            Coords::Real(v) => v.iter().map(|e| e.enclosure(bits)).collect(),
        }
    }

    /// Exact JSON-friendly coordinate strings.
    pub fn coord_strings(&self) -> Vec<String> {
        match &self.coords {
            Coords::Rational(v) => v.iter().map(fmt_rat).collect(),
            Coords::Algebraic(_, v) => v.iter().map(|e| e.to_string()).collect(),
            Coords::Real(v) => v.iter().map(|e| e.to_string()).collect(),
        }
    }

    fn check_dim(&self, z: &[BigInt]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(SrsError::DimensionMismatch { expected: self.dim(), got: z.len() });
        }
        Ok(())
    }

    /// `r_0 != 0`.
    pub fn is_reduced(&self) -> Result<bool> {
        match &self.coords {
            Coords::Rational(v) => Ok(!v[0].is_zero()),
            Coords::Algebraic(_, v) => Ok(!v[0].is_zero()),
            Coords::Real(v) => {
                let mut bits = 64;
                loop {
                    let e = v[0].enclosure(bits);
                    if !e.contains_zero() {
                        return Ok(true);
                    }
                    if (e.is_point() && e.lo.is_zero()) || !v[0].refinable() || bits >= self.precision_cap {
                        return Ok(false);
                    }
                    bits *= 2;
                }
            }
        }
    }

    /// Exact `r·z` for the exact backends, an enclosure otherwise.
    pub fn dot(&self, z: &[BigInt]) -> Scalar {
        match &self.coords {
            Coords::Rational(_) => {
                let (nums, den) = self.int_form.as_ref().unwrap();
                let s: BigInt = nums.iter().zip(z).map(|(a, b)| a * b).sum();
                Scalar::Rational(BigRational::new(s, den.clone()))
            }
            Coords::Algebraic(k, v) => {
                let mut acc = FieldElem::zero(k);
                for (e, zi) in v.iter().zip(z) {
                    if !zi.is_zero() {
                        acc = acc.add(&e.scale_int(zi));
                    }
                }
                Scalar::Algebraic(acc)
            }
            Coords::Real(v) => Scalar::Interval(real_dot(v, z, ENCLOSURE_BITS)),
        }
    }

    /// `⌊r·z⌋`, exactly. Interval-backend floors are refined up to the
    /// precision cap and fail with `PrecisionCap` if still ambiguous.
    pub fn floor_dot(&self, z: &[BigInt]) -> Result<BigInt> {
        self.check_dim(z)?;
        match &self.coords {
            Coords::Rational(_) => {
                let (nums, den) = self.int_form.as_ref().unwrap();
                let s: BigInt = nums.iter().zip(z).map(|(a, b)| a * b).sum();
                Ok(s.div_floor(den))
            }
            Coords::Algebraic(k, _) => {
                let (nums, den) = self.alg_form.as_ref().unwrap();
                let s = alg_combination(nums, z);
                let (lo, hi, sc) = k.fixed_eval(&s);
                let sc = sc * den;
                let a = lo.div_floor(&sc);
                if a == hi.div_floor(&sc) {
                    return Ok(a);
                }
                self.dot(z).floor()
            }
            Coords::Real(v) => {
                let mut bits = 64u32;
                loop {
                    let e = real_dot(v, z, bits);
                    if let Some(f) = e.floor_if_determined() {
                        return Ok(f);
                    }
                    let refinable = v.iter().all(|x| x.refinable());
                    if !refinable || bits >= self.precision_cap {
                        return Err(SrsError::PrecisionCap(format!(
                            "floor of r·z unresolved at {bits} bits (enclosure {e})"
                        )));
                    }
                    bits = (bits * 2).min(self.precision_cap);
                }
            }
        }
    }

    /// `{r·z} = r·z - ⌊r·z⌋`.
    pub fn frac_dot(&self, z: &[BigInt]) -> Result<Scalar> {
        let f = self.floor_dot(z)?;
        Ok(self.dot(z).sub(&self.scalar_from_int(&f)))
    }

    /// `{r·z}` as `(midpoint, radius)`, for output-time numerics.
    pub fn frac_dot_f64(&self, z: &[BigInt]) -> Result<(f64, f64)> {
        if let (Some((nums, den)), Some(k)) = (&self.alg_form, self.field()) {
            let s = alg_combination(nums, z);
            let (lo, hi, sc) = k.fixed_eval(&s);
            let sc = sc * den;
            let f = lo.div_floor(&sc);
            if f == hi.div_floor(&sc) {
                let base = &f * &sc;
                let a = ratio_f64(&(lo - &base), &sc);
                let b = ratio_f64(&(hi - &base), &sc);
                let mid = 0.5 * (a + b);
                return Ok((mid, 0.5 * (b - a) + 4.0 * f64::EPSILON * mid.abs() + 1e-300));
            }
        }
        let e = self.frac_dot(z)?.enclose(64);
        let mid = e.mid_f64();
        Ok((mid, rat_to_f64(&e.width()) + 4.0 * f64::EPSILON * mid.abs() + 1e-300))
    }

    /// All integers `z_0` with `⌊r_0 z_0 + Σ_{i≥1} r_i rest_{i-1}⌋ = target`.
    pub fn first_coordinate_solutions(&self, rest: &[BigInt], target: &BigInt) -> Result<Vec<BigInt>> {
        if !self.is_reduced()? {
            return Err(SrsError::NotReduced);
        }
        let d = self.dim();
        let mut z: IntVec = std::iter::once(BigInt::zero()).chain(rest.iter().cloned()).collect();
        if let Some((nums, den)) = &self.int_form {
            // target*den <= p_0 z_0 + C < (target+1)*den
            let c: BigInt = nums[1..].iter().zip(rest).map(|(a, b)| a * b).sum();
            let low = target * den - &c;
            let high = &low + den; // exclusive
            let p0 = &nums[0];
            let (a, b) = if p0.is_positive() {
                (ceil_div(&low, p0), ceil_div(&high, p0) - 1)
            } else {
                (high.div_floor(p0) + 1, low.div_floor(p0))
            };
            let mut out = Vec::new();
            let mut x = a;
            while x <= b {
                out.push(x.clone());
                x += 1;
            }
            return Ok(out);
        }
        let _ = d;
        if let (Some((nums, den)), Some(k)) = (&self.alg_form, self.field()) {
            // Fixed-point enclosures of r_0 and of the rest of the sum,
            // then exact confirmation of each candidate.
            let c = alg_combination(&nums[1..], rest);
            let (cl, ch, sc) = k.fixed_eval(&c);
            let (al, ah, _) = k.fixed_eval(&nums[0]);
            // Drop to about 64 fractional bits, rounding outward.
            let shift = sc.bits().saturating_sub(64) as usize;
            let s = rat_int(&((sc >> shift) * den));
            let down = |v: BigInt| BigRational::from_integer(v >> shift) / &s;
            let up = |v: BigInt| BigRational::from_integer((v >> shift) + 1) / &s;
            let r0 = RatInterval::new(down(al), up(ah));
            let cc = RatInterval::new(down(cl), up(ch));
            let t = RatInterval::from_int(target);
            let lo_end = t.sub(&cc);
            let hi_end = lo_end.add(&RatInterval::point(BigRational::one()));
            if let (Some(q1), Some(q2)) = (lo_end.div(&r0), hi_end.div(&r0)) {
                let h = q1.hull(&q2);
                let mut x: BigInt = floor_rat(&h.lo) - 1;
                let end = ceil_rat(&h.hi) + 1;
                let mut out = Vec::new();
                while x <= end {
                    z[0] = x.clone();
                    if &self.floor_dot(&z)? == target {
                        out.push(x.clone());
                    }
                    x += 1;
                }
                return Ok(out);
            }
        }
        // Enclose the solution interval, then confirm candidates exactly.
        let enc = self.enclosures(128);
        let mut c = RatInterval::zero();
        for (e, y) in enc[1..].iter().zip(rest) {
            c = c.add(&e.scale_int(y));
        }
        let t = RatInterval::from_int(target);
        let lo_end = t.sub(&c);
        let hi_end = lo_end.add(&RatInterval::point(BigRational::one()));
        let q1 = lo_end.div(&enc[0]);
        let q2 = hi_end.div(&enc[0]);
        let (q1, q2) = match (q1, q2) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(SrsError::PrecisionCap("r_0 enclosure contains 0".into())),
        };
        let h = q1.hull(&q2);
        let mut x: BigInt = floor_rat(&h.lo) - 1;
        let end = ceil_rat(&h.hi) + 1;
        let mut out = Vec::new();
        while x <= end {
            z[0] = x.clone();
            if &self.floor_dot(&z)? == target {
                out.push(x.clone());
            }
            x += 1;
        }
        Ok(out)
    }

    pub fn companion(&self) -> CompanionMatrix {
        CompanionMatrix { last: self.coords_scalar().iter().map(|s| s.neg()).collect() }
    }

    /// Coefficients `(r_0, ..., r_{d-1}, 1)` of the characteristic polynomial
    /// of the companion matrix, enclosed.
    pub fn char_poly_enclosure(&self, bits: u32) -> Vec<RatInterval> {
        let mut v = self.enclosures(bits);
        v.push(RatInterval::point(BigRational::one()));
        v
    }

    /// Is `r` in the interior of D_d, i.e. is the spectral radius of `M_r`
    /// below 1? Exact for rational parameters; refined enclosures otherwise.
    pub fn is_interior(&self) -> Result<bool> {
        let mut bits = 64u32;
        loop {
            if let Some(b) = schur_stable(&self.char_poly_enclosure(bits)) {
                return Ok(b);
            }
            let cap = self.precision_cap.min(crate::field::MAX_BITS);
            if bits >= cap || matches!(&self.coords, Coords::Real(v) if v.iter().any(|x| !x.refinable())) {
                return Err(SrsError::PrecisionCap(
                    "spectral radius indistinguishable from 1 at working precision".into(),
                ));
            }
            bits = (bits * 2).min(cap);
        }
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn real_dot(v: &[CertifiedReal], z: &[BigInt], bits: u32) -> RatInterval {
    let zb = z.iter().map(|x| x.bits()).max().unwrap_or(0) as u32;
    v.iter()
        .zip(z)
        .fold(RatInterval::zero(), |s, (x, zi)| s.add(&x.enclosure(bits + zb + 4).scale_int(zi)))
}

/// `a / b` in floating point for integers of any size.
fn ratio_f64(a: &BigInt, b: &BigInt) -> f64 {
    let shift = b.bits().saturating_sub(64);
    let a = (a >> shift as usize).to_f64().unwrap_or(0.0);
    let b = (b >> shift as usize).to_f64().unwrap_or(1.0);
    a / b
}

/// `Σ_i z_i n_i` for integer coefficient vectors `n_i`.
fn alg_combination(nums: &[Vec<BigInt>], z: &[BigInt]) -> Vec<BigInt> {
    let k = nums.first().map_or(0, |v| v.len());
    let mut s = vec![BigInt::zero(); k];
    for (row, zi) in nums.iter().zip(z) {
        if zi.is_zero() {
            continue;
        }
        for (acc, c) in s.iter_mut().zip(row) {
            *acc += c * zi;
        }
    }
    s
}

pub fn parse_int_list(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|t| t.trim().parse::<BigInt>().map_err(|_| SrsError::Parse(format!("bad integer '{}'", t.trim()))))
        .collect()
}

pub fn parse_int_vec(s: &str) -> Result<IntVec> {
    parse_int_list(s)
}

/// The companion matrix with superdiagonal ones and last row `-r`.
#[derive(Clone, Debug)]
pub struct CompanionMatrix {
    last: Vec<Scalar>,
}

impl CompanionMatrix {
    pub fn dim(&self) -> usize {
        self.last.len()
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let d = self.dim();
        let mut out: Vec<Scalar> = v[1..].to_vec();
        let mut s = self.last[0].zero_like();
        for i in 0..d {
            s = s.add(&self.last[i].mul(&v[i]));
        }
        out.push(s);
        out
    }

    pub fn dense(&self) -> ScalarMat {
        let d = self.dim();
        let z = self.last[0].zero_like();
        let one = self.last[0].one_like();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        if i + 1 == d {
                            self.last[j].clone()
                        } else if j == i + 1 {
                            one.clone()
                        } else {
                            z.clone()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `M^n` as a dense matrix, by repeated multiplication on the left.
    pub fn pow(&self, n: usize) -> ScalarMat {
        let d = self.dim();
        let z = self.last[0].zero_like();
        let one = self.last[0].one_like();
        let mut cols: Vec<Vec<Scalar>> = (0..d)
            .map(|j| (0..d).map(|i| if i == j { one.clone() } else { z.clone() }).collect())
            .collect();
        for _ in 0..n {
            cols = cols.iter().map(|c| self.apply(c)).collect();
        }
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }
}

/// The adapted norm `‖x‖ = max_{k<m} ‖M^k x‖_∞ / ρ̃^k`, which satisfies
/// `‖M x‖ <= ρ̃ ‖x‖` and `‖x‖_∞ <= ‖x‖`.
#[derive(Clone, Debug)]
pub struct AdaptedNorm {
    pub rho_tilde: BigRational,
    pub m: usize,
    /// `M^k / ρ̃^k`, exactly (rational backend only).
    exact: Option<Vec<RatMat>>,
    enclosed: Vec<IntervalMat>,
    approx: Vec<Vec<Vec<f64>>>,
}

impl AdaptedNorm {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn eval_exact(&self, x: &[BigRational]) -> Option<BigRational> {
        let ex = self.exact.as_ref()?;
        let mut best = BigRational::zero();
        for q in ex {
            for row in q {
                let mut s = BigRational::zero();
                for (a, b) in row.iter().zip(x) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                let s = s.abs();
                if s > best {
                    best = s;
                }
            }
        }
        Some(best)
    }

    pub fn eval_enclosure(&self, x: &[RatInterval]) -> RatInterval {
        let mut best = RatInterval::zero();
        for q in &self.enclosed {
            let v = crate::linalg::interval_mat_vec(q, x);
            best = best.max(&interval_vec_norm_inf(&v));
        }
        best
    }

    /// Norm of a backend vector: exact (point interval) when possible.
    pub fn eval(&self, x: &[Scalar]) -> RatInterval {
        if self.exact.is_some() {
            if let Some(v) = x.iter().map(|s| s.as_rational().cloned()).collect::<Option<Vec<_>>>() {
                return RatInterval::point(self.eval_exact(&v).unwrap());
            }
        }
        let enc: Vec<RatInterval> = x.iter().map(|s| s.enclose(ENCLOSURE_BITS).round(ENCLOSURE_BITS)).collect();
        self.eval_enclosure(&enc)
    }

    pub fn eval_int(&self, z: &[BigInt]) -> RatInterval {
        if self.exact.is_some() {
            let v: Vec<BigRational> = z.iter().map(rat_int).collect();
            return RatInterval::point(self.eval_exact(&v).unwrap());
        }
        let enc: Vec<RatInterval> = z.iter().map(RatInterval::from_int).collect();
        self.eval_enclosure(&enc)
    }

    /// Floating-point evaluation, for prefiltering only.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut best = 0.0f64;
        for q in &self.approx {
            for row in q {
                let s: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
                best = best.max(s.abs());
            }
        }
        best
    }
}

/// Certified contraction data for an interior parameter.
#[derive(Clone, Debug)]
pub struct ContractionData {
    /// Certified upper bound for the spectral radius of `M_r`.
    pub rho_upper: BigRational,
    /// Contraction factor of the adapted norm.
    pub rho_tilde: BigRational,
    pub norm: AdaptedNorm,
    /// Enclosure of `‖e_d‖`.
    pub e_d_norm: RatInterval,
    /// `R̄ >= R = Σ_n ‖M^n e_d‖`, with `R̄ - R <= tolerance`.
    pub r_bar: BigRational,
    /// Certified lower bound for `R`.
    pub r_lower: BigRational,
    pub tail_bound: BigRational,
    pub terms: usize,
    /// `c_low ‖x‖_∞ <= ‖x‖ <= c_high ‖x‖_∞`.
    pub c_low: BigRational,
    pub c_high: BigRational,
}

#[derive(Clone, Debug)]
pub struct ContractionOptions {
    pub tail_tolerance: BigRational,
    /// Largest `j` tried in `ρ̃ = ρ_upper + 2^-j (1 - ρ_upper)`.
    pub max_j: u32,
    /// Largest `m` tried when certifying `‖M^m‖_∞ <= ρ̃^m`.
    pub max_m: usize,
}

impl Default for ContractionOptions {
    fn default() -> Self {
        ContractionOptions { tail_tolerance: rat(1, 1024), max_j: 2, max_m: 400 }
    }
}

impl ContractionData {
    /// `ε_n = ρ̃^n ‖e_d‖ / (1 - ρ̃)`, the level-n tile approximation error.
    pub fn error_bound(&self, n: usize) -> BigRational {
        rat_pow(&self.rho_tilde, n) * &self.e_d_norm.hi / (BigRational::one() - &self.rho_tilde)
    }

    /// `ρ̃^n ‖e_d‖`, the bound on consecutive approximation distances.
    pub fn cauchy_bound(&self, n: usize) -> BigRational {
        rat_pow(&self.rho_tilde, n) * &self.e_d_norm.hi
    }

    /// Integer points `center + y` with `‖y‖ <= radius` (a superset when the
    /// norm is only enclosed), in lexicographic order of `y`.
    pub fn ball(&self, center: &[BigInt], radius: &BigRational, cap: usize) -> Result<Vec<IntVec>> {
        let d = center.len();
        // ‖y‖_∞ <= ‖y‖ / c_low
        let bound = floor_rat(&(radius / &self.c_low));
        let side: BigInt = BigInt::from(2) * &bound + 1;
        let side_u: usize = side
            .try_into()
            .map_err(|_| SrsError::PointCap(cap))?;
        let total = side_u.checked_pow(d as u32).ok_or(SrsError::PointCap(cap))?;
        if total > cap.saturating_mul(8) {
            return Err(SrsError::PointCap(cap));
        }
        let b: i64 = (&bound).try_into().map_err(|_| SrsError::PointCap(cap))?;
        let rf = rat_to_f64(radius) * (1.0 + 1e-9) + 1e-12;
        let exact = self.norm.is_exact();
        let mut out = Vec::new();
        let mut y = vec![-b; d];
        loop {
            let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
            let nf = self.norm.eval_f64(&yf);
            let keep = if nf > rf * (1.0 + 1e-6) {
                false
            } else if exact && (nf - rf).abs() < 1e-6 * (1.0 + rf) {
                let yb: Vec<BigInt> = y.iter().map(|&v| BigInt::from(v)).collect();
                &self.norm.eval_int(&yb).lo <= radius
            } else {
                true
            };
            if keep {
                out.push(center.iter().zip(&y).map(|(c, v)| c + BigInt::from(*v)).collect());
                if out.len() > cap {
                    return Err(SrsError::PointCap(cap));
                }
            }
            // lexicographic increment
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if y[i] < b {
                    y[i] += 1;
                    for t in y.iter_mut().skip(i + 1) {
                        *t = -b;
                    }
                    break;
                }
            }
        }
    }
}

fn enclosed_companion(r: &SrsParameter) -> IntervalMat {
    let d = r.dim();
    let enc = r.enclosures(ENCLOSURE_BITS);
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i + 1 == d {
                        enc[j].neg()
                    } else if j == i + 1 {
                        RatInterval::point(BigRational::one())
                    } else {
                        RatInterval::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn scaled_schur(coeffs: &[RatInterval], s: &BigRational) -> Option<bool> {
    let mut p = s.clone();
    let mut out = Vec::with_capacity(coeffs.len());
    out.push(coeffs[0].clone());
    for c in &coeffs[1..] {
        out.push(c.scale(&p));
        p = &p * s;
    }
    schur_stable(&out)
}

/// Certified upper bound for the spectral radius on the dyadic grid `2^-16`.
pub fn spectral_radius_upper(r: &SrsParameter) -> Result<BigRational> {
    if !r.is_interior()? {
        return Err(SrsError::NotContractive);
    }
    let coeffs = r.char_poly_enclosure(ENCLOSURE_BITS);
    let mut lo = BigRational::zero();
    let mut hi = BigRational::one();
    for _ in 0..16 {
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        if mid.is_zero() {
            break;
        }
        if scaled_schur(&coeffs, &mid) == Some(true) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Computes the certified contraction data for an interior parameter.
pub fn contraction_data(r: &SrsParameter, opts: &ContractionOptions) -> Result<ContractionData> {
    let d = r.dim();
    let rho_upper = spectral_radius_upper(r)?;
    let m_enc = enclosed_companion(r);
    let one = BigRational::one();

    // Powers M^k enclosed, computed once up to max_m.
    let mut powers: Vec<IntervalMat> = vec![identity_interval(d)];
    let mut norms: Vec<BigRational> = vec![one.clone()];
    let mut chosen: Option<(BigRational, usize)> = None;
    for j in 1..=opts.max_j {
        let rho_t = &rho_upper + (&one - &rho_upper) / rat_int(&crate::interval::pow2(j));
        let mut found = None;
        let mut rp = one.clone();
        for mm in 1..=opts.max_m {
            rp = &rp * &rho_t;
            while powers.len() <= mm {
                let next = interval_mat_mul(powers.last().unwrap(), &m_enc, Some(ENCLOSURE_BITS));
                norms.push(interval_mat_norm_inf_upper(&next));
                powers.push(next);
            }
            if norms[mm] <= rp {
                found = Some(mm);
                break;
            }
        }
        match found {
            Some(mm) => chosen = Some((rho_t, mm)),
            None => break,
        }
    }
    let (rho_tilde, m) = chosen.ok_or_else(|| {
        SrsError::PrecisionCap(format!("adapted norm not certified with m <= {}", opts.max_m))
    })?;

    let exact = r.rational_coords().map(|_| {
        let mut mats: Vec<RatMat> = Vec::with_capacity(m);
        let base: RatMat = r
            .companion()
            .dense()
            .iter()
            .map(|row| row.iter().map(|s| s.as_rational().unwrap().clone()).collect())
            .collect();
        let mut p = crate::linalg::rat_identity(d);
        let mut rk = one.clone();
        for _ in 0..m {
            mats.push(p.iter().map(|row| row.iter().map(|x| x / &rk).collect()).collect());
            p = rat_mat_mul(&base, &p);
            rk = &rk * &rho_tilde;
        }
        mats
    });
    let mut enclosed = Vec::with_capacity(m);
    let mut rk = one.clone();
    for k in 0..m {
        let inv = one.clone() / &rk;
        let q: IntervalMat = match &exact {
            Some(ex) => ex[k].iter().map(|row| row.iter().cloned().map(RatInterval::point).collect()).collect(),
            None => powers[k].iter().map(|row| row.iter().map(|x| x.scale(&inv)).collect()).collect(),
        };
        enclosed.push(q);
        rk = &rk * &rho_tilde;
    }
    let approx = enclosed
        .iter()
        .map(|q| q.iter().map(|row| row.iter().map(|x| x.mid_f64()).collect()).collect())
        .collect();
    let norm = AdaptedNorm { rho_tilde: rho_tilde.clone(), m, exact, enclosed, approx };
    let c_high = norm
        .enclosed
        .iter()
        .map(interval_mat_norm_inf_upper)
        .max()
        .unwrap_or_else(|| one.clone());

    let mut e_d: IntVec = vec![BigInt::zero(); d];
    e_d[d - 1] = BigInt::one();
    let e_d_norm = norm.eval_int(&e_d);

    // R = Σ_n ‖M^n e_d‖ with ‖M^n e_d‖ = max_{k<m} ‖w_{n+k}‖_∞ ρ̃^-k.
    let enc = r.enclosures(ENCLOSURE_BITS);
    let mut w: Vec<Vec<RatInterval>> = vec![e_d.iter().map(RatInterval::from_int).collect()];
    // Rational r: iterate rounded points and bound the accumulated rounding
    // error by c_high 2^-bits / (1 - ρ̃) in the adapted norm, which dominates
    // ‖·‖_∞. Plain interval iteration would grow like |M|^n instead.
    let mut mid: Option<Vec<BigRational>> = r.rational_coords().map(|_| e_d.iter().map(rat_int).collect());
    let eta = &c_high / rat_int(&crate::interval::pow2(ENCLOSURE_BITS)) / (&one - &rho_tilde);
    let mut step = |v: &Vec<RatInterval>| -> Vec<RatInterval> {
        if let (Some(m), Some(rc)) = (mid.as_mut(), r.rational_coords()) {
            let mut s = BigRational::zero();
            for (a, b) in rc.iter().zip(m.iter()) {
                s -= a * b;
            }
            m.remove(0);
            m.push(crate::interval::round_down(&s, ENCLOSURE_BITS));
            return m.iter().map(|x| RatInterval::new(x - &eta, x + &eta)).collect();
        }
        let mut out: Vec<RatInterval> = v[1..].to_vec();
        let mut s = RatInterval::zero();
        for (a, b) in enc.iter().zip(v) {
            s = s.sub(&a.mul(b));
        }
        out.push(s.round(ENCLOSURE_BITS));
        out
    };
    let inv_rho_pows: Vec<BigRational> = {
        let mut v = Vec::with_capacity(m);
        let mut p = one.clone();
        for _ in 0..m {
            v.push(p.clone());
            p = round_up(&(&p / &rho_tilde), ENCLOSURE_BITS);
        }
        v
    };
    let rho_pows_up: Vec<BigRational> = {
        let mut v = Vec::with_capacity(m);
        let mut p = one.clone();
        for _ in 0..m {
            v.push(p.clone());
            p = round_up(&(&p * &rho_tilde), ENCLOSURE_BITS);
        }
        v
    };
    let half_tol = &opts.tail_tolerance / BigRational::from_integer(BigInt::from(2));
    let coef = &e_d_norm.hi / (&one - &rho_tilde);
    let mut sum_hi = BigRational::zero();
    let mut sum_lo = BigRational::zero();
    let mut rho_n = one.clone();
    let mut n = 0usize;
    loop {
        let tail = &rho_n * &coef;
        if tail <= half_tol {
            let r_bar = round_up(&(&sum_hi + &tail), 40);
            if &r_bar - &sum_lo > opts.tail_tolerance {
                return Err(SrsError::PrecisionCap("R bound not within tolerance".into()));
            }
            return Ok(ContractionData {
                rho_upper,
                rho_tilde,
                norm,
                e_d_norm,
                r_bar,
                r_lower: sum_lo,
                tail_bound: tail,
                terms: n,
                c_low: one,
                c_high,
            });
        }
        while w.len() < n + m {
            let nx = step(w.last().unwrap());
            w.push(nx);
        }
        let mut hi = BigRational::zero();
        let mut lo = BigRational::zero();
        for k in 0..m {
            let v = interval_vec_norm_inf(&w[n + k]);
            let th = &v.hi * &inv_rho_pows[k];
            let tl = &v.lo / &rho_pows_up[k];
            if th > hi {
                hi = th;
            }
            if tl > lo {
                lo = tl;
            }
        }
        sum_hi += round_up(&hi, ENCLOSURE_BITS);
        sum_lo += crate::interval::round_down(&lo, ENCLOSURE_BITS);
        rho_n = round_up(&(&rho_n * &rho_tilde), ENCLOSURE_BITS);
        n += 1;
        if n > 200_000 {
            return Err(SrsError::PrecisionCap("R series did not converge within cap".into()));
        }
    }
}

fn identity_interval(d: usize) -> IntervalMat {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { RatInterval::point(BigRational::one()) } else { RatInterval::zero() })
                .collect()
        })
        .collect()
}

/// Ordering helper for sorting integer vectors lexicographically.
pub fn lex_cmp(a: &[BigInt], b: &[BigInt]) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;

    #[test]
    fn floor_of_example_dot() {
        let r = SrsParameter::from_fractions(&[(9, 10), (-11, 20)]);
        let z = int_vec(&[-1, -1]);
        assert_eq!(r.floor_dot(&z).unwrap(), BigInt::from(-1));
        assert_eq!(r.frac_dot(&z).unwrap(), Scalar::Rational(rat(13, 20)));
    }

    #[test]
    fn interior_examples() {
        let t = |v: &[(i64, i64)]| SrsParameter::from_fractions(v).is_interior().unwrap();
        assert!(t(&[(1, 2), (-1, 2)]));
        assert!(t(&[(3, 4), (1, 1)]));
        assert!(t(&[(9, 10), (-11, 20)]));
        assert!(!t(&[(1, 1)]));
        assert!(!t(&[(-1, 1)]));
        assert!(t(&[(-2, 3)]));
        assert!(!t(&[(1, 1), (1, 1)]));
    }

    #[test]
    fn contraction_one_dimensional() {
        let r = SrsParameter::from_fractions(&[(-2, 3)]);
        let cd = contraction_data(&r, &ContractionOptions::default()).unwrap();
        assert_eq!(cd.norm.m, 1);
        assert!(cd.r_bar >= rat(3, 1));
        assert!(cd.r_bar <= rat(3, 1) + rat(1, 1024));
        assert!(cd.r_lower <= rat(3, 1));
    }

    #[test]
    fn rational_preimage_solutions() {
        let r = SrsParameter::from_fractions(&[(-2, 3)]);
        // floor(-2/3 z) = 0  <=>  z in {-1, 0}
        assert_eq!(r.first_coordinate_solutions(&[], &BigInt::zero()).unwrap(), int_vec(&[-1, 0]));
    }

    #[test]
    fn parse_forms() {
        let r = SrsParameter::parse("9/10, -0.55", None).unwrap();
        assert_eq!(r.rational_coords().unwrap(), &[rat(9, 10), rat(-11, 20)]);
        let s = SrsParameter::parse("real:sqrt(2)/2", None);
        assert!(s.is_err());
        let s = SrsParameter::parse("real:1/2*sqrt(2)", None).unwrap();
        assert_eq!(s.backend(), Backend::Interval);
        assert_eq!(s.floor_dot(&int_vec(&[3])).unwrap(), BigInt::from(2));
    }
}
