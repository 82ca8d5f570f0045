//! Tiling questions: exclusive points and their certificates, candidate
//! tiles at a point, covering-degree bounds, and the one-dimensional
//! interval tilings (including the r = -2/3 counting experiments).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dynamics::{tau_iter, Caps};
use crate::error::{Result, SrsError};
use crate::interval::{ceil_rat, floor_rat, rat, rat_int, rat_pow, RatInterval};
use crate::linalg::IntVec;
use crate::params::{ContractionData, SrsParameter};
use crate::scalar::Scalar;
use crate::tiles::{membership, tile_approx, tile_preimages, Membership};

/// Evidence that `M^n z` lies in at most `|witness_set|` tiles: every tile
/// through that point is `T(w)` for some `w` in the witness set.
#[derive(Clone, Debug, PartialEq)]
pub struct ExclusivityCertificate {
    pub z: IntVec,
    pub n: usize,
    /// `{τ^n(z + y) : ‖y‖ <= R̄}`, sorted.
    pub witness_set: Vec<IntVec>,
    pub ball_size: usize,
    pub r_bar: BigRational,
    /// `M^n z`.
    pub certified_point: Vec<Scalar>,
}

impl ExclusivityCertificate {
    pub fn multiplicity(&self) -> usize {
        self.witness_set.len()
    }
}

fn witness_set(r: &SrsParameter, cd: &ContractionData, z: &[BigInt], n: usize, caps: &Caps) -> Result<(Vec<IntVec>, usize)> {
    let ball = cd.ball(z, &cd.r_bar, caps.points)?;
    let mut w: Vec<IntVec> = ball.iter().map(|p| tau_iter(r, p, n)).collect::<Result<_>>()?;
    w.sort();
    w.dedup();
    Ok((w, ball.len()))
}

pub fn exclusivity_certificate(
    r: &SrsParameter,
    cd: &ContractionData,
    z: &[BigInt],
    n: usize,
    caps: &Caps,
) -> Result<ExclusivityCertificate> {
    let (witness_set, ball_size) = witness_set(r, cd, z, n, caps)?;
    let to_s: Vec<Scalar> = z.iter().map(|x| r.scalar_from_int(x)).collect();
    let certified_point = crate::linalg::scalar_mat_vec(&r.companion().pow(n), &to_s);
    Ok(ExclusivityCertificate {
        z: z.to_vec(),
        n,
        witness_set,
        ball_size,
        r_bar: cd.r_bar.clone(),
        certified_point,
    })
}

/// Smallest `n <= n_max` whose certificate has a single witness; otherwise
/// the certificate with the fewest witnesses.
pub fn search_exclusive(
    r: &SrsParameter,
    cd: &ContractionData,
    z: &[BigInt],
    n_max: usize,
    caps: &Caps,
) -> Result<ExclusivityCertificate> {
    let mut best: Option<ExclusivityCertificate> = None;
    for n in 0..=n_max {
        let c = exclusivity_certificate(r, cd, z, n, caps)?;
        let done = c.multiplicity() == 1;
        if best.as_ref().map_or(true, |b| c.multiplicity() < b.multiplicity()) {
            best = Some(c);
        }
        if done {
            break;
        }
    }
    Ok(best.unwrap())
}

/// Recomputes a certificate from scratch and compares.
pub fn verify_certificate(r: &SrsParameter, cd: &ContractionData, cert: &ExclusivityCertificate, caps: &Caps) -> Result<bool> {
    if cd.r_bar > cert.r_bar {
        return Ok(false);
    }
    let fresh = exclusivity_certificate(r, cd, &cert.z, cert.n, caps)?;
    Ok(fresh.witness_set == cert.witness_set && fresh.certified_point == cert.certified_point)
}

/// If `τ^n(z + a + y) - τ^n(z + y)` is the same vector `b` for every
/// `‖y‖ <= R̄`, returns `b`.
pub fn translation_stability(
    r: &SrsParameter,
    cd: &ContractionData,
    z: &[BigInt],
    n: usize,
    a: &[BigInt],
    caps: &Caps,
) -> Result<Option<IntVec>> {
    let zero = vec![BigInt::zero(); z.len()];
    let ball = cd.ball(&zero, &cd.r_bar, caps.points)?;
    let mut b: Option<IntVec> = None;
    for y in &ball {
        let p: IntVec = z.iter().zip(y).map(|(s, t)| s + t).collect();
        let q: IntVec = p.iter().zip(a).map(|(s, t)| s + t).collect();
        let diff: IntVec = tau_iter(r, &q, n)?.iter().zip(tau_iter(r, &p, n)?).map(|(s, t)| s - t).collect();
        match &b {
            None => b = Some(diff),
            Some(prev) if *prev != diff => return Ok(None),
            _ => {}
        }
    }
    Ok(b)
}

/// For rational `r` with common denominator `q`, the translation
/// `a = q^n k` satisfies `τ^n(x + a) = τ^n(x) + b` for all `x`.
pub fn rational_translation(r: &SrsParameter, n: usize, k: &[BigInt]) -> Result<IntVec> {
    let q = r
        .common_denominator()
        .ok_or_else(|| SrsError::Unsupported("rational translation needs a rational parameter".into()))?;
    let qn = num_traits::pow(q.clone(), n);
    Ok(k.iter().map(|x| x * &qn).collect())
}

/// `M^k t`, which is exclusive whenever `t` is.
pub fn scaled_exclusive(r: &SrsParameter, cert: &ExclusivityCertificate, k: usize) -> Vec<Scalar> {
    let m = r.companion();
    let mut p = cert.certified_point.clone();
    for _ in 0..k {
        p = m.apply(&p);
    }
    p
}

/// Centers `x` whose tile may contain `t`: `‖t - x‖ <= R̄` and the level-n
/// approximation of `T(x)` comes within `ε_n` of `t`.
pub fn candidate_tiles_at(r: &SrsParameter, cd: &ContractionData, t: &[Scalar], n: usize, caps: &Caps) -> Result<Vec<IntVec>> {
    let d = r.dim();
    let enc: Vec<RatInterval> = t.iter().map(|s| s.enclose(128)).collect();
    let ranges: Vec<(BigInt, BigInt)> = enc
        .iter()
        .map(|e| (ceil_rat(&(&e.lo - &cd.r_bar)), floor_rat(&(&e.hi + &cd.r_bar))))
        .collect();
    let mut out = Vec::new();
    let mut x: IntVec = ranges.iter().map(|(a, _)| a.clone()).collect();
    if ranges.iter().any(|(a, b)| a > b) {
        return Ok(out);
    }
    loop {
        let diff: Vec<Scalar> = t.iter().zip(&x).map(|(s, v)| s.sub(&r.scalar_from_int(v))).collect();
        if cd.norm.eval(&diff).lo <= cd.r_bar {
            let m = membership(r, cd, t, &x, n, caps)?;
            if m.verdict == Membership::PossiblyInside {
                out.push(x.clone());
            }
        }
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if x[i] < ranges[i].1 {
                x[i] += 1;
                for j in i + 1..d {
                    x[j] = ranges[j].0.clone();
                }
                break;
            }
        }
    }
}

/// Bounds on the covering degree `m` of the tile collection.
///
/// `degree_lower` is 1 (the tiles cover). `degree_upper` is the smallest
/// witness count among the certificates tried: a point with `k` possible
/// tiles has degree at most `k`, so `m <= k`. `sample_max` is the largest
/// candidate count over the sample grid; it bounds the degree at the
/// sampled points only and is heuristic for the box as a whole.
#[derive(Clone, Debug)]
pub struct CoveringDegreeBounds {
    pub degree_lower: usize,
    pub degree_upper: Option<usize>,
    pub sample_max: usize,
    pub samples: usize,
    pub certificate: Option<ExclusivityCertificate>,
}

pub fn covering_degree_bounds(
    r: &SrsParameter,
    cd: &ContractionData,
    sample_lo: &[BigRational],
    sample_hi: &[BigRational],
    grid: usize,
    n: usize,
    cert_levels: usize,
    caps: &Caps,
) -> Result<CoveringDegreeBounds> {
    let d = r.dim();
    let zero = vec![BigInt::zero(); d];
    let cert = search_exclusive(r, cd, &zero, cert_levels, caps)?;
    let grid = grid.max(1);
    let mut idx = vec![0usize; d];
    let mut sample_max = 0;
    let mut samples = 0;
    loop {
        let t: Vec<Scalar> = (0..d)
            .map(|i| {
                let frac = if grid == 1 {
                    rat(1, 2)
                } else {
                    BigRational::new(BigInt::from(idx[i]), BigInt::from(grid - 1))
                };
                Scalar::Rational(&sample_lo[i] + (&sample_hi[i] - &sample_lo[i]) * frac)
            })
            .map(|s| match r.backend() {
                crate::params::Backend::Rational => s,
                _ => r.scalar_zero().add(&s),
            })
            .collect();
        let c = candidate_tiles_at(r, cd, &t, n, caps)?;
        sample_max = sample_max.max(c.len());
        samples += 1;
        let mut i = d;
        let mut done = true;
        while i > 0 {
            i -= 1;
            if idx[i] + 1 < grid {
                idx[i] += 1;
                for j in i + 1..d {
                    idx[j] = 0;
                }
                done = false;
                break;
            }
        }
        if done {
            break;
        }
    }
    Ok(CoveringDegreeBounds {
        degree_lower: 1,
        degree_upper: Some(cert.multiplicity()),
        sample_max,
        samples,
        certificate: Some(cert),
    })
}

/// A one-dimensional tile `T(N) = [a, b]` with brackets for both endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalTile {
    pub center: BigInt,
    pub level: usize,
    /// `a ∈ [left.lo, left.hi]`.
    pub left: RatInterval,
    /// `b ∈ [right.lo, right.hi]`.
    pub right: RatInterval,
    pub count: usize,
    /// `|r_0|^n · #τ^{-n}(N)`.
    pub length_estimate: BigRational,
    pub min_point: BigRational,
    pub max_point: BigRational,
}

#[derive(Clone, Debug)]
pub struct IntervalTiling {
    pub tiles: Vec<IntervalTile>,
    /// Approximations of consecutive tiles never interleave.
    pub ordered: bool,
}

pub fn interval_tiling(r: &SrsParameter, cd: &ContractionData, from: i64, to: i64, n: usize, caps: &Caps) -> Result<IntervalTiling> {
    if r.dim() != 1 || r.rational_coords().is_none() {
        return Err(SrsError::Unsupported("interval tilings need a rational parameter with d = 1".into()));
    }
    let r0 = r.rational_coords().unwrap()[0].abs();
    let mut tiles = Vec::new();
    for c in from..=to {
        let x = vec![BigInt::from(c)];
        let t = tile_approx(r, cd, &x, n, caps)?;
        let pts: Vec<BigRational> = t.points_rational().unwrap().into_iter().map(|p| p[0].clone()).collect();
        let lo = pts.iter().min().unwrap().clone();
        let hi = pts.iter().max().unwrap().clone();
        let e = &t.error_bound;
        tiles.push(IntervalTile {
            center: BigInt::from(c),
            level: n,
            left: RatInterval::new(&lo - e, &lo + e),
            right: RatInterval::new(&hi - e, &hi + e),
            count: t.len(),
            length_estimate: rat_pow(&r0, n) * BigRational::from_integer(BigInt::from(t.len())),
            min_point: lo,
            max_point: hi,
        });
    }
    let ordered = tiles.windows(2).all(|w| w[0].max_point < w[1].min_point);
    Ok(IntervalTiling { tiles, ordered })
}

/// `#τ^{-n}(I)` for a finite set of integers in dimension one.
pub fn preimage_count(r: &SrsParameter, set: &[BigInt], n: usize, caps: &Caps) -> Result<usize> {
    let mut total = 0;
    for x in set {
        total += tile_preimages(r, &[x.clone()], n, caps)?.len();
    }
    Ok(total)
}

/// For `r = -2/3` and a set `I` of consecutive integers:
/// `(#I-1)(3/2)^n + 1 <= #τ^{-n}(I) <= (#I+1)(3/2)^n - 1`.
pub fn count_bounds_minus_two_thirds(size: usize, n: usize) -> (BigRational, BigRational) {
    let g = rat_pow(&rat(3, 2), n);
    let s = BigRational::from_integer(BigInt::from(size));
    let one = BigRational::one();
    ((&s - &one) * &g + &one, (&s + &one) * &g - &one)
}

#[derive(Clone, Debug)]
pub struct CensusRow {
    pub k: usize,
    /// Smallest `|N|` with singleton fibres `τ^{-j}(N)`, `j < k`, and
    /// `#τ^{-k}(N) = 2`.
    pub n_k: BigInt,
    pub level: usize,
    pub count: usize,
    /// Certified bracket for the length of `T(N_k)`.
    pub length: RatInterval,
    /// `[(2/3)^k, 3 (2/3)^k]`.
    pub bound: RatInterval,
}

#[derive(Clone, Debug)]
pub struct ShapeCensus {
    pub rows: Vec<CensusRow>,
    /// Indices (into `rows`) of a largest family of pairwise disjoint brackets.
    pub disjoint_classes: Vec<usize>,
}

fn fibre_profile(r: &SrsParameter, x: &BigInt, k: usize, caps: &Caps) -> Result<bool> {
    let mut f = vec![vec![x.clone()]];
    for j in 1..=k {
        f = crate::tiles::expand(r, &f, caps)?;
        let want = if j < k { 1 } else { 2 };
        if f.len() != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tile lengths for `r = -2/3` along the integers `N_k`, `k = 1..=k_max`.
pub fn shape_census(k_max: usize, extra_levels: usize, search_cap: u64, caps: &Caps) -> Result<ShapeCensus> {
    let r = SrsParameter::from_fractions(&[(-2, 3)]);
    let two_thirds = rat(2, 3);
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let mut found = None;
        for i in 0..=2 * search_cap {
            let v = if i % 2 == 0 { (i / 2) as i64 } else { -(((i + 1) / 2) as i64) };
            let x = BigInt::from(v);
            if fibre_profile(&r, &x, k, caps)? {
                found = Some(x);
                break;
            }
        }
        let n_k = found.ok_or(SrsError::StepCap(search_cap))?;
        let level = k + extra_levels;
        let count = tile_preimages(&r, &[n_k.clone()], level, caps)?.len();
        let g = rat_pow(&two_thirds, level);
        let c = rat_int(&BigInt::from(count));
        let one = BigRational::one();
        let length = RatInterval::new((&c - &one) * &g, (&c + &one) * &g);
        let gk = rat_pow(&two_thirds, k);
        let bound = RatInterval::new(gk.clone(), &gk * rat(3, 1));
        rows.push(CensusRow { k, n_k, level, count, length, bound });
    }
    // Interval scheduling: greedy by right endpoint gives a maximum family.
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].length.hi.cmp(&rows[b].length.hi));
    let mut chosen: Vec<usize> = Vec::new();
    let mut last: Option<BigRational> = None;
    for i in order {
        if last.as_ref().map_or(true, |l| rows[i].length.lo > *l) {
            last = Some(rows[i].length.hi.clone());
            chosen.push(i);
        }
    }
    chosen.sort();
    Ok(ShapeCensus { rows, disjoint_classes: chosen })
}

pub fn usize_of(x: &BigInt) -> Option<usize> {
    x.to_usize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;
    use crate::params::{contraction_data, ContractionOptions};

    #[test]
    fn half_tiles_are_unit_intervals() {
        let r = SrsParameter::from_fractions(&[(1, 2)]);
        let cd = contraction_data(&r, &ContractionOptions::default()).unwrap();
        let t = interval_tiling(&r, &cd, -3, 3, 10, &Caps::default()).unwrap();
        assert!(t.ordered);
        for tile in &t.tiles {
            assert_eq!(tile.length_estimate, rat(1, 1));
        }
    }

    #[test]
    fn rational_translation_is_stable() {
        let r = SrsParameter::from_fractions(&[(1, 2), (-1, 2)]);
        let cd = contraction_data(&r, &ContractionOptions::default()).unwrap();
        let a = rational_translation(&r, 3, &int_vec(&[1, -2])).unwrap();
        assert_eq!(a, int_vec(&[8, -16]));
        let b = translation_stability(&r, &cd, &int_vec(&[0, 0]), 3, &a, &Caps::default()).unwrap();
        assert!(b.is_some());
    }

    #[test]
    fn census_rows_within_bounds() {
        let c = shape_census(3, 8, 10_000, &Caps::default()).unwrap();
        for row in &c.rows {
            assert!(row.bound.lo <= row.length.lo && row.length.hi <= row.bound.hi);
        }
    }
}
