//! Approximations of SRS tiles `T_r(x) = Lim M^n τ^{-n}(x)` by the finite
//! sets `M^n τ^{-n}(x)`, with certified error bounds.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::dynamics::{tau_preimages, Caps};
use crate::error::{Result, SrsError};
use crate::hausdorff::{directed_f64, hausdorff_exact};
use crate::interval::{rat_to_f64, RatInterval};
use crate::linalg::{scalar_mat_vec_int, IntVec, ScalarMat};
use crate::params::{ContractionData, SrsParameter};
use crate::scalar::Scalar;

/// The level-n preimage set `τ^{-n}(x)`, sorted lexicographically.
pub fn tile_preimages(r: &SrsParameter, x: &[BigInt], n: usize, caps: &Caps) -> Result<Vec<IntVec>> {
    let mut frontier = vec![x.to_vec()];
    for _ in 0..n {
        frontier = expand(r, &frontier, caps)?;
    }
    Ok(frontier)
}

/// `τ^{-1}` of a set, sorted; preimages of distinct points are disjoint.
pub fn expand(r: &SrsParameter, set: &[IntVec], caps: &Caps) -> Result<Vec<IntVec>> {
    let parts: Vec<Vec<IntVec>> = set.par_iter().map(|y| tau_preimages(r, y)).collect::<Result<_>>()?;
    let total: usize = parts.iter().map(|p| p.len()).sum();
    if total > caps.points {
        return Err(SrsError::PointCap(caps.points));
    }
    let mut out: Vec<IntVec> = parts.into_iter().flatten().collect();
    out.par_sort();
    Ok(out)
}

/// A level-n tile approximation.
#[derive(Clone, Debug)]
pub struct TileApprox {
    pub center: IntVec,
    pub level: usize,
    /// `τ^{-n}(x)`, sorted.
    pub preimages: Vec<IntVec>,
    /// `M^n`.
    pub power: ScalarMat,
    /// `ε_n`: the Hausdorff distance to the tile is at most this.
    pub error_bound: BigRational,
}

impl TileApprox {
    pub fn len(&self) -> usize {
        self.preimages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preimages.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// The points `M^n z`, exactly for the exact backends.
    pub fn points(&self) -> Vec<Vec<Scalar>> {
        self.preimages.par_iter().map(|z| scalar_mat_vec_int(&self.power, z)).collect()
    }

    pub fn points_rational(&self) -> Option<Vec<Vec<BigRational>>> {
        self.points()
            .into_iter()
            .map(|p| p.iter().map(|s| s.as_rational().cloned()).collect::<Option<Vec<_>>>())
            .collect()
    }

    /// Floating-point points computed from a rounded copy of `M^n`.
    pub fn points_f64(&self) -> Vec<Vec<f64>> {
        let pf: Vec<Vec<f64>> = self.power.iter().map(|row| row.iter().map(|s| s.to_f64()).collect()).collect();
        self.preimages
            .par_iter()
            .map(|z| {
                let zf: Vec<f64> = z.iter().map(|v| num_traits::ToPrimitive::to_f64(v).unwrap()).collect();
                crate::linalg::f64_mat_vec(&pf, &zf)
            })
            .collect()
    }
}

pub fn tile_approx(r: &SrsParameter, cd: &ContractionData, x: &[BigInt], n: usize, caps: &Caps) -> Result<TileApprox> {
    let preimages = tile_preimages(r, x, n, caps)?;
    Ok(TileApprox {
        center: x.to_vec(),
        level: n,
        preimages,
        power: r.companion().pow(n),
        error_bound: cd.error_bound(n),
    })
}

/// Tile approximations for all levels `0..=n_max`, sharing the expansion.
pub fn tile_approx_levels(
    r: &SrsParameter,
    cd: &ContractionData,
    x: &[BigInt],
    n_max: usize,
    caps: &Caps,
) -> Result<Vec<TileApprox>> {
    let m = r.companion();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut frontier = vec![x.to_vec()];
    let mut power = m.pow(0);
    for n in 0..=n_max {
        if n > 0 {
            frontier = expand(r, &frontier, caps)?;
            power = crate::linalg::scalar_mat_mul(&m.dense(), &power);
        }
        out.push(TileApprox {
            center: x.to_vec(),
            level: n,
            preimages: frontier.clone(),
            power: power.clone(),
            error_bound: cd.error_bound(n),
        });
    }
    Ok(out)
}

/// Rigorous distance enclosure from `t` to the nearest approximation point.
fn nearest_distance(cd: &ContractionData, t: &[Scalar], tile: &TileApprox) -> RatInterval {
    let pts = tile.points();
    let pf: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|s| s.to_f64()).collect()).collect();
    let tf: Vec<f64> = t.iter().map(|s| s.to_f64()).collect();
    let dist_f = |p: &Vec<f64>| {
        let d: Vec<f64> = tf.iter().zip(p).map(|(a, b)| a - b).collect();
        cd.norm.eval_f64(&d)
    };
    let best = pf.iter().map(dist_f).fold(f64::INFINITY, f64::min);
    let margin = best * 1e-6 + 1e-9;
    let mut out: Option<RatInterval> = None;
    for (p, q) in pts.iter().zip(&pf) {
        if dist_f(q) <= best + margin {
            let diff: Vec<Scalar> = t.iter().zip(p).map(|(a, b)| a.sub(b)).collect();
            let v = cd.norm.eval(&diff);
            out = Some(match out {
                None => v,
                Some(o) => RatInterval::new(
                    std::cmp::min(&o.lo, &v.lo).clone(),
                    std::cmp::min(&o.hi, &v.hi).clone(),
                ),
            });
        }
    }
    out.expect("non-empty tile approximation")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `t` is certainly not in the tile.
    DefinitelyOutside,
    /// `t` is within `ε_n` of the approximation.
    PossiblyInside,
}

#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub verdict: Membership,
    pub distance: RatInterval,
    pub epsilon: BigRational,
}

/// Since every tile point is within `ε_n` of the level-n approximation,
/// a distance above `ε_n` excludes `t` from the tile.
pub fn membership(
    r: &SrsParameter,
    cd: &ContractionData,
    t: &[Scalar],
    x: &[BigInt],
    n: usize,
    caps: &Caps,
) -> Result<MembershipReport> {
    let tile = tile_approx(r, cd, x, n, caps)?;
    let distance = nearest_distance(cd, t, &tile);
    let verdict = if distance.lo > tile.error_bound {
        Membership::DefinitelyOutside
    } else {
        Membership::PossiblyInside
    };
    Ok(MembershipReport { verdict, distance, epsilon: tile.error_bound })
}

#[derive(Clone, Debug)]
pub struct CauchyReport {
    pub level: usize,
    /// Hausdorff distance between levels `n` and `n+1` in the adapted norm.
    pub delta: RatInterval,
    /// `ρ̃^n ‖e_d‖`.
    pub bound: BigRational,
    pub holds: bool,
    /// True when `delta` was computed in exact rational arithmetic.
    pub exact: bool,
}

/// Measures `δ(A_n, A_{n+1})` and compares with `ρ̃^n ‖e_d‖`.
pub fn cauchy_check(a: &TileApprox, b: &TileApprox, cd: &ContractionData) -> CauchyReport {
    let n = a.level;
    let bound = cd.cauchy_bound(n);
    if let (Some(pa), Some(pb), true) = (a.points_rational(), b.points_rational(), cd.norm.is_exact()) {
        let delta = hausdorff_exact(&pa, &pb, |x| cd.norm.eval_f64(x), |x| cd.norm.eval_exact(x).unwrap());
        let holds = delta <= bound;
        return CauchyReport { level: n, delta: RatInterval::point(delta), bound, holds, exact: true };
    }
    let fa = a.points_f64();
    let fb = b.points_f64();
    let dist = directed_f64(&fa, &fb, |x| cd.norm.eval_f64(x)).max(directed_f64(&fb, &fa, |x| cd.norm.eval_f64(x)));
    let slack = dist * 1e-9 + 1e-12;
    let lo = crate::interval::f64_to_rat((dist - slack).max(0.0));
    let hi = crate::interval::f64_to_rat(dist + slack);
    let holds = hi <= bound;
    CauchyReport { level: n, delta: RatInterval::new(lo, hi), bound, holds, exact: false }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetEquationReport {
    pub level: usize,
    pub direct_points: usize,
    pub union_points: usize,
    pub equal: bool,
}

/// Compares `M^n τ^{-n}(x)` with `∪_{y ∈ τ^{-1}(x)} M (M^{n-1} τ^{-(n-1)}(y))`
/// as exact point sets.
pub fn set_equation_check(r: &SrsParameter, cd: &ContractionData, x: &[BigInt], n: usize, caps: &Caps) -> Result<SetEquationReport> {
    if !r.is_exact() || n == 0 {
        return Err(SrsError::Unsupported("set equation check needs an exact backend and n >= 1".into()));
    }
    let direct: HashSet<Vec<Scalar>> = tile_approx(r, cd, x, n, caps)?.points().into_iter().collect();
    let m = r.companion();
    let mut union: HashSet<Vec<Scalar>> = HashSet::new();
    let mut count = 0;
    for y in tau_preimages(r, x)? {
        for p in tile_approx(r, cd, &y, n - 1, caps)?.points() {
            union.insert(m.apply(&p));
            count += 1;
        }
    }
    Ok(SetEquationReport {
        level: n,
        direct_points: direct.len(),
        union_points: count,
        equal: direct == union && count == direct.len(),
    })
}

/// Largest pairwise adapted-norm distance in an approximation (quadratic).
pub fn diameter(tile: &TileApprox, cd: &ContractionData) -> RatInterval {
    let pts = tile.points();
    let mut best = RatInterval::zero();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let diff: Vec<Scalar> = pts[i].iter().zip(&pts[j]).map(|(a, b)| a.sub(b)).collect();
            best = best.max(&cd.norm.eval(&diff));
        }
    }
    best
}

pub fn to_f64_points(pts: &[Vec<Scalar>]) -> Vec<Vec<f64>> {
    pts.iter().map(|p| p.iter().map(|s| s.to_f64()).collect()).collect()
}

pub fn bound_f64(q: &BigRational) -> f64 {
    rat_to_f64(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;
    use crate::linalg::int_vec;
    use crate::params::{contraction_data, ContractionOptions};

    #[test]
    fn level_one_minus_two_thirds() {
        let r = SrsParameter::from_fractions(&[(-2, 3)]);
        let cd = contraction_data(&r, &ContractionOptions::default()).unwrap();
        let t = tile_approx(&r, &cd, &int_vec(&[0]), 1, &Caps::default()).unwrap();
        let pts = t.points_rational().unwrap();
        assert_eq!(pts, vec![vec![rat(-2, 3)], vec![rat(0, 1)]]);
    }

    #[test]
    fn set_equation_small() {
        let r = SrsParameter::from_fractions(&[(1, 2), (-1, 2)]);
        let cd = contraction_data(&r, &ContractionOptions::default()).unwrap();
        for n in 1..=5 {
            let rep = set_equation_check(&r, &cd, &int_vec(&[1, 0]), n, &Caps::default()).unwrap();
            assert!(rep.equal, "level {n}");
        }
    }

    #[test]
    fn point_cap_triggers() {
        let r = SrsParameter::from_fractions(&[(1, 2), (-1, 2)]);
        let caps = Caps { steps: 100, points: 10 };
        assert_eq!(tile_preimages(&r, &int_vec(&[0, 0]), 8, &caps), Err(SrsError::PointCap(10)));
    }
}
