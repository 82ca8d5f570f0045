//! The map τ_r, its preimages, orbits, SRS digits and the finiteness test.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Result, SrsError};
use crate::linalg::IntVec;
use crate::params::{contraction_data, ContractionData, ContractionOptions, SrsParameter};
use crate::scalar::Scalar;

/// Resource caps shared by the searches in this crate.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub steps: u64,
    pub points: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { steps: 1_000_000, points: 5_000_000 }
    }
}

/// `τ_r(z) = (z_1, ..., z_{d-1}, -⌊r·z⌋)`.
pub fn tau(r: &SrsParameter, z: &[BigInt]) -> Result<IntVec> {
    let f = r.floor_dot(z)?;
    let mut out: IntVec = z[1..].to_vec();
    out.push(-f);
    Ok(out)
}

pub fn tau_iter(r: &SrsParameter, z: &[BigInt], n: usize) -> Result<IntVec> {
    let mut x = z.to_vec();
    for _ in 0..n {
        x = tau(r, &x)?;
    }
    Ok(x)
}

/// `τ^{-1}(y) = {(z_0, y_0, ..., y_{d-2}) : ⌊r·z⌋ = -y_{d-1}}`, sorted.
pub fn tau_preimages(r: &SrsParameter, y: &[BigInt]) -> Result<Vec<IntVec>> {
    let d = r.dim();
    if y.len() != d {
        return Err(SrsError::DimensionMismatch { expected: d, got: y.len() });
    }
    let rest = &y[..d - 1];
    let target = -&y[d - 1];
    let firsts = r.first_coordinate_solutions(rest, &target)?;
    Ok(firsts
        .into_iter()
        .map(|z0| std::iter::once(z0).chain(rest.iter().cloned()).collect())
        .collect())
}

/// An eventually periodic orbit: `z` followed by the preperiod, then a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub preperiod: Vec<IntVec>,
    pub cycle: Vec<IntVec>,
}

impl Orbit {
    pub fn is_purely_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }

    pub fn ends_at_zero(&self) -> bool {
        self.cycle.len() == 1 && self.cycle[0].iter().all(|x| x.is_zero())
    }
}

/// The orbit of `z` under τ, with cycle detection.
pub fn orbit(r: &SrsParameter, z: &[BigInt], cap_steps: u64) -> Result<Orbit> {
    let mut seen: HashMap<IntVec, usize> = HashMap::new();
    let mut path: Vec<IntVec> = Vec::new();
    let mut x = z.to_vec();
    loop {
        if let Some(&i) = seen.get(&x) {
            let cycle = path.split_off(i);
            return Ok(Orbit { preperiod: path, cycle });
        }
        if path.len() as u64 >= cap_steps {
            return Err(SrsError::StepCap(cap_steps));
        }
        seen.insert(x.clone(), path.len());
        path.push(x.clone());
        x = tau(r, &x)?;
    }
}

/// The first `n` SRS digits `v_k = {r·τ^{k-1}(z)}`, `k = 1..=n`.
pub fn srs_digits(r: &SrsParameter, z: &[BigInt], n: usize) -> Result<Vec<Scalar>> {
    let mut out = Vec::with_capacity(n);
    let mut x = z.to_vec();
    for _ in 0..n {
        out.push(r.frac_dot(&x)?);
        x = tau(r, &x)?;
    }
    Ok(out)
}

/// Eventually periodic description of the digit sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct DigitExpansion {
    pub preperiod: Vec<Scalar>,
    pub period: Vec<Scalar>,
}

pub fn srs_expansion(r: &SrsParameter, z: &[BigInt], cap_steps: u64) -> Result<DigitExpansion> {
    let o = orbit(r, z, cap_steps)?;
    let dig = |v: &[IntVec]| v.iter().map(|x| r.frac_dot(x)).collect::<Result<Vec<_>>>();
    Ok(DigitExpansion { preperiod: dig(&o.preperiod)?, period: dig(&o.cycle)? })
}

/// Checks `M^n z = τ^n(z) - Σ_{j=1}^n M^{n-j} (0, ..., 0, v_j)` exactly.
pub fn digit_identity_holds(r: &SrsParameter, z: &[BigInt], n: usize) -> Result<bool> {
    let m = r.companion();
    let to_s = |v: &[BigInt]| v.iter().map(|x| r.scalar_from_int(x)).collect::<Vec<_>>();
    let digits = srs_digits(r, z, n)?;
    let mut lhs = to_s(z);
    // Horner form of the digit sum: S_j = M S_{j-1} + (0,...,0,v_j).
    let mut s: Vec<Scalar> = vec![r.scalar_zero(); r.dim()];
    for v in &digits {
        lhs = m.apply(&lhs);
        s = m.apply(&s);
        let last = s.len() - 1;
        s[last] = s[last].add(v);
    }
    let tn = to_s(&tau_iter(r, z, n)?);
    let rhs: Vec<Scalar> = tn.iter().zip(&s).map(|(a, b)| a.sub(b)).collect();
    Ok(lhs == rhs)
}

/// Result of the purely periodic point search.
#[derive(Clone, Debug)]
pub struct PeriodicCensus {
    pub ball_size: usize,
    /// Purely periodic points, sorted.
    pub points: Vec<IntVec>,
    /// One cycle per orbit class, each starting at its smallest point.
    pub cycles: Vec<Vec<IntVec>>,
}

/// All purely periodic points of τ_r. Only points of norm at most `R`
/// can be purely periodic, so the enumeration is over the `R̄`-ball.
pub fn purely_periodic_points(r: &SrsParameter, cd: &ContractionData, caps: &Caps) -> Result<PeriodicCensus> {
    let zero = vec![BigInt::zero(); r.dim()];
    let ball = cd.ball(&zero, &cd.r_bar, caps.points)?;
    let mut visited: HashSet<IntVec> = HashSet::new();
    let mut periodic: Vec<IntVec> = Vec::new();
    let mut cycles: Vec<Vec<IntVec>> = Vec::new();
    let mut steps = 0u64;
    for start in &ball {
        if visited.contains(start) {
            continue;
        }
        let mut path: Vec<IntVec> = Vec::new();
        let mut index: HashMap<IntVec, usize> = HashMap::new();
        let mut x = start.clone();
        loop {
            if visited.contains(&x) {
                break;
            }
            if let Some(&i) = index.get(&x) {
                let mut cyc = path[i..].to_vec();
                let k = (0..cyc.len()).min_by(|&a, &b| cyc[a].cmp(&cyc[b])).unwrap();
                cyc.rotate_left(k);
                periodic.extend(cyc.iter().cloned());
                cycles.push(cyc);
                break;
            }
            steps += 1;
            if steps > caps.steps.saturating_mul(64) || path.len() as u64 > caps.steps {
                return Err(SrsError::StepCap(caps.steps));
            }
            index.insert(x.clone(), path.len());
            path.push(x.clone());
            x = tau(r, &x)?;
        }
        visited.extend(path);
    }
    periodic.sort();
    cycles.sort();
    Ok(PeriodicCensus { ball_size: ball.len(), points: periodic, cycles })
}

#[derive(Clone, Debug)]
pub struct FinitenessVerdict {
    /// True iff every orbit ends at 0.
    pub holds: bool,
    pub census: PeriodicCensus,
    pub r_bar: num_rational::BigRational,
}

impl FinitenessVerdict {
    /// A non-zero cycle, when finiteness fails.
    pub fn witness(&self) -> Option<&Vec<IntVec>> {
        self.census.cycles.iter().find(|c| !(c.len() == 1 && c[0].iter().all(|x| x.is_zero())))
    }
}

/// Decides whether every orbit of τ_r ends at 0 (finiteness property):
/// true iff 0 is the only purely periodic point.
pub fn decide_finiteness_with(r: &SrsParameter, cd: &ContractionData, caps: &Caps) -> Result<FinitenessVerdict> {
    let census = purely_periodic_points(r, cd, caps)?;
    let holds = census.points.len() == 1 && census.points[0].iter().all(|x| x.is_zero());
    Ok(FinitenessVerdict { holds, census, r_bar: cd.r_bar.clone() })
}

/// Fails with `PointCap` when the search ball is certainly too large.
/// The adapted norm dominates `‖·‖_∞`, so `R >= Σ_n ‖M^n e_d‖_∞`, and the
/// ball has at least `(2⌊R⌋ + 1)^d` candidates; partial sums in floating
/// point (with a safety margin) give a lower bound without certifying `R̄`.
/// A rounding slip can only turn a verdict into `PointCap`, never flip it.
fn ball_too_large(r: &SrsParameter, caps: &Caps) -> Result<()> {
    let c: Vec<f64> = r.coords_scalar().iter().map(|s| s.to_f64()).collect();
    let d = c.len();
    let allowed = caps.points.saturating_mul(8) as f64;
    let mut w = vec![0.0f64; d];
    w[d - 1] = 1.0;
    let mut sum = 0.0f64;
    for _ in 0..1_000_000 {
        let n = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        sum += n;
        let side = 2.0 * (sum * (1.0 - 1e-6)).floor() + 1.0;
        if side.powi(d as i32) > allowed {
            return Err(SrsError::PointCap(caps.points));
        }
        if n < 1e-12 * sum {
            break;
        }
        let next = -c.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        w.remove(0);
        w.push(next);
    }
    Ok(())
}

pub fn decide_finiteness(r: &SrsParameter, caps: &Caps) -> Result<FinitenessVerdict> {
    if !r.is_interior()? {
        return Err(SrsError::NotContractive);
    }
    ball_too_large(r, caps)?;
    let cd = contraction_data(r, &ContractionOptions::default())?;
    decide_finiteness_with(r, &cd, caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;
    use crate::linalg::int_vec;

    fn ex() -> SrsParameter {
        SrsParameter::from_fractions(&[(9, 10), (-11, 20)])
    }

    #[test]
    fn five_cycle() {
        let r = ex();
        let cyc = [[-1, -1], [-1, 1], [1, 2], [2, 1], [1, -1]];
        for k in 0..5 {
            let next = tau(&r, &int_vec(&cyc[k])).unwrap();
            assert_eq!(next, int_vec(&cyc[(k + 1) % 5]));
            let pre = tau_preimages(&r, &int_vec(&cyc[(k + 1) % 5])).unwrap();
            assert_eq!(pre, vec![int_vec(&cyc[k])]);
        }
        let o = orbit(&r, &int_vec(&[-1, -1]), 100).unwrap();
        assert!(o.is_purely_periodic());
        assert_eq!(o.cycle.len(), 5);
    }

    #[test]
    fn minus_two_thirds() {
        let r = SrsParameter::from_fractions(&[(-2, 3)]);
        assert_eq!(tau_preimages(&r, &int_vec(&[0])).unwrap(), vec![int_vec(&[-1]), int_vec(&[0])]);
        assert_eq!(tau_preimages(&r, &int_vec(&[1])).unwrap(), vec![int_vec(&[1])]);
        let v = decide_finiteness(&r, &Caps::default()).unwrap();
        assert_eq!(v.census.points, vec![int_vec(&[0]), int_vec(&[1]), int_vec(&[2])]);
        assert!(!v.holds);
    }

    #[test]
    fn digits_of_cycle_point() {
        let r = ex();
        let d = srs_digits(&r, &int_vec(&[-1, -1]), 1).unwrap();
        assert_eq!(d[0], Scalar::Rational(rat(13, 20)));
        assert!(digit_identity_holds(&r, &int_vec(&[3, -7]), 12).unwrap());
    }

    #[test]
    fn step_cap_reports() {
        let r = ex();
        assert_eq!(orbit(&r, &int_vec(&[-1, -1]), 3), Err(SrsError::StepCap(3)));
    }
}
