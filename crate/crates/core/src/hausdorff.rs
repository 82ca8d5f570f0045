//! Hausdorff distances between finite point sets.
//!
//! The search sorts the target set by its first coordinate and sweeps
//! outward. The sweep stops once the first-coordinate gap exceeds the
//! current best distance, which is valid for any norm that dominates
//! `|x_0|` (max-norm, Euclidean norm and the adapted norm all do).

use num_rational::BigRational;
use rayon::prelude::*;

fn nearest_f64<N>(sorted: &[Vec<f64>], p: &[f64], norm: &N) -> (f64, usize)
where
    N: Fn(&[f64]) -> f64,
{
    let key = p[0];
    let start = sorted.partition_point(|q| q[0] < key);
    let mut best = f64::INFINITY;
    let mut arg = 0;
    let mut diff = vec![0.0; p.len()];
    let mut visit = |i: usize, best: &mut f64, arg: &mut usize| {
        for (k, x) in diff.iter_mut().enumerate() {
            *x = p[k] - sorted[i][k];
        }
        let d = norm(&diff);
        if d < *best {
            *best = d;
            *arg = i;
        }
    };
    let mut i = start;
    while i < sorted.len() && (sorted[i][0] - key).abs() <= best {
        visit(i, &mut best, &mut arg);
        i += 1;
    }
    let mut i = start;
    while i > 0 && (key - sorted[i - 1][0]).abs() <= best {
        visit(i - 1, &mut best, &mut arg);
        i -= 1;
    }
    (best, arg)
}

fn sort_by_first(v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
    s
}

/// `sup_{a in A} min_{b in B} ‖a - b‖`.
pub fn directed_f64<N>(a: &[Vec<f64>], b: &[Vec<f64>], norm: N) -> f64
where
    N: Fn(&[f64]) -> f64 + Sync,
{
    if a.is_empty() {
        return 0.0;
    }
    if b.is_empty() {
        return f64::INFINITY;
    }
    let sb = sort_by_first(b);
    a.par_iter().map(|p| nearest_f64(&sb, p, &norm).0).reduce(|| 0.0, f64::max)
}

pub fn hausdorff_f64<N>(a: &[Vec<f64>], b: &[Vec<f64>], norm: N) -> f64
where
    N: Fn(&[f64]) -> f64 + Sync,
{
    directed_f64(a, b, &norm).max(directed_f64(b, a, &norm))
}

pub fn euclidean(x: &[f64]) -> f64 {
    x.iter().map(|t| t * t).sum::<f64>().sqrt()
}

pub fn max_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, t| m.max(t.abs()))
}

/// Exact directed distance for rational point sets. Floating point only
/// selects candidate nearest neighbours (all within a relative margin of
/// the floating minimum); the minimum over candidates is taken exactly.
pub fn directed_exact<N, E>(
    a: &[Vec<BigRational>],
    b: &[Vec<BigRational>],
    norm_f64: N,
    norm_exact: E,
) -> BigRational
where
    N: Fn(&[f64]) -> f64 + Sync,
    E: Fn(&[BigRational]) -> BigRational + Sync,
{
    use crate::interval::rat_to_f64;
    let af: Vec<Vec<f64>> = a.iter().map(|p| p.iter().map(rat_to_f64).collect()).collect();
    let bf: Vec<Vec<f64>> = b.iter().map(|p| p.iter().map(rat_to_f64).collect()).collect();
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by(|&i, &j| bf[i][0].partial_cmp(&bf[j][0]).unwrap());
    let sorted: Vec<Vec<f64>> = order.iter().map(|&i| bf[i].clone()).collect();
    (0..a.len())
        .into_par_iter()
        .map(|i| {
            let (best, _) = nearest_f64(&sorted, &af[i], &norm_f64);
            let margin = best * 1e-6 + 1e-12;
            let key = af[i][0];
            let mut cands = Vec::new();
            let start = sorted.partition_point(|q| q[0] < key - best - margin);
            for k in start..sorted.len() {
                let q = &sorted[k];
                if q[0] > key + best + margin {
                    break;
                }
                let diff: Vec<f64> = af[i].iter().zip(q).map(|(x, y)| x - y).collect();
                if norm_f64(&diff) <= best + margin {
                    cands.push(order[k]);
                }
            }
            cands
                .iter()
                .map(|&j| {
                    let diff: Vec<BigRational> = a[i].iter().zip(&b[j]).map(|(x, y)| x - y).collect();
                    norm_exact(&diff)
                })
                .min()
                .unwrap()
        })
        .reduce_with(std::cmp::max)
        .unwrap_or_else(|| BigRational::from_integer(0.into()))
}

pub fn hausdorff_exact<N, E>(
    a: &[Vec<BigRational>],
    b: &[Vec<BigRational>],
    norm_f64: N,
    norm_exact: E,
) -> BigRational
where
    N: Fn(&[f64]) -> f64 + Sync,
    E: Fn(&[BigRational]) -> BigRational + Sync,
{
    let x = directed_exact(a, b, &norm_f64, &norm_exact);
    let y = directed_exact(b, a, &norm_f64, &norm_exact);
    std::cmp::max(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_brute_force() {
        let a: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()]).collect();
        let b: Vec<Vec<f64>> = (0..70).map(|i| vec![(i as f64 * 0.71).cos(), (i as f64 * 0.2).sin()]).collect();
        let brute = |x: &[Vec<f64>], y: &[Vec<f64>]| {
            x.iter()
                .map(|p| y.iter().map(|q| euclidean(&[p[0] - q[0], p[1] - q[1]])).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let h = hausdorff_f64(&a, &b, euclidean);
        assert!((h - brute(&a, &b).max(brute(&b, &a))).abs() < 1e-15);
    }
}
