//! Small dense linear algebra over rationals, intervals and backend scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::interval::{rat_int, RatInterval};
use crate::scalar::Scalar;

pub type IntVec = Vec<BigInt>;
pub type RatMat = Vec<Vec<BigRational>>;
pub type IntervalMat = Vec<Vec<RatInterval>>;
pub type ScalarMat = Vec<Vec<Scalar>>;

pub fn int_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Gaussian elimination on an augmented `n x (n+1)` matrix.
pub fn solve_rational(a: &mut [Vec<BigRational>]) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for j in col..=n {
            a[col][j] = &a[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    Some(a.iter().map(|row| row[n].clone()).collect())
}

pub fn rat_identity(n: usize) -> RatMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

pub fn rat_mat_mul(a: &RatMat, b: &RatMat) -> RatMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for t in 0..k {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            s += &a[i][t] * &b[t][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn rat_mat_vec(a: &RatMat, v: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .map(|row| {
            let mut s = BigRational::zero();
            for (x, y) in row.iter().zip(v) {
                if !x.is_zero() && !y.is_zero() {
                    s += x * y;
                }
            }
            s
        })
        .collect()
}

pub fn rat_mat_vec_int(a: &RatMat, v: &[BigInt]) -> Vec<BigRational> {
    a.iter()
        .map(|row| {
            let mut s = BigRational::zero();
            for (x, y) in row.iter().zip(v) {
                if !x.is_zero() && !y.is_zero() {
                    s += x * rat_int(y);
                }
            }
            s
        })
        .collect()
}

pub fn rat_mat_inverse(a: &RatMat) -> Option<RatMat> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut aug: Vec<Vec<BigRational>> = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.push(if i == j { BigRational::one() } else { BigRational::zero() });
                r
            })
            .collect();
        cols.push(solve_rational(&mut aug)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn rat_mat_pow(a: &RatMat, n: usize) -> RatMat {
    let mut acc = rat_identity(a.len());
    for _ in 0..n {
        acc = rat_mat_mul(&acc, a);
    }
    acc
}

pub fn interval_mat_mul(a: &IntervalMat, b: &IntervalMat, bits: Option<u32>) -> IntervalMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = RatInterval::zero();
                    for t in 0..k {
                        s = s.add(&a[i][t].mul(&b[t][j]));
                    }
                    match bits {
                        Some(b) => s.round(b),
                        None => s,
                    }
                })
                .collect()
        })
        .collect()
}

pub fn interval_mat_vec(a: &IntervalMat, v: &[RatInterval]) -> Vec<RatInterval> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(RatInterval::zero(), |s, (x, y)| s.add(&x.mul(y))))
        .collect()
}

/// Upper bound of the induced max-norm (largest absolute row sum).
pub fn interval_mat_norm_inf_upper(a: &IntervalMat) -> BigRational {
    a.iter()
        .map(|row| row.iter().fold(BigRational::zero(), |s, x| s + x.abs().hi))
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// Enclosure of the max-norm of an interval vector.
pub fn interval_vec_norm_inf(v: &[RatInterval]) -> RatInterval {
    v.iter().fold(RatInterval::zero(), |m, x| m.max(&x.abs()))
}

pub fn scalar_mat_mul(a: &ScalarMat, b: &ScalarMat) -> ScalarMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = a[i][0].zero_like();
                    for t in 0..k {
                        s = s.add(&a[i][t].mul(&b[t][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn scalar_mat_vec(a: &ScalarMat, v: &[Scalar]) -> Vec<Scalar> {
    a.iter()
        .map(|row| {
            let mut s = row[0].zero_like();
            for (x, y) in row.iter().zip(v) {
                s = s.add(&x.mul(y));
            }
            s
        })
        .collect()
}

pub fn scalar_mat_vec_int(a: &ScalarMat, v: &[BigInt]) -> Vec<Scalar> {
    a.iter()
        .map(|row| {
            let mut s = row[0].zero_like();
            for (x, y) in row.iter().zip(v) {
                if !y.is_zero() {
                    s = s.add(&x.scale_int(y));
                }
            }
            s
        })
        .collect()
}

pub fn f64_mat_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    #[test]
    fn inverse_roundtrip() {
        let a = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(3, 1), rat(4, 1)]];
        let inv = rat_mat_inverse(&a).unwrap();
        assert_eq!(rat_mat_mul(&a, &inv), rat_identity(2));
        let sing = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        assert!(rat_mat_inverse(&sing).is_none());
    }
}
