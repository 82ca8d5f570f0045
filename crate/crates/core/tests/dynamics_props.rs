use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use srs_core::dynamics::{self, Caps};
use srs_core::params::{contraction_data, ContractionOptions, SrsParameter};

fn params() -> Vec<SrsParameter> {
    vec![
        SrsParameter::from_fractions(&[(9, 10), (-11, 20)]),
        SrsParameter::from_fractions(&[(1, 2), (-1, 2)]),
        SrsParameter::from_fractions(&[(3, 4), (1, 1)]),
        SrsParameter::from_fractions(&[(-2, 3)]),
        SrsParameter::from_fractions(&[(2, 5), (1, 3), (-1, 4)]),
    ]
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn coords(r: &SrsParameter) -> Vec<BigRational> {
    r.rational_coords().unwrap().to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn preimages_round_trip(idx in 0usize..5, raw in prop::collection::vec(-500i64..500, 3)) {
        let r = &params()[idx];
        let z = ints(&raw[..r.dim()]);
        let y = dynamics::tau(r, &z).unwrap();
        let pre = dynamics::tau_preimages(r, &y).unwrap();
        prop_assert!(pre.contains(&z));
        for w in &pre {
            prop_assert_eq!(&dynamics::tau(r, w).unwrap(), &y);
        }
    }

    #[test]
    fn preimage_count_matches_r0(idx in 0usize..5, raw in prop::collection::vec(-500i64..500, 3)) {
        let r = &params()[idx];
        let y = ints(&raw[..r.dim()]);
        let n = dynamics::tau_preimages(r, &y).unwrap().len();
        let inv = coords(r)[0].recip().abs();
        let lo = inv.floor().to_integer();
        let hi = inv.ceil().to_integer();
        let n = BigInt::from(n);
        prop_assert!(n == lo || n == hi, "count {} outside [{}, {}]", n, lo, hi);
    }

    #[test]
    fn expansion_identity(idx in 0usize..5, raw in prop::collection::vec(-500i64..500, 3), n in 0usize..=30) {
        let r = &params()[idx];
        let z = ints(&raw[..r.dim()]);
        prop_assert!(dynamics::digit_identity_holds(r, &z, n).unwrap());
    }

    #[test]
    fn digits_lie_in_unit_interval(idx in 0usize..5, raw in prop::collection::vec(-500i64..500, 3)) {
        let r = &params()[idx];
        let z = ints(&raw[..r.dim()]);
        for v in dynamics::srs_digits(r, &z, 20).unwrap() {
            let q = v.as_rational().unwrap();
            prop_assert!(!q.is_negative() && *q < BigRational::one());
        }
    }

    /// Walk a random backward chain, then recover each step from its digit
    /// alone and run forward again.
    #[test]
    fn backward_chains_are_determined_by_digits(idx in 0usize..5, raw in prop::collection::vec(-50i64..50, 3), picks in prop::collection::vec(0usize..8, 1..12)) {
        let r = &params()[idx];
        let rc = coords(r);
        let z0 = ints(&raw[..r.dim()]);
        let mut chain = vec![z0.clone()];
        for p in &picks {
            let pre = dynamics::tau_preimages(r, chain.last().unwrap()).unwrap();
            if pre.is_empty() {
                break;
            }
            chain.push(pre[p % pre.len()].clone());
        }
        for w in chain.windows(2) {
            let (y, z) = (&w[0], &w[1]);
            let v = r.frac_dot(z).unwrap().as_rational().unwrap().clone();
            // r·z = -y_{d-1} + v solved for z_0.
            let d = r.dim();
            let mut rhs = v - BigRational::from_integer(y[d - 1].clone());
            for i in 1..d {
                rhs -= &rc[i] * BigRational::from_integer(y[i - 1].clone());
            }
            let z0 = rhs / &rc[0];
            prop_assert!(z0.is_integer());
            prop_assert_eq!(&z0.to_integer(), &z[0]);
        }
        let n = chain.len() - 1;
        prop_assert_eq!(dynamics::tau_iter(r, chain.last().unwrap(), n).unwrap(), z0);
    }
}

#[test]
fn periodic_points_lie_in_the_r_ball() {
    for r in params() {
        let cd = contraction_data(&r, &ContractionOptions::default()).unwrap();
        let census = dynamics::purely_periodic_points(&r, &cd, &Caps::default()).unwrap();
        assert!(census.points.contains(&vec![BigInt::zero(); r.dim()]));
        for p in &census.points {
            assert!(cd.norm.eval_int(p).lo <= cd.r_bar, "{p:?}");
            let o = dynamics::orbit(&r, p, 10_000).unwrap();
            assert!(o.is_purely_periodic());
        }
    }
}

#[test]
fn minus_two_thirds_preimage_counts_alternate() {
    // r_0 = -2/3: one or two preimages, by the parity of the target.
    let r = SrsParameter::from_fractions(&[(-2, 3)]);
    for y in -30i64..30 {
        let n = dynamics::tau_preimages(&r, &ints(&[y])).unwrap().len();
        let expect = if y.is_even() { 2 } else { 1 };
        assert_eq!(n, expect, "y = {y}");
    }
}
