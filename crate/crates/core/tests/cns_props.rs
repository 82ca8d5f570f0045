use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use srs_core::cns::{self, IntPolynomial};
use srs_core::dynamics::Caps;
use srs_core::linalg::{rat_mat_inverse, rat_mat_mul, RatMat};

/// Expanding polynomials of degree 1 to 3 with `2 <= a_0 <= a0_max`.
fn expanding(a0_max: i64, monic: bool) -> impl Strategy<Value = IntPolynomial> {
    (2i64..=a0_max, prop::collection::vec(-6i64..=6, 0..3), prop_oneof![Just(1i64), 2i64..5])
        .prop_filter_map("not expanding", move |(a0, mid, lead)| {
            let lead = if monic { 1 } else { lead };
            let mut c = vec![a0];
            c.extend(mid);
            c.push(lead);
            IntPolynomial::from_i64(&c).ok()
        })
}

fn brunotte(a: &IntPolynomial, raw: &[i64]) -> Vec<BigInt> {
    raw[..a.degree()].iter().map(|&x| BigInt::from(x)).collect()
}

fn companion(a: &IntPolynomial) -> RatMat {
    a.srs_param().companion().dense().iter().map(|row| row.iter().map(|s| s.as_rational().unwrap().clone()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn division_and_formula_digits_agree(a in expanding(12, false), raw in prop::collection::vec(-200i64..200, 3), n in 0usize..=40) {
        let z = brunotte(&a, &raw);
        let d = cns::cns_digits(&a, &z, n).unwrap();
        prop_assert!(d.agree(), "{:?} vs {:?}", d.division, d.formula);
        let a0 = &a.coeffs()[0];
        prop_assert!(d.division.iter().all(|b| !b.is_negative() && b < a0));
    }

    #[test]
    fn division_reconstructs_and_digits_are_unique(a in expanding(12, false), raw in prop::collection::vec(-200i64..200, 3), n in 1usize..=25, k in 0usize..25) {
        let z = brunotte(&a, &raw);
        let p = a.monomial(&z);
        let mut cur = p.clone();
        let mut digits = Vec::new();
        for _ in 0..n {
            let (b, next) = cns::backward_divide_monomial(&a, &cur);
            digits.push(b);
            cur = next;
        }
        prop_assert!(cns::reconstruction_holds(&a, &p, &digits, &cur));
        let k = k % n;
        digits[k] += &a.coeffs()[0];
        prop_assert!(!cns::reconstruction_holds(&a, &p, &digits, &cur));
    }

    #[test]
    fn division_is_conjugate_to_tau(a in expanding(12, false), raw in prop::collection::vec(-200i64..200, 3)) {
        let z = brunotte(&a, &raw);
        prop_assert!(cns::conjugacy_check(&a, &z, 30).unwrap());
        let (b, next) = cns::backward_divide(&a, &z).unwrap();
        let (b2, next2) = cns::backward_divide_monomial(&a, &a.monomial(&z));
        prop_assert_eq!(b, b2);
        prop_assert_eq!(a.monomial(&next), next2);
    }

    #[test]
    fn b_matrix_identities(a in expanding(12, false)) {
        let b = a.b_matrix();
        let v = a.v_matrix();
        let mi = rat_mat_inverse(&companion(&a)).unwrap();
        prop_assert_eq!(rat_mat_mul(&b, &v), rat_mat_mul(&v, &mi));
        // Column k of B is X^{k+1} mod A.
        let d = a.degree();
        for k in 0..d {
            let mut xk = vec![BigRational::zero(); k + 2];
            xk[k + 1] = BigRational::one();
            let col: Vec<BigRational> = (0..d).map(|i| b[i][k].clone()).collect();
            prop_assert_eq!(col, a.reduce(&xk));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn lemma_route_matches_direct_sum(a in expanding(4, false), n in 1usize..=6) {
        let mut x = cns::self_affine_tile_approx(&a, n, &Caps::default()).unwrap();
        let mut y = cns::self_affine_tile_via_division(&a, n, &Caps::default()).unwrap();
        x.sort();
        y.sort();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn monic_tiles_are_translates(a in expanding(4, true), raw in prop::collection::vec(-5i64..5, 3), n in 0usize..=5) {
        let z = brunotte(&a, &raw);
        prop_assert!(cns::monic_identity_holds(&a, &z, n, &Caps::default()).unwrap());
    }
}
