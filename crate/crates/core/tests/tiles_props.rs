use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use srs_core::dynamics::{Caps, tau_iter};
use srs_core::params::{contraction_data, ContractionData, ContractionOptions, SrsParameter};
use srs_core::scalar::Scalar;
use srs_core::tiles;
use srs_core::tiling::candidate_tiles_at;

fn contracted() -> &'static [(SrsParameter, ContractionData)] {
    static CD: OnceLock<Vec<(SrsParameter, ContractionData)>> = OnceLock::new();
    CD.get_or_init(|| {
        [[(9, 10), (-11, 20)], [(1, 2), (-1, 2)], [(3, 4), (1, 1)]]
            .iter()
            .map(|c| {
                let r = SrsParameter::from_fractions(c);
                let cd = contraction_data(&r, &ContractionOptions::default()).unwrap();
                (r, cd)
            })
            .collect()
    })
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn scalars(r: &SrsParameter, z: &[BigInt]) -> Vec<Scalar> {
    z.iter().map(|v| r.scalar_from_int(v)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn points_are_scaled_preimages(idx in 0usize..3, a in -6i64..6, b in -6i64..6, n in 0usize..7) {
        let (r, cd) = &contracted()[idx];
        let x = ints(&[a, b]);
        let t = tiles::tile_approx(r, cd, &x, n, &Caps::default()).unwrap();
        prop_assert!(!t.is_empty());
        let m = r.companion();
        for (y, p) in t.preimages.iter().zip(t.points()) {
            prop_assert_eq!(&tau_iter(r, y, n).unwrap(), &x);
            let mut q = scalars(r, y);
            for _ in 0..n {
                q = m.apply(&q);
            }
            prop_assert_eq!(q, p);
        }
    }

    #[test]
    fn points_stay_in_the_r_ball(idx in 0usize..3, a in -6i64..6, b in -6i64..6, n in 0usize..8) {
        let (r, cd) = &contracted()[idx];
        let x = ints(&[a, b]);
        let xs = scalars(r, &x);
        for p in tiles::tile_approx(r, cd, &x, n, &Caps::default()).unwrap().points() {
            let diff: Vec<Scalar> = p.iter().zip(&xs).map(|(s, t)| s.sub(t)).collect();
            prop_assert!(cd.norm.eval(&diff).hi <= cd.r_bar);
        }
    }

    #[test]
    fn set_equation_is_exact(idx in 0usize..3, a in -4i64..4, b in -4i64..4, n in 1usize..7) {
        let (r, cd) = &contracted()[idx];
        let rep = tiles::set_equation_check(r, cd, &ints(&[a, b]), n, &Caps::default()).unwrap();
        prop_assert!(rep.equal, "{:?}", rep);
    }
}

proptest! {
    // The R̄-ball for (9/10, -11/20) is large; sample the two cheaper parameters.
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sample_points_are_covered(idx in 1usize..3, p in -40i64..40, q in -40i64..40) {
        let (r, cd) = &contracted()[idx];
        let t = vec![
            Scalar::Rational(BigRational::new(p.into(), 16.into())),
            Scalar::Rational(BigRational::new(q.into(), 16.into())),
        ];
        let c = candidate_tiles_at(r, cd, &t, 3, &Caps::default()).unwrap();
        prop_assert!(!c.is_empty());
    }
}

#[test]
fn consecutive_levels_are_cauchy() {
    for (r, cd) in contracted() {
        let depth = if r.coord_strings()[0] == "9/10" { 15 } else { 10 };
        for x in [ints(&[0, 0]), ints(&[2, -1])] {
            let lv = tiles::tile_approx_levels(r, cd, &x, depth + 1, &Caps::default()).unwrap();
            for n in 0..=depth {
                let rep = tiles::cauchy_check(&lv[n], &lv[n + 1], cd);
                assert!(rep.exact && rep.holds, "{:?} x={x:?} n={n}: {rep:?}", r.coord_strings());
                assert!(lv[n].error_bound >= lv[n + 1].error_bound);
            }
        }
    }
}
