//! Named figure reproductions. Each figure is a list of coloured layers;
//! levels are chosen so a figure has roughly 10^4 points.

use num_bigint::BigInt;

use srs_core::beta::{self, PisotSpec};
use srs_core::cns::{self, IntPolynomial};
use srs_core::dynamics::Caps;
use srs_core::interval::rat_to_f64;
use srs_core::linalg::{int_vec, IntVec};
use srs_core::params::{contraction_data, ContractionData, ContractionOptions, SrsParameter};
use srs_core::render::{palette, planar, Layer};
use srs_core::tiles;

use crate::{usage, CliResult};

pub struct Figure {
    pub name: &'static str,
    pub about: &'static str,
    pub level: usize,
}

pub const FIGURES: &[Figure] = &[
    Figure { name: "twin-dragon", about: "self-affine tile of x^2+2x+2", level: 14 },
    Figure { name: "rauzy", about: "central Rauzy fractal, x^3-x^2-x-1", level: 16 },
    Figure { name: "hokkaido", about: "central beta-tile of x^3-x-1", level: 34 },
    Figure { name: "srs-9-10", about: "central SRS tile for r = (9/10, -11/20)", level: 80 },
    Figure { name: "srs-3-4", about: "SRS tiles T(x), |x| <= 2, for r = (3/4, 1)", level: 23 },
    Figure { name: "beta-cubic", about: "beta-tiles for x^3-3x^2+1, |x| <= 2", level: 6 },
];

pub fn find(name: &str) -> Option<&'static Figure> {
    FIGURES.iter().find(|f| f.name == name)
}

/// All integer vectors with `‖x‖∞ <= radius`, lexicographically.
pub fn cube(d: usize, radius: i64) -> Vec<IntVec> {
    let mut out: Vec<IntVec> = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-radius..=radius).map(move |v| {
                    let mut q = p.clone();
                    q.push(BigInt::from(v));
                    q
                })
            })
            .collect();
    }
    out
}

/// Euclidean radius of an adapted-norm ball: `‖x‖_2 <= sqrt(d) ‖x‖ / c_low`.
fn euclidean_radius(cd: &ContractionData, d: usize, eps: &num_rational::BigRational) -> f64 {
    let d = d as f64;
    (rat_to_f64(eps) / rat_to_f64(&cd.c_low) * d.sqrt()) * (1.0 + 1e-12)
}

pub fn srs_tiles(r: &SrsParameter, cd: &ContractionData, radius: i64, level: usize, caps: &Caps) -> CliResult<Vec<Layer>> {
    let mut layers = Vec::new();
    for x in cube(r.dim(), radius.max(0)) {
        let t = tiles::tile_approx(r, cd, &x, level, caps)?;
        if t.is_empty() {
            continue;
        }
        let color = palette(layers.len());
        layers.push(Layer { points: planar(&t.points_f64()), radius: euclidean_radius(cd, r.dim(), &t.error_bound), color });
    }
    Ok(layers)
}

/// Integral β-tiles `S_β({r·x})` through the corrected SRS route.
pub fn beta_tiles(spec: &PisotSpec, radius: i64, level: usize, caps: &Caps) -> CliResult<Vec<Layer>> {
    let mut layers = Vec::new();
    for x in cube(spec.dim(), radius.max(0)) {
        let b = beta::beta_tile_route_b(spec, &x, level, caps)?;
        if b.corrected.points.is_empty() {
            continue;
        }
        let color = palette(layers.len());
        layers.push(Layer { points: planar(&b.corrected.points), radius: b.corrected.radius, color });
    }
    Ok(layers)
}

fn spec(c: &[i64]) -> CliResult<PisotSpec> {
    Ok(PisotSpec::new(&int_vec(c))?)
}

pub fn layers(name: &str, level: Option<usize>, caps: &Caps) -> CliResult<Vec<Layer>> {
    let Some(f) = find(name) else {
        let names: Vec<&str> = FIGURES.iter().map(|f| f.name).collect();
        return usage(format!("--figure: unknown figure '{name}' (known: {})", names.join(", ")));
    };
    let n = level.unwrap_or(f.level);
    match f.name {
        "twin-dragon" => {
            let a = IntPolynomial::from_i64(&[2, 2, 1])?;
            let pts: Vec<Vec<f64>> =
                cns::self_affine_tile_approx(&a, n, caps)?.iter().map(|p| p.iter().map(rat_to_f64).collect()).collect();
            Ok(vec![Layer { points: planar(&pts), radius: 0.0, color: palette(0) }])
        }
        "rauzy" => beta_tiles(&spec(&[-1, -1, -1, 1])?, 0, n, caps),
        "hokkaido" => beta_tiles(&spec(&[-1, -1, 0, 1])?, 0, n, caps),
        "srs-9-10" => {
            let r = SrsParameter::from_fractions(&[(9, 10), (-11, 20)]);
            let cd = contraction_data(&r, &ContractionOptions::default())?;
            srs_tiles(&r, &cd, 0, n, caps)
        }
        "srs-3-4" => {
            let r = SrsParameter::from_fractions(&[(3, 4), (1, 1)]);
            let cd = contraction_data(&r, &ContractionOptions::default())?;
            srs_tiles(&r, &cd, 2, n, caps)
        }
        "beta-cubic" => beta_tiles(&spec(&[1, 0, -3, 1])?, 2, n, caps),
        _ => unreachable!("listed in FIGURES"),
    }
}
