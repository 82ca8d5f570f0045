//! Classification of a rational grid in the `(r_0, r_1)` plane.

use image::{Rgb, RgbImage};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};

use srs_core::dynamics::{decide_finiteness, Caps};
use srs_core::interval::{fmt_rat, parse_rat, rat_to_f64};
use srs_core::params::SrsParameter;

use crate::args::ScanArgs;
use crate::commands::Ctx;
use crate::{usage, CliError, CliResult};

/// Per-cell caps unless `--cap-steps` / `--cap-points` are given.
const CELL_CAPS: Caps = Caps { steps: 200_000, points: 50_000 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellClass {
    Finite,
    NotFinite,
    /// Spectral radius of `M_r` at least 1: no finiteness decision.
    NotInterior,
    /// A cap was hit.
    Unknown,
}

impl CellClass {
    pub fn name(self) -> &'static str {
        match self {
            CellClass::Finite => "finite",
            CellClass::NotFinite => "not-finite",
            CellClass::NotInterior => "not-interior",
            CellClass::Unknown => "unknown",
        }
    }

    fn color(self) -> [u8; 3] {
        match self {
            CellClass::Finite => [40, 40, 40],
            CellClass::NotFinite => [200, 200, 200],
            CellClass::NotInterior => [255, 255, 255],
            CellClass::Unknown => [230, 80, 60],
        }
    }
}

pub fn classify(r0: &BigRational, r1: &BigRational, caps: &Caps) -> CellClass {
    let r = match SrsParameter::rational(vec![r0.clone(), r1.clone()]) {
        Ok(r) => r,
        Err(_) => return CellClass::Unknown,
    };
    match r.is_interior() {
        Ok(true) => {}
        Ok(false) => return CellClass::NotInterior,
        Err(_) => return CellClass::Unknown,
    }
    match decide_finiteness(&r, caps) {
        Ok(v) if v.holds => CellClass::Finite,
        Ok(_) => CellClass::NotFinite,
        Err(_) => CellClass::Unknown,
    }
}

pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x0: BigRational,
    pub x1: BigRational,
    pub y0: BigRational,
    pub y1: BigRational,
}

impl Grid {
    pub fn parse(grid: &str, bx: &str) -> CliResult<Grid> {
        let bad_grid = || CliError::Usage(format!("--grid: expected NXxNY, got '{grid}'"));
        let (a, b) = grid.split_once(['x', 'X']).ok_or_else(bad_grid)?;
        let nx: usize = a.trim().parse().map_err(|_| bad_grid())?;
        let ny: usize = b.trim().parse().map_err(|_| bad_grid())?;
        if nx < 2 || ny < 2 {
            return usage("--grid: need at least 2 points per axis");
        }
        let v: Vec<BigRational> = bx.split(',').map(parse_rat).collect::<Option<_>>().ok_or_else(|| {
            CliError::Usage(format!("--box: expected four rationals x0,x1,y0,y1, got '{bx}'"))
        })?;
        if v.len() != 4 || v[0] >= v[1] || v[2] >= v[3] {
            return usage("--box: expected x0 < x1 and y0 < y1");
        }
        Ok(Grid { nx, ny, x0: v[0].clone(), x1: v[1].clone(), y0: v[2].clone(), y1: v[3].clone() })
    }

    fn coord(lo: &BigRational, hi: &BigRational, i: usize, n: usize) -> BigRational {
        lo + (hi - lo) * BigRational::new(BigInt::from(i), BigInt::from(n - 1))
    }

    pub fn point(&self, i: usize, j: usize) -> (BigRational, BigRational) {
        (Self::coord(&self.x0, &self.x1, i, self.nx), Self::coord(&self.y0, &self.y1, j, self.ny))
    }
}

pub struct Cell {
    pub r0: BigRational,
    pub r1: BigRational,
    pub class: CellClass,
}

/// Cells in row-major order (`r_1` outer, `r_0` inner).
pub fn scan(grid: &Grid, caps: &Caps) -> Vec<Cell> {
    let idx: Vec<(usize, usize)> = (0..grid.ny).flat_map(|j| (0..grid.nx).map(move |i| (i, j))).collect();
    idx.par_iter()
        .map(|&(i, j)| {
            let (r0, r1) = grid.point(i, j);
            let class = classify(&r0, &r1, caps);
            Cell { r0, r1, class }
        })
        .collect()
}

fn draw_line(img: &mut RgbImage, a: (f64, f64), b: (f64, f64), c: [u8; 3]) {
    let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).max(1) * 2;
    for s in 0..=steps {
        let t = s as f64 / steps as f64;
        let x = (a.0 + (b.0 - a.0) * t).round();
        let y = (a.1 + (b.1 - a.1) * t).round();
        if x >= 0.0 && y >= 0.0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, Rgb(c));
        }
    }
}

/// One `cell`-sized square per grid point, `r_1` pointing up, with the
/// outline of the triangle `{ρ(M_r) < 1}` (vertices (-1,0), (1,-2), (1,2)).
pub fn bitmap(grid: &Grid, cells: &[Cell], cell: u32) -> RgbImage {
    let (w, h) = (grid.nx as u32 * cell, grid.ny as u32 * cell);
    let mut img = RgbImage::from_pixel(w, h, Rgb([255, 255, 255]));
    for (k, c) in cells.iter().enumerate() {
        let (i, j) = ((k % grid.nx) as u32, (k / grid.nx) as u32);
        let top = h - (j + 1) * cell;
        for dy in 0..cell {
            for dx in 0..cell {
                img.put_pixel(i * cell + dx, top + dy, Rgb(c.class.color()));
            }
        }
    }
    let (x0, x1, y0, y1) = (rat_to_f64(&grid.x0), rat_to_f64(&grid.x1), rat_to_f64(&grid.y0), rat_to_f64(&grid.y1));
    let sx = (grid.nx as f64 - 1.0) * cell as f64 / (x1 - x0);
    let sy = (grid.ny as f64 - 1.0) * cell as f64 / (y1 - y0);
    let half = cell as f64 / 2.0;
    let to_px = |p: (f64, f64)| (half + (p.0 - x0) * sx, h as f64 - half - (p.1 - y0) * sy);
    let tri = [(-1.0, 0.0), (1.0, -2.0), (1.0, 2.0)];
    for k in 0..3 {
        draw_line(&mut img, to_px(tri[k]), to_px(tri[(k + 1) % 3]), [0, 90, 200]);
    }
    img
}

pub fn csv(cells: &[Cell]) -> String {
    let mut s = String::from("r0,r1,class\n");
    for c in cells {
        s.push_str(&format!("{},{},{}\n", fmt_rat(&c.r0), fmt_rat(&c.r1), c.class.name()));
    }
    s
}

/// Writes the PNG to `--out` (default `scan-d2.png`) and the CSV next to it.
pub fn run(ctx: &Ctx, a: &ScanArgs) -> CliResult<Value> {
    let grid = Grid::parse(&a.grid, &a.r#box)?;
    if a.cell == 0 {
        return usage("--cell must be positive");
    }
    let caps = Caps {
        steps: ctx.c.cap_steps.unwrap_or(CELL_CAPS.steps),
        points: ctx.c.cap_points.unwrap_or(CELL_CAPS.points),
    };
    let cells = scan(&grid, &caps);
    let png = ctx.c.out.clone().unwrap_or_else(|| "scan-d2.png".into());
    let csv_path = png.with_extension("csv");
    bitmap(&grid, &cells, a.cell)
        .save_with_format(&png, image::ImageFormat::Png)
        .map_err(|e| CliError::Usage(format!("--out {}: {e}", png.display())))?;
    std::fs::write(&csv_path, csv(&cells)).map_err(|e| CliError::Usage(format!("--out {}: {e}", csv_path.display())))?;
    let count = |k: CellClass| cells.iter().filter(|c| c.class == k).count();
    Ok(json!({
        "grid": [grid.nx, grid.ny],
        "box": [fmt_rat(&grid.x0), fmt_rat(&grid.x1), fmt_rat(&grid.y0), fmt_rat(&grid.y1)],
        "counts": {
            "finite": count(CellClass::Finite),
            "not-finite": count(CellClass::NotFinite),
            "not-interior": count(CellClass::NotInterior),
            "unknown": count(CellClass::Unknown),
        },
        "png": png.display().to_string(),
        "csv": csv_path.display().to_string(),
    }))
}
