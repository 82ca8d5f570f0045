//! Deterministic rasterization of planar point sets, SVG/CSV export and a
//! DCT perceptual hash for figure regression.

use image::{Rgb, RgbImage};

/// One coloured point set. `radius` is the coordinate error radius of the
/// points (Euclidean units); discs are drawn at least one pixel wide.
#[derive(Clone, Debug)]
pub struct Layer {
    pub points: Vec<[f64; 2]>,
    pub radius: f64,
    pub color: [u8; 3],
}

#[derive(Clone, Debug)]
pub struct RenderOptions {
    pub width: u32,
    pub height: u32,
    /// Fraction of the image left empty on each side.
    pub margin: f64,
    pub background: [u8; 3],
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { width: 512, height: 512, margin: 0.05, background: [255, 255, 255] }
    }
}

/// Fixed palette; layer `i` uses entry `i % len`.
pub const PALETTE: [[u8; 3]; 12] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
    [57, 59, 121],
    [132, 60, 57],
];

pub fn palette(i: usize) -> [u8; 3] {
    PALETTE[i % PALETTE.len()]
}

/// Projects the first two coordinates.
pub fn planar(points: &[Vec<f64>]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p[0], p.get(1).copied().unwrap_or(0.0)]).collect()
}

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
    ox: f64,
    oy: f64,
}

fn frame(layers: &[Layer], o: &RenderOptions) -> Frame {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in layers.iter().flat_map(|l| &l.points) {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let w = (x1 - x0).max(1e-12);
    let h = (y1 - y0).max(1e-12);
    let aw = o.width as f64 * (1.0 - 2.0 * o.margin);
    let ah = o.height as f64 * (1.0 - 2.0 * o.margin);
    let scale = (aw / w).min(ah / h);
    Frame {
        x0,
        y0,
        scale,
        ox: (o.width as f64 - w * scale) / 2.0,
        oy: (o.height as f64 - h * scale) / 2.0,
    }
}

impl Frame {
    fn px(&self, p: &[f64; 2], height: u32) -> (f64, f64) {
        let x = self.ox + (p[0] - self.x0) * self.scale;
        let y = height as f64 - (self.oy + (p[1] - self.y0) * self.scale);
        (x, y)
    }
}

pub fn render_png(layers: &[Layer], o: &RenderOptions) -> RgbImage {
    let mut img = RgbImage::from_pixel(o.width, o.height, Rgb(o.background));
    let f = frame(layers, o);
    for l in layers {
        let rpx = (l.radius * f.scale).max(0.5);
        let reach = rpx.ceil() as i64;
        for p in &l.points {
            let (cx, cy) = f.px(p, o.height);
            let (ix, iy) = (cx.floor() as i64, cy.floor() as i64);
            for dy in -reach..=reach {
                for dx in -reach..=reach {
                    let (x, y) = (ix + dx, iy + dy);
                    if x < 0 || y < 0 || x >= o.width as i64 || y >= o.height as i64 {
                        continue;
                    }
                    let ddx = x as f64 + 0.5 - cx;
                    let ddy = y as f64 + 0.5 - cy;
                    if (dx == 0 && dy == 0) || ddx * ddx + ddy * ddy <= rpx * rpx {
                        img.put_pixel(x as u32, y as u32, Rgb(l.color));
                    }
                }
            }
        }
    }
    img
}

pub fn save_png(img: &RgbImage, path: &std::path::Path) -> crate::error::Result<()> {
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| crate::error::SrsError::Io(e.to_string()))
}

pub fn render_svg(layers: &[Layer], o: &RenderOptions) -> String {
    let f = frame(layers, o);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"rgb({},{},{})\"/>\n",
        o.width, o.height, o.width, o.height, o.background[0], o.background[1], o.background[2]
    );
    for l in layers {
        let r = (l.radius * f.scale).max(0.5);
        s.push_str(&format!("<g fill=\"rgb({},{},{})\">\n", l.color[0], l.color[1], l.color[2]));
        for p in &l.points {
            let (x, y) = f.px(p, o.height);
            s.push_str(&format!("<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\"/>\n", x, y, r));
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// `layer,x,y` rows.
pub fn points_csv(layers: &[Layer]) -> String {
    let mut s = String::from("layer,x,y\n");
    for (i, l) in layers.iter().enumerate() {
        for p in &l.points {
            s.push_str(&format!("{},{:.17e},{:.17e}\n", i, p[0], p[1]));
        }
    }
    s
}

/// 64-bit DCT hash: 32x32 grey thumbnail, 2-D DCT-II, low 8x8 block
/// without the DC term, thresholded at its median.
pub fn phash(img: &RgbImage) -> u64 {
    const N: usize = 32;
    let (w, h) = img.dimensions();
    let mut grey = [[0f64; N]; N];
    for (y, row) in grey.iter_mut().enumerate() {
        for (x, cell) in row.iter_mut().enumerate() {
            let xa = x as u32 * w / N as u32;
            let xb = ((x as u32 + 1) * w / N as u32).max(xa + 1);
            let ya = y as u32 * h / N as u32;
            let yb = ((y as u32 + 1) * h / N as u32).max(ya + 1);
            let mut acc = 0.0;
            for yy in ya..yb {
                for xx in xa..xb {
                    let p = img.get_pixel(xx, yy).0;
                    acc += 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64;
                }
            }
            *cell = acc / ((xb - xa) * (yb - ya)) as f64;
        }
    }
    let cos: Vec<Vec<f64>> = (0..8)
        .map(|u| (0..N).map(|x| ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / (2 * N) as f64).cos()).collect())
        .collect();
    let mut coef = Vec::with_capacity(64);
    for u in 0..8 {
        for v in 0..8 {
            let mut s = 0.0;
            for (y, row) in grey.iter().enumerate() {
                for (x, g) in row.iter().enumerate() {
                    s += g * cos[u][y] * cos[v][x];
                }
            }
            coef.push(s);
        }
    }
    let mut sorted: Vec<f64> = coef[1..].to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    coef.iter().enumerate().fold(0u64, |h, (i, c)| if *c > median { h | (1 << i) } else { h })
}

pub fn hamming(a: u64, b: u64) -> u32 {
    (a ^ b).count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_deterministic_and_hash_stable() {
        let pts: Vec<[f64; 2]> = (0..500).map(|i| [(i as f64 * 0.1).sin(), (i as f64 * 0.13).cos()]).collect();
        let l = vec![Layer { points: pts, radius: 0.0, color: palette(0) }];
        let o = RenderOptions::default();
        let a = render_png(&l, &o);
        let b = render_png(&l, &o);
        assert_eq!(a.as_raw(), b.as_raw());
        assert_eq!(phash(&a), phash(&b));
        let blank = RgbImage::from_pixel(512, 512, Rgb([255, 255, 255]));
        assert!(hamming(phash(&a), phash(&blank)) > 0);
        assert!(render_svg(&l, &o).starts_with("<svg"));
    }
}
