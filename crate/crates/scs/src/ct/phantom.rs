//! Piecewise-constant test images with values in `[0, 1]`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Image;

/// Head phantom: ten ellipses with the usual low-contrast gray levels.
/// `(additive value, semi-axis a, semi-axis b, center x, center y,
/// rotation in degrees)` in coordinates normalized to `[-1, 1]`.
const HEAD_ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

/// Classic head phantom on an `n x n` grid.
pub fn shepp_logan(n: usize) -> Image {
    let mut img = Image::new(n);
    let h = n as f64 / 2.0;
    for row in 0..n {
        for col in 0..n {
            let cx = (col as f64 + 0.5 - h) / h;
            let cy = (h - row as f64 - 0.5) / h;
            let mut v = 0.0;
            for &(value, a, b, x0, y0, deg) in &HEAD_ELLIPSES {
                let phi = deg.to_radians();
                let (s, c) = phi.sin_cos();
                let dx = cx - x0;
                let dy = cy - y0;
                let xr = dx * c + dy * s;
                let yr = -dx * s + dy * c;
                if (xr / a).powi(2) + (yr / b).powi(2) <= 1.0 {
                    v += value;
                }
            }
            img.set(row, col, v.clamp(0.0, 1.0));
        }
    }
    img
}

/// Random disks at three gray levels (1/3, 2/3, 1) on a zero background.
/// Later disks overwrite earlier ones, so every pixel holds one of the four
/// exact levels.
pub fn three_phases(n: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = Image::new(n);
    let scale = n as f64;
    for level in [1.0 / 3.0, 2.0 / 3.0, 1.0] {
        for _ in 0..8 {
            let cx = rng.random_range(0.12..0.88) * scale;
            let cy = rng.random_range(0.12..0.88) * scale;
            let r = rng.random_range(0.04..0.13) * scale;
            let r2 = r * r;
            let lo = ((cy - r).floor().max(0.0)) as usize;
            let hi = ((cy + r).ceil() as usize).min(n);
            for row in lo..hi {
                for col in 0..n {
                    let dx = col as f64 + 0.5 - cx;
                    let dy = row as f64 + 0.5 - cy;
                    if dx * dx + dy * dy <= r2 {
                        img.set(row, col, level);
                    }
                }
            }
        }
    }
    img
}

/// Voronoi tessellation of random sites with five gray levels. Ties go to
/// the lowest site index, so the image is a pure function of the seed.
pub fn grains(n: usize, seed: u64) -> Image {
    const LEVELS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites: Vec<(f64, f64, f64)> = (0..24)
        .map(|i| {
            let x = rng.random_range(0.0..1.0) * n as f64;
            let y = rng.random_range(0.0..1.0) * n as f64;
            (x, y, LEVELS[i % LEVELS.len()])
        })
        .collect();
    let mut img = Image::new(n);
    for row in 0..n {
        for col in 0..n {
            let px = col as f64 + 0.5;
            let py = row as f64 + 0.5;
            let mut best = f64::INFINITY;
            let mut level = 0.0;
            for &(sx, sy, l) in &sites {
                let d = (px - sx).powi(2) + (py - sy).powi(2);
                if d < best {
                    best = d;
                    level = l;
                }
            }
            img.set(row, col, level);
        }
    }
    img
}

/// Look up a phantom builder by its identifier.
pub fn by_name(name: &str, n: usize, seed: u64) -> Option<Image> {
    match name {
        "shepplogan" => Some(shepp_logan(n)),
        "threephases" => Some(three_phases(n, seed)),
        "grains" => Some(grains(n, seed)),
        _ => None,
    }
}

/// All phantom identifiers in their usual order.
pub const NAMES: [&str; 3] = ["shepplogan", "threephases", "grains"];
