//! Isotropic total variation and one subgradient.
//!
//! ```text
//! TV(x) = sum_{i,j < n-1} sqrt( (x[i][j+1] - x[i][j])^2 + (x[i+1][j] - x[i][j])^2 )
//! ```
//!
//! The subgradient at pixel `(i, j)` collects the derivative of every term
//! the pixel appears in: its own (as base point), its left neighbor's (as
//! horizontal difference), and its upper neighbor's (as vertical
//! difference). Terms whose root is exactly zero are flat spots; they
//! contribute zero rather than NaN. Terms whose base index falls outside
//! the sum range do not exist and contribute nothing.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::Image;

fn row_tv(x: &Image, i: usize) -> f64 {
    let n = x.n();
    let d = x.as_slice();
    let mut acc = 0.0;
    for j in 0..n - 1 {
        let c = d[i * n + j];
        let dx = d[i * n + j + 1] - c;
        let dy = d[(i + 1) * n + j] - c;
        acc += (dx * dx + dy * dy).sqrt();
    }
    acc
}

/// Total variation, sequential reference path.
pub fn tv_value_seq(x: &Image) -> f64 {
    let n = x.n();
    if n < 2 {
        return 0.0;
    }
    let rows: Vec<f64> = (0..n - 1).map(|i| row_tv(x, i)).collect();
    rows.iter().sum()
}

/// Total variation; row sums are folded in row order, so the parallel and
/// sequential builds agree bitwise.
#[cfg(feature = "parallel")]
pub fn tv_value(x: &Image) -> f64 {
    let n = x.n();
    if n < 2 {
        return 0.0;
    }
    let rows: Vec<f64> = (0..n - 1).into_par_iter().map(|i| row_tv(x, i)).collect();
    rows.iter().sum()
}

#[cfg(not(feature = "parallel"))]
pub fn tv_value(x: &Image) -> f64 {
    tv_value_seq(x)
}

fn sub_row(x: &Image, i: usize, out: &mut [f64]) {
    let n = x.n();
    let d = x.as_slice();
    for (j, slot) in out.iter_mut().enumerate() {
        let c = d[i * n + j];
        let mut g = 0.0;
        // Own term, base (i, j).
        if i + 1 < n && j + 1 < n {
            let right = d[i * n + j + 1];
            let below = d[(i + 1) * n + j];
            let den = ((right - c).powi(2) + (below - c).powi(2)).sqrt();
            if den != 0.0 {
                g += (2.0 * c - right - below) / den;
            }
        }
        // Left neighbor's term, base (i, j-1).
        if i + 1 < n && j >= 1 {
            let base = d[i * n + j - 1];
            let below = d[(i + 1) * n + j - 1];
            let den = ((c - base).powi(2) + (below - base).powi(2)).sqrt();
            if den != 0.0 {
                g += (c - base) / den;
            }
        }
        // Upper neighbor's term, base (i-1, j).
        if i >= 1 && j + 1 < n {
            let base = d[(i - 1) * n + j];
            let right = d[(i - 1) * n + j + 1];
            let den = ((right - base).powi(2) + (c - base).powi(2)).sqrt();
            if den != 0.0 {
                g += (c - base) / den;
            }
        }
        *slot = g;
    }
}

/// One subgradient of [`tv_value`], sequential reference path.
pub fn tv_subgradient_seq(x: &Image) -> Image {
    let n = x.n();
    let mut out = Image::new(n);
    for (i, row) in out.as_mut_slice().chunks_mut(n).enumerate() {
        sub_row(x, i, row);
    }
    out
}

/// One subgradient of [`tv_value`]; rows are independent, so this is
/// bitwise identical to the sequential path.
#[cfg(feature = "parallel")]
pub fn tv_subgradient(x: &Image) -> Image {
    let n = x.n();
    let mut out = Image::new(n);
    out.as_mut_slice().par_chunks_mut(n).enumerate().for_each(|(i, row)| sub_row(x, i, row));
    out
}

#[cfg(not(feature = "parallel"))]
pub fn tv_subgradient(x: &Image) -> Image {
    tv_subgradient_seq(x)
}
