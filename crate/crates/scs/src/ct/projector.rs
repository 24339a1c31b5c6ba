//! Exact ray tracing through the pixel grid.
//!
//! Forward projection integrates the image along each ray; back projection
//! is its exact adjoint, spreading ray values back over the same pixels
//! with the same weights. Both walk the sorted grid-line crossings of a
//! ray, so a pixel's weight is the exact chord length of the ray inside it
//! and the two operators share one traversal routine. That makes the
//! adjoint identity `<Ax, r> = <x, A'r>` hold to rounding error by
//! construction.
//!
//! Determinism: forward projection writes disjoint per-ray slots, and back
//! projection accumulates into a fixed number of per-chunk partial images
//! that are folded in chunk order. Parallel and sequential builds follow
//! the identical summation tree, so results are bitwise equal regardless
//! of feature flags or thread count.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{Geometry, Image, Sinogram};

/// Direction components below this are treated as axis-parallel.
const DIR_EPS: f64 = 1e-12;
/// Segments shorter than this contribute nothing.
const LEN_EPS: f64 = 1e-12;
/// Back projection folds this many fixed ray chunks, independent of the
/// thread count; changing it changes the summation tree and thus bits.
const BACK_CHUNKS: usize = 32;

/// Reusable per-thread buffers for one ray traversal.
struct TraceScratch {
    xs: Vec<f64>,
    ys: Vec<f64>,
    taus: Vec<f64>,
}

impl TraceScratch {
    fn new() -> Self {
        TraceScratch { xs: Vec::new(), ys: Vec::new(), taus: Vec::new() }
    }
}

/// Clip the ray parameter interval against one slab `-h <= p + u t <= h`.
/// Returns false if the ray misses the slab entirely.
fn clip_axis(p: f64, u: f64, h: f64, t: &mut (f64, f64)) -> bool {
    if u.abs() < DIR_EPS {
        (-h..=h).contains(&p)
    } else {
        let ta = (-h - p) / u;
        let tb = (h - p) / u;
        t.0 = t.0.max(ta.min(tb));
        t.1 = t.1.min(ta.max(tb));
        true
    }
}

/// Parameters of the grid-line crossings of one axis, ascending, restricted
/// to the open interval `(t0, t1)`.
fn axis_crossings(out: &mut Vec<f64>, p: f64, u: f64, n: usize, h: f64, t0: f64, t1: f64) {
    out.clear();
    if u.abs() < DIR_EPS {
        return;
    }
    let mut push = |m: usize| {
        let tau = ((m as f64 - h) - p) / u;
        if tau > t0 && tau < t1 {
            out.push(tau);
        }
    };
    if u > 0.0 {
        for m in 0..=n {
            push(m);
        }
    } else {
        for m in (0..=n).rev() {
            push(m);
        }
    }
}

/// Visit every pixel crossed by the ray `(view, det)` with its chord length.
/// Column `c` spans `x` in `[c - h, c + 1 - h]`; row `r` spans `y` in
/// `[h - r - 1, h - r]` (row 0 on top).
fn trace_ray(
    geom: &Geometry,
    view: usize,
    det: usize,
    scratch: &mut TraceScratch,
    mut visit: impl FnMut(usize, f64),
) {
    let n = geom.n();
    let h = n as f64 / 2.0;
    let (px, py, ux, uy) = geom.ray(view, det);

    let mut t = (f64::NEG_INFINITY, f64::INFINITY);
    if !clip_axis(px, ux, h, &mut t) || !clip_axis(py, uy, h, &mut t) {
        return;
    }
    let (t0, t1) = t;
    if !(t1 - t0 > LEN_EPS) {
        return;
    }

    let TraceScratch { xs, ys, taus } = scratch;
    axis_crossings(xs, px, ux, n, h, t0, t1);
    axis_crossings(ys, py, uy, n, h, t0, t1);

    taus.clear();
    taus.push(t0);
    let (mut i, mut j) = (0, 0);
    while i < xs.len() || j < ys.len() {
        let take_x = match (xs.get(i), ys.get(j)) {
            (Some(a), Some(b)) => a <= b,
            (Some(_), None) => true,
            _ => false,
        };
        if take_x {
            taus.push(xs[i]);
            i += 1;
        } else {
            taus.push(ys[j]);
            j += 1;
        }
    }
    taus.push(t1);

    for w in taus.windows(2) {
        let len = w[1] - w[0];
        if len <= LEN_EPS {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let col = (px + ux * mid + h).floor();
        let row = (h - (py + uy * mid)).floor();
        if (0.0..n as f64).contains(&col) && (0.0..n as f64).contains(&row) {
            visit(row as usize * n + col as usize, len);
        }
    }
}

fn integrate_ray(
    x: &Image,
    geom: &Geometry,
    view: usize,
    det: usize,
    scratch: &mut TraceScratch,
) -> f64 {
    let data = x.as_slice();
    let mut acc = 0.0;
    trace_ray(geom, view, det, scratch, |p, w| acc += w * data[p]);
    acc
}

fn forward_view(x: &Image, geom: &Geometry, view: usize, out: &mut [f64], scratch: &mut TraceScratch) {
    for (det, slot) in out.iter_mut().enumerate() {
        *slot = integrate_ray(x, geom, view, det, scratch);
    }
}

/// Sequential forward projection; the reference path.
pub fn forward_project_seq(x: &Image, geom: &Geometry) -> Sinogram {
    assert_eq!(x.n(), geom.n(), "forward_project: image/geometry size mismatch");
    let mut out = vec![0.0; geom.ray_count()];
    let mut scratch = TraceScratch::new();
    for (view, chunk) in out.chunks_mut(geom.n_det()).enumerate() {
        forward_view(x, geom, view, chunk, &mut scratch);
    }
    Sinogram::from_vec(geom.n_views(), geom.n_det(), out)
}

/// Forward projection, parallel over views when the `parallel` feature is
/// on. Bitwise identical to [`forward_project_seq`].
#[cfg(feature = "parallel")]
pub fn forward_project(x: &Image, geom: &Geometry) -> Sinogram {
    assert_eq!(x.n(), geom.n(), "forward_project: image/geometry size mismatch");
    let mut out = vec![0.0; geom.ray_count()];
    out.par_chunks_mut(geom.n_det()).enumerate().for_each(|(view, chunk)| {
        let mut scratch = TraceScratch::new();
        forward_view(x, geom, view, chunk, &mut scratch);
    });
    Sinogram::from_vec(geom.n_views(), geom.n_det(), out)
}

#[cfg(not(feature = "parallel"))]
pub fn forward_project(x: &Image, geom: &Geometry) -> Sinogram {
    forward_project_seq(x, geom)
}

fn chunk_ranges(total: usize) -> Vec<Range<usize>> {
    let span = total.div_ceil(BACK_CHUNKS).max(1);
    (0..total).step_by(span).map(|start| start..(start + span).min(total)).collect()
}

fn back_chunk(r: &Sinogram, geom: &Geometry, rays: Range<usize>) -> Image {
    let nd = geom.n_det();
    let mut img = Image::new(geom.n());
    let mut scratch = TraceScratch::new();
    let data = r.as_slice();
    for ray in rays {
        let value = data[ray];
        let out = img.as_mut_slice();
        trace_ray(geom, ray / nd, ray % nd, &mut scratch, |p, w| out[p] += w * value);
    }
    img
}

fn fold_partials(parts: Vec<Image>, n: usize) -> Image {
    let mut acc = Image::new(n);
    for part in parts {
        let a = acc.as_mut_slice();
        for (ai, pi) in a.iter_mut().zip(part.as_slice()) {
            *ai += pi;
        }
    }
    acc
}

/// Sequential back projection (exact adjoint of the forward projection);
/// the reference path.
pub fn back_project_seq(r: &Sinogram, geom: &Geometry) -> Image {
    assert_eq!(r.n_views(), geom.n_views(), "back_project: sinogram/geometry mismatch");
    assert_eq!(r.n_det(), geom.n_det(), "back_project: sinogram/geometry mismatch");
    let parts: Vec<Image> =
        chunk_ranges(geom.ray_count()).into_iter().map(|c| back_chunk(r, geom, c)).collect();
    fold_partials(parts, geom.n())
}

/// Back projection, parallel over ray chunks when the `parallel` feature is
/// on. Bitwise identical to [`back_project_seq`].
#[cfg(feature = "parallel")]
pub fn back_project(r: &Sinogram, geom: &Geometry) -> Image {
    assert_eq!(r.n_views(), geom.n_views(), "back_project: sinogram/geometry mismatch");
    assert_eq!(r.n_det(), geom.n_det(), "back_project: sinogram/geometry mismatch");
    let parts: Vec<Image> = chunk_ranges(geom.ray_count())
        .into_par_iter()
        .map(|c| back_chunk(r, geom, c))
        .collect();
    fold_partials(parts, geom.n())
}

#[cfg(not(feature = "parallel"))]
pub fn back_project(r: &Sinogram, geom: &Geometry) -> Image {
    back_project_seq(r, geom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::{dot, norm};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_pixel_axis_ray_has_unit_weight() {
        // One pixel of value 1, one horizontal ray through its center.
        let img = Image::from_vec(1, vec![1.0]);
        let geom = Geometry::new(1, 1, 1);
        let sino = forward_project(&img, &geom);
        assert!((sino.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_pixel_diagonal_ray_sees_the_diagonal() {
        // 4 views over 180 degrees: view 1 is 45 degrees; the central ray
        // crosses the unit pixel along its full diagonal.
        let img = Image::from_vec(1, vec![1.0]);
        let geom = Geometry::new(1, 4, 1);
        let sino = forward_project(&img, &geom);
        assert!((sino.get(1, 0) - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn zero_image_projects_to_zero() {
        let geom = Geometry::with_default_detectors(8, 6);
        let sino = forward_project(&Image::new(8), &geom);
        assert!(sino.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ray_sums_are_bounded_by_the_diagonal() {
        // Projecting an all-ones image gives each ray its chord length
        // through the grid, at most n sqrt(2).
        let n = 16;
        let geom = Geometry::with_default_detectors(n, 10);
        let ones = Image::from_vec(n, vec![1.0; n * n]);
        let sino = forward_project(&ones, &geom);
        let bound = std::f64::consts::SQRT_2 * n as f64 + 1e-9;
        for &v in sino.as_slice() {
            assert!(v >= 0.0 && v <= bound, "chord length {v} out of range");
        }
        // The central ray of the axis-aligned view crosses the full width.
        let mid = geom.n_det() / 2;
        assert!((sino.get(0, mid) - n as f64).abs() < 1e-9);
    }

    #[test]
    fn projection_is_linear() {
        let n = 8;
        let geom = Geometry::with_default_detectors(n, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let comb: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.5 * x - 0.5 * y).collect();
        let pa = forward_project(&Image::from_vec(n, a), &geom);
        let pb = forward_project(&Image::from_vec(n, b), &geom);
        let pc = forward_project(&Image::from_vec(n, comb), &geom);
        for i in 0..geom.ray_count() {
            let expect = 2.5 * pa.as_slice()[i] - 0.5 * pb.as_slice()[i];
            assert!((pc.as_slice()[i] - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn adjoint_identity_holds_to_rounding() {
        let n = 16;
        let geom = Geometry::new(n, 12, default_det(n));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let x: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r: Vec<f64> = (0..geom.ray_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let ax = forward_project(&Image::from_vec(n, x.clone()), &geom);
            let atr =
                back_project(&Sinogram::from_vec(12, geom.n_det(), r.clone()), &geom);
            let lhs = dot(ax.as_slice(), &r);
            let rhs = dot(&x, atr.as_slice());
            let scale = norm(ax.as_slice()) * norm(&r);
            assert!(
                (lhs - rhs).abs() <= 1e-12 * scale.max(1.0),
                "adjoint mismatch: {lhs} vs {rhs}"
            );
        }
    }

    fn default_det(n: usize) -> usize {
        super::super::default_detector_count(n)
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_paths_are_bitwise_equal_to_sequential() {
        let n = 12;
        let geom = Geometry::with_default_detectors(n, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..1.0)).collect();
        let img = Image::from_vec(n, x);
        let fw_par = forward_project(&img, &geom);
        let fw_seq = forward_project_seq(&img, &geom);
        assert_eq!(fw_par.as_slice(), fw_seq.as_slice());
        let r: Vec<f64> = (0..geom.ray_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sino = Sinogram::from_vec(7, geom.n_det(), r);
        let bp_par = back_project(&sino, &geom);
        let bp_seq = back_project_seq(&sino, &geom);
        assert_eq!(bp_par.as_slice(), bp_seq.as_slice());
    }

    #[test]
    fn chunking_covers_all_rays_exactly_once() {
        for total in [1, 5, 31, 32, 33, 1000] {
            let ranges = chunk_ranges(total);
            let mut covered = 0;
            let mut expected_start = 0;
            for r in &ranges {
                assert_eq!(r.start, expected_start);
                covered += r.len();
                expected_start = r.end;
            }
            assert_eq!(covered, total);
        }
    }
}
