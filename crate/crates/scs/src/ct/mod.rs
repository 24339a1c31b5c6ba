//! Matrix-free parallel-beam tomography testbed.
//!
//! A square `n x n` image is probed by parallel rays at `n_views` angles
//! equally spaced over half a turn. The system matrix is never stored: both
//! the forward projection and its exact adjoint walk rays through the pixel
//! grid on the fly ([`projector`]). On top sit piecewise-constant phantoms
//! ([`phantom`]), total-variation regularization ([`tv`]), image quality
//! metrics ([`metrics`]), and file formats for images and sinograms
//! ([`io`]).
//!
//! [`CtObjective`] bundles data and regularizer into the reconstruction
//! objective `f(x) = 0.5 ||Ax - b||^2 + mu TV(x)`, evaluated matrix-free:
//! one oracle call costs one forward and one back projection.

pub mod io;
pub mod metrics;
pub mod phantom;
pub mod projector;
pub mod tv;

use crate::oracle::{Evaluation, ObjectiveOracle};

/// Square grayscale image, row-major, row 0 at the top (y = +n/2).
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    n: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(n: usize) -> Self {
        Image { n, data: vec![0.0; n * n] }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "Image::from_vec: expected {} values", n * n);
        Image { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.n + col] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }
}

/// Projection data, view-major: entry `view * n_det + det`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    n_views: usize,
    n_det: usize,
    data: Vec<f64>,
}

impl Sinogram {
    pub fn new(n_views: usize, n_det: usize) -> Self {
        Sinogram { n_views, n_det, data: vec![0.0; n_views * n_det] }
    }

    pub fn from_vec(n_views: usize, n_det: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n_views * n_det, "Sinogram::from_vec: wrong length");
        Sinogram { n_views, n_det, data }
    }

    pub fn n_views(&self) -> usize {
        self.n_views
    }

    pub fn n_det(&self) -> usize {
        self.n_det
    }

    pub fn get(&self, view: usize, det: usize) -> f64 {
        self.data[view * self.n_det + det]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }
}

/// Add Gaussian noise scaled so `||noisy - b|| = level ||b||` exactly: a
/// standard normal draw is rescaled to the requested relative norm. The same
/// seed always yields the same perturbation; `level = 0` returns the data
/// unchanged.
pub fn add_gaussian_noise(b: &Sinogram, level: f64, seed: u64) -> Sinogram {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    assert!(level >= 0.0, "add_gaussian_noise: negative noise level");
    if level == 0.0 {
        return b.clone();
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let e: Vec<f64> = (0..b.as_slice().len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let b_norm = b.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
    let e_norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(e_norm > 0.0, "add_gaussian_noise: degenerate noise draw");
    let scale = level * b_norm / e_norm;
    let data = b.as_slice().iter().zip(&e).map(|(v, ei)| v + scale * ei).collect();
    Sinogram::from_vec(b.n_views(), b.n_det(), data)
}

/// Detector count covering the grid diagonal: `ceil(sqrt(2) n)` rounded up
/// to even, so detector offsets are half-integers and axis-aligned rays
/// never run exactly along pixel edges.
pub fn default_detector_count(n: usize) -> usize {
    let d = (std::f64::consts::SQRT_2 * n as f64).ceil() as usize;
    d + d % 2
}

/// Acquisition geometry: pixel size 1, detector spacing 1, angles
/// `v * pi / n_views` for `v = 0..n_views`.
#[derive(Clone, Debug)]
pub struct Geometry {
    n: usize,
    n_views: usize,
    n_det: usize,
    /// (sin, cos) per view.
    trig: Vec<(f64, f64)>,
}

impl Geometry {
    pub fn new(n: usize, n_views: usize, n_det: usize) -> Self {
        assert!(n >= 1 && n_views >= 1 && n_det >= 1, "Geometry::new: empty geometry");
        let trig = (0..n_views)
            .map(|v| {
                let phi = v as f64 * std::f64::consts::PI / n_views as f64;
                phi.sin_cos()
            })
            .collect();
        Geometry { n, n_views, n_det, trig }
    }

    pub fn with_default_detectors(n: usize, n_views: usize) -> Self {
        Geometry::new(n, n_views, default_detector_count(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_views(&self) -> usize {
        self.n_views
    }

    pub fn n_det(&self) -> usize {
        self.n_det
    }

    pub fn ray_count(&self) -> usize {
        self.n_views * self.n_det
    }

    /// Signed detector offset from the rotation center.
    fn det_offset(&self, det: usize) -> f64 {
        det as f64 - 0.5 * (self.n_det as f64 - 1.0)
    }

    /// Ray through detector `det` of view `view`: a point on the ray and the
    /// unit direction.
    fn ray(&self, view: usize, det: usize) -> (f64, f64, f64, f64) {
        let (s, c) = self.trig[view];
        let t = self.det_offset(det);
        (-t * s, t * c, c, s)
    }
}

/// Reconstruction objective `0.5 ||Ax - b||^2 + mu TV(x)` on the image
/// `x` in `[0, 1]^(n x n)`. With `mu = 0` the TV pass is skipped entirely.
pub struct CtObjective {
    geom: Geometry,
    b: Sinogram,
    mu: f64,
}

impl CtObjective {
    pub fn new(geom: Geometry, b: Sinogram, mu: f64) -> Self {
        assert_eq!(geom.n_views(), b.n_views(), "CtObjective: geometry/data view mismatch");
        assert_eq!(geom.n_det(), b.n_det(), "CtObjective: geometry/data detector mismatch");
        assert!(mu >= 0.0, "CtObjective: negative regularization weight");
        CtObjective { geom, b, mu }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn data(&self) -> &Sinogram {
        &self.b
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

impl ObjectiveOracle for CtObjective {
    fn dim(&self) -> usize {
        self.geom.n() * self.geom.n()
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        let n = self.geom.n();
        let img = Image::from_vec(n, x.to_vec());
        let ax = projector::forward_project(&img, &self.geom);
        let residual: Vec<f64> =
            ax.as_slice().iter().zip(self.b.as_slice()).map(|(a, b)| a - b).collect();
        let data_term = 0.5 * residual.iter().map(|r| r * r).sum::<f64>();
        let r_sino = Sinogram::from_vec(self.geom.n_views(), self.geom.n_det(), residual);
        let mut g = projector::back_project(&r_sino, &self.geom).into_vec();
        let value = if self.mu == 0.0 {
            data_term
        } else {
            let tv_sub = tv::tv_subgradient(&img);
            for (gi, ti) in g.iter_mut().zip(tv_sub.as_slice()) {
                *gi += self.mu * ti;
            }
            data_term + self.mu * tv::tv_value(&img)
        };
        Evaluation { value, subgradient: g }
    }
}
