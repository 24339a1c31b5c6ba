//! Spectral conjugate subgradient optimization.
//!
//! This crate implements a family of subgradient methods for nonsmooth
//! unconstrained minimization built around two ingredients: a spectral
//! (Barzilai-Borwein) scaling of the subgradient and a conjugate-direction
//! correction with interchangeable formulas (none, Perry, Polak-Ribiere,
//! Fletcher-Reeves). Directions are globalized either by a nonmonotone
//! backtracking line search with a decaying slack or by a Wolfe bracketing
//! search. With the correction switched off the iteration reduces to the
//! plain spectral subgradient method.
//!
//! Around the solver the crate ships everything needed to reproduce a small
//! computational study:
//!
//! * [`problems`]: ten classic nonsmooth test functions with exact
//!   subgradient oracles and reference optimal values,
//! * [`ct`]: a matrix-free parallel-beam tomography testbed (exact ray
//!   tracing, adjoint back projection, total-variation regularization,
//!   phantoms, PSNR/SSIM image metrics),
//! * [`profiles`]: performance-profile construction and CSV/SVG emission,
//! * [`study`]: batch experiment drivers with plain-text configs and
//!   deterministic, re-runnable outputs.
//!
//! # Parallelism
//!
//! The `parallel` feature (on by default) runs ray tracing, total variation,
//! and study sweeps on a rayon pool. Reductions use fixed chunking and
//! ordered folds, so results are bitwise identical no matter the thread
//! count, and identical to the sequential fallback built with
//! `--no-default-features`.

pub mod ct;
pub mod linesearch;
pub mod oracle;
pub mod problems;
pub mod profiles;
pub mod solver;
pub mod study;
pub mod vector;

pub use oracle::{CountingOracle, Evaluation, ObjectiveOracle};
pub use solver::{solve, BetaRule, LineSearch, ScsConfig, SolveResult};
