//! Step length selection.
//!
//! Two strategies are provided. The nonmonotone search backtracks from a
//! unit step until
//!
//! ```text
//! f(x + alpha d) <= max{f over the last min(k, M)+1 iterates} + gamma alpha g'd + eta_k
//! ```
//!
//! where `eta_k` is a summable slack that lets early iterations accept
//! nearly any step and tightens as the run progresses. The Wolfe search
//! brackets a step satisfying sufficient decrease and asks the curvature
//! condition `g(x + alpha d)'d >= sigma g'd` of the subgradient reported
//! there, shrinking the bracket by bisection.
//!
//! Both report failure instead of looping forever: the nonmonotone search
//! gives up below `alpha_min`, the Wolfe search after a fixed oracle-call
//! budget or once the bracket collapses (which happens at kinks where no
//! step satisfies curvature). On failure the best trial seen is returned so
//! the caller can decide how to proceed.

use std::collections::VecDeque;

use crate::oracle::{Evaluation, ObjectiveOracle};
use crate::vector::{axpy, dot};

/// Decaying slack for the nonmonotone acceptance test: `eta0 / k^1.1`.
///
/// The exponent keeps the series summable, so total slack over a run is
/// bounded by a constant multiple of `eta0`. `k` must be at least 1; the
/// caller decides what iteration 0 uses (conventionally `eta0` itself).
pub fn eta(k: usize, eta0: f64) -> f64 {
    assert!(k >= 1, "eta: iteration index must be >= 1, got {k}");
    eta0 / (k as f64).powf(1.1)
}

/// Sliding window over the last `memory + 1` accepted objective values.
#[derive(Clone, Debug)]
pub struct FunctionMemory {
    window: VecDeque<f64>,
    cap: usize,
}

impl FunctionMemory {
    /// `memory` is the M in the acceptance test; the window holds M+1 values.
    pub fn new(memory: usize) -> Self {
        FunctionMemory { window: VecDeque::with_capacity(memory + 1), cap: memory + 1 }
    }

    pub fn push(&mut self, f: f64) {
        if self.window.len() == self.cap {
            self.window.pop_front();
        }
        self.window.push_back(f);
    }

    /// Largest stored value. Panics if nothing has been pushed yet.
    pub fn max(&self) -> f64 {
        assert!(!self.window.is_empty(), "FunctionMemory::max on empty window");
        self.window.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NonmonotoneParams {
    /// M: how many previous values besides the current one enter the max.
    pub memory: usize,
    /// Sufficient-decrease coefficient.
    pub gamma: f64,
    /// Backtracking factor applied to alpha after each rejection.
    pub backtrack: f64,
    /// Give up once alpha falls below this.
    pub alpha_min: f64,
}

impl Default for NonmonotoneParams {
    fn default() -> Self {
        NonmonotoneParams { memory: 7, gamma: 1e-4, backtrack: 0.5, alpha_min: 1e-16 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WolfeParams {
    /// Sufficient-decrease coefficient, 0 < gamma < sigma.
    pub gamma: f64,
    /// Curvature coefficient, gamma < sigma < 1.
    pub sigma: f64,
    /// Oracle-call budget.
    pub max_evals: u32,
}

impl Default for WolfeParams {
    fn default() -> Self {
        WolfeParams { gamma: 1e-4, sigma: 0.9, max_evals: 50 }
    }
}

/// What a search produced: the accepted trial, or on failure the best
/// (lowest-value) trial evaluated before giving up.
#[derive(Clone, Debug)]
pub struct LineSearchOutcome {
    pub alpha: f64,
    pub x_new: Vec<f64>,
    pub f_new: f64,
    pub g_new: Vec<f64>,
    pub evals_used: u32,
    pub accepted: bool,
}

struct Trial {
    alpha: f64,
    x: Vec<f64>,
    ev: Evaluation,
}

fn outcome(t: Trial, evals: u32, accepted: bool) -> LineSearchOutcome {
    LineSearchOutcome {
        alpha: t.alpha,
        x_new: t.x,
        f_new: t.ev.value,
        g_new: t.ev.subgradient,
        evals_used: evals,
        accepted,
    }
}

/// Keep whichever trial has the lower value; NaN loses to anything.
fn better(best: Option<Trial>, cand: Trial) -> Option<Trial> {
    match best {
        Some(b) if !(cand.ev.value < b.ev.value) => Some(b),
        _ => Some(cand),
    }
}

/// Backtracking search against the relaxed nonmonotone decrease test.
///
/// `memory` supplies the reference max; the slack `eta_k` is computed by the
/// caller so that one search does not need to know the iteration index.
pub fn nonmonotone_search<O: ObjectiveOracle>(
    oracle: &O,
    x: &[f64],
    memory: &FunctionMemory,
    g: &[f64],
    d: &[f64],
    eta_k: f64,
    params: &NonmonotoneParams,
) -> LineSearchOutcome {
    let gd = dot(g, d);
    let fmax = memory.max();
    let mut alpha = 1.0;
    let mut evals = 0u32;
    let mut best: Option<Trial> = None;
    loop {
        let x_trial = axpy(alpha, d, x);
        let ev = oracle.evaluate(&x_trial);
        evals += 1;
        let trial = Trial { alpha, x: x_trial, ev };
        if trial.ev.value <= fmax + params.gamma * alpha * gd + eta_k {
            return outcome(trial, evals, true);
        }
        best = better(best, trial);
        alpha *= params.backtrack;
        if alpha < params.alpha_min {
            return outcome(best.expect("at least one trial"), evals, false);
        }
    }
}

/// Bracketing Wolfe search with bisection refinement, starting at alpha = 1.
///
/// `f0` and `g0` are the value and subgradient at `x`; passing them in
/// avoids re-evaluating a point the caller already knows.
pub fn wolfe_search<O: ObjectiveOracle>(
    oracle: &O,
    x: &[f64],
    f0: f64,
    g0: &[f64],
    d: &[f64],
    params: &WolfeParams,
) -> LineSearchOutcome {
    let gd0 = dot(g0, d);
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    let mut alpha = 1.0f64;
    let mut evals = 0u32;
    let mut best: Option<Trial> = None;
    while evals < params.max_evals {
        let x_trial = axpy(alpha, d, x);
        let ev = oracle.evaluate(&x_trial);
        evals += 1;
        let trial = Trial { alpha, x: x_trial, ev };
        if trial.ev.value <= f0 + params.gamma * alpha * gd0 {
            if dot(&trial.ev.subgradient, d) >= params.sigma * gd0 {
                return outcome(trial, evals, true);
            }
            // Decrease is fine but the slope is still too negative: step past.
            lo = alpha;
        } else {
            hi = alpha;
        }
        best = better(best, trial);
        alpha = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * alpha };
        if hi.is_finite() && hi - lo <= f64::EPSILON * hi.max(1.0) {
            break; // bracket collapsed without satisfying curvature
        }
    }
    outcome(best.expect("at least one trial"), evals, false)
}
