//! The spectral conjugate subgradient iteration.
//!
//! State after iteration k: point `x`, value `f`, subgradient `g`, search
//! direction `d`. One iteration runs the line search along `d`, then from
//! the step `s = x_new - x` and subgradient change `y = g_new - g` builds
//!
//! ```text
//! theta = safeguarded s's / s'y          (spectral step)
//! beta  = one of four conjugacy formulas
//! d_new = -theta g_new + beta s
//! ```
//!
//! and keeps `d_new` only if it is a genuine descent direction
//! (`d'g <= -tol ||d|| ||g||`); otherwise it restarts with the scaled
//! subgradient `-theta g_new`. An optional band rescaling clamps accepted
//! directions into `mu_lo ||g|| <= ||d|| <= nu_hi`, and an optional box
//! projection keeps iterates of constrained problems inside `[0, 1]^n` by
//! projecting every direction the line search sees.

use std::time::Instant;

use serde::Serialize;

use crate::linesearch::{
    eta, nonmonotone_search, wolfe_search, FunctionMemory, LineSearchOutcome, NonmonotoneParams,
    WolfeParams,
};
use crate::oracle::{CountingOracle, ObjectiveOracle};
use crate::vector::{dot, norm, scale, sub};

/// Conjugacy correction applied on top of the scaled subgradient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BetaRule {
    /// beta = 0: the plain spectral subgradient method.
    Zero,
    /// Perry: `(theta y - s)'g_new / s'y`.
    Perry,
    /// Polak-Ribiere analogue: `theta y'g_new / (alpha theta_prev g'g)`.
    PolakRibiere,
    /// Fletcher-Reeves analogue: `theta g_new'g_new / (alpha theta_prev g'g)`.
    FletcherReeves,
}

impl BetaRule {
    /// Short identifier used in solver codes and output tables.
    pub fn code(self) -> &'static str {
        match self {
            BetaRule::Zero => "b0",
            BetaRule::Perry => "b1",
            BetaRule::PolakRibiere => "b2",
            BetaRule::FletcherReeves => "b3",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "b0" => Some(BetaRule::Zero),
            "b1" => Some(BetaRule::Perry),
            "b2" => Some(BetaRule::PolakRibiere),
            "b3" => Some(BetaRule::FletcherReeves),
            _ => None,
        }
    }
}

/// Which step-length rule globalizes the iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LineSearch {
    Nonmonotone,
    Wolfe,
}

impl LineSearch {
    pub fn code(self) -> &'static str {
        match self {
            LineSearch::Nonmonotone => "nm",
            LineSearch::Wolfe => "w",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "nm" => Some(LineSearch::Nonmonotone),
            "w" => Some(LineSearch::Wolfe),
            _ => None,
        }
    }
}

/// Norm band for the optional direction rescaling.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RescaleBand {
    pub mu_lo: f64,
    pub nu_hi: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScsConfig {
    pub beta: BetaRule,
    pub line_search: LineSearch,
    /// Nonmonotone memory M.
    pub memory: usize,
    /// Sufficient-decrease coefficient for both searches.
    pub gamma: f64,
    /// Wolfe curvature coefficient.
    pub sigma: f64,
    /// Backtracking factor of the nonmonotone search.
    pub sigma_bt: f64,
    /// Nonmonotone failure threshold on alpha.
    pub alpha_min: f64,
    /// Safeguard bounds for the spectral step.
    pub theta_min: f64,
    pub theta_max: f64,
    pub max_iter: usize,
    /// Descent test tolerance in the keep-or-restart decision.
    pub restart_tol: f64,
    /// Stop once ||g|| falls to this; 0 keeps running to max_iter unless an
    /// exactly zero subgradient shows up.
    pub grad_norm_stop: f64,
    /// Clamp accepted direction norms into a band around ||g||.
    pub rescale: Option<RescaleBand>,
    /// Project iterates and directions into the box [0, 1]^n.
    pub box_constrain: bool,
}

impl Default for ScsConfig {
    fn default() -> Self {
        ScsConfig {
            beta: BetaRule::Zero,
            line_search: LineSearch::Nonmonotone,
            memory: 7,
            gamma: 1e-4,
            sigma: 0.9,
            sigma_bt: 0.5,
            alpha_min: 1e-16,
            theta_min: 1e-10,
            theta_max: 1e10,
            max_iter: 1000,
            restart_tol: 1e-3,
            grad_norm_stop: 0.0,
            rescale: None,
            box_constrain: false,
        }
    }
}

/// Per-iteration log line. `f` and `grad_norm` describe the point accepted
/// by iteration `k`; `fevals` is the cumulative oracle-call count at the end
/// of the iteration.
#[derive(Clone, Debug, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub f: f64,
    pub alpha: f64,
    pub theta: f64,
    pub beta: f64,
    pub restarted: bool,
    pub grad_norm: f64,
    pub fevals: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    /// Best objective value seen over the initial point and all accepted
    /// iterates, and a point attaining it.
    pub f_min: f64,
    pub x_best: Vec<f64>,
    pub f_initial: f64,
    pub iterations: usize,
    /// Total oracle calls over the whole run.
    pub fevals: u64,
    /// Cumulative oracle calls at the moment f_min was first attained.
    pub evals_to_best: u64,
    pub history: Vec<IterationRecord>,
    pub wall_seconds: f64,
}

/// Safeguarded spectral step from `s = x_new - x`, `y = g_new - g`.
///
/// Positive curvature gives the Barzilai-Borwein quotient clamped into
/// `[theta_min, theta_max]`; zero or negative curvature falls back to
/// `1 / ||s||` capped by `theta_max`. Callers must handle `||s|| = 0`
/// themselves (this function would divide by zero).
pub fn spectral_theta(s: &[f64], y: &[f64], theta_min: f64, theta_max: f64) -> f64 {
    let ss = dot(s, s);
    let sy = dot(s, y);
    if sy <= 0.0 {
        theta_max.min(1.0 / ss.sqrt())
    } else {
        theta_max.min(theta_min.max(ss / sy))
    }
}

/// Conjugacy coefficient for the chosen rule.
///
/// Degenerate denominators return 0, which collapses the direction to the
/// plain scaled subgradient: Perry when `s'y = 0`, the quotient rules when
/// `g = 0` (a run that hits `g = 0` stops anyway).
pub fn beta(
    rule: BetaRule,
    theta: f64,
    theta_prev: f64,
    alpha: f64,
    s: &[f64],
    y: &[f64],
    g: &[f64],
    g_next: &[f64],
) -> f64 {
    match rule {
        BetaRule::Zero => 0.0,
        BetaRule::Perry => {
            let sy = dot(s, y);
            if sy == 0.0 {
                0.0
            } else {
                let ty_minus_s: Vec<f64> = s.iter().zip(y).map(|(si, yi)| theta * yi - si).collect();
                dot(&ty_minus_s, g_next) / sy
            }
        }
        BetaRule::PolakRibiere => {
            let denom = alpha * theta_prev * dot(g, g);
            if denom == 0.0 {
                0.0
            } else {
                theta * dot(y, g_next) / denom
            }
        }
        BetaRule::FletcherReeves => {
            let denom = alpha * theta_prev * dot(g, g);
            if denom == 0.0 {
                0.0
            } else {
                theta * dot(g_next, g_next) / denom
            }
        }
    }
}

/// `-theta g_next + beta s`.
pub fn direction(theta: f64, g_next: &[f64], beta: f64, s: &[f64]) -> Vec<f64> {
    g_next.iter().zip(s).map(|(gi, si)| -theta * gi + beta * si).collect()
}

/// Keep `d` if it passes the descent test `d'g <= -tol ||d|| ||g||`,
/// otherwise restart with the scaled subgradient `-theta g_next`. The
/// returned flag records a restart. A zero direction always restarts.
pub fn restart_or_accept(d: Vec<f64>, g_next: &[f64], theta: f64, tol: f64) -> (Vec<f64>, bool) {
    let dn = norm(&d);
    let gn = norm(g_next);
    if dn > 0.0 && dot(&d, g_next) <= -tol * dn * gn {
        (d, false)
    } else {
        (scale(-theta, g_next), true)
    }
}

/// Clamp an accepted direction's norm into `[mu_lo ||g||, nu_hi]`.
///
/// Pure rescaling: the direction keeps its orientation, so the descent test
/// it already passed still holds.
pub fn rescale_direction(d: Vec<f64>, g: &[f64], mu_lo: f64, nu_hi: f64) -> Vec<f64> {
    assert!(mu_lo > 0.0 && nu_hi > 0.0, "rescale_direction: band bounds must be positive");
    let dn = norm(&d);
    if dn == 0.0 {
        return d;
    }
    let floor = mu_lo * norm(g);
    if dn > nu_hi {
        scale(nu_hi / dn, &d)
    } else if dn < floor {
        scale(floor / dn, &d)
    } else {
        d
    }
}

/// Euclidean projection onto the box `[0, 1]^n`.
pub fn box_project_point(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v.clamp(0.0, 1.0)).collect()
}

/// Feasible direction for box-constrained runs: `P(x + d) - x`.
///
/// `x` must already be (numerically) inside the box; anything further out
/// than rounding error is a caller bug.
pub fn project_direction(x: &[f64], d: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), d.len(), "project_direction: dimension mismatch");
    assert!(
        x.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)),
        "project_direction: point outside the unit box"
    );
    x.iter().zip(d).map(|(&xi, &di)| (xi + di).clamp(0.0, 1.0) - xi.clamp(0.0, 1.0)).collect()
}

fn run_search<O: ObjectiveOracle>(
    oracle: &CountingOracle<O>,
    x: &[f64],
    memory: &FunctionMemory,
    f: f64,
    g: &[f64],
    d: &[f64],
    eta_k: f64,
    cfg: &ScsConfig,
) -> LineSearchOutcome {
    match cfg.line_search {
        LineSearch::Nonmonotone => {
            let params = NonmonotoneParams {
                memory: cfg.memory,
                gamma: cfg.gamma,
                backtrack: cfg.sigma_bt,
                alpha_min: cfg.alpha_min,
            };
            nonmonotone_search(oracle, x, memory, g, d, eta_k, &params)
        }
        LineSearch::Wolfe => {
            let params = WolfeParams { gamma: cfg.gamma, sigma: cfg.sigma, max_evals: 50 };
            wolfe_search(oracle, x, f, g, d, &params)
        }
    }
}

/// Run the iteration from `x0` until `max_iter`, a subgradient-norm stop, or
/// an unrecoverable line-search failure. Counts on `oracle` accumulate
/// across the run; pass a fresh wrapper for clean statistics.
pub fn solve<O: ObjectiveOracle>(
    oracle: &CountingOracle<O>,
    x0: &[f64],
    cfg: &ScsConfig,
) -> SolveResult {
    assert_eq!(x0.len(), oracle.dim(), "solve: x0 has wrong dimension");
    if cfg.box_constrain {
        assert!(
            x0.iter().all(|&v| (0.0..=1.0).contains(&v)),
            "solve: box-constrained run needs a feasible starting point"
        );
    }
    let start = Instant::now();

    let mut x = x0.to_vec();
    let ev0 = oracle.evaluate(&x);
    let f0 = ev0.value;
    let mut f = f0;
    let mut g = ev0.subgradient;
    let eta0 = f0.max(norm(&g));

    let mut memory = FunctionMemory::new(cfg.memory);
    memory.push(f0);

    let mut f_best = f0;
    let mut x_best = x.clone();
    let mut evals_to_best = oracle.function_evals();

    let mut theta_prev = 1.0;
    let mut d = scale(-1.0, &g);
    if cfg.box_constrain {
        d = project_direction(&x, &d);
    }

    let mut history: Vec<IterationRecord> = Vec::new();

    for k in 0..cfg.max_iter {
        if norm(&g) <= cfg.grad_norm_stop {
            break;
        }
        let eta_k = if k == 0 { eta0 } else { eta(k, eta0) };

        let mut restarted = false;
        let mut out = run_search(oracle, &x, &memory, f, &g, &d, eta_k, cfg);
        if !out.accepted {
            // Fall back to the scaled subgradient, then once more with the
            // step bound halved (searching along d/2 is the same as halving
            // every trial alpha). Still failing means we stop with what we
            // have.
            restarted = true;
            d = scale(-theta_prev, &g);
            if cfg.box_constrain {
                d = project_direction(&x, &d);
            }
            out = run_search(oracle, &x, &memory, f, &g, &d, eta_k, cfg);
            if !out.accepted {
                d = scale(0.5, &d);
                out = run_search(oracle, &x, &memory, f, &g, &d, eta_k, cfg);
                if !out.accepted {
                    break;
                }
            }
        }

        let alpha = out.alpha;
        let x_next = out.x_new;
        let f_next = out.f_new;
        let g_next = out.g_new;
        let s = sub(&x_next, &x);
        let y = sub(&g_next, &g);
        let s_norm = norm(&s);

        // A zero step keeps the previous spectral estimate alive.
        let theta = if s_norm == 0.0 {
            theta_prev
        } else {
            spectral_theta(&s, &y, cfg.theta_min, cfg.theta_max)
        };
        debug_assert!(theta > 0.0 && theta <= cfg.theta_max, "theta out of range: {theta}");

        let g_next_norm = norm(&g_next);
        let beta_k;
        let mut d_next;
        if s_norm == 0.0 || g_next_norm == 0.0 {
            beta_k = 0.0;
            d_next = scale(-theta, &g_next);
            restarted = true;
        } else {
            beta_k = beta(cfg.beta, theta, theta_prev, alpha, &s, &y, &g, &g_next);
            let raw = direction(theta, &g_next, beta_k, &s);
            let kept = restart_or_accept(raw, &g_next, theta, cfg.restart_tol);
            d_next = kept.0;
            restarted = restarted || kept.1;
            if !kept.1 {
                debug_assert!(
                    dot(&d_next, &g_next) <= -cfg.restart_tol * norm(&d_next) * g_next_norm,
                    "kept direction fails the descent test"
                );
                if let Some(band) = cfg.rescale {
                    d_next = rescale_direction(d_next, &g_next, band.mu_lo, band.nu_hi);
                }
            }
        }
        if cfg.box_constrain {
            debug_assert!(
                x_next.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)),
                "iterate escaped the box"
            );
            d_next = project_direction(&x_next, &d_next);
        }

        history.push(IterationRecord {
            k,
            f: f_next,
            alpha,
            theta,
            beta: beta_k,
            restarted,
            grad_norm: g_next_norm,
            fevals: oracle.function_evals(),
        });

        if f_next < f_best {
            f_best = f_next;
            x_best = x_next.clone();
            evals_to_best = oracle.function_evals();
        }

        x = x_next;
        f = f_next;
        g = g_next;
        d = d_next;
        theta_prev = theta;
        memory.push(f);
    }

    SolveResult {
        f_min: f_best,
        x_best,
        f_initial: f0,
        iterations: history.len(),
        fevals: oracle.function_evals(),
        evals_to_best,
        history,
        wall_seconds: start.elapsed().as_secs_f64(),
    }
}
