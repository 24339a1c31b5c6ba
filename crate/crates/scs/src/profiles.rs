//! Performance profiles over a problems x solvers results table.
//!
//! For each problem the best (smallest) metric value among the solvers that
//! solved it sets the baseline; every solver's ratio to that baseline feeds a
//! per-solver cumulative curve `rho_s(tau)` = fraction of problems solved
//! within a factor `tau` of the best. Curves start at the fraction of
//! problems where the solver was (tied-)best and reach 1 at `tau = r_M` only
//! if it solved everything. Failed entries are parked at `r_M`, strictly to
//! the right of all finite ratios, so they never look solved before the end
//! of the axis.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use thiserror::Error;

/// Metric values are clamped below at this floor before ratios are formed,
/// so a solver that lands exactly on the optimum (error 0) does not divide
/// by zero.
pub const METRIC_FLOOR: f64 = 1e-16;

/// Resolution of the tau axis: geometric grid in `[1, r_M]`.
pub const TAU_POINTS: usize = 512;

/// Benchmark runs count as solved below this error.
pub const SOLVED_THRESHOLD: f64 = 1e-1;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("empty results table")]
    Empty,
    #[error("results table shape does not match its problem/solver lists")]
    Shape,
    #[error("negative metric for problem `{problem}`, solver `{solver}`")]
    NegativeMetric { problem: String, solver: String },
    #[error("missing result for problem `{problem}`, solver `{solver}`")]
    MissingCell { problem: String, solver: String },
    #[error("duplicate result for problem `{problem}`, solver `{solver}`")]
    DuplicateCell { problem: String, solver: String },
    #[error("metric `{metric}` needs the `{column}` column, which the results lack")]
    MissingColumn { metric: &'static str, column: &'static str },
}

/// Raw study results: `metric[p][s]` is the performance measure of solver
/// `s` on problem `p` (smaller is better), `solved[p][s]` whether that run
/// counts.
#[derive(Clone, Debug)]
pub struct ResultsTable {
    pub problems: Vec<String>,
    pub solvers: Vec<String>,
    pub metric: Vec<Vec<f64>>,
    pub solved: Vec<Vec<bool>>,
}

impl ResultsTable {
    fn validate(&self) -> Result<(), ProfileError> {
        if self.problems.is_empty() || self.solvers.is_empty() {
            return Err(ProfileError::Empty);
        }
        let ns = self.solvers.len();
        let rows_ok = self.metric.len() == self.problems.len()
            && self.solved.len() == self.problems.len()
            && self.metric.iter().all(|r| r.len() == ns)
            && self.solved.iter().all(|r| r.len() == ns);
        if !rows_ok {
            return Err(ProfileError::Shape);
        }
        for (p, row) in self.metric.iter().enumerate() {
            for (s, &t) in row.iter().enumerate() {
                if t < 0.0 || !t.is_finite() {
                    return Err(ProfileError::NegativeMetric {
                        problem: self.problems[p].clone(),
                        solver: self.solvers[s].clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Ratios `r[p][s] = t[p][s] / best solved t in row p`, with unsolved
/// entries set to `r_M`. When every run solved, `r_M` is the largest ratio
/// itself; with failures present it is inflated by 5% so failures sit
/// strictly right of every finite ratio. A row nobody solved is all `r_M`.
pub fn performance_ratios(table: &ResultsTable) -> Result<(Vec<Vec<f64>>, f64), ProfileError> {
    table.validate()?;
    let n_s = table.solvers.len();
    // Baseline per row; None when the row is all-failed.
    let best: Vec<Option<f64>> = table
        .metric
        .iter()
        .zip(&table.solved)
        .map(|(row, ok)| {
            row.iter()
                .zip(ok)
                .filter(|(_, &solved)| solved)
                .map(|(&t, _)| t.max(METRIC_FLOOR))
                .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |b| b.min(t))))
        })
        .collect();

    let mut any_failure = false;
    let mut max_ratio = 1.0_f64;
    let mut ratios = vec![vec![f64::NAN; n_s]; table.problems.len()];
    for (p, row) in table.metric.iter().enumerate() {
        for s in 0..n_s {
            if table.solved[p][s] {
                let b = best[p].expect("solved entry implies a row baseline");
                let r = row[s].max(METRIC_FLOOR) / b;
                ratios[p][s] = r;
                max_ratio = max_ratio.max(r);
            } else {
                any_failure = true;
            }
        }
    }
    let r_m = if any_failure { max_ratio * 1.05 } else { max_ratio };
    for row in &mut ratios {
        for r in row {
            if r.is_nan() {
                *r = r_m;
            }
        }
    }
    Ok((ratios, r_m))
}

/// Fraction of problems solver `s` brings within a factor `tau` of the best,
/// for each grid value.
pub fn profile_curve(ratios: &[Vec<f64>], s: usize, tau_grid: &[f64]) -> Vec<f64> {
    let n_p = ratios.len();
    tau_grid
        .iter()
        .map(|&tau| ratios.iter().filter(|row| row[s] <= tau).count() as f64 / n_p as f64)
        .collect()
}

/// Geometric grid of [`TAU_POINTS`] values spanning `[1, r_M]` with exact
/// endpoints.
pub fn tau_grid(r_m: f64) -> Vec<f64> {
    let last = TAU_POINTS - 1;
    (0..TAU_POINTS)
        .map(|i| {
            if i == 0 {
                1.0
            } else if i == last {
                r_m
            } else {
                r_m.powf(i as f64 / last as f64)
            }
        })
        .collect()
}

/// Evaluated profile: one curve per solver over the shared `tau` grid.
#[derive(Clone, Debug)]
pub struct Profile {
    pub solvers: Vec<String>,
    pub r_m: f64,
    pub tau: Vec<f64>,
    pub rho: Vec<Vec<f64>>,
}

pub fn compute_profile(table: &ResultsTable) -> Result<Profile, ProfileError> {
    let (ratios, r_m) = performance_ratios(table)?;
    let tau = tau_grid(r_m);
    let rho = (0..table.solvers.len()).map(|s| profile_curve(&ratios, s, &tau)).collect();
    Ok(Profile { solvers: table.solvers.clone(), r_m, tau, rho })
}

/// Which column of a results table feeds the profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileMetric {
    /// Benchmark error vs. the known optimum; solved below [`SOLVED_THRESHOLD`].
    Error,
    /// Function evaluations spent reaching the best value.
    Evals,
    /// Wall-clock seconds (recorded for completeness, hardware-dependent).
    Cpu,
    /// Lowest objective value; solved within 10% of the best found, for
    /// problems whose true optimum is unknown.
    FMin,
}

impl ProfileMetric {
    pub fn code(self) -> &'static str {
        match self {
            ProfileMetric::Error => "error",
            ProfileMetric::Evals => "evals",
            ProfileMetric::Cpu => "cpu",
            ProfileMetric::FMin => "fmin",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "error" => Some(ProfileMetric::Error),
            "evals" => Some(ProfileMetric::Evals),
            "cpu" => Some(ProfileMetric::Cpu),
            "fmin" | "f_min" => Some(ProfileMetric::FMin),
            _ => None,
        }
    }
}

/// One study run, as read from an aggregate results CSV. `error` and
/// `cpu_seconds` are absent for CT runs, where the optimum is unknown and
/// timing is not recorded per scenario.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub problem: String,
    pub solver: String,
    pub f_min: f64,
    pub error: Option<f64>,
    pub evals: Option<f64>,
    pub cpu_seconds: Option<f64>,
}

/// Assemble a [`ResultsTable`] for one metric from a complete run grid.
/// Problems and solvers keep first-appearance order; every pair must appear
/// exactly once.
pub fn table_from_runs(
    runs: &[RunSummary],
    metric: ProfileMetric,
) -> Result<ResultsTable, ProfileError> {
    if runs.is_empty() {
        return Err(ProfileError::Empty);
    }
    let mut problems: Vec<String> = Vec::new();
    let mut solvers: Vec<String> = Vec::new();
    for run in runs {
        if !problems.contains(&run.problem) {
            problems.push(run.problem.clone());
        }
        if !solvers.contains(&run.solver) {
            solvers.push(run.solver.clone());
        }
    }
    let mut grid: Vec<Vec<Option<&RunSummary>>> = vec![vec![None; solvers.len()]; problems.len()];
    for run in runs {
        let p = problems.iter().position(|x| x == &run.problem).unwrap();
        let s = solvers.iter().position(|x| x == &run.solver).unwrap();
        if grid[p][s].is_some() {
            return Err(ProfileError::DuplicateCell {
                problem: run.problem.clone(),
                solver: run.solver.clone(),
            });
        }
        grid[p][s] = Some(run);
    }

    let mut metric_rows = Vec::with_capacity(problems.len());
    let mut solved_rows = Vec::with_capacity(problems.len());
    for (p, row) in grid.iter().enumerate() {
        let mut t_row = Vec::with_capacity(solvers.len());
        let mut ok_row = Vec::with_capacity(solvers.len());
        for (s, cell) in row.iter().enumerate() {
            let run = cell.ok_or_else(|| ProfileError::MissingCell {
                problem: problems[p].clone(),
                solver: solvers[s].clone(),
            })?;
            let t = match metric {
                ProfileMetric::Error => run
                    .error
                    .ok_or(ProfileError::MissingColumn { metric: "error", column: "error" })?
                    .max(METRIC_FLOOR),
                ProfileMetric::Evals => run
                    .evals
                    .ok_or(ProfileError::MissingColumn { metric: "evals", column: "evals" })?,
                ProfileMetric::Cpu => run.cpu_seconds.ok_or(ProfileError::MissingColumn {
                    metric: "cpu",
                    column: "cpu_seconds",
                })?,
                ProfileMetric::FMin => run.f_min,
            };
            let solved = match metric {
                ProfileMetric::FMin => true, // placeholder, filled below
                _ => {
                    run.error
                        .ok_or(ProfileError::MissingColumn { metric: metric.code(), column: "error" })?
                        < SOLVED_THRESHOLD
                }
            };
            t_row.push(t);
            ok_row.push(solved);
        }
        if metric == ProfileMetric::FMin {
            // Within 10% of the lowest value found for this problem.
            let best = t_row.iter().cloned().fold(f64::INFINITY, f64::min);
            for (t, ok) in t_row.iter().zip(&mut ok_row) {
                *ok = *t <= best + 0.1 * best.abs();
            }
        }
        metric_rows.push(t_row);
        solved_rows.push(ok_row);
    }
    let table = ResultsTable { problems, solvers, metric: metric_rows, solved: solved_rows };
    table.validate()?;
    Ok(table)
}

/// CSV with one row per tau grid point: `log2_tau, <solver>, ...`. Floats
/// are printed in shortest round-trip form, so identical profiles yield
/// byte-identical files.
pub fn write_profile_csv(path: &Path, profile: &Profile) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["log2_tau".to_string()];
    header.extend(profile.solvers.iter().cloned());
    w.write_record(&header)?;
    for (i, &tau) in profile.tau.iter().enumerate() {
        let mut record = vec![tau.log2().to_string()];
        record.extend(profile.rho.iter().map(|curve| curve[i].to_string()));
        w.write_record(&record)?;
    }
    w.flush()
}

const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

const PLOT_LEFT: f64 = 62.0;
const PLOT_RIGHT: f64 = 600.0;
const PLOT_TOP: f64 = 42.0;
const PLOT_BOTTOM: f64 = 432.0;

/// Self-contained SVG line chart of the profile curves (log2 tau axis,
/// fixed palette, legend on the right). Fully deterministic output.
pub fn write_profile_svg(path: &Path, profile: &Profile, title: &str) -> io::Result<()> {
    let span = profile.r_m.log2().max(1e-9);
    let x_of = |tau: f64| PLOT_LEFT + (tau.log2() / span) * (PLOT_RIGHT - PLOT_LEFT);
    let y_of = |rho: f64| PLOT_BOTTOM - rho * (PLOT_BOTTOM - PLOT_TOP);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"780\" height=\"480\" \
         font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(svg, "<rect width=\"780\" height=\"480\" fill=\"white\"/>");
    let _ = writeln!(svg, "<text x=\"{PLOT_LEFT}\" y=\"24\" font-size=\"15\">{title}</text>");
    // Frame and grid.
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let y = y_of(frac);
        let _ = writeln!(
            svg,
            "<line x1=\"{PLOT_LEFT}\" y1=\"{y:.4}\" x2=\"{PLOT_RIGHT}\" y2=\"{y:.4}\" \
             stroke=\"#dddddd\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.4}\" y=\"{:.4}\" text-anchor=\"end\">{frac:.2}</text>",
            PLOT_LEFT - 8.0,
            y + 4.0
        );
        let x = PLOT_LEFT + frac * (PLOT_RIGHT - PLOT_LEFT);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.4}\" y1=\"{PLOT_TOP}\" x2=\"{x:.4}\" y2=\"{PLOT_BOTTOM}\" \
             stroke=\"#dddddd\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.4}\" y=\"{:.4}\" text-anchor=\"middle\">{:.2}</text>",
            PLOT_BOTTOM + 18.0,
            frac * profile.r_m.log2()
        );
    }
    let _ = writeln!(
        svg,
        "<rect x=\"{PLOT_LEFT}\" y=\"{PLOT_TOP}\" width=\"{:.4}\" height=\"{:.4}\" \
         fill=\"none\" stroke=\"black\"/>",
        PLOT_RIGHT - PLOT_LEFT,
        PLOT_BOTTOM - PLOT_TOP
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.4}\" y=\"468\" text-anchor=\"middle\">log2(tau)</text>",
        (PLOT_LEFT + PLOT_RIGHT) / 2.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{:.4}\" transform=\"rotate(-90 16 {:.4})\" \
         text-anchor=\"middle\">fraction of problems</text>",
        (PLOT_TOP + PLOT_BOTTOM) / 2.0,
        (PLOT_TOP + PLOT_BOTTOM) / 2.0
    );
    // Step-rendered curves.
    for (s, curve) in profile.rho.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        let mut points = String::new();
        for (i, (&tau, &rho)) in profile.tau.iter().zip(curve).enumerate() {
            let x = x_of(tau);
            if i > 0 {
                let _ = write!(points, "{x:.4},{:.4} ", y_of(curve[i - 1]));
            }
            let _ = write!(points, "{x:.4},{:.4} ", y_of(rho));
        }
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            points.trim_end()
        );
    }
    // Legend.
    for (s, name) in profile.solvers.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        let y = PLOT_TOP + 14.0 + 20.0 * s as f64;
        let _ = writeln!(
            svg,
            "<line x1=\"616\" y1=\"{y:.4}\" x2=\"644\" y2=\"{y:.4}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>"
        );
        let _ = writeln!(svg, "<text x=\"650\" y=\"{:.4}\">{name}</text>", y + 4.0);
    }
    let _ = writeln!(svg, "</svg>");
    std::fs::write(path, svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use tempfile::tempdir;

    fn names(prefix: &str, k: usize) -> Vec<String> {
        (0..k).map(|i| format!("{prefix}{i}")).collect()
    }

    fn two_by_two() -> ResultsTable {
        ResultsTable {
            problems: names("p", 2),
            solvers: names("s", 2),
            metric: vec![vec![1.0, 2.0], vec![3.0, 1.0]],
            solved: vec![vec![true, true], vec![true, true]],
        }
    }

    #[test]
    fn hand_worked_two_by_two_table() {
        let (r, r_m) = performance_ratios(&two_by_two()).unwrap();
        assert_eq!(r, vec![vec![1.0, 2.0], vec![3.0, 1.0]]);
        assert_eq!(r_m, 3.0);
        assert_eq!(profile_curve(&r, 0, &[1.0]), vec![0.5]);
        assert_eq!(profile_curve(&r, 1, &[1.0]), vec![0.5]);
        assert_eq!(profile_curve(&r, 0, &[r_m]), vec![1.0]);
        assert_eq!(profile_curve(&r, 1, &[r_m]), vec![1.0]);
    }

    #[test]
    fn single_solver_is_its_own_baseline() {
        let table = ResultsTable {
            problems: names("p", 3),
            solvers: vec!["only".into()],
            metric: vec![vec![5.0], vec![0.1], vec![42.0]],
            solved: vec![vec![true]; 3],
        };
        let (r, r_m) = performance_ratios(&table).unwrap();
        assert!(r.iter().all(|row| row == &[1.0]));
        assert_eq!(r_m, 1.0);
    }

    #[test]
    fn failures_are_parked_at_r_m() {
        let table = ResultsTable {
            problems: vec!["p0".into()],
            solvers: names("s", 2),
            metric: vec![vec![1.0, 7.0]],
            solved: vec![vec![true, false]],
        };
        let (r, r_m) = performance_ratios(&table).unwrap();
        assert_eq!(r_m, 1.05); // max finite ratio 1, inflated by 5%
        assert_eq!(r, vec![vec![1.0, 1.05]]);
        // The failed solver stays at zero until the very end of the axis.
        assert_eq!(profile_curve(&r, 1, &[1.0, 1.04, r_m]), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn a_row_nobody_solved_is_all_r_m() {
        let table = ResultsTable {
            problems: names("p", 2),
            solvers: names("s", 2),
            metric: vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            solved: vec![vec![true, true], vec![false, false]],
        };
        let (r, r_m) = performance_ratios(&table).unwrap();
        assert_eq!(r_m, 2.0 * 1.05);
        assert_eq!(r[1], vec![r_m, r_m]);
    }

    #[test]
    fn negative_metric_is_rejected_by_name() {
        let mut table = two_by_two();
        table.metric[1][0] = -0.5;
        let err = performance_ratios(&table).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("p1") && msg.contains("s0"), "{msg}");
    }

    #[test]
    fn curves_are_nondecreasing_within_unit_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let table = ResultsTable {
                problems: names("p", 6),
                solvers: names("s", 4),
                metric: (0..6)
                    .map(|_| (0..4).map(|_| rng.random_range(0.01..100.0)).collect())
                    .collect(),
                solved: (0..6).map(|_| (0..4).map(|_| rng.random_range(0.0..1.0) < 0.8).collect()).collect(),
            };
            let profile = compute_profile(&table).unwrap();
            for curve in &profile.rho {
                for w in curve.windows(2) {
                    assert!(w[0] <= w[1]);
                }
                assert!(curve.iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
        }
    }

    #[test]
    fn ratios_are_invariant_under_row_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let base: Vec<Vec<f64>> =
                (0..5).map(|_| (0..3).map(|_| rng.random_range(0.5..50.0)).collect()).collect();
            let solved: Vec<Vec<bool>> =
                (0..5).map(|_| (0..3).map(|_| rng.random_range(0.0..1.0) < 0.9).collect()).collect();
            let table = ResultsTable {
                problems: names("p", 5),
                solvers: names("s", 3),
                metric: base.clone(),
                solved: solved.clone(),
            };
            // Powers of two scale rows exactly in binary floating point.
            let scales = [0.25, 0.5, 2.0, 8.0, 64.0];
            let scaled = ResultsTable {
                problems: names("p", 5),
                solvers: names("s", 3),
                metric: base
                    .iter()
                    .enumerate()
                    .map(|(p, row)| row.iter().map(|t| t * scales[p]).collect())
                    .collect(),
                solved,
            };
            let (r1, rm1) = performance_ratios(&table).unwrap();
            let (r2, rm2) = performance_ratios(&scaled).unwrap();
            assert_eq!(r1, r2);
            assert_eq!(rm1, rm2);
        }
    }

    #[test]
    fn tau_grid_spans_one_to_r_m() {
        let grid = tau_grid(3.0);
        assert_eq!(grid.len(), TAU_POINTS);
        assert_eq!(grid[0], 1.0);
        assert_eq!(*grid.last().unwrap(), 3.0);
        assert!(grid.windows(2).all(|w| w[0] <= w[1]));
        let flat = tau_grid(1.0);
        assert!(flat.iter().all(|&t| t == 1.0));
    }

    fn run(problem: &str, solver: &str, f_min: f64, error: f64, evals: f64) -> RunSummary {
        RunSummary {
            problem: problem.into(),
            solver: solver.into(),
            f_min,
            error: Some(error),
            evals: Some(evals),
            cpu_seconds: Some(0.5),
        }
    }

    #[test]
    fn bench_solved_flag_follows_the_error_threshold() {
        let runs = vec![run("p", "a", 0.1, 0.05, 10.0), run("p", "b", 0.2, 0.1, 20.0)];
        let table = table_from_runs(&runs, ProfileMetric::Evals).unwrap();
        assert_eq!(table.solved, vec![vec![true, false]]); // 0.1 is not < 0.1
        assert_eq!(table.metric, vec![vec![10.0, 20.0]]);
    }

    #[test]
    fn zero_error_is_clamped_to_the_floor() {
        let runs = vec![run("p", "a", 0.0, 0.0, 10.0), run("p", "b", 0.0, 1e-3, 20.0)];
        let table = table_from_runs(&runs, ProfileMetric::Error).unwrap();
        assert_eq!(table.metric[0][0], METRIC_FLOOR);
        let (r, _) = performance_ratios(&table).unwrap();
        assert!(r[0][1].is_finite() && r[0][1] > 1.0);
    }

    #[test]
    fn ten_percent_rule_marks_near_best_f_min_solved() {
        let runs = vec![
            run("scan", "a", 1.0, 0.0, 1.0),
            run("scan", "b", 1.05, 0.0, 1.0),
            run("scan", "c", 1.2, 0.0, 1.0),
        ];
        let table = table_from_runs(&runs, ProfileMetric::FMin).unwrap();
        assert_eq!(table.solved, vec![vec![true, true, false]]);
    }

    #[test]
    fn incomplete_grids_name_the_missing_pair() {
        let runs = vec![
            run("p0", "a", 1.0, 0.0, 1.0),
            run("p0", "b", 1.0, 0.0, 1.0),
            run("p1", "a", 1.0, 0.0, 1.0),
        ];
        let err = table_from_runs(&runs, ProfileMetric::Error).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("p1") && msg.contains('b'), "{msg}");
        let dup = vec![run("p0", "a", 1.0, 0.0, 1.0), run("p0", "a", 1.0, 0.0, 1.0)];
        assert!(matches!(
            table_from_runs(&dup, ProfileMetric::Error).unwrap_err(),
            ProfileError::DuplicateCell { .. }
        ));
    }

    #[test]
    fn missing_columns_are_reported_per_metric() {
        let runs = vec![RunSummary {
            problem: "scan".into(),
            solver: "a".into(),
            f_min: 1.0,
            error: None,
            evals: Some(4.0),
            cpu_seconds: None,
        }];
        assert!(matches!(
            table_from_runs(&runs, ProfileMetric::Cpu).unwrap_err(),
            ProfileError::MissingColumn { column: "cpu_seconds", .. }
        ));
        assert!(table_from_runs(&runs, ProfileMetric::FMin).is_ok());
    }

    #[test]
    fn csv_and_svg_emission_are_deterministic() {
        let profile = compute_profile(&two_by_two()).unwrap();
        let dir = tempdir().unwrap();
        let csv_path = dir.path().join("profile_error.csv");
        write_profile_csv(&csv_path, &profile).unwrap();
        let text = std::fs::read_to_string(&csv_path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "log2_tau,s0,s1");
        assert_eq!(text.lines().count(), 1 + TAU_POINTS);

        let svg_path = dir.path().join("profile_error.svg");
        write_profile_svg(&svg_path, &profile, "error profile").unwrap();
        let first = std::fs::read(&svg_path).unwrap();
        write_profile_svg(&svg_path, &profile, "error profile").unwrap();
        let second = std::fs::read(&svg_path).unwrap();
        assert_eq!(first, second);
        let body = String::from_utf8(first).unwrap();
        assert_eq!(body.matches("<polyline").count(), 2);
        assert!(body.contains("</svg>"));
    }
}
