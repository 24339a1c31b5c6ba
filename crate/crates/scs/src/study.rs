//! Config-driven experiment studies.
//!
//! Two canned studies: a benchmark sweep of the solver variants over the
//! nonsmooth test problems, and a reconstruction sweep over simulated CT
//! scenarios (phantom x scan mode x regularization weight). Both expand a
//! config into a flat run list, execute the runs (in parallel when the
//! `parallel` feature is on), and write per-run artifacts plus aggregate
//! CSVs and performance profiles into an output directory, along with an
//! echo of the effective config.
//!
//! Everything except wall-clock columns is deterministic: rerunning a study
//! with the same config and seed reproduces the result files byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::ct::{self, io as ct_io, metrics, phantom, projector, CtObjective, Geometry, Image, Sinogram};
use crate::oracle::CountingOracle;
use crate::problems::{self, Problem};
use crate::profiles::{self, ProfileMetric, RunSummary};
use crate::solver::{solve, BetaRule, LineSearch, ScsConfig};

/// Study failures split by who is at fault, for process exit codes: bad
/// input (config, ids, file schemas) exits 2, everything else exits 3.
#[derive(Debug, Error)]
pub enum StudyError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl StudyError {
    pub fn exit_code(&self) -> i32 {
        match self {
            StudyError::Usage(_) => 2,
            StudyError::Runtime(_) => 3,
        }
    }
}

impl From<std::io::Error> for StudyError {
    fn from(e: std::io::Error) -> Self {
        StudyError::Runtime(e.to_string())
    }
}

impl From<profiles::ProfileError> for StudyError {
    fn from(e: profiles::ProfileError) -> Self {
        StudyError::Usage(e.to_string())
    }
}

/// A line search paired with a conjugacy rule; the code (`nm_b2`, `w_b0`,
/// ...) names solvers in configs, file names, and result tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverId {
    pub line_search: LineSearch,
    pub beta: BetaRule,
}

const ALL_BETAS: [BetaRule; 4] =
    [BetaRule::Zero, BetaRule::Perry, BetaRule::PolakRibiere, BetaRule::FletcherReeves];

impl SolverId {
    pub fn new(line_search: LineSearch, beta: BetaRule) -> Self {
        SolverId { line_search, beta }
    }

    pub fn code(self) -> String {
        format!("{}_{}", self.line_search.code(), self.beta.code())
    }

    pub fn parse(code: &str) -> Option<Self> {
        let (ls, b) = code.split_once('_')?;
        Some(SolverId {
            line_search: LineSearch::from_code(ls)?,
            beta: BetaRule::from_code(b)?,
        })
    }

    /// All eight variants, nonmonotone block first.
    pub fn all_bench() -> Vec<SolverId> {
        let mut ids = Vec::with_capacity(8);
        for ls in [LineSearch::Nonmonotone, LineSearch::Wolfe] {
            for b in ALL_BETAS {
                ids.push(SolverId::new(ls, b));
            }
        }
        ids
    }

    /// The four nonmonotone variants used for reconstruction runs.
    pub fn all_nonmonotone() -> Vec<SolverId> {
        ALL_BETAS.iter().map(|&b| SolverId::new(LineSearch::Nonmonotone, b)).collect()
    }
}

/// Scan protocol for a CT scenario. Low dose keeps the full view count but
/// noisy data; sparse view keeps clean data but carries its own reduced
/// view count. Codes: `ldPP` (noise as integer percent) and `svVV`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScanMode {
    LowDose { noise: f64 },
    SparseView { views: usize },
}

impl ScanMode {
    pub fn code(self) -> String {
        match self {
            ScanMode::LowDose { noise } => format!("ld{:02}", (noise * 100.0).round() as u32),
            ScanMode::SparseView { views } => format!("sv{views}"),
        }
    }

    pub fn parse(code: &str) -> Option<Self> {
        if let Some(pct) = code.strip_prefix("ld") {
            let pct: u32 = pct.parse().ok()?;
            Some(ScanMode::LowDose { noise: pct as f64 / 100.0 })
        } else if let Some(views) = code.strip_prefix("sv") {
            let views: usize = views.parse().ok()?;
            (views >= 1).then_some(ScanMode::SparseView { views })
        } else {
            None
        }
    }
}

/// Benchmark sweep: every listed solver on every listed problem.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub problems: Vec<String>,
    pub solvers: Vec<SolverId>,
    pub max_iter: usize,
    pub memory: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            problems: Problem::all().iter().map(|p| p.name().to_string()).collect(),
            solvers: SolverId::all_bench(),
            max_iter: 1000,
            memory: 7,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), StudyError> {
        if self.problems.is_empty() || self.solvers.is_empty() {
            return Err(StudyError::Usage("benchmark study needs at least one problem and one solver".into()));
        }
        for name in &self.problems {
            if Problem::by_name(name).is_none() {
                return Err(StudyError::Usage(format!("unknown problem id `{name}`")));
            }
        }
        if self.max_iter == 0 {
            return Err(StudyError::Usage("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn apply_config(&mut self, mut raw: RawConfig) -> Result<(), StudyError> {
        check_kind(&mut raw, "bench")?;
        let _ = raw.take("study.seed"); // benchmark runs draw no random numbers
        if let Some(text) = raw.take("bench.problems") {
            self.problems = split_list(&text);
        }
        if let Some(text) = raw.take("bench.solvers") {
            self.solvers = parse_solvers(&text)?;
        }
        parse_into(&mut raw, "bench.max_iter", &mut self.max_iter)?;
        parse_into(&mut raw, "bench.memory", &mut self.memory)?;
        raw.finish()?;
        self.validate()
    }

    fn echo(&self) -> String {
        format!(
            "[study]\nkind = bench\n\n[bench]\nproblems = {}\nsolvers = {}\nmax_iter = {}\nmemory = {}\n",
            self.problems.join(", "),
            self.solvers.iter().map(|s| s.code()).collect::<Vec<_>>().join(", "),
            self.max_iter,
            self.memory,
        )
    }
}

/// Reconstruction sweep over phantom x mode x regularization weight, one
/// run per solver. Data for a (phantom, mode) pair is simulated once and
/// shared by all weights and solvers.
#[derive(Clone, Debug)]
pub struct CtConfig {
    /// Image side length.
    pub n: usize,
    /// Views for low-dose scans; sparse-view modes carry their own count.
    pub low_dose_views: usize,
    pub n_det: usize,
    pub iterations: usize,
    pub memory: usize,
    pub grad_norm_stop: f64,
    pub solvers: Vec<SolverId>,
    pub phantoms: Vec<String>,
    pub modes: Vec<ScanMode>,
    pub mu_low_dose: Vec<f64>,
    pub mu_sparse_view: Vec<f64>,
    pub base_seed: u64,
}

impl CtConfig {
    /// Full-scale protocol: 400x400 images, 360 low-dose views, wide
    /// detector, all phantoms, all five modes, three weights per mode.
    /// 180 runs; hours of compute.
    pub fn full_scale() -> Self {
        CtConfig {
            n: 400,
            low_dose_views: 360,
            n_det: ct::default_detector_count(400),
            iterations: 200,
            memory: 7,
            grad_norm_stop: 1e-10,
            solvers: SolverId::all_nonmonotone(),
            phantoms: phantom::NAMES.iter().map(|s| s.to_string()).collect(),
            modes: vec![
                ScanMode::LowDose { noise: 0.01 },
                ScanMode::LowDose { noise: 0.05 },
                ScanMode::LowDose { noise: 0.10 },
                ScanMode::SparseView { views: 60 },
                ScanMode::SparseView { views: 30 },
            ],
            mu_low_dose: vec![25.0, 250.0, 2500.0],
            mu_sparse_view: vec![0.5, 5.0, 50.0],
            base_seed: 1,
        }
    }

    /// Desk-scale preset: 64x64 images, 90 low-dose views, 90 detectors,
    /// two phantoms x two modes x one weight x four solvers = 16 runs,
    /// well under a minute.
    ///
    /// The weights are full-scale ones shrunk to keep the data-term / TV
    /// balance comparable. The residual term scales with the ray count (and
    /// squared ray length), TV only with the image side, so the combined
    /// factor is (desk rays / full rays) * (desk n / full n). Ray count
    /// alone would leave TV about 6x too heavy at 64x64: measured on the
    /// low-dose Shepp-Logan scenario that drops the Polak-Ribiere PSNR gain
    /// over the unregularized baseline from ~4.5 dB to ~0.3 dB.
    pub fn desk() -> Self {
        let full = CtConfig::full_scale();
        let full_det = full.n_det as f64;
        let res_scale = 64.0 / full.n as f64;
        let ld_scale = (90.0 * 90.0) / (full.low_dose_views as f64 * full_det) * res_scale;
        let sv_scale = 90.0 / full_det * res_scale;
        CtConfig {
            n: 64,
            low_dose_views: 90,
            n_det: 90,
            phantoms: vec!["shepplogan".into(), "threephases".into()],
            modes: vec![ScanMode::LowDose { noise: 0.01 }, ScanMode::SparseView { views: 30 }],
            mu_low_dose: vec![25.0 * ld_scale],
            mu_sparse_view: vec![5.0 * sv_scale],
            ..full
        }
    }

    fn mu_list(&self, mode: ScanMode) -> &[f64] {
        match mode {
            ScanMode::LowDose { .. } => &self.mu_low_dose,
            ScanMode::SparseView { .. } => &self.mu_sparse_view,
        }
    }

    pub fn validate(&self) -> Result<(), StudyError> {
        if self.n < 16 {
            return Err(StudyError::Usage(format!(
                "image side {} too small for the scan geometry (needs n >= 16)",
                self.n
            )));
        }
        if self.low_dose_views == 0 || self.n_det == 0 || self.iterations == 0 {
            return Err(StudyError::Usage("views, detectors, and iterations must be at least 1".into()));
        }
        if self.solvers.is_empty() || self.phantoms.is_empty() || self.modes.is_empty() {
            return Err(StudyError::Usage("ct study needs solvers, phantoms, and modes".into()));
        }
        for name in &self.phantoms {
            if !phantom::NAMES.contains(&name.as_str()) {
                return Err(StudyError::Usage(format!("unknown phantom id `{name}`")));
            }
        }
        for &mode in &self.modes {
            if let ScanMode::LowDose { noise } = mode {
                if !(0.0..=1.0).contains(&noise) {
                    return Err(StudyError::Usage(format!("noise level {noise} outside [0, 1]")));
                }
            }
            let mus = self.mu_list(mode);
            if mus.is_empty() {
                return Err(StudyError::Usage(format!(
                    "mode `{}` has an empty regularization weight list",
                    mode.code()
                )));
            }
            if mus.iter().any(|&mu| !(mu >= 0.0)) {
                return Err(StudyError::Usage("regularization weights must be nonnegative".into()));
            }
            let labels: Vec<String> = mus.iter().map(|&mu| fmt_compact(mu)).collect();
            for (i, label) in labels.iter().enumerate() {
                if labels[..i].contains(label) {
                    return Err(StudyError::Usage(format!(
                        "weights {} and an earlier entry collapse to the same label `{label}`",
                        mus[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply_config(&mut self, mut raw: RawConfig) -> Result<(), StudyError> {
        check_kind(&mut raw, "ct")?;
        parse_into(&mut raw, "study.seed", &mut self.base_seed)?;
        parse_into(&mut raw, "ct.n", &mut self.n)?;
        parse_into(&mut raw, "ct.low_dose_views", &mut self.low_dose_views)?;
        parse_into(&mut raw, "ct.n_det", &mut self.n_det)?;
        parse_into(&mut raw, "ct.iterations", &mut self.iterations)?;
        parse_into(&mut raw, "ct.memory", &mut self.memory)?;
        parse_into(&mut raw, "ct.grad_norm_stop", &mut self.grad_norm_stop)?;
        if let Some(text) = raw.take("ct.solvers") {
            self.solvers = parse_solvers(&text)?;
        }
        if let Some(text) = raw.take("ct.phantoms") {
            self.phantoms = split_list(&text);
        }
        if let Some(text) = raw.take("ct.modes") {
            self.modes = split_list(&text)
                .iter()
                .map(|code| {
                    ScanMode::parse(code)
                        .ok_or_else(|| StudyError::Usage(format!("unknown scan mode `{code}`")))
                })
                .collect::<Result<_, _>>()?;
        }
        if let Some(text) = raw.take("ct.mu_low_dose") {
            self.mu_low_dose = parse_f64_list(&text, "ct.mu_low_dose")?;
        }
        if let Some(text) = raw.take("ct.mu_sparse_view") {
            self.mu_sparse_view = parse_f64_list(&text, "ct.mu_sparse_view")?;
        }
        raw.finish()?;
        self.validate()
    }

    fn echo(&self) -> String {
        format!(
            "[study]\nkind = ct\nseed = {}\n\n[ct]\nn = {}\nlow_dose_views = {}\nn_det = {}\n\
             iterations = {}\nmemory = {}\ngrad_norm_stop = {}\nsolvers = {}\nphantoms = {}\n\
             modes = {}\nmu_low_dose = {}\nmu_sparse_view = {}\n",
            self.base_seed,
            self.n,
            self.low_dose_views,
            self.n_det,
            self.iterations,
            self.memory,
            self.grad_norm_stop,
            self.solvers.iter().map(|s| s.code()).collect::<Vec<_>>().join(", "),
            self.phantoms.join(", "),
            self.modes.iter().map(|m| m.code()).collect::<Vec<_>>().join(", "),
            join_f64(&self.mu_low_dose),
            join_f64(&self.mu_sparse_view),
        )
    }
}

/// Flat `[section] key = value` config text. `#` starts a comment, blank
/// lines are skipped, later assignments override earlier ones. Consumers
/// `take` the keys they understand and then call [`RawConfig::finish`],
/// which rejects anything left over, so typos fail loudly.
#[derive(Debug, Default)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, StudyError> {
        let mut values = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = Some(name.trim().to_string());
            } else if let Some((key, value)) = line.split_once('=') {
                let section = section.as_ref().ok_or_else(|| {
                    StudyError::Usage(format!("config line {}: key before any [section]", idx + 1))
                })?;
                values.insert(format!("{section}.{}", key.trim()), value.trim().to_string());
            } else {
                return Err(StudyError::Usage(format!(
                    "config line {}: expected `key = value` or `[section]`, got `{line}`",
                    idx + 1
                )));
            }
        }
        Ok(RawConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self, StudyError> {
        let text = fs::read_to_string(path).map_err(|e| {
            StudyError::Usage(format!("cannot read config `{}`: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn take(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    pub fn finish(self) -> Result<(), StudyError> {
        match self.values.keys().next() {
            Some(key) => Err(StudyError::Usage(format!("unknown config key `{key}`"))),
            None => Ok(()),
        }
    }
}

fn check_kind(raw: &mut RawConfig, expected: &str) -> Result<(), StudyError> {
    if let Some(kind) = raw.take("study.kind") {
        if kind != expected {
            return Err(StudyError::Usage(format!(
                "config is for study `{kind}`, but this command runs `{expected}`"
            )));
        }
    }
    Ok(())
}

fn parse_into<T: std::str::FromStr>(
    raw: &mut RawConfig,
    key: &str,
    target: &mut T,
) -> Result<(), StudyError>
where
    T::Err: std::fmt::Display,
{
    if let Some(text) = raw.take(key) {
        *target = text
            .parse()
            .map_err(|e| StudyError::Usage(format!("config key `{key}` = `{text}`: {e}")))?;
    }
    Ok(())
}

fn split_list(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn parse_solvers(text: &str) -> Result<Vec<SolverId>, StudyError> {
    split_list(text)
        .iter()
        .map(|code| {
            SolverId::parse(code).ok_or_else(|| StudyError::Usage(format!("unknown solver id `{code}`")))
        })
        .collect()
}

fn parse_f64_list(text: &str, key: &str) -> Result<Vec<f64>, StudyError> {
    split_list(text)
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| StudyError::Usage(format!("config key `{key}` entry `{s}`: {e}")))
        })
        .collect()
}

fn join_f64(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

/// Compact file-name-safe number: four decimals max, trailing zeros
/// trimmed, `.` replaced by `p` (25 -> `25`, 0.795 -> `0p795`).
fn fmt_compact(v: f64) -> String {
    let mut s = format!("{v:.4}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s.replace('.', "p")
}

fn fnv1a64(text: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Write-then-rename so readers never observe a half-written file and an
/// interrupted study leaves no truncated artifacts.
fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), StudyError> {
    let name = path
        .file_name()
        .ok_or_else(|| StudyError::Runtime(format!("bad output path `{}`", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes)
        .map_err(|e| StudyError::Runtime(format!("cannot write `{}`: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| StudyError::Runtime(format!("cannot finalize `{}`: {e}", path.display())))?;
    Ok(())
}

fn map_jobs<T, R, F>(jobs: Vec<T>, f: F) -> Result<Vec<R>, StudyError>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R, StudyError> + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        jobs.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        jobs.into_iter().map(f).collect()
    }
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, StudyError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| StudyError::Runtime(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| StudyError::Runtime(e.to_string()))?;
    }
    w.into_inner().map_err(|e| StudyError::Runtime(e.to_string()))
}

fn write_profiles_for(
    runs: &[RunSummary],
    metrics: &[ProfileMetric],
    out_dir: &Path,
) -> Result<(), StudyError> {
    for &metric in metrics {
        let table = profiles::table_from_runs(runs, metric)?;
        let profile = profiles::compute_profile(&table)?;
        let stem = format!("profile_{}", metric.code());
        profiles::write_profile_csv(&out_dir.join(format!("{stem}.csv")), &profile)?;
        profiles::write_profile_svg(
            &out_dir.join(format!("{stem}.svg")),
            &profile,
            &format!("performance profile: {}", metric.code()),
        )?;
    }
    Ok(())
}

/// Run the benchmark sweep into `out_dir`. Per run: `run_<problem>_<solver>.json`
/// with the full solve result. Aggregates: `bench_results.csv` and
/// error/evals/cpu profiles. Returns the number of runs.
pub fn run_bench(cfg: &BenchConfig, out_dir: &Path) -> Result<usize, StudyError> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    atomic_write(&out_dir.join("config.txt"), cfg.echo().as_bytes())?;

    let mut jobs = Vec::new();
    for problem in &cfg.problems {
        for &solver in &cfg.solvers {
            jobs.push((problem.clone(), solver));
        }
    }
    let rows = map_jobs(jobs, |(pname, sid)| {
        let problem = Problem::by_name(&pname).expect("ids validated");
        let f_star = problem.f_star();
        let x0 = problem.x0();
        let oracle = CountingOracle::new(problem);
        let scfg = ScsConfig {
            beta: sid.beta,
            line_search: sid.line_search,
            memory: cfg.memory,
            max_iter: cfg.max_iter,
            ..ScsConfig::default()
        };
        let result = solve(&oracle, &x0, &scfg);
        let error = problems::error_measure(result.f_min, f_star);
        let json = serde_json::to_vec_pretty(&result)
            .map_err(|e| StudyError::Runtime(e.to_string()))?;
        atomic_write(&out_dir.join(format!("run_{pname}_{}.json", sid.code())), &json)?;
        Ok((pname, sid, result, error))
    })?;

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(pname, sid, result, error)| {
            vec![
                pname.clone(),
                sid.code(),
                result.f_min.to_string(),
                error.to_string(),
                result.evals_to_best.to_string(),
                result.wall_seconds.to_string(),
                (*error < problems::SOLVED_THRESHOLD).to_string(),
            ]
        })
        .collect();
    let bytes = csv_bytes(
        &["problem", "solver", "f_min", "error", "evals", "cpu_seconds", "solved"],
        &csv_rows,
    )?;
    atomic_write(&out_dir.join("bench_results.csv"), &bytes)?;

    let runs: Vec<RunSummary> = rows
        .iter()
        .map(|(pname, sid, result, error)| RunSummary {
            problem: pname.clone(),
            solver: sid.code(),
            f_min: result.f_min,
            error: Some(*error),
            evals: Some(result.evals_to_best as f64),
            cpu_seconds: Some(result.wall_seconds),
        })
        .collect();
    write_profiles_for(
        &runs,
        &[ProfileMetric::Error, ProfileMetric::Evals, ProfileMetric::Cpu],
        out_dir,
    )?;
    Ok(rows.len())
}

/// One expanded CT run. Scenario ids look like `shepplogan_ld01_mu0p159`.
#[derive(Clone, Debug)]
pub struct CtRunSpec {
    pub phantom: String,
    pub mode: ScanMode,
    pub mu: f64,
    pub solver: SolverId,
}

impl CtRunSpec {
    pub fn scenario(&self) -> String {
        format!("{}_{}_mu{}", self.phantom, self.mode.code(), fmt_compact(self.mu))
    }
}

/// The flat run list a config expands to, in deterministic nested order
/// (phantom, mode, weight, solver).
pub fn expand_ct_runs(cfg: &CtConfig) -> Vec<CtRunSpec> {
    let mut specs = Vec::new();
    for phantom in &cfg.phantoms {
        for &mode in &cfg.modes {
            for &mu in cfg.mu_list(mode) {
                for &solver in &cfg.solvers {
                    specs.push(CtRunSpec { phantom: phantom.clone(), mode, mu, solver });
                }
            }
        }
    }
    specs
}

struct ScanData {
    phantom: String,
    mode: ScanMode,
    geom: Geometry,
    b: Sinogram,
    truth: Image,
}

fn simulate_scans(cfg: &CtConfig) -> Vec<ScanData> {
    let mut scans = Vec::new();
    for pname in &cfg.phantoms {
        let phantom_seed = cfg.base_seed ^ fnv1a64(pname);
        let truth = phantom::by_name(pname, cfg.n, phantom_seed).expect("ids validated");
        for &mode in &cfg.modes {
            let views = match mode {
                ScanMode::LowDose { .. } => cfg.low_dose_views,
                ScanMode::SparseView { views } => views,
            };
            let geom = Geometry::new(cfg.n, views, cfg.n_det);
            let clean = projector::forward_project(&truth, &geom);
            let b = match mode {
                ScanMode::LowDose { noise } => {
                    let noise_seed = cfg.base_seed ^ fnv1a64(&format!("{pname}/{}", mode.code()));
                    ct::add_gaussian_noise(&clean, noise, noise_seed)
                }
                ScanMode::SparseView { .. } => clean,
            };
            scans.push(ScanData { phantom: pname.clone(), mode, geom, b, truth: truth.clone() });
        }
    }
    scans
}

struct CtRow {
    spec: CtRunSpec,
    f_min: f64,
    fevals: u64,
    psnr: f64,
    ssim: f64,
}

/// Run the reconstruction sweep into `out_dir`. Per run: the reconstructed
/// image as PGM (plus range sidecar) and an iteration history CSV.
/// Aggregates: `ct_results.csv`, the objective-value profile under the
/// 10%-of-best rule, and `psnr_ssim.csv` with each solver's best weight
/// per scenario. Returns the number of runs.
pub fn run_ct(cfg: &CtConfig, out_dir: &Path) -> Result<usize, StudyError> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    atomic_write(&out_dir.join("config.txt"), cfg.echo().as_bytes())?;

    let scans = simulate_scans(cfg);
    let scan_of = |spec: &CtRunSpec| {
        scans
            .iter()
            .find(|s| s.phantom == spec.phantom && s.mode == spec.mode)
            .expect("every spec has a simulated scan")
    };
    let specs = expand_ct_runs(cfg);

    let rows = map_jobs(specs, |spec| {
        let scan = scan_of(&spec);
        let objective = CtObjective::new(scan.geom.clone(), scan.b.clone(), spec.mu);
        let oracle = CountingOracle::new(objective);
        let scfg = ScsConfig {
            beta: spec.solver.beta,
            line_search: spec.solver.line_search,
            memory: cfg.memory,
            max_iter: cfg.iterations,
            grad_norm_stop: cfg.grad_norm_stop,
            box_constrain: true,
            ..ScsConfig::default()
        };
        let x0 = vec![0.0; cfg.n * cfg.n];
        let result = solve(&oracle, &x0, &scfg);
        let recon = Image::from_vec(cfg.n, result.x_best.clone());
        let psnr = metrics::psnr(&recon, &scan.truth);
        let ssim = metrics::ssim(&recon, &scan.truth);

        let stem = format!("{}_{}", spec.scenario(), spec.solver.code());
        let (pgm, sidecar) = ct_io::pgm_parts(&recon);
        let pgm_path = out_dir.join(format!("recon_{stem}.pgm"));
        atomic_write(&pgm_path, &pgm)?;
        atomic_write(&ct_io::sidecar_path(&pgm_path), sidecar.as_bytes())?;

        let history_rows: Vec<Vec<String>> = result
            .history
            .iter()
            .map(|rec| {
                vec![
                    rec.k.to_string(),
                    rec.f.to_string(),
                    rec.alpha.to_string(),
                    rec.theta.to_string(),
                    rec.beta.to_string(),
                    rec.restarted.to_string(),
                    rec.grad_norm.to_string(),
                    rec.fevals.to_string(),
                ]
            })
            .collect();
        let bytes = csv_bytes(
            &["k", "f", "alpha", "theta", "beta", "restarted", "grad_norm", "fevals"],
            &history_rows,
        )?;
        atomic_write(&out_dir.join(format!("history_{stem}.csv")), &bytes)?;

        Ok(CtRow { spec, f_min: result.f_min, fevals: result.fevals, psnr, ssim })
    })?;

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            vec![
                row.spec.scenario(),
                row.spec.solver.code(),
                row.f_min.to_string(),
                row.fevals.to_string(),
                row.psnr.to_string(),
                row.ssim.to_string(),
            ]
        })
        .collect();
    let bytes = csv_bytes(&["scenario", "solver", "f_min", "evals", "psnr", "ssim"], &csv_rows)?;
    atomic_write(&out_dir.join("ct_results.csv"), &bytes)?;

    let runs: Vec<RunSummary> = rows
        .iter()
        .map(|row| RunSummary {
            problem: row.spec.scenario(),
            solver: row.spec.solver.code(),
            f_min: row.f_min,
            error: None,
            evals: Some(row.fevals as f64),
            cpu_seconds: None,
        })
        .collect();
    write_profiles_for(&runs, &[ProfileMetric::FMin], out_dir)?;

    // Best weight per (phantom, mode, solver), chosen by PSNR; ties keep
    // the earlier weight in config order.
    let mut best: Vec<&CtRow> = Vec::new();
    for row in &rows {
        match best.iter_mut().find(|b| {
            b.spec.phantom == row.spec.phantom
                && b.spec.mode == row.spec.mode
                && b.spec.solver == row.spec.solver
        }) {
            Some(slot) => {
                if row.psnr > slot.psnr {
                    *slot = row;
                }
            }
            None => best.push(row),
        }
    }
    let best_rows: Vec<Vec<String>> = best
        .iter()
        .map(|row| {
            vec![
                row.spec.phantom.clone(),
                row.spec.mode.code(),
                row.spec.solver.code(),
                row.spec.mu.to_string(),
                row.psnr.to_string(),
                row.ssim.to_string(),
            ]
        })
        .collect();
    let bytes = csv_bytes(&["phantom", "mode", "solver", "best_mu", "psnr", "ssim"], &best_rows)?;
    atomic_write(&out_dir.join("psnr_ssim.csv"), &bytes)?;

    Ok(rows.len())
}

const BENCH_SCHEMA: [&str; 7] =
    ["problem", "solver", "f_min", "error", "evals", "cpu_seconds", "solved"];
const CT_SCHEMA: [&str; 6] = ["scenario", "solver", "f_min", "evals", "psnr", "ssim"];

fn field_f64(record: &csv::StringRecord, idx: usize, name: &str) -> Result<f64, StudyError> {
    let text = record
        .get(idx)
        .ok_or_else(|| StudyError::Usage(format!("results row missing column `{name}`")))?;
    text.parse()
        .map_err(|_| StudyError::Usage(format!("results column `{name}`: bad number `{text}`")))
}

/// Read an aggregate results CSV in either study schema back into run
/// summaries; schema is detected from the first header column.
pub fn read_results_csv(path: &Path) -> Result<Vec<RunSummary>, StudyError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| StudyError::Usage(format!("cannot read results `{}`: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| StudyError::Usage(format!("results file `{}`: {e}", path.display())))?
        .clone();
    let expected: &[&str] = match headers.get(0) {
        Some("problem") => &BENCH_SCHEMA,
        Some("scenario") => &CT_SCHEMA,
        other => {
            return Err(StudyError::Usage(format!(
                "unexpected results schema: first column `{}` (expected `problem` or `scenario`)",
                other.unwrap_or("<missing>")
            )))
        }
    };
    for (i, want) in expected.iter().enumerate() {
        match headers.get(i) {
            Some(got) if got == *want => {}
            got => {
                return Err(StudyError::Usage(format!(
                    "results column {} is `{}`, expected `{want}`",
                    i + 1,
                    got.unwrap_or("<missing>")
                )))
            }
        }
    }
    if headers.len() != expected.len() {
        return Err(StudyError::Usage(format!(
            "unexpected extra results column `{}`",
            headers.get(expected.len()).unwrap_or("<missing>")
        )));
    }

    let is_bench = expected.len() == BENCH_SCHEMA.len();
    let mut runs = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| StudyError::Usage(e.to_string()))?;
        let name = |i: usize| record.get(i).unwrap_or("").to_string();
        if is_bench {
            runs.push(RunSummary {
                problem: name(0),
                solver: name(1),
                f_min: field_f64(&record, 2, "f_min")?,
                error: Some(field_f64(&record, 3, "error")?),
                evals: Some(field_f64(&record, 4, "evals")?),
                cpu_seconds: Some(field_f64(&record, 5, "cpu_seconds")?),
            });
        } else {
            runs.push(RunSummary {
                problem: name(0),
                solver: name(1),
                f_min: field_f64(&record, 2, "f_min")?,
                error: None,
                evals: Some(field_f64(&record, 3, "evals")?),
                cpu_seconds: None,
            });
        }
    }
    if runs.is_empty() {
        return Err(StudyError::Usage(format!(
            "results file `{}` has no data rows",
            path.display()
        )));
    }
    Ok(runs)
}

/// Rebuild profile CSV + SVG for one metric from an aggregate results file.
pub fn make_profiles(
    results_csv: &Path,
    metric: ProfileMetric,
    out_dir: &Path,
) -> Result<(), StudyError> {
    let runs = read_results_csv(results_csv)?;
    fs::create_dir_all(out_dir)?;
    write_profiles_for(&runs, &[metric], out_dir)
}
