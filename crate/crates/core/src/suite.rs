//! Batch runner behind the `verify` binary: named suites of checks with
//! deterministic JSON and CSV reports.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::convex_order::{self, ConvexFunction, Mode};
use crate::entropy::{self, ExpandingMap};
use crate::inequalities as ineq;
use crate::lattice;
use crate::measures::{self, named_density, CrossingOutcome, MeasuredDensity, Potential, WeightedMeasure};
use crate::numerics;
use crate::numerics::Interval;
use crate::report::{CheckKind, CheckReport};
use crate::transport::{self, Criterion, TestFunction};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Ball,
    OpBessel,
    DiscreteBall,
    Lemmas,
    Lattice,
    Entropy,
    Certificates,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 7] = [
        Suite::Ball,
        Suite::OpBessel,
        Suite::DiscreteBall,
        Suite::Lemmas,
        Suite::Lattice,
        Suite::Entropy,
        Suite::Certificates,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Suite::Ball => "ball",
            Suite::OpBessel => "op-bessel",
            Suite::DiscreteBall => "discrete-ball",
            Suite::Lemmas => "lemmas",
            Suite::Lattice => "lattice",
            Suite::Entropy => "entropy",
            Suite::Certificates => "certificates",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let all = Suite::CONCRETE.iter().copied().chain([Suite::All]);
        for suite in all {
            if suite.label() == s {
                return Ok(suite);
            }
        }
        Err(ConfigError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(ConfigError::BadValue { key: "output".into(), reason: format!("`{s}` is not json or csv") }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Discrete-Ball `n` grid.
    pub n: Vec<u32>,
    /// Discrete-Ball `p` grid.
    pub p: Vec<f64>,
    /// Ball `s` grid; the Bessel suite uses `op_s`.
    pub s: Vec<f64>,
    pub op_s: Vec<f64>,
    /// Entropy orders.
    pub q: Vec<f64>,
    /// Lattice box dimensions.
    pub dims: RangeInclusive<usize>,
    pub max_side: u64,
    pub boxes: usize,
    /// Grid size for transport contraction checks.
    pub grid: usize,
    pub tol: f64,
    pub seed: u64,
    /// Worker threads; not part of the report.
    pub jobs: usize,
    pub output: OutputFormat,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            n: (2..=64).collect(),
            p: (0..=124).map(|k| 2.0 + 0.5 * k as f64).collect(),
            s: vec![1.0, 1.1, 1.5, 2.0, 3.0, 6.0, 10.0],
            op_s: vec![1.0, 1.5, 2.0, 4.0],
            q: vec![0.5, 1.0, 2.0, 5.0, f64::INFINITY],
            dims: 1..=6,
            max_side: 9,
            boxes: 500,
            grid: 4096,
            tol: 1e-9,
            seed: 0,
            jobs: 0,
            output: OutputFormat::Json,
        }
    }
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue { key: key.to_string(), reason: reason.into() }
}

/// `"2..8,10"` into `[2, ..., 8, 10]`.
pub fn parse_int_list(key: &str, s: &str) -> Result<Vec<u32>, ConfigError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u32 = a.trim().parse().map_err(|_| bad(key, format!("`{part}`")))?;
            let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad(key, format!("`{part}`")))?;
            if a > b {
                return Err(bad(key, format!("empty range `{part}`")));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad(key, format!("`{part}`")))?);
        }
    }
    if out.is_empty() {
        return Err(bad(key, "empty list"));
    }
    Ok(out)
}

/// `"2..4:0.5,8,inf"` into `[2, 2.5, 3, 3.5, 4, 8, inf]`. A range without a
/// step uses step 1.
pub fn parse_float_list(key: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    let num = |t: &str| -> Result<f64, ConfigError> {
        match t.trim() {
            "inf" | "infinity" => Ok(f64::INFINITY),
            t => t.parse::<f64>().ok().filter(|v| !v.is_nan()).ok_or_else(|| bad(key, format!("`{t}`"))),
        }
    };
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, rest)) = part.split_once("..") {
            let (b, step) = match rest.split_once(':') {
                Some((b, st)) => (num(b)?, num(st)?),
                None => (num(rest)?, 1.0),
            };
            let a = num(a)?;
            if !(step > 0.0 && step.is_finite() && a <= b && b.is_finite()) {
                return Err(bad(key, format!("bad range `{part}`")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            out.extend((0..=count).map(|k| a + step * k as f64));
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err(bad(key, "empty list"));
    }
    Ok(out)
}

pub fn parse_dims(s: &str) -> Result<RangeInclusive<usize>, ConfigError> {
    let v = parse_int_list("dims", s)?;
    let (lo, hi) = (*v.iter().min().unwrap() as usize, *v.iter().max().unwrap() as usize);
    if lo == 0 {
        return Err(bad("dims", "dimensions start at 1"));
    }
    Ok(lo..=hi)
}

impl SuiteConfig {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key.trim() {
            "suite" => self.suite = Suite::parse(value)?,
            "n" => self.n = parse_int_list("n", value)?,
            "p" => self.p = parse_float_list("p", value)?,
            "s" => {
                self.s = parse_float_list("s", value)?;
                self.op_s = self.s.clone();
            }
            "q" => self.q = parse_float_list("q", value)?,
            "dims" => self.dims = parse_dims(value)?,
            "max_side" | "max-side" => {
                self.max_side = value.parse().map_err(|_| bad("max_side", value))?;
            }
            "boxes" => self.boxes = value.parse().map_err(|_| bad("boxes", value))?,
            "grid" => self.grid = value.parse().map_err(|_| bad("grid", value))?,
            "tol" => self.tol = value.parse().map_err(|_| bad("tol", value))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed", value))?,
            "jobs" => self.jobs = value.parse().map_err(|_| bad("jobs", value))?,
            "output" => self.output = OutputFormat::parse(value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Flat `key = value` text; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(bad("tol", "must be positive"));
        }
        if self.n.iter().any(|&n| n < 2) {
            return Err(bad("n", "n >= 2"));
        }
        if self.p.iter().any(|&p| !(p >= 2.0 && p.is_finite())) {
            return Err(bad("p", "p >= 2"));
        }
        if self.s.iter().chain(&self.op_s).any(|&s| !(s >= 1.0 && s.is_finite())) {
            return Err(bad("s", "s >= 1"));
        }
        if self.q.iter().any(|&q| !(q >= 0.0)) {
            return Err(bad("q", "q >= 0"));
        }
        if self.max_side < 2 {
            return Err(bad("max_side", "max_side >= 2"));
        }
        if self.grid < 2 {
            return Err(bad("grid", "grid >= 2"));
        }
        Ok(())
    }

    /// Settings that determine the report, in a stable order.
    pub fn canonical(&self) -> Vec<(&'static str, String)> {
        // Shortest round-trip form keeps the header readable.
        let floats = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let ints = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        vec![
            ("suite", self.suite.label().to_string()),
            ("n", ints(&self.n)),
            ("p", floats(&self.p)),
            ("s", floats(&self.s)),
            ("op_s", floats(&self.op_s)),
            ("q", floats(&self.q)),
            ("dims", format!("{}..{}", self.dims.start(), self.dims.end())),
            ("max_side", self.max_side.to_string()),
            ("boxes", self.boxes.to_string()),
            ("grid", self.grid.to_string()),
            ("tol", self.tol.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }
}

/// One line of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub suite: Suite,
    pub report: CheckReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRun {
    pub config: SuiteConfig,
    pub records: Vec<Record>,
}

impl SuiteRun {
    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.report.ok()).count()
    }

    pub fn all_ok(&self) -> bool {
        self.records.iter().all(|r| r.report.ok())
    }

    /// 0 when every check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_ok() {
            0
        } else {
            1
        }
    }

    pub fn render(&self) -> String {
        match self.config.output {
            OutputFormat::Json => to_json(self),
            OutputFormat::Csv => to_csv(self),
        }
    }
}

/// A failed record standing in for a check that could not be evaluated.
fn error_record(name: &str, params: &[(&str, f64)], err: impl std::fmt::Display) -> CheckReport {
    let mut r = CheckReport::new(name, CheckKind::Strict, f64::NAN, f64::NAN, 0.0);
    for (k, v) in params {
        r = r.param(k, *v);
    }
    r.with_note(format!("error: {err}"))
}

fn flag(name: &str, ok: bool) -> CheckReport {
    CheckReport::new(name, CheckKind::Equality, if ok { 0.0 } else { 1.0 }, 0.0, 0.0)
}

type Job = Box<dyn Fn() -> Vec<CheckReport> + Send + Sync>;

fn job<F>(f: F) -> Job
where
    F: Fn() -> Vec<CheckReport> + Send + Sync + 'static,
{
    Box::new(f)
}

fn one<E: std::fmt::Display>(
    name: &'static str,
    params: Vec<(&'static str, f64)>,
    r: Result<CheckReport, E>,
) -> Vec<CheckReport> {
    match r {
        Ok(c) => vec![c],
        Err(e) => vec![error_record(name, &params, e)],
    }
}

fn many<E: std::fmt::Display>(name: &'static str, r: Result<Vec<CheckReport>, E>) -> Vec<CheckReport> {
    r.unwrap_or_else(|e| vec![error_record(name, &[], e)])
}

fn ball_jobs(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs: Vec<Job> =
        cfg.s.iter().map(|&s| job(move || one("ball", vec![("s", s)], ineq::ball_check(s)))).collect();
    let grid = cfg.grid;
    jobs.push(job(move || many("ball_transport", ball_transport_checks(grid))));
    jobs
}

fn ball_pair() -> Result<(MeasuredDensity, MeasuredDensity), measures::MeasuresError> {
    Ok((
        MeasuredDensity::lebesgue(named_density("gauss_pi", &[])?),
        MeasuredDensity::lebesgue(named_density("sinc_sq", &[])?),
    ))
}

/// `T' <= 1`, Monge–Ampère residuals and pushforward identities for the
/// map from `sinc^2` to `e^{-pi x^2}`.
pub fn ball_transport_checks(grid_points: usize) -> Result<Vec<CheckReport>, Box<dyn std::error::Error + Send + Sync>> {
    let (f, g) = ball_pair()?;
    let map = transport::build_transport(&g, &f)?;
    let grid = numerics::linspace(0.0, 6.0, grid_points);
    let c = transport::contraction_report(&map, Criterion::TprimeLe1, &grid)?;
    let mut out =
        vec![CheckReport::new("ball_tprime", CheckKind::NonStrict, c.sup_observed, 1.0, transport::CONTRACTION_TOL)
            .param("worst_x", c.worst_x)
            .param("grid", c.grid_size as f64)];
    let mut worst = 0.0f64;
    for x in numerics::linspace(0.05, 5.95, 60) {
        // Skip the zeros of sinc^2, where the finite-difference check degenerates.
        if (x - x.round()).abs() < 0.02 {
            continue;
        }
        worst = worst.max(transport::ma_residual(&map, x)?.abs());
    }
    out.push(CheckReport::new("ball_ma_residual", CheckKind::NonStrict, worst, 1e-6, 0.0));
    let p = transport::pushforward_check(
        &map,
        &[TestFunction::One, TestFunction::X, TestFunction::X2],
        (-8.0, 8.0),
        1e-12,
    )?;
    out.push(CheckReport::new("ball_pushforward", CheckKind::NonStrict, p.max_discrepancy, 1e-7, 0.0));
    let h = transport::holder_chain(&map, 2.0, (-8.0, 8.0), 1e-12)?;
    out.push(
        CheckReport::new("ball_holder", CheckKind::NonStrict, h.lhs.value, h.rhs, h.rhs_error + h.lhs.error_bound)
            .param("s", 2.0),
    );
    Ok(out)
}

fn op_jobs(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs: Vec<Job> =
        cfg.op_s.iter().map(|&s| job(move || one("op_bessel", vec![("s", s)], ineq::op_bessel_check(s)))).collect();
    for x in [1.0, 5.0, 10.0, 20.0] {
        jobs.push(job(move || one("op_cumulative", vec![("x", x)], ineq::op_cumulative_check(x))));
    }
    let grid = cfg.grid;
    jobs.push(job(move || many("op_transport", op_transport_checks(grid))));
    jobs
}

/// `T T' <= x` on `(0, 30]` and a residual spot check for the weighted map.
pub fn op_transport_checks(grid_points: usize) -> Result<Vec<CheckReport>, Box<dyn std::error::Error + Send + Sync>> {
    let g = MeasuredDensity::linear(named_density("bessel_kernel", &[])?)?;
    let f = MeasuredDensity::linear(named_density("exp_quartersq", &[])?)?;
    let map = transport::build_transport(&g, &f)?;
    let grid: Vec<f64> = (1..=grid_points).map(|k| 30.0 * k as f64 / grid_points as f64).collect();
    let c = transport::contraction_report(&map, Criterion::TTprimeLeX, &grid)?;
    let r = transport::ma_residual(&map, 1.0)?;
    Ok(vec![
        CheckReport::new("op_ttprime", CheckKind::NonStrict, c.sup_observed, 1.0, transport::CONTRACTION_TOL)
            .param("worst_x", c.worst_x)
            .param("grid", c.grid_size as f64),
        CheckReport::new("op_ma_residual", CheckKind::NonStrict, r.abs(), 1e-6, 0.0).param("x", 1.0),
    ])
}

fn discrete_jobs(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for &n in &cfg.n {
        for &p in &cfg.p {
            jobs.push(job(move || {
                one("discrete_ball", vec![("n", n as f64), ("p", p)], ineq::discrete_ball_check(n, p))
            }));
        }
    }
    for &n in cfg.n.iter().filter(|&&n| n <= 16) {
        let grid = cfg.grid;
        jobs.push(job(move || {
            one("discrete_ball_transport", vec![("n", n as f64)], ineq::discrete_ball_transport_check(n, grid))
        }));
        jobs.push(job(move || {
            let c = ineq::discrete_ball_context(n);
            match c {
                Ok(c) => {
                    let half = 0.5 / n as f64;
                    vec![
                        CheckReport::new("discrete_g_mass", CheckKind::Equality, c.g_mass, half, 1e-10)
                            .param("n", n as f64),
                        CheckReport::new("discrete_f_mass", CheckKind::Equality, c.f_mass, half, 1e-10)
                            .param("n", n as f64),
                    ]
                }
                Err(e) => vec![error_record("discrete_context", &[("n", n as f64)], e)],
            }
        }));
    }
    jobs
}

fn lemma_jobs() -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    let sweep = |name: &'static str, pts: Vec<Vec<f64>>| -> Job {
        job(move || {
            pts.iter()
                .map(|p| match ineq::named_lemma_check(name, p) {
                    Ok(r) => r,
                    Err(e) => error_record(name, &[], e),
                })
                .collect()
        })
    };
    let erfc_grid: Vec<Vec<f64>> = numerics::linspace(0.5, 10.0, 2048).into_iter().map(|x| vec![x]).collect();
    jobs.push(sweep("erfc_engineering", erfc_grid.clone()));
    jobs.push(sweep("erfc_series", erfc_grid));
    jobs.push(sweep("lemma_final", numerics::linspace(PI, 100.0, 8192).into_iter().map(|y| vec![y]).collect()));
    jobs.push(job(ineq::lemma_final_aux));
    let mut sin_pts = Vec::new();
    for b in numerics::linspace(0.05, std::f64::consts::FRAC_PI_2, 16) {
        for a in numerics::linspace(0.01, b, 16) {
            sin_pts.push(vec![a.min(b), b]);
        }
    }
    jobs.push(sweep("sinus_monotone", sin_pts));
    let mut kg = Vec::new();
    for n in 2..=16u32 {
        for x in numerics::linspace(0.0, 1.0 / n as f64, 66).into_iter().skip(1).take(64) {
            kg.push(vec![n as f64, x]);
        }
    }
    jobs.push(sweep("kernel_gauss_dom", kg));
    jobs.push(sweep("forJames", numerics::linspace(0.0, 20.0, 801).into_iter().skip(1).map(|x| vec![x]).collect()));
    let mut lj = Vec::new();
    let mut pain = Vec::new();
    for n in 3..=16u32 {
        let nf = n as f64;
        let lo = (0.5 - 1.0 / nf).max(1.0 / nf);
        for x in numerics::linspace(lo, 0.5, 65) {
            if x > 1.0 / nf {
                lj.push(vec![nf, x]);
            }
        }
        if n >= 5 {
            for x in numerics::linspace(1.0 / nf, 0.5 - 1.0 / nf, 65) {
                pain.push(vec![nf, x]);
            }
        }
    }
    jobs.push(sweep("lemma_james", lj));
    jobs.push(sweep("pain", pain));
    let mut gs = vec![vec![3.0, 1.0 / 9.0, 0.0], vec![4.0, 2.0 / 27.0, 0.0], vec![5.0, 1.0 / 16.0, 1.0]];
    for n in 6..=64u32 {
        let nf = n as f64;
        gs.push(vec![nf, 1.0 / (nf * (PI / nf).cos()).powi(2), 0.0]);
    }
    jobs.push(sweep("g_star", gs));
    jobs.push(sweep("kk_refined", vec![vec![9.0 / 8.0], vec![1.5], vec![2.0], vec![3.0]]));
    for n in 3..=16u32 {
        jobs.push(job(move || many("lemma_james_case", ineq::james_case(n))));
    }
    jobs.push(job(ineq::proof_constants));
    for n in [8u32, 16, 32] {
        jobs.push(job(move || {
            one("discrete_ball_limit", vec![("n", n as f64)], ineq::discrete_ball_limit_check(n, 3.0))
        }));
    }
    jobs
}

fn lattice_jobs(cfg: &SuiteConfig) -> Vec<Job> {
    let boxes = lattice::random_boxes(cfg.seed, cfg.boxes, cfg.dims.clone(), cfg.max_side, 1_000_000);
    let mut jobs: Vec<Job> = boxes
        .into_iter()
        .map(|b| {
            job(move || {
                let mut out = many("lattice_box", lattice::verify_box(&b));
                out.extend(one("plancherel", vec![], lattice::plancherel_check(&b.lengths)));
                let shift: i64 = b.offsets.iter().sum();
                let degree: u64 = b.lengths.iter().map(|l| l - 1).sum();
                let k = shift + (degree / 2) as i64;
                match lattice::char_fn_bound_check(&b, k) {
                    Ok(rs) => out.extend(rs),
                    Err(lattice::LatticeError::CaseCondition { .. }) | Err(lattice::LatticeError::DegenerateBox) => {}
                    Err(e) => out.push(error_record("char_fn", &[], e)),
                }
                out
            })
        })
        .collect();
    jobs.push(job(|| many("tightness", tightness_checks(2000))));
    jobs
}

/// Monotone approach of the `(m, m)` ratio to `sqrt 2` for `m = 2..=m_max`.
pub fn tightness_checks(m_max: u64) -> Result<Vec<CheckReport>, lattice::LatticeError> {
    let ratios: Vec<f64> = (2..=m_max).into_par_iter().map(lattice::tightness_ratio).collect::<Result<_, _>>()?;
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let last = *ratios.last().unwrap_or(&f64::NAN);
    Ok(vec![
        flag("tightness_increasing", increasing).param("m_max", m_max as f64),
        CheckReport::new("tightness_limit", CheckKind::Strict, 0.999, last / 2f64.sqrt(), 0.0).param("m", m_max as f64),
    ])
}

/// Registered potentials; the last three are not centered.
pub fn entropy_registry() -> Vec<Potential> {
    vec![
        Potential::Quadratic { a: 0.0, b: 0.0 },
        Potential::Quadratic { a: (1.0 / 0.64 - 1.0) / 2.0, b: 0.0 },
        Potential::Quadratic { a: 1.5, b: 0.0 },
        Potential::Abs { c: 1.0, shift: 0.0 },
        Potential::Huber { c: 2.0, delta: 0.5, shift: 0.0 },
        Potential::Quadratic { a: 0.3, b: 0.7 },
        Potential::Abs { c: 0.5, shift: 1.0 },
        Potential::Huber { c: 1.0, delta: 1.0, shift: -0.8 },
    ]
}

fn potential_label(p: &Potential) -> String {
    match *p {
        Potential::Quadratic { a, b } => format!("quadratic(a={a},b={b})"),
        Potential::Abs { c, shift } => format!("abs(c={c},shift={shift})"),
        Potential::Huber { c, delta, shift } => format!("huber(c={c},delta={delta},shift={shift})"),
    }
}

/// Dominance records for one potential.
pub fn entropy_checks(p: Potential, qs: &[f64]) -> Result<Vec<CheckReport>, entropy::EntropyError> {
    let r = entropy::gaussian_dominance_check(p, qs)?;
    let label = potential_label(&p);
    let centered = if r.mean.abs() < 1e-9 { "centered" } else { "uncentered" };
    let note = format!("{label} {centered}");
    let mut out = vec![
        flag("slc_majorization", r.majorization.pass).with_note(note.clone()),
        flag("slc_characterizations", r.majorization.characterizations_agree).with_note(note.clone()),
        CheckReport::new("slc_transport", CheckKind::NonStrict, r.transport_sup, 1.0, transport::CONTRACTION_TOL)
            .with_note(note.clone()),
    ];
    for e in &r.entries {
        let budget = e.test.error_bound + e.gaussian.error_bound + 1e-12;
        out.push(
            CheckReport::new("renyi", CheckKind::NonStrict, e.test.renyi, e.gaussian.renyi, budget)
                .param("q", e.q)
                .with_note(note.clone()),
        );
        let ts = budget * (1.0 + e.gaussian.tsallis.abs().max(e.test.tsallis.abs()));
        out.push(
            CheckReport::new("tsallis", CheckKind::NonStrict, e.test.tsallis, e.gaussian.tsallis, ts)
                .param("q", e.q)
                .with_note(note.clone()),
        );
        out.push(
            CheckReport::new("psi_link", CheckKind::NonStrict, e.test.psi_consistency, 1e-9, 0.0)
                .param("q", e.q)
                .with_note(note.clone()),
        );
    }
    Ok(out)
}

fn entropy_jobs(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs: Vec<Job> = entropy_registry()
        .into_iter()
        .map(|p| {
            let qs = cfg.q.clone();
            job(move || many("entropy", entropy_checks(p, &qs)))
        })
        .collect();
    let qs = cfg.q.clone();
    jobs.push(job(move || {
        let gamma = named_density("gaussian", &[]).expect("registered");
        let f = named_density("gaussian", &[0.0, 0.8]).expect("registered");
        qs.iter()
            .filter(|&&q| q > 0.0)
            .map(|&q| {
                let gap = entropy::entropy(&f, q, entropy::EntropyKind::Renyi)
                    .and_then(|a| Ok(a - entropy::entropy(&gamma, q, entropy::EntropyKind::Renyi)?));
                match gap {
                    Ok(v) => CheckReport::new("sigma_gap", CheckKind::Equality, v, 0.8f64.ln(), 1e-9).param("q", q),
                    Err(e) => error_record("sigma_gap", &[("q", q)], e),
                }
            })
            .collect()
    }));
    let qs = cfg.q.clone();
    jobs.push(job(move || {
        let gamma = named_density("gaussian", &[]).expect("registered");
        let mut out = Vec::new();
        for m in [ExpandingMap::Scale(2.0), ExpandingMap::SineShear { a: 1.5, b: 0.3 }] {
            for &q in qs.iter().filter(|&&q| q > 0.0) {
                out.push(match entropy::derivative_inflation_check(&gamma, m, q) {
                    Ok(r) => r.with_note(format!("{m:?}")),
                    Err(e) => error_record("derivative_inflation", &[("q", q)], e),
                });
            }
        }
        out
    }));
    jobs
}

/// Distribution-function crossing level for a pair of measured densities.
pub fn crossing_level(f: &MeasuredDensity, g: &MeasuredDensity) -> Option<f64> {
    let top = f.sup().max(g.sup());
    let grid = numerics::logspace(1e-6 * top, top, 400);
    let r = measures::single_crossing(
        |l| f.distribution(l).unwrap_or(f64::NAN),
        |l| g.distribution(l).unwrap_or(f64::NAN),
        &grid,
        1e-12,
    );
    match r.crossing {
        CrossingOutcome::Single { lambda_o } => Some(lambda_o),
        _ => None,
    }
}

fn random_pair(rng: &mut ChaCha8Rng) -> (MeasuredDensity, MeasuredDensity, String) {
    // Unit-mass pairs on Lebesgue measure over the whole line whose
    // distribution functions cross once; f is the more concentrated member.
    let kind = rng.gen_range(0..3);
    let s1 = rng.gen_range(0.3..1.0);
    let s2 = s1 * rng.gen_range(1.2..3.0);
    let m1 = rng.gen_range(-1.0..1.0);
    let m2 = rng.gen_range(-1.0..1.0);
    let on_line = |name: &str, p: &[f64]| {
        let d = named_density(name, p).expect("valid parameters");
        MeasuredDensity::new(d, WeightedMeasure::lebesgue(Interval::real_line())).expect("compatible measure")
    };
    match kind {
        0 => (
            on_line("gaussian", &[m1, s1]),
            on_line("gaussian", &[m2, s2]),
            format!("gaussian({m1:.3},{s1:.3}) vs gaussian({m2:.3},{s2:.3})"),
        ),
        // Height 1/s1 exceeds the Gaussian peak 1/(s2 sqrt(2 pi)).
        1 => (
            on_line("indicator", &[m1, m1 + s1, 1.0 / s1]),
            on_line("gaussian", &[m2, s2]),
            format!("uniform({m1:.3},width {s1:.3}) vs gaussian({m2:.3},{s2:.3})"),
        ),
        _ => (
            on_line("indicator", &[m1, m1 + s1, 1.0 / s1]),
            on_line("indicator", &[m2, m2 + s2, 1.0 / s2]),
            format!("uniform({m1:.3},width {s1:.3}) vs uniform({m2:.3},width {s2:.3})"),
        ),
    }
}

/// Hockey-stick sweep of a single-crossing equal-mass pair.
pub fn single_crossing_pair_check(f: &MeasuredDensity, g: &MeasuredDensity, label: &str) -> Vec<CheckReport> {
    let crossing = crossing_level(f, g);
    let mut out = vec![flag("crossing_single", crossing.is_some()).with_note(label.to_string())];
    match convex_order::majorization_verdict(f, g, Mode::Standard, None, 1e-10) {
        Ok(v) => {
            out.push(
                CheckReport::new("crossing_sweep", CheckKind::NonStrict, -v.worst_margin, 0.0, v.error_budget)
                    .param("worst_t", v.worst_t)
                    .with_note(label.to_string()),
            );
            out.push(flag("characterizations_agree", v.characterizations_agree).with_note(label.to_string()));
        }
        Err(e) => out.push(error_record("crossing_sweep", &[], e)),
    }
    out
}

fn certificate_jobs(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    jobs.push(job(|| many("ball_certificate", ball_certificates())));
    jobs.push(job(|| many("discrete_certificate", discrete_certificate(3))));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..24 {
        let (f, g, label) = random_pair(&mut rng);
        jobs.push(job(move || single_crossing_pair_check(&f, &g, &label)));
    }
    jobs.push(job(|| many("family_violation", violation_detected())));
    jobs
}

/// Ball pair: majorization, characterization agreement, the power family,
/// and the NP ratio `phi(s)` nondecreasing.
pub fn ball_certificates() -> Result<Vec<CheckReport>, Box<dyn std::error::Error + Send + Sync>> {
    let (f, g) = ball_pair()?;
    let v = convex_order::majorization_verdict(&f, &g, Mode::Standard, None, 1e-10)?;
    let mut out = vec![
        CheckReport::new("ball_majorization", CheckKind::NonStrict, -v.worst_margin, 0.0, v.error_budget)
            .param("worst_t", v.worst_t),
        flag("ball_characterizations", v.characterizations_agree),
    ];
    let family: Vec<ConvexFunction> = [1.5, 2.0, 3.0, 6.0].into_iter().map(ConvexFunction::Power).collect();
    let fam = convex_order::convex_family_check(&f, &g, &family, Mode::Standard, 1e-11)?;
    for e in &fam.entries {
        let s = match e.function {
            ConvexFunction::Power(s) => s,
            _ => f64::NAN,
        };
        out.push(CheckReport::new("ball_power_margin", CheckKind::Strict, 0.0, e.margin, e.error_bound).param("s", s));
    }
    let lambda_o = crossing_level(&f, &g).ok_or("no single crossing for the Ball pair")?;
    let mut prev: Option<(f64, f64, f64)> = None;
    for s in [1.0, 1.5, 2.0, 3.0, 6.0] {
        let phi = measures::np_phi(&f, &g, lambda_o, s, 1e-12)?;
        if let Some((ps, pv, pe)) = prev {
            out.push(
                CheckReport::new("np_phi_monotone", CheckKind::NonStrict, pv, phi.value, pe + phi.error_bound)
                    .param("s0", ps)
                    .param("s1", s)
                    .param("lambda_o", lambda_o),
            );
        }
        prev = Some((s, phi.value, phi.error_bound));
    }
    Ok(out)
}

/// Vanishing-mode verdict for the discrete pair.
pub fn discrete_certificate(n: u32) -> Result<Vec<CheckReport>, Box<dyn std::error::Error + Send + Sync>> {
    let f = MeasuredDensity::lebesgue(named_density("discrete_ball_f", &[n as f64])?);
    let g = MeasuredDensity::lebesgue(named_density("discrete_ball_g", &[n as f64])?);
    let v = convex_order::majorization_verdict(&f, &g, Mode::Vanishing, None, 1e-11)?;
    Ok(vec![
        CheckReport::new("discrete_majorization", CheckKind::NonStrict, -v.worst_margin, 0.0, v.error_budget)
            .param("n", n as f64),
        flag("discrete_characterizations", v.characterizations_agree).param("n", n as f64),
    ])
}

/// A pair that violates the order must produce a negative margin.
pub fn violation_detected() -> Result<Vec<CheckReport>, Box<dyn std::error::Error + Send + Sync>> {
    // f spread flat over [0, 2], g concentrated on [0, 1]: g is not majorized by f.
    let f = MeasuredDensity::lebesgue(named_density("indicator", &[0.0, 2.0, 0.5])?);
    let g = MeasuredDensity::lebesgue(named_density("indicator", &[0.0, 1.0, 1.0])?);
    let fam = convex_order::convex_family_check(&f, &g, &[ConvexFunction::Power(2.0)], Mode::Standard, 1e-12)?;
    Ok(vec![CheckReport::new("violation_detected", CheckKind::Strict, fam.worst_margin, 0.0, fam.error_budget)])
}

fn jobs_for(suite: Suite, cfg: &SuiteConfig) -> Vec<Job> {
    match suite {
        Suite::Ball => ball_jobs(cfg),
        Suite::OpBessel => op_jobs(cfg),
        Suite::DiscreteBall => discrete_jobs(cfg),
        Suite::Lemmas => lemma_jobs(),
        Suite::Lattice => lattice_jobs(cfg),
        Suite::Entropy => entropy_jobs(cfg),
        Suite::Certificates => certificate_jobs(cfg),
        Suite::All => Vec::new(),
    }
}

/// Equality records are judged to at least `tol`.
fn widen(r: CheckReport, tol: f64) -> CheckReport {
    if r.kind != CheckKind::Equality || r.error_budget >= tol {
        return r;
    }
    let mut w = CheckReport::new(r.name, r.kind, r.lhs, r.rhs, tol);
    w.params = r.params;
    w.note = r.note;
    w
}

/// Run the configured suite on a pool of `jobs` threads (`0` uses the
/// rayon default). Records come back in job order whatever the pool size.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteRun, ConfigError> {
    cfg.validate()?;
    let suites: Vec<Suite> = if cfg.suite == Suite::All { Suite::CONCRETE.to_vec() } else { vec![cfg.suite] };
    let mut tagged: Vec<(Suite, Job)> = Vec::new();
    for s in suites {
        tagged.extend(jobs_for(s, cfg).into_iter().map(|j| (s, j)));
    }
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(|e| ConfigError::Pool(e.to_string()))?;
    let chunks: Vec<Vec<Record>> = pool.install(|| {
        tagged
            .par_iter()
            .map(|(s, j)| j().into_iter().map(|report| Record { suite: *s, report: widen(report, cfg.tol) }).collect())
            .collect()
    });
    Ok(SuiteRun { config: cfg.clone(), records: chunks.into_iter().flatten().collect() })
}

/// 17 significant digits, round-trip exact. Non-finite values become
/// `inf`, `-inf` or `nan`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt_num(x)
    } else {
        json_str(&fmt_num(x))
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn to_json(run: &SuiteRun) -> String {
    let mut o = String::new();
    o.push_str("{\n  \"schema\": ");
    let _ = write!(o, "{SCHEMA_VERSION}");
    o.push_str(",\n  \"config\": {");
    let cfg = run.config.canonical();
    for (i, (k, v)) in cfg.iter().enumerate() {
        let _ = write!(o, "{}{}: {}", if i == 0 { "" } else { ", " }, json_str(k), json_str(v));
    }
    let total = run.records.len();
    let passed = run.passed();
    let _ = write!(
        o,
        "}},\n  \"summary\": {{\"total\": {total}, \"passed\": {passed}, \"failed\": {}}},\n  \"records\": [",
        total - passed
    );
    let mut by_suite: BTreeMap<Suite, (usize, usize)> = BTreeMap::new();
    for (i, r) in run.records.iter().enumerate() {
        let e = by_suite.entry(r.suite).or_default();
        e.0 += 1;
        e.1 += r.report.ok() as usize;
        let c = &r.report;
        let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{}: {}", json_str(k), json_num(*v))).collect();
        let _ = write!(
            o,
            "{}\n    {{\"suite\": {}, \"name\": {}, \"params\": {{{}}}, \"kind\": {}, \"lhs\": {}, \"rhs\": {}, \"margin\": {}, \"error_budget\": {}, \"pass\": {}",
            if i == 0 { "" } else { "," },
            json_str(r.suite.label()),
            json_str(&c.name),
            params.join(", "),
            json_str(c.kind.label()),
            json_num(c.lhs),
            json_num(c.rhs),
            json_num(c.margin),
            json_num(c.error_budget),
            c.ok()
        );
        if let Some(n) = &c.note {
            let _ = write!(o, ", \"note\": {}", json_str(n));
        }
        o.push('}');
    }
    o.push_str("\n  ],\n  \"suites\": {");
    for (i, (s, (t, p))) in by_suite.iter().enumerate() {
        let _ =
            write!(o, "{}{}: {{\"total\": {t}, \"passed\": {p}}}", if i == 0 { "" } else { ", " }, json_str(s.label()));
    }
    o.push_str("}\n}\n");
    o
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(run: &SuiteRun) -> String {
    let mut o = String::from("suite,name,params,lhs,rhs,margin,error_budget,pass\n");
    for r in &run.records {
        let c = &r.report;
        let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={}", fmt_num(*v))).collect();
        let _ = writeln!(
            o,
            "{},{},{},{},{},{},{},{}",
            r.suite.label(),
            csv_field(&c.name),
            csv_field(&params.join(";")),
            fmt_num(c.lhs),
            fmt_num(c.rhs),
            fmt_num(c.margin),
            fmt_num(c.error_budget),
            c.ok()
        );
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_int_list("n", "2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_int_list("n", "2..4,9").unwrap(), vec![2, 3, 4, 9]);
        assert!(parse_int_list("n", "5..2").is_err());
        assert!(parse_int_list("n", "x").is_err());
        assert_eq!(parse_float_list("p", "2,4,8").unwrap(), vec![2.0, 4.0, 8.0]);
        assert_eq!(parse_float_list("p", "2..3:0.5").unwrap(), vec![2.0, 2.5, 3.0]);
        assert_eq!(parse_float_list("q", "1,inf").unwrap(), vec![1.0, f64::INFINITY]);
        assert_eq!(parse_dims("2..5").unwrap(), 2..=5);
        assert_eq!(SuiteConfig::default().p.len(), 125);
        assert_eq!(*SuiteConfig::default().p.last().unwrap(), 64.0);
    }

    #[test]
    fn config_file() {
        let mut c = SuiteConfig::default();
        c.apply_file("# comment\nsuite = ball\ns = 1, 2\n\noutput=csv\n").unwrap();
        assert_eq!(c.suite, Suite::Ball);
        assert_eq!(c.s, vec![1.0, 2.0]);
        assert_eq!(c.output, OutputFormat::Csv);
        assert!(matches!(c.apply_file("bogus = 1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(c.apply_file("suite"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(c.set("suite", "nope"), Err(ConfigError::UnknownSuite(_))));
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn small_discrete_run_is_deterministic() {
        let mut c = SuiteConfig { suite: Suite::DiscreteBall, ..Default::default() };
        c.set("n", "2..4").unwrap();
        c.set("p", "2,4").unwrap();
        c.grid = 257;
        c.jobs = 1;
        let a = run_suite(&c).unwrap();
        c.jobs = 3;
        let b = run_suite(&c).unwrap();
        assert_eq!(a.exit_code(), 0);
        assert_eq!(to_json(&a), to_json(&b));
        let csv = to_csv(&a);
        assert!(csv.starts_with("suite,name,params,lhs,rhs,margin,error_budget,pass\n"));
        assert_eq!(csv.lines().count(), a.records.len() + 1);
    }

    #[test]
    fn ball_equality_record() {
        let mut c = SuiteConfig { suite: Suite::Ball, ..Default::default() };
        c.set("s", "1").unwrap();
        c.grid = 257;
        let r = run_suite(&c).unwrap();
        let rec = &r.records[0].report;
        assert_eq!(rec.kind, CheckKind::Equality);
        assert!(rec.ok());
        assert_eq!(r.exit_code(), 0);
        let js = to_json(&r);
        assert!(js.contains("\"schema\": 1") && js.contains("\"kind\": \"equality\""));
    }
}
