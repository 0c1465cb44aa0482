//! Densities on intervals of the real line, weighted base measures,
//! distribution functions and the raw integrals behind majorization
//! certificates.

use std::f64::consts::PI;

use thiserror::Error;

use crate::numerics::{self, Interval, NumericsError, QuadratureResult, TailEstimate};
use crate::specfun::{dirichlet_kernel, erfc, inv_erfc, j0, j1, j2, sinc_pi};

/// Landau's uniform bound `|J_nu(x)| <= C x^{-1/3}`.
const LANDAU_C: f64 = 0.785_746_870_4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasuresError {
    #[error("unknown density `{0}`")]
    UnknownDensity(String),
    #[error("bad parameters for `{name}`: {reason}")]
    BadParams { name: String, reason: String },
    #[error("could not resolve the level set at lambda = {lambda}")]
    LevelSetResolutionFailure { lambda: f64 },
    #[error("no integrable tail available for `{name}` with exponent {exponent}")]
    NonIntegrable { name: String, exponent: f64 },
    #[error("weight {weight:?} is incompatible with support [{lo}, {hi}]")]
    IncompatibleMeasure { weight: Weight, lo: f64, hi: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, MeasuresError>;

/// Density of the base measure with respect to Lebesgue measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `u(x) = 1`
    Lebesgue,
    /// `u(x) = x` on `(0, inf)`
    Linear,
}

impl Weight {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Weight::Lebesgue => 1.0,
            Weight::Linear => x,
        }
    }

    /// Measure of `[a, b]`.
    pub fn measure(self, a: f64, b: f64) -> f64 {
        match self {
            Weight::Lebesgue => b - a,
            Weight::Linear => 0.5 * (b - a) * (b + a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedMeasure {
    pub weight: Weight,
    pub support: Interval,
}

impl WeightedMeasure {
    pub fn new(weight: Weight, support: Interval) -> Result<Self> {
        if weight == Weight::Linear && support.lo < 0.0 {
            return Err(MeasuresError::IncompatibleMeasure { weight, lo: support.lo, hi: support.hi });
        }
        Ok(Self { weight, support })
    }

    pub fn lebesgue(support: Interval) -> Self {
        Self { weight: Weight::Lebesgue, support }
    }

    pub fn linear() -> Self {
        Self { weight: Weight::Linear, support: Interval::half_line() }
    }

    pub fn total(&self) -> f64 {
        self.weight.measure(self.support.lo, self.support.hi)
    }
}

/// Convex potentials `V` of the strongly log-concave family `e^{-V} gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `a x^2 + b x`
    Quadratic { a: f64, b: f64 },
    /// `c |x - shift|`
    Abs { c: f64, shift: f64 },
    /// `c * huber_delta(x - shift)`
    Huber { c: f64, delta: f64, shift: f64 },
}

impl Potential {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Potential::Quadratic { a, b } => a * x * x + b * x,
            Potential::Abs { c, shift } => c * (x - shift).abs(),
            Potential::Huber { c, delta, shift } => {
                let u = (x - shift).abs();
                if u <= delta {
                    c * 0.5 * u * u
                } else {
                    c * delta * (u - 0.5 * delta)
                }
            }
        }
    }

    /// A subgradient of `V` at `x`.
    pub fn slope(&self, x: f64) -> f64 {
        match *self {
            Potential::Quadratic { a, b } => 2.0 * a * x + b,
            Potential::Abs { c, shift } => {
                let u = x - shift;
                if u == 0.0 {
                    0.0
                } else {
                    c * u.signum()
                }
            }
            Potential::Huber { c, delta, shift } => c * (x - shift).clamp(-delta, delta),
        }
    }

    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            Potential::Quadratic { .. } => vec![],
            Potential::Abs { shift, .. } => vec![shift],
            Potential::Huber { delta, shift, .. } => vec![shift - delta, shift + delta],
        }
    }

    /// Sampled midpoint convexity on `[-10, 10]`.
    pub fn is_midpoint_convex(&self) -> bool {
        let pts = numerics::linspace(-10.0, 10.0, 401);
        pts.iter().all(|&x| {
            [0.05, 0.5, 2.0, 7.0].iter().all(|&h| {
                let mid = self.value(x);
                let avg = 0.5 * (self.value(x - h) + self.value(x + h));
                mid <= avg + 1e-12 * (1.0 + avg.abs())
            })
        })
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let ok = match *self {
            Potential::Quadratic { a, b } => a.is_finite() && b.is_finite() && a > -0.5,
            Potential::Abs { c, shift } => c.is_finite() && shift.is_finite(),
            Potential::Huber { c, delta, shift } => {
                c.is_finite() && shift.is_finite() && delta > 0.0 && delta.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{self:?} does not define a normalizable density"))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    GaussPi,
    SincSq,
    ExpQuarterSq,
    BesselKernel,
    DiscreteBallF { n: u32, a: f64 },
    DiscreteBallG { n: u32 },
    Gaussian { mean: f64, sigma: f64 },
    StronglyLogConcave { potential: Potential, log_norm: f64, mode: f64 },
    Indicator { lo: f64, hi: f64, height: f64 },
}

/// A nonnegative function on an interval, drawn from a fixed registry.
#[derive(Debug, Clone, PartialEq)]
pub struct Density1D {
    pub name: &'static str,
    pub params: Vec<f64>,
    pub support: Interval,
    kind: Kind,
}

/// The truncation point `A` with `int_0^A e^{-pi (n^2-1) x^2} dx = 1/(2n)`.
pub fn discrete_ball_a(n: u32) -> f64 {
    let nf = n as f64;
    let r = (1.0 - 1.0 / (nf * nf)).sqrt();
    // 1 - r, written without cancellation
    let comp = 1.0 / (nf * nf * (1.0 + r));
    inv_erfc(comp).expect("argument in (0, 1)") / (PI * (nf * nf - 1.0)).sqrt()
}

fn param(name: &str, params: &[f64], i: usize) -> Result<f64> {
    params.get(i).copied().ok_or_else(|| MeasuresError::BadParams {
        name: name.to_string(),
        reason: format!("expected at least {} parameters, got {}", i + 1, params.len()),
    })
}

fn integer_param(name: &str, params: &[f64], i: usize, min: u32) -> Result<u32> {
    let v = param(name, params, i)?;
    if v.fract() != 0.0 || v < min as f64 || v > 1e6 {
        return Err(MeasuresError::BadParams {
            name: name.to_string(),
            reason: format!("n must be an integer >= {min}, got {v}"),
        });
    }
    Ok(v as u32)
}

/// Look up a density in the registry.
///
/// Keys: `gauss_pi`, `sinc_sq`, `exp_quartersq`, `bessel_kernel`,
/// `discrete_ball_f [n]`, `discrete_ball_g [n]`, `gaussian [mean, sigma]`,
/// `slc_quadratic [a, b]`, `slc_abs [c, shift]`, `slc_huber [c, delta, shift]`,
/// `indicator [lo, hi, height]`.
pub fn named_density(name: &str, params: &[f64]) -> Result<Density1D> {
    let bad = |reason: &str| MeasuresError::BadParams { name: name.to_string(), reason: reason.to_string() };
    let d = match name {
        "gauss_pi" => Density1D::new("gauss_pi", vec![], Interval::real_line(), Kind::GaussPi),
        "sinc_sq" => Density1D::new("sinc_sq", vec![], Interval::real_line(), Kind::SincSq),
        "exp_quartersq" => Density1D::new("exp_quartersq", vec![], Interval::half_line(), Kind::ExpQuarterSq),
        "bessel_kernel" => Density1D::new("bessel_kernel", vec![], Interval::half_line(), Kind::BesselKernel),
        "discrete_ball_f" => {
            let n = integer_param(name, params, 0, 2)?;
            let a = discrete_ball_a(n);
            Density1D::new("discrete_ball_f", vec![n as f64], Interval { lo: 0.0, hi: a }, Kind::DiscreteBallF { n, a })
        }
        "discrete_ball_g" => {
            let n = integer_param(name, params, 0, 2)?;
            Density1D::new("discrete_ball_g", vec![n as f64], Interval { lo: 0.0, hi: 0.5 }, Kind::DiscreteBallG { n })
        }
        "gaussian" => {
            let (mean, sigma) =
                if params.is_empty() { (0.0, 1.0) } else { (param(name, params, 0)?, param(name, params, 1)?) };
            if !(sigma > 0.0 && sigma.is_finite() && mean.is_finite()) {
                return Err(bad("sigma must be positive and finite"));
            }
            Density1D::new("gaussian", vec![mean, sigma], Interval::real_line(), Kind::Gaussian { mean, sigma })
        }
        "slc_quadratic" => {
            strongly_log_concave(Potential::Quadratic { a: param(name, params, 0)?, b: param(name, params, 1)? })?
        }
        "slc_abs" => {
            strongly_log_concave(Potential::Abs { c: param(name, params, 0)?, shift: param(name, params, 1)? })?
        }
        "slc_huber" => strongly_log_concave(Potential::Huber {
            c: param(name, params, 0)?,
            delta: param(name, params, 1)?,
            shift: param(name, params, 2)?,
        })?,
        "indicator" => {
            let (lo, hi, height) = (param(name, params, 0)?, param(name, params, 1)?, param(name, params, 2)?);
            if !(lo < hi && lo.is_finite() && hi.is_finite() && height > 0.0) {
                return Err(bad("need finite lo < hi and height > 0"));
            }
            Density1D::new("indicator", vec![lo, hi, height], Interval { lo, hi }, Kind::Indicator { lo, hi, height })
        }
        _ => return Err(MeasuresError::UnknownDensity(name.to_string())),
    };
    Ok(d)
}

/// `e^{-V} gamma / Z` for a convex potential `V`.
pub fn strongly_log_concave(potential: Potential) -> Result<Density1D> {
    let name = match potential {
        Potential::Quadratic { .. } => "slc_quadratic",
        Potential::Abs { .. } => "slc_abs",
        Potential::Huber { .. } => "slc_huber",
    };
    potential.validate().map_err(|reason| MeasuresError::BadParams { name: name.to_string(), reason })?;
    if !potential.is_midpoint_convex() {
        return Err(MeasuresError::BadParams { name: name.to_string(), reason: "potential is not convex".to_string() });
    }
    let params = match potential {
        Potential::Quadratic { a, b } => vec![a, b],
        Potential::Abs { c, shift } => vec![c, shift],
        Potential::Huber { c, delta, shift } => vec![c, delta, shift],
    };
    // Mode: root of the increasing map x + V'(x).
    let (mut lo, mut hi) = (-1e3_f64, 1e3_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid + potential.slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mode = 0.5 * (lo + hi);
    let log_norm = match potential {
        Potential::Quadratic { a, b } => {
            let k = 1.0 + 2.0 * a;
            // Z sqrt(2 pi) = sqrt(2 pi / k) e^{b^2 / (2k)}
            0.5 * (2.0 * PI / k).ln() + b * b / (2.0 * k)
        }
        _ => {
            let v_mode = potential.value(mode) + 0.5 * mode * mode;
            let h = |x: f64| (-(potential.value(x) + 0.5 * x * x - v_mode)).exp();
            let mut cuts = vec![mode - 40.0];
            cuts.extend(potential.kinks().into_iter().filter(|k| (k - mode).abs() < 40.0));
            cuts.push(mode);
            cuts.push(mode + 40.0);
            cuts.sort_by(f64::total_cmp);
            let iv = Interval::new(cuts[0], *cuts.last().unwrap())?;
            let r = numerics::integrate_with_breaks(h, iv, &cuts, 1e-14, 100_000)?;
            r.value.ln() - v_mode
        }
    };
    Ok(Density1D::new(name, params, Interval::real_line(), Kind::StronglyLogConcave { potential, log_norm, mode }))
}

/// Which tail of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `[a, inf)`
    Right,
    /// `(-inf, a]`
    Left,
}

/// Bisection for the crossing of a monotone function with `level`.
fn crossing(f: &dyn Fn(f64) -> f64, level: f64, mut a: f64, mut b: f64) -> f64 {
    let above_at_a = f(a) > level;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) > level) == above_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Zeros of `J1` (`order = 1`) or `J2` (`order = 2`) in `(0, limit]`.
fn bessel_zeros(order: u32, limit: f64) -> Vec<f64> {
    let (shift, mu) = if order == 1 { (0.25, 4.0) } else { (0.75, 16.0) };
    type Fun = fn(f64) -> f64;
    let (jf, djf): (Fun, Fun) =
        if order == 1 { (j1, |x| j0(x) - j1(x) / x) } else { (j2, |x| j1(x) - 2.0 * j2(x) / x) };
    let mut out = Vec::new();
    let mut k = 1.0;
    loop {
        let beta = (k + shift) * PI;
        if beta - 1.0 > limit {
            break;
        }
        let mut x = beta - (mu - 1.0) / (8.0 * beta);
        for _ in 0..6 {
            let step = jf(x) / djf(x);
            x -= step;
            if step.abs() < 1e-15 * x {
                break;
            }
        }
        if x <= limit {
            out.push(x);
        }
        k += 1.0;
    }
    out
}

/// Local maxima of `sinc^2` on `(0, limit]`: roots of `tan(pi x) = pi x`.
fn sinc_peaks(limit: f64) -> Vec<f64> {
    let h = |x: f64| PI * x * (PI * x).cos() - (PI * x).sin();
    let mut out = Vec::new();
    let mut k = 1.0;
    while k + 0.5 <= limit + 0.5 {
        let (mut a, mut b) = (k, k + 0.5);
        let ha = h(a);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (h(m) > 0.0) == (ha > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        let p = 0.5 * (a + b);
        if p <= limit {
            out.push(p);
        }
        k += 1.0;
    }
    out
}

impl Density1D {
    fn new(name: &'static str, params: Vec<f64>, support: Interval, kind: Kind) -> Self {
        Self { name, params, support, kind }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x >= self.support.lo && x <= self.support.hi) {
            return 0.0;
        }
        match self.kind {
            Kind::GaussPi => (-PI * x * x).exp(),
            Kind::SincSq => sinc_pi(x).powi(2),
            Kind::ExpQuarterSq => (-0.25 * x * x).exp(),
            Kind::BesselKernel => {
                let r = if x < 1e-3 {
                    let q = x * x / 8.0;
                    1.0 - q + q * q / 3.0
                } else {
                    2.0 * j1(x) / x
                };
                r * r
            }
            Kind::DiscreteBallF { n, .. } => {
                let m = (n as f64).powi(2) - 1.0;
                (-PI * m * x * x).exp()
            }
            Kind::DiscreteBallG { n } => dirichlet_kernel(n, x).powi(2),
            Kind::Gaussian { mean, sigma } => {
                let z = (x - mean) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            }
            Kind::StronglyLogConcave { potential, log_norm, .. } => {
                (-(potential.value(x) + 0.5 * x * x + log_norm)).exp()
            }
            Kind::Indicator { height, .. } => height,
        }
    }

    /// `(sup f, a maximizer)`.
    pub fn sup(&self) -> (f64, f64) {
        match self.kind {
            Kind::Gaussian { mean, .. } => (self.eval(mean), mean),
            Kind::StronglyLogConcave { mode, .. } => (self.eval(mode), mode),
            Kind::Indicator { lo, height, .. } => (height, lo),
            _ => (1.0, 0.0),
        }
    }

    /// Symmetric about 0 with support symmetric about 0.
    pub fn is_even(&self) -> bool {
        match self.kind {
            Kind::GaussPi | Kind::SincSq => true,
            Kind::Gaussian { mean, .. } => mean == 0.0,
            Kind::StronglyLogConcave { potential, .. } => match potential {
                Potential::Quadratic { b, .. } => b == 0.0,
                Potential::Abs { shift, .. } | Potential::Huber { shift, .. } => shift == 0.0,
            },
            _ => false,
        }
    }

    /// Radius beyond which `f <= lambda`.
    pub fn envelope_radius(&self, lambda: f64) -> f64 {
        let (sup, mode) = self.sup();
        if lambda >= sup {
            return 0.0;
        }
        let bounded = self.support.lo.abs().max(self.support.hi.abs());
        if self.support.is_finite() {
            return bounded;
        }
        if lambda <= 0.0 {
            return f64::INFINITY;
        }
        match self.kind {
            Kind::GaussPi => (-lambda.ln() / PI).sqrt(),
            Kind::SincSq => 1.0 / (PI * lambda.sqrt()),
            Kind::ExpQuarterSq => 2.0 * (-lambda.ln()).sqrt(),
            Kind::BesselKernel => (4.0 * LANDAU_C * LANDAU_C / lambda).powf(0.375).max(1.0),
            Kind::Gaussian { sigma, .. } => mode.abs() + sigma * (2.0 * (sup / lambda).ln()).sqrt(),
            // -log f is 1-strongly convex, so f(x) <= sup e^{-(x-mode)^2/2}
            Kind::StronglyLogConcave { .. } => mode.abs() + (2.0 * (sup / lambda).ln()).sqrt(),
            _ => bounded,
        }
    }

    /// Sorted points of `[lo, hi]` (endpoints included) between which `f`
    /// is monotone.
    pub fn critical_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = vec![lo, hi];
        let mirrored = |pos: Vec<f64>, pts: &mut Vec<f64>| {
            for p in pos {
                pts.push(p);
                pts.push(-p);
            }
        };
        let reach = lo.abs().max(hi.abs());
        match self.kind {
            Kind::SincSq => {
                let mut pos = sinc_peaks(reach);
                pos.extend((1..=reach.floor() as i64).map(|k| k as f64));
                pts.push(0.0);
                mirrored(pos, &mut pts);
            }
            Kind::BesselKernel => {
                pts.push(0.0);
                pts.extend(bessel_zeros(1, hi));
                pts.extend(bessel_zeros(2, hi));
            }
            Kind::DiscreteBallG { n } => {
                let nf = n as f64;
                let h = |x: f64| nf * (nf * PI * x).cos() * (PI * x).sin() - (nf * PI * x).sin() * (PI * x).cos();
                let mut k = 0;
                while (k as f64) / nf <= 0.5 {
                    pts.push(k as f64 / nf);
                    if k >= 1 && (k + 1) as f64 / nf <= 0.5 {
                        let (a, b) = (k as f64 / nf, (k + 1) as f64 / nf);
                        pts.push(crossing(&h, 0.0, a, b));
                    }
                    k += 1;
                }
                pts.push(0.5);
            }
            _ => pts.push(self.sup().1),
        }
        pts.retain(|&p| p >= lo && p <= hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Points in `(lo, hi)` where integrands built from `f` lose smoothness
    /// or oscillate.
    pub fn quad_breaks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = match self.kind {
            Kind::SincSq => {
                let (a, b) = (lo.max(-1e7).ceil() as i64, hi.min(1e7).floor() as i64);
                (a..=b).map(|k| k as f64).collect()
            }
            Kind::BesselKernel => bessel_zeros(1, hi.min(1e6)),
            Kind::DiscreteBallG { n } => (0..=n).map(|k| k as f64 / n as f64).collect(),
            Kind::StronglyLogConcave { potential, mode, .. } => {
                let mut v = potential.kinks();
                v.push(mode);
                v
            }
            Kind::Gaussian { mean, .. } => vec![mean],
            _ => vec![],
        };
        pts.retain(|&p| p > lo && p < hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Estimate of `int f^s w` over the tail beyond `a` on the given side.
    /// `None` when no integrable majorant is registered.
    pub fn power_tail(&self, weight: Weight, s: f64, a: f64, side: Side) -> Option<TailEstimate> {
        if !(s > 0.0) {
            return None;
        }
        let outside = match side {
            Side::Right => a >= self.support.hi,
            Side::Left => a <= self.support.lo,
        };
        if outside {
            return Some(TailEstimate::zero());
        }
        if weight == Weight::Linear && (side == Side::Left || a < 0.0) {
            return None;
        }
        // Even densities: the left tail at a is the right tail at -a.
        let (a, side) = if side == Side::Left && self.is_even() { (-a, Side::Right) } else { (a, side) };
        match (&self.kind, weight, side) {
            (Kind::GaussPi, Weight::Lebesgue, Side::Right) => {
                Some(TailEstimate::exact(erfc(a * (PI * s).sqrt()) / (2.0 * s.sqrt())))
            }
            (Kind::GaussPi, Weight::Linear, Side::Right) => {
                Some(TailEstimate::exact((-s * PI * a * a).exp() / (2.0 * PI * s)))
            }
            (Kind::ExpQuarterSq, Weight::Linear, Side::Right) => {
                Some(TailEstimate::exact(2.0 / s * (-0.25 * s * a * a).exp()))
            }
            (Kind::ExpQuarterSq, Weight::Lebesgue, Side::Right) => {
                Some(TailEstimate::exact((PI / s).sqrt() * erfc(0.5 * a * s.sqrt())))
            }
            (&Kind::Gaussian { mean, sigma }, Weight::Lebesgue, _) => {
                let coef = (2.0 * PI * sigma * sigma).powf(-0.5 * s) * sigma * (PI / (2.0 * s)).sqrt();
                let z = (a - mean) * s.sqrt() / (sigma * 2f64.sqrt());
                let z = if side == Side::Right { z } else { -z };
                Some(TailEstimate::exact(coef * erfc(z)))
            }
            (&Kind::StronglyLogConcave { mode, .. }, Weight::Lebesgue, _) => {
                let d = if side == Side::Right { a - mode } else { mode - a };
                if d < 0.0 {
                    return None;
                }
                let sup = self.sup().0;
                let bound = sup.powf(s) * (PI / (2.0 * s)).sqrt() * erfc(d * (0.5 * s).sqrt());
                Some(TailEstimate::from_bound(bound))
            }
            (Kind::SincSq, Weight::Lebesgue, Side::Right) if a >= 1.0 && 2.0 * s > 1.0 => {
                let scale = PI.powf(-2.0 * s);
                if a.fract() == 0.0 {
                    let cs = crate::specfun::sine_power_mean(s);
                    let lo = cs * crate::specfun::hurwitz_zeta(2.0 * s, a + 0.5);
                    let extra = s * (2.0 * s + 1.0) / 12.0 * crate::specfun::hurwitz_zeta(2.0 * s + 2.0, a);
                    Some(TailEstimate { value: scale * (lo + 0.5 * extra), half_width: scale * 0.5 * extra })
                } else {
                    Some(TailEstimate::from_bound(scale * a.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0)))
                }
            }
            (Kind::SincSq, Weight::Linear, Side::Right) if a >= 1.0 && s > 1.0 => {
                Some(TailEstimate::from_bound(PI.powf(-2.0 * s) * a.powf(2.0 - 2.0 * s) / (2.0 * s - 2.0)))
            }
            (Kind::BesselKernel, _, Side::Right) if a >= 2.31 => {
                if weight == Weight::Linear && s == 1.0 {
                    return Some(TailEstimate::exact(2.0 * (j1(a).powi(2) + j0(a).powi(2))));
                }
                // J1^2 <= kappa / x beyond a (Krasikov's envelope, x * envelope decreasing).
                let x2 = 4.0 * a * a;
                let env = 4.0 * (x2 - 21.0) / (PI * ((x2 - 15.0).powf(1.5) - 15.0));
                let kappa = (a * env).max(2.0 / PI) * (1.0 + 1e-12);
                let p = match weight {
                    Weight::Linear => 3.0 * s - 2.0,
                    Weight::Lebesgue => 3.0 * s - 1.0,
                };
                if p <= 0.0 {
                    return None;
                }
                Some(TailEstimate::from_bound((4.0 * kappa).powf(s) * a.powf(-p) / p))
            }
            _ => None,
        }
    }

    /// Distance past the mode (or start point) of the first truncation
    /// point for improper integrals.
    fn cut_distance(&self) -> f64 {
        match self.kind {
            Kind::Gaussian { sigma, .. } => 10.0 * sigma,
            Kind::StronglyLogConcave { .. } => 10.0,
            Kind::SincSq | Kind::BesselKernel => 16.0,
            _ => 8.0,
        }
    }

    /// Exact mass over `[lo, hi]` for densities whose cumulative has no
    /// registered closed form.
    pub fn known_mass(&self, weight: Weight, lo: f64, hi: f64) -> Option<f64> {
        let lo = lo.max(self.support.lo);
        let hi = hi.min(self.support.hi);
        match (&self.kind, weight) {
            (Kind::SincSq, Weight::Lebesgue) if hi == f64::INFINITY => {
                if lo == 0.0 {
                    Some(0.5)
                } else if lo == f64::NEG_INFINITY {
                    Some(1.0)
                } else {
                    None
                }
            }
            (&Kind::DiscreteBallG { n }, Weight::Lebesgue) if lo == 0.0 && hi == 0.5 => Some(0.5 / n as f64),
            (Kind::StronglyLogConcave { .. }, Weight::Lebesgue) if lo == f64::NEG_INFINITY && hi == f64::INFINITY => {
                Some(1.0)
            }
            _ => None,
        }
    }

    /// Closed form of `int_{-inf}^x f w` for whole-line densities, free of
    /// the cancellation in `total - upper_mass`.
    pub fn lower_mass(&self, weight: Weight, x: f64) -> Option<f64> {
        match (&self.kind, weight) {
            (Kind::GaussPi, Weight::Lebesgue) => Some(0.5 * erfc(-PI.sqrt() * x)),
            (&Kind::Gaussian { mean, sigma }, Weight::Lebesgue) => Some(0.5 * erfc((mean - x) / (sigma * 2f64.sqrt()))),
            _ => None,
        }
    }

    /// Closed form of `int_x^inf f w` where available.
    pub fn upper_mass(&self, weight: Weight, x: f64) -> Option<f64> {
        let x = x.max(self.support.lo);
        if x >= self.support.hi {
            return Some(0.0);
        }
        match (&self.kind, weight) {
            (Kind::GaussPi, Weight::Lebesgue) => Some(0.5 * erfc(PI.sqrt() * x)),
            (&Kind::Gaussian { mean, sigma }, Weight::Lebesgue) => Some(0.5 * erfc((x - mean) / (sigma * 2f64.sqrt()))),
            (Kind::ExpQuarterSq, Weight::Linear) => Some(2.0 * (-0.25 * x * x).exp()),
            (Kind::ExpQuarterSq, Weight::Lebesgue) => Some(PI.sqrt() * erfc(0.5 * x)),
            (Kind::BesselKernel, Weight::Linear) => Some(2.0 * (j1(x).powi(2) + j0(x).powi(2))),
            (&Kind::DiscreteBallF { n, a }, Weight::Lebesgue) => {
                let m = (n as f64).powi(2) - 1.0;
                let c = (PI * m).sqrt();
                Some((erfc(c * x) - erfc(c * a)) / (2.0 * m.sqrt()))
            }
            (&Kind::Indicator { hi, height, .. }, Weight::Lebesgue) => Some(height * (hi - x)),
            (&Kind::Indicator { hi, height, .. }, Weight::Linear) => Some(height * 0.5 * (hi - x) * (hi + x)),
            _ => None,
        }
    }
}

/// How to bound the tail contribution of `phi(f)` beyond a truncation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiTail {
    /// `phi(y) = y^s`
    Power(f64),
    /// `|phi(y)| <= coef * y^exponent` where `f <= 1`.
    Bounded { coef: f64, exponent: f64 },
}

/// A density paired with the base measure it is integrated against.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredDensity {
    pub density: Density1D,
    pub measure: WeightedMeasure,
}

impl MeasuredDensity {
    pub fn new(density: Density1D, measure: WeightedMeasure) -> Result<Self> {
        if measure.weight == Weight::Linear && measure.support.lo < 0.0 {
            return Err(MeasuresError::IncompatibleMeasure {
                weight: measure.weight,
                lo: measure.support.lo,
                hi: measure.support.hi,
            });
        }
        let lo = density.support.lo.max(measure.support.lo);
        let hi = density.support.hi.min(measure.support.hi);
        if !(lo < hi) {
            return Err(MeasuresError::IncompatibleMeasure { weight: measure.weight, lo, hi });
        }
        Ok(Self { density, measure })
    }

    /// Lebesgue measure on the density's own support.
    pub fn lebesgue(density: Density1D) -> Self {
        let measure = WeightedMeasure::lebesgue(density.support);
        Self { density, measure }
    }

    /// `x dx` on `(0, inf)`.
    pub fn linear(density: Density1D) -> Result<Self> {
        Self::new(density, WeightedMeasure::linear())
    }

    /// Same density and weight restricted to `[lo, hi]`.
    pub fn restricted(&self, lo: f64, hi: f64) -> Result<Self> {
        let measure = WeightedMeasure::new(self.measure.weight, Interval::new(lo, hi)?)?;
        Self::new(self.density.clone(), measure)
    }

    pub fn domain(&self) -> Interval {
        Interval {
            lo: self.density.support.lo.max(self.measure.support.lo),
            hi: self.density.support.hi.min(self.measure.support.hi),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let d = self.domain();
        if x < d.lo || x > d.hi {
            0.0
        } else {
            self.density.eval(x)
        }
    }

    pub fn weight(&self, x: f64) -> f64 {
        self.measure.weight.eval(x)
    }

    pub fn sup(&self) -> f64 {
        let d = self.domain();
        let (s, m) = self.density.sup();
        if m >= d.lo && m <= d.hi {
            s
        } else {
            // Unimodal densities peak at the domain end nearest the mode.
            self.density.eval(d.clamp(m))
        }
    }

    /// `int phi(f) w` over the domain.
    pub fn integrate_phi(&self, phi: &dyn Fn(f64) -> f64, tail: PhiTail, tol: f64) -> Result<QuadratureResult> {
        let d = self.domain();
        let w = self.measure.weight;
        let h = |x: f64| {
            let y = self.density.eval(x);
            if y == 0.0 {
                phi(0.0) * w.eval(x)
            } else {
                phi(y) * w.eval(x)
            }
        };
        let tail_at = |a: f64, side: Side| -> Result<TailEstimate> {
            let (s, coef, exact) = match tail {
                PhiTail::Power(s) => (s, 1.0, true),
                PhiTail::Bounded { coef, exponent } => (exponent, coef, false),
            };
            let t = self
                .density
                .power_tail(w, s, a, side)
                .ok_or_else(|| MeasuresError::NonIntegrable { name: self.density.name.to_string(), exponent: s })?;
            Ok(if exact { t } else { TailEstimate { value: 0.0, half_width: coef * (t.value + t.half_width) } })
        };
        match (d.lo.is_finite(), d.hi.is_finite()) {
            (true, true) => Ok(numerics::integrate_with_breaks(
                h,
                d,
                &self.density.quad_breaks(d.lo, d.hi),
                tol,
                numerics::DEFAULT_MAX_SUBDIVISIONS,
            )?),
            (true, false) => self.integrate_right(&h, d.lo, &tail_at, tol),
            (false, true) => self.integrate_left(&h, d.hi, &tail_at, tol),
            (false, false) => {
                let split = self.density.sup().1;
                let r = self.integrate_right(&h, split, &tail_at, 0.5 * tol)?;
                let l = self.integrate_left(&h, split, &tail_at, 0.5 * tol)?;
                Ok(l + r)
            }
        }
    }

    fn integrate_right(
        &self,
        h: &dyn Fn(f64) -> f64,
        a: f64,
        tail_at: &dyn Fn(f64, Side) -> Result<TailEstimate>,
        tol: f64,
    ) -> Result<QuadratureResult> {
        // Surface tail errors before the quadrature swallows them.
        let first = a.max(self.density.sup().1) + self.density.cut_distance();
        tail_at(first, Side::Right)?;
        let r = numerics::integrate_with_tail(
            h,
            a,
            first,
            |c| tail_at(c, Side::Right).unwrap_or(TailEstimate::from_bound(f64::INFINITY)),
            |c| self.density.quad_breaks(a, c),
            tol,
        )?;
        Ok(r)
    }

    fn integrate_left(
        &self,
        h: &dyn Fn(f64) -> f64,
        b: f64,
        tail_at: &dyn Fn(f64, Side) -> Result<TailEstimate>,
        tol: f64,
    ) -> Result<QuadratureResult> {
        let first = (-b).max(-self.density.sup().1) + self.density.cut_distance();
        tail_at(-first, Side::Left)?;
        let r = numerics::integrate_with_tail(
            |x| h(-x),
            -b,
            first,
            |c| tail_at(-c, Side::Left).unwrap_or(TailEstimate::from_bound(f64::INFINITY)),
            |c| {
                let mut v: Vec<f64> = self.density.quad_breaks(-c, b).into_iter().map(|x| -x).collect();
                v.sort_by(f64::total_cmp);
                v
            },
            tol,
        )?;
        Ok(r)
    }

    /// `int f^s w`.
    pub fn power_integral(&self, s: f64, tol: f64) -> Result<QuadratureResult> {
        self.integrate_phi(&|y| y.powf(s), PhiTail::Power(s), tol)
    }

    /// `int f w`, from a closed form when one is registered.
    pub fn mass(&self, tol: f64) -> Result<QuadratureResult> {
        let d = self.domain();
        if let Some(hi_tail) = self.density.upper_mass(self.measure.weight, d.lo) {
            let beyond = if d.hi.is_finite() { self.density.upper_mass(self.measure.weight, d.hi) } else { Some(0.0) };
            if let Some(b) = beyond {
                let v = hi_tail - b;
                return Ok(QuadratureResult {
                    value: v,
                    error_bound: 4.0 * f64::EPSILON * hi_tail.abs(),
                    subdivisions: 0,
                });
            }
        }
        self.power_integral(1.0, tol)
    }

    /// `{x in domain : f(x) > lambda}` as disjoint closed intervals.
    /// For `lambda <= 0` the whole domain is returned (zeros of `f` form a
    /// null set for every registered density).
    pub fn superlevel(&self, lambda: f64) -> Result<Vec<(f64, f64)>> {
        let d = self.domain();
        if lambda.is_nan() {
            return Err(MeasuresError::LevelSetResolutionFailure { lambda });
        }
        if lambda <= 0.0 {
            return Ok(vec![(d.lo, d.hi)]);
        }
        let r = self.density.envelope_radius(lambda);
        if !r.is_finite() {
            return Err(MeasuresError::LevelSetResolutionFailure { lambda });
        }
        let (lo, hi) = (d.lo.max(-r), d.hi.min(r));
        if !(lo < hi) {
            return Ok(vec![]);
        }
        let f = |x: f64| self.density.eval(x);
        let pts = self.density.critical_points(lo, hi);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (f(a), f(b));
            let piece = match (fa > lambda, fb > lambda) {
                (true, true) => Some((a, b)),
                (false, false) => None,
                (true, false) => Some((a, crossing(&f, lambda, a, b))),
                (false, true) => Some((crossing(&f, lambda, a, b), b)),
            };
            if let Some((x, y)) = piece {
                match out.last_mut() {
                    Some(last) if last.1 >= x => last.1 = y,
                    _ => out.push((x, y)),
                }
            }
        }
        Ok(out)
    }

    /// `mu{f > lambda}`.
    pub fn distribution(&self, lambda: f64) -> Result<f64> {
        let w = self.measure.weight;
        Ok(self.superlevel(lambda)?.iter().map(|&(a, b)| w.measure(a, b)).sum())
    }

    /// `int [f - t]_+ w` for `t >= 0`.
    pub fn hockey_stick(&self, t: f64, tol: f64) -> Result<QuadratureResult> {
        if t <= 0.0 {
            return self.mass(tol);
        }
        let pieces = self.superlevel(t)?;
        let w = self.measure.weight;
        let mut acc = QuadratureResult::exact(0.0);
        let share = tol / pieces.len().max(1) as f64;
        for (a, b) in pieces {
            if b <= a {
                continue;
            }
            let r = numerics::integrate_with_breaks(
                |x| (self.density.eval(x) - t).max(0.0) * w.eval(x),
                Interval::new(a, b)?,
                &self.density.quad_breaks(a, b),
                share,
                numerics::DEFAULT_MAX_SUBDIVISIONS,
            )?;
            acc = acc + r;
        }
        Ok(acc)
    }

    /// Values of `f` at its critical points with `f >= floor`, sorted.
    pub fn critical_values(&self, floor: f64) -> Vec<f64> {
        let d = self.domain();
        let r = self.density.envelope_radius(floor.max(1e-300));
        let (lo, hi) = (d.lo.max(-r), d.hi.min(r));
        if !(lo < hi) {
            return vec![];
        }
        let mut v: Vec<f64> = self
            .density
            .critical_points(lo, hi)
            .into_iter()
            .map(|x| self.density.eval(x))
            .filter(|&y| y >= floor)
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// Distribution function `lambda -> mu{f > lambda}` of a measured density.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFunction {
    pub source: MeasuredDensity,
}

impl DistributionFunction {
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        self.source.distribution(lambda)
    }
}

pub fn distribution_function(source: &MeasuredDensity) -> DistributionFunction {
    DistributionFunction { source: source.clone() }
}

/// `int [f - t]_+ dnu - int [g - t]_+ dmu`.
pub fn hockey_stick_gap(f: &MeasuredDensity, g: &MeasuredDensity, t: f64, tol: f64) -> Result<QuadratureResult> {
    Ok(f.hockey_stick(t, 0.5 * tol)? - g.hockey_stick(t, 0.5 * tol)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossingOutcome {
    /// `F - G` goes from `-` to `+` once, at `lambda_o`.
    Single { lambda_o: f64 },
    /// No sign change (identically zero or one-signed).
    NoCrossing,
    /// One sign change, from `+` to `-`.
    WrongDirection,
    /// More than one sign change.
    Multiple { changes: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingReport {
    pub crossing: CrossingOutcome,
    /// Run-length compressed signs of `F - G` along the grid, e.g. `"-0+"`.
    pub sign_pattern: String,
    pub grid: Vec<f64>,
    pub differences: Vec<f64>,
}

/// Scan `F - G` along an increasing grid and classify its sign changes.
/// Differences within `tol` of zero are treated as zero.
pub fn single_crossing<F, G>(f_dist: F, g_dist: G, grid: &[f64], tol: f64) -> CrossingReport
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let diff = |l: f64| f_dist(l) - g_dist(l);
    let differences: Vec<f64> = grid.iter().map(|&l| diff(l)).collect();
    let sign = |d: f64| {
        if d > tol {
            '+'
        } else if d < -tol {
            '-'
        } else {
            '0'
        }
    };
    let mut pattern = String::new();
    for &d in &differences {
        let c = sign(d);
        if !pattern.ends_with(c) {
            pattern.push(c);
        }
    }
    let strict: Vec<(usize, char)> =
        differences.iter().enumerate().map(|(i, &d)| (i, sign(d))).filter(|&(_, c)| c != '0').collect();
    let changes = strict.windows(2).filter(|w| w[0].1 != w[1].1).count();
    let crossing = match changes {
        0 => CrossingOutcome::NoCrossing,
        1 => {
            let k = strict.windows(2).position(|w| w[0].1 != w[1].1).unwrap();
            let (i, ci) = strict[k];
            let (j, _) = strict[k + 1];
            if ci == '+' {
                CrossingOutcome::WrongDirection
            } else {
                let (mut a, mut b) = (grid[i], grid[j]);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if diff(m) < 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                CrossingOutcome::Single { lambda_o: 0.5 * (a + b) }
            }
        }
        c => CrossingOutcome::Multiple { changes: c },
    };
    CrossingReport { crossing, sign_pattern: pattern, grid: grid.to_vec(), differences }
}

/// `phi(s) = (int f^s dnu - int g^s dmu) / (s lambda_o^s)`.
pub fn np_phi(f: &MeasuredDensity, g: &MeasuredDensity, lambda_o: f64, s: f64, tol: f64) -> Result<QuadratureResult> {
    if !(lambda_o > 0.0 && s > 0.0) {
        return Err(MeasuresError::BadParams {
            name: "np_phi".to_string(),
            reason: format!("need lambda_o > 0 and s > 0, got {lambda_o}, {s}"),
        });
    }
    let diff = f.power_integral(s, 0.5 * tol)? - g.power_integral(s, 0.5 * tol)?;
    Ok(diff.scale(1.0 / (s * lambda_o.powf(s))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball_pair() -> (MeasuredDensity, MeasuredDensity) {
        (
            MeasuredDensity::lebesgue(named_density("gauss_pi", &[]).unwrap()),
            MeasuredDensity::lebesgue(named_density("sinc_sq", &[]).unwrap()),
        )
    }

    #[test]
    fn registry_masses() {
        let (f, g) = ball_pair();
        assert!((f.mass(1e-12).unwrap().value - 1.0).abs() < 1e-12);
        let gm = g.power_integral(1.0, 1e-10).unwrap();
        assert!((gm.value - 1.0).abs() < 1e-9, "{gm:?}");

        let b = MeasuredDensity::linear(named_density("bessel_kernel", &[]).unwrap()).unwrap();
        let e = MeasuredDensity::linear(named_density("exp_quartersq", &[]).unwrap()).unwrap();
        assert!((b.mass(1e-10).unwrap().value - 2.0).abs() < 1e-14);
        assert!((e.mass(1e-10).unwrap().value - 2.0).abs() < 1e-14);
        let bq = b.power_integral(1.0, 1e-10).unwrap();
        assert!((bq.value - 2.0).abs() < 1e-9, "{bq:?}");

        for n in [2u32, 3, 7, 16] {
            let g = MeasuredDensity::lebesgue(named_density("discrete_ball_g", &[n as f64]).unwrap());
            let f = MeasuredDensity::lebesgue(named_density("discrete_ball_f", &[n as f64]).unwrap());
            let want = 0.5 / n as f64;
            assert!((g.power_integral(1.0, 1e-13).unwrap().value - want).abs() < 1e-12);
            assert!((f.mass(1e-13).unwrap().value - want).abs() < 1e-14);
            assert!((f.power_integral(1.0, 1e-13).unwrap().value - want).abs() < 1e-12);
        }
    }

    #[test]
    fn registry_errors() {
        assert!(matches!(named_density("nope", &[]), Err(MeasuresError::UnknownDensity(_))));
        assert!(matches!(named_density("discrete_ball_g", &[1.0]), Err(MeasuresError::BadParams { .. })));
        assert!(matches!(named_density("gaussian", &[0.0, -1.0]), Err(MeasuresError::BadParams { .. })));
        assert!(matches!(named_density("slc_quadratic", &[-1.0, 0.0]), Err(MeasuresError::BadParams { .. })));
        assert!(matches!(named_density("slc_abs", &[-1.0, 0.0]), Err(MeasuresError::BadParams { .. })));
    }

    #[test]
    fn strongly_log_concave_normalized() {
        for (name, p) in [
            ("slc_quadratic", vec![0.5, 0.3]),
            ("slc_abs", vec![1.0, 0.0]),
            ("slc_abs", vec![0.7, 1.5]),
            ("slc_huber", vec![2.0, 0.5, -0.3]),
        ] {
            let d = MeasuredDensity::lebesgue(named_density(name, &p).unwrap());
            let m = d.power_integral(1.0, 1e-12).unwrap();
            assert!((m.value - 1.0).abs() < 1e-11, "{name} {p:?}: {m:?}");
        }
    }

    #[test]
    fn distribution_examples() {
        let ind = MeasuredDensity::lebesgue(named_density("indicator", &[0.0, 1.0, 1.0]).unwrap());
        assert_eq!(ind.distribution(0.0).unwrap(), 1.0);
        assert_eq!(ind.distribution(0.5).unwrap(), 1.0);
        assert_eq!(ind.distribution(1.0).unwrap(), 0.0);
        assert_eq!(ind.distribution(2.0).unwrap(), 0.0);

        let (f, g) = ball_pair();
        for lambda in [1e-6_f64, 0.01, 0.3, 0.9, 0.999] {
            let want = 2.0 * ((1.0 / lambda).ln() / PI).sqrt();
            assert!((f.distribution(lambda).unwrap() - want).abs() < 1e-12);
        }
        assert_eq!(g.distribution(1.0).unwrap(), 0.0);
        assert_eq!(g.distribution(3.0).unwrap(), 0.0);
    }

    #[test]
    fn sinc_level_sets_match_brute_force() {
        let (_, g) = ball_pair();
        for lambda in [0.001, 0.02, 0.045, 0.2, 0.8] {
            let exact = g.distribution(lambda).unwrap();
            let h = 1e-5;
            let r = g.density.envelope_radius(lambda);
            let count = ((-r / h) as i64..=(r / h) as i64).filter(|&i| g.density.eval(i as f64 * h) > lambda).count();
            assert!((exact - count as f64 * h).abs() < 1e-4 * (1.0 + lambda.recip().sqrt()), "lambda {lambda}");
        }
    }

    #[test]
    fn hockey_stick_examples() {
        let f = MeasuredDensity::lebesgue(named_density("indicator", &[0.0, 1.0, 2.0]).unwrap());
        let g = MeasuredDensity::lebesgue(named_density("indicator", &[0.0, 2.0, 1.0]).unwrap());
        let gap = hockey_stick_gap(&f, &g, 1.0, 1e-12).unwrap();
        assert!((gap.value - 1.0).abs() < 1e-14);

        let (f, g) = ball_pair();
        let z = hockey_stick_gap(&f, &g, 0.0, 1e-10).unwrap();
        assert!(z.value.abs() <= z.error_bound + 1e-12, "{z:?}");
        let half = hockey_stick_gap(&f, &g, 0.5, 1e-11).unwrap();
        assert!(half.value >= -half.error_bound && half.value > 0.0, "{half:?}");
    }

    #[test]
    fn layer_cake() {
        let cases = vec![
            MeasuredDensity::lebesgue(named_density("gauss_pi", &[]).unwrap()),
            MeasuredDensity::linear(named_density("exp_quartersq", &[]).unwrap()).unwrap(),
            MeasuredDensity::lebesgue(named_density("discrete_ball_g", &[3.0]).unwrap()),
            MeasuredDensity::lebesgue(named_density("slc_abs", &[1.0, 0.5]).unwrap()),
        ];
        for d in cases {
            let mass = d.mass(1e-12).unwrap().value;
            let sup = d.sup();
            let r = numerics::integrate_with_breaks(
                |l| d.distribution(l).unwrap(),
                Interval::new(0.0, sup).unwrap(),
                &d.critical_values(0.0),
                1e-9,
                100_000,
            )
            .unwrap();
            assert!((r.value - mass).abs() < 1e-8 + r.error_bound, "{}: {} vs {}", d.density.name, r.value, mass);
        }
    }

    #[test]
    fn single_crossing_outcomes() {
        let grid = numerics::logspace(1e-3, 0.99, 80);
        let same = single_crossing(|l| l, |l| l, &grid, 1e-12);
        assert_eq!(same.crossing, CrossingOutcome::NoCrossing);

        let (f, g) = ball_pair();
        let rep = single_crossing(|l| f.distribution(l).unwrap(), |l| g.distribution(l).unwrap(), &grid, 1e-12);
        match rep.crossing {
            CrossingOutcome::Single { lambda_o } => assert!(lambda_o > 0.0 && lambda_o < 1.0),
            other => panic!("expected single crossing, got {other:?} ({})", rep.sign_pattern),
        }

        let step = |l: f64| if l < 0.5 { 1.0 } else { -1.0 };
        let rep = single_crossing(step, |_| 0.0, &grid, 1e-12);
        assert_eq!(rep.crossing, CrossingOutcome::WrongDirection);
        assert_eq!(rep.sign_pattern, "+-");
        let zigzag = |l: f64| if l < 0.2 || (0.4..0.6).contains(&l) { -1.0 } else { 1.0 };
        let rep = single_crossing(zigzag, |_| 0.0, &grid, 1e-12);
        assert_eq!(rep.crossing, CrossingOutcome::Multiple { changes: 3 });
    }

    #[test]
    fn np_phi_examples() {
        let (f, g) = ball_pair();
        let z = np_phi(&f, &f, 0.3, 2.0, 1e-12).unwrap();
        assert_eq!(z.value, 0.0);
        let one = np_phi(&f, &g, 0.3, 1.0, 1e-10).unwrap();
        assert!(one.value.abs() <= one.error_bound + 1e-9, "{one:?}");
        let vals: Vec<f64> = [1.5, 2.0, 3.0].iter().map(|&s| np_phi(&f, &g, 0.3, s, 1e-11).unwrap().value).collect();
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2], "{vals:?}");
    }

    #[test]
    fn discrete_ball_truncation() {
        let a2 = discrete_ball_a(2);
        let direct = crate::specfun::inv_erf(3f64.sqrt() / 2.0).unwrap() / (3.0 * PI).sqrt();
        assert!((a2 - direct).abs() < 1e-14);
        // mpmath: erfinv(sqrt(3)/2) / sqrt(3 pi)
        assert!((a2 - 0.345_174_205_179_585_75).abs() < 1e-14);
    }

    #[test]
    fn bessel_critical_points_interlace() {
        let z1 = bessel_zeros(1, 60.0);
        let z2 = bessel_zeros(2, 60.0);
        assert!((z1[0] - 3.831_705_970_207_512).abs() < 1e-13);
        assert!((z2[0] - 5.135_622_301_840_683).abs() < 1e-13);
        for (i, w) in z1.windows(2).enumerate() {
            assert!(w[0] < z2[i] && z2[i] < w[1]);
        }
    }

    #[test]
    fn tails_match_quadrature() {
        let (_, g) = ball_pair();
        for s in [1.0, 2.0, 3.5] {
            let t = g.density.power_tail(Weight::Lebesgue, s, 16.0, Side::Right).unwrap();
            let body = numerics::integrate_with_breaks(
                |x| g.density.eval(x).powf(s),
                Interval::new(16.0, 4096.0).unwrap(),
                &g.density.quad_breaks(16.0, 4096.0),
                1e-15,
                1_000_000,
            )
            .unwrap();
            let far = g.density.power_tail(Weight::Lebesgue, s, 4096.0, Side::Right).unwrap();
            let total = body.value + far.value;
            assert!((total - t.value).abs() <= t.half_width + far.half_width + 1e-14, "s = {s}");
        }
        let b = named_density("bessel_kernel", &[]).unwrap();
        for s in [1.5, 2.0] {
            let t = b.power_tail(Weight::Linear, s, 40.0, Side::Right).unwrap();
            let body = numerics::integrate_with_breaks(
                |x| b.eval(x).powf(s) * x,
                Interval::new(40.0, 4000.0).unwrap(),
                &b.quad_breaks(40.0, 4000.0),
                1e-14,
                1_000_000,
            )
            .unwrap();
            assert!(body.value <= t.value + t.half_width);
        }
    }
}
