//! Ball's integral inequality, the two-dimensional Bessel analogue, the
//! discrete Ball inequality, and the auxiliary lemmas of its proof.

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::measures::{discrete_ball_a, named_density, MeasuredDensity, MeasuresError};
use crate::numerics::{self, Interval, NumericsError, QuadratureResult};
use crate::report::{CheckKind, CheckReport};
use crate::specfun::{dirichlet_kernel, erfc, erfc_with_error, inv_erf, j0, j1, sinc};
use crate::transport::{self, Criterion, TransportError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InequalityError {
    #[error("unknown lemma `{0}`")]
    UnknownLemma(String),
    #[error("parameters out of domain for `{name}`: {reason}")]
    ParamOutOfDomain { name: String, reason: String },
    #[error(transparent)]
    Measures(#[from] MeasuresError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

pub type Result<T> = std::result::Result<T, InequalityError>;

/// Quadrature tolerance for theorem-level checks.
pub const CHECK_TOL: f64 = 1e-13;
/// Allowed deviation for constants printed to two significant figures.
pub const NEAR_EQUALITY_BUDGET: f64 = 5e-3;

const ROUNDING: f64 = 16.0 * f64::EPSILON;

fn out_of_domain(name: &str, reason: impl Into<String>) -> InequalityError {
    InequalityError::ParamOutOfDomain { name: name.to_string(), reason: reason.into() }
}

fn budget(q: &QuadratureResult, scale: f64) -> f64 {
    q.error_bound + ROUNDING * scale.abs()
}

/// `int (sin pi x / pi x)^{2s} dx < s^{-1/2}`, with equality at `s = 1`.
pub fn ball_check(s: f64) -> Result<CheckReport> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(out_of_domain("ball", format!("need s >= 1, got {s}")));
    }
    let g = MeasuredDensity::lebesgue(named_density("sinc_sq", &[])?);
    let lhs = g.power_integral(s, CHECK_TOL)?;
    let rhs = s.powf(-0.5);
    let kind = if s == 1.0 { CheckKind::Equality } else { CheckKind::Strict };
    Ok(CheckReport::new("ball", kind, lhs.value, rhs, budget(&lhs, rhs)).param("s", s))
}

/// `int_0^inf (2 J1(x)/x)^{2s} x dx <= 2/s`, with equality at `s = 1`.
pub fn op_bessel_check(s: f64) -> Result<CheckReport> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(out_of_domain("op_bessel", format!("need s >= 1, got {s}")));
    }
    let g = MeasuredDensity::linear(named_density("bessel_kernel", &[])?)?;
    let lhs = g.power_integral(s, CHECK_TOL)?;
    let rhs = 2.0 / s;
    let kind = if s == 1.0 { CheckKind::Equality } else { CheckKind::Strict };
    Ok(CheckReport::new("op_bessel", kind, lhs.value, rhs, budget(&lhs, rhs)).param("s", s))
}

/// `int_0^x g(t) t dt = 2 - 2 (J1^2(x) + J0^2(x))`, by direct quadrature.
pub fn op_cumulative_check(x: f64) -> Result<CheckReport> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(out_of_domain("op_cumulative", format!("need x > 0, got {x}")));
    }
    let d = named_density("bessel_kernel", &[])?;
    let breaks = d.quad_breaks(0.0, x);
    let lhs = numerics::integrate_with_breaks(
        |t| d.eval(t) * t,
        Interval::new(0.0, x)?,
        &breaks,
        1e-14,
        numerics::DEFAULT_MAX_SUBDIVISIONS,
    )?;
    let rhs = 2.0 - 2.0 * (j1(x).powi(2) + j0(x).powi(2));
    Ok(CheckReport::new("op_cumulative", CheckKind::Equality, lhs.value, rhs, budget(&lhs, 2.0) + 1e-13).param("x", x))
}

/// Truncation point and masses of the pair `g = D_n^2 1_{[0,1/2]}`,
/// `f = e^{-pi (n^2-1) x^2} 1_{[0,A]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteBallContext {
    pub n: u32,
    pub a: f64,
    pub g_mass: f64,
    pub f_mass: f64,
}

pub fn discrete_ball_context(n: u32) -> Result<DiscreteBallContext> {
    if n < 2 {
        return Err(out_of_domain("discrete_ball", format!("need n >= 2, got {n}")));
    }
    let nf = n as f64;
    let a = discrete_ball_a(n);
    let g_mass = 0.5 * kernel_power_integral(n, 2.0, 1e-15)?.value;
    let c = PI * (nf * nf - 1.0);
    let f_mass = numerics::integrate(|x| (-c * x * x).exp(), Interval::new(0.0, a)?, 1e-15)?.value;
    Ok(DiscreteBallContext { n, a, g_mass, f_mass })
}

/// `A` from the defining closed form through `inv_erf`, independent of the
/// cancellation-free evaluation used by the registry.
pub fn discrete_ball_a_via_erf(n: u32) -> f64 {
    let nf = n as f64;
    inv_erf((1.0 - 1.0 / (nf * nf)).sqrt()).unwrap_or(f64::NAN) / (PI * (nf * nf - 1.0)).sqrt()
}

/// `int_{-1/2}^{1/2} |sin(n pi x) / (n sin pi x)|^p dx`.
pub fn kernel_power_integral(n: u32, p: f64, tol: f64) -> Result<QuadratureResult> {
    let breaks: Vec<f64> = (1..=n / 2).map(|k| k as f64 / n as f64).collect();
    let half = numerics::integrate_with_breaks(
        |x| dirichlet_kernel(n, x).abs().powf(p),
        Interval::new(0.0, 0.5)?,
        &breaks,
        0.5 * tol,
        numerics::DEFAULT_MAX_SUBDIVISIONS,
    )?;
    Ok(half.scale(2.0))
}

/// `int_{-1/2}^{1/2} |D_n|^p < sqrt(2 / (p (n^2 - 1)))`.
pub fn discrete_ball_check(n: u32, p: f64) -> Result<CheckReport> {
    if n < 2 || !(p >= 2.0 && p.is_finite()) {
        return Err(out_of_domain("discrete_ball", format!("need n >= 2 and p >= 2, got n={n}, p={p}")));
    }
    let nf = n as f64;
    let rhs = (2.0 / (p * (nf * nf - 1.0))).sqrt();
    let lhs = kernel_power_integral(n, p, 1e-12 * rhs)?;
    Ok(CheckReport::new("discrete_ball", CheckKind::Strict, lhs.value, rhs, budget(&lhs, rhs))
        .param("n", nf)
        .param("p", p))
}

/// `sqrt((n^2-1)/n^2) int_{-n/2}^{n/2} |sin pi x / pi x|^p dx <= sqrt(2/p)`.
pub fn discrete_ball_limit_check(n: u32, p: f64) -> Result<CheckReport> {
    if n < 2 || !(p >= 2.0) {
        return Err(out_of_domain("discrete_ball_limit", format!("need n >= 2 and p >= 2, got n={n}, p={p}")));
    }
    let nf = n as f64;
    let half = 0.5 * nf;
    let breaks: Vec<f64> = (1..).map(|k| k as f64).take_while(|&k| k < half).collect();
    let q = numerics::integrate_with_breaks(
        |x| sinc(PI * x).abs().powf(p),
        Interval::new(0.0, half)?,
        &breaks,
        1e-14,
        numerics::DEFAULT_MAX_SUBDIVISIONS,
    )?
    .scale(2.0 * ((nf * nf - 1.0) / (nf * nf)).sqrt());
    let rhs = (2.0 / p).sqrt();
    Ok(CheckReport::new("discrete_ball_limit", CheckKind::NonStrict, q.value, rhs, budget(&q, rhs))
        .param("n", nf)
        .param("p", p))
}

/// `T' <= 1` for the monotone map between the two halves of the discrete pair.
pub fn discrete_ball_transport_check(n: u32, grid_points: usize) -> Result<CheckReport> {
    let g = MeasuredDensity::lebesgue(named_density("discrete_ball_g", &[n as f64])?);
    let f = MeasuredDensity::lebesgue(named_density("discrete_ball_f", &[n as f64])?);
    let map = transport::build_transport(&g, &f)?;
    let grid = numerics::linspace(0.0, 0.5, grid_points);
    let r = transport::contraction_report(&map, Criterion::TprimeLe1, &grid)?;
    Ok(CheckReport::new(
        "discrete_ball_transport",
        CheckKind::NonStrict,
        r.sup_observed,
        1.0,
        transport::CONTRACTION_TOL,
    )
    .param("n", n as f64)
    .param("worst_x", r.worst_x))
}

/// `g(x) = D_n(x)^2`.
fn g_n(n: u32, x: f64) -> f64 {
    dirichlet_kernel(n, x).powi(2)
}

/// `f(A) = e^{-pi (n^2-1) A^2}`.
pub fn f_at_a(n: u32) -> f64 {
    let nf = n as f64;
    let a = discrete_ball_a(n);
    (-PI * (nf * nf - 1.0) * a * a).exp()
}

/// Grid maximum refined by golden-section search around the best node.
pub fn grid_max(f: impl Fn(f64) -> f64, a: f64, b: f64, points: usize) -> (f64, f64) {
    let xs = numerics::linspace(a, b, points.max(3));
    let (mut i_best, mut v_best) = (0, f64::NEG_INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x);
        if v > v_best {
            i_best = i;
            v_best = v;
        }
    }
    let (mut lo, mut hi) = (xs[i_best.saturating_sub(1)], xs[(i_best + 1).min(xs.len() - 1)]);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
            break;
        }
        let (c, d) = (hi - r * (hi - lo), lo + r * (hi - lo));
        if f(c) >= f(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    let xm = 0.5 * (lo + hi);
    let vm = f(xm);
    if vm >= v_best {
        (xm, vm)
    } else {
        (xs[i_best], v_best)
    }
}

/// Registry keys accepted by [`named_lemma_check`].
pub const LEMMA_NAMES: [&str; 10] = [
    "erfc_engineering",
    "erfc_series",
    "lemma_final",
    "sinus_monotone",
    "kernel_gauss_dom",
    "forJames",
    "lemma_james",
    "pain",
    "g_star",
    "kk_refined",
];

fn need(name: &str, params: &[f64], k: usize) -> Result<()> {
    if params.len() < k {
        return Err(out_of_domain(name, format!("expected {k} parameters, got {}", params.len())));
    }
    Ok(())
}

fn as_n(name: &str, v: f64, min: u32) -> Result<u32> {
    if v.fract() != 0.0 || v < min as f64 || v > 1e6 {
        return Err(out_of_domain(name, format!("n must be an integer >= {min}, got {v}")));
    }
    Ok(v as u32)
}

/// Evaluate a named auxiliary inequality at the given parameters.
///
/// | key | params | inequality |
/// |---|---|---|
/// | `erfc_engineering` | `x >= 1/2` | `erfc x <= e^{-x^2}/6 + e^{-4x^2/3}/2` |
/// | `erfc_series` | `x > 0` | `(sqrt(pi)/2) erfc x <= e^{-x^2}(1/(2x) - 1/(4x^3) + 3/(8x^5))` |
/// | `lemma_final` | `y >= pi` | `(y + pi)|sin y| <= 1.68 y` |
/// | `sinus_monotone` | `0 < a <= b <= pi/2` | `(a/b) sin b <= sin a` |
/// | `kernel_gauss_dom` | `n, x in (0, 1/n)` | `D_n(x) <= e^{-(n^2-1) pi^2 x^2 / 6}` |
/// | `forJames` | `x > 0` | Gaussian tail past `f^{-1}(g(x))` `<=` sinc-squared tail past `x` |
/// | `lemma_james` | `n >= 3, x` in the end window | `g(x) <= f(A)` |
/// | `pain` | `n >= 5, x in [1/n, 1/2 - 1/n]` | `g/(2 sqrt(pi(n^2-1) log(1/g))) <= int_x^{1/2} g` |
/// | `g_star` | `n, g*, form` | sufficient condition for `f(A) >= g*` (form 0 or 1) |
/// | `kk_refined` | `s >= 9/8` | `int sinc^{2s} <= sqrt(3/pi) s^{-1/2}` |
pub fn named_lemma_check(name: &str, params: &[f64]) -> Result<CheckReport> {
    match name {
        "erfc_engineering" => {
            need(name, params, 1)?;
            let x = params[0];
            if !(x >= 0.5) {
                return Err(out_of_domain(name, format!("need x >= 1/2, got {x}")));
            }
            let lhs = erfc_with_error(x);
            let rhs = (-x * x).exp() / 6.0 + (-4.0 * x * x / 3.0).exp() / 2.0;
            Ok(CheckReport::new(name, CheckKind::NonStrict, lhs.value, rhs, lhs.est_abs_err + ROUNDING * rhs)
                .param("x", x))
        }
        "erfc_series" => {
            need(name, params, 1)?;
            let x = params[0];
            if !(x > 0.0) {
                return Err(out_of_domain(name, format!("need x > 0, got {x}")));
            }
            let e = erfc_with_error(x);
            let c = 0.5 * PI.sqrt();
            let lhs = c * e.value;
            let rhs = (-x * x).exp() * (0.5 / x - 0.25 / x.powi(3) + 0.375 / x.powi(5));
            Ok(CheckReport::new(name, CheckKind::NonStrict, lhs, rhs, c * e.est_abs_err + ROUNDING * rhs.abs())
                .param("x", x))
        }
        "lemma_final" => {
            need(name, params, 1)?;
            let y = params[0];
            if !(y >= PI) {
                return Err(out_of_domain(name, format!("need y >= pi, got {y}")));
            }
            let lhs = (y + PI) * y.sin().abs();
            let rhs = 1.68 * y;
            Ok(CheckReport::new(name, CheckKind::NonStrict, lhs, rhs, ROUNDING * rhs).param("y", y))
        }
        "sinus_monotone" => {
            need(name, params, 2)?;
            let (a, b) = (params[0], params[1]);
            if !(0.0 < a && a <= b && b <= FRAC_PI_2) {
                return Err(out_of_domain(name, format!("need 0 < a <= b <= pi/2, got a={a}, b={b}")));
            }
            let kind = if a == b { CheckKind::Equality } else { CheckKind::NonStrict };
            Ok(CheckReport::new(name, kind, a / b * b.sin(), a.sin(), ROUNDING).param("a", a).param("b", b))
        }
        "kernel_gauss_dom" => {
            need(name, params, 2)?;
            let n = as_n(name, params[0], 2)?;
            let x = params[1];
            let nf = n as f64;
            if !(x > 0.0 && x < 1.0 / nf) {
                return Err(out_of_domain(name, format!("need x in (0, 1/n), got {x}")));
            }
            let rhs = (-(nf * nf - 1.0) * PI * PI * x * x / 6.0).exp();
            Ok(CheckReport::new(name, CheckKind::NonStrict, dirichlet_kernel(n, x), rhs, ROUNDING)
                .param("n", nf)
                .param("x", x))
        }
        "forJames" => {
            need(name, params, 1)?;
            let x = params[0];
            if !(x > 0.0 && x.is_finite()) {
                return Err(out_of_domain(name, format!("need x > 0, got {x}")));
            }
            for_james(x)
        }
        "lemma_james" => {
            need(name, params, 2)?;
            let n = as_n(name, params[0], 3)?;
            let x = params[1];
            let nf = n as f64;
            let lo = (0.5 - 1.0 / nf).max(1.0 / nf);
            if !(x >= lo && x <= 0.5 && x > 1.0 / nf) {
                return Err(out_of_domain(name, format!("need x in [{lo}, 1/2] and x > 1/n, got {x}")));
            }
            let fa = f_at_a(n);
            Ok(CheckReport::new(name, CheckKind::NonStrict, g_n(n, x), fa, ROUNDING * fa).param("n", nf).param("x", x))
        }
        "pain" => {
            need(name, params, 2)?;
            let n = as_n(name, params[0], 5)?;
            let x = params[1];
            let nf = n as f64;
            if !(x >= 1.0 / nf && x <= 0.5 - 1.0 / nf) {
                return Err(out_of_domain(name, format!("need x in [1/n, 1/2 - 1/n], got {x}")));
            }
            let g = g_n(n, x);
            let lhs = if g == 0.0 { 0.0 } else { g / (2.0 * (PI * (nf * nf - 1.0) * (1.0 / g).ln()).sqrt()) };
            let breaks: Vec<f64> = (1..=n / 2).map(|k| k as f64 / nf).collect();
            let rhs = if x < 0.5 {
                numerics::integrate_with_breaks(
                    |t| g_n(n, t),
                    Interval::new(x, 0.5)?,
                    &breaks,
                    1e-15,
                    numerics::DEFAULT_MAX_SUBDIVISIONS,
                )?
            } else {
                QuadratureResult::exact(0.0)
            };
            Ok(CheckReport::new(name, CheckKind::NonStrict, lhs, rhs.value, budget(&rhs, lhs))
                .param("n", nf)
                .param("x", x))
        }
        "g_star" => {
            need(name, params, 2)?;
            let n = as_n(name, params[0], 2)?;
            let gs = params[1];
            let form = params.get(2).copied().unwrap_or(0.0);
            let nf = n as f64;
            let rhs = 0.5 / (nf * nf);
            let lhs = if form == 0.0 {
                if !(gs > 0.0 && gs <= (-0.25f64).exp()) {
                    return Err(out_of_domain(name, format!("need 0 < g* <= e^(-1/4), got {gs}")));
                }
                gs / 6.0 + gs.powf(4.0 / 3.0) / 2.0
            } else if form == 1.0 {
                if !(gs > 0.0 && gs < 1.0) {
                    return Err(out_of_domain(name, format!("need 0 < g* < 1, got {gs}")));
                }
                g_star_log_form(gs)
            } else {
                return Err(out_of_domain(name, format!("form must be 0 or 1, got {form}")));
            };
            Ok(CheckReport::new(name, CheckKind::NonStrict, lhs, rhs, ROUNDING * rhs)
                .param("n", nf)
                .param("g_star", gs)
                .param("form", form))
        }
        "kk_refined" => {
            need(name, params, 1)?;
            let s = params[0];
            if !(s >= 9.0 / 8.0 && s.is_finite()) {
                return Err(out_of_domain(name, format!("need s >= 9/8, got {s}")));
            }
            let g = MeasuredDensity::lebesgue(named_density("sinc_sq", &[])?);
            let lhs = g.power_integral(s, CHECK_TOL)?;
            let rhs = (3.0 / PI).sqrt() / s.sqrt();
            Ok(CheckReport::new(name, CheckKind::NonStrict, lhs.value, rhs, budget(&lhs, rhs)).param("s", s))
        }
        _ => Err(InequalityError::UnknownLemma(name.to_string())),
    }
}

fn g_star_log_form(gs: f64) -> f64 {
    let l = (1.0 / gs).ln();
    gs / (PI.sqrt() * l.sqrt()) * (1.0 - 0.5 / l + 0.75 / (l * l))
}

fn for_james(x: f64) -> Result<CheckReport> {
    let s = (PI * x).sin();
    let lhs = if s == 0.0 {
        0.0
    } else {
        let y = ((2.0 / PI) * (PI * x / s).abs().ln()).sqrt();
        0.5 * erfc(PI.sqrt() * y)
    };
    let breaks: Vec<f64> = (1..).map(|k| k as f64).take_while(|&k| k < x).collect();
    let head = numerics::integrate_with_breaks(
        |u| sinc(PI * u).powi(2),
        Interval::new(0.0, x)?,
        &breaks,
        1e-15,
        numerics::DEFAULT_MAX_SUBDIVISIONS,
    )?;
    let rhs = 0.5 - head.value;
    Ok(CheckReport::new("forJames", CheckKind::NonStrict, lhs, rhs, budget(&head, 1.0)).param("x", x))
}

/// `9 min(1/sin^2(theta pi), 4 sin^2((1+theta) pi/6))`, the lower bound on
/// `1/g` over `[1/n, 1/2]` for `n >= 6`.
pub fn theta_bound_n6(theta: f64) -> f64 {
    9.0 * (1.0 / (theta * PI).sin().powi(2)).min(4.0 * ((1.0 + theta) * PI / 6.0).sin().powi(2))
}

/// `25 min(sin^2(pi/5)/sin^2(theta pi), sin^2((1+theta) pi/5))`, the lower
/// bound on `1/g` over `[1/5, 3/10]` for `n = 5`.
pub fn theta_bound_n5(theta: f64) -> f64 {
    let s5 = (PI / 5.0).sin().powi(2);
    25.0 * (s5 / (theta * PI).sin().powi(2)).min(((1.0 + theta) * PI / 5.0).sin().powi(2))
}

/// Per-`n` constants behind `f(A) >= g` on the end window.
pub fn james_case(n: u32) -> Result<Vec<CheckReport>> {
    if n < 3 {
        return Err(out_of_domain("lemma_james", format!("need n >= 3, got {n}")));
    }
    let nf = n as f64;
    let tag = |r: CheckReport| r.param("n", nf);
    let mut out = Vec::new();
    let gn = |x: f64| g_n(n, x);
    let target = 0.5 / (nf * nf);
    match n {
        3 => {
            let (_, gmax) = grid_max(gn, 1.0 / 3.0, 0.5, 2001);
            out.push(CheckReport::new("james_gmax", CheckKind::Equality, gmax, 1.0 / 9.0, 1e-12));
            let v = 1.0 / 54.0 + 0.5 / 9f64.powf(4.0 / 3.0);
            out.push(CheckReport::new("james_chain_1", CheckKind::Strict, v, 0.046, ROUNDING));
            out.push(
                CheckReport::new("james_chain_2", CheckKind::Strict, 0.046, 0.055, ROUNDING)
                    .with_note("printed as 0.55 in the source; 0.055 is the intended constant"),
            );
            out.push(CheckReport::new("james_chain_3", CheckKind::Strict, 0.055, target, ROUNDING));
        }
        4 => {
            let x0 = (-2.0f64 / 3.0).acos() / (2.0 * PI);
            out.push(CheckReport::new("james_gx0", CheckKind::Equality, gn(x0), 2.0 / 27.0, 1e-14).param("x0", x0));
            let (_, gmax) = grid_max(gn, 0.25, 0.5, 2001);
            out.push(CheckReport::new("james_gmax", CheckKind::Equality, gmax, 2.0 / 27.0, 1e-12));
            let v = 2.0 / 162.0 + 2f64.powf(4.0 / 3.0) / (2.0 * 27f64.powf(4.0 / 3.0));
            out.push(CheckReport::new("james_value", CheckKind::Strict, v, 0.028, ROUNDING));
            out.push(CheckReport::new("james_target", CheckKind::Equality, target, 0.03125, 0.0));
            out.push(CheckReport::new("james_chain", CheckKind::Strict, 0.028, target, ROUNDING));
        }
        5 => {
            let x0 = 2.0 / PI * ((11.0 - 4.0 * 6f64.sqrt()) / 5.0).sqrt().atan();
            out.push(CheckReport::new("james_gx0", CheckKind::Equality, gn(x0), 1.0 / 16.0, 1e-14).param("x0", x0));
            let (_, gmax) = grid_max(gn, 0.2, 0.4, 2001);
            out.push(CheckReport::new("james_gmax", CheckKind::Equality, gmax, 1.0 / 16.0, 1e-12));
            let (_, gmax2) = grid_max(gn, 0.4, 0.5, 2001);
            out.push(CheckReport::new("james_gmax_right", CheckKind::Equality, gmax2, 1.0 / 25.0, 1e-12));
            let v = g_star_log_form(1.0 / 16.0);
            out.push(CheckReport::new("james_value", CheckKind::Equality, v, 0.019, 5e-4));
            out.push(CheckReport::new("james_chain", CheckKind::Strict, v, 0.02, ROUNDING));
            out.push(CheckReport::new("james_target", CheckKind::Equality, target, 0.02, 0.0));
        }
        _ => {
            let c = (PI / nf).cos();
            let (_, gmax) = grid_max(gn, 0.5 - 1.0 / nf, 0.5, 2001);
            let bound = 1.0 / (nf * nf * c * c);
            out.push(CheckReport::new("james_gbound", CheckKind::NonStrict, gmax, bound, ROUNDING * bound));
            let lhs = 1.0 / 6.0 + 0.5 / (nf * c).powf(2.0 / 3.0);
            out.push(CheckReport::new("james_rearranged", CheckKind::NonStrict, lhs, 0.5 * c * c, ROUNDING));
        }
    }
    // Direct check on the window, independent of the constants above.
    let lo = (0.5 - 1.0 / nf).max(1.0 / nf);
    let (_, gmax) = grid_max(gn, lo, 0.5, 4001);
    out.push(CheckReport::new("james_direct", CheckKind::NonStrict, gmax, f_at_a(n), ROUNDING));
    Ok(out.into_iter().map(tag).collect())
}

/// Numeric constants used along the discrete-Ball proof chain.
pub fn proof_constants() -> Vec<CheckReport> {
    let mut out = Vec::new();
    let t6 = theta_bound_n6(0.295);
    out.push(CheckReport::new("theta_n6", CheckKind::NonStrict, 14.0, t6, ROUNDING * 14.0).param("theta", 0.295));
    out.push(
        CheckReport::new("theta_n6_min", CheckKind::Equality, t6 / 9.0, 1.56, NEAR_EQUALITY_BUDGET)
            .param("theta", 0.295),
    );
    let (th6, best6) = grid_max(theta_bound_n6, 1e-3, 0.499, 4001);
    out.push(CheckReport::new("theta_n6_opt", CheckKind::NonStrict, best6, t6 * 1.01, 0.0).param("theta_opt", th6));
    let t5 = theta_bound_n5(0.299);
    out.push(CheckReport::new("theta_n5", CheckKind::NonStrict, 13.25, t5, ROUNDING * 14.0).param("theta", 0.299));
    let (th5, best5) = grid_max(theta_bound_n5, 1e-3, 0.499, 4001);
    out.push(CheckReport::new("theta_n5_opt", CheckKind::NonStrict, best5, t5 * 1.01, 0.0).param("theta_opt", th5));
    let c1 = 2.0 * (PI * 14f64.ln()).sqrt() * (35.0f64 / 36.0).sqrt();
    out.push(CheckReport::new("const_5.67", CheckKind::NonStrict, 5.67, c1, ROUNDING));
    out.push(CheckReport::new("const_1.68_sq", CheckKind::NonStrict, 2.0 * 1.68 * 1.68, 5.67, ROUNDING));
    let c2 = 2.0 * (24.0 * PI * 13.25f64.ln()).sqrt();
    out.push(CheckReport::new("const_27.9", CheckKind::NonStrict, 27.9, c2, ROUNDING));
    out.push(CheckReport::new("const_2.79", CheckKind::Equality, 25.0 * 27.9 / 250.0, 2.79, 1e-12));
    out.push(CheckReport::new("const_1.67", CheckKind::NonStrict, 1.67, 2.79f64.sqrt(), ROUNDING));
    out.push(CheckReport::new("discriminant", CheckKind::Strict, 400.0 - 4.0 * 16.0 * 6.67, 0.0, ROUNDING * 400.0));
    let n5_mass = 1.0 / 250.0;
    let q = numerics::integrate(|t| (5.0 * PI * t).sin().powi(2) / 25.0, Interval { lo: 0.21, hi: 0.41 }, 1e-16)
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    out.push(CheckReport::new("n5_window_mass", CheckKind::Equality, q, n5_mass, 1e-14));
    out.push(CheckReport::new(
        "n6_exact",
        CheckKind::NonStrict,
        1.0 / 6.0 + 0.5 / (6.0 * (PI / 6.0).cos()).powf(2.0 / 3.0),
        3.0 / 8.0,
        ROUNDING,
    ));
    out.push(CheckReport::new("final_ratio", CheckKind::NonStrict, 5.0 / 3.0, 1.68, ROUNDING));
    // Minimum of (pi x / sin pi x)^2 over x > 1 sits in (1, 2).
    let (_, neg_min) = grid_max(|x| -(PI * x / (PI * x).sin()).powi(2), 1.0 + 1e-6, 2.0 - 1e-6, 4001);
    out.push(CheckReport::new("forJames_ymin", CheckKind::Strict, 20.0, -neg_min, ROUNDING * 20.0));
    out.push(CheckReport::new("forJames_ylogy", CheckKind::NonStrict, 9.0 * PI, 20.0 * 20f64.ln(), ROUNDING));
    for n in 2..=64u32 {
        let nf = n as f64;
        let lhs = 0.5 / (nf * nf);
        let rhs = 1.0 / (nf * nf * (1.0 + (1.0 - 1.0 / (nf * nf)).sqrt()));
        out.push(CheckReport::new("erfc_target", CheckKind::NonStrict, lhs, rhs, ROUNDING * rhs).param("n", nf));
    }
    out
}

/// `H'(y*)`, `G(y*)` at `y* = 4.6244`, the location and value of the minimum
/// of `H`, and the empirical supremum of `(y + pi)|sin y| / y` on `[pi, 100]`.
pub fn lemma_final_aux() -> Vec<CheckReport> {
    let y = 4.6244f64;
    let h1 = 1.68 + y.sin() + (y + PI) * y.cos();
    let g = 1.68 * y * y.cos() - 1.68 * y.sin() - y.sin().powi(2);
    let mut out = vec![
        CheckReport::new("lemma_final_hprime", CheckKind::Equality, h1, 0.0014, 5e-5).param("y", y),
        CheckReport::new("lemma_final_g", CheckKind::Equality, g, -0.0015, 5e-5).param("y", y),
        CheckReport::new("lemma_final_g_sign", CheckKind::NonStrict, g, 0.0, 0.0).param("y", y),
    ];
    // H'(y1) = 0 with y1 <= y*.
    let hp = |t: f64| 1.68 + t.sin() + (t + PI) * t.cos();
    let y1 = numerics::invert_monotone(hp, 0.0, Interval { lo: 4.4, hi: 4.7 }, 1e-15).unwrap_or(f64::NAN);
    out.push(CheckReport::new("lemma_final_y1", CheckKind::NonStrict, y1, y, 0.0));
    let h = 1.68 * y1 + (y1 + PI) * y1.sin();
    out.push(CheckReport::new("lemma_final_hmin", CheckKind::NonStrict, 0.0, h, ROUNDING * 10.0).param("y1", y1));
    let mut best = (PI, 0.0f64);
    let mut lo = PI;
    while lo < 100.0 {
        let hi = (lo + 0.5).min(100.0);
        let (x, v) = grid_max(|t| (t + PI) * t.sin().abs() / t, lo, hi, 64);
        if v > best.1 {
            best = (x, v);
        }
        lo = hi;
    }
    out.push(
        CheckReport::new("lemma_final_sup", CheckKind::NonStrict, best.1, 1.68, ROUNDING)
            .param("argmax", best.0)
            .with_note("empirical supremum; optimality of 1.68 is not claimed"),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_values() {
        let r = ball_check(1.0).unwrap();
        assert!(r.ok() && r.margin.abs() <= 1e-9, "{r}");
        let r = ball_check(2.0).unwrap();
        assert!((r.lhs - 2.0 / 3.0).abs() < 1e-9 && r.ok(), "{r}");
        assert!((r.rhs - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(ball_check(0.5).is_err());
    }

    #[test]
    fn op_values() {
        let r = op_bessel_check(1.0).unwrap();
        assert!(r.margin.abs() < 1e-9, "{r}");
        let r = op_bessel_check(2.0).unwrap();
        assert!(r.ok() && r.lhs < 1.0, "{r}");
        for x in [1.0, 5.0, 10.0] {
            let r = op_cumulative_check(x).unwrap();
            assert!(r.margin.abs() < 1e-8, "{r}");
        }
    }

    #[test]
    fn discrete_spot_values() {
        let r = discrete_ball_check(2, 2.0).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-9 && (r.rhs - 1.0 / 3f64.sqrt()).abs() < 1e-12 && r.ok());
        let r = discrete_ball_check(3, 2.0).unwrap();
        assert!((r.lhs - 1.0 / 3.0).abs() < 1e-9 && (r.rhs - 0.125f64.sqrt()).abs() < 1e-12 && r.ok());
        assert!(discrete_ball_check(4, 6.0).unwrap().ok());
        assert!(discrete_ball_check(1, 2.0).is_err());
    }

    #[test]
    fn context_masses() {
        for n in [2, 3, 7, 20] {
            let c = discrete_ball_context(n).unwrap();
            let half = 0.5 / n as f64;
            assert!((c.g_mass - half).abs() < 1e-10 && (c.f_mass - half).abs() < 1e-10, "{c:?}");
            assert!((c.a - discrete_ball_a_via_erf(n)).abs() < 1e-10 * c.a.max(1.0));
        }
        // mpmath: erfinv(sqrt(3)/2) / sqrt(3 pi)
        assert!((discrete_ball_context(2).unwrap().a - 0.34517420517958575).abs() < 1e-12);
    }

    #[test]
    fn limit_recovery() {
        for n in [8, 16] {
            assert!(discrete_ball_limit_check(n, 3.0).unwrap().ok());
        }
    }

    #[test]
    fn lemma_registry() {
        assert!(named_lemma_check("erfc_engineering", &[0.5]).unwrap().ok());
        assert!(named_lemma_check("erfc_series", &[3.0]).unwrap().ok());
        assert!(named_lemma_check("lemma_final", &[4.6244]).unwrap().ok());
        let r = named_lemma_check("sinus_monotone", &[0.7, 0.7]).unwrap();
        assert_eq!(r.kind, CheckKind::Equality);
        assert!(r.ok());
        assert!(named_lemma_check("kernel_gauss_dom", &[6.0, 0.1]).unwrap().ok());
        for x in [0.3, 1.5, 2.5, 7.2] {
            assert!(named_lemma_check("forJames", &[x]).unwrap().ok(), "x = {x}");
        }
        assert!(named_lemma_check("lemma_james", &[3.0, 0.45]).unwrap().ok());
        assert!(named_lemma_check("pain", &[7.0, 0.2]).unwrap().ok());
        assert!(named_lemma_check("g_star", &[3.0, 1.0 / 9.0]).unwrap().ok());
        assert!(named_lemma_check("g_star", &[5.0, 1.0 / 16.0, 1.0]).unwrap().ok());
        assert!(named_lemma_check("kk_refined", &[2.0]).unwrap().ok());
        assert!(matches!(named_lemma_check("nope", &[]), Err(InequalityError::UnknownLemma(_))));
        assert!(matches!(named_lemma_check("lemma_final", &[1.0]), Err(InequalityError::ParamOutOfDomain { .. })));
        assert!(matches!(named_lemma_check("lemma_james", &[4.0, 0.1]), Err(InequalityError::ParamOutOfDomain { .. })));
    }

    #[test]
    fn james_constants() {
        for n in 3..=12 {
            for r in james_case(n).unwrap() {
                assert!(r.ok(), "{r}");
            }
        }
        let r4 = james_case(4).unwrap();
        let v = r4.iter().find(|r| r.name == "james_value").unwrap();
        assert!(v.lhs < 0.028);
        let r5 = james_case(5).unwrap();
        let v = r5.iter().find(|r| r.name == "james_value").unwrap();
        assert!((v.lhs - 0.019).abs() < 5e-4);
    }

    #[test]
    fn constants_and_final_lemma() {
        for r in proof_constants() {
            assert!(r.ok(), "{r}");
        }
        let aux = lemma_final_aux();
        for r in &aux {
            assert!(r.ok(), "{r}");
        }
        let sup = aux.iter().find(|r| r.name == "lemma_final_sup").unwrap();
        // mpmath: max of (y + pi)|sin y|/y is 1.6728552486559429 at 4.625156
        assert!((sup.lhs - 1.672_855_248_655_943).abs() < 1e-10);
    }

    #[test]
    fn theta_values() {
        assert!((theta_bound_n6(0.295) / 9.0 - 1.56).abs() < 5e-3);
        assert!(theta_bound_n6(0.295) >= 14.0);
        assert!(theta_bound_n5(0.299) >= 13.25);
    }
}
