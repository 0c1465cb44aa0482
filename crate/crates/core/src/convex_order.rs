//! Convex-order (majorization) verdicts between pushforward measures
//! `f#nu` and `g#mu`.
//!
//! A verdict sweeps the hockey-stick gap `int [f-t]_+ dnu - int [g-t]_+ dmu`
//! over a grid of levels and cross-checks it against the layer-cake form
//! `int_t^inf (nu{f > l} - mu{g > l}) dl`.

use rayon::prelude::*;
use thiserror::Error;

use crate::measures::{MeasuredDensity, MeasuresError, PhiTail};
use crate::numerics::{self, Interval, NumericsError, QuadratureResult};

/// Absolute tolerance on mass and moment preconditions.
pub const PRECONDITION_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvexOrderError {
    #[error("base measures differ in total mass: {nu_total} vs {mu_total}")]
    PreconditionMassMismatch { nu_total: f64, mu_total: f64 },
    #[error("first moments differ: {lhs} vs {rhs}")]
    PreconditionMomentMismatch { lhs: f64, rhs: f64 },
    #[error("empty or non-positive level grid")]
    BadGrid,
    #[error(transparent)]
    Measures(#[from] MeasuresError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, ConvexOrderError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// All convex test functions.
    Standard,
    /// Convex test functions with `phi(0) = 0`.
    Vanishing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSample {
    pub t: f64,
    /// Hockey-stick form.
    pub gap: f64,
    pub gap_err: f64,
    /// Layer-cake form.
    pub tail_form: f64,
    pub tail_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationVerdict {
    pub mode: Mode,
    pub pass: bool,
    pub worst_t: f64,
    pub worst_margin: f64,
    pub error_budget: f64,
    pub characterizations_agree: bool,
    pub samples: Vec<GapSample>,
}

/// 64 log-spaced levels over `[1e-4 sup, sup]`.
pub fn default_t_grid(sup: f64) -> Vec<f64> {
    numerics::logspace(1e-4 * sup, sup, 64)
}

/// Check the mode's preconditions; returns the two first moments.
pub fn check_preconditions(
    f: &MeasuredDensity,
    g: &MeasuredDensity,
    mode: Mode,
    tol: f64,
) -> Result<(QuadratureResult, QuadratureResult)> {
    if mode == Mode::Standard {
        let (nu, mu) = (f.measure.total(), g.measure.total());
        let same = match (nu.is_finite(), mu.is_finite()) {
            (true, true) => (nu - mu).abs() <= PRECONDITION_TOL,
            (false, false) => f.measure.weight == g.measure.weight,
            _ => false,
        };
        if !same {
            return Err(ConvexOrderError::PreconditionMassMismatch { nu_total: nu, mu_total: mu });
        }
    }
    let mf = f.mass(tol)?;
    let mg = g.mass(tol)?;
    if (mf.value - mg.value).abs() > PRECONDITION_TOL + mf.error_bound + mg.error_bound {
        return Err(ConvexOrderError::PreconditionMomentMismatch { lhs: mf.value, rhs: mg.value });
    }
    Ok((mf, mg))
}

/// Layer-cake integrals `int_t^top (F - G) dl` for every `t` in `grid`,
/// accumulated over cells bounded by grid points and critical values.
fn layer_cake_tails(f: &MeasuredDensity, g: &MeasuredDensity, grid: &[f64], tol: f64) -> Result<Vec<QuadratureResult>> {
    let lo = grid[0];
    let top = f.sup().max(g.sup());
    let mut knots: Vec<f64> = grid.to_vec();
    knots.extend(f.critical_values(lo));
    knots.extend(g.critical_values(lo));
    knots.push(top);
    knots.retain(|&x| x >= lo && x <= top);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let share = tol / knots.len() as f64;
    let diff = |l: f64| -> f64 {
        match (f.distribution(l), g.distribution(l)) {
            (Ok(a), Ok(b)) => a - b,
            _ => f64::NAN,
        }
    };
    // Smoothstep substitution removes square-root behaviour at cell ends.
    let cells: Vec<QuadratureResult> = knots
        .par_windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let h = b - a;
            numerics::integrate_with_breaks(
                |u| {
                    let l = a + h * u * u * (3.0 - 2.0 * u);
                    diff(l) * 6.0 * h * u * (1.0 - u)
                },
                Interval { lo: 0.0, hi: 1.0 },
                &[],
                share,
                numerics::DEFAULT_MAX_SUBDIVISIONS,
            )
        })
        .collect::<std::result::Result<_, _>>()?;
    // Suffix sums, then pick out the grid points.
    let mut suffix = vec![QuadratureResult::exact(0.0); knots.len()];
    for i in (0..cells.len()).rev() {
        suffix[i] = suffix[i + 1] + cells[i];
    }
    Ok(grid
        .iter()
        .map(|t| {
            // Levels above the top of both ranges contribute nothing.
            let i = knots.partition_point(|&k| k < *t).min(knots.len() - 1);
            suffix[i]
        })
        .collect())
}

fn gaps(f: &MeasuredDensity, g: &MeasuredDensity, ts: &[f64], tol: f64) -> Result<Vec<QuadratureResult>> {
    let out: std::result::Result<Vec<_>, MeasuresError> =
        ts.par_iter().map(|&t| crate::measures::hockey_stick_gap(f, g, t, tol)).collect();
    Ok(out?)
}

/// Verdict on `g#mu` being majorized by `f#nu`.
pub fn majorization_verdict(
    f: &MeasuredDensity,
    g: &MeasuredDensity,
    mode: Mode,
    t_grid: Option<&[f64]>,
    tol: f64,
) -> Result<MajorizationVerdict> {
    check_preconditions(f, g, mode, tol)?;
    let top = f.sup().max(g.sup());
    let mut grid: Vec<f64> = match t_grid {
        Some(g) => g.to_vec(),
        None => default_t_grid(top),
    };
    if grid.is_empty() || grid.iter().any(|t| !(*t > 0.0)) {
        return Err(ConvexOrderError::BadGrid);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let coarse = gaps(f, g, &grid, tol)?;
    let worst = worst_index(&coarse);
    // Refine 4x around the coarse minimum.
    let (a, b) = (grid[worst.saturating_sub(1)], grid[(worst + 1).min(grid.len() - 1)]);
    let mut extra = Vec::new();
    if b > a {
        for w in [(a, grid[worst]), (grid[worst], b)] {
            if w.1 > w.0 {
                let pts = numerics::logspace(w.0, w.1, 5);
                extra.extend_from_slice(&pts[1..4]);
            }
        }
    }
    let extra_gaps = gaps(f, g, &extra, tol)?;
    let mut merged: Vec<(f64, QuadratureResult)> = grid.iter().copied().zip(coarse).collect();
    merged.extend(extra.iter().copied().zip(extra_gaps));
    merged.sort_by(|x, y| x.0.total_cmp(&y.0));
    merged.dedup_by(|x, y| x.0 == y.0);

    let ts: Vec<f64> = merged.iter().map(|m| m.0).collect();
    let tails = layer_cake_tails(f, g, &ts, tol)?;
    let samples: Vec<GapSample> = merged
        .iter()
        .zip(&tails)
        .map(|(&(t, gap), tail)| GapSample {
            t,
            gap: gap.value,
            gap_err: gap.error_bound,
            tail_form: tail.value,
            tail_err: tail.error_bound,
        })
        .collect();
    let results: Vec<QuadratureResult> = merged.iter().map(|m| m.1).collect();
    let w = worst_index(&results);
    let slack = 8.0 * f64::EPSILON * (1.0 + top);
    let agree = samples.iter().all(|s| (s.gap - s.tail_form).abs() <= s.gap_err + s.tail_err + slack);
    Ok(MajorizationVerdict {
        mode,
        pass: samples.iter().all(|s| s.gap >= -s.gap_err),
        worst_t: samples[w].t,
        worst_margin: samples[w].gap,
        error_budget: samples[w].gap_err,
        characterizations_agree: agree,
        samples,
    })
}

fn worst_index(r: &[QuadratureResult]) -> usize {
    r.iter()
        .enumerate()
        .min_by(|a, b| (a.1.value + a.1.error_bound).total_cmp(&(b.1.value + b.1.error_bound)))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Convex test functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvexFunction {
    /// `x^s`, `s >= 1`
    Power(f64),
    /// `[x - t]_+`
    HockeyStick(f64),
    /// `x log x`
    XLogX,
    /// `-x^q`, `0 < q < 1`
    NegPower(f64),
}

impl ConvexFunction {
    pub fn label(&self) -> String {
        match self {
            ConvexFunction::Power(s) => format!("x^{s}"),
            ConvexFunction::HockeyStick(t) => format!("[x-{t}]+"),
            ConvexFunction::XLogX => "x log x".to_string(),
            ConvexFunction::NegPower(q) => format!("-x^{q}"),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ConvexFunction::Power(s) => x.powf(s),
            ConvexFunction::HockeyStick(t) => (x - t).max(0.0),
            ConvexFunction::XLogX => {
                if x > 0.0 {
                    x * x.ln()
                } else {
                    0.0
                }
            }
            ConvexFunction::NegPower(q) => -x.powf(q),
        }
    }

    fn integrate(&self, d: &MeasuredDensity, tol: f64) -> std::result::Result<QuadratureResult, MeasuresError> {
        match *self {
            ConvexFunction::Power(s) => d.power_integral(s, tol),
            ConvexFunction::HockeyStick(t) => d.hockey_stick(t, tol),
            // |y log y| <= y^0.9 / (0.1 e) on (0, 1]
            ConvexFunction::XLogX => d.integrate_phi(
                &|y| self.eval(y),
                PhiTail::Bounded { coef: 1.0 / (0.1 * std::f64::consts::E), exponent: 0.9 },
                tol,
            ),
            ConvexFunction::NegPower(q) => Ok(d.power_integral(q, tol)?.scale(-1.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyEntry {
    pub function: ConvexFunction,
    pub margin: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub mode: Mode,
    pub entries: Vec<FamilyEntry>,
    pub worst_margin: f64,
    pub worst_function: ConvexFunction,
    pub error_budget: f64,
}

/// `min over phi of int phi(f) dnu - int phi(g) dmu`.
///
/// Every registered test function has `phi(0) = 0`, so the same margins
/// serve both modes.
pub fn convex_family_check(
    f: &MeasuredDensity,
    g: &MeasuredDensity,
    family: &[ConvexFunction],
    mode: Mode,
    tol: f64,
) -> Result<FamilyReport> {
    if family.is_empty() {
        return Err(ConvexOrderError::BadGrid);
    }
    let entries: std::result::Result<Vec<FamilyEntry>, MeasuresError> = family
        .par_iter()
        .map(|phi| {
            let d = phi.integrate(f, 0.5 * tol)? - phi.integrate(g, 0.5 * tol)?;
            Ok(FamilyEntry { function: *phi, margin: d.value, error_bound: d.error_bound })
        })
        .collect();
    let entries = entries?;
    let worst = entries.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)).expect("non-empty family").clone();
    Ok(FamilyReport {
        mode,
        worst_margin: worst.margin,
        worst_function: worst.function,
        error_budget: worst.error_bound,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::named_density;

    fn leb(name: &str, p: &[f64]) -> MeasuredDensity {
        MeasuredDensity::lebesgue(named_density(name, p).unwrap())
    }

    #[test]
    fn identical_pair_passes() {
        let f = leb("gaussian", &[0.0, 1.0]);
        let v = majorization_verdict(&f, &f, Mode::Standard, None, 1e-10).unwrap();
        assert!(v.pass && v.characterizations_agree);
        assert_eq!(v.worst_margin, 0.0);
    }

    #[test]
    fn ball_pair_standard_mode() {
        let f = leb("gauss_pi", &[]);
        let g = leb("sinc_sq", &[]);
        let v = majorization_verdict(&f, &g, Mode::Standard, None, 1e-9).unwrap();
        assert!(v.pass, "{:?}", (v.worst_t, v.worst_margin, v.error_budget));
        assert!(
            v.characterizations_agree,
            "{:?}",
            v.samples.iter().map(|s| (s.t, s.gap - s.tail_form, s.gap_err + s.tail_err)).collect::<Vec<_>>()
        );
        assert!(v.samples.len() > 64);
    }

    #[test]
    fn discrete_ball_requires_vanishing_mode() {
        let f = leb("discrete_ball_f", &[3.0]);
        let g = leb("discrete_ball_g", &[3.0]);
        assert!(matches!(
            majorization_verdict(&f, &g, Mode::Standard, None, 1e-10),
            Err(ConvexOrderError::PreconditionMassMismatch { .. })
        ));
        let v = majorization_verdict(&f, &g, Mode::Vanishing, None, 1e-10).unwrap();
        assert!(v.pass && v.characterizations_agree, "{v:?}");
    }

    #[test]
    fn moment_mismatch_detected() {
        let f = leb("gaussian", &[0.0, 1.0]);
        let g = MeasuredDensity::lebesgue(named_density("indicator", &[-1.0, 1.0, 0.3]).unwrap());
        assert!(matches!(
            majorization_verdict(&f, &g, Mode::Vanishing, None, 1e-10),
            Err(ConvexOrderError::PreconditionMomentMismatch { .. })
        ));
    }

    #[test]
    fn family_examples() {
        let f = leb("gauss_pi", &[]);
        let g = leb("sinc_sq", &[]);
        let lin = convex_family_check(&f, &g, &[ConvexFunction::Power(1.0)], Mode::Standard, 1e-10).unwrap();
        assert!(lin.worst_margin.abs() <= lin.error_budget + 1e-12);
        let pw: Vec<_> = [1.5, 2.0, 3.0, 6.0].iter().map(|&s| ConvexFunction::Power(s)).collect();
        let r = convex_family_check(&f, &g, &pw, Mode::Standard, 1e-10).unwrap();
        assert!(r.worst_margin > r.error_budget, "{r:?}");

        // Flatter f cannot majorize a more concentrated g of equal mass.
        let f = MeasuredDensity::lebesgue(named_density("indicator", &[0.0, 2.0, 1.0]).unwrap());
        let g = MeasuredDensity::lebesgue(named_density("indicator", &[0.0, 1.0, 2.0]).unwrap());
        let fam = [ConvexFunction::Power(2.0), ConvexFunction::XLogX, ConvexFunction::HockeyStick(1.0)];
        let r = convex_family_check(&f, &g, &fam, Mode::Vanishing, 1e-12).unwrap();
        assert!(r.worst_margin < -1.0);
        let v = majorization_verdict(&f, &g, Mode::Vanishing, None, 1e-12).unwrap();
        assert!(!v.pass);
    }

    #[test]
    fn transitivity_on_gaussians() {
        let a = leb("gaussian", &[0.0, 0.5]);
        let b = leb("gaussian", &[0.0, 0.8]);
        let c = leb("gaussian", &[0.0, 1.0]);
        let ab = majorization_verdict(&a, &b, Mode::Standard, None, 1e-10).unwrap();
        let bc = majorization_verdict(&b, &c, Mode::Standard, None, 1e-10).unwrap();
        let ac = majorization_verdict(&a, &c, Mode::Standard, None, 1e-10).unwrap();
        assert!(ab.pass && bc.pass && ac.pass);
        let ca = majorization_verdict(&c, &a, Mode::Standard, None, 1e-10).unwrap();
        assert!(!ca.pass);
    }
}
