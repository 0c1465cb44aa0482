//! Rényi and Tsallis entropies of one-dimensional probability densities and
//! Gaussian dominance over the strongly log-concave family.

use thiserror::Error;

use crate::convex_order::{self, ConvexOrderError, MajorizationVerdict, Mode};
use crate::measures::{self, named_density, Density1D, MeasuredDensity, MeasuresError, PhiTail, Potential};
use crate::numerics::{self, Interval, NumericsError, QuadratureResult};
use crate::report::{CheckKind, CheckReport};
use crate::transport::{self, Criterion, TransportError};

/// Allowed deviation of the total mass from 1.
pub const PROBABILITY_TOL: f64 = 1e-9;
const TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("int f^{q} is not finite")]
    NonIntegrablePower { q: f64 },
    #[error("density has mass {mass}, not 1")]
    NotAProbabilityDensity { mass: f64 },
    #[error("potential {0} fails sampled midpoint convexity")]
    FamilyViolation(String),
    #[error("order q must lie in [0, inf], got {0}")]
    BadOrder(f64),
    #[error(transparent)]
    Measures(#[from] MeasuresError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    ConvexOrder(#[from] ConvexOrderError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

pub type Result<T> = std::result::Result<T, EntropyError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyKind {
    Renyi,
    Tsallis,
}

/// `Psi_q(x) = (e^{(1-q) x} - 1) / (1 - q)`, with the limits at `q = 1`
/// (identity) and `q = inf`.
pub fn psi(q: f64, x: f64) -> f64 {
    if q == 1.0 {
        x
    } else if q == f64::INFINITY {
        if x >= 0.0 {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        ((1.0 - q) * x).exp_m1() / (1.0 - q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub q: f64,
    pub renyi: f64,
    pub tsallis: f64,
    /// `|S_q - Psi_q(h_q)|`
    pub psi_consistency: f64,
    /// Absolute error estimate on `renyi`.
    pub error_bound: f64,
}

fn probability(d: &Density1D) -> Result<MeasuredDensity> {
    let md = MeasuredDensity::lebesgue(d.clone());
    let mass = md.mass(1e-13)?.value;
    if (mass - 1.0).abs() > PROBABILITY_TOL {
        return Err(EntropyError::NotAProbabilityDensity { mass });
    }
    Ok(md)
}

/// `int f^q`.
fn power_moment(md: &MeasuredDensity, q: f64) -> Result<QuadratureResult> {
    let r = md.power_integral(q, TOL).map_err(|e| match e {
        MeasuresError::NonIntegrable { .. } => EntropyError::NonIntegrablePower { q },
        other => other.into(),
    })?;
    if !r.value.is_finite() {
        return Err(EntropyError::NonIntegrablePower { q });
    }
    Ok(r)
}

/// `-int f log f`.
fn shannon(md: &MeasuredDensity) -> Result<QuadratureResult> {
    let r = md.integrate_phi(
        &|y| if y > 0.0 { y * y.ln() } else { 0.0 },
        PhiTail::Bounded { coef: 1.0 / (0.1 * std::f64::consts::E), exponent: 0.9 },
        TOL,
    )?;
    Ok(r.scale(-1.0))
}

/// Both entropies of order `q in [0, inf]`.
///
/// `h_0 = log |{f > 0}|`, `S_0 = |{f > 0}| - 1`, `h_inf = -log ||f||_inf`,
/// and `S_inf` is `0` when `||f||_inf <= 1`, `-inf` otherwise.
pub fn entropy_report(d: &Density1D, q: f64) -> Result<EntropyReport> {
    if !(q >= 0.0) {
        return Err(EntropyError::BadOrder(q));
    }
    let md = probability(d)?;
    let (renyi, tsallis, err) = if q == 0.0 {
        let width: f64 = md.superlevel(0.0)?.iter().map(|&(a, b)| b - a).sum();
        (width.ln(), width - 1.0, 0.0)
    } else if q == 1.0 {
        let h = shannon(&md)?;
        (h.value, h.value, h.error_bound)
    } else if q == f64::INFINITY {
        let sup = md.sup();
        (-sup.ln(), if sup <= 1.0 { 0.0 } else { f64::NEG_INFINITY }, 4.0 * f64::EPSILON)
    } else {
        let i = power_moment(&md, q)?;
        let h = i.value.ln() / (1.0 - q);
        let s = (i.value - 1.0) / (1.0 - q);
        (h, s, i.error_bound / (i.value * (1.0 - q).abs()))
    };
    let psi_consistency = if q == 0.0 {
        0.0
    } else {
        let p = psi(q, renyi);
        if p == tsallis {
            0.0
        } else {
            (tsallis - p).abs()
        }
    };
    Ok(EntropyReport { q, renyi, tsallis, psi_consistency, error_bound: err })
}

pub fn entropy(d: &Density1D, q: f64, kind: EntropyKind) -> Result<f64> {
    let r = entropy_report(d, q)?;
    Ok(match kind {
        EntropyKind::Renyi => r.renyi,
        EntropyKind::Tsallis => r.tsallis,
    })
}

/// Strongly log-concave density `e^{-V} gamma`, rejecting potentials that
/// fail sampled midpoint convexity.
pub fn slc_density(potential: Potential) -> Result<Density1D> {
    if !potential.is_midpoint_convex() {
        return Err(EntropyError::FamilyViolation(format!("{potential:?}")));
    }
    Ok(measures::strongly_log_concave(potential)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceEntry {
    pub q: f64,
    pub test: EntropyReport,
    pub gaussian: EntropyReport,
    pub renyi_pass: bool,
    pub tsallis_pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub potential: Potential,
    /// Mean of the test density; zero for centered members.
    pub mean: f64,
    pub majorization: MajorizationVerdict,
    pub entries: Vec<DominanceEntry>,
    /// `sup T'` of the monotone map from the Gaussian to the test density.
    pub transport_sup: f64,
    pub transport_pass: bool,
    pub pass: bool,
}

/// The standard Gaussian majorized by `e^{-V} gamma`, and its entropies
/// dominating at every order in `q_grid`.
pub fn gaussian_dominance_check(potential: Potential, q_grid: &[f64]) -> Result<DominanceReport> {
    let f = slc_density(potential)?;
    let gamma = named_density("gaussian", &[])?;
    let fm = MeasuredDensity::lebesgue(f.clone());
    let gm = MeasuredDensity::lebesgue(gamma.clone());
    let majorization = convex_order::majorization_verdict(&fm, &gm, Mode::Standard, None, 1e-10)?;
    let mut entries = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let test = entropy_report(&f, q)?;
        let gaussian = entropy_report(&gamma, q)?;
        let budget = test.error_bound + gaussian.error_bound + 1e-12;
        let renyi_pass = test.renyi <= gaussian.renyi + budget;
        let tsallis_budget = budget * (1.0 + gaussian.tsallis.abs().max(test.tsallis.abs()));
        let tsallis_pass = test.tsallis <= gaussian.tsallis + tsallis_budget;
        entries.push(DominanceEntry { q, test, gaussian, renyi_pass, tsallis_pass });
    }
    let map = transport::build_transport(&gm, &fm)?;
    let grid = numerics::linspace(-8.0, 8.0, 1025);
    let c = transport::contraction_report(&map, Criterion::TprimeLe1, &grid)?;
    let mean = numerics::integrate_with_breaks(
        |x| x * f.eval(x),
        Interval::new(-60.0, 60.0)?,
        &f.quad_breaks(-60.0, 60.0),
        1e-13,
        numerics::DEFAULT_MAX_SUBDIVISIONS,
    )?
    .value;
    let pass = majorization.pass && c.pass && entries.iter().all(|e| e.renyi_pass && e.tsallis_pass);
    Ok(DominanceReport {
        potential,
        mean,
        majorization,
        entries,
        transport_sup: c.sup_observed,
        transport_pass: c.pass,
        pass,
    })
}

/// Registered expanding maps, `T' >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpandingMap {
    /// `c x`, `c >= 1`
    Scale(f64),
    /// `a x + b sin x`, `a - |b| >= 1`
    SineShear { a: f64, b: f64 },
}

impl ExpandingMap {
    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            ExpandingMap::Scale(c) => c,
            ExpandingMap::SineShear { a, b } => a + b * x.cos(),
        }
    }

    pub fn is_expanding(&self) -> bool {
        match *self {
            ExpandingMap::Scale(c) => c >= 1.0,
            ExpandingMap::SineShear { a, b } => a - b.abs() >= 1.0,
        }
    }
}

/// `h_q(T(X))` for `X` with density `d`, using `int f_Y^q = int g^q T'^{1-q}`.
pub fn pushforward_renyi(d: &Density1D, map: ExpandingMap, q: f64) -> Result<f64> {
    let md = probability(d)?;
    let dom = md.domain();
    let (lo, hi) = (dom.lo.max(-60.0), dom.hi.min(60.0));
    let breaks = d.quad_breaks(lo, hi);
    let integrate = |h: &dyn Fn(f64) -> f64| {
        numerics::integrate_with_breaks(h, Interval::new(lo, hi)?, &breaks, 1e-14, numerics::DEFAULT_MAX_SUBDIVISIONS)
            .map(|r| r.value)
    };
    if q == 1.0 {
        let h = -integrate(&|x| {
            let g = d.eval(x);
            if g > 0.0 {
                g * (g.ln() - map.deriv(x).ln())
            } else {
                0.0
            }
        })?;
        return Ok(h);
    }
    if q == f64::INFINITY {
        let (_, v) = crate::inequalities::grid_max(|x| d.eval(x) / map.deriv(x), lo, hi, 20001);
        return Ok(-v.ln());
    }
    let i = integrate(&|x| d.eval(x).powf(q) * map.deriv(x).powf(1.0 - q))?;
    Ok(i.ln() / (1.0 - q))
}

/// `h_q(T(X)) >= h_q(X)` for an expanding `T`.
pub fn derivative_inflation_check(d: &Density1D, map: ExpandingMap, q: f64) -> Result<CheckReport> {
    let base = entropy_report(d, q)?;
    let pushed = pushforward_renyi(d, map, q)?;
    Ok(CheckReport::new("derivative_inflation", CheckKind::NonStrict, base.renyi, pushed, base.error_bound + 1e-11)
        .param("q", q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn gauss(sigma: f64) -> Density1D {
        named_density("gaussian", &[0.0, sigma]).unwrap()
    }

    #[test]
    fn closed_forms() {
        let g = gauss(1.0);
        let h1 = entropy(&g, 1.0, EntropyKind::Renyi).unwrap();
        assert!((h1 - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-10);
        let h2 = entropy(&g, 2.0, EntropyKind::Renyi).unwrap();
        assert!((h2 - (2.0 * PI.sqrt()).ln()).abs() < 1e-10);
        let hinf = entropy(&g, f64::INFINITY, EntropyKind::Renyi).unwrap();
        assert!((hinf - 0.5 * (2.0 * PI).ln()).abs() < 1e-12);
        assert_eq!(entropy(&g, 0.0, EntropyKind::Renyi).unwrap(), f64::INFINITY);
        assert_eq!(entropy(&g, f64::INFINITY, EntropyKind::Tsallis).unwrap(), 0.0);
        let u = named_density("indicator", &[0.0, 1.0, 1.0]).unwrap();
        for q in [0.0, 0.5, 1.0, 2.0, 5.0, f64::INFINITY] {
            assert!(entropy(&u, q, EntropyKind::Renyi).unwrap().abs() < 1e-10, "q = {q}");
        }
    }

    #[test]
    fn not_a_probability() {
        let u = named_density("indicator", &[0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(entropy_report(&u, 2.0), Err(EntropyError::NotAProbabilityDensity { .. })));
    }

    #[test]
    fn psi_link_and_continuity() {
        let f = slc_density(Potential::Abs { c: 1.0, shift: 0.0 }).unwrap();
        for q in [0.5, 2.0, 5.0] {
            assert!(entropy_report(&f, q).unwrap().psi_consistency < 1e-9);
        }
        let h1 = entropy(&f, 1.0, EntropyKind::Renyi).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4] {
            let d = (entropy(&f, 1.0 + eps, EntropyKind::Renyi).unwrap() - h1)
                .abs()
                .max((entropy(&f, 1.0 - eps, EntropyKind::Renyi).unwrap() - h1).abs());
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn scaled_gaussian_gap() {
        // N(0, 0.64) is e^{-a x^2} gamma with a = (1/0.64 - 1)/2.
        let a = (1.0 / 0.64 - 1.0) / 2.0;
        let r =
            gaussian_dominance_check(Potential::Quadratic { a, b: 0.0 }, &[0.5, 1.0, 2.0, 5.0, f64::INFINITY]).unwrap();
        assert!(r.pass);
        for e in &r.entries {
            assert!((e.test.renyi - e.gaussian.renyi - 0.8f64.ln()).abs() < 1e-9, "q = {}", e.q);
        }
        assert!((r.transport_sup - 0.8).abs() < 1e-9);
    }

    #[test]
    fn registry_dominance() {
        let qs = [0.5, 1.0, 2.0, 5.0, f64::INFINITY];
        for p in [
            Potential::Abs { c: 1.0, shift: 0.0 },
            Potential::Huber { c: 2.0, delta: 0.5, shift: 0.0 },
            Potential::Quadratic { a: 0.3, b: 0.7 },
            Potential::Abs { c: 0.5, shift: 1.0 },
        ] {
            let r = gaussian_dominance_check(p, &qs).unwrap();
            assert!(r.pass, "{p:?}: {r:?}");
        }
        let id = gaussian_dominance_check(Potential::Quadratic { a: 0.0, b: 0.0 }, &qs).unwrap();
        for e in &id.entries {
            assert!((e.test.renyi - e.gaussian.renyi).abs() < 1e-9);
        }
    }

    #[test]
    fn family_violation() {
        let r = gaussian_dominance_check(Potential::Abs { c: -1.0, shift: 0.0 }, &[2.0]);
        assert!(matches!(r, Err(EntropyError::FamilyViolation(_))));
    }

    #[test]
    fn expanding_maps_raise_entropy() {
        let g = gauss(1.0);
        let maps = [ExpandingMap::Scale(2.0), ExpandingMap::SineShear { a: 1.5, b: 0.3 }];
        for m in maps {
            assert!(m.is_expanding());
            for q in [0.5, 1.0, 2.0, 5.0, f64::INFINITY] {
                let r = derivative_inflation_check(&g, m, q).unwrap();
                assert!(r.ok(), "{m:?} q = {q}: {r}");
            }
        }
        // Scaling by 2 shifts every Renyi entropy by log 2.
        let r = derivative_inflation_check(&g, ExpandingMap::Scale(2.0), 2.0).unwrap();
        assert!((r.rhs - r.lhs - 2f64.ln()).abs() < 1e-10);
    }
}
