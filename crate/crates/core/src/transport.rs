//! Monotone transport maps `T = F^{-1} o G` between equal-mass weighted
//! densities on the line, with Monge–Ampère derivatives, residuals and
//! contraction criteria.

use thiserror::Error;

use crate::measures::{MeasuredDensity, MeasuresError, Side};
use crate::numerics::{self, Interval, NumericsError, QuadratureResult};

/// Slack allowed on contraction criteria.
pub const CONTRACTION_TOL: f64 = 1e-9;
/// Allowed difference between source and target masses.
pub const MASS_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("source mass {source_mass} differs from target mass {target_mass}")]
    MassMismatch { source_mass: f64, target_mass: f64 },
    #[error("cumulative of `{name}` is degenerate (mass {mass})")]
    DegenerateCumulative { name: String, mass: f64 },
    #[error("target density vanishes at T({x}); derivative undefined")]
    DerivativeUndefined { x: f64 },
    #[error("{x} lies outside the source domain")]
    OutOfDomain { x: f64 },
    #[error(transparent)]
    Measures(#[from] MeasuresError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, TransportError>;

/// Cell integrals of `f w` between knots, with prefix and suffix sums.
#[derive(Debug, Clone)]
struct Table {
    knots: Vec<f64>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
    /// Mass left of the first knot and right of the last one.
    below: f64,
    above: f64,
}

/// `x -> int_lo^x f w` and its complement on the domain of a measured density.
#[derive(Debug, Clone)]
struct Cumulative {
    md: MeasuredDensity,
    total: f64,
    table: Option<Table>,
}

/// Integral of `f w` over one cell, to a tolerance relative to a crude
/// size estimate so that far-tail cells keep their significant digits.
fn cell_integral(md: &MeasuredDensity, a: f64, b: f64) -> std::result::Result<f64, NumericsError> {
    let w = md.measure.weight;
    let h = |x: f64| md.density.eval(x) * w.eval(x);
    let scale = (b - a) * h(a).abs().max(h(0.5 * (a + b)).abs()).max(h(b).abs());
    let tol = (1e-15 * scale).clamp(1e-300, 1e-17);
    numerics::integrate_best_effort(h, Interval { lo: a, hi: b }, &[], tol, 60).map(|r| r.value)
}

impl Cumulative {
    fn new(md: &MeasuredDensity) -> Result<Self> {
        let d = md.domain();
        let w = md.measure.weight;
        let closed = md.density.upper_mass(w, d.lo).is_some();
        if closed {
            let total = md.mass(1e-14)?.value;
            return Self::checked(md, total, None);
        }
        let total = match md.density.known_mass(w, d.lo, d.hi) {
            Some(m) => m,
            None => md.mass(1e-13)?.value,
        };
        // Truncate infinite ends where the remaining tail is negligible.
        let tail_cut = |side: Side, start: f64| -> (f64, f64) {
            let mut dist = 16.0;
            loop {
                let x = match side {
                    Side::Right => start + dist,
                    Side::Left => start - dist,
                };
                let t = md.density.power_tail(w, 1.0, x, side);
                match t {
                    Some(t) if t.value + t.half_width <= 1e-17 * total.max(1.0) || dist >= 4096.0 => {
                        return (x, t.value);
                    }
                    None if dist >= 4096.0 => return (x, 0.0),
                    _ => dist *= 2.0,
                }
            }
        };
        let mode = md.density.sup().1;
        let (lo, below) = if d.lo.is_finite() { (d.lo, 0.0) } else { tail_cut(Side::Left, mode.min(0.0)) };
        let (hi, above) = if d.hi.is_finite() { (d.hi, 0.0) } else { tail_cut(Side::Right, mode.max(0.0)) };
        let h = (0.25_f64).min((hi - lo) / 64.0);
        let mut knots = numerics::linspace(lo, hi, ((hi - lo) / h).round() as usize + 1);
        knots.extend(md.density.quad_breaks(lo, hi));
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (1.0 + b.abs()));
        let cells: Vec<f64> =
            knots.windows(2).map(|k| cell_integral(md, k[0], k[1])).collect::<std::result::Result<_, _>>()?;
        let mut prefix = vec![below];
        for c in &cells {
            prefix.push(prefix.last().unwrap() + c);
        }
        let mut suffix = vec![above; knots.len()];
        for i in (0..cells.len()).rev() {
            suffix[i] = suffix[i + 1] + cells[i];
        }
        let table = Table { knots, prefix, suffix, below, above };
        Self::checked(md, total, Some(table))
    }

    fn checked(md: &MeasuredDensity, total: f64, table: Option<Table>) -> Result<Self> {
        if !(total > 0.0 && total.is_finite()) {
            return Err(TransportError::DegenerateCumulative { name: md.density.name.to_string(), mass: total });
        }
        Ok(Self { md: md.clone(), total, table })
    }

    fn cell_integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        cell_integral(&self.md, a, b).unwrap_or(f64::NAN)
    }

    /// `(int_lo^x, int_x^hi)` of `f w`.
    fn split(&self, x: f64) -> (f64, f64) {
        let d = self.md.domain();
        let x = x.clamp(d.lo, d.hi);
        let w = self.md.measure.weight;
        match &self.table {
            None => {
                let u_lo = self.md.density.upper_mass(w, d.lo).unwrap();
                let u_x = self.md.density.upper_mass(w, x).unwrap();
                let u_hi = if d.hi.is_finite() { self.md.density.upper_mass(w, d.hi).unwrap() } else { 0.0 };
                let lower = match self.md.density.lower_mass(w, x) {
                    Some(l) if d.lo == f64::NEG_INFINITY => l,
                    _ => u_lo - u_x,
                };
                (lower, u_x - u_hi)
            }
            Some(t) => {
                let n = t.knots.len();
                if x <= t.knots[0] {
                    let below = t.below.max(0.0);
                    return (below, self.total - below);
                }
                if x >= t.knots[n - 1] {
                    let above = t.above.max(0.0);
                    return (self.total - above, above);
                }
                let i = t.knots.partition_point(|&k| k <= x) - 1;
                let (a, b) = (t.knots[i], t.knots[i + 1]);
                let lower = t.prefix[i] + self.cell_integral(a, x);
                let upper = t.suffix[i + 1] + self.cell_integral(x, b);
                // Take the complement of whichever side is larger.
                if lower <= upper {
                    (lower, self.total - lower)
                } else {
                    (self.total - upper, upper)
                }
            }
        }
    }

    /// Solve for `y` with `int_lo^y = lower` (or `int_y^hi = upper`,
    /// whichever is smaller, for accuracy).
    fn invert(&self, lower: f64, upper: f64) -> Result<f64> {
        let d = self.md.domain();
        if lower <= 0.0 {
            return Ok(d.lo.max(self.left_edge()));
        }
        if upper <= 0.0 {
            return Ok(d.hi.min(self.right_edge()));
        }
        let use_lower = lower <= upper;
        let func = |y: f64| {
            let (l, u) = self.split(y);
            if use_lower {
                l
            } else {
                -u
            }
        };
        let target = if use_lower { lower } else { -upper };
        let (mut a, mut b) = (d.lo, d.hi);
        let m = self.md.density.sup().1.clamp(a.max(-1e300), b.min(1e300));
        if !a.is_finite() {
            let mut step = 1.0;
            a = m - step;
            while func(a) > target {
                step *= 2.0;
                a = m - step;
            }
        }
        if !b.is_finite() {
            let mut step = 1.0;
            b = m + step;
            while func(b) < target {
                step *= 2.0;
                b = m + step;
            }
        }
        let y = numerics::invert_monotone(func, target, Interval::new(a, b)?, 0.0)
            .or_else(|_| bisect(&func, target, a, b))?;
        Ok(y)
    }

    fn left_edge(&self) -> f64 {
        self.md.domain().lo
    }

    fn right_edge(&self) -> f64 {
        self.md.domain().hi
    }
}

fn bisect(f: &dyn Fn(f64) -> f64, target: f64, mut a: f64, mut b: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) < target {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Monotone map pushing `g mu` forward to `f nu`.
#[derive(Debug, Clone)]
pub struct TransportMap1D {
    pub source: MeasuredDensity,
    pub target: MeasuredDensity,
    /// Built on `[0, inf)` and extended as an odd function.
    pub odd_extension: bool,
    cum_source: Cumulative,
    cum_target: Cumulative,
}

/// Build `T = F^{-1} o G` from source `(g, mu)` to target `(f, nu)`.
///
/// Even Lebesgue densities on the whole line are transported on
/// `[0, inf)` and extended by oddness.
pub fn build_transport(source: &MeasuredDensity, target: &MeasuredDensity) -> Result<TransportMap1D> {
    let whole = |m: &MeasuredDensity| {
        let d = m.domain();
        d.lo == f64::NEG_INFINITY && d.hi == f64::INFINITY && m.density.is_even()
    };
    let odd = whole(source) && whole(target);
    let (s, t) = if odd {
        (source.restricted(0.0, f64::INFINITY)?, target.restricted(0.0, f64::INFINITY)?)
    } else {
        (source.clone(), target.clone())
    };
    let cs = Cumulative::new(&s)?;
    let ct = Cumulative::new(&t)?;
    if (cs.total - ct.total).abs() > MASS_TOL {
        return Err(TransportError::MassMismatch { source_mass: cs.total, target_mass: ct.total });
    }
    Ok(TransportMap1D { source: s, target: t, odd_extension: odd, cum_source: cs, cum_target: ct })
}

impl TransportMap1D {
    /// Domain on which the map is defined.
    pub fn domain(&self) -> Interval {
        let d = self.source.domain();
        if self.odd_extension {
            Interval { lo: -d.hi, hi: d.hi }
        } else {
            d
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.odd_extension && x < 0.0 {
            return Ok(-self.eval(-x)?);
        }
        let d = self.source.domain();
        if !(x >= d.lo && x <= d.hi) {
            return Err(TransportError::OutOfDomain { x });
        }
        let (lower, upper) = self.cum_source.split(x);
        self.cum_target.invert(lower, upper)
    }

    /// `T'(x) = g(x) u(x) / (f(T(x)) v(T(x)))`, and `0` where `g` vanishes.
    pub fn deriv(&self, x: f64) -> Result<f64> {
        let t = self.eval(x)?;
        self.deriv_at(x, t)
    }

    fn deriv_at(&self, x: f64, t: f64) -> Result<f64> {
        let (x, t) = if self.odd_extension && x < 0.0 { (-x, -t) } else { (x, t) };
        let num = self.source.eval(x) * self.source.weight(x);
        if num == 0.0 {
            return Ok(0.0);
        }
        let den = self.target.eval(t) * self.target.weight(t);
        if den < 1e-300 {
            return Err(TransportError::DerivativeUndefined { x });
        }
        Ok(num / den)
    }

    /// Map in the opposite direction, built by swapping roles.
    pub fn inverse(&self) -> Result<TransportMap1D> {
        let mut m = build_transport(&self.target, &self.source)?;
        m.odd_extension = self.odd_extension;
        Ok(m)
    }

    pub fn source_mass(&self) -> f64 {
        self.cum_source.total
    }
}

/// `g(x) u(x) - f(T(x)) v(T(x)) T'(x)` with `T'` from Richardson-extrapolated
/// central differences.
pub fn ma_residual(map: &TransportMap1D, x: f64) -> Result<f64> {
    let d = map.domain();
    let h = 1e-3 * (1.0 + x.abs());
    let t = map.eval(x)?;
    let fd = if x - h >= d.lo && x + h <= d.hi {
        let central = |h: f64| -> Result<f64> { Ok((map.eval(x + h)? - map.eval(x - h)?) / (2.0 * h)) };
        (4.0 * central(0.5 * h)? - central(h)?) / 3.0
    } else {
        let h = 0.1 * h;
        let (a, b) = ((x - h).max(d.lo), (x + h).min(d.hi));
        (map.eval(b)? - map.eval(a)?) / (b - a)
    };
    let (xs, ts) = if map.odd_extension && x < 0.0 { (-x, -t) } else { (x, t) };
    let den = map.target.eval(ts) * map.target.weight(ts);
    if den < 1e-300 {
        return Err(TransportError::DerivativeUndefined { x });
    }
    Ok(map.source.eval(xs) * map.source.weight(xs) - den * fd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// `T' <= 1`
    TprimeLe1,
    /// `T T' <= x`
    TTprimeLeX,
    /// `A' = inf u / (v(T) T')`, `A = sup u / (v(T) T')`; passes when `A' >= 1`.
    FactorBounds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub criterion: Criterion,
    pub sup_observed: f64,
    pub inf_observed: f64,
    pub worst_x: f64,
    pub grid_size: usize,
    pub pass: bool,
}

fn criterion_value(map: &TransportMap1D, c: Criterion, x: f64) -> Result<f64> {
    let t = map.eval(x)?;
    let dt = map.deriv_at(x, t)?;
    Ok(match c {
        Criterion::TprimeLe1 => dt,
        Criterion::TTprimeLeX => t * dt / x,
        Criterion::FactorBounds => {
            let (xs, ts) = if map.odd_extension && x < 0.0 { (-x, -t) } else { (x, t) };
            let v = map.target.weight(ts) * dt;
            if v == 0.0 {
                f64::INFINITY
            } else {
                map.source.weight(xs) / v
            }
        }
    })
}

/// Evaluate a contraction criterion on `grid`, refining 4x around the
/// observed extremum. Grid extrema are not certified between points.
pub fn contraction_report(map: &TransportMap1D, criterion: Criterion, grid: &[f64]) -> Result<ContractionReport> {
    use rayon::prelude::*;
    let eval =
        |xs: &[f64]| -> Result<Vec<f64>> { xs.par_iter().map(|&x| criterion_value(map, criterion, x)).collect() };
    let mut xs: Vec<f64> = grid.to_vec();
    let mut vals = eval(&xs)?;
    let worst = |vals: &[f64]| -> usize {
        let key = |v: f64| if criterion == Criterion::FactorBounds { -v } else { v };
        (0..vals.len())
            .filter(|&i| vals[i].is_finite())
            .max_by(|&i, &j| key(vals[i]).total_cmp(&key(vals[j])))
            .unwrap_or(0)
    };
    if xs.len() >= 2 {
        let i = worst(&vals);
        let (a, b) = (xs[i.saturating_sub(1)], xs[(i + 1).min(xs.len() - 1)]);
        let extra: Vec<f64> = numerics::linspace(a, b, 9)[1..8].to_vec();
        let extra_vals = eval(&extra)?;
        xs.extend(extra);
        vals.extend(extra_vals);
    }
    let i = worst(&vals);
    let sup = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inf = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let pass = match criterion {
        Criterion::TprimeLe1 | Criterion::TTprimeLeX => sup <= 1.0 + CONTRACTION_TOL,
        Criterion::FactorBounds => inf >= 1.0 - CONTRACTION_TOL,
    };
    Ok(ContractionReport { criterion, sup_observed: sup, inf_observed: inf, worst_x: xs[i], grid_size: xs.len(), pass })
}

/// Test functions for the pushforward identity `int h(T) g dmu = int h f dnu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    One,
    X,
    X2,
    ExpNeg,
    /// `f^{s-1}` with `f` the target density.
    TargetPower(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardEntry {
    pub h: TestFunction,
    pub source_side: f64,
    pub target_side: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardReport {
    pub window: (f64, f64),
    pub entries: Vec<PushforwardEntry>,
    pub max_discrepancy: f64,
}

impl TestFunction {
    fn eval(&self, map: &TransportMap1D, y: f64) -> f64 {
        match *self {
            TestFunction::One => 1.0,
            TestFunction::X => y,
            TestFunction::X2 => y * y,
            TestFunction::ExpNeg => (-y).exp(),
            TestFunction::TargetPower(s) => {
                let ys = if map.odd_extension { y.abs() } else { y };
                map.target.eval(ys).powf(s - 1.0)
            }
        }
    }
}

fn breaks_of(md: &MeasuredDensity, a: f64, b: f64) -> Vec<f64> {
    md.density.quad_breaks(a, b)
}

/// Compare both sides of the pushforward identity over the source window
/// `[a, b]` and the matching target window `[T(a), T(b)]`.
pub fn pushforward_check(
    map: &TransportMap1D,
    tests: &[TestFunction],
    window: (f64, f64),
    tol: f64,
) -> Result<PushforwardReport> {
    let (a, b) = window;
    let (ta, tb) = (map.eval(a)?, map.eval(b)?);
    let src_density = |x: f64| {
        let xs = if map.odd_extension { x.abs() } else { x };
        map.source.eval(xs) * map.source.weight(xs)
    };
    let tgt_density = |y: f64| {
        let ys = if map.odd_extension { y.abs() } else { y };
        map.target.eval(ys) * map.target.weight(ys)
    };
    let mut sb = breaks_of(&map.source, a, b);
    let mut tbk = breaks_of(&map.target, ta, tb);
    if map.odd_extension {
        sb.extend(breaks_of(&map.source, 0.0, -a).into_iter().map(|x| -x));
        tbk.extend(breaks_of(&map.target, 0.0, -ta).into_iter().map(|x| -x));
        sb.push(0.0);
        tbk.push(0.0);
        sb.sort_by(f64::total_cmp);
        tbk.sort_by(f64::total_cmp);
    }
    let mut entries = Vec::new();
    for h in tests {
        let lhs = numerics::integrate_best_effort(
            |x| match map.eval(x) {
                Ok(t) => h.eval(map, t) * src_density(x),
                Err(_) => f64::NAN,
            },
            Interval::new(a, b)?,
            &sb,
            tol,
            20_000,
        )?;
        let rhs = numerics::integrate_best_effort(
            |y| h.eval(map, y) * tgt_density(y),
            Interval::new(ta, tb)?,
            &tbk,
            tol,
            20_000,
        )?;
        entries.push(PushforwardEntry {
            h: *h,
            source_side: lhs.value,
            target_side: rhs.value,
            error_bound: lhs.error_bound + rhs.error_bound,
        });
    }
    let max_discrepancy = entries.iter().map(|e| (e.source_side - e.target_side).abs()).fold(0.0, f64::max);
    Ok(PushforwardReport { window, entries, max_discrepancy })
}

/// Hölder chain `int f^s dnu <= (int f^s(T) dmu)^{(s-1)/s} (int g^s dmu)^{1/s}`.
/// The right side is integrated over `window` only, which can only lower it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderChain {
    pub lhs: QuadratureResult,
    pub rhs: f64,
    pub rhs_error: f64,
}

pub fn holder_chain(map: &TransportMap1D, s: f64, window: (f64, f64), tol: f64) -> Result<HolderChain> {
    let scale = if map.odd_extension { 2.0 } else { 1.0 };
    let lhs = map.target.power_integral(s, tol)?.scale(scale);
    let (a, b) = window;
    let src = |x: f64| {
        let xs = if map.odd_extension { x.abs() } else { x };
        (map.source.eval(xs), map.source.weight(xs))
    };
    let mut br = breaks_of(&map.source, a, b);
    if map.odd_extension {
        br.extend(breaks_of(&map.source, 0.0, -a).into_iter().map(|x| -x));
        br.push(0.0);
        br.sort_by(f64::total_cmp);
    }
    let ft = numerics::integrate_best_effort(
        |x| {
            let t = map.eval(x).unwrap_or(f64::NAN);
            let ts = if map.odd_extension { t.abs() } else { t };
            map.target.eval(ts).powf(s) * src(x).1
        },
        Interval::new(a, b)?,
        &br,
        tol,
        20_000,
    )?;
    let gs = numerics::integrate_best_effort(
        |x| {
            let (g, u) = src(x);
            g.powf(s) * u
        },
        Interval::new(a, b)?,
        &br,
        tol,
        20_000,
    )?;
    let p = (s - 1.0) / s;
    let rhs = ft.value.powf(p) * gs.value.powf(1.0 / s);
    // First-order propagation of the two quadrature errors.
    let rhs_error = rhs * (p * ft.error_bound / ft.value + gs.error_bound / (s * gs.value));
    Ok(HolderChain { lhs, rhs, rhs_error })
}

/// Closed-form monotone map between Gaussians.
pub fn gaussian_map(mean_g: f64, sigma_g: f64, mean_f: f64, sigma_f: f64, x: f64) -> f64 {
    mean_f + sigma_f * (x - mean_g) / sigma_g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::named_density;

    fn leb(name: &str, p: &[f64]) -> MeasuredDensity {
        MeasuredDensity::lebesgue(named_density(name, p).unwrap())
    }

    fn ball_map() -> TransportMap1D {
        build_transport(&leb("sinc_sq", &[]), &leb("gauss_pi", &[])).unwrap()
    }

    #[test]
    fn identity_transport() {
        let g = leb("gaussian", &[0.3, 1.2]);
        let m = build_transport(&g, &g).unwrap();
        for x in [-3.0, -0.5, 0.3, 1.0, 4.0] {
            assert!((m.eval(x).unwrap() - x).abs() < 1e-10);
            assert!(ma_residual(&m, x).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn gaussian_scaling_map() {
        let g = leb("gaussian", &[0.0, 0.5]);
        let f = leb("gaussian", &[0.0, 1.0]);
        let m = build_transport(&g, &f).unwrap();
        for x in [-1.5, -0.2, 0.0, 0.7, 2.0] {
            let want = gaussian_map(0.0, 0.5, 0.0, 1.0, x);
            assert!((m.eval(x).unwrap() - want).abs() < 1e-10, "x = {x}");
            assert!((m.deriv(x).unwrap() - 2.0).abs() < 1e-9);
        }
        let grid = numerics::linspace(-3.0, 3.0, 257);
        let r = contraction_report(&m, Criterion::TprimeLe1, &grid).unwrap();
        assert!(!r.pass);
        assert!((r.sup_observed - 2.0).abs() < 1e-9);
    }

    #[test]
    fn ball_map_properties() {
        let m = ball_map();
        assert!(m.odd_extension);
        assert_eq!(m.eval(0.0).unwrap(), 0.0);
        assert!((m.eval(-0.7).unwrap() + m.eval(0.7).unwrap()).abs() < 1e-15);
        assert!(ma_residual(&m, 0.3).unwrap().abs() < 1e-6);
        let grid = numerics::linspace(0.0, 6.0, 1025);
        let r = contraction_report(&m, Criterion::TprimeLe1, &grid).unwrap();
        assert!(r.pass, "{r:?}");
        let mut prev = f64::NEG_INFINITY;
        for &x in &grid {
            let t = m.eval(x).unwrap();
            assert!(t >= prev);
            prev = t;
        }
    }

    #[test]
    fn round_trip() {
        let m = ball_map();
        let inv = m.inverse().unwrap();
        // Away from the zeros of sinc^2, where inversion is ill-conditioned.
        for x in [0.01, 0.4, 1.3, 2.5, 5.4] {
            let back = inv.eval(m.eval(x).unwrap()).unwrap();
            assert!((back - x).abs() < 1e-8, "x = {x}, back = {back}");
        }
        for x in [1.0, 3.0] {
            let back = inv.eval(m.eval(x).unwrap()).unwrap();
            assert!((back - x).abs() < 1e-4, "x = {x}, back = {back}");
        }
    }

    #[test]
    fn op_map_weighted() {
        let g = MeasuredDensity::linear(named_density("bessel_kernel", &[]).unwrap()).unwrap();
        let f = MeasuredDensity::linear(named_density("exp_quartersq", &[]).unwrap()).unwrap();
        let m = build_transport(&g, &f).unwrap();
        assert!(ma_residual(&m, 1.0).unwrap().abs() < 1e-6);
        // Closed form T(x) = 2 sqrt(-log(J1^2 + J0^2)).
        for x in [0.5, 1.0, 3.0, 10.0] {
            let c = crate::specfun::j1(x).powi(2) + crate::specfun::j0(x).powi(2);
            assert!((m.eval(x).unwrap() - 2.0 * (-c.ln()).sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn mass_mismatch() {
        let g = leb("gaussian", &[0.0, 1.0]);
        let f = MeasuredDensity::lebesgue(named_density("indicator", &[0.0, 1.0, 2.0]).unwrap());
        assert!(matches!(build_transport(&g, &f), Err(TransportError::MassMismatch { .. })));
    }

    #[test]
    fn pushforward_and_holder() {
        let m = ball_map();
        let r =
            pushforward_check(&m, &[TestFunction::One, TestFunction::X, TestFunction::X2], (-6.0, 6.0), 1e-11).unwrap();
        assert!(r.max_discrepancy < 1e-7, "{r:?}");
        let h = holder_chain(&m, 2.0, (-8.0, 8.0), 1e-11).unwrap();
        assert!(h.lhs.value <= h.rhs + h.rhs_error + h.lhs.error_bound, "{h:?}");
    }

    #[test]
    fn factor_bounds_and_corollary() {
        // N(0,1) -> N(0,1/2): T' = 1/2, A = A' = 2.
        let g = leb("gaussian", &[0.0, 1.0]);
        let f = leb("gaussian", &[0.0, 0.5]);
        let m = build_transport(&g, &f).unwrap();
        let grid = numerics::linspace(-4.0, 4.0, 129);
        let fb = contraction_report(&m, Criterion::FactorBounds, &grid).unwrap();
        assert!(fb.pass && (fb.inf_observed - 2.0).abs() < 1e-8 && (fb.sup_observed - 2.0).abs() < 1e-8);
        let tp = contraction_report(&m, Criterion::TprimeLe1, &grid).unwrap();
        assert_eq!(tp.pass, fb.inf_observed >= 1.0 - CONTRACTION_TOL);
        let tmin = tp.inf_observed;
        for s in [2.0, 3.0] {
            let lf = f.power_integral(s, 1e-12).unwrap();
            let lg = g.power_integral(s, 1e-12).unwrap();
            let rhs = tmin.powf(1.0 - s) * lg.value;
            assert!(lf.value <= rhs + 1e-9, "s = {s}");
        }
    }

    #[test]
    fn discrete_ball_maps_contract() {
        for n in [2u32, 3, 5, 8, 16] {
            let g = leb("discrete_ball_g", &[n as f64]);
            let f = leb("discrete_ball_f", &[n as f64]);
            let m = build_transport(&g, &f).unwrap();
            assert!(!m.odd_extension);
            let grid = numerics::linspace(0.0, 0.5, 1025);
            let r = contraction_report(&m, Criterion::TprimeLe1, &grid).unwrap();
            assert!(r.pass, "n = {n}: {r:?}");
            assert!((m.eval(0.5).unwrap() - crate::measures::discrete_ball_a(n)).abs() < 1e-9);
            assert!(ma_residual(&m, 0.1 / n as f64).unwrap().abs() < 1e-6);
        }
    }
}
