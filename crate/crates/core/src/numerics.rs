//! Adaptive Gauss–Kronrod quadrature and bracketed monotone inversion.
//!
//! Every integral in the crate goes through [`integrate`] or one of its
//! variants. The error model is the raw Kronrod/Gauss difference on each
//! segment (no QUADPACK rescaling), floored by a rounding term, so the
//! reported `error_bound` is a conservative estimate rather than a proof.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Default absolute tolerance used by the higher-level modules.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Maximum number of bisections per call unless overridden.
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("quadrature did not reach tol {tol:e}: value {value} with error {error_bound:e} after {subdivisions} subdivisions")]
    NonConvergence { value: f64, error_bound: f64, tol: f64, subdivisions: usize },
    #[error("target {target} outside [{f_lo}, {f_hi}]")]
    TargetOutOfRange { target: f64, f_lo: f64, f_hi: f64 },
    #[error("function is not monotone near x = {x}")]
    NonMonotoneDetected { x: f64 },
    #[error("non-finite integrand value at x = {x}")]
    NonFinite { x: f64 },
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// An interval of the extended real line with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(NumericsError::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn real_line() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn half_line() -> Self {
        Self { lo: 0.0, hi: f64::INFINITY }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }
}

/// Value of an integral together with an estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_bound: f64,
    pub subdivisions: usize,
}

impl QuadratureResult {
    pub fn exact(value: f64) -> Self {
        Self { value, error_bound: 0.0, subdivisions: 0 }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error_bound
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error_bound
    }

    pub fn scale(self, c: f64) -> Self {
        Self { value: self.value * c, error_bound: self.error_bound * c.abs(), subdivisions: self.subdivisions }
    }
}

impl std::ops::Add for QuadratureResult {
    type Output = QuadratureResult;
    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            error_bound: self.error_bound + rhs.error_bound,
            subdivisions: self.subdivisions + rhs.subdivisions,
        }
    }
}

impl std::ops::Sub for QuadratureResult {
    type Output = QuadratureResult;
    fn sub(self, rhs: Self) -> Self {
        Self {
            value: self.value - rhs.value,
            error_bound: self.error_bound + rhs.error_bound,
            subdivisions: self.subdivisions + rhs.subdivisions,
        }
    }
}

/// Estimate of an integral over an unbounded tail, `value ± half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub value: f64,
    pub half_width: f64,
}

impl TailEstimate {
    /// Tail of a nonnegative integrand known only through an upper bound.
    pub fn from_bound(bound: f64) -> Self {
        Self { value: 0.5 * bound, half_width: 0.5 * bound }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, half_width: 0.0 }
    }

    pub fn zero() -> Self {
        Self::exact(0.0)
    }
}

// Kronrod 21-point abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_282_693_444,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(NumericsError::NonFinite { x: center });
    }
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs_sum = WGK[10] * fc.abs();
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(NumericsError::NonFinite { x: x1 });
        }
        if !f2.is_finite() {
            return Err(NumericsError::NonFinite { x: x2 });
        }
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let resabs = abs_sum * half.abs();
    let error = ((kronrod - gauss) * half).abs().max(8.0 * f64::EPSILON * resabs);
    Ok(Segment { a, b, value, error })
}

/// Adaptive integration over a finite interval split at the given interior
/// breakpoints. `breaks` must be sorted; points outside `(lo, hi)` are ignored.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    iv: Interval,
    breaks: &[f64],
    tol: f64,
    max_subdivisions: usize,
) -> Result<QuadratureResult> {
    if !iv.is_finite() {
        return Err(NumericsError::InvalidInterval { lo: iv.lo, hi: iv.hi });
    }
    let mut knots = vec![iv.lo];
    for &x in breaks {
        if x > *knots.last().unwrap() && x < iv.hi {
            knots.push(x);
        }
    }
    knots.push(iv.hi);

    let mut heap = BinaryHeap::with_capacity(knots.len() * 2);
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in knots.windows(2) {
        let seg = gauss_kronrod(&f, w[0], w[1])?;
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }

    let mut subdivisions = 0;
    while total_err > tol {
        if subdivisions >= max_subdivisions {
            return Err(NumericsError::NonConvergence { value: total, error_bound: total_err, tol, subdivisions });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment is at floating-point resolution; keep it and give up.
            heap.push(worst);
            return Err(NumericsError::NonConvergence { value: total, error_bound: total_err, tol, subdivisions });
        }
        let left = gauss_kronrod(&f, worst.a, mid)?;
        let right = gauss_kronrod(&f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        if subdivisions % 1024 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error_bound: f64 = heap.iter().map(|s| s.error).sum();
    Ok(QuadratureResult { value, error_bound, subdivisions })
}

/// Like [`integrate_with_breaks`], but a tolerance that cannot be reached
/// yields the best estimate with its (larger) error bound instead of an error.
pub fn integrate_best_effort<F: Fn(f64) -> f64>(
    f: F,
    iv: Interval,
    breaks: &[f64],
    tol: f64,
    max_subdivisions: usize,
) -> Result<QuadratureResult> {
    match integrate_with_breaks(f, iv, breaks, tol, max_subdivisions) {
        Err(NumericsError::NonConvergence { value, error_bound, subdivisions, .. }) => {
            Ok(QuadratureResult { value, error_bound, subdivisions })
        }
        other => other,
    }
}

/// Integrate `f` over `iv` to absolute tolerance `tol`.
///
/// Infinite endpoints are mapped onto a finite interval with
/// `x = a + t / (1 - t)`; that path assumes `f` decays at infinity. For
/// integrands with slow or oscillatory tails use [`integrate_with_tail`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, iv: Interval, tol: f64) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidInterval { lo: iv.lo, hi: iv.hi });
    }
    let iv = Interval::new(iv.lo, iv.hi)?;
    match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => integrate_with_breaks(f, iv, &[], tol, DEFAULT_MAX_SUBDIVISIONS),
        (true, false) => integrate_half_line(&f, iv.lo, 1.0, tol),
        (false, true) => integrate_half_line(&f, iv.hi, -1.0, tol),
        (false, false) => {
            let left = integrate_half_line(&f, 0.0, -1.0, 0.5 * tol)?;
            let right = integrate_half_line(&f, 0.0, 1.0, 0.5 * tol)?;
            Ok(left + right)
        }
    }
}

/// Integral of `f` from `a` towards `direction * inf`.
fn integrate_half_line(f: &dyn Fn(f64) -> f64, a: f64, direction: f64, tol: f64) -> Result<QuadratureResult> {
    let g = |t: f64| {
        let s = 1.0 - t;
        f(a + direction * t / s) / (s * s)
    };
    integrate_with_breaks(g, Interval { lo: 0.0, hi: 1.0 }, &[], tol, DEFAULT_MAX_SUBDIVISIONS)
}

/// Integrate over `[a, inf)` by truncating at the first `a + step * 2^k`
/// where `tail(x)` (an estimate of the integral over `[x, inf)`) has
/// half-width below `tol / 2`. `breaks_until` supplies breakpoints for the
/// finite part.
pub fn integrate_with_tail<F, T, B>(
    f: F,
    a: f64,
    first_cut: f64,
    tail: T,
    breaks_until: B,
    tol: f64,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> TailEstimate,
    B: Fn(f64) -> Vec<f64>,
{
    let mut cut = first_cut.max(a + f64::EPSILON);
    let mut est = tail(cut);
    let mut doublings = 0;
    while est.half_width > 0.5 * tol {
        cut = a + 2.0 * (cut - a);
        est = tail(cut);
        doublings += 1;
        if doublings > 60 {
            break;
        }
    }
    let body = integrate_with_breaks(
        f,
        Interval::new(a, cut)?,
        &breaks_until(cut),
        (tol - est.half_width).max(0.25 * tol),
        DEFAULT_MAX_SUBDIVISIONS,
    )?;
    Ok(QuadratureResult {
        value: body.value + est.value,
        error_bound: body.error_bound + est.half_width,
        subdivisions: body.subdivisions,
    })
}

/// Solve `F(x) = target` for increasing continuous `F` on `bracket`.
///
/// Uses Brent's method (inverse quadratic interpolation guarded by
/// bisection). Returns once `|F(x) - target| <= tol` or the bracket has
/// collapsed to a few ulps.
pub fn invert_monotone<F: Fn(f64) -> f64>(f: F, target: f64, bracket: Interval, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    if !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidInterval { lo: a, hi: b });
    }
    let f_lo = f(a);
    let f_hi = f(b);
    if f_lo > f_hi {
        return Err(NumericsError::NonMonotoneDetected { x: a });
    }
    if target < f_lo - tol || target > f_hi + tol {
        return Err(NumericsError::TargetOutOfRange { target, f_lo, f_hi });
    }
    let mut fa = f_lo - target;
    let mut fb = f_hi - target;
    if fa.abs() <= tol && fa.abs() <= fb.abs() {
        return Ok(a);
    }
    if fb.abs() <= tol {
        return Ok(b);
    }
    if fa > 0.0 {
        return Ok(a);
    }
    if fb < 0.0 {
        return Ok(b);
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..400 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let xtol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if fb.abs() <= tol || m.abs() <= xtol {
            return Ok(b);
        }
        if e.abs() >= xtol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (xtol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > xtol { d } else { xtol.copysign(m) };
        fb = f(b) - target;
        let fval = fb + target;
        if fval < f_lo - tol || fval > f_hi + tol || !fval.is_finite() {
            return Err(NumericsError::NonMonotoneDetected { x: b });
        }
    }
    Ok(b)
}

/// `n` points evenly spaced over `[lo, hi]` (inclusive).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` points log-spaced over `[lo, hi]`, `0 < lo < hi`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    linspace(a, b, n).into_iter().map(f64::exp).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand() {
        let r = integrate(|_| 1.0, Interval::new(0.0, 1.0).unwrap(), 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert!(r.error_bound <= 1e-12);
    }

    #[test]
    fn gaussian_on_real_line() {
        let r = integrate(|x| (-std::f64::consts::PI * x * x).exp(), Interval::real_line(), 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn invalid_interval() {
        assert!(matches!(Interval::new(1.0, 1.0), Err(NumericsError::InvalidInterval { .. })));
        assert!(Interval::new(0.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn non_convergence_reported() {
        let r = integrate_with_breaks(|x: f64| (1.0 / x).sin(), Interval::new(1e-6, 1.0).unwrap(), &[], 1e-15, 10);
        assert!(matches!(r, Err(NumericsError::NonConvergence { .. })));
    }

    #[test]
    fn inversion_examples() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let x = invert_monotone(|x| x, 0.3, iv, 1e-14).unwrap();
        assert!((x - 0.3).abs() < 1e-14);

        // F(x) = 2(1 - exp(-x^2/4)); F(x) = 1 at x = 2 sqrt(ln 2).
        let g = |x: f64| 2.0 * (1.0 - (-x * x / 4.0).exp());
        let x = invert_monotone(g, 1.0, Interval::new(0.0, 10.0).unwrap(), 1e-14).unwrap();
        assert!((x - 2.0 * 2f64.ln().sqrt()).abs() < 1e-12);
        assert!((x - 1.665_109_222_315_395_5).abs() < 1e-12);
    }

    #[test]
    fn inversion_errors() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        assert!(matches!(invert_monotone(|x| x, 2.0, iv, 1e-12), Err(NumericsError::TargetOutOfRange { .. })));
        assert!(matches!(invert_monotone(|x| -x, -0.5, iv, 1e-12), Err(NumericsError::NonMonotoneDetected { .. })));
        // Increasing endpoints but a hump in the middle.
        let bumpy = |x: f64| x + 3.0 * (std::f64::consts::PI * x).sin();
        assert!(matches!(invert_monotone(bumpy, 0.9, iv, 1e-12), Err(NumericsError::NonMonotoneDetected { .. })));
    }
}
