//! Special functions: error function family, Bessel `J0`/`J1`, the
//! normalized Dirichlet kernel, plus a few helpers (`sinc`, `ln_gamma`,
//! Hurwitz zeta) used for analytic tail estimates.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use thiserror::Error;

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("{function} undefined at {x}")]
    DomainError { function: &'static str, x: f64 },
}

pub type Result<T> = std::result::Result<T, SpecFunError>;

/// A function value with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunValue {
    pub value: f64,
    pub est_abs_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErfVariant {
    Erf,
    Erfc,
    InvErf,
}

pub fn error_function(variant: ErfVariant, x: f64) -> Result<f64> {
    match variant {
        ErfVariant::Erf => Ok(erf(x)),
        ErfVariant::Erfc => Ok(erfc(x)),
        ErfVariant::InvErf => inv_erf(x),
    }
}

/// Positive-term series `erf(x) = 2x e^{-x^2}/sqrt(pi) * sum (2x^2)^n / (2n+1)!!`.
fn erf_series(x: f64) -> SpecFunValue {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    let value = TWO_OVER_SQRT_PI * x * (-x2).exp() * sum;
    SpecFunValue { value, est_abs_err: 4.0 * (n + 4.0) * f64::EPSILON * value.abs() }
}

/// Continued fraction for `erfc`, valid for `x >= 2` (modified Lentz).
fn erfc_cf(x: f64) -> SpecFunValue {
    if x > 27.3 {
        return SpecFunValue { value: 0.0, est_abs_err: f64::MIN_POSITIVE };
    }
    let tiny = 1e-300;
    let x2 = x * x;
    let mut f = 2.0 * x2 + 1.0;
    let mut c = f;
    let mut d = 0.0;
    let mut k = 1.0;
    loop {
        let a = -(2.0 * k - 1.0) * (2.0 * k);
        let b = 2.0 * x2 + 4.0 * k + 1.0;
        d = b + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        k += 1.0;
        if (delta - 1.0).abs() < 1e-16 || k > 5000.0 {
            break;
        }
    }
    let value = TWO_OVER_SQRT_PI * x * (-x2).exp() / f;
    SpecFunValue { value, est_abs_err: 8.0 * f64::EPSILON * value }
}

pub fn erf_with_error(x: f64) -> SpecFunValue {
    if x.is_nan() {
        return SpecFunValue { value: f64::NAN, est_abs_err: f64::NAN };
    }
    let ax = x.abs();
    let v = if ax <= 3.0 {
        erf_series(ax)
    } else {
        let c = erfc_cf(ax);
        SpecFunValue { value: 1.0 - c.value, est_abs_err: c.est_abs_err + f64::EPSILON }
    };
    SpecFunValue { value: v.value.copysign(x), est_abs_err: v.est_abs_err }
}

pub fn erfc_with_error(x: f64) -> SpecFunValue {
    if x.is_nan() {
        return SpecFunValue { value: f64::NAN, est_abs_err: f64::NAN };
    }
    if x >= 2.0 {
        return erfc_cf(x);
    }
    let e = erf_with_error(x);
    SpecFunValue { value: 1.0 - e.value, est_abs_err: e.est_abs_err + f64::EPSILON }
}

pub fn erf(x: f64) -> f64 {
    erf_with_error(x).value
}

pub fn erfc(x: f64) -> f64 {
    erfc_with_error(x).value
}

/// Inverse of `erfc` on `(0, 2)`, by guarded Newton iteration.
pub fn inv_erfc(z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 2.0) {
        return Err(SpecFunError::DomainError { function: "inv_erfc", x: z });
    }
    if z > 1.0 {
        return Ok(-inv_erfc(2.0 - z)?);
    }
    if z == 1.0 {
        return Ok(0.0);
    }
    // erfc is decreasing; root lies in [lo, hi].
    let (mut lo, mut hi) = (0.0_f64, 27.5_f64);
    let mut x = {
        // Leading asymptotic guess, clamped into the bracket.
        let t = (-z.ln()).max(0.0);
        (t - 0.5 * (PI * t.max(1.0)).ln()).max(0.0).sqrt().min(hi)
    };
    for _ in 0..200 {
        let fx = erfc(x) - z;
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let deriv = -TWO_OVER_SQRT_PI * (-x * x).exp();
        let mut next = if deriv != 0.0 { x - fx / deriv } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

pub fn inv_erf(y: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(SpecFunError::DomainError { function: "inv_erf", x: y });
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let ay = y.abs();
    let x = if ay >= 0.5 {
        inv_erfc(1.0 - ay)?
    } else {
        let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
        let mut x = 0.5 * PI.sqrt() * ay;
        for _ in 0..200 {
            let fx = erf(x) - ay;
            if fx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let mut next = x - fx / (TWO_OVER_SQRT_PI * (-x * x).exp());
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() {
                x = next;
                break;
            }
            x = next;
        }
        x
    };
    Ok(x.copysign(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(SpecFunError::DomainError { function: "bessel_j", x });
    }
    Ok(match order {
        BesselOrder::Zero => j0(x),
        BesselOrder::One => j1(x),
    })
}

const BESSEL_SERIES_MAX: f64 = 6.0;
const BESSEL_ASYMPTOTIC_MIN: f64 = 25.0;

fn bessel_series(order: u32, x: f64) -> SpecFunValue {
    let q = 0.25 * x * x;
    let (mut term, scale) = match order {
        0 => (1.0, 1.0),
        _ => (1.0, 0.5 * x),
    };
    let mut sum = term;
    let mut abs_sum = term;
    let nu = order as f64;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= -q / (m * (m + nu));
        sum += term;
        abs_sum += term.abs();
        if term.abs() < 1e-18 * abs_sum.max(1.0) {
            break;
        }
    }
    SpecFunValue { value: scale * sum, est_abs_err: 2.0 * (m + 2.0) * f64::EPSILON * abs_sum * scale.abs() }
}

/// `J0(x)` and `J1(x)` via Miller's backward recurrence with the
/// normalization `J0 + 2 sum J_2k = 1`.
fn bessel_miller(x: f64) -> (f64, f64) {
    let mut top = (x as usize) + 60;
    if top % 2 == 1 {
        top += 1;
    }
    let mut j_next = 0.0_f64;
    let mut j_cur = 1e-30_f64;
    let mut norm = 0.0;
    let mut j0 = 0.0;
    let mut j1 = 0.0;
    for k in (1..=top).rev() {
        let j_prev = 2.0 * k as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        if k % 2 == 1 {
            // j_cur now holds J_{k-1}, with k-1 even.
            norm += if k == 1 { j_cur } else { 2.0 * j_cur };
        }
        if k == 1 {
            j0 = j_cur;
            j1 = j_next;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
        }
    }
    (j0 / norm, j1 / norm)
}

/// Hankel asymptotic expansion; returns `(value, first omitted term)`.
fn bessel_hankel(order: u32, x: f64) -> SpecFunValue {
    let mu = 4.0 * (order as f64).powi(2);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k: f64 = 0.0;
    let mut last = f64::INFINITY;
    let mut omitted = 0.0;
    loop {
        k += 1.0;
        let next = term * (mu - (2.0 * k - 1.0).powi(2)) / (k * 8.0 * x);
        if next.abs() >= last || next.abs() < 1e-18 {
            omitted = next.abs();
            break;
        }
        last = next.abs();
        term = next;
        // a_k with alternating signs in the P and Q sums.
        match (k as u64) % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if k > 60.0 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    // chi = x - (order/2 + 1/4) pi
    let (cos_chi, sin_chi) = match order {
        0 => ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2),
        _ => ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2),
    };
    let amp = (2.0 / (PI * x)).sqrt();
    SpecFunValue {
        value: amp * (p * cos_chi - q * sin_chi),
        est_abs_err: amp * (omitted + 4.0 * f64::EPSILON) + 2.0 * f64::EPSILON * x * amp,
    }
}

pub fn j0_with_error(x: f64) -> SpecFunValue {
    let x = x.abs();
    if x <= BESSEL_SERIES_MAX {
        bessel_series(0, x)
    } else if x < BESSEL_ASYMPTOTIC_MIN {
        SpecFunValue { value: bessel_miller(x).0, est_abs_err: 1e-15 }
    } else {
        bessel_hankel(0, x)
    }
}

pub fn j1_with_error(x: f64) -> SpecFunValue {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let ax = x.abs();
    let v = if ax <= BESSEL_SERIES_MAX {
        bessel_series(1, ax)
    } else if ax < BESSEL_ASYMPTOTIC_MIN {
        SpecFunValue { value: bessel_miller(ax).1, est_abs_err: 1e-15 }
    } else {
        bessel_hankel(1, ax)
    };
    SpecFunValue { value: sign * v.value, est_abs_err: v.est_abs_err }
}

pub fn j0(x: f64) -> f64 {
    j0_with_error(x).value
}

pub fn j1(x: f64) -> f64 {
    j1_with_error(x).value
}

/// `J2(x) = 2 J1(x) / x - J0(x)`; zero at the origin.
pub fn j2(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let q = x * x / 4.0;
        return 0.5 * q * (1.0 - q / 3.0);
    }
    2.0 * j1(x) / x - j0(x)
}

/// `sin(t) / t` with the removable singularity filled in.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 * (1.0 - t2 / 20.0)
    } else {
        t.sin() / t
    }
}

/// `sin(pi x) / (pi x)`.
pub fn sinc_pi(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        return sinc(PI * x);
    }
    // Reduce so that sin(pi x) keeps full relative accuracy near integers.
    let k = x.round();
    let d = x - k;
    let s = (PI * d).sin() * if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
    s / (PI * x)
}

/// `sin(n pi x) / (n sin(pi x))`, with the limit value at integer `x`.
pub fn dirichlet_kernel(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    let k = x.round();
    let d = x - k;
    let parity = ((k as i64).rem_euclid(2) as u32) * ((n - 1) % 2);
    let sign = if parity == 1 { -1.0 } else { 1.0 };
    let s = (PI * d).sin();
    let value = if s.abs() < 1e-8 {
        sinc(nf * PI * d) / sinc(PI * d)
    } else {
        // sin(n pi d) for |d| <= 1/2 is well conditioned.
        (nf * PI * d).sin() / (nf * s)
    };
    sign * value
}

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Hurwitz zeta `sum_{k >= 0} (q + k)^{-s}` for `s > 1`, `q > 0`
/// (direct sum plus Euler–Maclaurin correction).
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const BERNOULLI: [f64; 8] =
        [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0];
    let m = 12usize;
    let mut sum = 0.0;
    for k in 0..m {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + m as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // sum_j B_{2j}/(2j)! * s(s+1)...(s+2j-2) * a^{-s-2j+1}
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut fact = 2.0; // (2j)!
    let mut apow = a.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b / fact * rising * apow;
        sum += term;
        let j2 = 2.0 * (j as f64 + 1.0);
        rising *= (s + j2 - 1.0) * (s + j2);
        fact *= (j2 + 1.0) * (j2 + 2.0);
        apow /= a * a;
        if term.abs() < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Mean of `|sin(pi u)|^{2s}` over a period: `Gamma(s + 1/2) / (sqrt(pi) Gamma(s + 1))`.
pub fn sine_power_mean(s: f64) -> f64 {
    (ln_gamma(s + 0.5) - ln_gamma(s + 1.0)).exp() * FRAC_1_SQRT_PI
}
