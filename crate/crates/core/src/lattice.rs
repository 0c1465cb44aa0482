//! Lattice points of integer boxes on the hyperplanes `sum z_i = k`.
//!
//! Counting uses `z_i in [0, l_i - 1]`; box offsets only shift `k`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::numerics::{self, Interval, NumericsError};
use crate::report::{CheckKind, CheckReport};
use crate::specfun::dirichlet_kernel;

/// Default cap on `sum (l_i - 1)`.
pub const DEFAULT_DEGREE_CAP: usize = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("all side lengths equal 1; the bound is undefined")]
    DegenerateBox,
    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    CapacityExceeded { degree: usize, cap: usize },
    #[error("side {index} dominates: sum (l^2 - 1) < 2 (l_{index}^2 - 1); the Fourier argument does not apply")]
    CaseCondition { index: usize },
    #[error("box has {points} points, above the brute-force limit {limit}")]
    TooLargeForEnumeration { points: u128, limit: u128 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, LatticeError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxSpec {
    pub lengths: Vec<u64>,
    pub offsets: Vec<i64>,
}

impl BoxSpec {
    pub fn new(lengths: Vec<u64>, offsets: Vec<i64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(LatticeError::InvalidBox("no sides".into()));
        }
        if lengths.contains(&0) {
            return Err(LatticeError::InvalidBox("side lengths must be >= 1".into()));
        }
        if offsets.len() != lengths.len() {
            return Err(LatticeError::InvalidBox(format!("{} offsets for {} sides", offsets.len(), lengths.len())));
        }
        Ok(Self { lengths, offsets })
    }

    /// Box with all offsets zero.
    pub fn at_origin(lengths: Vec<u64>) -> Result<Self> {
        let n = lengths.len();
        Self::new(lengths, vec![0; n])
    }

    pub fn points(&self) -> BigUint {
        self.lengths.iter().fold(BigUint::one(), |acc, &l| acc * l)
    }

    /// `sum (l_i^2 - 1)`.
    pub fn variance_sum(&self) -> BigUint {
        self.lengths.iter().fold(BigUint::zero(), |acc, &l| acc + BigUint::from(l) * l - 1u32)
    }
}

/// Coefficients of `prod_i (1 + x + ... + x^{l_i - 1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlicePolynomial {
    pub coeffs: Vec<BigUint>,
}

impl SlicePolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn max_coefficient(&self) -> &BigUint {
        self.coeffs.iter().max().expect("non-empty")
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|k| self.coeffs[k] == self.coeffs[n - 1 - k])
    }

    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }
}

pub fn slice_polynomial(lengths: &[u64]) -> Result<SlicePolynomial> {
    slice_polynomial_capped(lengths, DEFAULT_DEGREE_CAP)
}

/// Iterated sliding-window convolution: multiplying by `1 + ... + x^{l-1}`
/// replaces each coefficient by a window sum of width `l`.
pub fn slice_polynomial_capped(lengths: &[u64], cap: usize) -> Result<SlicePolynomial> {
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(LatticeError::InvalidBox("side lengths must be >= 1".into()));
    }
    let degree: u128 = lengths.iter().map(|&l| (l - 1) as u128).sum();
    if degree > cap as u128 {
        return Err(LatticeError::CapacityExceeded { degree: degree.min(usize::MAX as u128) as usize, cap });
    }
    let mut coeffs = vec![BigUint::one()];
    for &l in lengths {
        if l == 1 {
            continue;
        }
        let l = l as usize;
        let new_len = coeffs.len() + l - 1;
        let mut out = Vec::with_capacity(new_len);
        let mut window = BigUint::zero();
        for j in 0..new_len {
            if j < coeffs.len() {
                window += &coeffs[j];
            }
            if j >= l {
                window -= &coeffs[j - l];
            }
            out.push(window.clone());
        }
        coeffs = out;
    }
    Ok(SlicePolynomial { coeffs })
}

/// `#{z in box : sum z_i = k}`.
pub fn slice_count(b: &BoxSpec, k: i64) -> Result<BigUint> {
    let poly = slice_polynomial(&b.lengths)?;
    Ok(count_in(&poly, b, k))
}

fn count_in(poly: &SlicePolynomial, b: &BoxSpec, k: i64) -> BigUint {
    let shift: i128 = b.offsets.iter().map(|&o| o as i128).sum();
    let idx = k as i128 - shift;
    if idx < 0 || idx > poly.degree() as i128 {
        BigUint::zero()
    } else {
        poly.coeffs[idx as usize].clone()
    }
}

/// Counts by direct enumeration of every point (odometer order).
pub fn brute_force_counts(lengths: &[u64], limit: u128) -> Result<Vec<u64>> {
    let points: u128 = lengths.iter().map(|&l| l as u128).product();
    if points > limit {
        return Err(LatticeError::TooLargeForEnumeration { points, limit });
    }
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(LatticeError::InvalidBox("side lengths must be >= 1".into()));
    }
    let degree: usize = lengths.iter().map(|&l| (l - 1) as usize).sum();
    let mut counts = vec![0u64; degree + 1];
    let mut z = vec![0u64; lengths.len()];
    let mut sum = 0usize;
    loop {
        counts[sum] += 1;
        let mut i = 0;
        loop {
            if i == z.len() {
                return Ok(counts);
            }
            z[i] += 1;
            sum += 1;
            if z[i] < lengths[i] {
                break;
            }
            sum -= z[i] as usize;
            z[i] = 0;
            i += 1;
        }
    }
}

/// `a / b` for big integers, accurate to double precision.
pub fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = |x: &BigUint| x.bits().saturating_sub(60);
    let (sa, sb) = (shift(a), shift(b));
    let fa = (a >> sa).to_f64().unwrap_or(f64::NAN);
    let fb = (b >> sb).to_f64().unwrap_or(f64::NAN);
    fa / fb * 2f64.powi(sa as i32 - sb as i32)
}

/// Outcome of the strict bound `max_k count < sqrt(2) prod l / sqrt(sum (l^2 - 1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceBoundReport {
    pub max_count: BigUint,
    pub bound: f64,
    /// `max_count * sqrt(sum (l^2 - 1)) / prod l`; the bound reads `ratio < sqrt(2)`.
    pub ratio: f64,
    /// Exact integer comparison `max^2 sum (l^2 - 1) < 2 (prod l)^2`.
    pub exact_strict: bool,
}

impl SliceBoundReport {
    pub fn to_check(&self, lengths: &[u64]) -> CheckReport {
        let lhs = self.max_count.to_f64().unwrap_or(f64::INFINITY);
        let mut r = CheckReport::new("slice_bound", CheckKind::Strict, lhs, self.bound, 0.0);
        // The integer comparison is authoritative.
        r.strict_pass = self.exact_strict;
        r.pass = self.exact_strict || r.pass;
        let dims: Vec<String> = lengths.iter().map(|l| l.to_string()).collect();
        r.param("dims", lengths.len() as f64)
            .param("ratio", self.ratio)
            .with_note(format!("lengths={}", dims.join("x")))
    }
}

pub fn slice_bound_check(b: &BoxSpec) -> Result<SliceBoundReport> {
    let poly = slice_polynomial(&b.lengths)?;
    bound_from_poly(&poly, b)
}

fn bound_from_poly(poly: &SlicePolynomial, b: &BoxSpec) -> Result<SliceBoundReport> {
    let v = b.variance_sum();
    if v.is_zero() {
        return Err(LatticeError::DegenerateBox);
    }
    let p = b.points();
    let max = poly.max_coefficient().clone();
    let exact_strict = &max * &max * &v < BigUint::from(2u32) * &p * &p;
    let vf = v.to_f64().unwrap_or(f64::INFINITY);
    let bound = 2f64.sqrt() * p.to_f64().unwrap_or(f64::INFINITY) / vf.sqrt();
    let ratio = big_ratio(&max, &p) * vf.sqrt();
    Ok(SliceBoundReport { max_count: max, bound, ratio, exact_strict })
}

/// `max_k count * sqrt(sum(l^2-1)) / prod l` for the `(m, m)` box; tends to `sqrt(2)`.
pub fn tightness_ratio(m: u64) -> Result<f64> {
    let b = BoxSpec::at_origin(vec![m, m])?;
    Ok(slice_bound_check(&b)?.ratio)
}

/// Exponents `p_j = sum(l^2-1) / (l_j^2-1)` over sides with `l_j >= 2`.
pub fn holder_exponents(lengths: &[u64]) -> Result<Vec<(usize, f64)>> {
    let v: f64 = lengths.iter().map(|&l| (l as f64).powi(2) - 1.0).sum();
    if v == 0.0 {
        return Err(LatticeError::DegenerateBox);
    }
    let mut out = Vec::new();
    for (j, &l) in lengths.iter().enumerate() {
        if l < 2 {
            continue;
        }
        let w = (l as f64).powi(2) - 1.0;
        if v < 2.0 * w {
            return Err(LatticeError::CaseCondition { index: j });
        }
        out.push((j, v / w));
    }
    Ok(out)
}

/// Characteristic-function chain for `P(X = k)`:
/// `P(X = k) <= prod_j (int |D_{l_j}|^{p_j})^{1/p_j} < sqrt(2 / sum(l^2-1))`.
///
/// Returns the two links as separate reports.
pub fn char_fn_bound_check(b: &BoxSpec, k: i64) -> Result<Vec<CheckReport>> {
    let exps = holder_exponents(&b.lengths)?;
    let poly = slice_polynomial(&b.lengths)?;
    let prob = big_ratio(&count_in(&poly, b, k), &b.points());
    let mut log_prod = 0.0;
    let mut err = 0.0;
    for &(j, p) in &exps {
        let l = b.lengths[j];
        let q = crate::inequalities::kernel_power_integral(l as u32, p, 1e-14).map_err(|e| match e {
            crate::inequalities::InequalityError::Numerics(n) => LatticeError::Numerics(n),
            other => LatticeError::InvalidBox(other.to_string()),
        })?;
        log_prod += q.value.ln() / p;
        err += q.error_bound / (q.value * p);
    }
    let product = log_prod.exp();
    let v: f64 = b.lengths.iter().map(|&l| (l as f64).powi(2) - 1.0).sum();
    let bound = (2.0 / v).sqrt();
    let budget = product * err + 1e-14;
    Ok(vec![
        CheckReport::new("char_fn_holder", CheckKind::NonStrict, prob, product, budget).param("k", k as f64),
        CheckReport::new("char_fn_bound", CheckKind::Strict, product, bound, budget).param("k", k as f64),
    ])
}

/// `sum_k P(X = k)^2` against `int_{-1/2}^{1/2} prod_j D_{l_j}(t)^2 dt`.
pub fn plancherel_check(lengths: &[u64]) -> Result<CheckReport> {
    let poly = slice_polynomial(lengths)?;
    let total = poly.total();
    let sq: BigUint = poly.coeffs.iter().map(|c| c * c).sum();
    let lhs = big_ratio(&sq, &(&total * &total));
    let lmax = *lengths.iter().max().unwrap();
    let breaks: Vec<f64> = (1..).map(|i| i as f64 / lmax as f64).take_while(|&x| x < 0.5).collect();
    let q = numerics::integrate_with_breaks(
        |t| lengths.iter().map(|&l| dirichlet_kernel(l as u32, t).powi(2)).product::<f64>(),
        Interval::new(0.0, 0.5)?,
        &breaks,
        1e-15,
        numerics::DEFAULT_MAX_SUBDIVISIONS,
    )?
    .scale(2.0);
    Ok(CheckReport::new("plancherel", CheckKind::Equality, lhs, q.value, q.error_bound + 1e-13)
        .param("dims", lengths.len() as f64))
}

/// Seeded random boxes with `dims` sides each in `[1, max_side]`, at least
/// one side `>= 2`, and at most `max_points` points.
pub fn random_boxes(
    seed: u64,
    count: usize,
    dims: std::ops::RangeInclusive<usize>,
    max_side: u64,
    max_points: u64,
) -> Vec<BoxSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let d = rng.gen_range(dims.clone());
        let mut lengths: Vec<u64> = (0..d).map(|_| rng.gen_range(1..=max_side.max(2))).collect();
        if lengths.iter().all(|&l| l == 1) {
            lengths[0] = 2;
        }
        let pts: u128 = lengths.iter().map(|&l| l as u128).product();
        if pts > max_points as u128 {
            continue;
        }
        let offsets: Vec<i64> = (0..d).map(|_| rng.gen_range(-5..=5)).collect();
        out.push(BoxSpec::new(lengths, offsets).expect("valid by construction"));
    }
    out
}

/// Polynomial against enumeration, palindrome and mass invariants, and the
/// strict bound, for one box.
pub fn verify_box(b: &BoxSpec) -> Result<Vec<CheckReport>> {
    let poly = slice_polynomial(&b.lengths)?;
    let brute = brute_force_counts(&b.lengths, 1_000_000)?;
    let agree =
        poly.coeffs.len() == brute.len() && poly.coeffs.iter().zip(&brute).all(|(c, &n)| *c == BigUint::from(n));
    let to_f = |x: bool| if x { 0.0 } else { 1.0 };
    let invariants = poly.is_palindromic() && poly.total() == b.points();
    let bound = bound_from_poly(&poly, b)?;
    let dims: Vec<String> = b.lengths.iter().map(|l| l.to_string()).collect();
    let label = format!("lengths={}", dims.join("x"));
    Ok(vec![
        CheckReport::new("slice_brute_force", CheckKind::Equality, to_f(agree), 0.0, 0.0).with_note(label.clone()),
        CheckReport::new("slice_invariants", CheckKind::Equality, to_f(invariants), 0.0, 0.0).with_note(label),
        bound.to_check(&b.lengths),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(lengths: &[u64]) -> Vec<u64> {
        slice_polynomial(lengths).unwrap().coeffs.iter().map(|c| c.to_u64().unwrap()).collect()
    }

    #[test]
    fn small_polynomials() {
        assert_eq!(counts(&[2, 3]), vec![1, 2, 2, 1]);
        assert_eq!(counts(&[1, 1, 1]), vec![1]);
        assert_eq!(counts(&[2, 2]), vec![1, 2, 1]);
        for m in 1..=12u64 {
            let p = slice_polynomial(&[m, m]).unwrap();
            assert_eq!(*p.max_coefficient(), BigUint::from(m));
            assert_eq!(counts(&[m, m]), brute_force_counts(&[m, m], 1000).unwrap());
        }
    }

    #[test]
    fn counts_with_offsets() {
        let b = BoxSpec::new(vec![2, 2], vec![0, 0]).unwrap();
        assert_eq!(slice_count(&b, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(slice_count(&b, 7).unwrap(), BigUint::zero());
        assert_eq!(slice_count(&b, -1).unwrap(), BigUint::zero());
        // z_i in [1, l_i]: the maximum m of the (m, m, 1, ..., 1) box sits at m + n - 1.
        let (m, n) = (7u64, 5usize);
        let mut l = vec![1u64; n];
        l[0] = m;
        l[1] = m;
        let b = BoxSpec::new(l, vec![1; n]).unwrap();
        assert_eq!(slice_count(&b, (m as usize + n - 1) as i64).unwrap(), BigUint::from(m));
        assert!(slice_count(&b, (m as usize + n - 3) as i64).unwrap() < BigUint::from(m));
    }

    #[test]
    fn bound_examples() {
        let r = slice_bound_check(&BoxSpec::at_origin(vec![2, 2]).unwrap()).unwrap();
        assert_eq!(r.max_count, BigUint::from(2u32));
        assert!((r.bound - 2f64.sqrt() * 4.0 / 6f64.sqrt()).abs() < 1e-12);
        assert!(r.exact_strict && r.to_check(&[2, 2]).ok());
        assert_eq!(slice_bound_check(&BoxSpec::at_origin(vec![1, 1]).unwrap()), Err(LatticeError::DegenerateBox));
    }

    #[test]
    fn big_counts() {
        let p = slice_polynomial(&[10; 25]).unwrap();
        assert!(p.max_coefficient().bits() > 64);
        assert!(p.is_palindromic());
        assert_eq!(p.total(), BigUint::from(10u32).pow(25));
        assert!(matches!(slice_polynomial_capped(&[10; 25], 100), Err(LatticeError::CapacityExceeded { .. })));
    }

    #[test]
    fn char_fn_chain() {
        let b = BoxSpec::at_origin(vec![3, 3]).unwrap();
        let r = char_fn_bound_check(&b, 2).unwrap();
        assert!((r[0].lhs - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.iter().all(|c| c.ok()), "{r:?}");
        let e = holder_exponents(&[2, 2, 2]).unwrap();
        assert!(e.iter().all(|&(_, p)| (p - 3.0).abs() < 1e-15));
        let b = BoxSpec::at_origin(vec![2, 2, 2]).unwrap();
        assert!(char_fn_bound_check(&b, 1).unwrap().iter().all(|c| c.ok()));
        let b = BoxSpec::at_origin(vec![9, 2]).unwrap();
        assert_eq!(char_fn_bound_check(&b, 3), Err(LatticeError::CaseCondition { index: 0 }));
    }

    #[test]
    fn plancherel_small() {
        for l in [vec![2, 3], vec![4, 4, 5], vec![7, 2, 3, 3]] {
            let r = plancherel_check(&l).unwrap();
            assert!(r.margin.abs() < 1e-9, "{r}");
        }
    }

    #[test]
    fn ratio_helper() {
        let a = BigUint::from(3u32).pow(100);
        let b = BigUint::from(3u32).pow(99);
        assert!((big_ratio(&a, &b) - 3.0).abs() < 1e-15);
    }
}
