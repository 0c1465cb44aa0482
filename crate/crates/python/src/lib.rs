//! Python bindings for the `majorant` verification library.

use majorant::convex_order::{self, Mode};
use majorant::entropy::{self, EntropyKind};
use majorant::inequalities as ineq;
use majorant::lattice;
use majorant::measures::{self, MeasuredDensity, WeightedMeasure};
use majorant::numerics::Interval;
use majorant::report::CheckReport as CoreReport;
use majorant::specfun;
use majorant::suite::{self as core_suite, SuiteConfig};
use majorant::transport::{self, TransportMap1D};
use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A density on the line paired with its base measure.
#[pyclass(name = "Density", module = "majorant_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDensity {
    inner: MeasuredDensity,
}

#[pymethods]
impl PyDensity {
    /// `weight` is `"lebesgue"` or `"linear"` (`x dx` on the half-line);
    /// `whole_line` puts Lebesgue measure on all of R.
    #[new]
    #[pyo3(signature = (name, params=vec![], weight="lebesgue", whole_line=false))]
    fn new(name: &str, params: Vec<f64>, weight: &str, whole_line: bool) -> PyResult<Self> {
        let d = measures::named_density(name, &params).map_err(err)?;
        let inner = match (weight, whole_line) {
            ("lebesgue", false) => MeasuredDensity::lebesgue(d),
            ("lebesgue", true) => {
                MeasuredDensity::new(d, WeightedMeasure::lebesgue(Interval::real_line())).map_err(err)?
            }
            ("linear", _) => MeasuredDensity::linear(d).map_err(err)?,
            (w, _) => return Err(PyValueError::new_err(format!("unknown weight `{w}`"))),
        };
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.density.name
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    fn sup(&self) -> f64 {
        self.inner.sup()
    }

    /// Returns `(value, error_bound)`.
    #[pyo3(signature = (tol=1e-12))]
    fn mass(&self, tol: f64) -> PyResult<(f64, f64)> {
        let r = self.inner.mass(tol).map_err(err)?;
        Ok((r.value, r.error_bound))
    }

    #[pyo3(signature = (s, tol=1e-12))]
    fn power_integral(&self, s: f64, tol: f64) -> PyResult<(f64, f64)> {
        let r = self.inner.power_integral(s, tol).map_err(err)?;
        Ok((r.value, r.error_bound))
    }

    /// Measure of `{f > lam}`.
    fn distribution(&self, lam: f64) -> PyResult<f64> {
        self.inner.distribution(lam).map_err(err)
    }

    /// `int (f - t)_+`, as `(value, error_bound)`.
    #[pyo3(signature = (t, tol=1e-12))]
    fn hockey_stick(&self, t: f64, tol: f64) -> PyResult<(f64, f64)> {
        let r = self.inner.hockey_stick(t, tol).map_err(err)?;
        Ok((r.value, r.error_bound))
    }

    fn __repr__(&self) -> String {
        format!("Density({:?}, {:?})", self.inner.density.name, self.inner.density.params)
    }
}

#[pyclass(name = "CheckReport", module = "majorant_py", frozen, get_all)]
struct PyCheckReport {
    name: String,
    params: Vec<(String, f64)>,
    lhs: f64,
    rhs: f64,
    margin: f64,
    error_budget: f64,
    kind: &'static str,
    ok: bool,
    note: Option<String>,
}

impl From<CoreReport> for PyCheckReport {
    fn from(r: CoreReport) -> Self {
        Self {
            ok: r.ok(),
            kind: r.kind.label(),
            name: r.name,
            params: r.params,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            error_budget: r.error_budget,
            note: r.note,
        }
    }
}

#[pymethods]
impl PyCheckReport {
    fn __bool__(&self) -> bool {
        self.ok
    }

    fn __repr__(&self) -> String {
        format!(
            "CheckReport({:?}, kind={}, lhs={:e}, rhs={:e}, margin={:e}, ok={})",
            self.name,
            self.kind,
            self.lhs,
            self.rhs,
            self.margin,
            if self.ok { "True" } else { "False" }
        )
    }
}

fn reports(v: Vec<CoreReport>) -> Vec<PyCheckReport> {
    v.into_iter().map(Into::into).collect()
}

#[pyclass(name = "MajorizationVerdict", module = "majorant_py", frozen, get_all)]
struct PyVerdict {
    mode: &'static str,
    passed: bool,
    worst_t: f64,
    worst_margin: f64,
    error_budget: f64,
    characterizations_agree: bool,
    /// `(t, gap, gap_err, tail_form, tail_err)` per level.
    samples: Vec<(f64, f64, f64, f64, f64)>,
}

#[pymethods]
impl PyVerdict {
    fn __bool__(&self) -> bool {
        self.passed
    }

    fn __repr__(&self) -> String {
        format!(
            "MajorizationVerdict(mode={}, passed={}, worst_margin={:e}, agree={})",
            self.mode,
            if self.passed { "True" } else { "False" },
            self.worst_margin,
            if self.characterizations_agree { "True" } else { "False" }
        )
    }
}

/// Is `g` majorized by `f`?
#[pyfunction]
#[pyo3(signature = (f, g, mode="standard", t_grid=None, tol=1e-10))]
fn majorization_verdict(
    f: &PyDensity,
    g: &PyDensity,
    mode: &str,
    t_grid: Option<Vec<f64>>,
    tol: f64,
) -> PyResult<PyVerdict> {
    let m = match mode {
        "standard" => Mode::Standard,
        "vanishing" => Mode::Vanishing,
        other => return Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
    };
    let v = convex_order::majorization_verdict(&f.inner, &g.inner, m, t_grid.as_deref(), tol).map_err(err)?;
    Ok(PyVerdict {
        mode: if m == Mode::Standard { "standard" } else { "vanishing" },
        passed: v.pass,
        worst_t: v.worst_t,
        worst_margin: v.worst_margin,
        error_budget: v.error_budget,
        characterizations_agree: v.characterizations_agree,
        samples: v.samples.iter().map(|s| (s.t, s.gap, s.gap_err, s.tail_form, s.tail_err)).collect(),
    })
}

/// Monotone map pushing `source` onto `target`.
#[pyclass(name = "TransportMap", module = "majorant_py", frozen)]
struct PyTransportMap {
    inner: TransportMap1D,
}

#[pymethods]
impl PyTransportMap {
    #[new]
    fn new(source: &PyDensity, target: &PyDensity) -> PyResult<Self> {
        let inner = transport::build_transport(&source.inner, &target.inner).map_err(err)?;
        Ok(Self { inner })
    }

    fn __call__(&self, x: f64) -> PyResult<f64> {
        self.inner.eval(x).map_err(err)
    }

    fn deriv(&self, x: f64) -> PyResult<f64> {
        self.inner.deriv(x).map_err(err)
    }

    fn inverse(&self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.inverse().map_err(err)? })
    }

    fn ma_residual(&self, x: f64) -> PyResult<f64> {
        transport::ma_residual(&self.inner, x).map_err(err)
    }

    /// Largest `T'` on the grid; returns `(sup, worst_x, passed)`.
    fn sup_derivative(&self, grid: Vec<f64>) -> PyResult<(f64, f64, bool)> {
        let r = transport::contraction_report(&self.inner, transport::Criterion::TprimeLe1, &grid).map_err(err)?;
        Ok((r.sup_observed, r.worst_x, r.pass))
    }
}

#[pyfunction]
fn erf(x: f64) -> f64 {
    specfun::erf(x)
}

#[pyfunction]
fn erfc(x: f64) -> f64 {
    specfun::erfc(x)
}

#[pyfunction]
fn inv_erf(y: f64) -> PyResult<f64> {
    specfun::inv_erf(y).map_err(err)
}

#[pyfunction]
fn j0(x: f64) -> f64 {
    specfun::j0(x)
}

#[pyfunction]
fn j1(x: f64) -> f64 {
    specfun::j1(x)
}

#[pyfunction]
fn ball_check(s: f64) -> PyResult<PyCheckReport> {
    ineq::ball_check(s).map(Into::into).map_err(err)
}

#[pyfunction]
fn op_bessel_check(s: f64) -> PyResult<PyCheckReport> {
    ineq::op_bessel_check(s).map(Into::into).map_err(err)
}

#[pyfunction]
fn discrete_ball_check(n: u32, p: f64) -> PyResult<PyCheckReport> {
    ineq::discrete_ball_check(n, p).map(Into::into).map_err(err)
}

#[pyfunction]
fn named_lemma_check(name: &str, params: Vec<f64>) -> PyResult<PyCheckReport> {
    ineq::named_lemma_check(name, &params).map(Into::into).map_err(err)
}

#[pyfunction]
fn lemma_names() -> Vec<&'static str> {
    ineq::LEMMA_NAMES.to_vec()
}

/// Exact slice counts `N_k` for a box with the given side lengths.
#[pyfunction]
fn slice_counts(lengths: Vec<u64>) -> PyResult<Vec<BigUint>> {
    Ok(lattice::slice_polynomial(&lengths).map_err(err)?.coeffs)
}

#[pyfunction]
#[pyo3(signature = (lengths, offsets=None))]
fn slice_bound_check(lengths: Vec<u64>, offsets: Option<Vec<i64>>) -> PyResult<PyCheckReport> {
    let offsets = offsets.unwrap_or_else(|| vec![0; lengths.len()]);
    let b = lattice::BoxSpec::new(lengths.clone(), offsets).map_err(err)?;
    Ok(lattice::slice_bound_check(&b).map_err(err)?.to_check(&lengths).into())
}

#[pyfunction]
fn tightness_ratio(m: u64) -> PyResult<f64> {
    lattice::tightness_ratio(m).map_err(err)
}

/// Rényi (`kind="renyi"`) or Tsallis entropy of order `q`.
#[pyfunction]
#[pyo3(signature = (name, params, q, kind="renyi"))]
fn entropy_of(name: &str, params: Vec<f64>, q: f64, kind: &str) -> PyResult<f64> {
    let d = measures::named_density(name, &params).map_err(err)?;
    let k = match kind {
        "renyi" => EntropyKind::Renyi,
        "tsallis" => EntropyKind::Tsallis,
        other => return Err(PyValueError::new_err(format!("unknown entropy kind `{other}`"))),
    };
    entropy::entropy(&d, q, k).map_err(err)
}

#[pyfunction]
fn psi(q: f64, x: f64) -> f64 {
    entropy::psi(q, x)
}

/// Run a suite and return `(exit_code, report_text)`. Keyword options
/// use the `verify` config keys.
#[pyfunction]
#[pyo3(signature = (suite, **options))]
fn run_suite(suite: &str, options: Option<&Bound<'_, pyo3::types::PyDict>>) -> PyResult<(i32, String)> {
    let mut cfg = SuiteConfig::default();
    cfg.set("suite", suite).map_err(err)?;
    if let Some(opts) = options {
        for (k, v) in opts.iter() {
            let key: String = k.extract()?;
            // Lists become comma-separated text; everything else goes through str().
            let value = match v.extract::<Vec<Bound<'_, PyAny>>>() {
                Ok(items) if !v.is_instance_of::<pyo3::types::PyString>() => {
                    items.iter().map(|i| i.str().map(|s| s.to_string())).collect::<PyResult<Vec<_>>>()?.join(",")
                }
                _ => v.str()?.to_string(),
            };
            cfg.set(&key, &value).map_err(err)?;
        }
    }
    let run = core_suite::run_suite(&cfg).map_err(err)?;
    Ok((run.exit_code(), run.render()))
}

#[pyfunction]
fn ball_certificates() -> PyResult<Vec<PyCheckReport>> {
    core_suite::ball_certificates().map(reports).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn majorant_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensity>()?;
    m.add_class::<PyCheckReport>()?;
    m.add_class::<PyVerdict>()?;
    m.add_class::<PyTransportMap>()?;
    m.add_function(wrap_pyfunction!(erf, m)?)?;
    m.add_function(wrap_pyfunction!(erfc, m)?)?;
    m.add_function(wrap_pyfunction!(inv_erf, m)?)?;
    m.add_function(wrap_pyfunction!(j0, m)?)?;
    m.add_function(wrap_pyfunction!(j1, m)?)?;
    m.add_function(wrap_pyfunction!(majorization_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(ball_check, m)?)?;
    m.add_function(wrap_pyfunction!(op_bessel_check, m)?)?;
    m.add_function(wrap_pyfunction!(discrete_ball_check, m)?)?;
    m.add_function(wrap_pyfunction!(named_lemma_check, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_names, m)?)?;
    m.add_function(wrap_pyfunction!(slice_counts, m)?)?;
    m.add_function(wrap_pyfunction!(slice_bound_check, m)?)?;
    m.add_function(wrap_pyfunction!(tightness_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_of, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(ball_certificates, m)?)?;
    Ok(())
}
