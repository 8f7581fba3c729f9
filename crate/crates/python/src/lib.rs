//! Python bindings: module `stripwave`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::path::PathBuf;

use stripwave::config::RunConfig as CoreConfig;
use stripwave::fullwave::{solve_all, TruncationOrder};
use stripwave::narrowstrip::solve_narrow;
use stripwave::quadrature::QuadratureConfig;
use stripwave::run::{run_fields, run_fullwave, run_narrow_compare, run_tem_compare, ResultBundle};
use stripwave::selftest::{run_selftest, SelftestOptions};
use stripwave::temwire::{tem_current as core_tem_current, WireGeometry};
use stripwave::{DipoleAxis, Error};

fn py_err(e: Error) -> PyErr {
    if e.exit_code() == 2 {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

/// Homogeneous medium with small loss.
#[pyclass(name = "Medium", frozen)]
struct Medium(stripwave::Medium);

#[pymethods]
impl Medium {
    #[new]
    #[pyo3(signature = (frequency_hz = 300e6, loss = 1e-5))]
    fn new(frequency_hz: f64, loss: f64) -> PyResult<Self> {
        stripwave::Medium::lossy_vacuum(frequency_hz, loss).map(Self).map_err(py_err)
    }

    #[getter]
    fn k(&self) -> Complex64 {
        self.0.k()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega()
    }

    #[getter]
    fn eta(&self) -> Complex64 {
        self.0.eta()
    }
}

/// Strip geometry plus dipole source.
#[pyclass(name = "Scenario", frozen)]
struct Scenario(stripwave::Scenario);

#[pymethods]
impl Scenario {
    #[new]
    #[pyo3(signature = (h, a, x0, y0, z0, axis, moment = 1.0))]
    fn new(h: f64, a: f64, x0: f64, y0: f64, z0: f64, axis: &str, moment: f64) -> PyResult<Self> {
        let axis: DipoleAxis = axis.parse().map_err(py_err)?;
        stripwave::Scenario::new(h, a, [x0, y0, z0], axis, moment)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.h
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    #[getter]
    fn position(&self) -> (f64, f64, f64) {
        (self.0.x0, self.0.y0, self.0.z0)
    }

    #[getter]
    fn axis(&self) -> &'static str {
        self.0.axis.label()
    }

    fn __repr__(&self) -> String {
        let s = &self.0;
        format!(
            "Scenario(h={}, a={}, x0={}, y0={}, z0={}, axis='{}', moment={})",
            s.h,
            s.a,
            s.x0,
            s.y0,
            s.z0,
            s.axis.label(),
            s.moment
        )
    }
}

/// JSON run configuration, as read by the command line tool.
#[pyclass(name = "RunConfig", frozen)]
struct RunConfig(CoreConfig);

#[pymethods]
impl RunConfig {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CoreConfig::from_json(text).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        CoreConfig::load(&path).map(Self).map_err(py_err)
    }

    /// New config with `key=value` overrides applied.
    fn with_overrides(&self, overrides: Vec<String>) -> PyResult<Self> {
        self.0.with_overrides(&overrides).map(Self).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.canonical_json()
    }

    fn hash(&self) -> String {
        self.0.hash()
    }

    #[getter]
    fn scenario(&self) -> Scenario {
        Scenario(self.0.scenario)
    }
}

/// Tables and diagnostics of one run.
#[pyclass(name = "RunResult", frozen)]
struct RunResult {
    bundle: ResultBundle,
    config: CoreConfig,
}

#[pymethods]
impl RunResult {
    #[getter]
    fn kind(&self) -> &str {
        &self.bundle.kind
    }

    #[getter]
    fn diagnostics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (k, v) in &self.bundle.diagnostics {
            d.set_item(k, v)?;
        }
        Ok(d)
    }

    fn table_names(&self) -> Vec<String> {
        self.bundle.tables.iter().map(|t| t.name.clone()).collect()
    }

    /// `(x, y, z, value)` columns of one table.
    fn table(&self, name: &str) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<Complex64>)> {
        let t = self
            .bundle
            .table(name)
            .ok_or_else(|| PyValueError::new_err(format!("no table '{name}'")))?;
        Ok((
            t.rows.iter().map(|r| r.x).collect(),
            t.rows.iter().map(|r| r.y).collect(),
            t.rows.iter().map(|r| r.z).collect(),
            t.rows.iter().map(|r| r.value).collect(),
        ))
    }

    /// Writes the CSV tables and manifest; returns the paths.
    fn write(&self, dir: PathBuf) -> PyResult<Vec<PathBuf>> {
        self.bundle.write(&dir, &self.config).map_err(py_err)
    }
}

/// Runs `fullwave`, `narrow-compare`, `tem-compare` or `fields`.
#[pyfunction]
fn run(py: Python<'_>, kind: &str, config: &RunConfig) -> PyResult<RunResult> {
    let f = match kind {
        "fullwave" => run_fullwave,
        "narrow-compare" => run_narrow_compare,
        "tem-compare" => run_tem_compare,
        "fields" => run_fields,
        other => return Err(PyValueError::new_err(format!("unknown run '{other}'"))),
    };
    let cfg = config.0.clone();
    let bundle = py.detach(|| f(&cfg)).map_err(py_err)?;
    Ok(RunResult { bundle, config: cfg })
}

/// Built-in identity checks; returns `(passed, report)`.
#[pyfunction]
#[pyo3(signature = (tail_constant = None))]
fn selftest(py: Python<'_>, tail_constant: Option<f64>) -> (bool, String) {
    let mut opts = SelftestOptions::default();
    if let Some(v) = tail_constant {
        opts.tail_constant = v;
    }
    let report = py.detach(|| run_selftest(&opts));
    (report.passed(), report.render())
}

/// Narrow-strip spectral total current at one `k_x`.
#[pyfunction]
#[pyo3(signature = (medium, scenario, k_x, rel_tol = 1e-8))]
fn narrow_current(medium: &Medium, scenario: &Scenario, k_x: Complex64, rel_tol: f64) -> PyResult<Complex64> {
    let q = QuadratureConfig::for_geometry(scenario.0.h, scenario.0.a, rel_tol).map_err(py_err)?;
    solve_narrow(&medium.0, &scenario.0, k_x, &q).map_err(py_err)
}

/// Full-wave Chebyshev coefficients `(c, d, condition, residual)` at one `k_x`.
#[pyfunction]
#[pyo3(signature = (medium, scenario, k_x, m_max = 3, rel_tol = 1e-8))]
fn spectral_coefficients(
    medium: &Medium,
    scenario: &Scenario,
    k_x: Complex64,
    m_max: usize,
    rel_tol: f64,
) -> PyResult<(Vec<Complex64>, Vec<Complex64>, f64, f64)> {
    let q = QuadratureConfig::for_geometry(scenario.0.h, scenario.0.a, rel_tol).map_err(py_err)?;
    let order = TruncationOrder::new(m_max).map_err(py_err)?;
    let sc = solve_all(&medium.0, &scenario.0, k_x, order, &q).map_err(py_err)?;
    Ok((sc.c, sc.d, sc.condition, sc.residual))
}

/// TEM current on a wire of radius `s` at the strip height, sampled at `x`.
#[pyfunction]
fn tem_current(medium: &Medium, scenario: &Scenario, s: f64, x: Vec<f64>) -> PyResult<Vec<Complex64>> {
    let wire = WireGeometry::new(s, scenario.0.a).map_err(py_err)?;
    core_tem_current(&medium.0, &scenario.0, &wire, &x)
        .map(|t| t.current)
        .map_err(py_err)
}

#[pymodule]
#[pyo3(name = "stripwave")]
fn pystripwave(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Medium>()?;
    m.add_class::<Scenario>()?;
    m.add_class::<RunConfig>()?;
    m.add_class::<RunResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add_function(wrap_pyfunction!(narrow_current, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(tem_current, m)?)?;
    Ok(())
}
