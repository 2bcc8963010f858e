//! Python bindings: definitions, catalog fixtures, checks and expressions.

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use gcrf::catalog;
use gcrf::checks::{default_checks, run_check, CHECK_NAMES};
use gcrf::expr::{eval_jet, parse_expr, ScalarExpr};
use gcrf::genstruct::phi_value;
use gcrf::io::{export, Definition as CoreDefinition, DefinitionFile};
use gcrf::report::{CheckError, CheckReport, RunOptions};

fn check_err(e: CheckError) -> PyErr {
    match e {
        CheckError::Precondition { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Outcome of one sampled check.
#[pyclass(name = "CheckReport", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyReport {
    check: String,
    residual: f64,
    point: Vec<f64>,
    passed: bool,
    millis: u64,
}

impl From<CheckReport> for PyReport {
    fn from(r: CheckReport) -> Self {
        PyReport { check: r.check, residual: r.residual, point: r.point, passed: r.pass, millis: r.millis }
    }
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        format!(
            "CheckReport(check={:?}, residual={:e}, passed={})",
            self.check,
            self.residual,
            if self.passed { "True" } else { "False" }
        )
    }

    fn __bool__(&self) -> bool {
        self.passed
    }
}

/// A validated definition, loaded from JSON or taken from the catalog.
#[pyclass(name = "Definition", frozen)]
struct PyDefinition {
    inner: CoreDefinition,
}

#[pymethods]
impl PyDefinition {
    #[new]
    fn from_json(src: &str) -> PyResult<Self> {
        let file = DefinitionFile::from_json(src).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let inner = file.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyDefinition { inner })
    }

    #[staticmethod]
    fn from_catalog(name: &str) -> PyResult<Self> {
        let fx = catalog::get(name).map_err(|e| PyKeyError::new_err(e.to_string()))?;
        Ok(PyDefinition { inner: fx.definition })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.domain.dim
    }

    /// The definition's own check list, or the defaults for its payload.
    #[getter]
    fn checks(&self) -> Vec<String> {
        if self.inner.checks.is_empty() {
            default_checks(&self.inner)
        } else {
            self.inner.checks.clone()
        }
    }

    fn to_json(&self) -> String {
        export(&self.inner).to_json()
    }

    #[pyo3(signature = (checks=None, samples=None, seed=None, tol=None))]
    fn run(
        &self,
        py: Python<'_>,
        checks: Option<Vec<String>>,
        samples: Option<usize>,
        seed: Option<u64>,
        tol: Option<f64>,
    ) -> PyResult<Vec<PyReport>> {
        let base = self.inner.options;
        let opts = RunOptions {
            samples: samples.unwrap_or(base.samples),
            seed: seed.unwrap_or(base.seed),
            tol: tol.unwrap_or(base.tol),
            timing: true,
        };
        if opts.samples == 0 {
            return Err(PyValueError::new_err("samples must be at least 1"));
        }
        let names = checks.unwrap_or_else(|| self.checks());
        if let Some(bad) = names.iter().find(|n| !CHECK_NAMES.contains(&n.as_str())) {
            return Err(PyValueError::new_err(format!("unknown check {bad:?}")));
        }
        let def = &self.inner;
        let reports = py.detach(|| names.iter().map(|n| run_check(def, n, &opts)).collect::<Result<Vec<_>, _>>());
        Ok(reports.map_err(check_err)?.into_iter().map(PyReport::from).collect())
    }

    /// Real matrix of the big-bundle endomorphism at `point`.
    fn phi_at(&self, point: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let phi = self.inner.phi.as_ref().ok_or_else(|| PyValueError::new_err("definition has no F-structure"))?;
        if point.len() != phi.dim() {
            return Err(PyValueError::new_err(format!("expected a point of dimension {}", phi.dim())));
        }
        let m = phi_value(phi, &point).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(m.row_iter().map(|r| r.iter().copied().collect()).collect())
    }

    /// `(rank E, dim S, negative index on S)` at `point`.
    fn eigen_ranks(&self, point: Vec<f64>) -> PyResult<(usize, usize, usize)> {
        let phi = self.inner.phi.as_ref().ok_or_else(|| PyValueError::new_err("definition has no F-structure"))?;
        if point.len() != phi.dim() {
            return Err(PyValueError::new_err(format!("expected a point of dimension {}", phi.dim())));
        }
        let e = phi.eigen_data(&point).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok((e.k, e.dim_s, e.q))
    }
}

/// A parsed scalar expression in the coordinates `x1..xn`.
#[pyclass(name = "Expr", frozen)]
struct PyExpr {
    inner: ScalarExpr,
    dim: usize,
}

#[pymethods]
impl PyExpr {
    #[new]
    fn new(src: &str, dim: usize) -> PyResult<Self> {
        let inner = parse_expr(src, dim).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyExpr { inner, dim })
    }

    fn __call__(&self, point: Vec<f64>) -> PyResult<f64> {
        Ok(self.value_and_gradient(point)?.0)
    }

    /// Value and exact gradient at `point`.
    fn value_and_gradient(&self, point: Vec<f64>) -> PyResult<(f64, Vec<f64>)> {
        if point.len() != self.dim {
            return Err(PyValueError::new_err(format!("expected a point of dimension {}", self.dim)));
        }
        let j = eval_jet(&self.inner, &point).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok((j.value, j.gradient))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?}, {})", self.inner.to_string(), self.dim)
    }
}

#[pyfunction]
fn catalog_list() -> Vec<&'static str> {
    catalog::list()
}

/// Expected verdicts of a fixture as `(check, verdict)` pairs.
#[pyfunction]
fn catalog_expected(name: &str) -> PyResult<Vec<(String, String)>> {
    let fx = catalog::get(name).map_err(|e| PyKeyError::new_err(e.to_string()))?;
    Ok(fx.expected.iter().map(|(c, v)| (c.to_string(), v.to_string())).collect())
}

/// Runs one fixture check and returns the verdict string.
#[pyfunction]
#[pyo3(signature = (name, check, samples=None))]
fn catalog_verdict(py: Python<'_>, name: &str, check: &str, samples: Option<usize>) -> PyResult<String> {
    let fx = catalog::get(name).map_err(|e| PyKeyError::new_err(e.to_string()))?;
    let mut opts = fx.definition.options;
    if let Some(s) = samples {
        opts.samples = s;
    }
    let (v, _) = py.detach(|| fx.run(check, &opts)).map_err(check_err)?;
    Ok(v.to_string())
}

#[pyfunction]
fn check_names() -> Vec<&'static str> {
    CHECK_NAMES.to_vec()
}

#[pymodule]
fn pygcrf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDefinition>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyExpr>()?;
    m.add_function(wrap_pyfunction!(catalog_list, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_expected, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(check_names, m)?)?;
    Ok(())
}
