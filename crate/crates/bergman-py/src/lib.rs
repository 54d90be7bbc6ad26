//! Python bindings: symbols, points of the ball, mean oscillation, the
//! disc operator model, trees and the experiment runners.

// Triggered by the `#[pyfunction]` expansion, not by this code.
#![allow(clippy::useless_conversion)]

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use bergman::error::Error;
use bergman::experiments::{self, ExperimentConfig};
use bergman::geometry::{bergman_distance as distance, mobius_map as mobius, BallPoint};
use bergman::kernels;
use bergman::operator::{self, TruncatedBasis};
use bergman::polar::PolarPoint;
use bergman::symbol::Symbol as CoreSymbol;
use bergman::tree::{BergmanTree, TreeParams};

fn err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Symbol(_) | Error::Domain(_) | Error::DimensionMismatch(..) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn point(coords: Vec<Complex64>) -> PyResult<BallPoint> {
    BallPoint::new(coords).map_err(err)
}

/// Polynomial symbol `Σ c z^a z̄^b (1−|z|²)^s`, from the JSON literal
/// `[[a, b, re, im, s], …]`.
#[pyclass]
#[derive(Clone)]
struct Symbol {
    inner: CoreSymbol,
}

#[pymethods]
impl Symbol {
    #[new]
    #[pyo3(signature = (literal, n = 1))]
    fn new(literal: &str, n: usize) -> PyResult<Self> {
        let value: serde_json::Value =
            serde_json::from_str(literal).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner: CoreSymbol::from_literal(n, &value).map_err(err)? })
    }

    #[staticmethod]
    fn zbar() -> Self {
        Self { inner: CoreSymbol::zbar() }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn is_constant(&self) -> bool {
        self.inner.is_constant()
    }

    fn conj(&self) -> Self {
        Self { inner: self.inner.conj() }
    }

    fn eval(&self, z: Vec<Complex64>) -> PyResult<Complex64> {
        Ok(self.inner.eval(&point(z)?))
    }

    fn literal(&self) -> String {
        self.inner.to_literal().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Symbol({})", self.literal())
    }
}

/// Bergman distance between two interior points.
#[pyfunction]
fn bergman_distance(z: Vec<Complex64>, w: Vec<Complex64>) -> PyResult<f64> {
    distance(&point(z)?, &point(w)?).map_err(err)
}

/// The involution `φ_z` applied to `w`.
#[pyfunction]
fn mobius_map(z: Vec<Complex64>, w: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    Ok(mobius(&point(z)?, &point(w)?).map_err(err)?.coords().to_vec())
}

#[pyfunction]
#[pyo3(signature = (f, z, gamma = 0.0))]
fn mean_oscillation(f: &Symbol, z: Vec<Complex64>, gamma: f64) -> PyResult<f64> {
    kernels::mean_oscillation(&f.inner, &point(z)?, gamma).map_err(err)
}

/// Mean oscillation in the disc at defect `s = 1 − |z|²` and turn `t`.
/// Deep points are accurate only for symbols vanishing on the circle.
#[pyfunction]
#[pyo3(signature = (f, s, t = 0.0, gamma = 0.0))]
fn mean_oscillation_polar(f: &Symbol, s: f64, t: f64, gamma: f64) -> PyResult<f64> {
    kernels::mean_oscillation_polar(&f.inner, &PolarPoint::new(s, t), gamma, 0).map_err(err)
}

#[pyfunction]
fn mo_zbar_closed_form(s: f64) -> f64 {
    kernels::mo_zbar_closed_form(s)
}

#[pyfunction]
#[pyo3(signature = (f, z, gamma = 0.0))]
fn berezin(f: &Symbol, z: Vec<Complex64>, gamma: f64) -> PyResult<Complex64> {
    kernels::berezin(&f.inner, &point(z)?, gamma).map_err(err)
}

/// Singular values of `H_f` on the degree-`d` disc model, descending.
#[pyfunction]
#[pyo3(signature = (f, d, gamma = 0.0))]
fn hankel_singular_values(f: &Symbol, d: usize, gamma: f64) -> PyResult<Vec<f64>> {
    let basis = TruncatedBasis::new(d, gamma).map_err(err)?;
    let h = operator::hankel_matrix(&basis, &f.inner).map_err(err)?;
    operator::singular_values(&h.data).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (gamma, count))]
fn hankel_zbar_spectrum_exact(gamma: f64, count: usize) -> Vec<f64> {
    operator::hankel_zbar_spectrum_exact(gamma, count)
}

/// `Σ_{k < kmax} s_k^p` over the commutator spectrum of a single-charge symbol.
#[pyfunction]
#[pyo3(signature = (f, p, kmax, gamma = 0.0))]
fn commutator_schatten_partial_sum(f: &Symbol, p: f64, kmax: f64, gamma: f64) -> PyResult<f64> {
    operator::commutator_schatten_partial_sum(&f.inner, gamma, p, kmax).map_err(err)
}

/// A built Bergman tree.
#[pyclass]
struct Tree {
    inner: BergmanTree,
}

#[pymethods]
impl Tree {
    /// The analytic dyadic disc tree with `λ = ln 2 / 2^{n0}`.
    #[staticmethod]
    fn dyadic(n0: u32, depth: usize) -> PyResult<Self> {
        Ok(Self { inner: BergmanTree::build(TreeParams::dyadic(n0, depth)).map_err(err)? })
    }

    /// A net-based tree in the ball of `C^n`.
    #[staticmethod]
    #[pyo3(signature = (n, lam, depth, seed = 0))]
    fn generic(n: usize, lam: f64, depth: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: BergmanTree::build(TreeParams::generic(n, lam, depth, seed)).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn level_size(&self, level: usize) -> usize {
        self.inner.level_ids(level).len()
    }

    fn children(&self, id: usize) -> Vec<usize> {
        self.inner.node(id).children.clone()
    }

    fn parent(&self, id: usize) -> Option<usize> {
        self.inner.node(id).parent
    }

    fn center(&self, id: usize) -> Vec<Complex64> {
        self.inner.center(id).coords().to_vec()
    }

    fn locate(&self, z: Vec<Complex64>) -> PyResult<usize> {
        self.inner.locate(&point(z)?).map_err(err)
    }

    /// The tree as JSON lines.
    fn to_jsonl(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.export_jsonl(&mut buf).map_err(err)?;
        String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

fn config(json: &str) -> PyResult<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// Names accepted by `verify`.
#[pyfunction]
fn checks() -> Vec<&'static str> {
    experiments::CHECKS.to_vec()
}

/// Runs one named check on a JSON configuration and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (id, config_json = "{}"))]
fn verify(py: Python<'_>, id: &str, config_json: &str) -> PyResult<String> {
    let cfg = config(config_json)?;
    let report = py.allow_threads(|| experiments::verify(id, &cfg)).map_err(err)?;
    report.to_json().map_err(err)
}

/// Cutoff `2n/(n+1+γ)` for a configuration.
#[pyfunction]
#[pyo3(signature = (config_json = "{}"))]
fn cutoff(config_json: &str) -> PyResult<f64> {
    Ok(config(config_json)?.cutoff())
}

#[pymodule]
fn bergman_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Symbol>()?;
    m.add_class::<Tree>()?;
    m.add_function(wrap_pyfunction!(bergman_distance, m)?)?;
    m.add_function(wrap_pyfunction!(mobius_map, m)?)?;
    m.add_function(wrap_pyfunction!(mean_oscillation, m)?)?;
    m.add_function(wrap_pyfunction!(mean_oscillation_polar, m)?)?;
    m.add_function(wrap_pyfunction!(mo_zbar_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(berezin, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_zbar_spectrum_exact, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_schatten_partial_sum, m)?)?;
    m.add_function(wrap_pyfunction!(checks, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(cutoff, m)?)?;
    Ok(())
}
