//! Python bindings: operator bases, Choi matrices, CP certification,
//! extremal channels, simplex checks and Monte Carlo sampling.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use qcg_core::{
    basis_to_json, certify_cp, certify_cp_translation, choi_of_depolarizing,
    choi_of_translation_channel, conjugate_pair_structure, extremal_vertices, gellmann_basis,
    hermitian_eigensystem, hw_basis, pauli_basis, sample_region, simplex_condition,
    validate_basis, BasisRef, CompressionVector, ComplexMatrix, Error, TranslationVector, C64,
    DEFAULT_TOL,
};

fn domain_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Converts a serde_json value into native Python dicts/lists/scalars.
fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).expect("serializable");
    let loads = py.import("json")?.getattr("loads")?;
    Ok(loads.call1((text,))?.unbind())
}

fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.dim())
        .map(|r| (0..m.dim()).map(|c| m.get(r, c)).collect())
        .collect()
}

/// A trace-free, trace-orthogonal operator basis.
#[pyclass(name = "Basis", skip_from_py_object)]
#[derive(Clone)]
struct PyBasis {
    inner: BasisRef,
}

#[pymethods]
impl PyBasis {
    /// Tensor-product Pauli basis on d qubits.
    #[staticmethod]
    fn pauli(d: usize) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(pauli_basis(d).map_err(domain_err)?),
        })
    }

    /// Generalized Gell-Mann basis in dimension n.
    #[staticmethod]
    fn gellmann(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(gellmann_basis(n).map_err(domain_err)?),
        })
    }

    /// Heisenberg-Weyl basis X^j Z^k in dimension n.
    #[staticmethod]
    fn heisenberg_weyl(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(hw_basis(n).map_err(domain_err)?),
        })
    }

    /// Hilbert-space dimension N.
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Number of basis elements, N^2.
    #[getter]
    fn size(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().as_str().to_string()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        (0..self.inner.len())
            .map(|a| self.inner.label(a).to_string())
            .collect()
    }

    /// Basis element M_alpha as a nested list of complex entries.
    fn element(&self, alpha: usize) -> PyResult<Vec<Vec<C64>>> {
        if alpha >= self.inner.len() {
            return Err(PyValueError::new_err(format!(
                "index {alpha} out of range for a basis of {} elements",
                self.inner.len()
            )));
        }
        Ok(matrix_rows(self.inner.element(alpha)))
    }

    /// Structural validation report (identity, tracelessness, orthogonality).
    fn validate(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report = validate_basis(&self.inner);
        json_to_py(
            py,
            &serde_json::json!({
                "passed": report.passed(),
                "identityDeviation": report.identity_deviation,
                "worstTrace": report.worst_trace,
                "worstOrthogonality": report.worst_orthogonality,
                "minNorm": report.min_norm,
                "tolerance": report.tolerance,
            }),
        )
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&basis_to_json(&self.inner)).expect("serializable")
    }

    fn __repr__(&self) -> String {
        format!("Basis(kind={:?}, n={})", self.kind(), self.inner.n())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn compression(basis: &PyBasis, v: Vec<C64>) -> PyResult<CompressionVector> {
    CompressionVector::new(basis.inner.clone(), v).map_err(domain_err)
}

fn translation(basis: &PyBasis, t: Vec<C64>) -> PyResult<TranslationVector> {
    TranslationVector::new(basis.inner.clone(), t).map_err(domain_err)
}

/// Choi matrix of the channel with compression vector v (and optional
/// translation t) as a nested list of complex entries.
#[pyfunction]
#[pyo3(signature = (basis, v, t=None))]
fn choi(basis: &PyBasis, v: Vec<C64>, t: Option<Vec<C64>>) -> PyResult<Vec<Vec<C64>>> {
    let v = compression(basis, v)?;
    let j = match t {
        Some(t) => {
            choi_of_translation_channel(&v, &translation(basis, t)?).map_err(domain_err)?
        }
        None => choi_of_depolarizing(&v),
    };
    Ok(matrix_rows(&j.matrix))
}

/// Eigenvalues of a hermitian matrix, descending.
#[pyfunction]
fn eigenvalues(matrix: Vec<Vec<C64>>) -> PyResult<Vec<f64>> {
    let dim = matrix.len();
    if matrix.iter().any(|row| row.len() != dim) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let m = ComplexMatrix::from_rows(&matrix);
    Ok(hermitian_eigensystem(&m).map_err(domain_err)?.values)
}

/// Complete-positivity report for the depolarizing channel v.
#[pyfunction]
#[pyo3(signature = (basis, v, tol=DEFAULT_TOL))]
fn certify(py: Python<'_>, basis: &PyBasis, v: Vec<C64>, tol: f64) -> PyResult<Py<PyAny>> {
    let v = compression(basis, v)?;
    let report = certify_cp(&v, tol).map_err(domain_err)?;
    json_to_py(py, &serde_json::to_value(&report).expect("serializable"))
}

/// Complete-positivity report for the compress-and-translate channel (v, t).
#[pyfunction]
#[pyo3(signature = (basis, v, t, tol=DEFAULT_TOL))]
fn certify_translation(
    py: Python<'_>,
    basis: &PyBasis,
    v: Vec<C64>,
    t: Vec<C64>,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let v = compression(basis, v)?;
    let t = translation(basis, t)?;
    let report = certify_cp_translation(&v, &t, tol).map_err(domain_err)?;
    json_to_py(py, &serde_json::to_value(&report).expect("serializable"))
}

/// Simplex check; the report carries the failing pair or the phase table.
#[pyfunction]
fn simplex_check(py: Python<'_>, basis: &PyBasis) -> PyResult<Py<PyAny>> {
    let report = simplex_condition(&basis.inner);
    json_to_py(
        py,
        &serde_json::json!({
            "isSimplex": report.is_simplex,
            "failingPair": report.failing_pair,
            "maxCommutator": report.max_commutator,
            "phaseTable": report.phase_table,
        }),
    )
}

/// Extremal channels of a simplex basis: full complex components and the
/// real coordinate rows (v_0 suppressed).
#[pyfunction]
fn extremals(py: Python<'_>, basis: &PyBasis) -> PyResult<Py<PyAny>> {
    let set = extremal_vertices(&basis.inner).map_err(domain_err)?;
    let ps = conjugate_pair_structure(&basis.inner);
    let vertices: Vec<Vec<C64>> = set
        .vertices
        .iter()
        .map(|v| v.components().to_vec())
        .collect();
    let coords: Vec<Vec<f64>> = set
        .vertices
        .iter()
        .map(|v| ps.real_coordinates(v.components()))
        .collect();
    let out = pyo3::types::PyDict::new(py);
    out.set_item("channels", set.channel_indices)?;
    out.set_item("vertices", vertices)?;
    out.set_item("realCoordinates", coords)?;
    Ok(out.into_any().unbind())
}

/// Monte Carlo estimate of the CP fraction of the sampling box; deterministic
/// in (seed, samples).
#[pyfunction]
#[pyo3(signature = (basis, samples, seed, t=None))]
fn sample(
    py: Python<'_>,
    basis: &PyBasis,
    samples: u64,
    seed: u64,
    t: Option<Vec<C64>>,
) -> PyResult<Py<PyAny>> {
    let t = t.map(|t| translation(basis, t)).transpose()?;
    let outcome =
        sample_region(&basis.inner, t.as_ref(), samples, seed, false).map_err(domain_err)?;
    json_to_py(py, &serde_json::to_value(&outcome.summary).expect("serializable"))
}

#[pymodule]
fn qcg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBasis>()?;
    m.add_function(wrap_pyfunction!(choi, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(certify_translation, m)?)?;
    m.add_function(wrap_pyfunction!(simplex_check, m)?)?;
    m.add_function(wrap_pyfunction!(extremals, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add("DEFAULT_TOL", DEFAULT_TOL)?;
    Ok(())
}
