//! Python bindings: systems, samples, polytopes, the two set iterations and
//! both certificates. Certificates are returned as JSON strings.

use polyinv_core::certify::{contraction_certificate, scenario_certificate};
use polyinv_core::geometry::inclusion_ratio as ratio;
use polyinv_core::invariance::{data_driven_invariant_set, model_based_invariant_set, IterationConfig};
use polyinv_core::system::{generate_stable_system, sample_observations};
use polyinv_core::{DenseMatrix, Error, Polytope, RandomSource, SampleSet, SwitchedLinearSystem};
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        Error::Argument(_) | Error::Dimension { .. } | Error::Validation(_) | Error::Parse(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::Nonconvergence { .. } | Error::Numerical(_) | Error::Degeneracy(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn config(tol: f64, max_iter: usize) -> IterationConfig {
    IterationConfig {
        tolerance: tol,
        max_iterations: max_iter,
        record_iterates: false,
    }
}

fn initial_set(init: Option<&PyPolytope>, n: usize) -> PyResult<Polytope> {
    match init {
        Some(p) => Ok(p.inner.clone()),
        None => Polytope::unit_box(n).map_err(py_err),
    }
}

#[pyclass(name = "SwitchedLinearSystem", module = "polyinv", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySystem {
    inner: SwitchedLinearSystem,
}

#[pymethods]
impl PySystem {
    /// Builds a system from a list of square matrices given as lists of rows.
    #[new]
    fn new(modes: Vec<Vec<Vec<f64>>>) -> PyResult<Self> {
        let matrices = modes
            .iter()
            .map(|rows| {
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                DenseMatrix::from_row_major(rows.len(), rows.first().map_or(0, Vec::len), &flat)
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(py_err)?;
        Ok(Self {
            inner: SwitchedLinearSystem::new(matrices).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, modes, decay = 0.95, seed = 0))]
    fn generate(n: usize, modes: usize, decay: f64, seed: u64) -> PyResult<Self> {
        let inner = generate_stable_system(n, modes, decay, &mut RandomSource::new(seed)).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: SwitchedLinearSystem::from_json(text).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn mode_count(&self) -> usize {
        self.inner.mode_count()
    }

    /// Matrices as lists of rows.
    fn matrices(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.inner.dim();
        self.inner
            .matrices()
            .iter()
            .map(|a| (0..n).map(|r| (0..n).map(|c| a.get(r, c)).collect()).collect())
            .collect()
    }

    /// `A_σ x` with 1-based `sigma`.
    fn apply(&self, sigma: usize, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply(sigma, &x).map_err(py_err)
    }

    #[pyo3(signature = (count, seed = 0))]
    fn sample(&self, count: usize, seed: u64) -> PyResult<PySamples> {
        let inner = sample_observations(&self.inner, count, &mut RandomSource::new(seed)).map_err(py_err)?;
        Ok(PySamples { inner })
    }

    fn __repr__(&self) -> String {
        format!("SwitchedLinearSystem(n={}, M={})", self.inner.dim(), self.inner.mode_count())
    }
}

#[pyclass(name = "SampleSet", module = "polyinv", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySamples {
    inner: SampleSet,
}

#[pymethods]
impl PySamples {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: SampleSet::from_json(text).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn mode_count(&self) -> usize {
        self.inner.mode_count()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    /// `(x, sigma, y)` triples.
    fn pairs(&self) -> Vec<(Vec<f64>, usize, Vec<f64>)> {
        self.inner.pairs().iter().map(|p| (p.x.clone(), p.sigma, p.y.clone())).collect()
    }

    /// The first `count` pairs.
    fn truncated(&self, count: usize) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.truncated(count).map_err(py_err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("SampleSet(n={}, M={}, N={})", self.inner.dim(), self.inner.mode_count(), self.inner.len())
    }
}

#[pyclass(name = "Polytope", module = "polyinv", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPolytope {
    inner: Polytope,
}

#[pymethods]
impl PyPolytope {
    #[staticmethod]
    fn unit_box(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: Polytope::unit_box(n).map_err(py_err)?,
        })
    }

    /// Convex hull of points whose hull contains the origin in its interior.
    #[staticmethod]
    fn from_points(points: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: Polytope::from_points(&points).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: Polytope::from_json(text).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices().to_vec()
    }

    /// Facet normals `h` of the description `hᵀx ≤ 1`.
    fn facets(&self) -> Vec<Vec<f64>> {
        self.inner.facets().to_vec()
    }

    fn gauge(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.checked_gauge(&x).map_err(py_err)
    }

    fn convex_hull_add(&self, points: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.convex_hull_add(&points).map_err(py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Polytope(n={}, vertices={}, facets={})",
            self.inner.dim(),
            self.inner.vertices().len(),
            self.inner.facets().len()
        )
    }
}

/// Largest `λ` with `λ·outer ⊆ inner`.
#[pyfunction]
fn inclusion_ratio(inner: &PyPolytope, outer: &PyPolytope) -> PyResult<f64> {
    ratio(&inner.inner, &outer.inner).map_err(py_err)
}

/// Sample-based invariant set; returns `(polytope, iterations)`.
#[pyfunction]
#[pyo3(signature = (samples, init = None, tol = 1e-8, max_iter = 200))]
fn synthesize(samples: &PySamples, init: Option<&PyPolytope>, tol: f64, max_iter: usize) -> PyResult<(PyPolytope, usize)> {
    let initial = initial_set(init, samples.inner.dim())?;
    let (set, trace) = data_driven_invariant_set(&samples.inner, &initial, &config(tol, max_iter)).map_err(py_err)?;
    Ok((PyPolytope { inner: set }, trace.iterations()))
}

/// Model-based invariant set; returns `(polytope, iterations)`.
#[pyfunction]
#[pyo3(signature = (system, init = None, tol = 1e-8, max_iter = 200))]
fn model_based(system: &PySystem, init: Option<&PyPolytope>, tol: f64, max_iter: usize) -> PyResult<(PyPolytope, usize)> {
    let initial = initial_set(init, system.inner.dim())?;
    let (set, trace) = model_based_invariant_set(&system.inner, &initial, &config(tol, max_iter)).map_err(py_err)?;
    Ok((PyPolytope { inner: set }, trace.iterations()))
}

/// Contraction certificate as JSON; `lambda` is `None` when inconclusive.
#[pyfunction]
fn certify_contraction(polytope: &PyPolytope, epsilon: f64, samples: u64, modes: usize) -> PyResult<(Option<f64>, String)> {
    let cert = contraction_certificate(&polytope.inner, epsilon, samples, modes).map_err(py_err)?;
    Ok((cert.lambda(), cert.to_json().map_err(py_err)?))
}

/// Supporting-sample certificate as JSON, with the rate (`None` when vacuous)
/// and the set it certifies.
#[pyfunction]
#[pyo3(signature = (samples, beta = 0.001, init = None, tol = 1e-8, max_iter = 200))]
fn certify_scenario(
    samples: &PySamples,
    beta: f64,
    init: Option<&PyPolytope>,
    tol: f64,
    max_iter: usize,
) -> PyResult<(Option<f64>, String, PyPolytope)> {
    let initial = initial_set(init, samples.inner.dim())?;
    let cert = scenario_certificate(&samples.inner, &initial, &config(tol, max_iter), beta).map_err(py_err)?;
    let json = cert.to_json().map_err(py_err)?;
    Ok((cert.lambda_epsilon(), json, PyPolytope { inner: cert.set }))
}

#[pymodule]
fn polyinv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PySamples>()?;
    m.add_class::<PyPolytope>()?;
    m.add_function(wrap_pyfunction!(inclusion_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(model_based, m)?)?;
    m.add_function(wrap_pyfunction!(certify_contraction, m)?)?;
    m.add_function(wrap_pyfunction!(certify_scenario, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
