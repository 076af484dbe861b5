//! Python bindings. Build with `--features extension-module` to produce an
//! importable `abm_py` module.

use abm_core::{AbmConfig, AbmError, BasisComputation, Monomial, NormalizationMode, PointSet, Polynomial, TermOrder, ZConvention};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: AbmError) -> PyErr {
    match e {
        AbmError::DegenerateProblem | AbmError::Invariant(_) | AbmError::DegreeGuard { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn point_set(rows: Vec<Vec<f64>>) -> PyResult<PointSet> {
    PointSet::from_rows(&rows).map_err(to_py)
}

fn parse<T: std::str::FromStr<Err = AbmError>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

fn polynomial(nvars: usize, terms: Vec<(Vec<u32>, f64)>) -> PyResult<Polynomial> {
    let terms = terms.into_iter().map(|(e, c)| (Monomial::new(e), c)).collect::<Vec<_>>();
    Polynomial::new(nvars, terms).map_err(to_py)
}

/// Output of [`abm`]: order terms and basis polynomials as exponent lists.
#[pyclass(name = "Basis", frozen)]
pub struct PyBasis {
    inner: BasisComputation,
}

#[pymethods]
impl PyBasis {
    #[getter]
    fn nvars(&self) -> usize {
        self.inner.nvars
    }

    #[getter]
    fn order_ideal(&self) -> Vec<Vec<u32>> {
        self.inner.order_ideal.iter().map(|t| t.exponents().to_vec()).collect()
    }

    /// Border term of every basis polynomial.
    #[getter]
    fn borders(&self) -> Vec<Vec<u32>> {
        self.inner.basis.iter().map(|g| g.border_term.exponents().to_vec()).collect()
    }

    /// Terms of every basis polynomial as `(exponents, coefficient)` pairs.
    #[getter]
    fn polynomials(&self) -> Vec<Vec<(Vec<u32>, f64)>> {
        self.inner
            .basis
            .iter()
            .map(|g| g.poly.terms().iter().map(|(m, c)| (m.exponents().to_vec(), *c)).collect())
            .collect()
    }

    #[getter]
    fn extents(&self) -> Vec<f64> {
        self.inner.basis.iter().map(|g| g.vanishing_extent).collect()
    }

    fn degree_counts(&self, max_degree: u32) -> Vec<usize> {
        self.inner.degree_counts(max_degree)
    }

    /// `|g(X)|` for every basis polynomial on the given points.
    fn evaluate(&self, points: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        let x = point_set(points)?;
        if x.nvars() != self.inner.nvars {
            return Err(to_py(AbmError::VariableMismatch {
                expected: self.inner.nvars,
                found: x.nvars(),
            }));
        }
        Ok(self.inner.basis.iter().map(|g| g.poly.eval_vector(&x).norm()).collect())
    }

    fn to_json(&self) -> PyResult<String> {
        abm_core::to_json_string(&self.inner).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyBasis {
            inner: abm_core::from_json_str(s).map_err(to_py)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.basis.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Basis(nvars={}, |O|={}, |G|={}, mode={})",
            self.inner.nvars,
            self.inner.order_ideal.len(),
            self.inner.basis.len(),
            self.inner.mode.short_name()
        )
    }
}

/// Approximate border basis of `points` (a list of rows).
#[pyfunction]
#[pyo3(name = "abm", signature = (points, epsilon, mode = "gradw", order = "degrevlex", z = "deg"))]
fn py_abm(points: Vec<Vec<f64>>, epsilon: f64, mode: &str, order: &str, z: &str) -> PyResult<PyBasis> {
    let x = point_set(points)?;
    let cfg = AbmConfig::new(epsilon, parse::<NormalizationMode>(mode)?)
        .with_order(parse::<TermOrder>(order)?)
        .with_z(parse::<ZConvention>(z)?);
    let inner = abm_core::abm(&x, &cfg).map_err(to_py)?;
    Ok(PyBasis { inner })
}

/// Gradient-weighted norm of a polynomial given as `(exponents, coefficient)` pairs.
#[pyfunction]
#[pyo3(signature = (terms, points, z = "deg"))]
fn gradient_weighted_norm(terms: Vec<(Vec<u32>, f64)>, points: Vec<Vec<f64>>, z: &str) -> PyResult<f64> {
    let x = point_set(points)?;
    let g = polynomial(x.nvars(), terms)?;
    Ok(abm_core::gradient_weighted_norm_on(&g, &x, parse(z)?))
}

/// Sample `count` exact points from `v1`, `v2` or `v3`.
#[pyfunction]
#[pyo3(signature = (variety, count, seed = 0))]
fn sample(variety: &str, count: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let v: abm_core::Variety = parse(variety)?;
    let x = abm_core::sample(&v.spec(), count, seed).map_err(to_py)?;
    Ok(x.rows().collect())
}

/// Center and scale to unit mean point norm.
#[pyfunction]
fn preprocess(points: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let x = abm_core::preprocess(&point_set(points)?).map_err(to_py)?;
    Ok(x.rows().collect())
}

#[pymodule]
fn abm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBasis>()?;
    m.add_function(wrap_pyfunction!(py_abm, m)?)?;
    m.add_function(wrap_pyfunction!(gradient_weighted_norm, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(preprocess, m)?)?;
    Ok(())
}
