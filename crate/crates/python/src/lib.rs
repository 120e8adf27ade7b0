//! Python module `pyfewnomial`.

use fewnomial::bounds::{self, Variant};
use fewnomial::gale::build_gale_system;
use fewnomial::jacobian::random_detdeg_suite;
use fewnomial::lattice::{self, ExponentMatrix};
use fewnomial::samples::{self, SampleSpec};
use fewnomial::solver::{self, Orthants, SolveOptions};
use fewnomial::sparse_system::{detect_mixed_structure, FewnomialSystem, MixedStructure};
use fewnomial::{BigInt, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: Error) -> PyErr {
    match e {
        Error::Budget(_) | Error::CountMismatch(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (_, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn report<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &value)
}

/// A square sparse polynomial system with rational coefficients.
#[pyclass(name = "System", module = "pyfewnomial", frozen, from_py_object)]
#[derive(Clone)]
struct PySystem {
    inner: FewnomialSystem,
}

impl PySystem {
    fn structure(&self) -> PyResult<MixedStructure> {
        detect_mixed_structure(&self.inner).map_err(err)
    }
}

#[pymethods]
impl PySystem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        FewnomialSystem::from_json(text)
            .map(|inner| PySystem { inner })
            .map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn eval(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        if x.len() != self.inner.n() {
            return Err(PyValueError::new_err(format!(
                "expected {} coordinates",
                self.inner.n()
            )));
        }
        Ok(self.inner.eval(&x))
    }

    /// Block sizes `l_i` of the detected mixed structure.
    fn block_sizes(&self) -> PyResult<Vec<usize>> {
        Ok(self.structure()?.block_sizes())
    }

    fn lattice_index(&self) -> PyResult<BigInt> {
        lattice::lattice_index(&ExponentMatrix::from_structure(&self.structure()?)).map_err(err)
    }

    fn best_bound<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let ms = self.structure()?;
        let index = lattice::lattice_index(&ExponentMatrix::from_structure(&ms)).map_err(err)?;
        report(py, &bounds::best_bound(&ms, &index))
    }

    fn gale_system<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let ms = self.structure()?;
        let rb = lattice::kernel_basis(&ExponentMatrix::from_structure(&ms)).map_err(err)?;
        let gs = build_gale_system(&ms, &rb).map_err(err)?;
        to_py(py, &gs.to_json_value())
    }

    #[pyo3(signature = (positive_only = false, box_radius = 10.0, degree_cap = 8))]
    fn solve<'py>(
        &self,
        py: Python<'py>,
        positive_only: bool,
        box_radius: f64,
        degree_cap: i64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let opts = SolveOptions {
            box_radius,
            degree_cap,
            orthants: if positive_only { Orthants::Positive } else { Orthants::All },
            ..Default::default()
        };
        let sys = self.inner.clone();
        let sols = py.detach(|| solver::solve_real(&sys, &opts)).map_err(err)?;
        report(py, &sols)
    }

    #[pyo3(signature = (box_radius = 10.0))]
    fn count_positive(&self, py: Python<'_>, box_radius: f64) -> PyResult<usize> {
        let opts = SolveOptions {
            box_radius,
            ..Default::default()
        };
        let sys = self.inner.clone();
        py.detach(|| solver::count_positive(&sys, &opts)).map_err(err)
    }

    #[pyo3(signature = (box_radius = 10.0))]
    fn count_real(&self, py: Python<'_>, box_radius: f64) -> PyResult<usize> {
        let opts = SolveOptions {
            box_radius,
            ..Default::default()
        };
        let sys = self.inner.clone();
        py.detach(|| solver::count_real_torus(&sys, &opts)).map_err(err)
    }

    fn verify_gale<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let ms = self.structure()?;
        let r = py
            .detach(|| solver::verify_gale_bijection(&ms, &SolveOptions::default()))
            .map_err(err)?;
        report(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("System(n={}, json={})", self.inner.n(), self.inner.to_json())
    }
}

fn variant(name: &str) -> PyResult<Variant> {
    match name {
        "positive" => Ok(Variant::Positive),
        "real" => Ok(Variant::Real),
        other => Err(PyValueError::new_err(format!(
            "variant must be 'positive' or 'real', got {other:?}"
        ))),
    }
}

#[pyfunction]
fn lattice_index(rows: Vec<Vec<i64>>) -> PyResult<BigInt> {
    let n = rows.first().map_or(0, Vec::len);
    lattice::lattice_index(&ExponentMatrix::from_rows(&rows, n)).map_err(err)
}

#[pyfunction]
fn kernel_basis(rows: Vec<Vec<i64>>) -> PyResult<Vec<Vec<BigInt>>> {
    let n = rows.first().map_or(0, Vec::len);
    let rb = lattice::kernel_basis(&ExponentMatrix::from_rows(&rows, n)).map_err(err)?;
    Ok(rb.alphas.row_vecs())
}

#[pyfunction]
#[pyo3(signature = (blocks, variant_name = "positive"))]
fn mixed_bound<'py>(py: Python<'py>, blocks: Vec<u64>, variant_name: &str) -> PyResult<Bound<'py, PyAny>> {
    report(py, &bounds::mixed_bound(&blocks, variant(variant_name)?).map_err(err)?)
}

#[pyfunction]
fn khovanskii_bound<'py>(py: Python<'py>, n: u64, l: u64) -> PyResult<Bound<'py, PyAny>> {
    report(py, &bounds::khovanskii_bound(n, l))
}

#[pyfunction]
fn bs07_positive_bound<'py>(py: Python<'py>, n: u64, l: u64) -> PyResult<Bound<'py, PyAny>> {
    report(py, &bounds::bs07_positive_bound(n, l).map_err(err)?)
}

#[pyfunction]
fn bbs_real_bound<'py>(py: Python<'py>, n: u64, l: u64) -> PyResult<Bound<'py, PyAny>> {
    report(py, &bounds::bbs_real_bound(n, l).map_err(err)?)
}

#[pyfunction]
fn a_k(blocks: Vec<u64>, k: u64) -> PyResult<BigInt> {
    bounds::a_k(&blocks, k).map_err(err)
}

#[pyfunction]
fn multinomial(l: u64, parts: Vec<u64>) -> PyResult<BigInt> {
    bounds::multinomial(l, &parts).map_err(err)
}

#[pyfunction]
fn verify_inequalities<'py>(py: Python<'py>, blocks: Vec<u64>) -> PyResult<Bound<'py, PyAny>> {
    let r = bounds::verify_inequalities(&blocks).map_err(err)?;
    let d = report(py, &r)?;
    d.set_item("passed", r.all_ok())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (blocks, trials = 25, seed = 0))]
fn detdeg_suite<'py>(py: Python<'py>, blocks: Vec<usize>, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| random_detdeg_suite(blocks.len(), &blocks, trials, seed))
        .map_err(err)?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (blocks, count, seed = 0, exponent_range = 3, laurent = false, odd_index = false))]
fn sample_systems(
    blocks: Vec<usize>,
    count: usize,
    seed: u64,
    exponent_range: i64,
    laurent: bool,
    odd_index: bool,
) -> PyResult<Vec<PySystem>> {
    let mut spec = SampleSpec::new(&blocks);
    spec.exponent_range = exponent_range;
    spec.laurent = laurent;
    spec.odd_index = odd_index;
    Ok(samples::sample_systems(&spec, count, seed)
        .map_err(err)?
        .iter()
        .map(|ms| PySystem {
            inner: ms.to_system(),
        })
        .collect())
}

#[pymodule]
fn pyfewnomial(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(lattice_index, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_basis, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_bound, m)?)?;
    m.add_function(wrap_pyfunction!(khovanskii_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bs07_positive_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bbs_real_bound, m)?)?;
    m.add_function(wrap_pyfunction!(a_k, m)?)?;
    m.add_function(wrap_pyfunction!(multinomial, m)?)?;
    m.add_function(wrap_pyfunction!(verify_inequalities, m)?)?;
    m.add_function(wrap_pyfunction!(detdeg_suite, m)?)?;
    m.add_function(wrap_pyfunction!(sample_systems, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
