//! Python bindings.
//!
//! Exact values cross the boundary as `"num/den"` strings, floats as floats,
//! and reports as plain dicts with the same keys as the CLI's JSON. Inputs
//! follow the file formats: `str`, `int` and `Fraction` entries are exact, and
//! a single `float` makes the whole input floating point.

use definetti_core::harness::{self, Source};
use definetti_core::io::{
    law_json, measure_json, parse_law, parse_measure, parse_moments, recovered_json, to_json_line,
};
use definetti_core::model::{self, moments_from_measure};
use definetti_core::recovery::{recover_from_law, recover_from_moments, weak_convergence_gap};
use definetti_core::{numerics, oracle, Backend, Error, PrefixEvent};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyFloat, PyInt, PyString};
use serde::Serialize;
use serde_json::{json, Value};

create_exception!(
    definetti,
    InvariantError,
    PyException,
    "A structural invariant does not hold."
);
create_exception!(
    definetti,
    NotExtendableError,
    PyValueError,
    "The moment vector has no exchangeable extension."
);

struct PyErrFrom(Error);

impl From<PyErrFrom> for PyErr {
    fn from(e: PyErrFrom) -> PyErr {
        let msg = e.0.to_string();
        match e.0 {
            Error::Invariant(_) => InvariantError::new_err(msg),
            Error::NotExtendable(_) => NotExtendableError::new_err(msg),
            Error::Domain(_) | Error::Parse(_) | Error::NotExact(_) => PyValueError::new_err(msg),
        }
    }
}

trait OrRaise<T> {
    fn or_raise(self) -> PyResult<T>;
}

impl<T> OrRaise<T> for Result<T, Error> {
    fn or_raise(self) -> PyResult<T> {
        self.map_err(|e| PyErrFrom(e).into())
    }
}

fn to_py<'py>(py: Python<'py>, value: &(impl Serialize + ?Sized)) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (to_json_line(value),))
}

fn scalar_json(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if obj.is_instance_of::<PyBool>() {
        return Err(PyTypeError::new_err("expected a number, got bool"));
    }
    if obj.is_instance_of::<PyString>() {
        return Ok(Value::String(obj.extract()?));
    }
    if obj.is_instance_of::<PyInt>() {
        return Ok(Value::String(obj.str()?.to_string()));
    }
    if obj.is_instance_of::<PyFloat>() {
        return Ok(json!(obj.extract::<f64>()?));
    }
    if obj.hasattr("numerator")? && obj.hasattr("denominator")? {
        let (n, d) = (obj.getattr("numerator")?.str()?, obj.getattr("denominator")?.str()?);
        return Ok(Value::String(format!("{n}/{d}")));
    }
    Err(PyTypeError::new_err(format!(
        "expected str, int, Fraction or float, got {}",
        obj.get_type().name()?
    )))
}

fn scalars_json(items: &[Bound<'_, PyAny>]) -> PyResult<Vec<Value>> {
    items.iter().map(scalar_json).collect()
}

fn event(pattern: &str) -> PyResult<PrefixEvent> {
    pattern.parse().or_raise()
}

fn backend(name: &str) -> PyResult<Backend> {
    name.parse().or_raise()
}

/// Finitely supported mixing measure on [0, 1].
#[pyclass(name = "MixingMeasure", module = "definetti", frozen)]
struct PyMixingMeasure(definetti_core::MixingMeasure);

#[pymethods]
impl PyMixingMeasure {
    /// `atoms` is a list of `(p, w)` pairs.
    #[new]
    fn new(atoms: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let atoms = atoms
            .iter()
            .map(|(p, w)| Ok(json!({"p": scalar_json(p)?, "w": scalar_json(w)?})))
            .collect::<PyResult<Vec<Value>>>()?;
        Self::from_json(&json!({ "atoms": atoms }).to_string())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_measure(text).map(Self).or_raise()
    }

    fn to_json(&self) -> String {
        measure_json(&self.0).to_string()
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.0.is_exact()
    }

    #[getter]
    fn atoms<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &measure_json(&self.0)["atoms"])
    }

    /// `P(X_1..X_k = pattern)` under the mixture.
    fn prefix_prob<'py>(&self, py: Python<'py>, pattern: &str) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &model::mixture_prefix_prob(&self.0, &event(pattern)?))
    }

    /// Law of the success count among the first `n` coordinates.
    #[pyo3(signature = (n, backend="auto"))]
    fn sample_mean_law(&self, n: u64, backend: &str) -> PyResult<PySampleMeanLaw> {
        let resolved = match self::backend(backend)? {
            Backend::Auto if !self.0.is_exact() => definetti_core::ResolvedBackend::Log,
            b => b.resolve(n),
        };
        model::sample_mean_law(&self.0, n, resolved)
            .map(PySampleMeanLaw)
            .or_raise()
    }

    /// Moments `c_0..c_n`.
    fn moments(&self, n: usize) -> PyMomentVector {
        PyMomentVector(moments_from_measure(&self.0, n))
    }

    fn __repr__(&self) -> String {
        format!("MixingMeasure({})", self.to_json())
    }
}

/// Law of the success count `S_N`, given by `q_0..q_N`.
#[pyclass(name = "SampleMeanLaw", module = "definetti", frozen)]
struct PySampleMeanLaw(definetti_core::SampleMeanLaw);

#[pymethods]
impl PySampleMeanLaw {
    #[new]
    fn new(q: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        Self::from_json(&json!({ "q": scalars_json(&q)? }).to_string())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_law(text).map(Self).or_raise()
    }

    fn to_json(&self) -> String {
        law_json(&self.0).to_string()
    }

    #[getter]
    fn n(&self) -> u64 {
        self.0.n()
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.0.is_exact()
    }

    #[getter]
    fn weights<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.weights_real())
    }

    /// `sum_i a_i q_i`
    fn prefix_prob<'py>(&self, py: Python<'py>, pattern: &str) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &model::prefix_prob_from_mean_law(&self.0, &event(pattern)?).or_raise()?,
        )
    }

    /// Measure with atoms `i/N` and weights `q_i`.
    fn recover(&self) -> PyMixingMeasure {
        PyMixingMeasure(recover_from_law(&self.0).measure)
    }

    /// Gaps `|E_law f - E_target f|` for monomials and kernels up to degree `k_max`.
    #[pyo3(signature = (target, k_max=6))]
    fn weak_convergence_gap<'py>(
        &self,
        py: Python<'py>,
        target: &PyMixingMeasure,
        k_max: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &weak_convergence_gap(&self.0, &target.0, k_max))
    }

    fn __len__(&self) -> usize {
        self.0.n() as usize + 1
    }

    fn __repr__(&self) -> String {
        format!("SampleMeanLaw(N={})", self.0.n())
    }
}

/// Moment sequence `c_0 = 1, c_1, ..., c_n`.
#[pyclass(name = "MomentVector", module = "definetti", frozen)]
struct PyMomentVector(definetti_core::MomentVector);

#[pymethods]
impl PyMomentVector {
    #[new]
    fn new(c: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        parse_moments(&json!({ "c": scalars_json(&c)? }).to_string())
            .map(Self)
            .or_raise()
    }

    /// `[1, 1/2, ..., 1/(n+1)]`, the moments of the uniform measure.
    #[staticmethod]
    fn uniform(n: usize) -> Self {
        Self(definetti_core::MomentVector::uniform(n))
    }

    #[getter]
    fn values<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.values())
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    fn prefix_prob<'py>(&self, py: Python<'py>, pattern: &str) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &model::prefix_prob_from_moments(&self.0, &event(pattern)?).or_raise()?,
        )
    }

    /// Law of `S_n` implied by the moments. Raises `NotExtendableError` if a weight is negative.
    #[pyo3(signature = (level=None))]
    fn mean_law(&self, level: Option<usize>) -> PyResult<PySampleMeanLaw> {
        model::mean_law_from_moments(&self.0, level.unwrap_or(self.0.order()))
            .map(PySampleMeanLaw)
            .or_raise()
    }

    /// Recovered measure as a dict with `atoms`, `level` and `source`.
    #[pyo3(signature = (level=None))]
    fn recover<'py>(&self, py: Python<'py>, level: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let rec = recover_from_moments(&self.0, level.unwrap_or(self.0.order())).or_raise()?;
        to_py(py, &recovered_json(&rec))
    }

    fn check_extendable<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &model::check_complete_monotonicity(&self.0))
    }

    fn __repr__(&self) -> String {
        format!("MomentVector({})", to_json_line(&self.0.values()))
    }
}

/// Verification report for a measure (with `n`) or a law.
#[pyfunction]
#[pyo3(signature = (pattern, measure=None, law=None, n=None, backend="auto"))]
fn verify<'py>(
    py: Python<'py>,
    pattern: &str,
    measure: Option<&PyMixingMeasure>,
    law: Option<&PySampleMeanLaw>,
    n: Option<u64>,
    backend: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let e = event(pattern)?;
    let source = match (measure, law) {
        (Some(mu), None) => {
            let n = n.ok_or_else(|| PyValueError::new_err("n is required with a measure"))?;
            Source::Mixture { mu: &mu.0, n }
        }
        (None, Some(law)) => Source::Law(&law.0),
        _ => return Err(PyValueError::new_err("pass exactly one of measure or law")),
    };
    to_py(
        py,
        &harness::verify_theorem(source, &e, self::backend(backend)?).or_raise()?,
    )
}

/// Ratio scan as a dict: the summary fields plus `rows`.
#[pyfunction]
#[pyo3(signature = (n, k, alpha, stride=1, backend="auto"))]
fn ratio_scan<'py>(
    py: Python<'py>,
    n: u64,
    k: u64,
    alpha: u64,
    stride: u64,
    backend: &str,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &harness::ratio_scan(n, k, alpha, stride, self::backend(backend)?).or_raise()?,
    )
}

#[pyfunction]
fn tail_check<'py>(py: Python<'py>, n: u64, k: u64, alpha: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &harness::tail_bounds_check(n, k, alpha).or_raise()?)
}

/// Exact comparison of the three prefix-probability routes on random measures.
#[pyfunction]
#[pyo3(name = "oracle", signature = (n, seed=1, measures=25))]
fn oracle_py<'py>(py: Python<'py>, n: u64, seed: u64, measures: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &oracle::oracle_sweep(n, seed, measures).or_raise()?)
}

/// Hypergeometric prefix probability given `i` successes among `n`.
#[pyfunction]
#[pyo3(signature = (n, k, alpha, i, backend="auto"))]
fn a_i<'py>(py: Python<'py>, n: u64, k: u64, alpha: u64, i: u64, backend: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &numerics::a_i(n, k, alpha, i, self::backend(backend)?.resolve(n)).or_raise()?,
    )
}

/// Binomial prefix probability at `p = i/n`.
#[pyfunction]
#[pyo3(signature = (n, k, alpha, i, backend="auto"))]
fn b_i<'py>(py: Python<'py>, n: u64, k: u64, alpha: u64, i: u64, backend: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &numerics::b_i(n, k, alpha, i, self::backend(backend)?.resolve(n)).or_raise()?,
    )
}

#[pymodule]
fn definetti(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMixingMeasure>()?;
    m.add_class::<PySampleMeanLaw>()?;
    m.add_class::<PyMomentVector>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_scan, m)?)?;
    m.add_function(wrap_pyfunction!(tail_check, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_py, m)?)?;
    m.add_function(wrap_pyfunction!(a_i, m)?)?;
    m.add_function(wrap_pyfunction!(b_i, m)?)?;
    m.add("InvariantError", m.py().get_type::<InvariantError>())?;
    m.add("NotExtendableError", m.py().get_type::<NotExtendableError>())?;
    Ok(())
}
