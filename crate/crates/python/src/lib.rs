//! Python bindings: loops, verdicts, traces and exact algebraic numbers.

use llterm_core::algebra::algebraic::AlgebraicNumber;
use llterm_core::algebra::poly::IntPoly;
use llterm_core::decision::{self, AnalyzeConfig, CertifyConfig, CertifyOutcome, Verdict};
use llterm_core::loop_ir::parse_program;
use llterm_core::relations::{masser_bound, relation_lattice, torus_group};
use llterm_core::simulator::{run_with, Outcome, RunOptions};
use llterm_core::spectral::eigendecompose_int;
use llterm_core::witness::{build_witness, WitnessConfig};
use llterm_core::LoopProgram;
use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use std::cmp::Ordering;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn check_dim(p: &LoopProgram, u: &[BigInt]) -> PyResult<()> {
    if u.len() != p.dim {
        return Err(value_error(format!("state has {} entries, loop has {} variables", u.len(), p.dim)));
    }
    Ok(())
}

/// A loop `while B x >= c do x := A x + a` over integer variables.
#[pyclass(name = "Loop", module = "llterm", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLoop {
    inner: LoopProgram,
}

#[pymethods]
impl PyLoop {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_program(text).map(|inner| PyLoop { inner }).map_err(value_error)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.inner.vars.clone()
    }

    #[getter]
    fn update(&self) -> Vec<Vec<BigInt>> {
        self.inner.update.clone()
    }

    #[getter]
    fn offset(&self) -> Vec<BigInt> {
        self.inner.offset.clone()
    }

    #[getter]
    fn guard(&self) -> Vec<Vec<BigInt>> {
        self.inner.guard.clone()
    }

    #[getter]
    fn rhs(&self) -> Vec<BigInt> {
        self.inner.rhs.clone()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Loop({:?})", self.inner.to_string())
    }
}

/// Result of `analyze`.
#[pyclass(name = "Analysis", module = "llterm", frozen)]
struct PyAnalysis {
    inner: decision::Analysis,
}

#[pymethods]
impl PyAnalysis {
    /// `"NONTERMINATING"`, `"TERMINATES"` or `"UNKNOWN"`.
    #[getter]
    fn outcome(&self) -> &'static str {
        self.inner.verdict.tag()
    }

    #[getter]
    fn decided(&self) -> bool {
        self.inner.verdict.is_decided()
    }

    /// An integer state that is eventually non-terminating.
    #[getter]
    fn witness(&self) -> Option<Vec<BigInt>> {
        match &self.inner.verdict {
            Verdict::NonTerminating { witness, .. } => Some(witness.clone()),
            _ => None,
        }
    }

    /// A state from which the loop never exits.
    #[getter]
    fn nt_point(&self) -> Option<Vec<BigInt>> {
        match &self.inner.verdict {
            Verdict::NonTerminating { certificate, .. } => Some(certificate.nt_point.clone()),
            _ => None,
        }
    }

    #[getter]
    fn reason(&self) -> Option<String> {
        match &self.inner.verdict {
            Verdict::Unknown { reason, .. } => serde_json::to_value(reason).ok().and_then(|v| v.as_str().map(String::from)),
            _ => None,
        }
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }
}

/// Result of `simulate`.
#[pyclass(name = "Trace", module = "llterm", frozen)]
struct PyTrace {
    inner: llterm_core::simulator::Trace,
}

#[pymethods]
impl PyTrace {
    /// `"exited"`, `"survived"` or `"cycle"`.
    #[getter]
    fn outcome(&self) -> &'static str {
        match self.inner.outcome {
            Outcome::Exited { .. } => "exited",
            Outcome::Survived { .. } => "survived",
            Outcome::Cycle { .. } => "cycle",
        }
    }

    #[getter]
    fn steps(&self) -> u64 {
        self.inner.steps
    }

    /// Guard row that failed, for exited runs.
    #[getter]
    fn row(&self) -> Option<usize> {
        match self.inner.outcome {
            Outcome::Exited { row, .. } => Some(row),
            _ => None,
        }
    }

    #[getter]
    fn final_state(&self) -> Vec<BigInt> {
        self.inner.final_state.clone()
    }

    #[getter]
    fn states(&self) -> Option<Vec<Vec<BigInt>>> {
        self.inner.states.clone()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }
}

/// Exact complex algebraic number.
#[pyclass(name = "Algebraic", module = "llterm", frozen, from_py_object)]
#[derive(Clone)]
struct PyAlgebraic {
    inner: AlgebraicNumber,
}

#[derive(FromPyObject)]
enum Operand {
    Alg(PyAlgebraic),
    Int(BigInt),
}

impl Operand {
    fn value(self) -> AlgebraicNumber {
        match self {
            Operand::Alg(a) => a.inner,
            Operand::Int(n) => AlgebraicNumber::from_rational(BigRational::from_integer(n)),
        }
    }
}

fn wrap(inner: AlgebraicNumber) -> PyAlgebraic {
    PyAlgebraic { inner }
}

#[pymethods]
impl PyAlgebraic {
    #[new]
    fn new(n: BigInt) -> Self {
        wrap(AlgebraicNumber::from_rational(BigRational::from_integer(n)))
    }

    /// The rational `num / den`.
    #[staticmethod]
    fn rational(num: BigInt, den: BigInt) -> PyResult<Self> {
        if den == BigInt::from(0) {
            return Err(PyZeroDivisionError::new_err("zero denominator"));
        }
        Ok(wrap(AlgebraicNumber::from_rational(BigRational::new(num, den))))
    }

    /// Distinct roots of `c[0] + c[1] x + ...`, ordered by real then imaginary part.
    #[staticmethod]
    fn roots(coeffs: Vec<BigInt>) -> PyResult<Vec<Self>> {
        let p = IntPoly::new(coeffs);
        if p.degree() == 0 {
            return Err(value_error("polynomial must have positive degree"));
        }
        Ok(AlgebraicNumber::roots_of(&p).into_iter().map(wrap).collect())
    }

    #[staticmethod]
    fn i() -> Self {
        wrap(AlgebraicNumber::i())
    }

    /// Primitive minimal polynomial, coefficients from the constant term up.
    #[getter]
    fn min_poly(&self) -> Vec<BigInt> {
        self.inner.min_poly().coeffs().to_vec()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn is_real(&self) -> bool {
        self.inner.is_real()
    }

    fn root_of_unity_order(&self) -> Option<u64> {
        self.inner.root_of_unity_order()
    }

    fn __complex__(&self) -> num_complex_pair::Pair {
        num_complex_pair::Pair(self.inner.to_f64())
    }

    fn __add__(&self, o: Operand) -> Self {
        wrap(self.inner.add(&o.value()))
    }

    fn __radd__(&self, o: Operand) -> Self {
        wrap(o.value().add(&self.inner))
    }

    fn __sub__(&self, o: Operand) -> Self {
        wrap(self.inner.sub(&o.value()))
    }

    fn __rsub__(&self, o: Operand) -> Self {
        wrap(o.value().sub(&self.inner))
    }

    fn __mul__(&self, o: Operand) -> Self {
        wrap(self.inner.mul(&o.value()))
    }

    fn __rmul__(&self, o: Operand) -> Self {
        wrap(o.value().mul(&self.inner))
    }

    fn __truediv__(&self, o: Operand) -> PyResult<Self> {
        self.inner.div(&o.value()).map(wrap).ok_or_else(|| PyZeroDivisionError::new_err("division by zero"))
    }

    fn __pow__(&self, e: u64, _modulo: Option<u64>) -> Self {
        wrap(self.inner.pow(e))
    }

    fn __neg__(&self) -> Self {
        wrap(self.inner.neg())
    }

    fn inverse(&self) -> PyResult<Self> {
        self.inner.inv().map(wrap).ok_or_else(|| PyZeroDivisionError::new_err("zero has no inverse"))
    }

    fn __eq__(&self, o: Operand) -> bool {
        self.inner == o.value()
    }

    /// Exact comparison of real numbers.
    fn __lt__(&self, o: Operand) -> PyResult<bool> {
        let o = o.value();
        if !self.inner.is_real() || !o.is_real() {
            return Err(value_error("ordering needs real numbers"));
        }
        Ok(self.inner.cmp_real(&o) == Ordering::Less)
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.inner.min_poly().coeffs().hash(&mut h);
        h.finish()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Algebraic({})", self.inner.approx_string())
    }
}

mod num_complex_pair {
    use pyo3::prelude::*;
    use pyo3::types::PyComplex;

    pub struct Pair(pub (f64, f64));

    impl<'py> IntoPyObject<'py> for Pair {
        type Target = PyComplex;
        type Output = Bound<'py, PyComplex>;
        type Error = std::convert::Infallible;

        fn into_pyobject(self, py: Python<'py>) -> Result<Self::Output, Self::Error> {
            Ok(PyComplex::from_doubles(py, self.0 .0, self.0 .1))
        }
    }
}

/// Parse a loop from `.loop` text or JSON.
#[pyfunction]
fn parse(text: &str) -> PyResult<PyLoop> {
    PyLoop::new(text)
}

/// Decide termination over all integer initial states.
#[pyfunction]
#[pyo3(signature = (program, radius_schedule=None, m_max=None))]
fn analyze(py: Python<'_>, program: &PyLoop, radius_schedule: Option<Vec<u64>>, m_max: Option<u64>) -> PyAnalysis {
    let mut cfg = AnalyzeConfig::default();
    if let Some(r) = radius_schedule {
        cfg.search.radius_schedule = r;
    }
    cfg.certify.m_max = m_max;
    let p = program.inner.clone();
    let inner = py.detach(move || decision::analyze(&p, &cfg));
    PyAnalysis { inner }
}

/// Run the loop from `init` for at most `max_steps` body executions.
#[pyfunction]
#[pyo3(signature = (program, init, max_steps=10_000, record=false, detect_cycles=false))]
fn simulate(program: &PyLoop, init: Vec<BigInt>, max_steps: u64, record: bool, detect_cycles: bool) -> PyResult<PyTrace> {
    check_dim(&program.inner, &init)?;
    Ok(PyTrace { inner: run_with(&program.inner, &init, max_steps, RunOptions { record, detect_cycles }) })
}

/// Check one initial state: returns `("certified", m, nt_point)`,
/// `("refuted", n, None)` or `("inconclusive", None, None)`.
#[pyfunction]
#[pyo3(signature = (program, point, m_max=None))]
fn certify(program: &PyLoop, point: Vec<BigInt>, m_max: Option<u64>) -> PyResult<(&'static str, Option<u64>, Option<Vec<BigInt>>)> {
    check_dim(&program.inner, &point)?;
    let w = build_witness(&program.inner, &WitnessConfig::default());
    let cfg = CertifyConfig { m_max, ..CertifyConfig::default() };
    Ok(match decision::certify_point(&w, &point, &cfg) {
        CertifyOutcome::Certified(c) => ("certified", Some(c.m), Some(c.nt_point)),
        CertifyOutcome::Refuted(r) => ("refuted", Some(r.n), None),
        CertifyOutcome::Inconclusive(_) => ("inconclusive", None, None),
    })
}

/// Eigenvalues of an integer matrix with their indices.
#[pyfunction]
fn eigenvalues(matrix: Vec<Vec<BigInt>>) -> PyResult<Vec<(PyAlgebraic, usize)>> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|r| r.len() != n) {
        return Err(value_error("matrix must be square and nonempty"));
    }
    let spec = eigendecompose_int(&matrix);
    Ok(spec.eigenvalues.iter().map(|e| (wrap(e.value.clone()), e.index)).collect())
}

/// Spectral report of an integer matrix as JSON.
#[pyfunction]
fn spectrum(matrix: Vec<Vec<BigInt>>) -> PyResult<String> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|r| r.len() != n) {
        return Err(value_error("matrix must be square and nonempty"));
    }
    Ok(eigendecompose_int(&matrix).to_json().to_string())
}

/// Basis (Hermite form) of the multiplicative relations of a tuple, and the
/// number of components of the torus it cuts out.
#[pyfunction]
#[pyo3(signature = (tuple, bound=None))]
fn relations(tuple: Vec<PyAlgebraic>, bound: Option<u64>) -> PyResult<(Vec<Vec<BigInt>>, BigInt)> {
    let t: Vec<AlgebraicNumber> = tuple.into_iter().map(|a| a.inner).collect();
    if t.iter().any(|a| a.is_zero()) {
        return Err(value_error("relations need nonzero entries"));
    }
    let bound = bound.unwrap_or_else(|| masser_bound(&t, WitnessConfig::default().lattice_c));
    let lat = relation_lattice(&t, bound);
    let comps = torus_group(&lat).components();
    Ok((lat.basis, comps))
}

/// Structured witness set description as JSON.
#[pyfunction]
fn witness(program: &PyLoop) -> String {
    build_witness(&program.inner, &WitnessConfig::default()).to_json().to_string()
}

#[pymodule]
fn llterm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLoop>()?;
    m.add_class::<PyAnalysis>()?;
    m.add_class::<PyTrace>()?;
    m.add_class::<PyAlgebraic>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(relations, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    Ok(())
}
