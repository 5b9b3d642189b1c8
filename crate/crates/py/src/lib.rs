use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use knotcg::branched_cover;
use knotcg::exact_linalg::{self, IntMatrix};
use knotcg::number_theory;
use knotcg::obstruction::{self, FamilyEntry, Mode, ObstructionCertificate, RunOptions};
use knotcg::satellite::{self, Companion, SatelliteSum};
use knotcg::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str, c: u64) -> PyResult<Mode> {
    match mode {
        "refined" => Ok(Mode::Refined),
        "bounded" => Ok(Mode::Bounded { c }),
        _ => Err(PyValueError::new_err(format!("mode must be 'refined' or 'bounded', got {mode:?}"))),
    }
}

/// Integer Seifert matrix of a knot.
#[pyclass(name = "SeifertMatrix", module = "pyknotcg", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PySeifert(knotcg::seifert::SeifertMatrix);

#[pymethods]
impl PySeifert {
    #[new]
    fn new(rows: Vec<Vec<i64>>) -> PyResult<Self> {
        if rows.is_empty() {
            return Ok(PySeifert(knotcg::seifert::SeifertMatrix::unknot()));
        }
        knotcg::seifert::SeifertMatrix::from_rows(&rows).map(PySeifert).map_err(to_py)
    }

    /// Parse a knot description such as "trefoil", "-trefoil" or "twisted:2".
    #[staticmethod]
    fn parse(spec: &str) -> PyResult<Self> {
        satellite::parse_knot(spec).map(PySeifert).map_err(to_py)
    }

    #[staticmethod]
    fn trefoil() -> Self {
        PySeifert(knotcg::seifert::SeifertMatrix::trefoil())
    }

    #[staticmethod]
    fn unknot() -> Self {
        PySeifert(knotcg::seifert::SeifertMatrix::unknot())
    }

    #[staticmethod]
    fn twisted_double(m: i64) -> Self {
        PySeifert(knotcg::seifert::SeifertMatrix::twisted_double(m))
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<i64>> {
        self.0.to_rows()
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    fn mirror(&self) -> Self {
        PySeifert(self.0.mirror())
    }

    fn reverse(&self) -> Self {
        PySeifert(self.0.reverse())
    }

    fn concordance_inverse(&self) -> Self {
        PySeifert(self.0.concordance_inverse())
    }

    fn connected_sum(&self, other: &PySeifert) -> Self {
        PySeifert(self.0.connected_sum(&other.0))
    }

    /// Coefficients of det(V - tV^t), constant term first.
    fn alexander_polynomial(&self) -> Vec<BigInt> {
        self.0.alexander_polynomial().coeffs().to_vec()
    }

    /// `(signature, degenerate)` at `exp(2 pi i c / modulus)`.
    fn signature(&self, c: u64, modulus: u64) -> PyResult<(i64, bool)> {
        let s = self.0.signature(c, modulus).map_err(to_py)?;
        Ok((s.value, s.degenerate))
    }

    /// Invariant factors and free rank of H_1 of the q-fold branched cover.
    fn cover_homology(&self, q: u32) -> PyResult<(Vec<BigInt>, usize)> {
        let h = branched_cover::cover_homology(&self.0, q).map_err(to_py)?;
        Ok((h.invariant_factors(), h.free_rank))
    }

    fn __repr__(&self) -> String {
        format!("SeifertMatrix({})", self.0)
    }
}

#[pyfunction]
fn smith_normal_form(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<BigInt>> {
    let m = IntMatrix::from_rows(&rows).map_err(to_py)?;
    Ok(exact_linalg::smith_normal_form(&m).diagonal)
}

/// `(description, a)` for the q-fold cover of the twist knot K_{2m+1}, e.g. `("Z_7 ⊕ Z_7", 7)`.
#[pyfunction]
#[pyo3(signature = (m, q = 3))]
fn cover_homology(m: i64, q: u32) -> PyResult<(String, BigInt)> {
    let h = branched_cover::cover_homology_twisted(m, q).map_err(to_py)?;
    Ok((h.to_string(), h.a.unwrap_or_default()))
}

/// `(lambda_plus, lambda_minus)`.
#[pyfunction]
#[pyo3(signature = (m, p, q = 3))]
fn deck_action(m: i64, p: u64, q: u32) -> PyResult<(u64, u64)> {
    let d = branched_cover::deck_action(m, q, p).map_err(to_py)?;
    Ok((d.lambda_plus, d.lambda_minus))
}

#[pyfunction]
#[pyo3(name = "F")]
fn f(m: i64) -> BigInt {
    number_theory::f(m)
}

#[pyfunction]
fn exponent_of(p: u64, n: BigInt) -> PyResult<u32> {
    number_theory::exponent_of(p, &n).map_err(to_py)
}

#[pyfunction]
fn legendre_symbol(a: i64, p: u64) -> PyResult<i8> {
    number_theory::legendre_symbol(a, p).map_err(to_py)
}

#[pyfunction]
fn solve_f_mod_p(p: u64) -> PyResult<Vec<u64>> {
    number_theory::solve_f_mod_p(p).map_err(to_py)
}

/// `[(p, m, exponent), ...]`.
#[pyfunction]
#[pyo3(signature = (count, bound = 100_000))]
fn prime_witnesses(count: usize, bound: u64) -> PyResult<Vec<(u64, i64, u32)>> {
    let ws = number_theory::prime_witnesses(count, bound).map_err(to_py)?;
    Ok(ws.into_iter().map(|w| (w.p, w.m, w.exponent)).collect())
}

/// `[(m, p), ...]`.
#[pyfunction]
#[pyo3(signature = (count, bound = 100_000))]
fn select_independent_family(count: usize, bound: u64) -> PyResult<Vec<(i64, u64)>> {
    let fam = number_theory::select_independent_family(count, bound).map_err(to_py)?;
    Ok(fam.into_iter().map(|f| (f.m, f.witness.p)).collect())
}

#[pyfunction]
#[pyo3(signature = (j, c, lam, p, q = 3))]
fn cg_delta(j: &str, c: u64, lam: u64, p: u64, q: u32) -> PyResult<i64> {
    let j = Companion::parse(j).map_err(to_py)?;
    satellite::cg_delta(j.signatures(), c, lam, q, p).map_err(to_py)
}

/// Certificate JSON for n copies of the amphicheiral satellite with companion `j`.
#[pyfunction]
#[pyo3(signature = (m, j, p, n = 1, q = 3, u = 1, mode = "refined", c = 0, jobs = 0))]
#[allow(clippy::too_many_arguments)]
fn certify_nonslice(
    py: Python<'_>,
    m: i64,
    j: &str,
    p: u64,
    n: usize,
    q: u32,
    u: u64,
    mode: &str,
    c: u64,
    jobs: usize,
) -> PyResult<String> {
    let mode = parse_mode(mode, c)?;
    let j = Companion::parse(j).map_err(to_py)?;
    let knot = SatelliteSum::amphicheiral(m, &j, n, 1);
    let opts = RunOptions { jobs, ..RunOptions::default() };
    py.detach(|| obstruction::certify_nonslice(&knot, p, q, u, mode, opts)).map(|c| c.to_json()).map_err(to_py)
}

/// Certificate JSON for a linear combination; `family` is a list of `(m, J, p)`.
#[pyfunction]
#[pyo3(signature = (family, coefficients, q = 3, u = 1, mode = "refined", c = 0))]
fn independence_certificate(
    py: Python<'_>,
    family: Vec<(i64, String, u64)>,
    coefficients: Vec<i64>,
    q: u32,
    u: u64,
    mode: &str,
    c: u64,
) -> PyResult<String> {
    let mode = parse_mode(mode, c)?;
    let family = family
        .into_iter()
        .map(|(m, j, p)| Ok(FamilyEntry { m, j: Companion::parse(&j)?, p }))
        .collect::<knotcg::Result<Vec<_>>>()
        .map_err(to_py)?;
    py.detach(|| obstruction::independence_certificate(&family, &coefficients, q, u, mode, RunOptions::default()))
        .map(|c| c.to_json())
        .map_err(to_py)
}

/// Re-derive a certificate; returns `(records_checked, verdict)` or raises ValueError.
#[pyfunction]
fn verify_certificate(py: Python<'_>, text: &str) -> PyResult<(usize, String)> {
    let report = py.detach(|| obstruction::verify_certificate_text(text, RunOptions::default())).map_err(to_py)?;
    Ok((report.records_checked, report.verdict.to_string()))
}

/// Verdict of a certificate without re-deriving it.
#[pyfunction]
fn certificate_verdict(text: &str) -> PyResult<String> {
    let cert = ObstructionCertificate::from_json(text).map_err(to_py)?;
    Ok(cert.verdict.to_string())
}

#[pymodule]
fn pyknotcg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeifert>()?;
    m.add_function(wrap_pyfunction!(smith_normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(cover_homology, m)?)?;
    m.add_function(wrap_pyfunction!(deck_action, m)?)?;
    m.add_function(wrap_pyfunction!(f, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_of, m)?)?;
    m.add_function(wrap_pyfunction!(legendre_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(solve_f_mod_p, m)?)?;
    m.add_function(wrap_pyfunction!(prime_witnesses, m)?)?;
    m.add_function(wrap_pyfunction!(select_independent_family, m)?)?;
    m.add_function(wrap_pyfunction!(cg_delta, m)?)?;
    m.add_function(wrap_pyfunction!(certify_nonslice, m)?)?;
    m.add_function(wrap_pyfunction!(independence_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(certificate_verdict, m)?)?;
    Ok(())
}
