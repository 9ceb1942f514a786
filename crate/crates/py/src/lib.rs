use std::collections::BTreeSet;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use revtree::classify::{apply_rule, RuleId, WitnessVerification};
use revtree::corpus::REFERENCE_CORPUS;
use revtree::expr::{cardinality, height, level0_card, parse_family, parse_ordinal, parse_seq};
use revtree::seq::{
    frobenius_threshold, is_independent as independent, semigroup_member as member,
};
use revtree::window::verify_witness;
use revtree::{TreeExpr, WindowParams};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed tree expression.
#[pyclass(
    name = "Expr",
    module = "revtree",
    frozen,
    eq,
    hash,
    skip_from_py_object
)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyExpr(TreeExpr);

#[pymethods]
impl PyExpr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        revtree::parse_expr(text).map(PyExpr).map_err(value_err)
    }

    fn normalize(&self) -> Self {
        PyExpr(revtree::normalize(&self.0))
    }

    fn height(&self) -> String {
        height(&self.0).to_string()
    }

    fn cardinality(&self) -> String {
        cardinality(&self.0).to_string()
    }

    fn level0(&self) -> String {
        level0_card(&self.0).to_string()
    }

    #[getter]
    fn is_connected(&self) -> bool {
        self.0.is_connected()
    }

    fn classify(&self) -> PyCertificate {
        PyCertificate(revtree::classify(&self.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", self.0)
    }
}

/// An ordinal below ω^ω in Cantor normal form.
#[pyclass(
    name = "Ordinal",
    module = "revtree",
    frozen,
    eq,
    ord,
    hash,
    skip_from_py_object
)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PyOrdinal(revtree::Ordinal);

#[pymethods]
impl PyOrdinal {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_ordinal(text).map(PyOrdinal).map_err(value_err)
    }

    fn __add__(&self, other: &PyOrdinal) -> PyResult<Self> {
        self.0
            .checked_add(&other.0)
            .map(PyOrdinal)
            .ok_or_else(|| PyValueError::new_err("ordinal overflow"))
    }

    fn succ(&self) -> Self {
        PyOrdinal(self.0.succ())
    }

    #[getter]
    fn is_limit(&self) -> bool {
        self.0.is_limit()
    }

    #[getter]
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// `(exponent, coefficient)` pairs, largest exponent first.
    fn terms(&self) -> Vec<(u32, u64)> {
        self.0.terms().to_vec()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Ordinal('{}')", self.0)
    }
}

#[pyclass(name = "Certificate", module = "revtree", skip_from_py_object)]
#[derive(Clone)]
struct PyCertificate(revtree::Certificate);

#[pymethods]
impl PyCertificate {
    #[getter]
    fn verdict(&self) -> &'static str {
        self.0.verdict.as_str()
    }

    #[getter]
    fn expr(&self) -> String {
        self.0.expr.to_string()
    }

    #[getter]
    fn rule(&self) -> Option<&'static str> {
        self.0.deciding_rule().map(RuleId::name)
    }

    #[getter]
    fn citation(&self) -> Option<&'static str> {
        self.0.deciding_rule().map(RuleId::citation)
    }

    #[getter]
    fn unknown_reasons(&self) -> Vec<String> {
        self.0.unknown_reasons.clone()
    }

    #[getter]
    fn has_witness(&self) -> bool {
        self.0.witness.is_some()
    }

    /// Checks the attached witness on a finite window; `None` without a witness.
    #[pyo3(signature = (depth=6, width=4, comps=5, zrange=4))]
    fn verify(
        &mut self,
        depth: u32,
        width: u32,
        comps: u32,
        zrange: u32,
    ) -> PyResult<Option<bool>> {
        if self.0.witness.is_none() {
            return Ok(None);
        }
        let w = WindowParams {
            depth,
            width,
            comps,
            zrange,
        };
        self.0.verify(&w).map(Some).map_err(value_err)
    }

    /// Summary line of the last window verification.
    #[getter]
    fn verification(&self) -> Option<String> {
        self.0.witness_verification.as_ref().map(|v| match v {
            WitnessVerification::Window { report } => report.summary(),
            WitnessVerification::MergePlan { check } => {
                format!("merge plan: {}", if check.ok { "PASS" } else { "FAIL" })
            }
        })
    }

    fn explain(&self) -> String {
        revtree::explain(&self.0)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        revtree::Certificate::from_json(text)
            .map(PyCertificate)
            .map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Certificate('{}': {})", self.0.expr, self.0.verdict)
    }
}

#[pyclass(name = "CrossCheck", module = "revtree", frozen, get_all)]
struct PyCrossCheck {
    consistent: bool,
    /// `(rule, verdict)` for every rule that decided.
    verdicts: Vec<(String, String)>,
    conflicts: Vec<(String, String)>,
}

fn expr_arg(e: &Bound<'_, PyAny>) -> PyResult<TreeExpr> {
    if let Ok(x) = e.cast::<PyExpr>() {
        return Ok(x.get().0.clone());
    }
    let text: String = e.extract()?;
    revtree::parse_expr(&text).map_err(value_err)
}

#[pyfunction]
fn parse(text: &str) -> PyResult<PyExpr> {
    PyExpr::new(text)
}

/// Classifies an expression given as text or `Expr`.
#[pyfunction]
fn classify(expr: &Bound<'_, PyAny>) -> PyResult<PyCertificate> {
    Ok(PyCertificate(revtree::classify(&expr_arg(expr)?)))
}

#[pyfunction]
fn cross_check(expr: &Bound<'_, PyAny>) -> PyResult<PyCrossCheck> {
    let r = revtree::cross_check(&expr_arg(expr)?);
    Ok(PyCrossCheck {
        consistent: r.consistent(),
        verdicts: r
            .verdicts
            .iter()
            .map(|(a, v)| (a.to_string(), v.to_string()))
            .collect(),
        conflicts: r
            .conflicts
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    })
}

/// Verdict of a single rule: `(verdict, reason)`; the reason is absent when it decided.
#[pyfunction]
fn rule(name: &str, expr: &Bound<'_, PyAny>) -> PyResult<(String, Option<String>)> {
    let id =
        RuleId::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown rule {name}")))?;
    let r = apply_rule(id, &revtree::normalize(&expr_arg(expr)?));
    Ok((r.verdict.to_string(), r.reason))
}

#[pyfunction]
fn seq_check<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let s = parse_seq(text).map_err(value_err)?;
    let v = revtree::is_reversible_sequence(&s);
    let d = PyDict::new(py);
    d.set_item("reversible", v.reversible.to_string())?;
    d.set_item("K", v.k_set.iter().copied().collect::<Vec<u64>>())?;
    d.set_item("gcdK", v.gcd_k)?;
    d.set_item("reason", v.reason)?;
    d.set_item("plan", v.witness.map(|p| p.to_string()))?;
    Ok(d)
}

#[pyfunction]
fn wellu_check<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let f = parse_family(text).map_err(value_err)?;
    let v = revtree::classify_wellorder_union(&f);
    let d = PyDict::new(py);
    d.set_item("reversible", v.reversible.to_string())?;
    d.set_item("gamma_star", v.gamma_star.to_string())?;
    d.set_item("reason", v.reason)?;
    Ok(d)
}

#[pyfunction]
fn semigroup_member(n: u64, k: BTreeSet<u64>) -> bool {
    member(n, &k)
}

#[pyfunction]
fn is_independent(k: BTreeSet<u64>) -> bool {
    independent(&k).independent
}

#[pyfunction]
fn frobenius(k: BTreeSet<u64>) -> Option<u64> {
    frobenius_threshold(&k)
}

/// Classifies `expr` and checks its condensation witness on a window.
#[pyfunction]
#[pyo3(signature = (expr, depth=6, width=4, comps=5, zrange=4))]
fn witness_verify<'py>(
    py: Python<'py>,
    expr: &Bound<'_, PyAny>,
    depth: u32,
    width: u32,
    comps: u32,
    zrange: u32,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let c = revtree::classify(&expr_arg(expr)?);
    let Some(revtree::Witness::Condensation { descriptor, target }) = c.witness else {
        return Ok(None);
    };
    let w = WindowParams {
        depth,
        width,
        comps,
        zrange,
    };
    let r = verify_witness(&descriptor, &target, &w).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("witness", &r.witness)?;
    d.set_item("pass", r.pass)?;
    d.set_item("elements", r.elements)?;
    d.set_item("injective", r.injective)?;
    d.set_item("order_preserving", r.order_preserving)?;
    d.set_item("coverage", r.coverage)?;
    d.set_item(
        "height_raise",
        r.height_raise.as_ref().map(|h| {
            (
                h.element.to_string(),
                h.before.to_string(),
                h.after.to_string(),
            )
        }),
    )?;
    d.set_item("summary", r.summary())?;
    Ok(Some(d))
}

/// Runs a corpus (the shipped one by default) and returns `(passed, failed)`.
#[pyfunction]
#[pyo3(signature = (text=None))]
fn run_corpus(text: Option<&str>) -> (usize, usize) {
    let r = revtree::run_corpus(text.unwrap_or(REFERENCE_CORPUS));
    (r.passed(), r.failed())
}

#[pymodule]
#[pyo3(name = "revtree")]
fn revtree_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpr>()?;
    m.add_class::<PyOrdinal>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyCrossCheck>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(cross_check, m)?)?;
    m.add_function(wrap_pyfunction!(rule, m)?)?;
    m.add_function(wrap_pyfunction!(seq_check, m)?)?;
    m.add_function(wrap_pyfunction!(wellu_check, m)?)?;
    m.add_function(wrap_pyfunction!(semigroup_member, m)?)?;
    m.add_function(wrap_pyfunction!(is_independent, m)?)?;
    m.add_function(wrap_pyfunction!(frobenius, m)?)?;
    m.add_function(wrap_pyfunction!(witness_verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_corpus, m)?)?;
    Ok(())
}
