//! Python bindings: expressions, ODE inputs, and the report entry points.

use std::collections::BTreeMap;

use affode::expr::{parse_expr, Expr, ExprError, Symbol};
use affode::jet::{self, JetError, LinearizabilityWitness, OdeInput};
use affode::pipeline::{classify, extract_invariants, BranchVerdict};
use affode::report::{self, ReportError, Suite, DEFAULT_MAX_DEGREE};
use num_rational::BigRational;
use pyo3::exceptions::{PyRuntimeError, PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;

fn expr_err(e: ExprError) -> PyErr {
    match e {
        ExprError::DivisionByZero | ExprError::Pole => PyZeroDivisionError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn jet_err(e: JetError) -> PyErr {
    match e {
        JetError::Expr(e) => expr_err(e),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn report_err(e: ReportError) -> PyErr {
    match e {
        ReportError::Parse(_) | ReportError::Input(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn symbol(name: &str) -> PyResult<Symbol> {
    match parse_expr(name).map_err(expr_err)?.symbols().into_iter().collect::<Vec<_>>().as_slice() {
        [s] => Ok(s.clone()),
        _ => Err(PyValueError::new_err(format!("not a symbol: {name}"))),
    }
}

/// Exact rational function in x, y, y' and jet symbols.
#[pyclass(name = "Expr", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyExpr(Expr);

#[pymethods]
impl PyExpr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_expr(text).map(PyExpr).map_err(expr_err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", self.0)
    }

    fn __add__(&self, other: &PyExpr) -> PyExpr {
        PyExpr(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &PyExpr) -> PyExpr {
        PyExpr(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &PyExpr) -> PyExpr {
        PyExpr(&self.0 * &other.0)
    }

    fn __truediv__(&self, other: &PyExpr) -> PyResult<PyExpr> {
        self.0.checked_div(&other.0).map(PyExpr).map_err(expr_err)
    }

    fn __neg__(&self) -> PyExpr {
        PyExpr(-&self.0)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Partial derivative by a symbol name such as "x", "y'" or "u1".
    fn partial(&self, var: &str) -> PyResult<PyExpr> {
        Ok(PyExpr(self.0.partial(&symbol(var)?)))
    }

    /// Exact value at a point given as {"x": "1/2", "y'": "3"}; returned as "num/den".
    fn eval(&self, point: BTreeMap<String, String>) -> PyResult<String> {
        let mut at = BTreeMap::new();
        for (k, v) in point {
            let q: BigRational = v.parse().map_err(|_| PyValueError::new_err(format!("not a rational: {v}")))?;
            at.insert(symbol(&k)?, q);
        }
        self.0.eval(&at).map(|q| q.to_string()).map_err(expr_err)
    }
}

/// Right-hand side f of y'' = f(x, y, y').
#[pyclass(name = "Ode", frozen)]
struct PyOde(OdeInput);

#[pymethods]
impl PyOde {
    #[new]
    fn new(f: &str) -> PyResult<Self> {
        OdeInput::parse(f).map(PyOde).map_err(jet_err)
    }

    /// The generic f with symbolic jets.
    #[staticmethod]
    fn formal() -> Self {
        PyOde(OdeInput::formal())
    }

    #[getter]
    fn f(&self) -> PyExpr {
        PyExpr(self.0.f().clone())
    }

    fn relative_invariant(&self) -> PyExpr {
        PyExpr(jet::relative_invariant(&self.0))
    }

    fn is_linearizable(&self) -> PyResult<bool> {
        Ok(jet::is_linearizable(&self.0).map_err(jet_err)?.linearizable)
    }

    /// Closure residuals (r1, r2, r3), or None when f is not cubic in y'.
    fn closure_residuals(&self) -> PyResult<Option<(PyExpr, PyExpr, PyExpr)>> {
        Ok(match jet::is_linearizable(&self.0).map_err(jet_err)?.witness {
            LinearizabilityWitness::Residuals(r) => {
                let [a, b, c] = r.as_array().map(Clone::clone);
                Some((PyExpr(a), PyExpr(b), PyExpr(c)))
            }
            LinearizabilityWitness::NotCubic(_) => None,
        })
    }

    /// "flat", "non-vanishing" or "mixed-signal".
    fn branch(&self) -> PyResult<&'static str> {
        let variant = report::chosen_variant().map_err(report_err)?;
        Ok(match classify(&self.0, variant).map_err(|e| PyRuntimeError::new_err(e.to_string()))? {
            BranchVerdict::Flat { .. } => "flat",
            BranchVerdict::NonVanishing { .. } => "non-vanishing",
            BranchVerdict::MixedSignal { .. } => "mixed-signal",
        })
    }

    /// I1, I2, I3 on the section u1 = 1, u3 = 0.
    fn invariants(&self) -> PyResult<(PyExpr, PyExpr, PyExpr)> {
        let variant = report::chosen_variant().map_err(report_err)?;
        let inv = extract_invariants(&self.0, variant).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let [a, b, c] = inv.section;
        Ok((PyExpr(a), PyExpr(b), PyExpr(c)))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// Full analysis as a JSON string.
#[pyfunction]
#[pyo3(signature = (f, formal_cross_check = false, max_degree = DEFAULT_MAX_DEGREE))]
fn analyze(f: &str, formal_cross_check: bool, max_degree: u32) -> PyResult<String> {
    let r = report::analyze(f, formal_cross_check, max_degree).map_err(report_err)?;
    Ok(serde_json::to_string(&r).expect("reports serialize"))
}

/// Curvature matrix as a JSON string; raises for I ≢ 0.
#[pyfunction]
#[pyo3(signature = (f, max_degree = DEFAULT_MAX_DEGREE))]
fn curvature(f: &str, max_degree: u32) -> PyResult<String> {
    let r = report::curvature(f, max_degree).map_err(report_err)?;
    Ok(serde_json::to_string(&r).expect("reports serialize"))
}

/// Identity suite ("structure", "connection" or "all") as a JSON string.
#[pyfunction]
#[pyo3(signature = (suite = "all"))]
fn verify(suite: &str) -> PyResult<String> {
    let suite = match suite {
        "structure" => Suite::Structure,
        "connection" => Suite::Connection,
        "all" => Suite::All,
        other => return Err(PyValueError::new_err(format!("unknown suite {other}"))),
    };
    Ok(serde_json::to_string(&report::verify(suite)).expect("reports serialize"))
}

#[pymodule]
fn affode_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpr>()?;
    m.add_class::<PyOde>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(curvature, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
