//! Python bindings: `import subroot`.

use std::fmt::Display;

use num_bigint::BigInt;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use subroot_core::geometry::{evaluate_trace, plan_quotient_construction, render_svg, SvgOptions};
use subroot_core::iterate::{iteration_matrix, Engine};
use subroot_core::polynomial::parse_gauss;
use subroot_core::report::RunReport;
use subroot_core::rewrite::{derive_rules, iterate_words, Symbol, Word, DEFAULT_LENGTH_CAP};
use subroot_core::{gauss_divide, parse_polynomial, ShiftParams, SolveOptions};

fn value_err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn poly(text: &str) -> PyResult<subroot_core::Polynomial> {
    parse_polynomial(text).map_err(value_err)
}

fn shift(alpha: &str, beta: &str) -> PyResult<ShiftParams> {
    ShiftParams::new(parse_gauss(alpha).map_err(value_err)?, parse_gauss(beta).map_err(value_err)?).map_err(value_err)
}

/// A polynomial with Gaussian-integer coefficients, highest degree first.
#[pyclass(name = "Polynomial", frozen)]
struct PyPolynomial {
    inner: subroot_core::Polynomial,
}

#[pymethods]
impl PyPolynomial {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyPolynomial { inner: poly(text)? })
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    /// `(re, im)` pairs from the leading coefficient down.
    #[getter]
    fn coeffs(&self) -> Vec<(BigInt, BigInt)> {
        self.inner.coeffs().iter().map(|c| (c.re.clone(), c.im.clone())).collect()
    }

    fn evaluate(&self, z: Complex64) -> Complex64 {
        self.inner.evaluate(z)
    }

    fn residual(&self, z: Complex64) -> f64 {
        self.inner.residual(z)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial('{}')", self.inner)
    }
}

/// Outcome of [`solve`].
#[pyclass(name = "Solution", frozen, get_all)]
struct PySolution {
    root: Complex64,
    /// Exact estimate, e.g. `(1+i)/2`.
    exact: String,
    num: (BigInt, BigInt),
    den: BigInt,
    status: String,
    iterations: usize,
    residual: f64,
    /// Count vector of every iteration.
    counts: Vec<Vec<BigInt>>,
    report_json: String,
}

#[pymethods]
impl PySolution {
    fn __repr__(&self) -> String {
        format!("Solution(root={}, status={}, iterations={})", self.root, self.status, self.iterations)
    }
}

#[pyfunction]
#[pyo3(signature = (polynomial, alpha = "0", beta = "1", iters = None, tol = 1e-12, stable_steps = 3,
                    residual_tol = 1e-8, max_iter = 200, engine = "counts"))]
#[allow(clippy::too_many_arguments)]
fn solve(
    polynomial: &str,
    alpha: &str,
    beta: &str,
    iters: Option<usize>,
    tol: f64,
    stable_steps: usize,
    residual_tol: f64,
    max_iter: usize,
    engine: &str,
) -> PyResult<PySolution> {
    let p = poly(polynomial)?;
    let engine = match engine {
        "counts" => Engine::Counts,
        "words" => Engine::Words,
        other => return Err(value_err(format!("unknown engine '{other}'"))),
    };
    let opts = SolveOptions {
        tol,
        stable_steps,
        residual_tol,
        max_iter,
        engine,
        fixed_iters: iters,
        ..SolveOptions::default()
    };
    let sol = subroot_core::solve(&p, &shift(alpha, beta)?, &opts).map_err(value_err)?;
    let est = &sol.estimate;
    Ok(PySolution {
        root: est.float_value,
        exact: est.value.to_string(),
        num: (est.value.num().re.clone(), est.value.num().im.clone()),
        den: est.value.den().clone(),
        status: est.status.as_str().to_string(),
        iterations: est.iterations,
        residual: est.residual,
        counts: sol.records.iter().map(|r| r.counts.entries().to_vec()).collect(),
        report_json: RunReport::new(polynomial, &sol, &opts).to_json(),
    })
}

/// Distinct roots found over the shift box as `(root, residual, alpha)`.
#[pyfunction]
#[pyo3(signature = (polynomial, radius = 2))]
fn scan(polynomial: &str, radius: u32) -> PyResult<Vec<(Complex64, f64, String)>> {
    let p = poly(polynomial)?;
    Ok(subroot_core::scan_shifts(&p, radius, &SolveOptions::default())
        .into_iter()
        .map(|h| (h.estimate.float_value, h.estimate.residual, h.shift.alpha().to_string()))
        .collect())
}

/// Rule lines and the words `W0..Wk` in display notation.
#[pyfunction]
#[pyo3(signature = (polynomial, alpha = "0", beta = "1", k = 4))]
fn trace(polynomial: &str, alpha: &str, beta: &str, k: usize) -> PyResult<(Vec<String>, Vec<String>)> {
    let m = iteration_matrix(&poly(polynomial)?, &shift(alpha, beta)?).map_err(value_err)?;
    let rules = derive_rules(&m).map_err(value_err)?;
    let words = iterate_words(&rules, Word::single(Symbol::new(0)), k, DEFAULT_LENGTH_CAP).map_err(value_err)?;
    let alphabet = rules.alphabet();
    Ok((rules.lines(), words.iter().map(|w| alphabet.display_word(w)).collect()))
}

/// Evaluated point of the construction of `(u1 - i·v1) / (u2 - i·v2)`.
#[pyfunction]
fn construct(u1: i64, v1: i64, u2: i64, v2: i64) -> PyResult<(f64, f64)> {
    let t = plan_quotient_construction(u1, v1, u2, v2).map_err(value_err)?;
    let p = evaluate_trace(&t).map_err(value_err)?;
    Ok((p.x, p.y))
}

#[pyfunction]
fn construct_svg(u1: i64, v1: i64, u2: i64, v2: i64) -> PyResult<String> {
    let t = plan_quotient_construction(u1, v1, u2, v2).map_err(value_err)?;
    render_svg(&t, &SvgOptions::default()).map_err(value_err)
}

/// Exact quotient of two Gaussian-integer literals, e.g. `divide("-1+i", "2i")`.
#[pyfunction]
fn divide(a: &str, b: &str) -> PyResult<String> {
    let q =
        gauss_divide(&parse_gauss(a).map_err(value_err)?, &parse_gauss(b).map_err(value_err)?).map_err(value_err)?;
    Ok(q.to_string())
}

#[pymodule]
fn subroot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(trace, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(construct_svg, m)?)?;
    m.add_function(wrap_pyfunction!(divide, m)?)?;
    Ok(())
}
