//! Python bindings: the estimators, exact null moments, skew-normal
//! engine, the three independence tests and the enumeration oracle.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use xisym::{Direction, PairedSample, SkewNormalParams, TiePolicy};

fn to_py_err(e: xisym::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_policy(ties: &str, tie_seed: u64) -> PyResult<TiePolicy> {
    match ties {
        "reject" => Ok(TiePolicy::Reject),
        "random" => Ok(TiePolicy::RandomBreak { seed: tie_seed }),
        other => Err(PyValueError::new_err(format!(
            "ties must be 'reject' or 'random', got '{other}'"
        ))),
    }
}

fn parse_direction(direction: &str) -> PyResult<Direction> {
    match direction {
        "xy" => Ok(Direction::XY),
        "yx" => Ok(Direction::YX),
        other => Err(PyValueError::new_err(format!(
            "direction must be 'xy' or 'yx', got '{other}'"
        ))),
    }
}

fn sample(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<PairedSample> {
    PairedSample::new(xs, ys).map_err(to_py_err)
}

/// Result of an independence test.
#[pyclass(frozen, get_all)]
struct TestResult {
    statistic: f64,
    xi_xy: f64,
    xi_yx: f64,
    xi_sym: f64,
    n: usize,
    method: String,
    p_value: f64,
    null_location: Option<f64>,
    null_scale: Option<f64>,
    null_shape: Option<f64>,
    permutations: Option<usize>,
    seed: Option<u64>,
}

impl TestResult {
    fn from_core(r: xisym::TestResult, n: usize) -> Self {
        TestResult {
            statistic: r.statistic,
            xi_xy: r.xi_sym.xi_xy,
            xi_yx: r.xi_sym.xi_yx,
            xi_sym: r.xi_sym.value,
            n,
            method: match r.method {
                xisym::Method::Asymptotic => "asymptotic".to_string(),
                xisym::Method::FiniteSample => "finite".to_string(),
                xisym::Method::Permutation => "permutation".to_string(),
            },
            p_value: r.p_value,
            null_location: r.null_params.map(|p| p.location()),
            null_scale: r.null_params.map(|p| p.scale()),
            null_shape: r.null_params.map(|p| p.shape()),
            permutations: r.permutations,
            seed: r.seed,
        }
    }
}

#[pymethods]
impl TestResult {
    fn __repr__(&self) -> String {
        format!(
            "TestResult(method='{}', statistic={}, p_value={})",
            self.method, self.statistic, self.p_value
        )
    }
}

/// Directional rank correlation of paired data.
#[pyfunction]
#[pyo3(signature = (xs, ys, direction="xy", ties="reject", tie_seed=0))]
fn xi(xs: Vec<f64>, ys: Vec<f64>, direction: &str, ties: &str, tie_seed: u64) -> PyResult<f64> {
    let s = sample(xs, ys)?;
    let estimate = xisym::xi(&s, parse_direction(direction)?, parse_policy(ties, tie_seed)?)
        .map_err(to_py_err)?;
    Ok(estimate.value)
}

/// Both directional coefficients and their maximum, as (xi_xy, xi_yx, max).
#[pyfunction]
#[pyo3(signature = (xs, ys, ties="reject", tie_seed=0))]
fn xi_sym(xs: Vec<f64>, ys: Vec<f64>, ties: &str, tie_seed: u64) -> PyResult<(f64, f64, f64)> {
    let s = sample(xs, ys)?;
    let sym = xisym::xi_sym(&s, parse_policy(ties, tie_seed)?).map_err(to_py_err)?;
    Ok((sym.xi_xy, sym.xi_yx, sym.value))
}

/// M-nearest-neighbor coefficient.
#[pyfunction]
#[pyo3(signature = (xs, ys, m, direction="xy", ties="reject", tie_seed=0))]
fn xi_nm(
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: usize,
    direction: &str,
    ties: &str,
    tie_seed: u64,
) -> PyResult<f64> {
    let s = sample(xs, ys)?;
    let estimate = xisym::xi_nm(
        &s,
        m,
        parse_direction(direction)?,
        parse_policy(ties, tie_seed)?,
    )
    .map_err(to_py_err)?;
    Ok(estimate.value)
}

/// Concomitant ranks (a permutation of 1..=n).
#[pyfunction]
#[pyo3(signature = (xs, ys, direction="xy", ties="reject", tie_seed=0))]
fn concomitant_ranks(
    xs: Vec<f64>,
    ys: Vec<f64>,
    direction: &str,
    ties: &str,
    tie_seed: u64,
) -> PyResult<Vec<u32>> {
    let s = sample(xs, ys)?;
    let ranks = xisym::concomitant_ranks(
        &s,
        parse_direction(direction)?,
        parse_policy(ties, tie_seed)?,
    )
    .map_err(to_py_err)?;
    Ok(ranks.ranks().to_vec())
}

/// Exact null variance of the scaled coefficient.
#[pyfunction]
fn var_sqrtn_xi(n: usize) -> PyResult<f64> {
    xisym::var_sqrtn_xi(n).map_err(to_py_err)
}

/// Exact null covariance between the two scaled directions.
#[pyfunction]
fn cov_sqrtn_xi(n: usize) -> PyResult<f64> {
    xisym::cov_sqrtn_xi(n).map_err(to_py_err)
}

/// Exact null correlation between the two scaled directions.
#[pyfunction]
fn rho_n(n: usize) -> PyResult<f64> {
    xisym::rho_n(n).map_err(to_py_err)
}

/// Skew-normal shape (1 - rho) / sqrt(1 - rho^2).
#[pyfunction]
fn shape_alpha(rho: f64) -> PyResult<f64> {
    xisym::shape_alpha(rho).map_err(to_py_err)
}

/// Owen's T function.
#[pyfunction]
fn owen_t(h: f64, a: f64) -> f64 {
    xisym::owen_t(h, a)
}

/// Skew-normal CDF with the given location, scale and shape.
#[pyfunction]
fn sn_cdf(x: f64, location: f64, scale: f64, shape: f64) -> PyResult<f64> {
    let params = SkewNormalParams::new(location, scale, shape).map_err(to_py_err)?;
    Ok(xisym::sn_cdf(x, &params))
}

/// Skew-normal survival function.
#[pyfunction]
fn sn_survival(x: f64, location: f64, scale: f64, shape: f64) -> PyResult<f64> {
    let params = SkewNormalParams::new(location, scale, shape).map_err(to_py_err)?;
    Ok(xisym::sn_survival(x, &params))
}

/// Skew-normal density.
#[pyfunction]
fn sn_pdf(x: f64, location: f64, scale: f64, shape: f64) -> PyResult<f64> {
    let params = SkewNormalParams::new(location, scale, shape).map_err(to_py_err)?;
    Ok(xisym::sn_pdf(x, &params))
}

/// Asymptotic skew-normal independence test.
#[pyfunction]
#[pyo3(signature = (xs, ys, ties="reject", tie_seed=0))]
fn asymptotic_test(xs: Vec<f64>, ys: Vec<f64>, ties: &str, tie_seed: u64) -> PyResult<TestResult> {
    let s = sample(xs, ys)?;
    let n = s.n();
    let r = xisym::asymptotic_test(&s, parse_policy(ties, tie_seed)?).map_err(to_py_err)?;
    Ok(TestResult::from_core(r, n))
}

/// Finite-sample skew-normal independence test (n >= 4).
#[pyfunction]
#[pyo3(signature = (xs, ys, ties="reject", tie_seed=0))]
fn finite_sample_test(
    xs: Vec<f64>,
    ys: Vec<f64>,
    ties: &str,
    tie_seed: u64,
) -> PyResult<TestResult> {
    let s = sample(xs, ys)?;
    let n = s.n();
    let r = xisym::finite_sample_test(&s, parse_policy(ties, tie_seed)?).map_err(to_py_err)?;
    Ok(TestResult::from_core(r, n))
}

/// Seeded permutation independence test.
#[pyfunction]
#[pyo3(signature = (xs, ys, permutations=5000, seed=0, ties="reject", tie_seed=0))]
fn permutation_test(
    xs: Vec<f64>,
    ys: Vec<f64>,
    permutations: usize,
    seed: u64,
    ties: &str,
    tie_seed: u64,
) -> PyResult<TestResult> {
    let s = sample(xs, ys)?;
    let n = s.n();
    let r = xisym::permutation_test(&s, permutations, seed, parse_policy(ties, tie_seed)?)
        .map_err(to_py_err)?;
    Ok(TestResult::from_core(r, n))
}

/// Exact right-tail p-value from full enumeration (n <= 8).
#[pyfunction]
#[pyo3(signature = (xs, ys, ties="reject", tie_seed=0))]
fn exact_pvalue(xs: Vec<f64>, ys: Vec<f64>, ties: &str, tie_seed: u64) -> PyResult<f64> {
    let s = sample(xs, ys)?;
    xisym::exact_pvalue(&s, parse_policy(ties, tie_seed)?).map_err(to_py_err)
}

/// Exact null summary by enumeration: (mean, var, cov, [(value, prob)...]).
#[pyfunction]
fn enumerate_null(n: usize) -> PyResult<(f64, f64, f64, Vec<(f64, f64)>)> {
    let s = xisym::enumerate_null(n).map_err(to_py_err)?;
    Ok((
        s.mean_xi_f64(),
        s.var_sqrtn_f64(),
        s.cov_sqrtn_f64(),
        s.sym_distribution_f64(),
    ))
}

/// Monte Carlo null moment estimates:
/// (var_hat, se_var, cov_hat, se_cov).
#[pyfunction]
fn mc_moments(n: usize, reps: usize, seed: u64) -> PyResult<(f64, f64, f64, f64)> {
    if reps < 2 {
        return Err(PyValueError::new_err("reps must be at least 2"));
    }
    let est = xisym::mc_moments(n, reps, seed);
    Ok((est.var_hat, est.se_var, est.cov_hat, est.se_cov))
}

#[pymodule]
fn xisym_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<TestResult>()?;
    m.add_function(wrap_pyfunction!(xi, m)?)?;
    m.add_function(wrap_pyfunction!(xi_sym, m)?)?;
    m.add_function(wrap_pyfunction!(xi_nm, m)?)?;
    m.add_function(wrap_pyfunction!(concomitant_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(var_sqrtn_xi, m)?)?;
    m.add_function(wrap_pyfunction!(cov_sqrtn_xi, m)?)?;
    m.add_function(wrap_pyfunction!(rho_n, m)?)?;
    m.add_function(wrap_pyfunction!(shape_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(owen_t, m)?)?;
    m.add_function(wrap_pyfunction!(sn_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(sn_survival, m)?)?;
    m.add_function(wrap_pyfunction!(sn_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_test, m)?)?;
    m.add_function(wrap_pyfunction!(finite_sample_test, m)?)?;
    m.add_function(wrap_pyfunction!(permutation_test, m)?)?;
    m.add_function(wrap_pyfunction!(exact_pvalue, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_null, m)?)?;
    m.add_function(wrap_pyfunction!(mc_moments, m)?)?;
    Ok(())
}
