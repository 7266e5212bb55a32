//! Python bindings: `import pymortgage`.
//!
//! Rates are decimals. Errors raise `pymortgage.MortgageError` with `args == (code, detail)`.

use perpetual_mortgage as pm;
use perpetual_mortgage::oracle::{self, GridSpec, Policy};
use pm::{ContractKind, ContractSpec};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pymortgage, MortgageError, PyValueError);

fn to_py(e: pm::Error) -> PyErr {
    MortgageError::new_err((e.code(), e.to_string()))
}

fn kind(name: &str) -> PyResult<ContractKind> {
    name.parse().map_err(to_py)
}

fn spec(contract: &str, m: f64, alpha: f64) -> PyResult<ContractSpec> {
    Ok(ContractSpec { kind: kind(contract)?, m, alpha })
}

/// Interest rate, benefit rate, volatility and initial loan-to-value.
#[pyclass(name = "ModelParams", module = "pymortgage", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyModelParams {
    inner: pm::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    fn new(r: f64, delta: f64, sigma: f64, b0: f64) -> PyResult<Self> {
        Ok(Self { inner: pm::ModelParams::new(r, delta, sigma, b0).map_err(to_py)? })
    }

    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn b0(&self) -> f64 {
        self.inner.b0
    }

    /// `(p1, p2)`.
    fn exponents(&self) -> PyResult<(f64, f64)> {
        let e = pm::compute_exponents(&self.inner).map_err(to_py)?;
        Ok((e.p1, e.p2))
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("ModelParams(r={}, delta={}, sigma={}, b0={})", p.r, p.delta, p.sigma, p.b0)
    }
}

/// Closed-form value function of one contract.
#[pyclass(name = "SolvedContract", module = "pymortgage", frozen)]
struct PySolvedContract {
    inner: pm::SolvedContract,
}

#[pymethods]
impl PySolvedContract {
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    /// `{"h1": ..., "h2": ..., "h3": ...}` with absent boundaries left out.
    #[getter]
    fn boundaries<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (name, v) in self.inner.boundaries.iter() {
            d.set_item(name, v)?;
        }
        Ok(d)
    }

    /// List of `(lo, hi, action)` tuples.
    #[getter]
    fn regions(&self) -> Vec<(f64, f64, &'static str)> {
        self.inner.regions.iter().map(|r| (r.lo, r.hi, r.action.as_str())).collect()
    }

    #[getter]
    fn exponents(&self) -> (f64, f64) {
        (self.inner.exponents.p1, self.inner.exponents.p2)
    }

    fn value(&self, h: f64) -> f64 {
        self.inner.value(h)
    }

    fn derivative(&self, h: f64) -> f64 {
        self.inner.derivative(h)
    }

    fn action_at(&self, h: f64) -> &'static str {
        self.inner.action_at(h).as_str()
    }

    /// JSON with regions, coefficients, boundaries and exponents.
    fn to_json(&self) -> String {
        serde_json_string(&self.inner)
    }

    fn __repr__(&self) -> String {
        let b: Vec<String> = self.inner.boundaries.iter().map(|(n, v)| format!("{n}={v:.6}")).collect();
        format!("SolvedContract(kind={}, {})", self.inner.kind, b.join(", "))
    }
}

fn serde_json_string<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

#[pyfunction]
#[pyo3(signature = (params, contract, m, alpha=0.0))]
fn solve(params: &PyModelParams, contract: &str, m: f64, alpha: f64) -> PyResult<PySolvedContract> {
    let inner = pm::solve(&params.inner, &spec(contract, m, alpha)?).map_err(to_py)?;
    Ok(PySolvedContract { inner })
}

/// Same contract with prepayment ruled out.
#[pyfunction]
#[pyo3(signature = (params, contract, m, alpha=0.0))]
fn solve_no_prepay(params: &PyModelParams, contract: &str, m: f64, alpha: f64) -> PyResult<PySolvedContract> {
    let inner = pm::solve_no_prepay(&params.inner, &spec(contract, m, alpha)?).map_err(to_py)?;
    Ok(PySolvedContract { inner })
}

/// `(regime, m_star, alpha_star)`; `alpha_star` is `None` in the high-rate regime.
#[pyfunction]
fn aprm_regime(params: &PyModelParams, m: f64) -> PyResult<(String, f64, Option<f64>)> {
    let reg = pm::aprm_regime(&params.inner, m).map_err(to_py)?;
    Ok((format!("{:?}", reg.regime), reg.m_star, reg.alpha_star))
}

#[pyfunction]
#[pyo3(signature = (params, contract, m, h, alpha=0.0))]
fn default_option_value(params: &PyModelParams, contract: &str, m: f64, h: f64, alpha: f64) -> PyResult<f64> {
    pm::default_option_value(&params.inner, &spec(contract, m, alpha)?, h).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, contract, m, h, alpha=0.0))]
fn prepay_option_value(params: &PyModelParams, contract: &str, m: f64, h: f64, alpha: f64) -> PyResult<f64> {
    pm::prepay_option_value(&params.inner, &spec(contract, m, alpha)?, h).map_err(to_py)
}

#[pyfunction]
fn frm_value_with_foreclosure(params: &PyModelParams, m: f64, phi: f64, h: f64) -> PyResult<f64> {
    pm::frm_value_with_foreclosure(&params.inner, m, phi, h).map_err(to_py)
}

/// `(phi, in_range)` equating the FRM with `target` at the common rate `m`.
#[pyfunction]
#[pyo3(signature = (params, m, target, h, alpha=0.0))]
fn equivalent_foreclosure_cost(params: &PyModelParams, m: f64, target: &str, h: f64, alpha: f64) -> PyResult<(f64, bool)> {
    let e = pm::equivalent_foreclosure_cost(&params.inner, m, kind(target)?, alpha, h).map_err(to_py)?;
    Ok((e.phi, e.in_range))
}

/// Spread in basis points over the FRM rate `m_f`.
#[pyfunction]
#[pyo3(signature = (params, m_f, phi, target, alpha=0.0, h=1.0))]
fn endogenous_spread(params: &PyModelParams, m_f: f64, phi: f64, target: &str, alpha: f64, h: f64) -> PyResult<f64> {
    pm::foreclosure::endogenous_spread_at(&params.inner, m_f, phi, kind(target)?, alpha, h).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, contract, alpha=0.0))]
fn max_rate(params: &PyModelParams, contract: &str, alpha: f64) -> PyResult<f64> {
    pm::max_rate(&params.inner, kind(contract)?, alpha).map_err(to_py)
}

/// `(balance, coupon)` of a level-payment loan at time `t`.
#[pyfunction]
fn frm_schedule(m: f64, b0: f64, maturity: f64, t: f64) -> PyResult<(f64, f64)> {
    let s = pm::frm_schedule(m, b0, maturity, t).map_err(to_py)?;
    Ok((s.balance, s.coupon))
}

/// Projected-SOR solution: `{"nodes", "values", "stop", "sweeps", "sup_error"}`, with the
/// sup-norm distance to the closed form over the grid.
#[pyfunction]
#[pyo3(signature = (params, contract, m, alpha=0.0, h_min=0.05, h_max=10.0, n_points=2001, relaxation=1.5))]
#[allow(clippy::too_many_arguments)]
fn psor_value<'py>(
    py: Python<'py>,
    params: &PyModelParams,
    contract: &str,
    m: f64,
    alpha: f64,
    h_min: f64,
    h_max: f64,
    n_points: usize,
    relaxation: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let sp = spec(contract, m, alpha)?;
    let p = params.inner;
    let cf = pm::perpetual_cashflows(&sp, &p).map_err(to_py)?;
    let closed = pm::solve(&p, &sp).map_err(to_py)?;
    let grid = GridSpec { relaxation, ..GridSpec::new(h_min, h_max, n_points) };
    let res = py.detach(|| oracle::psor_value(&p, &cf, &grid)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("sup_error", res.sup_error(h_min, h_max, |h| closed.value(h)))?;
    d.set_item("nodes", res.nodes)?;
    d.set_item("values", res.values)?;
    d.set_item("stop", res.stop)?;
    d.set_item("sweeps", res.sweeps)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (params, contract, m, h, lower=None, upper=None, alpha=0.0))]
#[allow(clippy::too_many_arguments)]
fn threshold_policy_value(
    params: &PyModelParams,
    contract: &str,
    m: f64,
    h: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    alpha: f64,
) -> PyResult<f64> {
    let cf = pm::perpetual_cashflows(&spec(contract, m, alpha)?, &params.inner).map_err(to_py)?;
    oracle::threshold_policy_value(&params.inner, &cf, lower, upper, h).map_err(to_py)
}

/// `(estimate, std_error, tail_bound)` for the policy that stops outside `(lower, upper)`.
#[pyfunction]
#[pyo3(signature = (params, contract, m, h, lower=None, upper=None, alpha=0.0, n_paths=20000, horizon=300.0, seed=2024))]
#[allow(clippy::too_many_arguments)]
fn mc_cashflow_value(
    py: Python<'_>,
    params: &PyModelParams,
    contract: &str,
    m: f64,
    h: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    alpha: f64,
    n_paths: usize,
    horizon: f64,
    seed: u64,
) -> PyResult<(f64, f64, f64)> {
    let p = params.inner;
    let cf = pm::perpetual_cashflows(&spec(contract, m, alpha)?, &p).map_err(to_py)?;
    let policy = Some(Policy::new(lower, upper));
    let est = py
        .detach(|| oracle::mc_cashflow_value(&p, &cf, policy, h, n_paths, horizon, seed))
        .map_err(to_py)?;
    Ok((est.estimate, est.std_error, est.tail_bound))
}

#[pymodule]
fn pymortgage(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MortgageError", m.py().get_type::<MortgageError>())?;
    m.add_class::<PyModelParams>()?;
    m.add_class::<PySolvedContract>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_no_prepay, m)?)?;
    m.add_function(wrap_pyfunction!(aprm_regime, m)?)?;
    m.add_function(wrap_pyfunction!(default_option_value, m)?)?;
    m.add_function(wrap_pyfunction!(prepay_option_value, m)?)?;
    m.add_function(wrap_pyfunction!(frm_value_with_foreclosure, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent_foreclosure_cost, m)?)?;
    m.add_function(wrap_pyfunction!(endogenous_spread, m)?)?;
    m.add_function(wrap_pyfunction!(max_rate, m)?)?;
    m.add_function(wrap_pyfunction!(frm_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(psor_value, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_policy_value, m)?)?;
    m.add_function(wrap_pyfunction!(mc_cashflow_value, m)?)?;
    Ok(())
}
