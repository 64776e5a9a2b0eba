//! Python bindings: spherical functions, kernels and exponent arithmetic.
//! Errors surface as `ValueError`.

use hyperkg::kernels::{kernel_w0_with, kernel_w_with, kernel_winf_with, KernelOptions, SigmaSpec};
use hyperkg::strichartz::{self, Branch};
use hyperkg::{specfun, Complex64, ModelParams};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: hyperkg::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn params(n: u32, kappa: f64, kappa_tilde: Option<f64>) -> PyResult<ModelParams> {
    let rho = (n as f64 - 1.0) / 2.0;
    ModelParams::new(n, kappa, kappa_tilde.unwrap_or(rho + 1.0)).map_err(err)
}

/// Spherical function `phi_lambda(r)` on H^n.
#[pyfunction]
#[pyo3(signature = (n, lam, r, kappa = 1.0, kappa_tilde = None))]
fn spherical_phi(n: u32, lam: Complex64, r: f64, kappa: f64, kappa_tilde: Option<f64>) -> PyResult<Complex64> {
    specfun::spherical_phi(&params(n, kappa, kappa_tilde)?, lam, r).map_err(err)
}

#[pyfunction]
fn phi_zero(n: u32, r: f64) -> PyResult<f64> {
    specfun::phi_zero(&params(n, 1.0, None)?, r).map_err(err)
}

/// Kernel value and error estimate; `part` is "w0", "winf" or "sum".
#[pyfunction]
#[pyo3(signature = (n, part, sigma, t, r, kappa = 1.0, kappa_tilde = None, tol = 1e-10))]
#[allow(clippy::too_many_arguments)]
fn kernel(n: u32, part: &str, sigma: Complex64, t: f64, r: f64, kappa: f64, kappa_tilde: Option<f64>, tol: f64) -> PyResult<(Complex64, f64)> {
    let p = params(n, kappa, kappa_tilde)?;
    let sig = SigmaSpec::split(Complex64::new(0.0, 0.0), sigma, false);
    let opts = KernelOptions { tol, ..KernelOptions::default() };
    let s = match part {
        "w0" => kernel_w0_with(&p, &sig, t, r, &opts),
        "winf" => kernel_winf_with(&p, &sig, t, r, &opts),
        "sum" => kernel_w_with(&p, &sig, t, r, &opts),
        other => return Err(PyValueError::new_err(format!("unknown kernel part {other:?}"))),
    }
    .map_err(err)?;
    Ok((s.value, s.err))
}

#[pyfunction]
fn critical_powers<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let c = strichartz::critical_powers(n).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n", c.n)?;
    d.set_item("gamma0", c.gamma0)?;
    d.set_item("gamma1", c.gamma1)?;
    d.set_item("gamma2", c.gamma2)?;
    d.set_item("gamma_conf", c.gamma_conf)?;
    d.set_item("gamma3", c.gamma3)?;
    d.set_item("gamma4", c.gamma4)?;
    Ok(d)
}

/// Minimal regularity report; with `resolution` the grid oracle is run as well.
#[pyfunction]
#[pyo3(signature = (n, gamma, resolution = None))]
fn min_regularity<'py>(py: Python<'py>, n: usize, gamma: f64, resolution: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let r = match resolution {
        Some(h) => strichartz::min_regularity_checked(n, gamma, h),
        None => strichartz::min_regularity(n, gamma),
    }
    .map_err(err)?;
    let branch = match r.branch {
        Branch::NearOne => "near_one",
        Branch::Sigma1 => "sigma1",
        Branch::Sigma2 => "sigma2",
        Branch::Sigma3 => "sigma3",
    };
    let w = r.witness;
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("gamma", r.gamma)?;
    d.set_item("branch", branch)?;
    d.set_item("sigma_min", r.sigma_min)?;
    d.set_item("infimum_open", r.infimum_open)?;
    d.set_item("witness", (w.inv_p, w.inv_q, w.inv_pt, w.inv_qt))?;
    d.set_item("oracle_sigma", r.oracle_sigma)?;
    d.set_item("oracle_gap", r.oracle_gap)?;
    Ok(d)
}

#[pyfunction]
fn is_admissible(n: usize, inv_p: f64, inv_q: f64) -> bool {
    strichartz::is_admissible(n, inv_p, inv_q)
}

#[pyfunction]
fn sigma_pq(n: usize, inv_p: f64, inv_q: f64) -> PyResult<f64> {
    strichartz::sigma_pq(n, inv_p, inv_q).map_err(err)
}

#[pyfunction]
fn stationary_point(kappa: f64, x: f64, t: f64) -> PyResult<f64> {
    hyperkg::oscillatory::stationary_point(kappa, x, t).map_err(err)
}

#[pymodule]
fn hyperkg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(spherical_phi, m)?)?;
    m.add_function(wrap_pyfunction!(phi_zero, m)?)?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(critical_powers, m)?)?;
    m.add_function(wrap_pyfunction!(min_regularity, m)?)?;
    m.add_function(wrap_pyfunction!(is_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_pq, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_point, m)?)?;
    Ok(())
}
