//! Special functions on real hyperbolic space.

mod cfunc;
mod gamma;
mod hyp;
mod spherical;

pub use cfunc::{c_function, c_inverse, plancherel_analytic, plancherel_density};
pub use gamma::{gamma, gamma_ratio, ln_gamma, ln_gamma_real, rgamma};
pub use hyp::{gauss_2f1, SERIES_CAP};
pub use spherical::{
    envelope, gamma_coeffs, hc_sum, phi_h3, phi_hc, phi_zero, spherical_phi, spherical_phi_tol, CoeffTable,
    COEFF_CAP, SWITCH_RADIUS,
};

use crate::error::{Error, Result};
use serde::Serialize;

/// Relative tolerance used by the series when none is given.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Dimension and Klein-Gordon shifts. Construct through [`ModelParams::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    n: u32,
    rho: f64,
    kappa: f64,
    kappa_tilde: f64,
    #[serde(skip)]
    ln_c0: f64,
}

impl ModelParams {
    pub fn new(n: u32, kappa: f64, kappa_tilde: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParam(format!("dimension n = {n} must be at least 2")));
        }
        let rho = (n as f64 - 1.0) / 2.0;
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParam(format!("kappa = {kappa} must be positive")));
        }
        if !(kappa_tilde > rho) || !kappa_tilde.is_finite() {
            return Err(Error::InvalidParam(format!("kappa_tilde = {kappa_tilde} must exceed rho = {rho}")));
        }
        let ln_c0 = ln_gamma_real(2.0 * rho)? - ln_gamma_real(rho)?;
        Ok(Self { n, rho, kappa, kappa_tilde, ln_c0 })
    }

    /// `kappa = 1`, `kappa_tilde = rho + 1`.
    pub fn with_defaults(n: u32) -> Result<Self> {
        let rho = (n.max(2) as f64 - 1.0) / 2.0;
        Self::new(n, 1.0, rho + 1.0)
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn kappa_tilde(&self) -> f64 {
        self.kappa_tilde
    }
    /// `ln(Gamma(2 rho)/Gamma(rho))`
    pub(crate) fn ln_c0(&self) -> f64 {
        self.ln_c0
    }
}
