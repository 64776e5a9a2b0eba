use super::gamma::ln_gamma;
use super::ModelParams;
use crate::error::{Error, Result};
use num_complex::Complex64;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn ln_ratio(p: &ModelParams) -> f64 {
    p.ln_c0()
}

/// Harish-Chandra c-function `Gamma(2rho)/Gamma(rho) * Gamma(i lambda)/Gamma(i lambda + rho)`.
pub fn c_function(p: &ModelParams, lambda: Complex64) -> Result<Complex64> {
    let s = Complex64::i() * lambda;
    if is_pole(s) {
        return Err(Error::Pole { func: "c-function", at: format!("lambda = {lambda}") });
    }
    if is_pole(s + p.rho()) {
        return Err(Error::Pole { func: "c-function (zero)", at: format!("lambda = {lambda}") });
    }
    Ok((ln_ratio(p) + ln_gamma(s)? - ln_gamma(s + p.rho())?).exp())
}

/// `1/c(lambda)`, continued by zero across the poles of `Gamma(i lambda)`.
pub fn c_inverse(p: &ModelParams, lambda: Complex64) -> Complex64 {
    let s = Complex64::i() * lambda;
    if is_pole(s) {
        return Complex64::new(0.0, 0.0);
    }
    match (ln_gamma(s + p.rho()), ln_gamma(s)) {
        (Ok(a), Ok(b)) => (a - b - ln_ratio(p)).exp(),
        _ => Complex64::new(f64::NAN, f64::NAN),
    }
}

/// `|c(lambda)|^{-2}` for real `lambda`.
pub fn plancherel_density(p: &ModelParams, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    c_inverse(p, Complex64::new(lambda, 0.0)).norm_sqr()
}

/// `1/(c(lambda) c(-lambda))`, the analytic continuation of the Plancherel density.
pub fn plancherel_analytic(p: &ModelParams, lambda: Complex64) -> Complex64 {
    c_inverse(p, lambda) * c_inverse(p, -lambda)
}
