//! Spherical functions `phi_lambda(r)` by two representations.
//!
//! Below the switch radius the Gauss series in `tanh^2 r` is used, except when
//! `|lambda| tanh r` is large and the alternating series would cancel; there the
//! Harish-Chandra expansion takes over. Above the switch radius the expansion is
//! always used, with a Cauchy integral in `s = i lambda` near `lambda = 0` where
//! the two halves `c(lambda) Phi_lambda` and `c(-lambda) Phi_{-lambda}` cancel.

use super::gamma::ln_gamma;
use super::hyp::SERIES_CAP;
use super::{ModelParams, DEFAULT_TOL};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const SWITCH_RADIUS: f64 = 1.0;
/// Cap on the number of expansion coefficients for `r >= SWITCH_RADIUS`.
pub const COEFF_CAP: usize = 512;
// larger cap for the short-radius, high-frequency corner
const COEFF_CAP_SMALL_R: usize = 1 << 17;
// largest |lambda| tanh r handed to the Gauss series
const SERIES_OSC_LIMIT: f64 = 8.0;
const CONTOUR_NODES: usize = 64;

/// Coefficients `Gamma_0 .. Gamma_K` of the expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    values: Vec<Complex64>,
}

impl CoeffTable {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// `Gamma_k = rho(rho-1) / (k (k - s)) * sum_{j<k} (k-j) Gamma_j` with `s = i lambda`.
pub fn gamma_coeffs(p: &ModelParams, lambda: Complex64, order: usize) -> Result<CoeffTable> {
    if lambda.im <= -1.0 + 1e-9 {
        return Err(Error::Domain(format!("lambda = {lambda} lies in the excluded region Im lambda <= -1")));
    }
    let s = Complex64::i() * lambda;
    let mut it = CoeffIter::new(p.rho(), s);
    let mut values = Vec::with_capacity(order + 1);
    values.push(Complex64::new(1.0, 0.0));
    for _ in 0..order {
        values.push(it.next_coeff()?);
    }
    Ok(CoeffTable { values })
}

struct CoeffIter {
    a: f64,
    s: Complex64,
    k: usize,
    s0: Complex64,
    s1: Complex64,
}

impl CoeffIter {
    fn new(rho: f64, s: Complex64) -> Self {
        Self { a: rho * (rho - 1.0), s, k: 0, s0: Complex64::new(1.0, 0.0), s1: Complex64::new(0.0, 0.0) }
    }

    // yields Gamma_1, Gamma_2, ...
    fn next_coeff(&mut self) -> Result<Complex64> {
        self.k += 1;
        let k = self.k as f64;
        let den = k * (k - self.s);
        if den.norm_sqr() == 0.0 {
            return Err(Error::Domain(format!("k - i lambda vanishes at k = {}", self.k)));
        }
        let g = (self.s0 * k - self.s1) * self.a / den;
        self.s0 += g;
        self.s1 += g * k;
        Ok(g)
    }
}

/// `sum_k Gamma_k(lambda) e^{-2kr}` in terms of `s = i lambda`, with the last term bound.
pub fn hc_sum(rho: f64, s: Complex64, r: f64, tol: f64, cap: usize) -> Result<(Complex64, f64)> {
    let mut sum = Complex64::new(1.0, 0.0);
    if rho * (rho - 1.0) == 0.0 {
        return Ok((sum, 0.0));
    }
    let x = (-2.0 * r).exp();
    let tail = x / (1.0 - x);
    let mut it = CoeffIter::new(rho, s);
    let mut xk = 1.0;
    let mut small = 0;
    for _ in 0..cap {
        let g = it.next_coeff()?;
        xk *= x;
        let term = g.norm() * xk;
        sum += g * xk;
        if term * tail < tol * sum.norm() {
            small += 1;
            if small == 2 {
                return Ok((sum, term));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence { what: "Harish-Chandra series", cap })
}

fn ln_two_sinh(r: f64) -> f64 {
    r + (-(-2.0 * r).exp()).ln_1p()
}

// c(lambda) Phi_lambda(r) written in s = i lambda
fn half_term(p: &ModelParams, s: Complex64, r: f64, tol: f64, cap: usize) -> Result<(Complex64, f64)> {
    let (sum, bound) = hc_sum(p.rho(), s, r, tol, cap)?;
    let lc = p.ln_c0() + ln_gamma(s)? - ln_gamma(s + p.rho())?;
    let pre = (lc - p.rho() * ln_two_sinh(r) + s * r).exp();
    Ok((pre * sum, pre.norm() * bound))
}

fn hc_pair(p: &ModelParams, lambda: Complex64, r: f64, tol: f64, cap: usize) -> Result<(Complex64, f64)> {
    let s = Complex64::i() * lambda;
    let (a, ea) = half_term(p, s, r, tol, cap)?;
    let (b, eb) = half_term(p, -s, r, tol, cap)?;
    Ok((a + b, ea + eb))
}

// trapezoid Cauchy integral of the even function P(s) = g(s) + g(-s) on |s| = R
fn hc_contour(p: &ModelParams, s0: Complex64, r: f64, radius: f64, tol: f64) -> Result<(Complex64, f64)> {
    let half = CONTOUR_NODES / 2;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for j in 0..half {
        // half-step offset keeps the nodes off the real axis
        let sj = Complex64::from_polar(radius, 2.0 * PI * (j as f64 + 0.5) / CONTOUR_NODES as f64);
        let (a, ea) = half_term(p, sj, r, tol, COEFF_CAP)?;
        let (b, eb) = half_term(p, -sj, r, tol, COEFF_CAP)?;
        let pj = a + b;
        // nodes j and j + N/2 carry the same P value
        acc += pj * (sj / (sj - s0) + sj / (sj + s0));
        err += ea + eb;
    }
    Ok((acc / CONTOUR_NODES as f64, 2.0 * err / CONTOUR_NODES as f64))
}

/// `phi_lambda(r)` from the Harish-Chandra expansion, with the series truncation bound.
///
/// Requires `r >= SWITCH_RADIUS` and real nonzero `lambda`; no small-`lambda` rescue is applied.
pub fn phi_hc(p: &ModelParams, lambda: f64, r: f64, tol: f64) -> Result<(Complex64, f64)> {
    if r < SWITCH_RADIUS {
        return Err(Error::Domain(format!("r = {r} below the switch radius {SWITCH_RADIUS}")));
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda = {lambda} must be real and nonzero")));
    }
    hc_pair(p, Complex64::new(lambda, 0.0), r, tol, COEFF_CAP)
}

// Gauss series for phi with the triangle-inequality size of its largest term
fn phi_series(p: &ModelParams, lambda: Complex64, r: f64, tol: f64) -> Result<(Complex64, f64)> {
    let i = Complex64::i();
    let a = i * lambda * 0.5 + p.rho() * 0.5;
    let cb = i * lambda * 0.5 + (p.n() as f64 + 1.0) / 4.0;
    let c = p.n() as f64 / 2.0;
    let w = r.tanh().powi(2);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut big = 1.0f64;
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        let ratio = (a + kf) * (cb + kf) / ((c + kf) * (kf + 1.0)) * w;
        term *= ratio;
        sum += term;
        big = big.max(term.norm());
        let q = ratio.norm();
        if q < 1.0 && term.norm() * q / (1.0 - q) <= tol * sum.norm() {
            let pre = (-2.0 * a * r.cosh().ln()).exp();
            return Ok((pre * sum, pre.norm() * big * f64::EPSILON * (k as f64 + 1.0)));
        }
    }
    Err(Error::NonConvergence { what: "2F1 series", cap: SERIES_CAP })
}

/// `phi_lambda(r)` for real `lambda` or `|Im lambda| < rho`, default tolerance.
pub fn spherical_phi(p: &ModelParams, lambda: Complex64, r: f64) -> Result<Complex64> {
    spherical_phi_tol(p, lambda, r, DEFAULT_TOL)
}

pub fn spherical_phi_tol(p: &ModelParams, lambda: Complex64, r: f64, tol: f64) -> Result<Complex64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius r = {r} must be finite and nonnegative")));
    }
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::Domain("non-finite spectral parameter".into()));
    }
    if r == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // phi is even in lambda: evaluate in the right half-plane, and real on the real axis
    let lambda = if lambda.re < 0.0 || (lambda.re == 0.0 && lambda.im < 0.0) { -lambda } else { lambda };
    let v = phi_routed(p, lambda, r, tol)?;
    Ok(if lambda.im == 0.0 { Complex64::new(v.re, 0.0) } else { v })
}

fn phi_routed(p: &ModelParams, lambda: Complex64, r: f64, tol: f64) -> Result<Complex64> {
    if r >= SWITCH_RADIUS {
        let radius = 0.5f64.min(1.0 / r);
        if lambda.norm() < radius / 4.0 {
            return Ok(hc_contour(p, Complex64::i() * lambda, r, radius, tol)?.0);
        }
        return Ok(hc_pair(p, lambda, r, tol, COEFF_CAP)?.0);
    }
    let osc = lambda.norm() * r.tanh();
    if osc <= SERIES_OSC_LIMIT {
        return Ok(phi_series(p, lambda, r, tol)?.0);
    }
    // large |lambda| r: no cancellation between the two halves, but slow in e^{-2r}
    match hc_pair(p, lambda, r, tol, COEFF_CAP_SMALL_R) {
        Ok((v, _)) => Ok(v),
        Err(_) => {
            let (v, rounding) = phi_series(p, lambda, r, tol)?;
            if rounding > 1e3 * tol * v.norm().max(1e-300) {
                return Err(Error::Accuracy(format!(
                    "phi at lambda = {lambda}, r = {r}: both representations fail"
                )));
            }
            Ok(v)
        }
    }
}

/// `phi_0(r)`, real valued.
pub fn phi_zero(p: &ModelParams, r: f64) -> Result<f64> {
    Ok(spherical_phi(p, Complex64::new(0.0, 0.0), r)?.re)
}

/// Comparison envelope `(1+r) e^{-rho r}` for `phi_0`.
pub fn envelope(p: &ModelParams, r: f64) -> f64 {
    (1.0 + r) * (-p.rho() * r).exp()
}

/// Closed form on three-dimensional hyperbolic space: `sin(lambda r)/(lambda sinh r)`.
pub fn phi_h3(lambda: Complex64, r: f64) -> Complex64 {
    if r == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let sr = r.sinh();
    if lambda.norm() * r < 1e-4 {
        let x2 = (lambda * r) * (lambda * r);
        return (Complex64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0) * (r / sr);
    }
    (lambda * r).sin() / (lambda * sr)
}
