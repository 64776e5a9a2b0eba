//! Complex log-gamma by upward recurrence and the Stirling series.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

// B_{2k} / (2k (2k-1)) for k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn stirling(z: Complex64) -> Complex64 {
    let zi = z.inv();
    let zi2 = zi * zi;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = zi;
    for c in STIRLING {
        corr += p * c;
        p *= zi2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + corr
}

/// Log-gamma continued from the positive real axis, branch cut on the negative reals.
///
/// For `Re z < -30` the reflection formula is used and the imaginary part is only
/// defined modulo `2 pi`; exponentials of the result are unaffected.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if is_pole(z) {
        return Err(Error::Pole { func: "gamma", at: format!("{}", z.re) });
    }
    if z.re < -30.0 {
        let s = (z * PI).sin();
        let ln_pi = PI.ln();
        return Ok(Complex64::new(ln_pi, 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z)?);
    }
    // one logarithm of the product for the modulus, summed arguments for the phase
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut arg = 0.0;
    while w.re < 0.0 || w.norm_sqr() < 144.0 {
        prod *= w;
        arg += w.arg();
        w += 1.0;
    }
    Ok(stirling(w) - Complex64::new(prod.norm().ln(), arg))
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(z)?.exp())
}

/// `1/Gamma(z)`, entire, zero at the poles of Gamma.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    match ln_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// `Gamma(a)/Gamma(b)` as one exponential, avoiding overflow.
pub fn gamma_ratio(a: Complex64, b: Complex64) -> Result<Complex64> {
    Ok((ln_gamma(a)? - ln_gamma(b)?).exp())
}

pub fn ln_gamma_real(x: f64) -> Result<f64> {
    Ok(ln_gamma(Complex64::new(x, 0.0))?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let one = ln_gamma(Complex64::new(1.0, 0.0)).unwrap();
        assert!(one.norm() < 1e-14);
        let half = ln_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((half.re - PI.sqrt().ln()).abs() < 1e-14);
        let g5 = gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((g5.re - 24.0).abs() < 1e-12);
    }

    #[test]
    fn poles() {
        assert!(ln_gamma(Complex64::new(0.0, 0.0)).is_err());
        assert!(ln_gamma(Complex64::new(-3.0, 0.0)).is_err());
        assert_eq!(rgamma(Complex64::new(-1.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn far_left_uses_reflection() {
        let z = Complex64::new(-40.5, 0.0);
        let g = gamma(z).unwrap();
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let g1 = gamma(Complex64::new(1.0, 0.0) - z).unwrap();
        let rhs = PI / (z * PI).sin();
        assert!(((g * g1) / rhs - 1.0).norm() < 1e-12);
    }
}
