use crate::error::{Error, Result};
use num_complex::Complex64;

pub const SERIES_CAP: usize = 10_000;

fn nonpositive_int(c: Complex64) -> bool {
    c.im == 0.0 && c.re <= 0.0 && c.re == c.re.round()
}

fn series(a: Complex64, b: Complex64, c: Complex64, z: Complex64, tol: f64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        let num = (a + kf) * (b + kf);
        if num.norm_sqr() == 0.0 {
            return Ok(sum);
        }
        let ratio = num / ((c + kf) * (kf + 1.0)) * z;
        term *= ratio;
        sum += term;
        let q = ratio.norm();
        // once the ratio settles below one the remainder is geometric
        if q < 1.0 && term.norm() * q / (1.0 - q) <= tol * sum.norm() {
            return Ok(sum);
        }
        if !sum.re.is_finite() || !sum.im.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence { what: "2F1 series", cap: SERIES_CAP })
}

/// Gauss hypergeometric function on the unit disc and on the negative real axis.
///
/// Negative real arguments go through Pfaff's transformation
/// `2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1))`.
pub fn gauss_2f1(a: Complex64, b: Complex64, c: Complex64, z: Complex64, tol: f64) -> Result<Complex64> {
    if nonpositive_int(c) {
        return Err(Error::Pole { func: "2F1", at: format!("c = {c}") });
    }
    if z.norm_sqr() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if z.im == 0.0 && z.re < 0.0 {
        let w = z / (z - 1.0);
        let pre = (Complex64::new(1.0, 0.0) - z).powc(-a);
        return Ok(pre * series(a, c - b, c, w, tol)?);
    }
    if z.norm() < 1.0 {
        return series(a, b, c, z, tol);
    }
    Err(Error::Domain(format!("2F1 argument {z} outside the supported regions")))
}
