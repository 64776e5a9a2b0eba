//! Dispersive kernels of the Klein-Gordon equation on real hyperbolic space,
//! and the exponent arithmetic of the associated Strichartz estimates.

pub mod acceptance;
pub mod error;
pub mod kernels;
pub mod oscillatory;
pub mod specfun;
pub mod strichartz;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use specfun::ModelParams;
