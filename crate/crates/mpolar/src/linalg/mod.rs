//! Self-contained numerical kernels: factorizations, eigensolvers, FFT,
//! quadrature nodes and the power iteration used for operator norms.

pub mod dense;
pub mod fft;
pub mod gauss;
pub mod power;
#[cfg(feature = "cartesian")]
pub mod sparse;
pub mod symeig;
pub mod tridiag;

pub use power::{power_iteration_sigma, PowerOutcome};

use num_complex::Complex64;

pub type C64 = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn scale(v: &mut [C64], a: f64) {
    for z in v {
        *z *= a;
    }
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
