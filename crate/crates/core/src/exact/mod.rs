//! Exact integer algebra: polynomials, determinants, ranks, characteristic
//! polynomials and integer kernels.

pub mod bareiss;
pub mod kernel;
pub mod modular;
mod poly;

pub use poly::IntPoly;
