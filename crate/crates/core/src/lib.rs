//! Pseudo H-type nilmanifolds: admissible Clifford modules, their two-step
//! nilpotent Lie algebras, and heat traces of the sub-Laplacian on the
//! compact quotients by the standard lattice.

pub mod algebra;
pub mod asymptotics;
pub mod clifford;
mod error;
pub mod exact;
pub mod heat_trace;
pub mod isospectral;
pub mod lattice;
pub mod numeric;

pub use error::{Error, Result};
