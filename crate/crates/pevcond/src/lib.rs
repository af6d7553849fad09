//! Real polynomial eigenvalues of matrix polynomials, their relative
//! condition numbers, and Monte Carlo verification of the exact
//! expected-conditioning formulas for Gaussian, GOE and general-subspace
//! random ensembles.

pub mod acceptance;
pub mod closedform;
pub mod conditioning;
pub mod ensembles;
pub mod error;
pub mod experiment;
pub mod jsonfmt;
pub mod linalg;
pub mod matpoly;
pub mod pevsolver;
pub(crate) mod randutil;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
