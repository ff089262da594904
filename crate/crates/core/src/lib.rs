//! Fuchsian groups, Dirichlet fundamental domains and numerical
//! Carleson-measure verification for group-compatible Beltrami coefficients.

pub mod beltrami;
pub mod denjoy;
pub mod error;
pub mod fundomain;
pub mod geometry;
pub mod group;
pub mod moebius;
pub mod quadrature;

pub use error::{Error, Result};
