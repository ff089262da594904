//! Quadrature for Carleson box integrals, cusp areas and the orbit
//! decomposition of cap integrals.

pub mod boxes;
pub mod cusp;
pub mod gk;
pub mod norm;
pub mod orbit;

pub use boxes::{
    box_integral, restricted_integral, CarlesonQuery, IntegralResult, Restriction, Weight,
    DIVERGENCE_THRESHOLD,
};
pub use cusp::{
    cusp_area_bound, cusp_area_bound_at, cusp_sector_integral, inner_integral, inner_integral_limit,
};
pub use norm::{carleson_norm_estimate, dyadic_radii, CarlesonEntry, CarlesonReport};
pub use orbit::{orbit_decomposition_check, OrbitDecomposition};
