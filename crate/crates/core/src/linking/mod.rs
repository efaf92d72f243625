//! Linking numbers of disjoint closed polygons and the surface slope built on them.

pub mod crossings;
pub mod gauss;
pub mod slope;

pub use crossings::{linking_number_crossings, Direction, MAX_ATTEMPTS, TOL_PROJ};
pub use gauss::{gauss_raw, linking_number_gauss, ROUNDING_WINDOW};
pub use slope::{
    canonical_framing, slope_in_canonical_basis, surface_slope, surface_slope_with, CanonicalFraming, SlopeResult,
};
