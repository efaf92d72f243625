//! Piecewise-linear geometry: curves, spatial graphs, tube surfaces and
//! curves drawn on them.

pub mod broadphase;
pub mod chart;
pub mod curve;
pub mod cut;
pub mod frame;
pub mod graph;
pub mod mesh;
pub mod planar;
pub mod predicates;
pub mod pushoff;
pub mod stabilize;
pub mod surface_curve;
pub mod torus_knot;
pub mod tube;
pub mod twist;

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;

/// Coincidence tolerance shared by every geometric predicate.
pub const TOL_GEOM: f64 = 1e-9;

pub use chart::{ChartKind, TubeChart};
pub use curve::PolyCurve3;
pub use cut::{cut_report, is_separating, CutReport};
pub use graph::SpatialGraph;
pub use mesh::{MeshReport, SurfaceMesh};
pub use pushoff::{surface_pushoff_curves, surface_pushoffs, PushoffPair, SurfacePushoffs};
pub use stabilize::{k_stabilize_geometric, k_stabilize_random, StabilizationSite};
pub use surface_curve::{curve_on_tube, edge_path, ChartCurveSpec, CurveOnSurface, CurveRepr};
pub use torus_knot::make_torus_knot_curve;
pub use tube::{make_tube_surface, TubeOptions, TubeSurface};
pub use twist::{dehn_twist_curve, TwistLocus};
