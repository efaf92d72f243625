//! Symbolic calculus of K-splitting records.

pub mod components;
pub mod moves;
pub mod record;
pub mod reduction;
pub mod trace;

pub use components::{
    amalgamate_all, amalgamate_pair, BoundaryLabel, ComponentKind, ComponentSplitting, GeneralizedSplitting, Gluing,
};
pub use moves::{
    connect_sum, dehn_twist, is_k_stabilized, k_stabilize, k_stabilize_with_site, realize_slope,
    realize_slope_geometric, DiskWitness, Realization, Side, SlopeRealizer, TWIST_SIGN,
};
pub use record::{GeometricRef, KSplittingRecord, KnotInfo, Manifold, Provenance};
pub use reduction::{
    census, decompose_three, decompose_three_splitting, peel_collar, second_stabilize, weak_reduce,
    weak_reduction_witness, WeakReductionWitness,
};
pub use trace::{apply_moves, common_stabilization, replay, Move, StabilizationTrace};
