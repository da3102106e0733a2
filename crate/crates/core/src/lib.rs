//! Gauge-constrained optimal mass packing on dyadic grids, the matching
//! semi-cover duality, and the splitting outer functions built on top of it.
//!
//! The primal problem packs as much mass as possible under a pointwise roof
//! and per-cube budgets `h(volume)`; the dual problem covers the roof by
//! cubes at gauge cost. On a discretized dyadic grid the two sides meet
//! exactly: [`pack::pack`] produces the packed function together with its
//! bottleneck antichain, and [`cover::dyadic_min_cut`] computes the same
//! value by dynamic programming over the cube tree. The general-cube bound is
//! recovered up to the dimensional constant `3^n`, certified by
//! [`membership::check_membership`]. The [`circle`] module applies the
//! one-dimensional packer to build zero-mean block functions on arcs and the
//! outer functions whose powers split a circle weight from the disk.

pub mod circle;
pub mod cover;
pub mod demo;
pub mod dyadic;
pub mod error;
pub mod gauge;
pub mod membership;
pub mod pack;

pub use cover::{dyadic_min_cut, semicover_value, SemiCover};
pub use dyadic::{maximal_subset, CellField, DyadicCube};
pub use error::{Error, Result};
pub use gauge::{Gauge, GaugeFn, RegularityReport};
pub use membership::{
    check_membership, check_membership_with_slack, duality_ratio, dyadic_cover, CubeScope,
    GridCube, PrefixSumTable, ViolationReport,
};
pub use pack::{initial_cap, pack, sweep_level, MassFunction, PackResult, RoofGrid, ScalingStep};

/// The duality constant `3^n`: general-cube semi-covers exceed the packed
/// value by at most this factor.
pub fn duality_constant(dim: usize) -> f64 {
    3.0f64.powi(dim as i32)
}
