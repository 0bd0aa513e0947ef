//! Bounded regions Ω, their boundaries, extension-parameter fields on ∂Ω,
//! and line–region intersections.
//!
//! A region carries two kinds of boundary data: a real Robin field γ (with
//! Dirichlet segments flagged separately so no infinities appear) for the
//! Hamiltonian, and one purely imaginary field λ per measurement direction
//! for the momentum. λ values are stored as the real number α with λ = iα.

mod quadrature;
mod region;
mod section;
mod vec2;

pub use quadrature::{
    boundary_quadrature, partition_boundary, region_quadrature, AreaQuad, BoundaryNode,
    BoundaryPartition, TransverseRule,
};
pub use region::{Region, RegionKind, ScalarBoundaryField, Segment, SegmentGeom};
pub use section::{LineSection, SectionInterval};
pub use vec2::{Dir2, Vec2};

/// Piercing points with |n·l̂| below this are treated as tangent and excluded
/// from boundary conditions.
pub const TANGENCY_TOL: f64 = 1e-9;
