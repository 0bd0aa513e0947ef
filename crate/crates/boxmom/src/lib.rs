//! Momentum for a quantum particle strictly confined to a bounded region.
//!
//! The usual operator −i∇ is not self-adjoint on a bounded domain Ω, so it
//! does not qualify as an observable there. A self-adjoint momentum does
//! exist in the doubled Hilbert space L²(Ω) × ℂ², where states carry two
//! components (Ψ_e, Ψ_o) and the momentum acts as −iσ₁∇. Its self-adjoint
//! extensions are fixed by a purely imaginary parameter λ(x) on ∂Ω through
//! the boundary condition Ψ_o = λ Ψ_e, while the Hamiltonian is made
//! self-adjoint with real Robin parameters γ(x) through γΨ + n·∇Ψ = 0.
//!
//! This crate implements the measurement structure that follows: transverse
//! position is measured first, which restricts the problem to a line section
//! of Ω; on each section interval the momentum spectrum is a ladder
//! k_n = πn/L + θ with θ fixed by a unit-modulus Möbius ratio of the λ
//! values at the piercing points. On top of that sit Crank–Nicolson time
//! evolution under Robin boundary conditions, Ehrenfest-theorem residuals
//! including the quantum boundary force, commutability diagnostics for
//! momentum components in different directions, and the measurable form of
//! the Heisenberg uncertainty inequality.
//!
//! See the `book/` directory of the repository for a guided tour with
//! runnable examples, and the `boxmom` binary for the batch experiment
//! driver.

pub mod cli;
pub mod commutability;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod modes;
pub mod numerics;
pub mod observables;
pub mod state;

pub use error::{Error, Result};
pub use geometry::{Dir2, LineSection, Region, SectionInterval, Vec2};
pub use modes::{MomentumMode, SpectrumLadder};
pub use state::WaveState;

/// Library version, recorded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
