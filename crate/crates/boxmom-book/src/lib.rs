//! Keeps the book honest: each chapter of `book/src` is included as module
//! documentation here, so `cargo test` compiles and runs every Rust code
//! block the book shows. A snippet that stops working fails the build
//! instead of silently rotting in the prose.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/regions.md")]
pub mod regions {}

#[doc = include_str!("../../../book/src/spectra.md")]
pub mod spectra {}

#[doc = include_str!("../../../book/src/boundary-sums.md")]
pub mod boundary_sums {}

#[doc = include_str!("../../../book/src/evolution.md")]
pub mod evolution {}

#[doc = include_str!("../../../book/src/ehrenfest.md")]
pub mod ehrenfest {}

#[doc = include_str!("../../../book/src/uncertainty.md")]
pub mod uncertainty {}

#[doc = include_str!("../../../book/src/commutability.md")]
pub mod commutability {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
