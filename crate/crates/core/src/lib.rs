//! Exact quasiparabolic Kazhdan–Lusztig theory for symmetric groups.
//!
//! The crate computes canonical bases of the Hecke modules `M` and `N` attached
//! to a quasiparabolic `S_n`-set (fixed-point-free involutions under
//! conjugation, or the regular set), the W-graphs they induce together with
//! their cells and molecules, the `a`-functions of those modules, and the
//! row/column Beissinger insertion algorithms that classify the molecules.

#![allow(clippy::needless_range_loop)]

pub mod afun;
pub mod canonical;
pub mod insertion;
pub mod kl;
pub mod laurent;
pub mod matrix;
pub mod module;
pub mod perm;
pub mod qpset;
pub mod verify;
pub mod wgraph;

pub use canonical::CanonicalData;
pub use kl::KlTable;
pub use laurent::LaurentPoly;
pub use module::ModuleKind;
pub use perm::Perm;
pub use qpset::QpSet;
