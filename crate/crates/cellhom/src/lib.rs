//! Periodic homogenization of linearly elastic unit cells, with a symmetry
//! calculus connecting microstructure symmetries to material symmetries of
//! the macroscopic elasticity tensor.
//!
//! The library is organized around five concerns:
//!
//! * [`tensor`] — Mandel algebra of symmetric and elasticity tensors, the
//!   conjugation action of unimodular maps, symmetry residuals, and symmetry
//!   class detection.
//! * [`cell`] — periodic elastic structures: lattice, voxel grid, material
//!   table, geometry rasterization, worked example cells, and file formats.
//! * [`microsym`] — affine volume-preserving symmetries of a cell: checking,
//!   composing, applying, and detecting them.
//! * [`solver`] — matrix-free finite elements on the voxel grid solving the
//!   periodic cell problems.
//! * [`homog`] — assembly of the macroscopic elasticity tensor, classical
//!   bounds, macroscopic symmetry checks, and first-order transport.
//!
//! A command-line front end lives in the companion `cellhom-cli` crate. The
//! guide under `book/` walks through the concepts with runnable examples.

pub mod cell;
pub mod error;
pub mod homog;
pub mod microsym;
pub mod solver;
pub mod tensor;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
pub use tensor::{Dim, ElasticityTensor, SymTensor2, UnimodularMap};
