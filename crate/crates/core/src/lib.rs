//! Exact twisted simplicial cohomology and twisted Reidemeister torsion.
//!
//! Everything here works over the rationals with arbitrary precision and
//! needs only `alloc`: file formats, reports and the command line live in
//! the companion `twisted-torsion-cli` crate.
//!
//! Layout, bottom-up:
//!
//! * [`exactlin`]: rationals, dense and sparse matrices, kernels, images,
//!   determinants.
//! * [`detline`]: graded determinant lines, the Knudsen–Mumford scalar of a
//!   based complex and the determinant isomorphism of a Z/2-graded complex.
//! * [`spectral`]: the spectral sequence of a filtered Z/2-graded complex
//!   with explicit bases on every page, and the page-by-page determinant
//!   chain.
//! * [`simplicial`]: ordered simplicial complexes, edge-path presentations,
//!   representations, twisted cochains and cup products.
//! * [`forms`]: polynomial differential forms on simplexes, piecewise forms,
//!   Whitney forms and integration.
//! * [`dupont`]: truncated windows of the Dupont current complex and the
//!   stabilized twisted cohomology they compute.
//! * [`pipeline`]: the Mathai–Wu complex, Reidemeister torsion and its
//!   twisted versions, gauge maps and subdivision checks.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod detline;
pub mod dupont;
pub mod exactlin;
pub mod forms;
pub mod pipeline;
pub mod simplicial;
pub mod spectral;

pub use exactlin::{Matrix, Rational, SparseMatrix, Vector};
