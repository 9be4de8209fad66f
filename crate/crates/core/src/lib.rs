//! Rewriting codes for flash-like storage, where cell levels may only
//! increase between block erasures.
//!
//! The crate provides:
//!
//! - [`cell`]: the monotone cell-state abstraction ([`CellState`]).
//! - [`graph`]: data graphs describing which rewrites are permitted
//!   ([`DataGraph`]), with generators for complete graphs, generalized
//!   hypercubes, de Bruijn graphs, and bidirected trees.
//! - [`registers`]: rewriting codes for complete data graphs — the modular
//!   code, the base-representation code, and the split code.
//! - [`trajectory`]: the trajectory code for bounded-out-degree data graphs
//!   (anchor register, edge registers, and a write counter).
//! - [`parametric`]: parametric weight-indexed codes and the randomized
//!   robust code.
//! - [`bounds`]: closed-form evaluators for the guarantees and upper bounds
//!   the other modules are tested against.
//! - [`harness`]: sequence generation, rewrite-count measurement, exhaustive
//!   adversaries, a brute-force optimal-code oracle, and Monte Carlo
//!   estimation.

pub mod bounds;
pub mod cell;
pub mod code;
pub mod graph;
pub mod harness;
pub mod parametric;
pub mod registers;
pub mod trajectory;

pub use cell::CellState;
pub use code::{CodeError, CodeSpec, RewritingCode};
pub use graph::{DataGraph, GraphError, GraphSpec, RewriteSequence};

/// Version string embedded in every report for provenance.
pub const VERSION: &str = concat!("flashcodes/", env!("CARGO_PKG_VERSION"));
