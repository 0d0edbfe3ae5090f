//! Partial-transpose entanglement monotones.
//!
//! The crate computes the `M_p` / `N_p` family of spectral monotones on
//! Hermitian matrices, the negativity and the concurrence/tangle lower
//! bounds they induce on bipartite density matrices, a numerical convex-roof
//! upper estimate used to check those bounds, closed forms for isotropic
//! states, and a two-atom Tavis-Cummings simulator whose atom-field states
//! feed the bounds.

// `!(x >= 0.0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod majorization;
pub mod monotones;
pub mod roof;
pub mod states;
pub mod tcm;

pub use error::{Error, Result};
