#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Vietoris-Rips complexes, their Euclidean shadows and Z/2 homology towers.
//!
//! The crate builds strict-threshold Rips complexes of finite metric spaces,
//! represents the shadow (the union of the convex hulls of simplices) by the
//! nerve of its maximal cells, and compares homology across scales and
//! nested samples of model spaces. It also reconstructs closed curves from
//! noisy samples as PL simple closed curves inside the shadow.

pub mod error;
pub mod exact;
pub mod geom;
pub mod homology;
pub mod limits;
pub mod models;
pub mod oracle;
pub mod reconstruct;
pub mod rips;
pub mod shadow;

pub use error::{Error, Result};
