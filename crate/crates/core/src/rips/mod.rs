//! Strict-threshold Vietoris-Rips complexes, maximal cliques and the
//! inclusion maps between complexes across scales and nested samples.

mod build;
mod complex;

pub use build::{
    build_rips, inclusion_map, maximal_cliques, maximal_cliques_with_budget, CliqueList, RipsComplex,
    DEFAULT_CAP, DEFAULT_CLIQUE_BUDGET,
};
pub(crate) use build::is_sorted_subset;
pub(crate) use complex::for_each_face;
pub use complex::{Simplex, SimplicialComplex, SimplicialMap};
