//! The shadow of a Rips complex: the union of the closed convex hulls of its
//! simplices in the ambient Euclidean space.
//!
//! Its homotopy type is represented by the nerve of the cover by hulls of
//! maximal cliques. All intersection and membership decisions use exact
//! rational arithmetic. A 2-D raster computation provides an independent
//! check of the nerve's Betti numbers.

mod cells;
mod project;
mod raster;

pub use cells::{
    build_nerve, clique_containment_map, hulls_intersect, shadow_contains, ConvexCellSystem, NerveComplex,
};
pub use project::{project_point, BarycentricPoint};
pub use raster::{rasterize, raster_betti_2d, raster_betti_2d_detailed, RasterGrid, RasterResult, MAX_RESOLUTION};
