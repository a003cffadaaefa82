//! Closed-curve reconstruction from noisy samples: ordering by footpoint,
//! the polyline through one representative per footpoint, and its checks.

mod curve;
mod lemma;
mod polyline;

pub use curve::{build_curve_k, order_by_projection, CurveChecks, Ordering, ReconstructionResult};
pub use lemma::{check_intermediate_lemma, LemmaCheck, LEMMA_SAMPLES};
pub use polyline::{adjacent_segments_overlap, first_self_intersection, segments_intersect, Polyline};
