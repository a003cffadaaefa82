//! Direct and inverse systems of complexes built from samples of a model
//! space, with condition checks and stabilized-rank verdicts.

mod direct;
mod inverse;
mod projection;
mod spec;

pub use direct::run_direct_system;
pub use inverse::{run_inverse_system, run_metric_comparability};
pub use projection::{nearest_point_map, nu_beta, run_projection_check, vertex_level_f_map, FMapReport};
pub use spec::{
    dense_sample_size, density_condition, nested_params, ComparabilityDetails, ComparabilitySpec, DirectSystemSpec,
    InverseSystemSpec, LimitReport, MetricChoice, NamedTower, ObjectKind, ProjectionDetails, ProjectionSpec,
    SampleSummary, StageInfo, Verdict, DENSITY_SAFETY,
};
