//! Ground-truth model spaces, finite metrics, samplers and the regularity
//! constants that make scale hypotheses checkable.

mod cloud;
mod conditions;
mod metric;
mod model;
mod sample;

pub use cloud::{Point, PointCloud};
pub use conditions::{check_scale_conditions, Claim, Condition, ConditionReport};
pub use metric::{
    directed_hausdorff, epsilon_path_metric, euclidean_metric, hausdorff_distance, MetricMatrix,
};
pub use model::{ConstantOverrides, Model, ModelConstants, ModelSpace, ModelSpec, Projection};
pub use sample::{sample, sample_at, sample_model, Sample, SamplerSpec, SamplingScheme};
