use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom;
use crate::models::{Model, ModelSpec, Point, PointCloud};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingScheme {
    /// Evenly spaced in arc length, starting at parameter 0.
    #[default]
    Stratified,
    /// Independent uniform arc-length positions.
    UniformArc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub model: ModelSpec,
    pub n: usize,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scheme: SamplingScheme,
}

/// A sampled cloud together with the arc parameters of the footpoints the
/// samples were generated from.
#[derive(Clone, Debug)]
pub struct Sample {
    pub cloud: PointCloud,
    pub params: Vec<f64>,
}

pub fn sample(spec: &SamplerSpec) -> Result<PointCloud> {
    let model = Model::new(spec.model.clone())?;
    Ok(sample_model(&model, spec.n, spec.tau, spec.seed, spec.scheme)?.cloud)
}

pub fn sample_model(
    model: &Model,
    n: usize,
    tau: f64,
    seed: u64,
    scheme: SamplingScheme,
) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    let len = model.length();
    let params: Vec<f64> = match scheme {
        SamplingScheme::Stratified => (0..n).map(|k| len * k as f64 / n as f64).collect(),
        SamplingScheme::UniformArc => {
            // Positions use their own stream so noise draws do not shift them.
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            (0..n).map(|_| rng.gen_range(0.0..len)).collect()
        }
    };
    sample_at(model, &params, tau, seed)
}

/// Samples with footpoints at the given arc parameters, displaced by noise
/// drawn uniformly from the normal disk of radius `tau`.
pub fn sample_at(model: &Model, params: &[f64], tau: f64, seed: u64) -> Result<Sample> {
    if params.is_empty() {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidInput(format!("noise amplitude must be finite and nonnegative, got {tau}")));
    }
    if tau > 0.0 {
        let limit = model.constants()?.tube_radius;
        if tau >= limit {
            return Err(Error::TubeTooWide { tau, limit });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(params.len());
    for &s in params {
        let mut p = model.point_at(s);
        if tau > 0.0 {
            let normals = geom::normal_basis(&model.tangent_at(s));
            let offset = uniform_ball(&mut rng, normals.len());
            for (c, b) in offset.iter().zip(&normals) {
                for (pi, bi) in p.iter_mut().zip(b) {
                    *pi += tau * c * bi;
                }
            }
        }
        points.push(Point::new(p));
    }
    Ok(Sample { cloud: PointCloud::new(points)?, params: params.to_vec() })
}

fn uniform_ball<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if geom::norm(&v) <= 1.0 {
            return v;
        }
    }
}
