use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::TowerReport;
use crate::models::{
    epsilon_path_metric, euclidean_metric, Claim, Condition, ConditionReport, MetricMatrix, Model, ModelSpec,
    PointCloud, SamplingScheme,
};
use crate::rips::{build_rips, maximal_cliques, SimplicialComplex, DEFAULT_CAP};
use crate::shadow::{build_nerve, ConvexCellSystem, NerveComplex};

/// Fraction of the density margin used when choosing a sample size, so the
/// measured covering radius stays strictly inside the requirement.
pub const DENSITY_SAFETY: f64 = 0.8;

fn default_cap() -> usize {
    DEFAULT_CAP
}

fn default_dim() -> usize {
    1
}

/// Metric placed on a sample before building Rips complexes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricChoice {
    #[default]
    Euclidean,
    EpsilonPath { epsilon: f64 },
}

impl MetricChoice {
    pub fn build(&self, cloud: &PointCloud) -> Result<MetricMatrix> {
        match self {
            MetricChoice::Euclidean => Ok(euclidean_metric(cloud)),
            MetricChoice::EpsilonPath { epsilon } => epsilon_path_metric(cloud, *epsilon),
        }
    }
}

/// Complex tracked at each stage of an inverse system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectKind {
    Rips,
    #[default]
    ShadowNerve,
}

/// Nested samples at one fixed scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectSystemSpec {
    pub model: ModelSpec,
    pub beta: f64,
    /// Strictly increasing sample sizes; each sample is a prefix of the next.
    pub ns: Vec<usize>,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub metric: MetricChoice,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

/// Decreasing scales over one common sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseSystemSpec {
    pub model: ModelSpec,
    /// Strictly decreasing scales.
    pub betas: Vec<f64>,
    /// Noise bound shared by all stages (ignored when `taus` is given).
    #[serde(default)]
    pub tau: f64,
    /// Noise bound per stage, paired with `betas` and nonincreasing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taus: Option<Vec<f64>>,
    #[serde(default)]
    pub object: ObjectKind,
    #[serde(default)]
    pub metric: MetricChoice,
    /// Sample size; by default the smallest size meeting the density rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub scheme: SamplingScheme,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

impl InverseSystemSpec {
    /// Noise bound at each stage.
    pub fn stage_taus(&self) -> Vec<f64> {
        match &self.taus {
            Some(t) => t.clone(),
            None => vec![self.tau; self.betas.len()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_grid(&self.betas)?;
        let taus = self.stage_taus();
        if taus.len() != self.betas.len() {
            return Err(Error::InvalidInput(format!(
                "{} noise levels given for {} scales",
                taus.len(),
                self.betas.len()
            )));
        }
        if taus.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::InvalidInput("noise levels must be finite and nonnegative".into()));
        }
        if taus.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidInput("paired noise levels must not increase along the grid".into()));
        }
        validate_dims(self.dim, self.cap)
    }
}

/// Two metrics on one noisy sample, compared across decreasing scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparabilitySpec {
    pub model: ModelSpec,
    pub betas: Vec<f64>,
    pub tau: f64,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub scheme: SamplingScheme,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
    /// Pairs closer than this are checked for metric comparability
    /// (default `2 epsilon`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<f64>,
    #[serde(default = "default_kappa1")]
    pub kappa1: f64,
    #[serde(default = "default_kappa2")]
    pub kappa2: f64,
}

fn default_kappa1() -> f64 {
    1.5
}

fn default_kappa2() -> f64 {
    1.05
}

/// The shadow projection of one Rips complex compared on homology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSpec {
    pub model: ModelSpec,
    pub beta: f64,
    pub n: usize,
    #[serde(default)]
    pub scheme: SamplingScheme,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

pub(crate) fn validate_grid(betas: &[f64]) -> Result<()> {
    if betas.len() < 2 {
        return Err(Error::InvalidInput("a scale grid needs at least two values".into()));
    }
    if betas.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
        return Err(Error::InvalidInput("scales must be positive and finite".into()));
    }
    if betas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(format!("scale grid must be strictly decreasing, got {betas:?}")));
    }
    Ok(())
}

pub(crate) fn validate_dims(dim: usize, cap: usize) -> Result<()> {
    if dim >= cap {
        return Err(Error::InvalidInput(format!(
            "homology dimension {dim} needs a dimension cap above it, got cap {cap}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// All hypotheses hold and the stabilized ranks match the target.
    Consistent,
    /// All hypotheses hold but the ranks do not match or did not settle.
    Inconsistent,
    /// Some hypothesis fails; no claim is made.
    OutOfRegime,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageInfo {
    pub stage: usize,
    pub beta: f64,
    pub tau: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    /// Noise amplitude actually used to draw the sample.
    pub tau: f64,
    pub seed: u64,
    pub enumeration: String,
    /// Measured covering radius of the footpoints on the model.
    pub zeta: f64,
    pub metric: MetricChoice,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedTower {
    pub name: String,
    pub report: TowerReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDetails {
    pub rips_betti: Vec<usize>,
    pub nerve_betti: Vec<usize>,
    pub subdivision_betti: Vec<usize>,
    /// Ranks of the map induced by the shadow projection.
    pub projection_ranks: Vec<usize>,
    /// Ranks of the last-vertex map, which must be isomorphisms.
    pub last_vertex_ranks: Vec<usize>,
    pub maximal_cliques: usize,
    pub subdivision_simplices: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityDetails {
    pub epsilon: f64,
    pub delta0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Largest `d_eps / |p - q|` over checked pairs.
    pub kappa1_needed: f64,
    /// Largest `|p - q| / d_eps` over checked pairs.
    pub kappa2_needed: f64,
    pub checked_pairs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<[usize; 2]>,
    pub all_below_epsilon: bool,
    /// Per stage: Euclidean and path-metric complexes have identical simplex sets.
    pub stagewise_identical: Vec<bool>,
    /// Per stage: `R^eps_b` in `R^E_(k2 b)` in `R^eps_(k1 k2 b)`.
    pub interleaved: Vec<bool>,
}

/// Outcome of a limit experiment, with every hypothesis evaluation embedded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub experiment: String,
    pub spec: serde_json::Value,
    pub claim: Claim,
    pub model_betti: Vec<usize>,
    pub target_betti: Vec<usize>,
    pub target_source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleSummary>,
    pub stages: Vec<StageInfo>,
    pub conditions: Vec<ConditionReport>,
    pub towers: Vec<NamedTower>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionDetails>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparability: Option<ComparabilityDetails>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
    pub notes: Vec<String>,
}

impl LimitReport {
    /// Stabilized rank of the first tower in dimension `m`.
    pub fn stabilized_rank(&self, m: usize) -> Option<usize> {
        self.towers.first().and_then(|t| t.report.plateau_rank(m))
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.conditions.iter().all(ConditionReport::all_hold)
    }
}

/// Smallest sample size whose stratified footpoints are `beta/2 - tau`
/// dense with the safety margin, or `None` when no density can work.
pub fn dense_sample_size(length: f64, beta_min: f64, tau: f64) -> Option<usize> {
    let margin = beta_min / 2.0 - tau;
    if !(margin > 0.0) {
        return None;
    }
    Some(((length / (2.0 * DENSITY_SAFETY * margin)).ceil() as usize).max(3))
}

/// The density hypothesis for a sample with covering radius `zeta`.
pub fn density_condition(beta: f64, tau: f64, zeta: f64) -> Condition {
    if tau > 0.0 {
        Condition::less("sample-density", "tau + zeta < beta / 2", tau + zeta, beta / 2.0)
    } else {
        Condition::less("sample-density", "zeta < beta / 2", zeta, beta / 2.0)
    }
    .with_note("zeta is the measured covering radius of the sample footpoints")
}

/// Hypotheses of `claim` at `(beta, tau)` plus the density requirement.
pub(crate) fn stage_conditions(model: &Model, claim: Claim, beta: f64, tau: f64, zeta: f64) -> Result<ConditionReport> {
    let mut report = crate::models::check_scale_conditions(model, beta, tau, Some(zeta))?.for_claim(claim);
    report.push(density_condition(beta, tau, zeta));
    Ok(report)
}

/// Arc parameters enumerated so that the first `n_i` form a well spread
/// sample for every `n_i` in the increasing sequence `ns`.
///
/// When each size divides the next, prefixes are exactly the stratified
/// grids `k L / n_i`. Otherwise points follow the golden-ratio sequence,
/// whose prefixes are uniformly spread without being grids.
pub fn nested_params(length: f64, ns: &[usize]) -> (Vec<f64>, String) {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let divisible = ns.windows(2).all(|w| w[0] > 0 && w[1] % w[0] == 0);
    if divisible && !ns.is_empty() && ns[0] > 0 {
        let mut out: Vec<f64> = Vec::with_capacity(n_max);
        let mut prev = 0usize;
        for &n in ns {
            let step = if prev == 0 { 1 } else { n / prev };
            for k in 0..n {
                if prev == 0 || k % step != 0 {
                    out.push(length * k as f64 / n as f64);
                }
            }
            prev = n;
        }
        (out, "nested stratified grids".into())
    } else {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let out = (0..n_max).map(|k| length * (k as f64 * phi).fract()).collect();
        (out, "golden-ratio sequence".into())
    }
}

/// The complex tracked at one stage together with its nerve, if any.
pub(crate) struct StageComplex {
    pub complex: Arc<SimplicialComplex>,
    pub nerve: Option<NerveComplex>,
}

pub(crate) fn stage_complex(
    cloud: &Arc<PointCloud>,
    metric: &MetricMatrix,
    beta: f64,
    cap: usize,
    object: ObjectKind,
) -> Result<StageComplex> {
    match object {
        ObjectKind::Rips => Ok(StageComplex { complex: Arc::new(build_rips(metric, beta, cap)?), nerve: None }),
        ObjectKind::ShadowNerve => {
            let cliques = maximal_cliques(metric, beta)?;
            let cells = ConvexCellSystem::from_cliques(cloud.clone(), &cliques)?;
            let nerve = build_nerve(&cells, cap)?;
            Ok(StageComplex { complex: nerve.complex.clone(), nerve: Some(nerve) })
        }
    }
}

/// Whether a tower settled on `target` in every dimension, with reasons.
pub(crate) fn compare_to_target(name: &str, tower: &TowerReport, target: &[usize]) -> Vec<String> {
    let mut reasons = Vec::new();
    for (d, &t) in target.iter().enumerate() {
        match tower.plateau.get(d).copied().flatten() {
            None => reasons.push(format!("{name}: rank in dimension {d} did not stabilize within the window")),
            Some(p) if p.rank != t => reasons.push(format!(
                "{name}: stabilized rank {} in dimension {d} differs from the target {t}",
                p.rank
            )),
            Some(_) => {}
        }
    }
    reasons
}

pub(crate) fn failed_hypotheses(reports: &[ConditionReport]) -> Vec<String> {
    reports
        .iter()
        .flat_map(|r| {
            r.failures().map(move |c| {
                format!(
                    "at beta = {}, tau = {}: {} fails ({} = {} is not below {})",
                    r.beta, r.tau, c.name, c.statement, c.lhs, c.rhs
                )
            })
        })
        .collect()
}

pub(crate) const WINDOW_NOTE: &str =
    "stabilization means equal composite ranks on a block of at least 3 stages at the end of the computed window; \
     no statement about the limit beyond the window is made";

pub(crate) const HOMOLOGY_NOTE: &str =
    "ranks are of Z/2 homology; statements about homotopy groups, including non-abelian fundamental groups, are not checked";
