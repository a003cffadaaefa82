use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{
    barycentric_subdivision, carrier_map_to_nerve, induced_map, last_vertex_map, Homology,
};
use crate::limits::spec::{
    stage_conditions, validate_dims, LimitReport, MetricChoice, ProjectionDetails, ProjectionSpec, SampleSummary,
    StageInfo, Verdict, HOMOLOGY_NOTE,
};
use crate::models::{euclidean_metric, sample_model, Claim, ModelConstants, Model, PointCloud};
use crate::rips::{build_rips, maximal_cliques, Simplex, SimplicialMap};
use crate::shadow::{build_nerve, ConvexCellSystem};

/// Compares the homology of a Rips complex, its shadow nerve and the map
/// induced by the shadow projection. The projection is realized on the
/// barycentric subdivision by the carrier map; the last-vertex map shows the
/// subdivision does not change homology.
pub fn run_projection_check(spec: &ProjectionSpec) -> Result<LimitReport> {
    validate_dims(spec.dim, spec.cap)?;
    if spec.n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    let model = Model::new(spec.model.clone())?;
    let sample = sample_model(&model, spec.n, 0.0, spec.seed, spec.scheme)?;
    let zeta = model.covering_radius(&sample.params);
    let conditions = vec![stage_conditions(&model, Claim::ProjectionHomotopy, spec.beta, 0.0, zeta)?];
    let summary = SampleSummary {
        n: spec.n,
        tau: 0.0,
        seed: spec.seed,
        enumeration: format!("{:?}", spec.scheme).to_lowercase(),
        zeta,
        metric: MetricChoice::Euclidean,
    };
    let mut report = LimitReport {
        experiment: "projection-check".into(),
        spec: serde_json::to_value(spec)?,
        claim: Claim::ProjectionHomotopy,
        model_betti: model.betti(spec.dim),
        target_betti: Vec::new(),
        target_source: "homology of the Rips complex and of the shadow nerve".into(),
        sample: Some(summary),
        stages: vec![StageInfo { stage: 0, beta: spec.beta, tau: 0.0, n: spec.n }],
        conditions,
        towers: Vec::new(),
        projection: None,
        comparability: None,
        verdict: Verdict::OutOfRegime,
        reasons: Vec::new(),
        notes: vec![HOMOLOGY_NOTE.to_string()],
    };
    if !report.hypotheses_hold() {
        report.reasons = crate::limits::spec::failed_hypotheses(&report.conditions);
        return Ok(report);
    }
    let cloud = Arc::new(sample.cloud);
    let metric = euclidean_metric(&cloud);
    let rips = Arc::new(build_rips(&metric, spec.beta, spec.cap)?);
    let cliques = maximal_cliques(&metric, spec.beta)?;
    let nerve = build_nerve(&ConvexCellSystem::from_cliques(cloud, &cliques)?, spec.cap)?;
    let sd = barycentric_subdivision(&rips)?;
    let subdivision_betti = sd.verify_betti(&rips, spec.dim)?;
    let p = carrier_map_to_nerve(&sd, &cliques, &nerve)?;
    let last = last_vertex_map(&sd, rips.clone())?;
    let (h_sd, (h_rips, h_nerve)) = rayon::join(
        || Homology::compute(sd.complex.clone(), spec.dim),
        || {
            rayon::join(
                || Homology::compute(rips.clone(), spec.dim),
                || Homology::compute(nerve.complex.clone(), spec.dim),
            )
        },
    );
    let (h_sd, h_rips, h_nerve) = (h_sd?, h_rips?, h_nerve?);
    let projection_ranks = induced_map(&p, &h_sd, &h_nerve)?.ranks();
    let last_vertex_ranks = induced_map(&last, &h_sd, &h_rips)?.ranks();
    let details = ProjectionDetails {
        rips_betti: h_rips.betti(),
        nerve_betti: h_nerve.betti(),
        subdivision_betti,
        projection_ranks,
        last_vertex_ranks,
        maximal_cliques: cliques.len(),
        subdivision_simplices: sd.complex.total(),
    };
    let mut reasons = Vec::new();
    for d in 0..=spec.dim {
        let (r, a, b, l) =
            (details.projection_ranks[d], details.rips_betti[d], details.nerve_betti[d], details.last_vertex_ranks[d]);
        if l != a {
            reasons.push(format!("dimension {d}: last-vertex map has rank {l}, not the Betti number {a}"));
        }
        if r != a || r != b {
            reasons.push(format!(
                "dimension {d}: projection rank {r} is not an isomorphism between ranks {a} (Rips) and {b} (nerve)"
            ));
        }
    }
    report.target_betti = details.rips_betti.clone();
    report.verdict = if reasons.is_empty() { Verdict::Consistent } else { Verdict::Inconsistent };
    report.reasons = reasons;
    report.projection = Some(details);
    Ok(report)
}

/// Outcome of the vertex-level map from a reference sample to a sparser one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FMapReport {
    /// Reference vertex to nearest sample vertex.
    pub vertex_map: Vec<usize>,
    pub simplicial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offending_simplex: Option<Simplex>,
    /// Largest diameter of an image simplex.
    pub max_image_diameter: f64,
    /// `((1/2) + xi) beta + xi eps_beta` when model constants are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub induced_ranks: Option<Vec<usize>>,
    pub verdict: Verdict,
    #[serde(skip)]
    pub map: Option<SimplicialMap>,
}

/// Nearest sample point for each reference point (lowest index on ties).
pub fn nearest_point_map(reference: &PointCloud, sample: &PointCloud) -> Result<Vec<usize>> {
    if reference.dim() != sample.dim() {
        return Err(Error::DimensionMismatch { expected: reference.dim(), found: sample.dim() });
    }
    Ok(reference
        .iter()
        .map(|p| {
            let mut best = (f64::INFINITY, 0usize);
            for (i, q) in sample.iter().enumerate() {
                let d = crate::geom::dist(p, q);
                if d < best.0 {
                    best = (d, i);
                }
            }
            best.1
        })
        .collect())
}

pub fn nu_beta(constants: &ModelConstants, beta: f64) -> f64 {
    (0.5 + constants.xi) * beta + constants.xi * constants.epsilon(beta)
}

/// The simplicial approximation of the partition-of-unity map from a dense
/// reference sample to `sample`: each reference vertex goes to its nearest
/// sample point. Reports the map and its homology ranks when simplicial, and
/// the offending simplex otherwise.
pub fn vertex_level_f_map(
    reference: &PointCloud,
    gamma: f64,
    sample: &PointCloud,
    beta: f64,
    cap: usize,
    dim: usize,
    constants: Option<&ModelConstants>,
) -> Result<FMapReport> {
    validate_dims(dim, cap)?;
    let vertex_map = nearest_point_map(reference, sample)?;
    let src_metric = euclidean_metric(reference);
    let dst_metric = euclidean_metric(sample);
    let src = Arc::new(build_rips(&src_metric, gamma, cap)?);
    let dst = Arc::new(build_rips(&dst_metric, beta, cap)?);
    let mut max_diam: f64 = 0.0;
    let mut offending = None;
    for s in src.iter() {
        let mut img: Vec<usize> = s.iter().map(|&v| vertex_map[v]).collect();
        img.sort_unstable();
        img.dedup();
        let diam = img
            .iter()
            .flat_map(|&a| img.iter().map(move |&b| (a, b)))
            .map(|(a, b)| dst_metric.get(a, b))
            .fold(0.0, f64::max);
        max_diam = max_diam.max(diam);
        if offending.is_none() && !dst.contains(&img) {
            offending = Some(s.clone());
        }
    }
    let nu = constants.map(|k| nu_beta(k, beta));
    if offending.is_some() {
        return Ok(FMapReport {
            vertex_map,
            simplicial: false,
            offending_simplex: offending,
            max_image_diameter: max_diam,
            nu_beta: nu,
            induced_ranks: None,
            verdict: Verdict::OutOfRegime,
            map: None,
        });
    }
    let map = SimplicialMap::new(src, dst, vertex_map.clone())?;
    let ranks = crate::homology::induced_map_of(&map, dim)?.ranks();
    Ok(FMapReport {
        vertex_map,
        simplicial: true,
        offending_simplex: None,
        max_image_diameter: max_diam,
        nu_beta: nu,
        induced_ranks: Some(ranks),
        verdict: Verdict::Consistent,
        map: Some(map),
    })
}
