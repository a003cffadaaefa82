use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homology::{tower_ranks, Direction, HomologyTower, TowerReport};
use crate::limits::spec::{
    compare_to_target, dense_sample_size, failed_hypotheses, stage_complex, validate_dims, validate_grid,
    ComparabilityDetails, ComparabilitySpec, InverseSystemSpec, LimitReport, MetricChoice, NamedTower, ObjectKind,
    SampleSummary, StageComplex, StageInfo, Verdict, HOMOLOGY_NOTE, WINDOW_NOTE,
};
use crate::models::{
    epsilon_path_metric, euclidean_metric, sample_model, Claim, ConditionReport, MetricMatrix, Model, PointCloud,
    SamplingScheme,
};
use crate::rips::{build_rips, SimplicialMap};
use crate::shadow::clique_containment_map;

const COFINAL_NOTE: &str = "cofinal subsystem: all stages share one sample dense enough for the finest stage, \
     so the connecting maps are inclusions on a common vertex set";

/// Footpoint parameters, sample size and measured covering radius for a
/// common sample meeting the finest stage's density requirement.
struct CommonSample {
    params: Vec<f64>,
    zeta: f64,
}

fn common_sample(model: &Model, n: Option<usize>, betas: &[f64], taus: &[f64], scheme: SamplingScheme, seed: u64) -> Option<CommonSample> {
    let n = match n {
        Some(n) if n > 0 => n,
        Some(_) => return None,
        None => betas
            .iter()
            .zip(taus)
            .map(|(&b, &t)| dense_sample_size(model.length(), b, t))
            .collect::<Option<Vec<_>>>()?
            .into_iter()
            .max()?,
    };
    let len = model.length();
    let params: Vec<f64> = match scheme {
        SamplingScheme::Stratified => (0..n).map(|k| len * k as f64 / n as f64).collect(),
        SamplingScheme::UniformArc => {
            // Same positions the sampler draws; noise is added separately.
            let s = sample_model(model, n, 0.0, seed, scheme).ok()?;
            s.params
        }
    };
    let zeta = model.covering_radius(&params);
    Some(CommonSample { params, zeta })
}

fn out_of_regime_report(
    experiment: &str,
    spec: serde_json::Value,
    claim: Claim,
    model: &Model,
    dim: usize,
    stages: Vec<StageInfo>,
    conditions: Vec<ConditionReport>,
    mut reasons: Vec<String>,
    notes: Vec<String>,
) -> LimitReport {
    if reasons.is_empty() {
        reasons = failed_hypotheses(&conditions);
    }
    LimitReport {
        experiment: experiment.into(),
        spec,
        claim,
        model_betti: model.betti(dim),
        target_betti: model.betti(dim),
        target_source: "Betti numbers of the model space".into(),
        sample: None,
        stages,
        conditions,
        towers: Vec::new(),
        projection: None,
        comparability: None,
        verdict: Verdict::OutOfRegime,
        reasons,
        notes,
    }
}

fn claim_for(taus: &[f64]) -> Claim {
    if taus.iter().all(|&t| t == 0.0) {
        Claim::NoiselessInverse
    } else {
        Claim::NoisyInverse
    }
}

/// Conditions at every stage; an unusable density requirement becomes a
/// failing density condition with an infinite covering radius.
fn grid_conditions(
    model: &Model,
    claim: Claim,
    betas: &[f64],
    taus: &[f64],
    zeta: Option<f64>,
) -> Result<Vec<ConditionReport>> {
    betas
        .iter()
        .zip(taus)
        .map(|(&b, &t)| {
            let z = zeta.unwrap_or(f64::INFINITY);
            let mut r = crate::models::check_scale_conditions(model, b, t, Some(z))?.for_claim(claim);
            r.push(crate::limits::spec::density_condition(b, t, z));
            Ok(r)
        })
        .collect()
}

fn build_tower(
    cloud: &Arc<PointCloud>,
    metric: &MetricMatrix,
    betas: &[f64],
    cap: usize,
    object: ObjectKind,
    dim: usize,
) -> Result<(TowerReport, Vec<StageComplex>)> {
    let stages: Vec<StageComplex> = betas
        .par_iter()
        .map(|&b| stage_complex(cloud, metric, b, cap, object))
        .collect::<Result<_>>()?;
    let identity: Vec<usize> = (0..cloud.len()).collect();
    // Stage i + 1 has the smaller scale and maps into stage i.
    let maps = stages
        .windows(2)
        .map(|w| match (&w[1].nerve, &w[0].nerve) {
            (Some(fine), Some(coarse)) => clique_containment_map(fine, coarse, &identity),
            _ => SimplicialMap::new(w[1].complex.clone(), w[0].complex.clone(), identity.clone()),
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = betas.iter().map(|b| format!("beta={b}")).collect();
    let tower = HomologyTower::new(stages.iter().map(|s| s.complex.clone()).collect(), maps, Direction::Backward, labels)?;
    Ok((tower_ranks(&tower, dim)?, stages))
}

fn object_name(object: ObjectKind, metric: MetricChoice) -> String {
    let o = match object {
        ObjectKind::Rips => "rips",
        ObjectKind::ShadowNerve => "shadow-nerve",
    };
    match metric {
        MetricChoice::Euclidean => format!("{o} (euclidean)"),
        MetricChoice::EpsilonPath { epsilon } => format!("{o} (epsilon-path, epsilon={epsilon})"),
    }
}

/// Decreasing scales over one common sample, connected by inclusions from
/// finer to coarser stages; compared against the model's Betti numbers.
pub fn run_inverse_system(spec: &InverseSystemSpec) -> Result<LimitReport> {
    spec.validate()?;
    let model = Model::new(spec.model.clone())?;
    let taus = spec.stage_taus();
    let claim = claim_for(&taus);
    let spec_json = serde_json::to_value(spec)?;
    let mut notes = vec![COFINAL_NOTE.to_string(), WINDOW_NOTE.to_string(), HOMOLOGY_NOTE.to_string()];
    // The smallest noise bound is used for the sample, which then satisfies
    // every stage's bound.
    let sample_tau = taus.iter().copied().fold(f64::INFINITY, f64::min);
    if spec.taus.is_some() {
        notes.push(format!("paired grid: one sample drawn with the smallest noise bound {sample_tau}"));
    }
    let common = common_sample(&model, spec.n, &spec.betas, &taus, spec.scheme, spec.seed);
    let conditions = grid_conditions(&model, claim, &spec.betas, &taus, common.as_ref().map(|c| c.zeta))?;
    let n = common.as_ref().map_or(0, |c| c.params.len());
    let stages: Vec<StageInfo> = spec
        .betas
        .iter()
        .zip(&taus)
        .enumerate()
        .map(|(i, (&beta, &tau))| StageInfo { stage: i, beta, tau, n })
        .collect();
    let Some(common) = common.filter(|_| conditions.iter().all(ConditionReport::all_hold)) else {
        return Ok(out_of_regime_report(
            "inverse-system",
            spec_json,
            claim,
            &model,
            spec.dim,
            stages,
            conditions,
            Vec::new(),
            notes,
        ));
    };
    let sample = crate::models::sample_at(&model, &common.params, sample_tau, spec.seed)?;
    let cloud = Arc::new(sample.cloud);
    let metric = spec.metric.build(&cloud)?;
    let (report, _) = build_tower(&cloud, &metric, &spec.betas, spec.cap, spec.object, spec.dim)?;
    let target = model.betti(spec.dim);
    let name = object_name(spec.object, spec.metric);
    let reasons = compare_to_target(&name, &report, &target);
    Ok(LimitReport {
        experiment: "inverse-system".into(),
        spec: spec_json,
        claim,
        model_betti: target.clone(),
        target_betti: target,
        target_source: "Betti numbers of the model space".into(),
        sample: Some(SampleSummary {
            n: cloud.len(),
            tau: sample_tau,
            seed: spec.seed,
            enumeration: format!("{:?}", spec.scheme).to_lowercase(),
            zeta: common.zeta,
            metric: spec.metric,
        }),
        stages,
        conditions,
        towers: vec![NamedTower { name, report }],
        projection: None,
        comparability: None,
        verdict: if reasons.is_empty() { Verdict::Consistent } else { Verdict::Inconsistent },
        reasons,
        notes,
    })
}

/// Largest distortions between the path metric and Euclidean distance over
/// pairs closer than `delta0`, with the worst pair.
fn comparability_ratios(eucl: &MetricMatrix, path: &MetricMatrix, delta0: f64) -> (f64, f64, usize, Option<[usize; 2]>) {
    let n = eucl.len();
    let (mut k1, mut k2, mut count, mut witness) = (1.0f64, 1.0f64, 0usize, None);
    for i in 0..n {
        for j in (i + 1)..n {
            let e = eucl.get(i, j);
            if e >= delta0 || e == 0.0 {
                continue;
            }
            count += 1;
            let p = path.get(i, j);
            let r1 = p / e;
            if r1 > k1 {
                k1 = r1;
                witness = Some([i, j]);
            }
            k2 = k2.max(e / p);
        }
    }
    (k1, k2, count, witness)
}

/// Euclidean and epsilon-path Rips towers over one noisy sample, with the
/// metric comparability check and the interleaving inclusions at each stage.
pub fn run_metric_comparability(spec: &ComparabilitySpec) -> Result<LimitReport> {
    validate_grid(&spec.betas)?;
    validate_dims(spec.dim, spec.cap)?;
    if !(spec.epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {}", spec.epsilon)));
    }
    if !(spec.kappa1 >= 1.0) || !(spec.kappa2 >= 1.0) {
        return Err(Error::InvalidInput("comparability constants must be at least 1".into()));
    }
    let delta0 = spec.delta0.unwrap_or(2.0 * spec.epsilon);
    let model = Model::new(spec.model.clone())?;
    let taus = vec![spec.tau; spec.betas.len()];
    let claim = Claim::NoisyInverse;
    let spec_json = serde_json::to_value(spec)?;
    let mut notes = vec![COFINAL_NOTE.to_string(), WINDOW_NOTE.to_string(), HOMOLOGY_NOTE.to_string()];
    let common = common_sample(&model, spec.n, &spec.betas, &taus, spec.scheme, spec.seed);
    let conditions = grid_conditions(&model, claim, &spec.betas, &taus, common.as_ref().map(|c| c.zeta))?;
    let n = common.as_ref().map_or(0, |c| c.params.len());
    let stages: Vec<StageInfo> = spec
        .betas
        .iter()
        .enumerate()
        .map(|(i, &beta)| StageInfo { stage: i, beta, tau: spec.tau, n })
        .collect();
    let Some(common) = common.filter(|_| conditions.iter().all(ConditionReport::all_hold)) else {
        return Ok(out_of_regime_report(
            "metric-comparability",
            spec_json,
            claim,
            &model,
            spec.dim,
            stages,
            conditions,
            Vec::new(),
            notes,
        ));
    };
    let sample = crate::models::sample_at(&model, &common.params, spec.tau, spec.seed)?;
    let cloud = Arc::new(sample.cloud);
    let eucl = euclidean_metric(&cloud);
    let path = epsilon_path_metric(&cloud, spec.epsilon)?;
    let (k1, k2, checked, witness) = comparability_ratios(&eucl, &path, delta0);
    let mut details = ComparabilityDetails {
        epsilon: spec.epsilon,
        delta0,
        kappa1: spec.kappa1,
        kappa2: spec.kappa2,
        kappa1_needed: k1,
        kappa2_needed: k2,
        checked_pairs: checked,
        witness: None,
        all_below_epsilon: spec.betas.iter().all(|&b| b < spec.epsilon),
        stagewise_identical: Vec::new(),
        interleaved: Vec::new(),
    };
    let summary = SampleSummary {
        n: cloud.len(),
        tau: spec.tau,
        seed: spec.seed,
        enumeration: format!("{:?}", spec.scheme).to_lowercase(),
        zeta: common.zeta,
        metric: MetricChoice::EpsilonPath { epsilon: spec.epsilon },
    };
    if !(k1 <= spec.kappa1) || !(k2 <= spec.kappa2) {
        details.witness = witness;
        let mut report = out_of_regime_report(
            "metric-comparability",
            spec_json,
            claim,
            &model,
            spec.dim,
            stages,
            conditions,
            vec![format!(
                "metric comparability fails: needed kappa1 = {k1} (allowed {}), kappa2 = {k2} (allowed {}); witness pair {:?}",
                spec.kappa1, spec.kappa2, witness
            )],
            notes,
        );
        report.sample = Some(summary);
        report.comparability = Some(details);
        return Ok(report);
    }
    let (euc, via_path) = rayon::join(
        || build_tower(&cloud, &eucl, &spec.betas, spec.cap, ObjectKind::Rips, spec.dim),
        || build_tower(&cloud, &path, &spec.betas, spec.cap, ObjectKind::Rips, spec.dim),
    );
    let (euc_report, euc_stages) = euc?;
    let (path_report, path_stages) = via_path?;
    details.stagewise_identical =
        euc_stages.iter().zip(&path_stages).map(|(a, b)| *a.complex == *b.complex).collect();
    details.interleaved = spec
        .betas
        .par_iter()
        .zip(&path_stages)
        .map(|(&b, p)| {
            let mid = build_rips(&eucl, spec.kappa2 * b, spec.cap)?;
            let outer = build_rips(&path, spec.kappa1 * spec.kappa2 * b, spec.cap)?;
            Ok(p.complex.is_subcomplex_of(&mid) && mid.is_subcomplex_of(&outer))
        })
        .collect::<Result<_>>()?;
    let target = model.betti(spec.dim);
    let mut reasons = compare_to_target("euclidean rips", &euc_report, &target);
    reasons.extend(compare_to_target("epsilon-path rips", &path_report, &target));
    for d in 0..=spec.dim {
        if euc_report.plateau_rank(d) != path_report.plateau_rank(d) {
            reasons.push(format!("dimension {d}: the two metric towers stabilize to different ranks"));
        }
    }
    if let Some(i) = details.interleaved.iter().position(|ok| !ok) {
        reasons.push(format!("interleaving inclusions fail at stage {i}"));
    }
    if details.all_below_epsilon && details.stagewise_identical.iter().any(|same| !same) {
        reasons.push("scales are below epsilon but the complexes differ".into());
    }
    if details.all_below_epsilon {
        notes.push("all scales are below epsilon, where the two metrics give the same complexes".into());
    }
    Ok(LimitReport {
        experiment: "metric-comparability".into(),
        spec: spec_json,
        claim,
        model_betti: target.clone(),
        target_betti: target,
        target_source: "Betti numbers of the model space".into(),
        sample: Some(summary),
        stages,
        conditions,
        towers: vec![
            NamedTower { name: "rips (euclidean)".into(), report: euc_report },
            NamedTower { name: format!("rips (epsilon-path, epsilon={})", spec.epsilon), report: path_report },
        ],
        projection: None,
        comparability: Some(details),
        verdict: if reasons.is_empty() { Verdict::Consistent } else { Verdict::Inconsistent },
        reasons,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ConstantOverrides, ModelSpace, ModelSpec};

    fn circle_spec(betas: Vec<f64>, object: ObjectKind) -> InverseSystemSpec {
        InverseSystemSpec {
            model: ModelSpace::circle(1.0).into(),
            betas,
            tau: 0.0,
            taus: None,
            object,
            metric: MetricChoice::Euclidean,
            n: None,
            scheme: SamplingScheme::Stratified,
            seed: 7,
            dim: 1,
            cap: 2,
        }
    }

    #[test]
    fn circle_shadow_nerve_tower() {
        let r = run_inverse_system(&circle_spec(vec![0.5, 0.4, 0.3, 0.2], ObjectKind::ShadowNerve)).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent, "{:?}", r.reasons);
        assert_eq!(r.stabilized_rank(1), Some(1));
        assert_eq!(r.stabilized_rank(0), Some(1));
    }

    #[test]
    fn circle_rips_tower() {
        let r = run_inverse_system(&circle_spec(vec![0.5, 0.4, 0.3, 0.2], ObjectKind::Rips)).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent, "{:?}", r.reasons);
    }

    #[test]
    fn failed_hypothesis_gives_no_tower() {
        let mut spec = circle_spec(vec![0.5, 0.4, 0.3, 0.2], ObjectKind::ShadowNerve);
        spec.model = ModelSpec {
            space: ModelSpace::circle(1.0),
            overrides: ConstantOverrides { delta: Some(1.0), ..Default::default() },
        };
        let r = run_inverse_system(&spec).unwrap();
        assert_eq!(r.verdict, Verdict::OutOfRegime);
        assert!(r.towers.is_empty());
        assert!(r.reasons.iter().any(|s| s.contains("noiseless-delta")));
    }

    #[test]
    fn too_sparse_sample_is_out_of_regime() {
        let mut spec = circle_spec(vec![0.5, 0.4, 0.3, 0.2], ObjectKind::Rips);
        spec.n = Some(20);
        let r = run_inverse_system(&spec).unwrap();
        assert_eq!(r.verdict, Verdict::OutOfRegime);
        assert!(r.reasons.iter().any(|s| s.contains("sample-density")));
    }

    #[test]
    fn increasing_grid_is_rejected() {
        assert!(run_inverse_system(&circle_spec(vec![0.2, 0.5], ObjectKind::Rips)).is_err());
    }

    #[test]
    fn metrics_agree_below_epsilon() {
        let spec = ComparabilitySpec {
            model: ModelSpace::circle(1.0).into(),
            betas: vec![0.12, 0.1, 0.08],
            tau: 0.02,
            epsilon: 0.15,
            n: None,
            scheme: SamplingScheme::Stratified,
            seed: 7,
            dim: 1,
            cap: 2,
            delta0: None,
            kappa1: 1.5,
            kappa2: 1.05,
        };
        let r = run_metric_comparability(&spec).unwrap();
        let c = r.comparability.as_ref().unwrap();
        assert!(c.stagewise_identical.iter().all(|&b| b));
        assert!(c.interleaved.iter().all(|&b| b));
        assert_eq!(r.verdict, Verdict::Consistent, "{:?}", r.reasons);
    }
}
