use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homology::{tower_ranks, Direction, HomologyTower};
use crate::limits::spec::{
    compare_to_target, nested_params, validate_dims, DirectSystemSpec, LimitReport, MetricChoice, NamedTower,
    SampleSummary, StageInfo, Verdict, HOMOLOGY_NOTE, WINDOW_NOTE,
};
use crate::models::{check_scale_conditions, sample_at, Claim, Model};
use crate::rips::{build_rips, SimplicialMap};

/// Rips complexes at one scale over nested samples, connected by the
/// natural inclusions. The target is the homology of the largest stage.
pub fn run_direct_system(spec: &DirectSystemSpec) -> Result<LimitReport> {
    if spec.ns.len() < 2 {
        return Err(Error::InvalidInput("a direct system needs at least two sample sizes".into()));
    }
    if spec.ns[0] == 0 || spec.ns.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput(format!("sample sizes must be positive and nondecreasing, got {:?}", spec.ns)));
    }
    if !(spec.beta > 0.0) || !spec.beta.is_finite() {
        return Err(Error::InvalidInput(format!("scale must be positive, got {}", spec.beta)));
    }
    validate_dims(spec.dim, spec.cap)?;
    let model = Model::new(spec.model.clone())?;
    let mut distinct = spec.ns.clone();
    distinct.dedup();
    let (params, enumeration) = nested_params(model.length(), &distinct);
    let sample = sample_at(&model, &params, spec.tau, spec.seed)?;
    let cloud = Arc::new(sample.cloud);

    let stages: Vec<Arc<crate::rips::SimplicialComplex>> = spec
        .ns
        .par_iter()
        .map(|&n| {
            let sub = cloud.select(&(0..n).collect::<Vec<_>>())?;
            let metric = spec.metric.build(&sub)?;
            Ok(Arc::new(build_rips(&metric, spec.beta, spec.cap)?))
        })
        .collect::<Result<_>>()?;
    // Path metrics only shrink when points are added, so the inclusion stays
    // simplicial; it is verified either way.
    let maps = stages
        .windows(2)
        .map(|w| SimplicialMap::new(w[0].clone(), w[1].clone(), (0..w[0].n_vertices()).collect()))
        .collect::<Result<Vec<_>>>()?;
    let labels = spec.ns.iter().map(|n| format!("n={n}")).collect();
    let tower = HomologyTower::new(stages, maps, Direction::Forward, labels)?;
    let report = tower_ranks(&tower, spec.dim)?;

    let last = report.stages.len() - 1;
    let target: Vec<usize> = report.stages[last].betti.clone();
    let reasons = compare_to_target("rips tower", &report, &target);
    let model_betti = model.betti(spec.dim);
    let mut notes = vec![WINDOW_NOTE.to_string(), HOMOLOGY_NOTE.to_string()];
    for d in 0..=spec.dim {
        if let Some(p) = report.plateau[d] {
            if p.i0 > 0 {
                notes.push(format!(
                    "dimension {d}: ranks settle only from stage {} ({}); earlier samples are too sparse at this scale",
                    p.i0, report.stages[p.i0].label
                ));
            }
        }
    }
    if target != model_betti {
        notes.push(format!(
            "homology of the densest stage {target:?} differs from the model's {model_betti:?} at this scale"
        ));
    }
    let verdict = if reasons.is_empty() { Verdict::Consistent } else { Verdict::Inconsistent };
    let zeta = model.covering_radius(&params);
    let conditions = vec![check_scale_conditions(&model, spec.beta, spec.tau, None)?.for_claim(Claim::DirectLimit)];
    Ok(LimitReport {
        experiment: "direct-system".into(),
        spec: serde_json::to_value(spec)?,
        claim: Claim::DirectLimit,
        model_betti,
        target_betti: target,
        target_source: "homology of the largest sample at the same scale".into(),
        sample: Some(SampleSummary {
            n: cloud.len(),
            tau: spec.tau,
            seed: spec.seed,
            enumeration,
            zeta,
            metric: spec.metric,
        }),
        stages: spec
            .ns
            .iter()
            .enumerate()
            .map(|(i, &n)| StageInfo { stage: i, beta: spec.beta, tau: spec.tau, n })
            .collect(),
        conditions,
        towers: vec![NamedTower { name: tower_name(spec.metric), report }],
        projection: None,
        comparability: None,
        verdict,
        reasons,
        notes,
    })
}

fn tower_name(metric: MetricChoice) -> String {
    match metric {
        MetricChoice::Euclidean => "rips (euclidean)".into(),
        MetricChoice::EpsilonPath { epsilon } => format!("rips (epsilon-path, epsilon={epsilon})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelSpace;

    fn spec(beta: f64, ns: Vec<usize>) -> DirectSystemSpec {
        DirectSystemSpec {
            model: ModelSpace::circle(1.0).into(),
            beta,
            ns,
            tau: 0.0,
            seed: 7,
            metric: MetricChoice::Euclidean,
            dim: 1,
            cap: 2,
        }
    }

    #[test]
    fn circle_direct_system_settles_on_one_loop() {
        let r = run_direct_system(&spec(0.4, vec![20, 40, 80, 160])).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
        assert_eq!(r.stabilized_rank(1), Some(1));
        assert!(r.towers[0].report.is_rank_monotone());
    }

    #[test]
    fn repeated_size_gives_identity_tower() {
        let r = run_direct_system(&spec(0.4, vec![30, 30, 30])).unwrap();
        let p = r.towers[0].report.plateau[1].unwrap();
        assert_eq!((p.rank, p.i0), (1, 0));
    }

    #[test]
    fn sparse_early_stages_are_annotated() {
        let r = run_direct_system(&spec(0.05, vec![20, 40, 80, 160, 320, 640])).unwrap();
        let t = &r.towers[0].report;
        assert_eq!(t.stages[0].betti[1], 0);
        assert_eq!(t.stages[5].betti[1], 1);
        assert_eq!(t.plateau[1].map(|p| (p.rank, p.i0)), Some((1, 3)));
        assert_eq!(r.verdict, Verdict::Consistent);
        assert!(r.notes.iter().any(|n| n.contains("too sparse")));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(run_direct_system(&spec(0.4, vec![40])).is_err());
        assert!(run_direct_system(&spec(0.4, vec![40, 20])).is_err());
    }
}
