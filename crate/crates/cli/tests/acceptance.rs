#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails or exceeds its time budget.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rsl_core::homology::betti;
use rsl_core::limits::{
    run_direct_system, run_inverse_system, run_metric_comparability, run_projection_check, ComparabilitySpec,
    DirectSystemSpec, InverseSystemSpec, LimitReport, MetricChoice, ObjectKind, ProjectionSpec, Verdict,
};
use rsl_core::models::{
    check_scale_conditions, epsilon_path_metric, euclidean_metric, sample_model, Claim, ConditionReport, Model,
    ModelSpace, ModelSpec, PointCloud, SamplingScheme,
};
use rsl_core::oracle::{brute_homology, brute_rips};
use rsl_core::reconstruct::{build_curve_k, ReconstructionResult};
use rsl_core::rips::{build_rips, maximal_cliques};
use rsl_core::shadow::{build_nerve, raster_betti_2d, ConvexCellSystem};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn circle() -> ModelSpec {
    ModelSpace::circle(1.0).into()
}

fn theta() -> ModelSpec {
    ModelSpace::theta_graph().into()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Criterion 1: Rips complexes exclude pairs at exactly the scale, and agree with
/// exhaustive enumeration.
fn strictness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..100 {
        let n = rng.gen_range(2..=12);
        let rows: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let cloud = PointCloud::from_rows(&rows).map_err(err)?;
        let m = euclidean_metric(&cloud);
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (i, j) = if i == j { (0, 1) } else { (i.min(j), i.max(j)) };
        let beta = m.get(i, j);
        let fast = build_rips(&m, beta, 2).map_err(err)?;
        ensure!(!fast.contains(&[i, j]), "trial {trial}: pair ({i},{j}) at distance beta was included");
        let slow = brute_rips(&m, beta, 2).map_err(err)?;
        ensure!(fast == slow, "trial {trial}: build_rips and brute-force enumeration differ");
    }
    Ok("100 clouds, pair at distance beta never included, oracle agreement exact".into())
}

/// Criterion 2: Rips and nerve Betti numbers of circle samples.
fn circle_pipeline() -> Outcome {
    let model = Model::new(circle()).map_err(err)?;
    let mut runs = 0;
    for &n in &[40, 80, 160] {
        let s = sample_model(&model, n, 0.0, 7, SamplingScheme::Stratified).map_err(err)?;
        let zeta = model.covering_radius(&s.params);
        let cloud = Arc::new(s.cloud);
        let metric = euclidean_metric(&cloud);
        for &beta in &[0.3, 0.4, 0.5] {
            let eta = model.constants().map_err(err)?.eta.unwrap_or(0.0);
            ensure!(3.0 * beta < eta && zeta < beta / 2.0, "n={n} beta={beta} is not in the stated regime");
            let c = check_scale_conditions(&model, beta, 0.0, None).map_err(err)?.for_claim(Claim::ClosedCurve);
            ensure!(c.all_hold(), "n={n} beta={beta}: closed-curve hypotheses fail");
            let rips = build_rips(&metric, beta, 2).map_err(err)?;
            let cells = ConvexCellSystem::from_cliques(cloud.clone(), &maximal_cliques(&metric, beta).map_err(err)?)
                .map_err(err)?;
            let nerve = build_nerve(&cells, 2).map_err(err)?;
            let (br, bn) = (betti(&rips, 1).map_err(err)?, betti(&nerve.complex, 1).map_err(err)?);
            ensure!(br == vec![1, 1], "n={n} beta={beta}: Rips Betti {br:?}");
            ensure!(bn == vec![1, 1], "n={n} beta={beta}: nerve Betti {bn:?}");
            if nerve.complex.total() <= 5000 {
                ensure!(brute_homology(&nerve.complex, 1).map_err(err)? == 1, "oracle disagrees on the nerve");
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} (n, beta) pairs: Rips and nerve Betti (1,1)"))
}

/// Criterion 3: Nerve homology against the rasterized shadow.
fn nerve_vs_raster() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut configs = 0;
    let mut disagreements = Vec::new();
    for k in 0..24 {
        let (spec, n, beta) = if k % 2 == 0 {
            (circle(), rng.gen_range(20..80), rng.gen_range(0.15..0.9))
        } else {
            (theta(), rng.gen_range(30..90), rng.gen_range(0.1..0.6))
        };
        let model = Model::new(spec).map_err(err)?;
        let tau = if k % 3 == 0 { 0.02 } else { 0.0 };
        let s = sample_model(&model, n, tau, k as u64, SamplingScheme::UniformArc).map_err(err)?;
        let cloud = Arc::new(s.cloud);
        let metric = euclidean_metric(&cloud);
        let cells =
            ConvexCellSystem::from_cliques(cloud, &maximal_cliques(&metric, beta).map_err(err)?).map_err(err)?;
        let nerve = build_nerve(&cells, 2).map_err(err)?;
        let b = betti(&nerve.complex, 1).map_err(err)?;
        let raster = raster_betti_2d(&cells, 256).map_err(|e| format!("config {k}: raster failed: {e}"))?;
        if (b[0], b[1]) != raster {
            disagreements.push(format!("config {k} ({} n={n} beta={beta:.3}): nerve {b:?}, raster {raster:?}", model.spec().space.kind()));
        }
        configs += 1;
    }
    ensure!(disagreements.is_empty(), "{}", disagreements.join("; "));
    Ok(format!("{configs} configurations (circle and theta, mixed beta and noise) agree exactly"))
}

/// Criterion 4: Direct system over nested samples.
fn direct_stabilization() -> Outcome {
    let spec = DirectSystemSpec {
        model: circle(),
        beta: 0.4,
        ns: vec![20, 40, 80, 160],
        tau: 0.0,
        seed: 7,
        metric: MetricChoice::Euclidean,
        dim: 1,
        cap: 2,
    };
    let r = run_direct_system(&spec).map_err(err)?;
    let t = &r.towers[0].report;
    let p = t.plateau[1].ok_or("no H1 plateau")?;
    let length = t.stages.len() - p.i0;
    ensure!(p.rank == 1 && length >= 3, "plateau {p:?} (length {length})");
    ensure!(r.verdict == Verdict::Consistent, "verdict {:?}: {:?}", r.verdict, r.reasons);
    Ok(format!("H1 composite ranks {:?}, plateau rank 1 over {length} stages", t.rank_table[1][0]))
}

fn inverse_spec(model: ModelSpec, betas: &[f64]) -> InverseSystemSpec {
    InverseSystemSpec {
        model,
        betas: betas.to_vec(),
        tau: 0.0,
        taus: None,
        object: ObjectKind::ShadowNerve,
        metric: MetricChoice::Euclidean,
        n: None,
        scheme: SamplingScheme::Stratified,
        seed: 7,
        dim: 1,
        cap: 2,
    }
}

const CIRCLE_GRID: [f64; 4] = [0.5, 0.4, 0.3, 0.2];
const THETA_GRID: [f64; 4] = [0.28, 0.24, 0.2, 0.16];

/// First Betti number of an embedded graph: edges - vertices + components.
fn graph_b1(spec: &ModelSpec) -> usize {
    let ModelSpace::EmbeddedGraph { vertices, edges } = &spec.space else {
        return 1;
    };
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for e in edges {
        let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
        parent[a] = b;
    }
    let components = (0..vertices.len()).filter(|&v| find(&mut parent, v) == v).count();
    edges.len() + components - vertices.len()
}

/// Criterion 5: Inverse systems on the circle and the theta graph.
fn inverse_stabilization() -> Outcome {
    let mut lines = Vec::new();
    for (spec, grid) in [(circle(), &CIRCLE_GRID), (theta(), &THETA_GRID)] {
        let expected = graph_b1(&spec);
        let r = run_inverse_system(&inverse_spec(spec.clone(), grid)).map_err(err)?;
        let kind = spec.space.kind();
        ensure!(r.hypotheses_hold(), "{kind}: grid {grid:?} is not in regime: {:?}", r.reasons);
        ensure!(r.stabilized_rank(1) == Some(expected), "{kind}: stabilized H1 rank {:?}, expected {expected}", r.stabilized_rank(1));
        ensure!(r.verdict == Verdict::Consistent, "{kind}: verdict {:?}: {:?}", r.verdict, r.reasons);
        lines.push(format!("{kind} rank {expected} (n={})", r.sample.as_ref().map_or(0, |s| s.n)));
    }
    Ok(lines.join(", "))
}

/// Criterion 6: Noisy towers and the agreement of the two metrics below epsilon.
fn noisy_towers() -> Outcome {
    let mut constant = inverse_spec(circle(), &CIRCLE_GRID);
    constant.tau = 0.02;
    let mut paired = inverse_spec(circle(), &CIRCLE_GRID);
    paired.taus = Some(vec![0.02, 0.015, 0.01, 0.005]);
    for (name, spec) in [("tau=0.02", &constant), ("paired (beta, tau)", &paired)] {
        let r = run_inverse_system(spec).map_err(err)?;
        ensure!(r.claim == Claim::NoisyInverse, "{name}: claim {:?}", r.claim);
        ensure!(r.stabilized_rank(1) == Some(1), "{name}: stabilized rank {:?}: {:?}", r.stabilized_rank(1), r.reasons);
        ensure!(r.verdict == Verdict::Consistent, "{name}: verdict {:?}: {:?}", r.verdict, r.reasons);
    }
    let betas = vec![0.14, 0.12, 0.1, 0.08];
    let spec = ComparabilitySpec {
        model: circle(),
        betas: betas.clone(),
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
    let r = run_metric_comparability(&spec).map_err(err)?;
    ensure!(r.verdict == Verdict::Consistent, "comparability verdict {:?}: {:?}", r.verdict, r.reasons);
    let details = r.comparability.as_ref().ok_or("missing comparability details")?;
    ensure!(details.stagewise_identical.iter().all(|&s| s), "report says the towers differ");
    // Independent check on the same sample: rebuild both complexes per stage.
    let model = Model::new(circle()).map_err(err)?;
    let sample = r.sample.as_ref().ok_or("missing sample")?;
    let s = sample_model(&model, sample.n, 0.02, 7, SamplingScheme::Stratified).map_err(err)?;
    let euclid = euclidean_metric(&s.cloud);
    let path = epsilon_path_metric(&s.cloud, 0.15).map_err(err)?;
    for &b in &betas {
        let (x, y) = (build_rips(&euclid, b, 2).map_err(err)?, build_rips(&path, b, 2).map_err(err)?);
        ensure!(x == y, "complexes differ at beta {b}");
    }
    let ranks: Vec<_> = r.towers.iter().map(|t| t.report.plateau_rank(1)).collect();
    ensure!(ranks.iter().all(|&k| k == Some(1)), "tower ranks {ranks:?}");
    Ok(format!("noisy towers stabilize at 1; euclidean and epsilon-path identical at {betas:?} (n={})", sample.n))
}

/// Criterion 7: Projection of a Rips complex onto its shadow nerve.
fn projection_check() -> Outcome {
    let spec =
        ProjectionSpec { model: circle(), beta: 0.4, n: 60, scheme: SamplingScheme::Stratified, seed: 7, dim: 1, cap: 2 };
    let r = run_projection_check(&spec).map_err(err)?;
    let d = r.projection.as_ref().ok_or_else(|| format!("no projection details: {:?}", r.reasons))?;
    ensure!(d.projection_ranks[1] == 1, "projection H1 rank {}", d.projection_ranks[1]);
    ensure!(d.rips_betti[1] == 1 && d.nerve_betti[1] == 1, "source/target {:?} {:?}", d.rips_betti, d.nerve_betti);
    ensure!(d.subdivision_betti == d.rips_betti, "Sd K {:?} vs K {:?}", d.subdivision_betti, d.rips_betti);
    // Oracle on the source complex.
    let model = Model::new(circle()).map_err(err)?;
    let s = sample_model(&model, 60, 0.0, 7, SamplingScheme::Stratified).map_err(err)?;
    let k = build_rips(&euclidean_metric(&s.cloud), 0.4, 2).map_err(err)?;
    ensure!(brute_homology(&k, 1).map_err(err)? == 1, "oracle H1 of the Rips complex differs");
    ensure!(r.verdict == Verdict::Consistent, "verdict {:?}: {:?}", r.verdict, r.reasons);
    Ok(format!("H1 map rank 1 between ranks 1 and 1; Sd invariance holds ({} subdivision simplices)", d.subdivision_simplices))
}

/// Hausdorff distance between a closed polyline and the unit circle,
/// computed analytically: the distance from `x` to the circle is `| |x| - 1 |`.
fn circle_hausdorff(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    let norm = |p: &[f64]| p[0].hypot(p[1]);
    let mut from_curve: f64 = 0.0;
    for i in 0..n {
        let (a, b) = (&points[i], &points[(i + 1) % n]);
        // |x| is convex along a segment: largest at an endpoint, smallest at
        // the point nearest the origin.
        from_curve = from_curve.max(norm(a) - 1.0).max(norm(b) - 1.0);
        let d = [b[0] - a[0], b[1] - a[1]];
        let t = (-(a[0] * d[0] + a[1] * d[1]) / (d[0] * d[0] + d[1] * d[1])).clamp(0.0, 1.0);
        from_curve = from_curve.max(1.0 - norm(&[a[0] + t * d[0], a[1] + t * d[1]]));
    }
    let samples = 20_000;
    let mut from_circle: f64 = 0.0;
    for k in 0..samples {
        let th = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
        let x = [th.cos(), th.sin()];
        let mut best = f64::INFINITY;
        for i in 0..n {
            let (a, b) = (&points[i], &points[(i + 1) % n]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let t = (((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])).clamp(0.0, 1.0);
            best = best.min((x[0] - a[0] - t * d[0]).hypot(x[1] - a[1] - t * d[1]));
        }
        from_circle = from_circle.max(best);
    }
    // Circle points between samples are at most half a step of arc away.
    from_curve.max(from_circle + std::f64::consts::PI / samples as f64)
}

/// Criterion 8: Curve reconstruction from noisy circle and trefoil samples.
fn reconstruction() -> Outcome {
    let model = Model::new(circle()).map_err(err)?;
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let s = sample_model(&model, 126, 0.02, seed, SamplingScheme::Stratified).map_err(err)?;
        let r = build_curve_k(&model, &s.cloud, 0.2, 0.02, 0.05).map_err(err)?;
        ensure!(r.verdict == Verdict::Consistent, "seed {seed}: verdict {:?}: {:?}", r.verdict, r.reasons);
        let c = r.checks.as_ref().ok_or("missing checks")?;
        ensure!(c.simple && c.closed && c.in_shadow, "seed {seed}: checks {c:?}");
        ensure!(c.max_edge < 0.2 && c.edges_under_beta, "seed {seed}: longest edge {}", c.max_edge);
        ensure!(c.hausdorff_to_model <= 0.075, "seed {seed}: reported Hausdorff {}", c.hausdorff_to_model);
        let h = circle_hausdorff(&r.curve.as_ref().ok_or("missing curve")?.points);
        ensure!(h <= 0.075, "seed {seed}: analytic Hausdorff {h}");
        ensure!(h <= c.hausdorff_to_model + 1e-9, "seed {seed}: reported {} is not an upper bound of {h}", c.hausdorff_to_model);
        worst = worst.max(h);
    }
    let trefoil = Model::new(ModelSpace::Trefoil { scale: 1.0 }).map_err(err)?;
    let s = sample_model(&trefoil, 200, 0.01, 7, SamplingScheme::Stratified).map_err(err)?;
    let r = build_curve_k(&trefoil, &s.cloud, 0.3, 0.01, 0.1).map_err(err)?;
    let c = r.checks.as_ref().ok_or_else(|| format!("trefoil out of regime: {:?}", r.reasons))?;
    ensure!(c.simple && c.closed && c.edges_under_beta, "trefoil checks {c:?}");
    Ok(format!("10 circle seeds pass, worst Hausdorff {worst:.4} <= 0.075; trefoil simple, closed, edges < beta"))
}

/// The override that makes `name` fail, given the baseline condition
/// values: the relevant constant is set just below the largest left side.
fn fault(spec: &ModelSpec, reports: &[ConditionReport], name: &str) -> Option<ModelSpec> {
    let lhs = reports.iter().filter_map(|r| r.get(name)).map(|c| c.lhs).fold(f64::NAN, f64::max);
    let mut s = spec.clone();
    let o = &mut s.overrides;
    let v = 0.9 * lhs;
    match name {
        "shadow-in-tube" | "noise-in-tube" => o.tube_radius = Some(v),
        "normal-injectivity" => o.eta = Some(v),
        "projection-closeness" | "noiseless-rho" | "noisy-rho" => o.rho = Some(v),
        "noiseless-delta" | "hausmann-delta" | "noisy-delta" => o.delta = Some(v),
        _ => return None,
    }
    Some(s)
}

fn expect_out_of_regime(label: &str, name: &str, verdict: Verdict, reasons: &[String]) -> Result<(), String> {
    ensure!(verdict == Verdict::OutOfRegime, "{label}: violating {name} gave {verdict:?}");
    ensure!(reasons.iter().any(|r| r.contains(name)), "{label}: reasons do not name {name}: {reasons:?}");
    Ok(())
}

fn limit_faults(
    label: &str,
    spec: &ModelSpec,
    run: &dyn Fn(ModelSpec) -> rsl_core::Result<LimitReport>,
    count: &mut usize,
) -> Result<(), String> {
    let base = run(spec.clone()).map_err(err)?;
    ensure!(base.verdict == Verdict::Consistent, "{label}: baseline verdict {:?}: {:?}", base.verdict, base.reasons);
    for name in base.claim.hypotheses() {
        let faulty = fault(spec, &base.conditions, name).ok_or_else(|| format!("no fault for {name}"))?;
        let r = run(faulty).map_err(err)?;
        expect_out_of_regime(label, name, r.verdict, &r.reasons)?;
        ensure!(r.towers.is_empty() && r.projection.is_none(), "{label}: {name} failed but results were reported");
        *count += 1;
    }
    Ok(())
}

/// Criterion 9: Every hypothesis, when violated on its own, turns the verdict into out-of-regime.
fn fault_injection() -> Outcome {
    let mut count = 0;
    let noiseless = |m: ModelSpec, grid: &'static [f64]| run_inverse_system(&inverse_spec(m, grid));
    limit_faults("circle inverse", &circle(), &|m| noiseless(m, &CIRCLE_GRID), &mut count)?;
    limit_faults("theta inverse", &theta(), &|m| noiseless(m, &THETA_GRID), &mut count)?;
    let noisy = |m: ModelSpec| {
        let mut s = inverse_spec(m, &CIRCLE_GRID);
        s.tau = 0.02;
        run_inverse_system(&s)
    };
    limit_faults("noisy inverse", &circle(), &noisy, &mut count)?;
    let compare = |m: ModelSpec| {
        run_metric_comparability(&ComparabilitySpec {
            model: m,
            betas: vec![0.14, 0.12, 0.1, 0.08],
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
        })
    };
    limit_faults("comparability", &circle(), &compare, &mut count)?;
    let project = |m: ModelSpec| {
        run_projection_check(&ProjectionSpec { model: m, beta: 0.4, n: 60, scheme: SamplingScheme::Stratified, seed: 7, dim: 1, cap: 2 })
    };
    limit_faults("projection", &circle(), &project, &mut count)?;

    // Sample density, violated through the sample size.
    let mut sparse = inverse_spec(circle(), &CIRCLE_GRID);
    sparse.n = Some(20);
    let r = run_inverse_system(&sparse).map_err(err)?;
    expect_out_of_regime("sparse inverse", "sample-density", r.verdict, &r.reasons)?;
    count += 1;

    // Reconstruction: constants, then the parameters zeta and tau.
    let model = Model::new(circle()).map_err(err)?;
    let s = sample_model(&model, 126, 0.02, 7, SamplingScheme::Stratified).map_err(err)?;
    let recon = |m: &ModelSpec, tau: f64, zeta: f64| -> Result<ReconstructionResult, String> {
        build_curve_k(&Model::new(m.clone()).map_err(err)?, &s.cloud, 0.2, tau, zeta).map_err(err)
    };
    let base = recon(&circle(), 0.02, 0.05)?;
    ensure!(base.verdict == Verdict::Consistent, "reconstruction baseline {:?}", base.reasons);
    let reports = [base.conditions.clone()];
    for name in Claim::CurveReconstruction.hypotheses() {
        let r = match fault(&circle(), &reports, name) {
            Some(m) => recon(&m, 0.02, 0.05)?,
            // noisy-curve: tau + zeta < beta / 2 fails with a larger zeta.
            None => recon(&circle(), 0.02, 0.09)?,
        };
        expect_out_of_regime("reconstruction", name, r.verdict, &r.reasons)?;
        ensure!(r.curve.is_none() && r.checks.is_none(), "reconstruction: {name} failed but a curve was reported");
        count += 1;
    }
    let r = recon(&circle(), 0.02, 0.01)?;
    expect_out_of_regime("reconstruction", "footpoint-density", r.verdict, &r.reasons)?;
    let r = recon(&circle(), 0.005, 0.05)?;
    expect_out_of_regime("reconstruction", "noise-bound", r.verdict, &r.reasons)?;
    count += 2;

    // The same flips surface as exit status 2 on the command line.
    let cli: [&[&str]; 4] = [
        &["tower", "--beta-grid", "0.5,0.4,0.3,0.2", "--delta", "0.5"],
        &["compare-metrics", "--beta-grid", "0.14,0.12,0.1,0.08", "--tau", "0.02", "--epsilon", "0.15", "--rho", "0.1"],
        &["project-check", "--beta", "0.4", "--n", "60", "--delta", "0.5"],
        &["reconstruct", "--tau", "0.02", "--zeta", "0.05", "--beta", "0.2", "--n", "126", "--eta", "0.5"],
    ];
    for args in cli {
        let o = Command::new(env!("CARGO_BIN_EXE_rsl")).args(args).output().map_err(err)?;
        ensure!(o.status.code() == Some(2), "`rsl {}` exited with {:?}", args.join(" "), o.status.code());
    }
    Ok(format!("{count} single-hypothesis faults all out-of-regime; 4 CLI commands exit 2"))
}

/// Criterion 10: Two runs of the inverse-system command give identical bytes.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut outputs = Vec::new();
    for (model, grid) in [("circle", "0.5,0.4,0.3,0.2"), ("theta", "0.28,0.24,0.2,0.16")] {
        for run in 0..2 {
            let out = dir.path().join(format!("{model}-{run}.json"));
            let o = Command::new(env!("CARGO_BIN_EXE_rsl"))
                .args(["tower", "--model", model, "--beta-grid", grid, "--object", "shadow-nerve", "--dim", "1", "--seed", "7"])
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(err)?;
            ensure!(o.status.success(), "{model} run {run} exited with {:?}", o.status.code());
            outputs.push(std::fs::read(&out).map_err(err)?);
        }
    }
    ensure!(outputs[0] == outputs[1], "circle reports differ");
    ensure!(outputs[2] == outputs[3], "theta reports differ");
    Ok(format!("circle and theta reports byte-identical ({} and {} bytes)", outputs[0].len(), outputs[2].len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("strictness suite", Duration::from_secs(5), strictness),
        ("circle pipeline", Duration::from_secs(60), circle_pipeline),
        ("nerve vs raster", Duration::from_secs(120), nerve_vs_raster),
        ("direct-system stabilization", Duration::from_secs(60), direct_stabilization),
        ("inverse-system stabilization", Duration::from_secs(120), inverse_stabilization),
        ("noisy towers", Duration::from_secs(120), noisy_towers),
        ("projection check", Duration::from_secs(60), projection_check),
        ("reconstruction", Duration::from_secs(60), reconstruction),
        ("fault injection", Duration::from_secs(30), fault_injection),
        ("determinism", Duration::from_secs(10), determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if elapsed <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; but took longer than {budget:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} {name} [{:.2}s / {}s]: {detail}", i + 1, elapsed.as_secs_f64(), budget.as_secs());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
