use std::path::PathBuf;
use std::sync::Arc;

use serde::Serialize;

use rsl_core::homology::betti;
use rsl_core::limits::{
    run_direct_system, run_inverse_system, run_metric_comparability, run_projection_check, ComparabilitySpec,
    DirectSystemSpec, InverseSystemSpec, LimitReport, ProjectionSpec, Verdict,
};
use rsl_core::models::{sample_model, Model, ModelSpec, PointCloud};
use rsl_core::oracle::{cross_check, OracleConfig};
use rsl_core::reconstruct::build_curve_k;
use rsl_core::rips::{build_rips, maximal_cliques, SimplicialComplex};
use rsl_core::shadow::{build_nerve, raster_betti_2d_detailed, rasterize, ConvexCellSystem, NerveComplex, RasterResult};

use crate::config::{
    read, resolve, CloudArgs, Command, CompareArgs, ComplexArgs, HomologyArgs, OracleArgs, PlotArgs, ProjectArgs,
    ReconstructArgs, SampleArgs, ShadowArgs, TowerArgs,
};
use crate::output::{curve_csv, parse_report, rank_table_csv, stages_csv, write_atomic, write_json, Report};
use crate::{CliError, Outcome};

const DEFAULT_CAP: usize = 2;
const DEFAULT_DIM: usize = 1;

pub fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Sample(w) => sample(resolve("sample", w)?),
        Command::Rips(w) => rips(resolve("rips", w)?),
        Command::Shadow(w) => shadow(resolve("shadow", w)?),
        Command::Homology(w) => homology(resolve("homology", w)?),
        Command::Tower(w) => tower(resolve("tower", w)?),
        Command::CompareMetrics(w) => compare(resolve("compare-metrics", w)?),
        Command::ProjectCheck(w) => project(resolve("project-check", w)?),
        Command::Reconstruct(w) => reconstruct(resolve("reconstruct", w)?),
        Command::Oracle(w) => oracle(resolve("oracle", w)?),
        Command::PlotData(w) => plot(resolve("plot-data", w)?),
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

/// Positive, finite and strictly decreasing, with at least two values.
fn check_grid(grid: &[f64]) -> Result<(), CliError> {
    if grid.len() < 2 {
        return Err(CliError::Usage("--beta-grid needs at least two scales".into()));
    }
    if grid.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
        return Err(CliError::Usage(format!("--beta-grid values must be positive, got {grid:?}")));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Usage(format!("--beta-grid must be strictly decreasing, got {grid:?}")));
    }
    Ok(())
}

fn verdict_outcome(v: Verdict) -> Outcome {
    match v {
        Verdict::Consistent => Outcome::Done,
        Verdict::OutOfRegime => Outcome::OutOfRegime,
        Verdict::Inconsistent => Outcome::Inconsistent,
    }
}

/// The points to work on: the input CSV, or a fresh sample of the model.
fn load_cloud(spec: &ModelSpec, cloud: &CloudArgs) -> Result<PointCloud, CliError> {
    if let Some(path) = &cloud.input {
        return Ok(PointCloud::from_csv(&read(path)?)?);
    }
    let model = Model::new(spec.clone())?;
    let n = required(cloud.n, "n")?;
    let sample = sample_model(
        &model,
        n,
        cloud.tau.unwrap_or(0.0),
        cloud.seed.unwrap_or(0),
        cloud.scheme.unwrap_or_default(),
    )?;
    Ok(sample.cloud)
}

fn sample(a: SampleArgs) -> Result<Outcome, CliError> {
    let spec = a.model.spec()?;
    if a.cloud.input.is_some() {
        return Err(CliError::Usage("sample does not take --input".into()));
    }
    let cloud = load_cloud(&spec, &a.cloud)?;
    write_atomic(a.out.as_deref(), cloud.to_csv().as_bytes())?;
    Ok(Outcome::Done)
}

struct Built {
    cloud: Arc<PointCloud>,
    beta: f64,
    cap: usize,
    dim: usize,
    complex: SimplicialComplex,
    cliques: rsl_core::rips::CliqueList,
}

fn build(a: &ComplexArgs) -> Result<Built, CliError> {
    let spec = a.model.spec()?;
    let cloud = Arc::new(load_cloud(&spec, &a.cloud)?);
    let beta = required(a.beta, "beta")?;
    let cap = a.cap.unwrap_or(DEFAULT_CAP);
    let dim = a.dim.unwrap_or(DEFAULT_DIM);
    if dim >= cap {
        return Err(CliError::Usage(format!("--dim {dim} needs --cap of at least {}", dim + 1)));
    }
    let metric = a.metric.choice()?.build(&cloud)?;
    let complex = build_rips(&metric, beta, cap)?;
    let cliques = maximal_cliques(&metric, beta)?;
    Ok(Built { cloud, beta, cap, dim, complex, cliques })
}

#[derive(Serialize)]
struct RipsOutput<'a> {
    n: usize,
    beta: f64,
    cap: usize,
    counts: Vec<usize>,
    betti: Vec<usize>,
    euler_characteristic: i64,
    maximal_cliques: &'a [Vec<usize>],
    complex: &'a SimplicialComplex,
}

fn rips(a: ComplexArgs) -> Result<Outcome, CliError> {
    let b = build(&a)?;
    let out = RipsOutput {
        n: b.cloud.len(),
        beta: b.beta,
        cap: b.cap,
        counts: (0..=b.cap).map(|d| b.complex.count(d)).collect(),
        betti: betti(&b.complex, b.dim)?,
        euler_characteristic: b.complex.euler_characteristic(),
        maximal_cliques: &b.cliques.cliques,
        complex: &b.complex,
    };
    write_json(a.out.as_deref(), &out)?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct ShadowOutput<'a> {
    n: usize,
    beta: f64,
    rips_betti: Vec<usize>,
    nerve_betti: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    raster: Option<RasterResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    raster_agrees: Option<bool>,
    nerve: &'a NerveComplex,
}

fn shadow(a: ShadowArgs) -> Result<Outcome, CliError> {
    let b = build(&a.complex)?;
    if a.complex.metric.metric.is_some_and(|m| m != crate::config::MetricName::Euclidean) {
        return Err(CliError::Usage("the shadow lives in the ambient space; use the euclidean metric".into()));
    }
    let cells = ConvexCellSystem::from_cliques(b.cloud.clone(), &b.cliques)?;
    let nerve = build_nerve(&cells, b.cap)?;
    let nerve_betti = betti(&nerve.complex, b.dim)?;
    let raster = match a.raster {
        Some(res) => Some(raster_betti_2d_detailed(&cells, res)?),
        None => None,
    };
    if let Some(path) = &a.pgm {
        let grid = rasterize(&cells, a.raster.unwrap_or(512))?;
        write_atomic(Some(path), &grid.to_pgm())?;
    }
    let raster_agrees = raster.as_ref().map(|r| nerve_betti.len() > 1 && r.b0 == nerve_betti[0] && r.b1 == nerve_betti[1]);
    let out = ShadowOutput {
        n: b.cloud.len(),
        beta: b.beta,
        rips_betti: betti(&b.complex, b.dim)?,
        nerve_betti,
        raster,
        raster_agrees,
        nerve: &nerve,
    };
    write_json(a.complex.out.as_deref(), &out)?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct HomologyOutput {
    n_vertices: usize,
    counts: Vec<usize>,
    betti: Vec<usize>,
    euler_characteristic: i64,
    coefficients: &'static str,
}

fn homology(a: HomologyArgs) -> Result<Outcome, CliError> {
    let dim = a.complex.dim.unwrap_or(DEFAULT_DIM);
    let complex = match &a.complex_file {
        Some(path) => serde_json::from_str::<SimplicialComplex>(&read(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => build(&a.complex)?.complex,
    };
    if dim >= complex.cap() {
        return Err(CliError::Usage(format!("--dim {dim} needs a complex with cap above {dim}")));
    }
    let out = HomologyOutput {
        n_vertices: complex.n_vertices(),
        counts: (0..=complex.cap()).map(|d| complex.count(d)).collect(),
        betti: betti(&complex, dim)?,
        euler_characteristic: complex.euler_characteristic(),
        coefficients: "Z/2",
    };
    write_json(a.complex.out.as_deref(), &out)?;
    Ok(Outcome::Done)
}

fn finish(report: &LimitReport, out: Option<&std::path::Path>) -> Result<Outcome, CliError> {
    write_json(out, report)?;
    Ok(verdict_outcome(report.verdict))
}

fn tower(a: TowerArgs) -> Result<Outcome, CliError> {
    let model = a.model.spec()?;
    let metric = a.metric.choice()?;
    let dim = a.dim.unwrap_or(DEFAULT_DIM);
    let cap = a.cap.unwrap_or(DEFAULT_CAP);
    let seed = a.seed.unwrap_or(0);
    let tau = a.tau.unwrap_or(0.0);
    match (&a.beta_grid, &a.n_seq) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --beta-grid or --n-seq, not both".into())),
        (None, None) => Err(CliError::Usage("--beta-grid (inverse system) or --n-seq (direct system) is required".into())),
        (Some(grid), None) => {
            check_grid(grid)?;
            if a.beta.is_some() {
                return Err(CliError::Usage("--beta applies to --n-seq; use --beta-grid alone".into()));
            }
            let spec = InverseSystemSpec {
                model,
                betas: grid.clone(),
                tau,
                taus: a.tau_grid.clone(),
                object: a.object.unwrap_or_default(),
                metric,
                n: a.n,
                scheme: a.scheme.unwrap_or_default(),
                seed,
                dim,
                cap,
            };
            finish(&run_inverse_system(&spec)?, a.out.as_deref())
        }
        (None, Some(ns)) => {
            if a.tau_grid.is_some() || a.object.is_some() || a.n.is_some() {
                return Err(CliError::Usage("--tau-grid, --object and --n apply to --beta-grid".into()));
            }
            let spec = DirectSystemSpec {
                model,
                beta: required(a.beta, "beta")?,
                ns: ns.clone(),
                tau,
                seed,
                metric,
                dim,
                cap,
            };
            finish(&run_direct_system(&spec)?, a.out.as_deref())
        }
    }
}

fn compare(a: CompareArgs) -> Result<Outcome, CliError> {
    let grid = required(a.beta_grid, "beta-grid")?;
    check_grid(&grid)?;
    let spec = ComparabilitySpec {
        model: a.model.spec()?,
        betas: grid,
        tau: a.tau.unwrap_or(0.0),
        epsilon: required(a.epsilon, "epsilon")?,
        n: a.n,
        scheme: a.scheme.unwrap_or_default(),
        seed: a.seed.unwrap_or(0),
        dim: a.dim.unwrap_or(DEFAULT_DIM),
        cap: a.cap.unwrap_or(DEFAULT_CAP),
        delta0: a.delta0,
        kappa1: a.kappa1.unwrap_or(1.5),
        kappa2: a.kappa2.unwrap_or(1.05),
    };
    finish(&run_metric_comparability(&spec)?, a.out.as_deref())
}

fn project(a: ProjectArgs) -> Result<Outcome, CliError> {
    let spec = ProjectionSpec {
        model: a.model.spec()?,
        beta: required(a.beta, "beta")?,
        n: required(a.n, "n")?,
        scheme: a.scheme.unwrap_or_default(),
        seed: a.seed.unwrap_or(0),
        dim: a.dim.unwrap_or(DEFAULT_DIM),
        cap: a.cap.unwrap_or(DEFAULT_CAP),
    };
    finish(&run_projection_check(&spec)?, a.out.as_deref())
}

fn reconstruct(a: ReconstructArgs) -> Result<Outcome, CliError> {
    let spec = a.model.spec()?;
    let model = Model::new(spec.clone())?;
    let cloud = load_cloud(&spec, &a.cloud)?;
    let result = build_curve_k(
        &model,
        &cloud,
        required(a.beta, "beta")?,
        a.cloud.tau.unwrap_or(0.0),
        required(a.zeta, "zeta")?,
    )?;
    write_json(a.out.as_deref(), &result)?;
    if let Some(path) = &a.curve_out {
        if let Some(csv) = curve_csv(&result) {
            write_atomic(Some(path), csv.as_bytes())?;
        }
    }
    Ok(verdict_outcome(result.verdict))
}

fn oracle(a: OracleArgs) -> Result<Outcome, CliError> {
    let defaults = OracleConfig::default();
    let config = OracleConfig {
        instances: a.instances.unwrap_or(defaults.instances),
        hull_resolution: a.resolution.unwrap_or(defaults.hull_resolution),
        seed: a.seed.unwrap_or(defaults.seed),
        ..defaults
    };
    let report = cross_check(&config)?;
    write_json(a.out.as_deref(), &report)?;
    Ok(if report.agrees() { Outcome::Done } else { Outcome::Inconsistent })
}

fn plot(a: PlotArgs) -> Result<Outcome, CliError> {
    let report = required(a.report, "report")?;
    let dir: PathBuf = required(a.out_dir, "out-dir")?;
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    match parse_report(&read(&report)?)? {
        Report::Limit(r) => {
            write_atomic(Some(&dir.join("stages.csv")), stages_csv(&r).as_bytes())?;
            write_atomic(Some(&dir.join("rank_table.csv")), rank_table_csv(&r).as_bytes())?;
        }
        Report::Reconstruction(r) => {
            let csv = curve_csv(&r).ok_or_else(|| {
                CliError::Usage("reconstruction report has no curve (its hypotheses failed)".into())
            })?;
            write_atomic(Some(&dir.join("curve.csv")), csv.as_bytes())?;
        }
    }
    Ok(Outcome::Done)
}
