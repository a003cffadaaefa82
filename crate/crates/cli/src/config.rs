use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use rsl_core::limits::{MetricChoice, ObjectKind};
use rsl_core::models::{ConstantOverrides, ModelSpace, ModelSpec, SamplingScheme};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "rsl", version, about = "Rips complexes, shadows and homology towers of sampled model spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample points from a model and write them as CSV.
    Sample(Wrapped<SampleArgs>),
    /// Build a Rips complex and report its size, cliques and Betti numbers.
    Rips(Wrapped<ComplexArgs>),
    /// Build the shadow nerve of a Rips complex, optionally checked by rasterizing.
    Shadow(Wrapped<ShadowArgs>),
    /// Betti numbers of a complex given as JSON or built from a sample.
    Homology(Wrapped<HomologyArgs>),
    /// Homology tower over decreasing scales (inverse) or growing samples (direct).
    Tower(Wrapped<TowerArgs>),
    /// Compare Euclidean and epsilon-path towers on one noisy sample.
    CompareMetrics(Wrapped<CompareArgs>),
    /// Compare a Rips complex with its shadow through the projection.
    ProjectCheck(Wrapped<ProjectArgs>),
    /// Reconstruct a closed curve from a noisy sample.
    Reconstruct(Wrapped<ReconstructArgs>),
    /// Cross-check the pipeline against brute-force oracles.
    #[command(hide = true)]
    Oracle(Wrapped<OracleArgs>),
    /// Turn a report into CSV tables for plotting.
    PlotData(Wrapped<PlotArgs>),
}

/// Per-command options plus an optional JSON config file. Flags override
/// values from the file.
#[derive(Debug, Args)]
pub struct Wrapped<T: Args> {
    /// JSON file with the same options, keyed by flag name.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub args: T,
}

/// Parses a kebab-case name into any serde enum from the core crate.
fn kebab<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn scheme(s: &str) -> Result<SamplingScheme, String> {
    kebab(s)
}

fn object(s: &str) -> Result<ObjectKind, String> {
    kebab(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    Circle,
    Trefoil,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricName {
    Euclidean,
    EpsilonPath,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ModelArgs {
    /// Model space [default: circle].
    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    /// Circle radius [default: 1].
    #[arg(long)]
    pub radius: Option<f64>,
    /// Trefoil scale [default: 1].
    #[arg(long)]
    pub scale: Option<f64>,
    /// JSON model record `{kind, params, overrides?}`; replaces --model.
    #[arg(long, value_name = "PATH")]
    pub model_file: Option<PathBuf>,
    /// Full model record, accepted from the config file only.
    #[arg(skip)]
    pub model_spec: Option<ModelSpec>,
    /// Override the normal injectivity radius.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Override the homotopy-closeness radius.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Override the distortion range.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Override the distortion bound.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Override the tube radius.
    #[arg(long)]
    pub tube_radius: Option<f64>,
}

impl ModelArgs {
    pub fn spec(&self) -> Result<ModelSpec, CliError> {
        let mut spec = if let Some(spec) = &self.model_spec {
            spec.clone()
        } else if let Some(path) = &self.model_file {
            let text = read(path)?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        } else {
            let space = match self.model.unwrap_or(ModelName::Circle) {
                ModelName::Circle => ModelSpace::circle(self.radius.unwrap_or(1.0)),
                ModelName::Trefoil => ModelSpace::Trefoil { scale: self.scale.unwrap_or(1.0) },
                ModelName::Theta => ModelSpace::theta_graph(),
            };
            ModelSpec::from(space)
        };
        let o = &mut spec.overrides;
        let flags = ConstantOverrides {
            eta: self.eta,
            rho: self.rho,
            delta: self.delta,
            xi: self.xi,
            tube_radius: self.tube_radius,
        };
        o.eta = flags.eta.or(o.eta);
        o.rho = flags.rho.or(o.rho);
        o.delta = flags.delta.or(o.delta);
        o.xi = flags.xi.or(o.xi);
        o.tube_radius = flags.tube_radius.or(o.tube_radius);
        Ok(spec)
    }
}

/// Where points come from: a CSV file, or a sample of the model.
#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CloudArgs {
    /// CSV of points, one per row; replaces sampling.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Sample size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Noise bound [default: 0].
    #[arg(long)]
    pub tau: Option<f64>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sampling scheme: stratified or uniform-arc [default: stratified].
    #[arg(long, value_parser = scheme)]
    pub scheme: Option<SamplingScheme>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MetricArgs {
    /// Metric on the sample [default: euclidean].
    #[arg(long, value_enum)]
    pub metric: Option<MetricName>,
    /// Step bound of the epsilon-path metric.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl MetricArgs {
    pub fn choice(&self) -> Result<MetricChoice, CliError> {
        match (self.metric.unwrap_or(MetricName::Euclidean), self.epsilon) {
            (MetricName::Euclidean, _) => Ok(MetricChoice::Euclidean),
            (MetricName::EpsilonPath, Some(epsilon)) => Ok(MetricChoice::EpsilonPath { epsilon }),
            (MetricName::EpsilonPath, None) => Err(CliError::Usage("--metric epsilon-path needs --epsilon".into())),
        }
    }
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub cloud: CloudArgs,
    /// Output file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ComplexArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub cloud: CloudArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub metric: MetricArgs,
    /// Scale: simplices have diameter strictly below it.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Largest simplex dimension kept [default: 2].
    #[arg(long)]
    pub cap: Option<usize>,
    /// Highest homology dimension reported [default: 1].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Output file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ShadowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub complex: ComplexArgs,
    /// Also rasterize the shadow at this resolution (planar samples only).
    #[arg(long)]
    pub raster: Option<usize>,
    /// Write the raster as a PGM image.
    #[arg(long, value_name = "PATH")]
    pub pgm: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct HomologyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub complex: ComplexArgs,
    /// Complex as JSON `{n, cap, simplices}`; replaces building one.
    #[arg(long = "complex", value_name = "PATH")]
    pub complex_file: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TowerArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub metric: MetricArgs,
    /// Strictly decreasing scales of an inverse system.
    #[arg(long, value_delimiter = ',')]
    pub beta_grid: Option<Vec<f64>>,
    /// Noise bound per scale, paired with --beta-grid.
    #[arg(long, value_delimiter = ',')]
    pub tau_grid: Option<Vec<f64>>,
    /// Nondecreasing sample sizes of a direct system at --beta.
    #[arg(long, value_delimiter = ',')]
    pub n_seq: Option<Vec<usize>>,
    /// Scale of a direct system.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Complex at each scale: rips or shadow-nerve [default: shadow-nerve].
    #[arg(long, value_parser = object)]
    pub object: Option<ObjectKind>,
    /// Sample size of an inverse system [default: density rule].
    #[arg(long)]
    pub n: Option<usize>,
    /// Noise bound [default: 0].
    #[arg(long)]
    pub tau: Option<f64>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sampling scheme: stratified or uniform-arc [default: stratified].
    #[arg(long, value_parser = scheme)]
    pub scheme: Option<SamplingScheme>,
    /// Highest homology dimension reported [default: 1].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Largest simplex dimension kept [default: 2].
    #[arg(long)]
    pub cap: Option<usize>,
    /// Output file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CompareArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Strictly decreasing scales.
    #[arg(long, value_delimiter = ',')]
    pub beta_grid: Option<Vec<f64>>,
    /// Noise bound [default: 0].
    #[arg(long)]
    pub tau: Option<f64>,
    /// Step bound of the epsilon-path metric.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Sample size [default: density rule].
    #[arg(long)]
    pub n: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sampling scheme: stratified or uniform-arc [default: stratified].
    #[arg(long, value_parser = scheme)]
    pub scheme: Option<SamplingScheme>,
    /// Highest homology dimension reported [default: 1].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Largest simplex dimension kept [default: 2].
    #[arg(long)]
    pub cap: Option<usize>,
    /// Pairs closer than this are checked against the bounds [default: 2 epsilon].
    #[arg(long)]
    pub delta0: Option<f64>,
    /// Allowed bound on path distance over Euclidean distance [default: 1.5].
    #[arg(long)]
    pub kappa1: Option<f64>,
    /// Allowed bound on Euclidean distance over path distance [default: 1.05].
    #[arg(long)]
    pub kappa2: Option<f64>,
    /// Output file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ProjectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Scale: simplices have diameter strictly below it.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Sample size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sampling scheme: stratified or uniform-arc [default: stratified].
    #[arg(long, value_parser = scheme)]
    pub scheme: Option<SamplingScheme>,
    /// Highest homology dimension reported [default: 1].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Largest simplex dimension kept [default: 2].
    #[arg(long)]
    pub cap: Option<usize>,
    /// Output file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReconstructArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub cloud: CloudArgs,
    /// Density radius of the footpoints along the model.
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Scale of the Rips complex the curve is read from.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Output file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write the curve vertices as CSV.
    #[arg(long, value_name = "PATH")]
    pub curve_out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OracleArgs {
    /// Random instances [default: 200].
    #[arg(long)]
    pub instances: Option<usize>,
    /// Grid points per axis [default: 64].
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PlotArgs {
    /// Report JSON written by tower, compare-metrics, project-check or reconstruct.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Directory for the CSV tables.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Merges flags over the config file. Keys are flag names; `command`, when
/// present, must name the subcommand being run.
pub fn resolve<T>(name: &str, wrapped: Wrapped<T>) -> Result<T, CliError>
where
    T: Args + Serialize + DeserializeOwned,
{
    let Some(path) = wrapped.config else {
        return Ok(wrapped.args);
    };
    let text = read(&path)?;
    let usage = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
    let mut file: Map<String, Value> = match serde_json::from_str(&text).map_err(|e| usage(e.to_string()))? {
        Value::Object(m) => m,
        _ => return Err(usage("config must be a JSON object".into())),
    };
    if let Some(cmd) = file.remove("command") {
        if cmd.as_str() != Some(name) {
            return Err(usage(format!("config is for command {cmd}, not {name}")));
        }
    }
    let known = known_keys::<T>()?;
    if let Some(unknown) = file.keys().find(|k| !known.contains(k.as_str())) {
        return Err(usage(format!("unknown option `{unknown}`")));
    }
    let flags = match serde_json::to_value(&wrapped.args).map_err(|e| usage(e.to_string()))? {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    for (k, v) in flags {
        if !v.is_null() {
            file.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(file)).map_err(|e| usage(e.to_string()))
}

/// Every option name of `T`, from the serialization of an all-default value.
fn known_keys<T: Serialize + DeserializeOwned>() -> Result<BTreeSet<String>, CliError> {
    let empty: T = serde_json::from_value(Value::Object(Map::new())).map_err(|e| CliError::Usage(e.to_string()))?;
    match serde_json::to_value(&empty) {
        Ok(Value::Object(m)) => Ok(m.keys().cloned().collect()),
        _ => Ok(BTreeSet::new()),
    }
}
