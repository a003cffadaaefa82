//! Brute-force reference implementations used to cross-check the main
//! pipeline. They use different algorithms and pivot orders on purpose and
//! may be exponentially slower.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::homology::betti;
use crate::models::{euclidean_metric, MetricMatrix, PointCloud};
use crate::rips::{build_rips, maximal_cliques, Simplex, SimplicialComplex};
use crate::shadow::{hulls_intersect, ConvexCellSystem};

/// Budgets for the oracles and the randomized cross-check batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// Largest vertex count accepted by [`brute_rips`].
    pub rips_max_vertices: usize,
    /// Largest simplex count accepted by [`brute_homology`].
    pub homology_budget: usize,
    /// Grid points per axis for [`brute_hull_intersection`].
    pub hull_resolution: usize,
    /// Number of random instances in a cross-check batch.
    pub instances: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { rips_max_vertices: 20, homology_budget: 5000, hull_resolution: 64, instances: 200, seed: 0 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rips_max_vertices == 0 || self.homology_budget == 0 || self.hull_resolution == 0 || self.instances == 0 {
            return Err(Error::InvalidInput("oracle budgets must be positive".into()));
        }
        Ok(())
    }
}

/// Rips complex by checking the diameter of every vertex subset of size at
/// most `cap + 1`.
pub fn brute_rips(metric: &MetricMatrix, beta: f64, cap: usize) -> Result<SimplicialComplex> {
    brute_rips_with_limit(metric, beta, cap, OracleConfig::default().rips_max_vertices)
}

pub fn brute_rips_with_limit(metric: &MetricMatrix, beta: f64, cap: usize, limit: usize) -> Result<SimplicialComplex> {
    let n = metric.len();
    if n > limit.min(30) {
        return Err(Error::Budget(format!("brute-force Rips accepts at most {limit} points, got {n}")));
    }
    let mut simplices = Vec::new();
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() as usize > cap + 1 {
            continue;
        }
        let s: Simplex = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let ok = s.iter().all(|&i| s.iter().all(|&j| i == j || metric.get(i, j) < beta));
        if ok {
            simplices.push(s);
        }
    }
    SimplicialComplex::from_simplices(n, cap, simplices)
}

/// Rank over Z/2 of a dense matrix given as bit rows, by forward elimination
/// choosing the lowest set column as pivot.
fn dense_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let words = rows.first().map_or(0, Vec::len);
    for col in 0..words * 64 {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & b != 0 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the boundary map from dimension `d` to `d - 1`.
fn boundary_rank(complex: &SimplicialComplex, d: usize) -> usize {
    if d == 0 || d > complex.cap() || complex.count(d) == 0 {
        return 0;
    }
    let faces: HashMap<&[usize], usize> =
        complex.simplices(d - 1).iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let cols = complex.count(d);
    let words = cols.div_ceil(64);
    // One bit row per face; column j is the j-th d-simplex.
    let mut rows = vec![vec![0u64; words]; complex.count(d - 1)];
    for (j, s) in complex.simplices(d).iter().enumerate() {
        for skip in 0..s.len() {
            let face: Vec<usize> = s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
            let i = faces[face.as_slice()];
            rows[i][j / 64] |= 1 << (j % 64);
        }
    }
    dense_rank(rows)
}

/// Betti number in dimension `m` by dense elimination.
pub fn brute_homology(complex: &SimplicialComplex, m: usize) -> Result<usize> {
    brute_homology_with_budget(complex, m, OracleConfig::default().homology_budget)
}

pub fn brute_homology_with_budget(complex: &SimplicialComplex, m: usize, budget: usize) -> Result<usize> {
    if complex.total() > budget {
        return Err(Error::Budget(format!("{} simplices exceed the oracle budget {budget}", complex.total())));
    }
    if m >= complex.cap() {
        return Err(Error::Precondition(format!(
            "dimension {m} needs simplices of dimension {} but the cap is {}",
            m + 1,
            complex.cap()
        )));
    }
    Ok(complex.count(m) - boundary_rank(complex, m) - boundary_rank(complex, m + 1))
}

/// Exact membership of `x` in the convex hull of `points`: some affinely
/// independent subset has nonnegative barycentric coordinates for `x`.
fn in_hull_exact(points: &[Vec<BigRational>], x: &[BigRational]) -> bool {
    let d = x.len();
    let n = points.len();
    let max_k = n.min(d + 1);
    let mut subset = Vec::new();
    fn rec(
        points: &[Vec<BigRational>],
        x: &[BigRational],
        start: usize,
        max_k: usize,
        subset: &mut Vec<usize>,
    ) -> bool {
        if !subset.is_empty() && float_may_contain(points, subset, x) && barycentric_nonnegative(points, subset, x) {
            return true;
        }
        if subset.len() == max_k {
            return false;
        }
        for i in start..points.len() {
            subset.push(i);
            if rec(points, x, i + 1, max_k, subset) {
                return true;
            }
            subset.pop();
        }
        false
    }
    rec(points, x, 0, max_k, &mut subset)
}

/// Float screen for [`barycentric_nonnegative`]: false only when the float
/// solution is clearly outside, so every borderline case is decided exactly.
fn float_may_contain(points: &[Vec<BigRational>], subset: &[usize], x: &[BigRational]) -> bool {
    use num_traits::ToPrimitive;
    let f = |v: &BigRational| v.to_f64().unwrap_or(f64::NAN);
    let k = subset.len();
    let mut rows: Vec<Vec<f64>> = (0..x.len())
        .map(|r| {
            let mut row: Vec<f64> = subset.iter().map(|&i| f(&points[i][r])).collect();
            row.push(f(&x[r]));
            row
        })
        .collect();
    rows.push(vec![1.0; k + 1]);
    let scale = rows.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-7 * scale;
    let mut pivot_row = 0;
    for col in 0..k {
        let p = (pivot_row..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
        let Some(p) = p.filter(|&p| rows[p][col].abs() > tol) else {
            return true;
        };
        rows.swap(pivot_row, p);
        let pv = rows[pivot_row][col];
        for v in rows[pivot_row].iter_mut() {
            *v /= pv;
        }
        let pr = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row {
                let c = row[col];
                for (v, p) in row.iter_mut().zip(&pr) {
                    *v -= c * p;
                }
            }
        }
        pivot_row += 1;
    }
    rows[k..].iter().all(|r| r[k].abs() <= tol) && rows[..k].iter().all(|r| r[k] >= -tol)
}

/// Solves `sum l_i p_i = x`, `sum l_i = 1` for the chosen points by exact
/// elimination. True when the solution is unique and nonnegative.
fn barycentric_nonnegative(points: &[Vec<BigRational>], subset: &[usize], x: &[BigRational]) -> bool {
    let k = subset.len();
    let d = x.len();
    let mut rows: Vec<Vec<BigRational>> = (0..d)
        .map(|r| {
            let mut row: Vec<BigRational> = subset.iter().map(|&i| points[i][r].clone()).collect();
            row.push(x[r].clone());
            row
        })
        .collect();
    let mut ones = vec![exact::int(1); k];
    ones.push(exact::int(1));
    rows.push(ones);
    let mut pivot_row = 0;
    for col in 0..k {
        let Some(p) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            return false;
        };
        rows.swap(pivot_row, p);
        let inv = rows[pivot_row][col].recip();
        for v in rows[pivot_row].iter_mut() {
            *v *= &inv;
        }
        let pr = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pr) {
                    *v -= &f * p;
                }
            }
        }
        pivot_row += 1;
    }
    // Remaining rows must be consistent.
    if rows[k..].iter().any(|r| !r[k].is_zero()) {
        return false;
    }
    rows[..k].iter().all(|r| !r[k].is_negative())
}

/// Result of grid sampling for a common point of several hulls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridHit {
    pub hit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    pub grid_points: usize,
}

/// Searches a grid over the common bounding box of the cells for a point in
/// every hull. A hit is certain; a miss is advisory, since the grid can step
/// over thin intersections.
pub fn brute_hull_intersection(cells: &ConvexCellSystem, ids: &[usize], resolution: usize) -> Result<GridHit> {
    let d = cells.dim();
    if d > 3 {
        return Err(Error::InvalidInput(format!("grid oracle supports dimension at most 3, got {d}")));
    }
    if ids.is_empty() || resolution == 0 {
        return Err(Error::InvalidInput("need at least one cell and a positive resolution".into()));
    }
    if let Some(&bad) = ids.iter().find(|&&i| i >= cells.len()) {
        return Err(Error::InvalidInput(format!("cell index {bad} out of range")));
    }
    let coords = cells.coords();
    let mut lo = vec![f64::NEG_INFINITY; d];
    let mut hi = vec![f64::INFINITY; d];
    for &c in ids {
        let pts: Vec<&[f64]> = cells.cell(c).iter().map(|&v| coords.point(v)).collect();
        for k in 0..d {
            let cmin = pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let cmax = pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            lo[k] = lo[k].max(cmin);
            hi[k] = hi[k].min(cmax);
        }
    }
    if (0..d).any(|k| lo[k] > hi[k]) {
        return Ok(GridHit { hit: false, witness: None, grid_points: 0 });
    }
    let hulls: Vec<Vec<Vec<BigRational>>> = ids
        .iter()
        .map(|&c| cells.cell(c).iter().map(|&v| exact::rational_vec(coords.point(v))).collect())
        .collect();
    let axis = |k: usize, i: usize| -> f64 {
        if resolution == 1 || lo[k] == hi[k] {
            lo[k]
        } else {
            lo[k] + (hi[k] - lo[k]) * i as f64 / (resolution - 1) as f64
        }
    };
    let per_axis: Vec<usize> = (0..d).map(|k| if lo[k] == hi[k] { 1 } else { resolution }).collect();
    let total: usize = per_axis.iter().product();
    let witness = (0..total).into_par_iter().find_map_first(|mut flat| {
        let mut x = vec![0.0; d];
        for k in 0..d {
            x[k] = axis(k, flat % per_axis[k]);
            flat /= per_axis[k];
        }
        let xr = exact::rational_vec(&x);
        hulls.iter().all(|h| in_hull_exact(h, &xr)).then_some(x)
    });
    Ok(GridHit { hit: witness.is_some(), witness, grid_points: total })
}

/// Summary of a randomized batch comparing the main pipeline with the oracles.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub instances: usize,
    pub rips_mismatches: usize,
    pub homology_checks: usize,
    pub homology_mismatches: usize,
    pub hull_checks: usize,
    /// Pairs where the exact test found an intersection the grid missed.
    pub hull_advisory: usize,
    /// Pairs where the grid found a point the exact test rejected.
    pub hull_mismatches: usize,
    pub log: Vec<String>,
}

impl CrossCheckReport {
    pub fn agrees(&self) -> bool {
        self.rips_mismatches == 0 && self.homology_mismatches == 0 && self.hull_mismatches == 0
    }
}

/// Random planar clouds of up to 12 points at random scales, checked against
/// every oracle. Deterministic in the seed.
pub fn cross_check(config: &OracleConfig) -> Result<CrossCheckReport> {
    config.validate()?;
    let outcomes = (0..config.instances)
        .into_par_iter()
        .map(|i| check_instance(config, i as u64))
        .collect::<Result<Vec<_>>>()?;
    let mut report = CrossCheckReport { instances: config.instances, ..Default::default() };
    for o in outcomes {
        report.rips_mismatches += o.rips_mismatches;
        report.homology_checks += o.homology_checks;
        report.homology_mismatches += o.homology_mismatches;
        report.hull_checks += o.hull_checks;
        report.hull_advisory += o.hull_advisory;
        report.hull_mismatches += o.hull_mismatches;
        report.log.extend(o.log);
    }
    Ok(report)
}

fn check_instance(config: &OracleConfig, i: u64) -> Result<CrossCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i));
    let n = rng.gen_range(3..=12.min(config.rips_max_vertices.max(3)));
    let rows: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let cloud = Arc::new(PointCloud::from_rows(&rows)?);
    let metric = euclidean_metric(&cloud);
    let beta = rng.gen_range(0.2..1.2);
    let mut out = CrossCheckReport::default();
    let fast = build_rips(&metric, beta, 3)?;
    let slow = brute_rips_with_limit(&metric, beta, 3, config.rips_max_vertices)?;
    if fast != slow {
        out.rips_mismatches += 1;
        out.log.push(format!("instance {i}: Rips complexes differ at beta {beta}"));
    }
    if fast.total() <= config.homology_budget {
        let main_betti = betti(&fast, 2)?;
        for (m, &main) in main_betti.iter().enumerate() {
            out.homology_checks += 1;
            let reference = brute_homology_with_budget(&fast, m, config.homology_budget)?;
            if main != reference {
                out.homology_mismatches += 1;
                out.log.push(format!("instance {i}: Betti {m} is {main}, oracle says {reference}"));
            }
        }
    }
    let cliques = maximal_cliques(&metric, beta)?;
    let cells = ConvexCellSystem::from_cliques(cloud, &cliques)?;
    for a in 0..cells.len() {
        for b in (a + 1)..cells.len() {
            out.hull_checks += 1;
            let lp = hulls_intersect(&cells, &[a, b])?;
            let grid = brute_hull_intersection(&cells, &[a, b], config.hull_resolution)?.hit;
            match (lp, grid) {
                (true, false) => {
                    out.hull_advisory += 1;
                    out.log.push(format!("instance {i}: cells {a},{b} meet but the grid found no common point"));
                }
                (false, true) => {
                    out.hull_mismatches += 1;
                    out.log.push(format!("instance {i}: grid found a common point of cells {a},{b}"));
                }
                _ => {}
            }
        }
    }
    Ok(out)
}
