use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::MetricMatrix;
use crate::rips::{Simplex, SimplicialComplex, SimplicialMap};

/// Default dimension cap for Rips complexes.
pub const DEFAULT_CAP: usize = 2;
/// Default limit on the number of maximal cliques.
pub const DEFAULT_CLIQUE_BUDGET: usize = 200_000;

fn check_scale(beta: f64) -> Result<()> {
    if !(beta > 0.0) || beta.is_nan() {
        return Err(Error::InvalidInput(format!("scale must be positive, got {beta}")));
    }
    Ok(())
}

/// Forward neighbours at distance strictly below `beta`.
fn upper_neighbours(metric: &MetricMatrix, beta: f64) -> Vec<Vec<usize>> {
    let n = metric.len();
    (0..n)
        .map(|v| ((v + 1)..n).filter(|&w| metric.get(v, w) < beta).collect())
        .collect()
}

/// The Vietoris-Rips complex at scale `beta`: every vertex set of diameter
/// strictly less than `beta`, up to dimension `cap`. Infinite distances are
/// never joined.
pub fn build_rips(metric: &MetricMatrix, beta: f64, cap: usize) -> Result<SimplicialComplex> {
    check_scale(beta)?;
    if cap < 1 {
        return Err(Error::InvalidInput("dimension cap must be at least 1".into()));
    }
    let n = metric.len();
    let up = upper_neighbours(metric, beta);
    // Expand from each start vertex in increasing order; within one start the
    // depth-first order is lexicographic.
    let per_start: Vec<Vec<Vec<Simplex>>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); cap + 1];
            let mut stack = vec![v];
            expand(&up, &up[v], cap, &mut stack, &mut by_dim);
            by_dim
        })
        .collect();
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); cap + 1];
    for part in per_start {
        for (d, list) in part.into_iter().enumerate() {
            by_dim[d].extend(list);
        }
    }
    for list in &mut by_dim {
        list.sort_unstable();
    }
    Ok(SimplicialComplex::from_sorted(n, cap, by_dim))
}

fn expand(
    up: &[Vec<usize>],
    candidates: &[usize],
    cap: usize,
    stack: &mut Vec<usize>,
    out: &mut [Vec<Simplex>],
) {
    if stack.len() == cap + 1 {
        return;
    }
    for (i, &w) in candidates.iter().enumerate() {
        stack.push(w);
        out[stack.len() - 1].push(stack.clone());
        // Candidates after w that are also neighbours of w (both lists sorted).
        let next: Vec<usize> = candidates[i + 1..]
            .iter()
            .copied()
            .filter(|x| up[w].binary_search(x).is_ok())
            .collect();
        expand(up, &next, cap, stack, out);
        stack.pop();
    }
}

/// Inclusion-maximal vertex sets of pairwise distance `< beta`, sorted
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueList {
    pub n: usize,
    pub beta: f64,
    pub cliques: Vec<Simplex>,
}

impl CliqueList {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// Lowest index of a clique containing the sorted vertex set `s`.
    pub fn first_containing(&self, s: &[usize]) -> Option<usize> {
        self.cliques.iter().position(|c| is_sorted_subset(s, c))
    }
}

pub(crate) fn is_sorted_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

pub fn maximal_cliques(metric: &MetricMatrix, beta: f64) -> Result<CliqueList> {
    maximal_cliques_with_budget(metric, beta, DEFAULT_CLIQUE_BUDGET)
}

/// Bron-Kerbosch with Tomita pivoting over bitset adjacency.
pub fn maximal_cliques_with_budget(metric: &MetricMatrix, beta: f64, budget: usize) -> Result<CliqueList> {
    check_scale(beta)?;
    let n = metric.len();
    let words = n.div_ceil(64).max(1);
    let mut adj = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && metric.get(i, j) < beta {
                adj[i][j / 64] |= 1 << (j % 64);
            }
        }
    }
    let mut p = vec![0u64; words];
    for v in 0..n {
        p[v / 64] |= 1 << (v % 64);
    }
    let mut search = CliqueSearch { adj: &adj, budget, found: Vec::new() };
    search.run(&mut Vec::new(), p, vec![0u64; words])?;
    let mut cliques = search.found;
    cliques.sort_unstable();
    Ok(CliqueList { n, beta, cliques })
}

struct CliqueSearch<'a> {
    adj: &'a [Vec<u64>],
    budget: usize,
    found: Vec<Simplex>,
}

fn bits(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let b = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(w * 64 + b)
        })
    })
}

fn and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn count_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

impl CliqueSearch<'_> {
    fn run(&mut self, r: &mut Vec<usize>, mut p: Vec<u64>, mut x: Vec<u64>) -> Result<()> {
        if p.iter().all(|&w| w == 0) {
            if x.iter().all(|&w| w == 0) {
                if self.found.len() >= self.budget {
                    return Err(Error::CliqueBudget { budget: self.budget, found: self.found.len() + 1 });
                }
                let mut c = r.clone();
                c.sort_unstable();
                self.found.push(c);
            }
            return Ok(());
        }
        let pivot = bits(&p)
            .chain(bits(&x))
            .max_by_key(|&u| (count_and(&p, &self.adj[u]), std::cmp::Reverse(u)))
            .expect("P is nonempty");
        let candidates: Vec<usize> =
            bits(&p).filter(|&v| self.adj[pivot][v / 64] & (1 << (v % 64)) == 0).collect();
        for v in candidates {
            r.push(v);
            let (np, nx) = (and(&p, &self.adj[v]), and(&x, &self.adj[v]));
            self.run(r, np, nx)?;
            r.pop();
            p[v / 64] &= !(1 << (v % 64));
            x[v / 64] |= 1 << (v % 64);
        }
        Ok(())
    }
}

/// A Rips complex together with the metric and scale it was built from.
#[derive(Clone, Debug)]
pub struct RipsComplex {
    pub metric: Arc<MetricMatrix>,
    pub beta: f64,
    pub complex: Arc<SimplicialComplex>,
}

impl RipsComplex {
    pub fn build(metric: Arc<MetricMatrix>, beta: f64, cap: usize) -> Result<Self> {
        let complex = Arc::new(build_rips(&metric, beta, cap)?);
        Ok(Self { metric, beta, complex })
    }
}

/// The inclusion `R_gamma(S) -> R_beta(T)` for `S` embedded in `T` by
/// `embedding` (source index to target index) and `gamma <= beta`.
pub fn inclusion_map(src: &RipsComplex, dst: &RipsComplex, embedding: &[usize]) -> Result<SimplicialMap> {
    if src.beta > dst.beta {
        return Err(Error::ScaleOrder { source_scale: src.beta, target_scale: dst.beta });
    }
    let n = src.metric.len();
    if embedding.len() != n {
        return Err(Error::Containment(format!(
            "embedding has {} entries for {n} source points",
            embedding.len()
        )));
    }
    let mut seen = vec![false; dst.metric.len()];
    for &e in embedding {
        if e >= seen.len() || std::mem::replace(&mut seen[e], true) {
            return Err(Error::Containment(format!("embedding is not injective into the target at {e}")));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (src.metric.get(i, j), dst.metric.get(embedding[i], embedding[j]));
            if a != b {
                return Err(Error::Containment(format!(
                    "source metric d({i},{j}) = {a} differs from target d = {b}"
                )));
            }
        }
    }
    SimplicialMap::new(src.complex.clone(), dst.complex.clone(), embedding.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{euclidean_metric, PointCloud};

    fn square() -> MetricMatrix {
        euclidean_metric(&PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap())
    }

    fn pair(d: f64) -> MetricMatrix {
        MetricMatrix::from_rows(&[vec![0.0, d], vec![d, 0.0]]).unwrap()
    }

    #[test]
    fn strict_threshold() {
        assert_eq!(build_rips(&pair(1.0), 1.0, 2).unwrap().count(1), 0);
        assert_eq!(build_rips(&pair(1.0), 1.01, 2).unwrap().count(1), 1);
        assert_eq!(build_rips(&pair(f64::INFINITY), 1e300, 2).unwrap().count(1), 0);
    }

    #[test]
    fn square_complex_and_cliques() {
        let k = build_rips(&square(), 1.1, 2).unwrap();
        assert_eq!((k.count(0), k.count(1), k.count(2)), (4, 4, 0));
        let c = maximal_cliques(&square(), 1.1).unwrap();
        assert_eq!(c.cliques, vec![vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn clique_small_cases() {
        let tri = MetricMatrix::from_rows(&[vec![0.0, 0.1, 0.2], vec![0.1, 0.0, 0.1], vec![0.2, 0.1, 0.0]])
            .unwrap();
        assert_eq!(maximal_cliques(&tri, 0.5).unwrap().cliques, vec![vec![0, 1, 2]]);
        let iso = MetricMatrix::from_rows(&[vec![0.0, 0.1, 9.0], vec![0.1, 0.0, 9.0], vec![9.0, 9.0, 0.0]])
            .unwrap();
        assert_eq!(maximal_cliques(&iso, 0.5).unwrap().cliques, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn clique_budget_fails_fast() {
        let err = maximal_cliques_with_budget(&square(), 1.1, 3).unwrap_err();
        assert!(matches!(err, Error::CliqueBudget { budget: 3, .. }));
    }

    #[test]
    fn inclusion_examples() {
        let m = Arc::new(square());
        let small = RipsComplex::build(m.clone(), 0.3, 2).unwrap();
        let big = RipsComplex::build(m.clone(), 0.5, 2).unwrap();
        let f = inclusion_map(&small, &big, &[0, 1, 2, 3]).unwrap();
        assert_eq!(f.vertex_map(), &[0, 1, 2, 3]);
        assert!(matches!(inclusion_map(&big, &small, &[0, 1, 2, 3]), Err(Error::ScaleOrder { .. })));
        let sub = RipsComplex::build(Arc::new(m.restrict(&[0, 1])), 1.1, 2).unwrap();
        let full = RipsComplex::build(m, 1.1, 2).unwrap();
        assert!(inclusion_map(&sub, &full, &[0, 1]).is_ok());
        assert!(matches!(inclusion_map(&sub, &full, &[0, 2]), Err(Error::Containment(_))));
    }
}
