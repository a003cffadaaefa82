use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom;
use crate::models::PointCloud;

/// A finite metric as a dense symmetric matrix. Entries may be `+inf` to
/// encode pairs in different components of a path metric.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl MetricMatrix {
    /// Validates symmetry, zero diagonal and nonnegativity. The triangle
    /// inequality is audited separately by [`MetricMatrix::triangle_violation`].
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "metric of size {n} needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal entry at {i}")));
            }
            for j in (i + 1)..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if a.is_nan() || a < 0.0 {
                    return Err(Error::InvalidInput(format!("invalid distance {a} at ({i},{j})")));
                }
                if a != b {
                    return Err(Error::InvalidInput(format!(
                        "asymmetric metric: d({i},{j}) = {a} but d({j},{i}) = {b}"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("metric rows must form a square matrix".into()));
        }
        Self::new(n, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest finite entry, or 0 for fewer than two points.
    pub fn max_finite(&self) -> f64 {
        self.data.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max)
    }

    /// Restriction to `indices`, reindexed in that order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let m = indices.len();
        let mut data = vec![0.0; m * m];
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                data[a * m + b] = self.get(i, j);
            }
        }
        Self { n: m, data }
    }

    /// First triple `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k)` beyond a
    /// relative slack of `1e-12`, if any.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let direct = self.get(i, k);
                    let via = self.get(i, j) + self.get(j, k);
                    if direct > via * (1.0 + 1e-12) + 1e-15 {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

/// Pairwise Euclidean distances of a cloud.
pub fn euclidean_metric(cloud: &PointCloud) -> MetricMatrix {
    let n = cloud.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = geom::dist(cloud.point(i), cloud.point(j));
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    MetricMatrix { n, data }
}

/// Shortest-path metric on the graph joining pairs at Euclidean distance
/// strictly below `epsilon`, weighted by Euclidean length. Pairs in different
/// components are at distance `+inf`.
pub fn epsilon_path_metric(cloud: &PointCloud, epsilon: f64) -> Result<MetricMatrix> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let eucl = euclidean_metric(cloud);
    let n = eucl.n;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|src| dense_dijkstra(&eucl, epsilon, src))
        .collect();
    let mut data = rows.concat();
    // Dijkstra from both ends can disagree in the last ulp; keep the matrix
    // exactly symmetric.
    for i in 0..n {
        for j in (i + 1)..n {
            let d = data[i * n + j].min(data[j * n + i]);
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(MetricMatrix { n, data })
}

fn dense_dijkstra(eucl: &MetricMatrix, epsilon: f64, src: usize) -> Vec<f64> {
    let n = eucl.n;
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[src] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        let row = eucl.row(u);
        for v in 0..n {
            let w = row[v];
            if !done[v] && w < epsilon {
                let cand = best + w;
                if cand < dist[v] {
                    dist[v] = cand;
                }
            }
        }
    }
    dist
}

/// Hausdorff distance between two finite sets, exact over the sets.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty);
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// `sup_{x in a} inf_{y in b} |x - y|` for finite sets.
pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    a.iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|x| b.iter().map(|y| geom::dist(x, y)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(rows: &[&[f64]]) -> PointCloud {
        PointCloud::from_rows(rows).unwrap()
    }

    #[test]
    fn euclidean_examples() {
        let m = euclidean_metric(&cloud(&[&[0.0, 0.0], &[3.0, 4.0]]));
        assert_eq!(m.get(0, 1), 5.0);
        let single = euclidean_metric(&cloud(&[&[1.0, 1.0]]));
        assert_eq!(single.len(), 1);
        assert_eq!(single.get(0, 0), 0.0);
        let sq = euclidean_metric(&cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]));
        let mut vals: Vec<f64> =
            (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).map(|(i, j)| sq.get(i, j)).collect();
        vals.sort_by(f64::total_cmp);
        assert_eq!(&vals[..4], &[1.0; 4]);
        assert!((vals[4] - 2f64.sqrt()).abs() < 1e-15 && (vals[5] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn epsilon_path_examples() {
        let line = cloud(&[&[0.0], &[1.0], &[2.0]]);
        let d = epsilon_path_metric(&line, 1.5).unwrap();
        assert_eq!(d.get(0, 2), 2.0);
        assert_eq!(d.get(0, 1), 1.0);
        let far = cloud(&[&[0.0], &[5.0]]);
        assert_eq!(epsilon_path_metric(&far, 1.0).unwrap().get(0, 1), f64::INFINITY);
        assert!(epsilon_path_metric(&far, 0.0).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let a = cloud(&[&[0.0]]);
        let b = cloud(&[&[3.0]]);
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 3.0);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        let p = cloud(&[&[0.0, 0.0]]);
        let q = cloud(&[&[0.0, 0.0], &[2.0, 0.0]]);
        assert_eq!(hausdorff_distance(&p, &q).unwrap(), 2.0);
    }

    #[test]
    fn rejects_asymmetric_metric() {
        let err = MetricMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(err.to_string().contains("asymmetric"));
        assert!(MetricMatrix::from_rows(&[vec![1.0]]).is_err());
    }

    #[test]
    fn triangle_audit_finds_violation() {
        let bad = MetricMatrix::from_rows(&[
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(bad.triangle_violation().is_some());
        let good = euclidean_metric(&cloud(&[&[0.0], &[1.0], &[3.0]]));
        assert!(good.triangle_violation().is_none());
    }
}
