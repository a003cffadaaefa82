use std::collections::HashSet;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{self, int};
use crate::models::PointCloud;
use crate::rips::{is_sorted_subset, CliqueList, Simplex, SimplicialComplex, SimplicialMap};

/// Finitely many closed convex cells in Euclidean space, each the convex
/// hull of a vertex set drawn from a shared point cloud.
#[derive(Clone, Debug)]
pub struct ConvexCellSystem {
    coords: Arc<PointCloud>,
    cells: Vec<Simplex>,
    exact_coords: Vec<Vec<BigRational>>,
    bboxes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl ConvexCellSystem {
    pub fn new(coords: Arc<PointCloud>, cells: Vec<Simplex>) -> Result<Self> {
        let n = coords.len();
        for (i, c) in cells.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::InvalidInput(format!("cell {i} is empty")));
            }
            if c.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInput(format!("cell {i} is not a sorted vertex set: {c:?}")));
            }
            if c[c.len() - 1] >= n {
                return Err(Error::InvalidInput(format!("cell {i} references a vertex outside 0..{n}")));
            }
        }
        let exact_coords = coords.iter().collect::<Vec<_>>().par_iter().map(|p| exact::rational_vec(p)).collect();
        let dim = coords.dim();
        let bboxes = cells
            .iter()
            .map(|c| {
                let mut lo = vec![f64::INFINITY; dim];
                let mut hi = vec![f64::NEG_INFINITY; dim];
                for &v in c {
                    for (k, &x) in coords.point(v).iter().enumerate() {
                        lo[k] = lo[k].min(x);
                        hi[k] = hi[k].max(x);
                    }
                }
                (lo, hi)
            })
            .collect();
        Ok(Self { coords, cells, exact_coords, bboxes })
    }

    /// Cells given by the maximal cliques of a Rips complex on `coords`.
    pub fn from_cliques(coords: Arc<PointCloud>, cliques: &CliqueList) -> Result<Self> {
        if cliques.n != coords.len() {
            return Err(Error::DimensionMismatch { expected: coords.len(), found: cliques.n });
        }
        Self::new(coords, cliques.cliques.clone())
    }

    pub fn coords(&self) -> &Arc<PointCloud> {
        &self.coords
    }

    pub fn cells(&self) -> &[Simplex] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &[usize] {
        &self.cells[i]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    pub fn bbox(&self, i: usize) -> (&[f64], &[f64]) {
        (&self.bboxes[i].0, &self.bboxes[i].1)
    }

    fn boxes_meet(&self, ids: &[usize]) -> bool {
        (0..self.dim()).all(|k| {
            let lo = ids.iter().map(|&i| self.bboxes[i].0[k]).fold(f64::NEG_INFINITY, f64::max);
            let hi = ids.iter().map(|&i| self.bboxes[i].1[k]).fold(f64::INFINITY, f64::min);
            lo <= hi
        })
    }

    fn share_vertex(&self, ids: &[usize]) -> bool {
        let (first, rest) = ids.split_first().expect("nonempty id set");
        self.cells[*first].iter().any(|v| rest.iter().all(|&j| self.cells[j].binary_search(v).is_ok()))
    }

    /// Exact test for a common point of the closed hulls of the given cells.
    fn joint_feasible(&self, ids: &[usize]) -> bool {
        let dim = self.dim();
        let offsets: Vec<usize> = ids
            .iter()
            .scan(0, |acc, &i| {
                let start = *acc;
                *acc += self.cells[i].len();
                Some(start)
            })
            .collect();
        let nvar: usize = ids.iter().map(|&i| self.cells[i].len()).sum();
        let mut a = Vec::new();
        let mut b = Vec::new();
        // Each cell contributes convex weights summing to one.
        for (slot, &i) in ids.iter().enumerate() {
            let mut row = vec![BigRational::zero(); nvar];
            for t in 0..self.cells[i].len() {
                row[offsets[slot] + t] = int(1);
            }
            a.push(row);
            b.push(int(1));
        }
        // The combination of every later cell equals that of the first.
        let first = ids[0];
        for (slot, &i) in ids.iter().enumerate().skip(1) {
            for k in 0..dim {
                let mut row = vec![BigRational::zero(); nvar];
                for (t, &v) in self.cells[i].iter().enumerate() {
                    row[offsets[slot] + t] = self.exact_coords[v][k].clone();
                }
                for (t, &v) in self.cells[first].iter().enumerate() {
                    row[t] = -self.exact_coords[v][k].clone();
                }
                a.push(row);
                b.push(BigRational::zero());
            }
        }
        exact::is_feasible(&a, &b)
    }

    fn contains_point(&self, cell: usize, x: &[BigRational], xf: &[f64]) -> bool {
        let (lo, hi) = self.bbox(cell);
        if xf.iter().zip(lo.iter().zip(hi)).any(|(v, (l, h))| v < l || v > h) {
            return false;
        }
        let c = &self.cells[cell];
        if c.iter().any(|&v| self.coords.point(v) == xf) {
            return true;
        }
        let mut a = vec![vec![int(1); c.len()]];
        let mut b = vec![int(1)];
        for (k, xk) in x.iter().enumerate() {
            a.push(c.iter().map(|&v| self.exact_coords[v][k].clone()).collect());
            b.push(xk.clone());
        }
        exact::is_feasible(&a, &b)
    }
}

/// Whether the closed convex hulls of the cells in `ids` have a common point.
///
/// Fast paths: a vertex shared by all cells proves intersection, and disjoint
/// bounding boxes (compared exactly on the input floats) disprove it. Every
/// other case is settled by exact rational feasibility of the barycentric
/// system tying all cells to one common point.
pub fn hulls_intersect(cells: &ConvexCellSystem, ids: &[usize]) -> Result<bool> {
    if ids.is_empty() {
        return Err(Error::InvalidInput("at least one cell is required".into()));
    }
    if let Some(&bad) = ids.iter().find(|&&i| i >= cells.len()) {
        return Err(Error::InvalidInput(format!("cell index {bad} out of range")));
    }
    let mut ids = ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    Ok(intersect_sorted(cells, &ids))
}

fn intersect_sorted(cells: &ConvexCellSystem, ids: &[usize]) -> bool {
    if ids.len() == 1 || cells.share_vertex(ids) {
        return true;
    }
    if !cells.boxes_meet(ids) {
        return false;
    }
    cells.joint_feasible(ids)
}

/// Whether `x` lies in the union of the closed cells.
pub fn shadow_contains(cells: &ConvexCellSystem, x: &[f64]) -> Result<bool> {
    if x.len() != cells.dim() {
        return Err(Error::DimensionMismatch { expected: cells.dim(), found: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("query point has a non-finite coordinate".into()));
    }
    let xr = exact::rational_vec(x);
    Ok((0..cells.len()).any(|i| cells.contains_point(i, &xr, x)))
}

/// The nerve of a cell system: vertex `i` is cell `i`, and a vertex set spans
/// a simplex when the corresponding closed hulls share a point.
#[derive(Clone, Debug, PartialEq)]
pub struct NerveComplex {
    pub complex: Arc<SimplicialComplex>,
    pub cells: Vec<Simplex>,
}

/// Builds the nerve up to dimension `cap`.
///
/// Edges are tested in parallel for all pairs whose bounding boxes meet.
/// Higher candidates must have every facet already present, so only tuples
/// that pass all pairwise and lower-order filters reach the joint test.
pub fn build_nerve(cells: &ConvexCellSystem, cap: usize) -> Result<NerveComplex> {
    let m = cells.len();
    if m == 0 {
        return Err(Error::Empty);
    }
    if cap < 1 {
        return Err(Error::InvalidInput("dimension cap must be at least 1".into()));
    }
    let up: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .map(|i| ((i + 1)..m).filter(|&j| intersect_sorted(cells, &[i, j])).collect())
        .collect();
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); cap + 1];
    by_dim[1] = up.iter().enumerate().flat_map(|(i, js)| js.iter().map(move |&j| vec![i, j])).collect();
    for d in 2..=cap {
        let lower: HashSet<&Simplex> = by_dim[d - 1].iter().collect();
        let mut candidates = Vec::new();
        for s in &by_dim[d - 1] {
            let last = s[s.len() - 1];
            for &w in &up[last] {
                if s[..s.len() - 1].iter().all(|&u| up[u].binary_search(&w).is_ok()) {
                    let mut t = s.clone();
                    t.push(w);
                    let facets_present = (0..t.len() - 1).all(|skip| {
                        let f: Simplex =
                            t.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                        lower.contains(&f)
                    });
                    if facets_present {
                        candidates.push(t);
                    }
                }
            }
        }
        let kept: Vec<Simplex> = candidates.into_par_iter().filter(|t| intersect_sorted(cells, t)).collect();
        if kept.is_empty() {
            break;
        }
        by_dim[d] = kept;
    }
    let complex = SimplicialComplex::from_sorted(m, cap, by_dim);
    if !complex.is_face_closed() {
        return Err(Error::Internal("nerve is not closed under faces".into()));
    }
    Ok(NerveComplex { complex: Arc::new(complex), cells: cells.cells().to_vec() })
}

/// The map between nerves sending each cell to the lowest-index cell of the
/// target that contains its (embedded) vertex set. It is simplicial because
/// enlarging cells can only preserve common points.
pub fn clique_containment_map(source: &NerveComplex, target: &NerveComplex, embedding: &[usize]) -> Result<SimplicialMap> {
    let vertex_map = source
        .cells
        .iter()
        .map(|c| {
            let mut img: Simplex = c
                .iter()
                .map(|&v| embedding.get(v).copied().ok_or_else(|| Error::Containment(format!("vertex {v} has no image"))))
                .collect::<Result<_>>()?;
            img.sort_unstable();
            target
                .cells
                .iter()
                .position(|t| is_sorted_subset(&img, t))
                .ok_or_else(|| Error::Containment(format!("cell {c:?} is contained in no target cell")))
        })
        .collect::<Result<Vec<_>>>()?;
    SimplicialMap::new(source.complex.clone(), target.complex.clone(), vertex_map)
}

#[derive(Serialize, Deserialize)]
struct NerveJson {
    n: usize,
    cap: usize,
    simplices: Vec<Simplex>,
    cells: Vec<Simplex>,
}

impl Serialize for NerveComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NerveJson {
            n: self.complex.n_vertices(),
            cap: self.complex.cap(),
            simplices: self.complex.iter().cloned().collect(),
            cells: self.cells.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NerveComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = NerveJson::deserialize(deserializer)?;
        if raw.cells.len() != raw.n {
            return Err(serde::de::Error::custom("cell table length differs from vertex count"));
        }
        let complex =
            SimplicialComplex::from_simplices(raw.n, raw.cap, raw.simplices).map_err(serde::de::Error::custom)?;
        Ok(NerveComplex { complex: Arc::new(complex), cells: raw.cells })
    }
}
