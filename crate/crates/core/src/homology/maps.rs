use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{Chain, Homology, Z2Matrix};
use crate::rips::SimplicialMap;

/// The homomorphisms induced by a simplicial map in dimensions `0..=max_dim`,
/// each as a (target rank x source rank) matrix in the fixed bases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedMap {
    pub matrices: Vec<Z2Matrix>,
}

impl InducedMap {
    pub fn max_dim(&self) -> usize {
        self.matrices.len().saturating_sub(1)
    }

    pub fn matrix(&self, d: usize) -> &Z2Matrix {
        &self.matrices[d]
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.matrices.iter().map(Z2Matrix::rank).collect()
    }

    /// `then . self`
    pub fn then(&self, then: &InducedMap) -> Result<InducedMap> {
        let matrices = self
            .matrices
            .iter()
            .zip(&then.matrices)
            .map(|(a, b)| b.mul(a))
            .collect::<Result<_>>()?;
        Ok(InducedMap { matrices })
    }
}

/// The chain-level image of a cycle: each simplex goes to its image, and
/// degenerate images vanish.
fn push_forward(f: &SimplicialMap, d: usize, chain: &[u32]) -> Result<Chain> {
    let src = f.source();
    let tgt = f.target();
    let mut out: Vec<u32> = Vec::new();
    for &i in chain {
        let img = f.image(&src.simplices(d)[i as usize]);
        if img.len() == d + 1 {
            let j = tgt.index_of(&img).ok_or_else(|| Error::MissingSimplex(img.clone()))?;
            out.push(j as u32);
        }
    }
    out.sort_unstable();
    // Pairs of equal images cancel.
    let mut reduced = Chain::new();
    let mut k = 0;
    while k < out.len() {
        let mut run = 1;
        while k + run < out.len() && out[k + run] == out[k] {
            run += 1;
        }
        if run % 2 == 1 {
            reduced.push(out[k]);
        }
        k += run;
    }
    Ok(reduced)
}

/// Induced map on homology, obtained by expressing the images of the source
/// representatives in the target basis.
pub fn induced_map(f: &SimplicialMap, source: &Homology, target: &Homology) -> Result<InducedMap> {
    let same = |a: &std::sync::Arc<_>, b: &std::sync::Arc<_>| std::sync::Arc::ptr_eq(a, b) || **a == **b;
    if !same(f.source(), source.complex()) || !same(f.target(), target.complex()) {
        return Err(Error::InvalidInput("homology was computed for different complexes than the map".into()));
    }
    let top = source.max_dim().min(target.max_dim());
    let mut matrices = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let columns = source
            .representatives(d)
            .iter()
            .map(|z| {
                let img = push_forward(f, d, z)?;
                target.coordinates(d, &img).map_err(|e| match e {
                    Error::Internal(msg) => Error::Internal(format!("image of a basis cycle: {msg}")),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        matrices.push(Z2Matrix::from_columns(target.rank(d), &columns)?);
    }
    Ok(InducedMap { matrices })
}

/// Computes both homologies and the induced map up to dimension `m`.
pub fn induced_map_of(f: &SimplicialMap, m: usize) -> Result<InducedMap> {
    let source = Homology::compute(f.source().clone(), m)?;
    let target = Homology::compute(f.target().clone(), m)?;
    induced_map(f, &source, &target)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::models::{euclidean_metric, PointCloud};
    use crate::rips::{build_rips, SimplicialComplex};

    fn square_cycle() -> Arc<SimplicialComplex> {
        Arc::new(SimplicialComplex::closure(4, 2, [vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap())
    }

    #[test]
    fn identity_induces_identity() {
        let k = square_cycle();
        let id = SimplicialMap::identity(k);
        let m = induced_map_of(&id, 1).unwrap();
        assert_eq!(m.matrices, vec![Z2Matrix::identity(1), Z2Matrix::identity(1)]);
    }

    #[test]
    fn cycle_into_cone_kills_h1() {
        let cone = Arc::new(
            SimplicialComplex::closure(5, 2, [vec![0, 1, 4], vec![1, 2, 4], vec![2, 3, 4], vec![0, 3, 4]]).unwrap(),
        );
        let f = SimplicialMap::new(square_cycle(), cone, vec![0, 1, 2, 3]).unwrap();
        let m = induced_map_of(&f, 1).unwrap();
        assert_eq!((m.matrix(1).rows(), m.matrix(1).cols()), (0, 1));
        assert_eq!(m.ranks(), vec![1, 0]);
    }

    #[test]
    fn square_into_coarser_rips() {
        let cloud = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let metric = euclidean_metric(&cloud);
        let fine = Arc::new(build_rips(&metric, 1.1, 2).unwrap());
        let coarse = Arc::new(build_rips(&metric, 1.5, 2).unwrap());
        let f = SimplicialMap::new(fine, coarse, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(induced_map_of(&f, 1).unwrap().ranks(), vec![1, 0]);
    }

    #[test]
    fn folding_a_cycle_is_zero_and_wrapping_is_not() {
        let hex = Arc::new(SimplicialComplex::closure(6, 2, (0..6).map(|i| vec![i, (i + 1) % 6])).unwrap());
        let tri = Arc::new(SimplicialComplex::closure(3, 2, (0..3).map(|i| vec![i, (i + 1) % 3])).unwrap());
        // Wrapping twice around a triangle is zero over Z/2.
        let twice = SimplicialMap::new(hex.clone(), tri.clone(), vec![0, 1, 2, 0, 1, 2]).unwrap();
        assert_eq!(induced_map_of(&twice, 1).unwrap().ranks(), vec![1, 0]);
        // Collapsing three hexagon edges wraps once.
        let once = SimplicialMap::new(hex, tri, vec![0, 0, 1, 1, 2, 2]).unwrap();
        assert_eq!(induced_map_of(&once, 1).unwrap().ranks(), vec![1, 1]);
    }
}
