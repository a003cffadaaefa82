use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Point, PointCloud};
use crate::rips::{Simplex, SimplicialComplex};

/// A point of a geometric simplex in barycentric coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarycentricPoint {
    carrier: Simplex,
    weights: Vec<f64>,
}

impl BarycentricPoint {
    pub fn new(carrier: Simplex, weights: Vec<f64>) -> Result<Self> {
        if carrier.is_empty() || carrier.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "carrier of size {} needs as many weights, got {}",
                carrier.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidInput("barycentric weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("barycentric weights sum to {total}, not 1")));
        }
        let mut pairs: Vec<(usize, f64)> = carrier.into_iter().zip(weights).collect();
        pairs.sort_by_key(|p| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("carrier repeats a vertex".into()));
        }
        let (carrier, weights) = pairs.into_iter().unzip();
        Ok(Self { carrier, weights })
    }

    pub fn vertex(v: usize) -> Self {
        Self { carrier: vec![v], weights: vec![1.0] }
    }

    /// The barycenter of a simplex.
    pub fn barycenter(carrier: Simplex) -> Result<Self> {
        let w = 1.0 / carrier.len() as f64;
        let k = carrier.len();
        let mut weights = vec![w; k];
        // Keep the sum exactly one.
        if k > 0 {
            weights[k - 1] = 1.0 - w * (k - 1) as f64;
        }
        Self::new(carrier, weights)
    }

    pub fn carrier(&self) -> &[usize] {
        &self.carrier
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// The shadow projection: the affine extension of the vertex positions,
/// evaluated at a point of the complex.
pub fn project_point(complex: &SimplicialComplex, coords: &PointCloud, b: &BarycentricPoint) -> Result<Point> {
    if complex.n_vertices() != coords.len() {
        return Err(Error::DimensionMismatch { expected: complex.n_vertices(), found: coords.len() });
    }
    if !complex.contains(b.carrier()) {
        return Err(Error::MissingSimplex(b.carrier().to_vec()));
    }
    let mut out = vec![0.0; coords.dim()];
    for (&v, &w) in b.carrier().iter().zip(b.weights()) {
        for (o, x) in out.iter_mut().zip(coords.point(v)) {
            *o += w * x;
        }
    }
    Ok(Point::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> (SimplicialComplex, PointCloud) {
        (
            SimplicialComplex::closure(3, 2, [vec![0, 1, 2]]).unwrap(),
            PointCloud::from_rows(&[[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]]).unwrap(),
        )
    }

    #[test]
    fn projection_examples() {
        let (k, c) = triangle();
        assert_eq!(project_point(&k, &c, &BarycentricPoint::vertex(1)).unwrap().coords, vec![3.0, 0.0]);
        let mid = BarycentricPoint::new(vec![0, 1], vec![0.5, 0.5]).unwrap();
        assert_eq!(project_point(&k, &c, &mid).unwrap().coords, vec![1.5, 0.0]);
        let bary = BarycentricPoint::barycenter(vec![0, 1, 2]).unwrap();
        let p = project_point(&k, &c, &bary).unwrap();
        assert!((p.coords[0] - 1.0).abs() < 1e-12 && (p.coords[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn carrier_must_be_in_complex() {
        let k = SimplicialComplex::closure(3, 2, [vec![0, 1]]).unwrap();
        let c = PointCloud::from_rows(&[[0.0, 0.0], [2.0, 0.0], [0.0, 3.0]]).unwrap();
        let b = BarycentricPoint::new(vec![1, 2], vec![0.5, 0.5]).unwrap();
        assert!(matches!(project_point(&k, &c, &b), Err(Error::MissingSimplex(_))));
        let mid = BarycentricPoint::new(vec![1, 0], vec![0.5, 0.5]).unwrap();
        assert_eq!(project_point(&k, &c, &mid).unwrap().coords, vec![1.0, 0.0]);
    }

    #[test]
    fn weights_are_validated() {
        assert!(BarycentricPoint::new(vec![0, 1], vec![0.5]).is_err());
        assert!(BarycentricPoint::new(vec![0, 1], vec![0.7, 0.7]).is_err());
        assert!(BarycentricPoint::new(vec![0, 1], vec![-0.5, 1.5]).is_err());
        assert!(BarycentricPoint::new(vec![0, 0], vec![0.5, 0.5]).is_err());
    }
}
