use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::geom;

/// An ordered list of points joined by straight edges; when `closed`, the
/// last point is joined back to the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Vec<f64>>,
    pub closed: bool,
}

impl Polyline {
    pub fn new(points: Vec<Vec<f64>>, closed: bool) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Empty);
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidInput("points need at least one coordinate".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("polyline has a non-finite coordinate".into()));
        }
        let n = points.len();
        let wraps = closed && n > 1;
        let edge_count = if wraps { n } else { n.saturating_sub(1) };
        for i in 0..edge_count {
            if points[i] == points[(i + 1) % n] {
                return Err(Error::InvalidInput(format!("consecutive points {i} and {} coincide", (i + 1) % n)));
            }
        }
        Ok(Self { points, closed })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Edges as index pairs, including the closing edge.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.points.len();
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        if self.closed && n > 2 {
            edges.push((n - 1, 0));
        }
        edges
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.edges().iter().map(|&(a, b)| geom::dist(&self.points[a], &self.points[b])).collect()
    }

    /// Points along the polyline with spacing at most `spacing`, vertices included.
    pub fn discretize(&self, spacing: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for (a, b) in self.edges() {
            let (p, q) = (&self.points[a], &self.points[b]);
            let steps = (geom::dist(p, q) / spacing).ceil().max(1.0) as usize;
            out.extend((0..steps).map(|k| geom::lerp(p, q, k as f64 / steps as f64)));
        }
        if !self.closed || self.points.len() <= 2 {
            out.push(self.points[self.points.len() - 1].clone());
        }
        out
    }

    /// Distance from `x` to the polyline.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        if self.points.len() == 1 {
            return geom::dist(x, &self.points[0]);
        }
        self.edges()
            .iter()
            .map(|&(a, b)| geom::point_segment(x, &self.points[a], &self.points[b]).0)
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    /// One row per vertex, comma separated.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str, closed: bool) -> Result<Self> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidInput(format!("line {}: {e}", i + 1)))?;
            points.push(row);
        }
        Self::new(points, closed)
    }
}

/// Whether the closed segments `[a0, a1]` and `[b0, b1]` share a point,
/// decided exactly in any dimension.
pub fn segments_intersect(a0: &[f64], a1: &[f64], b0: &[f64], b1: &[f64]) -> bool {
    // Disjoint bounding boxes are an exact reject on the input floats.
    for k in 0..a0.len() {
        let (alo, ahi) = (a0[k].min(a1[k]), a0[k].max(a1[k]));
        let (blo, bhi) = (b0[k].min(b1[k]), b0[k].max(b1[k]));
        if ahi < blo || bhi < alo {
            return false;
        }
    }
    // Weights (l0, l1, m0, m1) >= 0 with l0 + l1 = 1, m0 + m1 = 1 and
    // l0 a0 + l1 a1 - m0 b0 - m1 b1 = 0.
    let one = exact::int(1);
    let zero = exact::int(0);
    let mut rows = vec![
        vec![one.clone(), one.clone(), zero.clone(), zero.clone()],
        vec![zero.clone(), zero.clone(), one.clone(), one.clone()],
    ];
    let mut rhs = vec![one.clone(), one];
    for k in 0..a0.len() {
        rows.push(vec![
            exact::rational(a0[k]),
            exact::rational(a1[k]),
            -exact::rational(b0[k]),
            -exact::rational(b1[k]),
        ]);
        rhs.push(zero.clone());
    }
    exact::is_feasible(&rows, &rhs)
}

/// Whether the segments `[a, b]` and `[b, c]` overlap in more than `b`,
/// i.e. `a - b` and `c - b` point the same way. Decided exactly.
pub fn adjacent_segments_overlap(a: &[f64], b: &[f64], c: &[f64]) -> bool {
    let u: Vec<_> = a.iter().zip(b).map(|(&x, &y)| exact::rational(x) - exact::rational(y)).collect();
    let v: Vec<_> = c.iter().zip(b).map(|(&x, &y)| exact::rational(x) - exact::rational(y)).collect();
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            if !(&u[i] * &v[j] - &u[j] * &v[i]).is_zero() {
                return false;
            }
        }
    }
    let d = u.iter().zip(&v).fold(exact::int(0), |acc, (x, y)| acc + x * y);
    d.is_positive()
}

/// First pair of edges (by index into [`Polyline::edges`]) that meet where
/// they should not: anywhere for non-adjacent edges, beyond the shared
/// vertex for adjacent ones.
pub fn first_self_intersection(curve: &Polyline) -> Option<(usize, usize)> {
    use rayon::prelude::*;
    let edges = curve.edges();
    let p = &curve.points;
    let m = edges.len();
    (0..m).into_par_iter().find_map_first(|i| {
        let (a, b) = edges[i];
        ((i + 1)..m).find_map(|j| {
            let (c, d) = edges[j];
            let bad = if b == c {
                adjacent_segments_overlap(&p[a], &p[b], &p[d])
            } else if d == a {
                adjacent_segments_overlap(&p[c], &p[a], &p[b])
            } else if a == c || a == d || b == d {
                // Repeated vertices make the curve non-simple.
                true
            } else {
                segments_intersect(&p[a], &p[b], &p[c], &p[d])
            };
            bad.then_some((i, j))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polyline {
        Polyline::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]], true).unwrap()
    }

    #[test]
    fn square_is_simple() {
        let s = square();
        assert_eq!(s.edges().len(), 4);
        assert_eq!(first_self_intersection(&s), None);
        assert_eq!(s.edge_lengths(), vec![1.0; 4]);
    }

    #[test]
    fn bowtie_is_not_simple() {
        let b = Polyline::new(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]], true).unwrap();
        assert_eq!(first_self_intersection(&b), Some((0, 2)));
    }

    #[test]
    fn folded_back_edge_is_not_simple() {
        let f = Polyline::new(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0]], true).unwrap();
        assert!(first_self_intersection(&f).is_some());
    }

    #[test]
    fn exact_intersection_predicates() {
        assert!(segments_intersect(&[0.0, 0.0], &[2.0, 0.0], &[1.0, -1.0], &[1.0, 1.0]));
        // Touching at an endpoint counts.
        assert!(segments_intersect(&[0.0, 0.0], &[1.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]));
        // Skew lines in space.
        assert!(!segments_intersect(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.5, -1.0, 1e-12], &[0.5, 1.0, 1e-12]));
        assert!(segments_intersect(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.5, -1.0, 0.0], &[0.5, 1.0, 0.0]));
        // Collinear and overlapping.
        assert!(segments_intersect(&[0.0, 0.0], &[2.0, 0.0], &[1.0, 0.0], &[3.0, 0.0]));
        assert!(!segments_intersect(&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0], &[3.0, 0.0]));
        assert!(adjacent_segments_overlap(&[0.0, 0.0], &[2.0, 0.0], &[1.0, 0.0]));
        assert!(!adjacent_segments_overlap(&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]));
        assert!(!adjacent_segments_overlap(&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]));
    }

    #[test]
    fn rejects_repeated_consecutive_points() {
        assert!(Polyline::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]], false).is_err());
        assert!(Polyline::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.0]], true).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = square();
        assert_eq!(Polyline::from_csv(&s.to_csv(), true).unwrap(), s);
    }

    #[test]
    fn discretization_and_distance() {
        let s = square();
        let pts = s.discretize(0.25);
        assert_eq!(pts.len(), 16);
        assert!((s.distance_to(&[0.5, 0.5]) - 0.5).abs() < 1e-15);
        assert_eq!(s.distance_to(&[1.0, 0.5]), 0.0);
    }
}
