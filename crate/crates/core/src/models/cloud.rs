use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        crate::geom::dist(&self.coords, &other.coords)
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Self { coords }
    }
}

/// An ordered finite subset of `R^N`. Index identity is meaningful: complexes
/// built on a cloud refer to its points by position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Point>,
    dim: usize,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let dim = points.first().map(Point::dim).ok_or(Error::Empty)?;
        if dim == 0 {
            return Err(Error::InvalidInput("points must have at least one coordinate".into()));
        }
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
            if p.coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite coordinate in {:?}", p.coords)));
            }
        }
        Ok(Self { points, dim })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(rows.iter().map(|r| Point::new(r.as_ref().to_vec())).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i].coords
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(|p| p.coords.as_slice())
    }

    /// Sub-cloud on the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let pts = indices
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput(format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts)
    }

    /// Parse one point per line, comma separated. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let coords = line
                .split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|e| {
                        Error::Parse(format!("line {}: {:?}: {e}", lineno + 1, f.trim()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            points.push(Point::new(coords));
        }
        Self::new(points)
    }

    /// CSV with a `#` header naming the coordinates. Floats use the shortest
    /// representation that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.dim).map(|i| format!("x{i}")).collect();
        let _ = writeln!(out, "# {}", header.join(","));
        for p in &self.points {
            let row: Vec<String> = p.coords.iter().map(|c| format!("{c:?}")).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}
