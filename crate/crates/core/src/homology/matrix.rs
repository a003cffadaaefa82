use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A dense matrix over Z/2. Homology ranks are small, so dense storage of
/// induced maps is the simplest exact representation.
#[derive(Clone, PartialEq, Eq)]
pub struct Z2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl Z2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![false; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(rows: usize, columns: &[Vec<bool>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: col.len() });
            }
            for (i, &b) in col.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            for (j, &v) in r.iter().enumerate() {
                if v > 1 {
                    return Err(Error::InvalidInput(format!("entry {v} is not 0 or 1")));
                }
                m.set(i, j, v == 1);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.cols + j] = v;
    }

    /// `self * rhs`, i.e. apply `rhs` first.
    pub fn mul(&self, rhs: &Z2Matrix) -> Result<Z2Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = Z2Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    for j in 0..rhs.cols {
                        if rhs.get(k, j) {
                            let v = out.get(i, j);
                            out.set(i, j, !v);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, col)) else { continue };
            for j in 0..m.cols {
                let (a, b) = (m.get(rank, j), m.get(p, j));
                m.set(rank, j, b);
                m.set(p, j, a);
            }
            for r in 0..m.rows {
                if r != rank && m.get(r, col) {
                    for j in 0..m.cols {
                        let v = m.get(r, j) ^ m.get(rank, j);
                        m.set(r, j, v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j) as u8).collect()).collect()
    }
}

impl fmt::Debug for Z2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z2Matrix{}x{}{:?}", self.rows, self.cols, self.to_rows())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<u8>>,
}

impl Serialize for Z2Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson { rows: self.rows, cols: self.cols, entries: self.to_rows() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Z2Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.rows == 0 || raw.cols == 0 {
            return Ok(Z2Matrix::zeros(raw.rows, raw.cols));
        }
        let m = Z2Matrix::from_rows(&raw.entries).map_err(serde::de::Error::custom)?;
        if m.rows != raw.rows || m.cols != raw.cols {
            return Err(serde::de::Error::custom("matrix shape does not match its entries"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_product() {
        let a = Z2Matrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        assert_eq!(a.rank(), 2);
        assert_eq!(Z2Matrix::identity(3).mul(&a).unwrap(), a);
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.to_rows(), vec![vec![1, 0, 1], vec![1, 1, 0], vec![0, 1, 1]]);
        assert!(a.mul(&Z2Matrix::zeros(2, 2)).is_err());
        assert_eq!(Z2Matrix::zeros(0, 3).rank(), 0);
    }

    #[test]
    fn json_round_trip() {
        let a = Z2Matrix::from_rows(&[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let back: Z2Matrix = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        let empty = Z2Matrix::zeros(0, 2);
        let back: Z2Matrix = serde_json::from_str(&serde_json::to_string(&empty).unwrap()).unwrap();
        assert_eq!(back, empty);
    }
}
