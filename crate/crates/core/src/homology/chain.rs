use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rips::SimplicialComplex;

/// A Z/2 chain or boundary column: sorted indices of the simplices with
/// coefficient one.
pub type Chain = Vec<u32>;

/// `a += b` over Z/2 (symmetric difference of sorted lists).
pub fn add_into(a: &mut Chain, b: &[u32]) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    *a = out;
}

/// Boundary matrix `d_dim` as columns indexed by `dim`-simplices with row
/// indices of their facets among the `(dim-1)`-simplices.
pub fn boundary_columns(complex: &SimplicialComplex, dim: usize) -> Result<Vec<Chain>> {
    if dim == 0 {
        return Ok(vec![Vec::new(); complex.count(0)]);
    }
    complex
        .simplices(dim)
        .iter()
        .map(|s| {
            let mut col: Chain = (0..s.len())
                .map(|skip| {
                    let face: Vec<usize> =
                        s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    complex
                        .index_of(&face)
                        .map(|i| i as u32)
                        .ok_or_else(|| Error::Internal(format!("facet {face:?} of {s:?} missing")))
                })
                .collect::<Result<_>>()?;
            col.sort_unstable();
            Ok(col)
        })
        .collect()
}

/// Column reduction with the largest row index as pivot. Returns the reduced
/// columns and, for each pivot row, the reducing column.
fn reduce(columns: &mut [Chain], rows: usize, mut track: Option<&mut Vec<Chain>>) -> Vec<Option<usize>> {
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; rows];
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match pivot_of_row[low as usize] {
                Some(k) => {
                    let other = columns[k].clone();
                    add_into(&mut columns[j], &other);
                    if let Some(v) = track.as_deref_mut() {
                        let vk = v[k].clone();
                        add_into(&mut v[j], &vk);
                    }
                }
                None => {
                    pivot_of_row[low as usize] = Some(j);
                    break;
                }
            }
        }
    }
    pivot_of_row
}

/// Rank of a boundary matrix over Z/2.
pub fn boundary_rank(complex: &SimplicialComplex, dim: usize) -> Result<usize> {
    if dim == 0 || dim > complex.cap() {
        return Ok(0);
    }
    let mut cols = boundary_columns(complex, dim)?;
    Ok(reduce(&mut cols, complex.count(dim - 1), None).iter().filter(|p| p.is_some()).count())
}

/// Betti numbers `b_0..=b_m` over Z/2. Requires `m < cap` so that the
/// boundaries of `m`-cycles are available.
pub fn betti(complex: &SimplicialComplex, m: usize) -> Result<Vec<usize>> {
    if m >= complex.cap() {
        return Err(Error::Precondition(format!(
            "homology up to dimension {m} needs simplices up to dimension {}, but the cap is {}",
            m + 1,
            complex.cap()
        )));
    }
    let ranks: Vec<usize> = (0..=m + 1).map(|d| boundary_rank(complex, d)).collect::<Result<_>>()?;
    Ok((0..=m).map(|d| complex.count(d) - ranks[d] - ranks[d + 1]).collect())
}

/// One entry of the reduction table used to express cycles in homology.
#[derive(Clone, Debug)]
struct Entry {
    chain: Chain,
    /// Homology generator represented by this entry, or `None` for a boundary.
    generator: Option<usize>,
}

#[derive(Clone, Debug)]
struct DimHomology {
    reps: Vec<Chain>,
    table: Vec<Option<Entry>>,
}

/// Z/2 homology of a complex in dimensions `0..=max_dim` with a fixed basis.
///
/// The basis consists of cycles reduced against all boundaries and earlier
/// generators, so every table pivot is distinct and the coordinates of any
/// cycle follow from one deterministic reduction.
#[derive(Clone, Debug)]
pub struct Homology {
    complex: Arc<SimplicialComplex>,
    dims: Vec<DimHomology>,
}

impl Homology {
    pub fn compute(complex: Arc<SimplicialComplex>, max_dim: usize) -> Result<Self> {
        if max_dim >= complex.cap() {
            return Err(Error::Precondition(format!(
                "homology up to dimension {max_dim} needs a cap above it, got {}",
                complex.cap()
            )));
        }
        let mut dims = Vec::with_capacity(max_dim + 1);
        for d in 0..=max_dim {
            dims.push(Self::dimension(&complex, d)?);
        }
        Ok(Self { complex, dims })
    }

    fn dimension(complex: &SimplicialComplex, d: usize) -> Result<DimHomology> {
        let n = complex.count(d);
        let mut table: Vec<Option<Entry>> = vec![None; n];
        // Boundaries of (d+1)-simplices, fully reduced.
        let mut bcols = boundary_columns(complex, d + 1)?;
        let pivots = reduce(&mut bcols, n, None);
        for (row, col) in pivots.iter().enumerate() {
            if let Some(j) = col {
                table[row] = Some(Entry { chain: std::mem::take(&mut bcols[*j]), generator: None });
            }
        }
        // Cycle basis from the kernel of the boundary d_d.
        let cycles: Vec<Chain> = if d == 0 {
            (0..n as u32).map(|i| vec![i]).collect()
        } else {
            let mut cols = boundary_columns(complex, d)?;
            let mut v: Vec<Chain> = (0..n as u32).map(|i| vec![i]).collect();
            reduce(&mut cols, complex.count(d - 1), Some(&mut v));
            cols.iter().zip(v).filter(|(c, _)| c.is_empty()).map(|(_, z)| z).collect()
        };
        let mut reps = Vec::new();
        for mut z in cycles {
            while let Some(&low) = z.last() {
                match &table[low as usize] {
                    Some(e) => add_into(&mut z, &e.chain),
                    None => break,
                }
            }
            if let Some(&low) = z.last() {
                table[low as usize] = Some(Entry { chain: z.clone(), generator: Some(reps.len()) });
                reps.push(z);
            }
        }
        Ok(DimHomology { reps, table })
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn max_dim(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn rank(&self, d: usize) -> usize {
        self.dims.get(d).map_or(0, |h| h.reps.len())
    }

    pub fn betti(&self) -> Vec<usize> {
        self.dims.iter().map(|h| h.reps.len()).collect()
    }

    /// Cycle representatives of the basis of `H_d`.
    pub fn representatives(&self, d: usize) -> &[Chain] {
        &self.dims[d].reps
    }

    /// Coordinates of the class of the cycle `c` in the basis of `H_d`.
    pub fn coordinates(&self, d: usize, c: &[u32]) -> Result<Vec<bool>> {
        let h = &self.dims[d];
        let mut coords = vec![false; h.reps.len()];
        let mut z = c.to_vec();
        while let Some(&low) = z.last() {
            match h.table.get(low as usize).and_then(Option::as_ref) {
                Some(e) => {
                    if let Some(g) = e.generator {
                        coords[g] ^= true;
                    }
                    add_into(&mut z, &e.chain);
                }
                None => {
                    return Err(Error::Internal(format!("chain in dimension {d} is not a cycle of the complex")));
                }
            }
        }
        Ok(coords)
    }
}
