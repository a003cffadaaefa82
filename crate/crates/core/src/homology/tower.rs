use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{induced_map, Homology, Z2Matrix};
use crate::rips::{SimplicialComplex, SimplicialMap};

/// Minimum number of consecutive stages on which composite ranks must agree
/// before a rank counts as stabilized.
pub const PLATEAU_LENGTH: usize = 3;

/// Orientation of the connecting maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `maps[i]` goes from stage `i` to stage `i + 1` (direct systems).
    Forward,
    /// `maps[i]` goes from stage `i + 1` to stage `i` (inverse systems).
    Backward,
}

/// A finite window of a direct or inverse system of complexes. Stages are
/// always numbered toward the limit end, so the composite between stages
/// `i <= j` runs from `i` to `j` when forward and from `j` to `i` when
/// backward.
#[derive(Clone, Debug)]
pub struct HomologyTower {
    pub stages: Vec<Arc<SimplicialComplex>>,
    pub maps: Vec<SimplicialMap>,
    pub direction: Direction,
    pub labels: Vec<String>,
}

/// Summary of one stage of a tower.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub label: String,
    pub vertices: usize,
    pub simplices: Vec<usize>,
    pub betti: Vec<usize>,
}

/// Rank shared by every composite from stage `i >= i0` to stage `j >= j0`,
/// `j > i`, within the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plateau {
    pub rank: usize,
    pub i0: usize,
    pub j0: usize,
}

/// Composite ranks of a tower in every dimension. `rank_table[m][i][j]` is
/// the rank of the composite between stages `i <= j` (zero below the
/// diagonal); the diagonal holds Betti numbers. `plateau[m]` is `None` when
/// the rank has not stabilized within the window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerReport {
    pub dims: Vec<usize>,
    pub direction: Direction,
    pub stages: Vec<StageSummary>,
    pub rank_table: Vec<Vec<Vec<usize>>>,
    pub plateau: Vec<Option<Plateau>>,
    pub coefficients: String,
}

impl TowerReport {
    pub fn plateau_rank(&self, m: usize) -> Option<usize> {
        self.plateau.get(m).copied().flatten().map(|p| p.rank)
    }

    /// Whether `rank(i -> k) <= min(rank(i -> j), rank(j -> k))` everywhere.
    pub fn is_rank_monotone(&self) -> bool {
        self.rank_table.iter().all(|t| {
            let s = t.len();
            (0..s).all(|i| {
                (i..s).all(|j| (j..s).all(|k| t[i][k] <= t[i][j].min(t[j][k])))
            })
        })
    }
}

impl HomologyTower {
    pub fn new(
        stages: Vec<Arc<SimplicialComplex>>,
        maps: Vec<SimplicialMap>,
        direction: Direction,
        labels: Vec<String>,
    ) -> Result<Self> {
        if stages.len() < 2 {
            return Err(Error::InvalidInput("a tower needs at least two stages".into()));
        }
        if maps.len() + 1 != stages.len() || labels.len() != stages.len() {
            return Err(Error::InvalidInput(format!(
                "{} stages need {} maps and labels, got {} maps and {} labels",
                stages.len(),
                stages.len() - 1,
                maps.len(),
                labels.len()
            )));
        }
        for (i, f) in maps.iter().enumerate() {
            let (from, to) = match direction {
                Direction::Forward => (&stages[i], &stages[i + 1]),
                Direction::Backward => (&stages[i + 1], &stages[i]),
            };
            let same = |a: &Arc<SimplicialComplex>, b: &Arc<SimplicialComplex>| Arc::ptr_eq(a, b) || **a == **b;
            if !same(f.source(), from) || !same(f.target(), to) {
                return Err(Error::InvalidInput(format!("map {i} does not connect its stages")));
            }
        }
        Ok(Self { stages, maps, direction, labels })
    }
}

/// Computes homology of every stage, the induced step matrices and all
/// composite ranks up to dimension `m`.
pub fn tower_ranks(tower: &HomologyTower, m: usize) -> Result<TowerReport> {
    let homologies: Vec<Homology> = tower
        .stages
        .par_iter()
        .map(|k| Homology::compute(k.clone(), m))
        .collect::<Result<_>>()?;
    let steps: Vec<Vec<Z2Matrix>> = tower
        .maps
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let (src, dst) = match tower.direction {
                Direction::Forward => (&homologies[i], &homologies[i + 1]),
                Direction::Backward => (&homologies[i + 1], &homologies[i]),
            };
            induced_map(f, src, dst).map(|h| h.matrices)
        })
        .collect::<Result<_>>()?;
    let stages = tower
        .stages
        .iter()
        .zip(&homologies)
        .zip(&tower.labels)
        .map(|((k, h), label)| StageSummary {
            label: label.clone(),
            vertices: k.n_vertices(),
            simplices: (0..=k.cap()).map(|d| k.count(d)).collect(),
            betti: h.betti(),
        })
        .collect();
    let betti: Vec<Vec<usize>> = homologies.iter().map(Homology::betti).collect();
    ranks_from_steps(&betti, &steps, tower.direction, m, stages)
}

/// Composite-rank table and plateaus from per-step matrices. `steps[i][d]`
/// is the matrix of the map between stages `i` and `i + 1` in dimension `d`,
/// oriented by `direction`.
pub fn ranks_from_steps(
    betti: &[Vec<usize>],
    steps: &[Vec<Z2Matrix>],
    direction: Direction,
    m: usize,
    stages: Vec<StageSummary>,
) -> Result<TowerReport> {
    let s = betti.len();
    if steps.len() + 1 != s {
        return Err(Error::InvalidInput("step count must be one less than the stage count".into()));
    }
    let mut rank_table = vec![vec![vec![0usize; s]; s]; m + 1];
    for d in 0..=m {
        for i in 0..s {
            rank_table[d][i][i] = betti[i][d];
            // Composite between stage i and j, built up one step at a time.
            let mut comp = Z2Matrix::identity(betti[i][d]);
            for j in (i + 1)..s {
                let step = &steps[j - 1][d];
                comp = match direction {
                    Direction::Forward => step.mul(&comp)?,
                    Direction::Backward => comp.mul(step)?,
                };
                rank_table[d][i][j] = comp.rank();
            }
        }
    }
    let plateau = rank_table.iter().map(|t| find_plateau(t)).collect();
    Ok(TowerReport {
        dims: (0..=m).collect(),
        direction,
        stages,
        rank_table,
        plateau,
        coefficients: "Z/2 homology; homotopy groups (including non-abelian fundamental groups) are not computed"
            .into(),
    })
}

/// Smallest `a` such that every composite between distinct stages of the
/// block `a..s` has one common rank, provided the block spans at least
/// [`PLATEAU_LENGTH`] stages. Reported as `i0 = a`, `j0 = a + 1`.
pub fn find_plateau(table: &[Vec<usize>]) -> Option<Plateau> {
    let s = table.len();
    if s < PLATEAU_LENGTH {
        return None;
    }
    let r = table[s - 2][s - 1];
    let mut a = s - 2;
    // Extend the block downward while the new row agrees with r on all of it.
    while a > 0 && (a..s).all(|j| table[a - 1][j] == r) {
        a -= 1;
    }
    (s - a >= PLATEAU_LENGTH).then_some(Plateau { rank: r, i0: a, j0: a + 1 })
}
