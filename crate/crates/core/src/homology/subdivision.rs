use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homology::betti;
use crate::rips::{is_sorted_subset, CliqueList, Simplex, SimplicialComplex, SimplicialMap};
use crate::shadow::NerveComplex;

/// The barycentric subdivision of a complex. Vertex `i` of the subdivision
/// is the barycenter of `carrier[i]`; simplices are strictly increasing
/// chains of faces.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: Arc<SimplicialComplex>,
    pub carrier: Vec<Simplex>,
}

impl Subdivision {
    /// Checks that the subdivision has the Betti numbers of the original
    /// complex up to dimension `m`.
    pub fn verify_betti(&self, original: &SimplicialComplex, m: usize) -> Result<Vec<usize>> {
        let (a, b) = rayon::join(|| betti(original, m), || betti(&self.complex, m));
        let (a, b) = (a?, b?);
        if a != b {
            return Err(Error::Internal(format!("subdivision changed Betti numbers from {a:?} to {b:?}")));
        }
        Ok(a)
    }
}

pub fn barycentric_subdivision(complex: &SimplicialComplex) -> Result<Subdivision> {
    if !complex.is_face_closed() {
        return Err(Error::InvalidInput("complex is not closed under faces".into()));
    }
    let carrier: Vec<Simplex> = complex.iter().cloned().collect();
    // Offsets of each dimension in the global vertex numbering.
    let mut offset = vec![0usize; complex.cap() + 2];
    for d in 0..=complex.cap() {
        offset[d + 1] = offset[d] + complex.count(d);
    }
    let global = |s: &[usize]| complex.index_of(s).map(|i| offset[s.len() - 1] + i);
    let cap = complex.cap();
    // chains[g] lists every chain (as global indices, increasing) ending at g.
    let mut chains: Vec<Vec<Vec<usize>>> = Vec::with_capacity(carrier.len());
    for d in 0..=cap {
        let level: Vec<Vec<Vec<usize>>> = complex
            .simplices(d)
            .par_iter()
            .map(|s| {
                let me = global(s).expect("simplex indexed");
                let mut out = vec![vec![me]];
                if d > 0 {
                    let mut faces = Vec::new();
                    crate::rips::for_each_face(s, d - 1, &mut |f| faces.push(global(f).expect("face indexed")));
                    for f in faces {
                        for c in &chains[f] {
                            let mut c = c.clone();
                            c.push(me);
                            out.push(c);
                        }
                    }
                }
                out
            })
            .collect();
        chains.extend(level);
    }
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); cap + 1];
    for c in chains.into_iter().flatten() {
        if c.len() <= cap + 1 {
            by_dim[c.len() - 1].push(c);
        }
    }
    by_dim.par_iter_mut().for_each(|l| l.sort_unstable());
    let sd = SimplicialComplex::from_sorted(carrier.len(), cap, by_dim);
    Ok(Subdivision { complex: Arc::new(sd), carrier })
}

/// The simplicial approximation of the identity that sends the barycenter of
/// a simplex to its largest vertex.
pub fn last_vertex_map(sd: &Subdivision, original: Arc<SimplicialComplex>) -> Result<SimplicialMap> {
    let vertex_map = sd.carrier.iter().map(|s| s[s.len() - 1]).collect();
    SimplicialMap::new(sd.complex.clone(), original, vertex_map)
}

/// Sends the barycenter of each simplex to the lowest-index maximal clique
/// containing it. Along a chain every chosen clique contains the first
/// simplex, so their hulls share its points and the image is a nerve simplex;
/// the construction is verified against the nerve and aborts otherwise.
pub fn carrier_map_to_nerve(sd: &Subdivision, cliques: &CliqueList, nerve: &NerveComplex) -> Result<SimplicialMap> {
    if cliques.cliques != nerve.cells {
        return Err(Error::InvalidInput("nerve was built from a different clique list".into()));
    }
    let vertex_map = sd
        .carrier
        .par_iter()
        .map(|s| {
            cliques
                .cliques
                .iter()
                .position(|c| is_sorted_subset(s, c))
                .ok_or_else(|| Error::Containment(format!("simplex {s:?} lies in no maximal clique")))
        })
        .collect::<Result<Vec<_>>>()?;
    SimplicialMap::new(sd.complex.clone(), nerve.complex.clone(), vertex_map).map_err(|e| match e {
        Error::NotSimplicial(msg) => Error::Internal(format!("carrier map is not simplicial: {msg}")),
        other => other,
    })
}
