use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Sorted, duplicate-free vertex indices.
pub type Simplex = Vec<usize>;

/// A face-closed simplicial complex on the vertex set `0..n`, stored per
/// dimension up to a cap. Every vertex is a 0-simplex and simplices of each
/// dimension are kept in lexicographic order, so the positions used by
/// boundary matrices are reproducible.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    n_vertices: usize,
    cap: usize,
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.n_vertices == other.n_vertices && self.cap == other.cap && self.by_dim == other.by_dim
    }
}

impl Eq for SimplicialComplex {}

impl SimplicialComplex {
    /// Assemble from per-dimension lists that are already sorted and face
    /// closed. Callers inside the crate guarantee both.
    pub(crate) fn from_sorted(n_vertices: usize, cap: usize, mut by_dim: Vec<Vec<Simplex>>) -> Self {
        by_dim.resize(cap + 1, Vec::new());
        while by_dim.len() > cap + 1 {
            by_dim.pop();
        }
        by_dim[0] = (0..n_vertices).map(|v| vec![v]).collect();
        let index = by_dim
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        Self { n_vertices, cap, by_dim, index }
    }

    /// The complex with exactly the given simplices (plus all vertices).
    /// Fails when the list is not closed under faces.
    pub fn from_simplices<I>(n_vertices: usize, cap: usize, simplices: I) -> Result<Self>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let by_dim = bucket(n_vertices, cap, simplices)?;
        let complex = Self::from_sorted(n_vertices, cap, by_dim);
        if let Some(s) = complex.first_missing_face() {
            return Err(Error::InvalidInput(format!("simplex list is not face closed: missing {s:?}")));
        }
        Ok(complex)
    }

    /// The smallest complex containing the given simplices, truncated at `cap`.
    pub fn closure<I>(n_vertices: usize, cap: usize, generators: I) -> Result<Self>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut all = Vec::new();
        for g in generators {
            let g = normalize(n_vertices, g)?;
            for_each_face(&g, cap, &mut |f| all.push(f.to_vec()));
        }
        let by_dim = bucket(n_vertices, cap, all)?;
        Ok(Self::from_sorted(n_vertices, cap, by_dim))
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Largest dimension that may be stored.
    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Largest dimension with at least one simplex.
    pub fn dim(&self) -> usize {
        self.by_dim.iter().rposition(|l| !l.is_empty()).unwrap_or(0)
    }

    pub fn simplices(&self, dim: usize) -> &[Simplex] {
        self.by_dim.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.simplices(dim).len()
    }

    pub fn total(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    /// Position of `s` within its dimension.
    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        let d = s.len().checked_sub(1)?;
        self.index.get(d)?.get(s).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.index_of(s).is_some()
    }

    /// All simplices, by increasing dimension then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// Whether every simplex of `self` is a simplex of `other` (same vertex labels).
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    fn first_missing_face(&self) -> Option<Simplex> {
        for list in self.by_dim.iter().skip(1) {
            for s in list {
                for skip in 0..s.len() {
                    let face: Simplex =
                        s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    if !self.contains(&face) {
                        return Some(face);
                    }
                }
            }
        }
        None
    }

    /// Re-verify face closure.
    pub fn is_face_closed(&self) -> bool {
        self.first_missing_face().is_none()
    }
}

fn normalize(n: usize, mut s: Simplex) -> Result<Simplex> {
    if s.is_empty() {
        return Err(Error::InvalidInput("empty simplex".into()));
    }
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput(format!("repeated vertex in {s:?}")));
    }
    if s[s.len() - 1] >= n {
        return Err(Error::InvalidInput(format!("vertex out of range in {s:?}")));
    }
    Ok(s)
}

fn bucket<I>(n: usize, cap: usize, simplices: I) -> Result<Vec<Vec<Simplex>>>
where
    I: IntoIterator<Item = Simplex>,
{
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); cap + 1];
    for s in simplices {
        let s = normalize(n, s)?;
        let d = s.len() - 1;
        if d > cap {
            return Err(Error::InvalidInput(format!("simplex {s:?} exceeds the dimension cap {cap}")));
        }
        by_dim[d].push(s);
    }
    for list in &mut by_dim {
        list.sort();
        list.dedup();
    }
    Ok(by_dim)
}

/// Calls `f` on every nonempty face of `s` with at most `cap + 1` vertices.
pub(crate) fn for_each_face(s: &[usize], cap: usize, f: &mut impl FnMut(&[usize])) {
    let k = s.len();
    let mut buf = Vec::with_capacity(k);
    fn rec(s: &[usize], start: usize, max_len: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        for i in start..s.len() {
            buf.push(s[i]);
            f(buf);
            if buf.len() < max_len {
                rec(s, i + 1, max_len, buf, f);
            }
            buf.pop();
        }
    }
    rec(s, 0, (cap + 1).min(k), &mut buf, f);
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    n: usize,
    cap: usize,
    simplices: Vec<Simplex>,
}

impl Serialize for SimplicialComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexJson { n: self.n_vertices, cap: self.cap, simplices: self.iter().cloned().collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SimplicialComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = ComplexJson::deserialize(deserializer)?;
        SimplicialComplex::from_simplices(raw.n, raw.cap, raw.simplices).map_err(serde::de::Error::custom)
    }
}

/// A vertex map between complexes that sends every simplex onto a simplex.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    source: Arc<SimplicialComplex>,
    target: Arc<SimplicialComplex>,
    vertex_map: Vec<usize>,
}

impl SimplicialMap {
    /// Checks simpliciality on every source simplex.
    pub fn new(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        vertex_map: Vec<usize>,
    ) -> Result<Self> {
        if vertex_map.len() != source.n_vertices() {
            return Err(Error::NotSimplicial(format!(
                "vertex map has {} entries for {} source vertices",
                vertex_map.len(),
                source.n_vertices()
            )));
        }
        if let Some(&v) = vertex_map.iter().find(|&&v| v >= target.n_vertices()) {
            return Err(Error::NotSimplicial(format!("image vertex {v} out of range")));
        }
        let map = Self { source, target, vertex_map };
        if let Some(s) = map.source.iter().find(|s| !map.target.contains(&map.image(s))) {
            return Err(Error::NotSimplicial(format!(
                "image {:?} of simplex {s:?} is not in the target",
                map.image(s)
            )));
        }
        Ok(map)
    }

    pub fn identity(complex: Arc<SimplicialComplex>) -> Self {
        let n = complex.n_vertices();
        Self { source: complex.clone(), target: complex, vertex_map: (0..n).collect() }
    }

    pub fn source(&self) -> &Arc<SimplicialComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SimplicialComplex> {
        &self.target
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    /// Image vertex set of `s`, sorted and deduplicated.
    pub fn image(&self, s: &[usize]) -> Simplex {
        let mut img: Simplex = s.iter().map(|&v| self.vertex_map[v]).collect();
        img.sort_unstable();
        img.dedup();
        img
    }

    /// `then . self`
    pub fn then(&self, then: &SimplicialMap) -> Result<SimplicialMap> {
        if !Arc::ptr_eq(&self.target, &then.source) && *self.target != *then.source {
            return Err(Error::InvalidInput("maps are not composable".into()));
        }
        let vertex_map = self.vertex_map.iter().map(|&v| then.vertex_map[v]).collect();
        Ok(SimplicialMap { source: self.source.clone(), target: then.target.clone(), vertex_map })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_adds_faces_up_to_cap() {
        let c = SimplicialComplex::closure(4, 1, [vec![0, 1, 2], vec![3]]).unwrap();
        assert_eq!(c.count(0), 4);
        assert_eq!(c.simplices(1), &[vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(c.count(2), 0);
        assert!(c.is_face_closed());
    }

    #[test]
    fn from_simplices_requires_faces() {
        assert!(SimplicialComplex::from_simplices(3, 2, [vec![0, 1, 2]]).is_err());
        let ok = SimplicialComplex::from_simplices(3, 2, [vec![0, 1], vec![2, 1]]).unwrap();
        assert!(ok.contains(&[1, 2]));
    }

    #[test]
    fn json_shape() {
        let c = SimplicialComplex::closure(3, 2, [vec![0, 1]]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"n":3,"cap":2,"simplices":[[0],[1],[2],[0,1]]}"#);
        let back: SimplicialComplex = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn map_simpliciality_is_checked() {
        let edge = Arc::new(SimplicialComplex::closure(2, 1, [vec![0, 1]]).unwrap());
        let two = Arc::new(SimplicialComplex::closure(2, 1, [vec![0], vec![1]]).unwrap());
        assert!(SimplicialMap::new(edge.clone(), two.clone(), vec![0, 1]).is_err());
        assert!(SimplicialMap::new(edge.clone(), two, vec![1, 1]).is_ok());
        let id = SimplicialMap::identity(edge.clone());
        assert_eq!(id.then(&id).unwrap().vertex_map(), &[0, 1]);
    }
}
