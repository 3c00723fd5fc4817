//! Directed simplicial complexes: ordered vertex tuples closed under ordered subtuples.
//!
//! Simplices of each dimension are kept in lexicographic order of their vertex tuples,
//! so a [`SimplexId`] is a stable, reproducible handle across runs and machines. Facet
//! and coface tables are computed once at construction; the complex is immutable
//! afterwards.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

pub type VertexId = usize;

/// An ordered tuple of distinct vertices. Its dimension is its length minus one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedSimplex(Vec<VertexId>);

impl DirectedSimplex {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptySimplex);
        }
        let mut seen = HashSet::with_capacity(vertices.len());
        for &v in &vertices {
            if !seen.insert(v) {
                return Err(Error::DuplicateVertexInTuple { vertex: v, tuple: vertices });
            }
        }
        Ok(Self(vertices))
    }

    pub(crate) fn new_unchecked(vertices: Vec<VertexId>) -> Self {
        debug_assert!(!vertices.is_empty());
        Self(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Removes the vertex at position `i`, or the last vertex when `i >= dim`.
    pub fn face(&self, i: usize) -> Option<DirectedSimplex> {
        let k = self.dim();
        if k == 0 {
            return None;
        }
        let drop = i.min(k);
        let mut v = self.0.clone();
        v.remove(drop);
        Some(Self(v))
    }

    /// Order-preserving containment: `self` is a subsequence of `other`.
    pub fn is_subtuple_of(&self, other: &DirectedSimplex) -> bool {
        is_subsequence(&self.0, &other.0)
    }

    /// All subtuples with exactly `len` vertices, in lexicographic order of chosen positions.
    pub fn subtuples(&self, len: usize) -> Vec<DirectedSimplex> {
        subsequences(&self.0, len).into_iter().map(Self).collect()
    }
}

impl fmt::Display for DirectedSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn is_subsequence(needle: &[VertexId], hay: &[VertexId]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|v| it.any(|h| h == v))
}

pub(crate) fn subsequences(items: &[VertexId], len: usize) -> Vec<Vec<VertexId>> {
    fn rec(items: &[VertexId], len: usize, start: usize, cur: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let need = len - cur.len();
        for p in start..=items.len().saturating_sub(need) {
            if p >= items.len() {
                break;
            }
            cur.push(items[p]);
            rec(items, len, p + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 || len > items.len() {
        return out;
    }
    rec(items, len, 0, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Handle to a stored simplex: its dimension and its position in that dimension's sorted list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexId {
    pub dim: usize,
    pub index: usize,
}

impl SimplexId {
    pub fn new(dim: usize, index: usize) -> Self {
        Self { dim, index }
    }
}

#[derive(Clone, Debug)]
pub struct DirectedSimplicialComplex {
    levels: Vec<Vec<DirectedSimplex>>,
    lookup: HashMap<Vec<VertexId>, usize>,
    /// `facets[d][s][i]` is the index of `d_i(s)` among the (d-1)-simplices.
    facets: Vec<Vec<Vec<usize>>>,
    /// `cofaces[d][s]` lists `(i, t)` with `d_i(t) = s`, `t` a (d+1)-simplex.
    cofaces: Vec<Vec<Vec<(usize, usize)>>>,
}

impl PartialEq for DirectedSimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels
    }
}

impl Eq for DirectedSimplicialComplex {}

impl DirectedSimplicialComplex {
    /// Closes `generators` under non-empty ordered subtuples.
    ///
    /// Vertex ids are compacted to `0..|V|` preserving their relative order.
    pub fn build(generators: impl IntoIterator<Item = Vec<VertexId>>) -> Result<Self> {
        let generators: Vec<DirectedSimplex> = generators.into_iter().map(DirectedSimplex::new).collect::<Result<_>>()?;
        let used: BTreeSet<VertexId> = generators.iter().flat_map(|s| s.0.iter().copied()).collect();
        let compact: HashMap<VertexId, VertexId> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();

        let mut seen: HashSet<Vec<VertexId>> = HashSet::new();
        let mut stack: Vec<Vec<VertexId>> = generators.into_iter().map(|s| s.0.iter().map(|v| compact[v]).collect()).collect();
        // Closing under facets reaches every ordered subtuple.
        while let Some(t) = stack.pop() {
            if !seen.insert(t.clone()) {
                continue;
            }
            if t.len() > 1 {
                for drop in 0..t.len() {
                    let mut f = t.clone();
                    f.remove(drop);
                    if !seen.contains(&f) {
                        stack.push(f);
                    }
                }
            }
        }
        let max_len = seen.iter().map(Vec::len).max().unwrap_or(0);
        let mut levels: Vec<Vec<DirectedSimplex>> = vec![Vec::new(); max_len];
        for t in seen {
            levels[t.len() - 1].push(DirectedSimplex(t));
        }
        Ok(Self::from_closed_levels(levels))
    }

    /// Assembles a complex from per-dimension simplex lists that are already closed
    /// under ordered subtuples. Lists are sorted and deduplicated here.
    pub(crate) fn from_closed_levels(mut levels: Vec<Vec<DirectedSimplex>>) -> Self {
        while levels.last().is_some_and(Vec::is_empty) {
            levels.pop();
        }
        for level in &mut levels {
            level.sort_unstable();
            level.dedup();
        }
        let mut lookup = HashMap::new();
        for level in &levels {
            for (i, s) in level.iter().enumerate() {
                lookup.insert(s.0.clone(), i);
            }
        }
        let mut facets: Vec<Vec<Vec<usize>>> = Vec::with_capacity(levels.len());
        let mut cofaces: Vec<Vec<Vec<(usize, usize)>>> = levels.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for (d, level) in levels.iter().enumerate() {
            let mut dim_facets = Vec::with_capacity(level.len());
            for (t, s) in level.iter().enumerate() {
                if d == 0 {
                    dim_facets.push(Vec::new());
                    continue;
                }
                let row: Vec<usize> = (0..=d)
                    .map(|i| {
                        let f = s.face(i).expect("positive dimension");
                        *lookup.get(&f.0).unwrap_or_else(|| panic!("complex not closed: facet {f} of {s} missing"))
                    })
                    .collect();
                for (i, &f) in row.iter().enumerate() {
                    cofaces[d - 1][f].push((i, t));
                }
                dim_facets.push(row);
            }
            facets.push(dim_facets);
        }
        Self { levels, lookup, facets, cofaces }
    }

    pub fn empty() -> Self {
        Self::from_closed_levels(Vec::new())
    }

    pub fn num_vertices(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }

    /// `dim(K)`; `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.levels.len().checked_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Number of simplices of each dimension, `counts[d]` for `d = 0..=dim(K)`.
    pub fn per_dim_counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Number of simplices of dimension `dim` (zero beyond `dim(K)`).
    pub fn count(&self, dim: usize) -> usize {
        self.levels.get(dim).map_or(0, Vec::len)
    }

    pub fn simplices(&self, dim: usize) -> &[DirectedSimplex] {
        self.levels.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn simplex(&self, id: SimplexId) -> Result<&DirectedSimplex> {
        self.levels.get(id.dim).and_then(|l| l.get(id.index)).ok_or(Error::UnknownSimplex { dim: id.dim, index: id.index })
    }

    pub fn id_of(&self, vertices: &[VertexId]) -> Option<SimplexId> {
        if vertices.is_empty() {
            return None;
        }
        self.lookup.get(vertices).map(|&index| SimplexId { dim: vertices.len() - 1, index })
    }

    pub fn contains(&self, vertices: &[VertexId]) -> bool {
        self.id_of(vertices).is_some()
    }

    /// Iterates every simplex, dimensions ascending, lexicographic within a dimension.
    pub fn iter(&self) -> impl Iterator<Item = (SimplexId, &DirectedSimplex)> {
        self.levels.iter().enumerate().flat_map(|(d, l)| l.iter().enumerate().map(move |(i, s)| (SimplexId::new(d, i), s)))
    }

    /// The face map `d_i`: drops vertex `i`, or the last vertex when `i >= dim(σ)`.
    pub fn face_map(&self, sigma: SimplexId, i: usize) -> Result<SimplexId> {
        self.simplex(sigma)?;
        if sigma.dim == 0 {
            return Err(Error::ZeroDimensional);
        }
        let row = &self.facets[sigma.dim][sigma.index];
        Ok(SimplexId::new(sigma.dim - 1, row[i.min(sigma.dim)]))
    }

    /// Facet indices of `(dim, index)` in face-map order `d_0, …, d_dim`.
    pub fn facet_indices(&self, dim: usize, index: usize) -> &[usize] {
        &self.facets[dim][index]
    }

    /// `(i, t)` pairs with `d_i(t) = (dim, index)`, `t` ranging over (dim+1)-simplices.
    pub fn coface_entries(&self, dim: usize, index: usize) -> &[(usize, usize)] {
        &self.cofaces[dim][index]
    }

    /// Sub-complex of all simplices with dimension at most `k`.
    pub fn skeleton(&self, k: usize) -> Self {
        Self::from_closed_levels(self.levels.iter().take(k + 1).cloned().collect())
    }

    /// Applies the vertex map `v -> perm[v]` and re-canonicalizes.
    pub fn relabel(&self, perm: &[VertexId]) -> Self {
        assert_eq!(perm.len(), self.num_vertices(), "permutation length must equal |V|");
        let levels = self.levels.iter().map(|l| l.iter().map(|s| DirectedSimplex(s.0.iter().map(|&v| perm[v]).collect())).collect()).collect();
        Self::from_closed_levels(levels)
    }

    /// Checks inclusivity directly: every facet of every simplex is stored.
    pub fn is_closed(&self) -> bool {
        self.iter().all(|(_, s)| (0..=s.dim()).filter_map(|i| s.face(i)).all(|f| self.contains(&f.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuples(k: &DirectedSimplicialComplex, dim: usize) -> Vec<Vec<usize>> {
        k.simplices(dim).iter().map(|s| s.vertices().to_vec()).collect()
    }

    #[test]
    fn closure_of_single_triangle() {
        let k = DirectedSimplicialComplex::build([vec![0, 1, 2]]).unwrap();
        assert_eq!(k.per_dim_counts(), vec![3, 3, 1]);
        assert_eq!(tuples(&k, 1), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(k.dim(), Some(2));
    }

    #[test]
    fn closure_of_single_edge() {
        let k = DirectedSimplicialComplex::build([vec![0, 1]]).unwrap();
        assert_eq!(tuples(&k, 0), vec![vec![0], vec![1]]);
        assert_eq!(tuples(&k, 1), vec![vec![0, 1]]);
    }

    #[test]
    fn closure_inserts_missing_subtuple_edge() {
        let k = DirectedSimplicialComplex::build([vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
        assert!(k.contains(&[0, 3]));
        // bitmask enumeration of ordered subtuples of both generators
        let mut expected: BTreeSet<Vec<usize>> = BTreeSet::new();
        for g in [[0usize, 1, 2], [0, 2, 3]] {
            for mask in 1u32..8 {
                expected.insert((0..3).filter(|p| mask & (1 << p) != 0).map(|p| g[p]).collect());
            }
        }
        let got: BTreeSet<Vec<usize>> = k.iter().map(|(_, s)| s.vertices().to_vec()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn vertex_ids_are_compacted_in_order() {
        let k = DirectedSimplicialComplex::build([vec![10, 3], vec![7]]).unwrap();
        assert_eq!(tuples(&k, 0), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(tuples(&k, 1), vec![vec![2, 0]]);
    }

    #[test]
    fn repeated_vertex_is_rejected() {
        let err = DirectedSimplicialComplex::build([vec![0, 1, 0]]).unwrap_err();
        assert!(matches!(err, Error::DuplicateVertexInTuple { vertex: 0, .. }));
        assert_eq!(DirectedSimplicialComplex::build([vec![]]).unwrap_err(), Error::EmptySimplex);
    }

    #[test]
    fn digons_and_reorderings_coexist() {
        let k = DirectedSimplicialComplex::build([vec![0, 1], vec![1, 0], vec![0, 1, 2], vec![1, 0, 2]]).unwrap();
        assert!(k.contains(&[0, 1]) && k.contains(&[1, 0]));
        assert_eq!(k.count(2), 2);
    }

    #[test]
    fn face_maps_follow_definition() {
        let k = DirectedSimplicialComplex::build([vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let s = k.id_of(&[0, 1, 2]).unwrap();
        let t = k.id_of(&[1, 2, 3]).unwrap();
        assert_eq!(k.face_map(s, 0).unwrap(), k.id_of(&[1, 2]).unwrap());
        assert_eq!(k.face_map(t, 2).unwrap(), k.id_of(&[1, 2]).unwrap());
        let e = k.id_of(&[0, 1]).unwrap();
        assert_eq!(k.face_map(e, 5).unwrap(), k.id_of(&[0]).unwrap());
        let v = k.id_of(&[0]).unwrap();
        assert_eq!(k.face_map(v, 0).unwrap_err(), Error::ZeroDimensional);
    }

    #[test]
    fn skeleton_truncates() {
        let k = DirectedSimplicialComplex::build([vec![0, 1, 2]]).unwrap();
        let s1 = k.skeleton(1);
        assert_eq!(s1.per_dim_counts(), vec![3, 3]);
        assert_eq!(tuples(&s1, 1), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(k.skeleton(0).per_dim_counts(), vec![3]);
        assert_eq!(k.skeleton(7), k);
    }

    #[test]
    fn empty_complex() {
        let k = DirectedSimplicialComplex::build(Vec::<Vec<usize>>::new()).unwrap();
        assert!(k.per_dim_counts().is_empty());
        assert_eq!(k.dim(), None);
        assert_eq!(k, DirectedSimplicialComplex::empty());
    }

    #[test]
    fn coface_table_inverts_facets() {
        let k = DirectedSimplicialComplex::build([vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let e = k.id_of(&[1, 2]).unwrap();
        let cof: Vec<Vec<usize>> = k.coface_entries(1, e.index).iter().map(|&(_, t)| k.simplices(2)[t].vertices().to_vec()).collect();
        assert_eq!(cof, vec![vec![0, 1, 2], vec![1, 2, 3]]);
    }

    #[test]
    fn subtuple_helpers() {
        let s = DirectedSimplex::new(vec![3, 1, 2]).unwrap();
        assert!(DirectedSimplex::new(vec![3, 2]).unwrap().is_subtuple_of(&s));
        assert!(!DirectedSimplex::new(vec![2, 3]).unwrap().is_subtuple_of(&s));
        let subs: Vec<Vec<usize>> = s.subtuples(2).iter().map(|t| t.vertices().to_vec()).collect();
        assert_eq!(subs, vec![vec![3, 1], vec![3, 2], vec![1, 2]]);
        assert!(s.subtuples(4).is_empty());
    }
}
