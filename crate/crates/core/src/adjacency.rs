//! Directed neighbourhoods between simplices.
//!
//! A lower `(k,i,j)`-adjacency relates two `d`-simplices `σ, τ` when some simplex `κ` of
//! dimension `d - k` is an ordered subtuple of both `d_i(σ)` and `d_j(τ)`. An upper
//! `(k,i,j)`-adjacency relates them when some `(d + k)`-simplex `κ` has `σ ⊆ d_i(κ)` and
//! `τ ⊆ d_j(κ)`. Relations keep every witness `(σ, τ, κ)`, since message functions read
//! `x_κ`, and never contain self-pairs `(σ, σ)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::complex::{subsequences, DirectedSimplicialComplex, SimplexId, VertexId};
use crate::error::{Error, Result};
use crate::linalg::{BoolCsr, SparseMatrix};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Down,
    Up,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Down => "down",
            Direction::Up => "up",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "down" => Ok(Direction::Down),
            "up" => Ok(Direction::Up),
            other => Err(Error::InvalidAdjacency(format!("unknown direction {other:?}"))),
        }
    }
}

/// One choice of `(direction, k, i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjacencySpec {
    pub direction: Direction,
    pub k: usize,
    pub i: usize,
    pub j: usize,
}

impl AdjacencySpec {
    pub fn down(k: usize, i: usize, j: usize) -> Self {
        Self { direction: Direction::Down, k, i, j }
    }

    pub fn up(k: usize, i: usize, j: usize) -> Self {
        Self { direction: Direction::Up, k, i, j }
    }

    /// The same relation with the face-map indices swapped; its matrix is the transpose.
    pub fn swapped(self) -> Self {
        Self { i: self.j, j: self.i, ..self }
    }
}

impl fmt::Display for AdjacencySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{},{})", self.direction, self.k, self.i, self.j)
    }
}

/// `σ` is related to `τ` through the shared simplex `κ`. `σ` and `τ` index the relation's dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Witness {
    pub sigma: usize,
    pub tau: usize,
    pub kappa: SimplexId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyRelation {
    spec: AdjacencySpec,
    dim: usize,
    witnesses: Vec<Witness>,
    matrix: BoolCsr,
}

impl AdjacencyRelation {
    fn assemble(spec: AdjacencySpec, dim: usize, size: usize, mut witnesses: Vec<Witness>) -> Self {
        witnesses.sort_unstable();
        witnesses.dedup();
        let matrix = BoolCsr::from_pairs(size, size, witnesses.iter().map(|w| (w.sigma, w.tau)));
        Self { spec, dim, witnesses, matrix }
    }

    pub fn spec(&self) -> AdjacencySpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of simplices of the related dimension.
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Witnesses sorted by `(σ, τ, κ)`.
    pub fn witnesses(&self) -> &[Witness] {
        &self.witnesses
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// Dimension of the witnesses `κ`, when there are any.
    pub fn kappa_dim(&self) -> Option<usize> {
        self.witnesses.first().map(|w| w.kappa.dim)
    }

    /// Related simplices of `σ`, ascending.
    pub fn neighbors(&self, sigma: usize) -> &[usize] {
        self.matrix.row(sigma)
    }

    /// Row-σ / column-τ boolean operator.
    pub fn to_operator(&self) -> BoolCsr {
        self.matrix.clone()
    }

    pub fn matrix(&self) -> &BoolCsr {
        &self.matrix
    }

    /// Operator counting witnesses per `(σ, τ)`; equals the boolean operator when every pair
    /// has a single witness (always the case for `k = 1`).
    pub fn witness_operator<T: Scalar>(&self) -> SparseMatrix<T> {
        let n = self.size();
        SparseMatrix::from_triplets(n, n, self.witnesses.iter().map(|w| (w.sigma, w.tau, T::one())))
    }

    /// Operator mapping `κ` features onto `σ`, one unit entry per witness.
    pub fn kappa_operator<T: Scalar>(&self, kappa_count: usize) -> SparseMatrix<T> {
        SparseMatrix::from_triplets(self.size(), kappa_count, self.witnesses.iter().map(|w| (w.sigma, w.kappa.index, T::one())))
    }

    /// Coordinate-list text export: header `dim k i j dir`, then `σ τ κ_dim κ_index` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = self.spec;
        writeln!(out, "{} {} {} {} {}", self.dim, s.k, s.i, s.j, s.direction).unwrap();
        for w in &self.witnesses {
            writeln!(out, "{} {} {} {}", w.sigma, w.tau, w.kappa.dim, w.kappa.index).unwrap();
        }
        out
    }
}

fn check_index(index: usize, max: usize) -> Result<()> {
    if index > max {
        Err(Error::IndexOutOfRange { index, max })
    } else {
        Ok(())
    }
}

/// Builds the relation named by `spec` on the `dim`-simplices of `complex`.
pub fn adjacency(complex: &DirectedSimplicialComplex, dim: usize, spec: AdjacencySpec) -> Result<AdjacencyRelation> {
    match spec.direction {
        Direction::Down => lower_adjacency(complex, dim, spec.k, spec.i, spec.j),
        Direction::Up => upper_adjacency(complex, dim, spec.k, spec.i, spec.j),
    }
}

/// Lower `(k,i,j)`-adjacency on `dim`-simplices. When `k > dim` the witness is a vertex.
pub fn lower_adjacency(complex: &DirectedSimplicialComplex, dim: usize, k: usize, i: usize, j: usize) -> Result<AdjacencyRelation> {
    if k == 0 {
        return Err(Error::InvalidAdjacency("k must be at least 1".into()));
    }
    if dim == 0 {
        return Err(Error::InvalidAdjacency("lower adjacency needs simplices of dimension at least 1".into()));
    }
    check_index(i, dim)?;
    check_index(j, dim)?;
    let spec = AdjacencySpec::down(k, i, j);
    let n = complex.count(dim);
    let mut witnesses = Vec::new();
    if k == 1 {
        for sigma in 0..n {
            let kappa = complex.facet_indices(dim, sigma)[i];
            for &(pos, tau) in complex.coface_entries(dim - 1, kappa) {
                if pos == j && tau != sigma {
                    witnesses.push(Witness { sigma, tau, kappa: SimplexId::new(dim - 1, kappa) });
                }
            }
        }
        return Ok(AdjacencyRelation::assemble(spec, dim, n, witnesses));
    }

    let kappa_dim = dim.saturating_sub(k);
    let face_tuple = |s: usize, f: usize| -> Vec<VertexId> {
        let idx = complex.facet_indices(dim, s)[f];
        complex.simplices(dim - 1)[idx].vertices().to_vec()
    };
    let mut by_kappa: HashMap<Vec<VertexId>, Vec<usize>> = HashMap::new();
    for tau in 0..n {
        for kappa in subsequences(&face_tuple(tau, j), kappa_dim + 1) {
            by_kappa.entry(kappa).or_default().push(tau);
        }
    }
    for sigma in 0..n {
        for kappa in subsequences(&face_tuple(sigma, i), kappa_dim + 1) {
            let Some(taus) = by_kappa.get(&kappa) else { continue };
            let kid = complex.id_of(&kappa).expect("subtuples of stored simplices are stored");
            for &tau in taus {
                if tau != sigma {
                    witnesses.push(Witness { sigma, tau, kappa: kid });
                }
            }
        }
    }
    Ok(AdjacencyRelation::assemble(spec, dim, n, witnesses))
}

/// Upper `(k,i,j)`-adjacency on `dim`-simplices. When `k > dim(K) - dim` the witness is taken
/// from the top dimension of the complex.
pub fn upper_adjacency(complex: &DirectedSimplicialComplex, dim: usize, k: usize, i: usize, j: usize) -> Result<AdjacencyRelation> {
    if k == 0 {
        return Err(Error::InvalidAdjacency("k must be at least 1".into()));
    }
    check_index(i, dim + k)?;
    check_index(j, dim + k)?;
    let spec = AdjacencySpec::up(k, i, j);
    let n = complex.count(dim);
    let mut witnesses = Vec::new();
    let Some(top) = complex.dim() else {
        return Ok(AdjacencyRelation::assemble(spec, dim, n, witnesses));
    };
    let kappa_dim = if top < dim || k > top - dim { top } else { dim + k };
    if kappa_dim <= dim {
        return Ok(AdjacencyRelation::assemble(spec, dim, n, witnesses));
    }
    if kappa_dim == dim + 1 {
        for (kappa, faces) in (0..complex.count(kappa_dim)).map(|t| (t, complex.facet_indices(kappa_dim, t))) {
            let (sigma, tau) = (faces[i.min(kappa_dim)], faces[j.min(kappa_dim)]);
            if sigma != tau {
                witnesses.push(Witness { sigma, tau, kappa: SimplexId::new(kappa_dim, kappa) });
            }
        }
        return Ok(AdjacencyRelation::assemble(spec, dim, n, witnesses));
    }
    for (kappa, s) in complex.simplices(kappa_dim).iter().enumerate() {
        let a = s.face(i).expect("positive dimension");
        let b = s.face(j).expect("positive dimension");
        let sigmas = subsequences(a.vertices(), dim + 1);
        let taus = subsequences(b.vertices(), dim + 1);
        for sv in &sigmas {
            let sigma = complex.id_of(sv).expect("closed complex").index;
            for tv in &taus {
                let tau = complex.id_of(tv).expect("closed complex").index;
                if sigma != tau {
                    witnesses.push(Witness { sigma, tau, kappa: SimplexId::new(kappa_dim, kappa) });
                }
            }
        }
    }
    Ok(AdjacencyRelation::assemble(spec, dim, n, witnesses))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IncidenceKind {
    Boundary,
    Coboundary,
}

/// Incidence between `dim`-simplices and their facets (boundary) or the simplices they are
/// facets of (coboundary). `pairs` holds `(σ, τ, i)`: for boundary `τ = d_i(σ)`, for coboundary
/// `σ = d_i(τ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceRelation {
    pub kind: IncidenceKind,
    pub dim: usize,
    pub pairs: Vec<(usize, usize, usize)>,
}

impl IncidenceRelation {
    pub fn boundary(complex: &DirectedSimplicialComplex, dim: usize) -> Self {
        let mut pairs = Vec::new();
        if dim > 0 {
            for sigma in 0..complex.count(dim) {
                for (i, &tau) in complex.facet_indices(dim, sigma).iter().enumerate() {
                    pairs.push((sigma, tau, i));
                }
            }
        }
        Self { kind: IncidenceKind::Boundary, dim, pairs }
    }

    pub fn coboundary(complex: &DirectedSimplicialComplex, dim: usize) -> Self {
        let mut pairs = Vec::new();
        if complex.count(dim + 1) > 0 {
            for sigma in 0..complex.count(dim) {
                for &(i, tau) in complex.coface_entries(dim, sigma) {
                    pairs.push((sigma, tau, i));
                }
            }
        }
        pairs.sort_unstable();
        Self { kind: IncidenceKind::Coboundary, dim, pairs }
    }

    /// Dimension of the other end of each pair.
    pub fn other_dim(&self) -> usize {
        match self.kind {
            IncidenceKind::Boundary => self.dim - 1,
            IncidenceKind::Coboundary => self.dim + 1,
        }
    }

    /// Operator with one unit entry per pair, optionally restricted to face-map index `face`.
    pub fn operator<T: Scalar>(&self, rows: usize, cols: usize, face: Option<usize>) -> SparseMatrix<T> {
        SparseMatrix::from_triplets(rows, cols, self.pairs.iter().filter(|p| face.is_none_or(|f| p.2 == f)).map(|&(s, t, _)| (s, t, T::one())))
    }
}

/// Facets `{d_i(σ)}` of `σ`, deduplicated, ascending.
pub fn boundary(complex: &DirectedSimplicialComplex, sigma: SimplexId) -> Result<Vec<SimplexId>> {
    complex.simplex(sigma)?;
    if sigma.dim == 0 {
        return Err(Error::ZeroDimensional);
    }
    let set: BTreeSet<usize> = complex.facet_indices(sigma.dim, sigma.index).iter().copied().collect();
    Ok(set.into_iter().map(|i| SimplexId::new(sigma.dim - 1, i)).collect())
}

/// Every stored simplex having `σ` as a facet, ascending.
pub fn coboundary(complex: &DirectedSimplicialComplex, sigma: SimplexId) -> Result<Vec<SimplexId>> {
    complex.simplex(sigma)?;
    let set: BTreeSet<usize> = complex.coface_entries(sigma.dim, sigma.index).iter().map(|&(_, t)| t).collect();
    Ok(set.into_iter().map(|t| SimplexId::new(sigma.dim + 1, t)).collect())
}

/// Simplices reachable from `σ` by a simplicial path of at most `steps` hops (including `σ`).
pub fn reachable(rel: &AdjacencyRelation, sigma: usize, steps: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([sigma]);
    let mut frontier = vec![sigma];
    for _ in 0..steps {
        let mut next = Vec::new();
        for s in frontier {
            for &t in rel.neighbors(s) {
                if seen.insert(t) {
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen
}

/// Undirected lower adjacency on `dim`-simplices: distinct simplices sharing at least one facet.
pub fn undirected_lower(complex: &DirectedSimplicialComplex, dim: usize) -> BoolCsr {
    let n = complex.count(dim);
    if dim == 0 {
        return BoolCsr::empty(n, n);
    }
    let mut pairs = Vec::new();
    for f in 0..complex.count(dim - 1) {
        let cof = complex.coface_entries(dim - 1, f);
        for &(_, a) in cof {
            for &(_, b) in cof {
                if a != b {
                    pairs.push((a, b));
                }
            }
        }
    }
    BoolCsr::from_pairs(n, n, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{lift_directed_flag, Digraph};

    fn build(gens: &[&[usize]]) -> DirectedSimplicialComplex {
        DirectedSimplicialComplex::build(gens.iter().map(|g| g.to_vec())).unwrap()
    }

    fn idx(k: &DirectedSimplicialComplex, v: &[usize]) -> usize {
        k.id_of(v).unwrap().index
    }

    #[test]
    fn lower_triangles_share_edge() {
        let k = build(&[&[0, 1, 2], &[1, 2, 3]]);
        let rel = lower_adjacency(&k, 2, 1, 0, 2).unwrap();
        let (s, t) = (idx(&k, &[0, 1, 2]), idx(&k, &[1, 2, 3]));
        assert_eq!(rel.witnesses(), &[Witness { sigma: s, tau: t, kappa: k.id_of(&[1, 2]).unwrap() }]);
    }

    #[test]
    fn lower_edge_relations_follow_heads_and_tails() {
        let k = build(&[&[0, 1], &[1, 2], &[0, 2], &[2, 3]]);
        let a01 = lower_adjacency(&k, 1, 1, 0, 1).unwrap();
        // (a,b) -> (b,c)
        assert_eq!(a01.neighbors(idx(&k, &[0, 1])), &[idx(&k, &[1, 2])]);
        assert_eq!(a01.neighbors(idx(&k, &[1, 2])), &[idx(&k, &[2, 3])]);
        let a00 = lower_adjacency(&k, 1, 1, 0, 0).unwrap();
        assert!(a00.matrix().contains(idx(&k, &[0, 2]), idx(&k, &[1, 2])));
        assert_eq!(a00.witnesses()[0].kappa.dim, 0);
    }

    #[test]
    fn lower_index_out_of_range() {
        let k = build(&[&[0, 1]]);
        assert_eq!(lower_adjacency(&k, 1, 1, 2, 0).unwrap_err(), Error::IndexOutOfRange { index: 2, max: 1 });
        assert!(lower_adjacency(&k, 0, 1, 0, 0).is_err());
    }

    #[test]
    fn upper_edges_in_a_triangle() {
        let k = build(&[&[0, 1, 2]]);
        let rel = upper_adjacency(&k, 1, 1, 2, 0).unwrap();
        assert_eq!(rel.witnesses().len(), 1);
        let w = rel.witnesses()[0];
        assert_eq!((w.sigma, w.tau), (idx(&k, &[0, 1]), idx(&k, &[1, 2])));
    }

    #[test]
    fn upper_node_relations_are_in_and_out_neighbors() {
        let g = Digraph::new(4, [(0, 1), (2, 1), (1, 3)]).unwrap();
        let k = lift_directed_flag(&g, 2);
        let inn = upper_adjacency(&k, 0, 1, 0, 1).unwrap();
        let out = upper_adjacency(&k, 0, 1, 1, 0).unwrap();
        assert_eq!(inn.neighbors(1), &[0, 2]);
        assert_eq!(out.neighbors(1), &[3]);
        assert_eq!(out.neighbors(0), &[1]);
        assert!(upper_adjacency(&k, 0, 1, 0, 0).unwrap().is_empty());
    }

    #[test]
    fn upper_without_cofaces_is_empty() {
        let k = build(&[&[0, 1], &[1, 2]]);
        assert!(upper_adjacency(&k, 1, 1, 2, 0).unwrap().is_empty());
        assert!(upper_adjacency(&DirectedSimplicialComplex::empty(), 0, 1, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn general_k_lower_uses_subtuple_witnesses() {
        // triangles sharing only vertex 2; with k=2 the witness is a vertex inside d_i(σ) and d_j(τ)
        let k = build(&[&[0, 1, 2], &[2, 3, 4]]);
        let rel = lower_adjacency(&k, 2, 2, 0, 2).unwrap();
        // d_0((0,1,2)) = (1,2) ⊇ (2) ⊆ (2,3) = d_2((2,3,4))
        let w = rel.witnesses();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].kappa, k.id_of(&[2]).unwrap());
        // k larger than the dimension clamps κ to a vertex
        assert_eq!(lower_adjacency(&k, 2, 5, 0, 2).unwrap().witnesses(), w);
    }

    #[test]
    fn general_k_upper_with_clamped_kappa_matches_k1() {
        let g = Digraph::circulant(6, &[1, 2]).unwrap();
        let k = lift_directed_flag(&g, 2);
        assert_eq!(upper_adjacency(&k, 1, 3, 2, 0).unwrap().matrix(), upper_adjacency(&k, 1, 1, 2, 0).unwrap().matrix());
        // nodes with k=2: both inside some triangle faces
        let rel = upper_adjacency(&k, 0, 2, 0, 1).unwrap();
        for w in rel.witnesses() {
            let kap = &k.simplices(2)[w.kappa.index];
            assert!(k.simplices(0)[w.sigma].is_subtuple_of(&kap.face(0).unwrap()));
            assert!(k.simplices(0)[w.tau].is_subtuple_of(&kap.face(1).unwrap()));
        }
        assert!(!rel.is_empty());
    }

    #[test]
    fn boundary_and_coboundary() {
        let k = build(&[&[0, 1, 2], &[1, 2, 3]]);
        let t = k.id_of(&[0, 1, 2]).unwrap();
        let b: Vec<Vec<usize>> = boundary(&k, t).unwrap().iter().map(|&s| k.simplex(s).unwrap().vertices().to_vec()).collect();
        assert_eq!(b, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        let e = k.id_of(&[1, 2]).unwrap();
        let c = coboundary(&k, e).unwrap();
        // oracle: scan every triangle's facets
        let expect: Vec<SimplexId> =
            (0..k.count(2)).filter(|&s| (0..3).any(|i| k.face_map(SimplexId::new(2, s), i).unwrap() == e)).map(|s| SimplexId::new(2, s)).collect();
        assert_eq!(c, expect);
        assert_eq!(c.len(), 2);
        assert!(coboundary(&k, t).unwrap().is_empty());
    }

    #[test]
    fn equidirected_strip_reachability_is_a_chain() {
        // triangles (i, i+1, i+2) along a path
        let edges: Vec<(usize, usize)> = (0..6).flat_map(|i| [(i, i + 1), (i, i + 2)]).filter(|&(_, v)| v < 6).collect();
        let g = Digraph::new(6, edges).unwrap();
        let k = lift_directed_flag(&g, 2);
        assert_eq!(k.count(2), 4);
        let rel = lower_adjacency(&k, 2, 1, 0, 2).unwrap();
        let t = |v: &[usize]| idx(&k, v);
        assert_eq!(reachable(&rel, t(&[0, 1, 2]), 0), BTreeSet::from([t(&[0, 1, 2])]));
        assert_eq!(reachable(&rel, t(&[0, 1, 2]), 1), BTreeSet::from([t(&[0, 1, 2]), t(&[1, 2, 3])]));
        assert_eq!(reachable(&rel, t(&[0, 1, 2]), 3).len(), 4);
        assert_eq!(reachable(&rel, t(&[3, 4, 5]), 3).len(), 1);
        for s in 0..k.count(2) {
            assert!(rel.neighbors(s).len() <= 1);
        }
    }

    #[test]
    fn edge_cycle_operator_is_a_cyclic_permutation() {
        let m = 5;
        let g = Digraph::new(m, (0..m).map(|i| (i, (i + 1) % m))).unwrap();
        let k = lift_directed_flag(&g, 2);
        let op = lower_adjacency(&k, 1, 1, 0, 1).unwrap().to_operator();
        for r in 0..m {
            assert_eq!(op.row(r).len(), 1);
        }
        let cols: BTreeSet<usize> = op.iter().map(|(_, c)| c).collect();
        assert_eq!(cols.len(), m);
        // following successors returns to the start after exactly m steps
        let mut e = 0;
        for step in 1..=m {
            e = op.row(e)[0];
            assert_eq!(e == 0, step == m);
        }
    }

    #[test]
    fn diagonal_specs_are_symmetric_and_empty_is_zero() {
        let g = Digraph::circulant(6, &[1, 2]).unwrap();
        let k = lift_directed_flag(&g, 2);
        for i in 0..=1 {
            assert!(lower_adjacency(&k, 1, 1, i, i).unwrap().to_operator().is_symmetric());
        }
        let empty = upper_adjacency(&build(&[&[0, 1]]), 1, 1, 0, 2).unwrap().to_operator();
        assert_eq!(empty.nnz(), 0);
        assert_eq!((empty.rows(), empty.cols()), (1, 1));
    }

    #[test]
    fn export_lists_witnesses() {
        let k = build(&[&[0, 1, 2], &[1, 2, 3]]);
        let text = lower_adjacency(&k, 2, 1, 0, 2).unwrap().to_text();
        assert_eq!(text, "2 1 0 2 down\n0 1 1 2\n");
    }
}
