//! Graphs and their lifts to (directed) flag complexes.

use std::collections::BTreeSet;

use crate::complex::{DirectedSimplex, DirectedSimplicialComplex, VertexId};
use crate::error::{Error, Result};

/// Simple digraph on vertices `0..n`: no self-loops, no repeated edges. Reciprocal edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl Digraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) outside 0..{n}")));
            }
            set.insert((u, v));
        }
        Ok(Self { n, edges: set })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.contains(&(u, v))
    }

    /// Sorted out-neighbour lists.
    pub fn out_neighbors(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            out[u].push(v);
        }
        out
    }

    /// Sorted in-neighbour lists.
    pub fn in_neighbors(&self) -> Vec<Vec<VertexId>> {
        let mut inn = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            inn[v].push(u);
        }
        for l in &mut inn {
            l.sort_unstable();
        }
        inn
    }

    /// Image under the vertex map `v -> perm[v]`.
    pub fn permuted(&self, perm: &[VertexId]) -> Self {
        assert_eq!(perm.len(), self.n);
        Self { n: self.n, edges: self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect() }
    }

    /// Circulant digraph `C_n(S)`: edges `i -> i + s mod n` for every `s` in `steps`.
    pub fn circulant(n: usize, steps: &[usize]) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for &s in steps {
                edges.push((i, (i + s) % n));
            }
        }
        Self::new(n, edges)
    }

    /// Forgets orientation.
    pub fn to_undirected(&self) -> UndirectedGraph {
        UndirectedGraph { n: self.n, edges: self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect() }
    }
}

/// Simple undirected graph on vertices `0..n`; edges stored as `(min, max)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UndirectedGraph {
    n: usize,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl UndirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) outside 0..{n}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self { n, edges: set })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self) -> Vec<Vec<VertexId>> {
        let mut nb = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            nb[u].push(v);
            nb[v].push(u);
        }
        for l in &mut nb {
            l.sort_unstable();
        }
        nb
    }
}

fn sorted_intersection(a: &[VertexId], b: &[VertexId]) -> Vec<VertexId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Directed flag complex: the k-simplices are the ordered (k+1)-cliques of `g`, for `k <= max_dim`.
///
/// Cliques are grown one vertex at a time; the candidates for extending `(v_1, …, v_k)`
/// are the common out-neighbours of all its vertices.
pub fn lift_directed_flag(g: &Digraph, max_dim: usize) -> DirectedSimplicialComplex {
    let out = g.out_neighbors();
    let mut levels: Vec<Vec<DirectedSimplex>> = Vec::new();
    // frontier entries: (clique, common out-neighbourhood)
    let mut frontier: Vec<(Vec<VertexId>, Vec<VertexId>)> = (0..g.n).map(|v| (vec![v], out[v].clone())).collect();
    for dim in 0..=max_dim {
        if frontier.is_empty() {
            break;
        }
        levels.push(frontier.iter().map(|(c, _)| DirectedSimplex::new_unchecked(c.clone())).collect());
        if dim == max_dim {
            break;
        }
        let mut next = Vec::new();
        for (clique, common) in &frontier {
            for &v in common {
                let mut c = clique.clone();
                c.push(v);
                next.push((c, sorted_intersection(common, &out[v])));
            }
        }
        frontier = next;
    }
    DirectedSimplicialComplex::from_closed_levels(levels)
}

/// Flag complex of an undirected graph; each clique is stored once, in ascending vertex order.
pub fn lift_undirected_flag(g: &UndirectedGraph, max_dim: usize) -> DirectedSimplicialComplex {
    let nb = g.neighbors();
    let higher: Vec<Vec<VertexId>> = nb.iter().enumerate().map(|(u, l)| l.iter().copied().filter(|&v| v > u).collect()).collect();
    let mut levels: Vec<Vec<DirectedSimplex>> = Vec::new();
    let mut frontier: Vec<(Vec<VertexId>, Vec<VertexId>)> = (0..g.n).map(|v| (vec![v], higher[v].clone())).collect();
    for dim in 0..=max_dim {
        if frontier.is_empty() {
            break;
        }
        levels.push(frontier.iter().map(|(c, _)| DirectedSimplex::new_unchecked(c.clone())).collect());
        if dim == max_dim {
            break;
        }
        let mut next = Vec::new();
        for (clique, common) in &frontier {
            for &v in common {
                let mut c = clique.clone();
                c.push(v);
                next.push((c, sorted_intersection(common, &higher[v])));
            }
        }
        frontier = next;
    }
    DirectedSimplicialComplex::from_closed_levels(levels)
}

/// Forgets vertex order: each simplex is replaced by its sorted representative.
pub fn symmetrize(k: &DirectedSimplicialComplex) -> DirectedSimplicialComplex {
    let levels = (0..k.per_dim_counts().len())
        .map(|d| {
            k.simplices(d)
                .iter()
                .map(|s| {
                    let mut v = s.vertices().to_vec();
                    v.sort_unstable();
                    DirectedSimplex::new_unchecked(v)
                })
                .collect()
        })
        .collect();
    DirectedSimplicialComplex::from_closed_levels(levels)
}

/// Heap's algorithm over `0..n`, calling `f` with each permutation until it returns `true`.
pub(crate) fn any_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut perm: Vec<usize> = (0..n).collect();
    if f(&perm) {
        return true;
    }
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if f(&perm) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}

/// Exact isomorphism test by trying every vertex bijection. Only meant for small complexes.
pub fn isomorphic_exhaustive(a: &DirectedSimplicialComplex, b: &DirectedSimplicialComplex) -> bool {
    if a.per_dim_counts() != b.per_dim_counts() {
        return false;
    }
    any_permutation(a.num_vertices(), |perm| a.relabel(perm) == *b)
}

/// Searches small digraphs for a pair whose directed flag complexes are non-isomorphic while
/// their symmetrized complexes are isomorphic. Both lifts are required to contain directed
/// triangles. Digraphs are enumerated by vertex count, then by edge bitmask.
pub fn find_symmetrization_collapse(n_max: usize) -> Option<(Digraph, Digraph)> {
    for n in 3..=n_max.min(4) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|(u, v)| u < v).collect();
        // one orientation per undirected pair keeps reciprocal edges out of the search
        let mut lifted: Vec<(Digraph, DirectedSimplicialComplex, DirectedSimplicialComplex)> = Vec::new();
        for present in 0u32..(1 << pairs.len()) {
            for orient in 0u32..(1 << pairs.len()) {
                if orient & !present != 0 {
                    continue;
                }
                let edges =
                    pairs.iter().enumerate().filter(|(b, _)| present & (1 << b) != 0).map(|(b, &(u, v))| if orient & (1 << b) != 0 { (v, u) } else { (u, v) });
                let g = Digraph::new(n, edges).expect("valid by construction");
                let k = lift_directed_flag(&g, 2);
                if k.count(2) == 0 {
                    continue;
                }
                let s = symmetrize(&k);
                for (h, kh, sh) in &lifted {
                    if !isomorphic_exhaustive(&k, kh) && isomorphic_exhaustive(&s, sh) {
                        return Some((h.clone(), g));
                    }
                }
                lifted.push((g, k, s));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_digraph() -> Digraph {
        // 0->1, 0->2, 1->2 form a directed triangle; 0-2-3 is not one because (0,3) is missing.
        Digraph::new(4, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn fig1_directed_lift_has_one_triangle() {
        let k = lift_directed_flag(&fig1_digraph(), 2);
        assert_eq!(k.per_dim_counts(), vec![4, 5, 1]);
        assert_eq!(k.simplices(2)[0].vertices(), &[0, 1, 2]);
        assert!(!k.contains(&[0, 2, 3]));
    }

    #[test]
    fn fig1_undirected_lift_has_two_triangles() {
        let g = UndirectedGraph::new(4, [(0, 1), (0, 2), (1, 2), (2, 3), (0, 3)]).unwrap();
        let k = lift_undirected_flag(&g, 2);
        let tri: Vec<&[usize]> = k.simplices(2).iter().map(|s| s.vertices()).collect();
        assert_eq!(tri, vec![&[0, 1, 2][..], &[0, 2, 3][..]]);
    }

    #[test]
    fn transitive_triangle_and_cycle() {
        let t = Digraph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(lift_directed_flag(&t, 2).per_dim_counts(), vec![3, 3, 1]);
        let c = Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let kc = lift_directed_flag(&c, 2);
        assert_eq!(kc.count(2), 0);
        // brute force over all orderings of {0,1,2}
        let mut ordered_cliques = 0;
        any_permutation(3, |p| {
            if (0..3).all(|i| (i + 1..3).all(|j| c.has_edge(p[i], p[j]))) {
                ordered_cliques += 1;
            }
            false
        });
        assert_eq!(ordered_cliques, 0);
    }

    #[test]
    fn undirected_small_cases() {
        let k3 = UndirectedGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(lift_undirected_flag(&k3, 2).count(2), 1);
        let path = UndirectedGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(lift_undirected_flag(&path, 2).count(2), 0);
    }

    #[test]
    fn isolated_vertices_survive_lift() {
        let g = Digraph::new(3, [(0, 1)]).unwrap();
        assert_eq!(lift_directed_flag(&g, 2).per_dim_counts(), vec![3, 1]);
        let e = Digraph::new(2, []).unwrap();
        assert_eq!(lift_directed_flag(&e, 2).per_dim_counts(), vec![2]);
    }

    #[test]
    fn one_skeleton_is_the_digraph() {
        let g = fig1_digraph();
        let k = lift_directed_flag(&g, 2).skeleton(1);
        let edges: Vec<(usize, usize)> = k.simplices(1).iter().map(|s| (s.vertices()[0], s.vertices()[1])).collect();
        assert_eq!(edges, g.edges().collect::<Vec<_>>());
        assert_eq!(k.num_vertices(), 4);
    }

    #[test]
    fn symmetrize_collapses_digons() {
        let k = DirectedSimplicialComplex::build([vec![0, 1], vec![1, 0]]).unwrap();
        let s = symmetrize(&k);
        assert_eq!(s.per_dim_counts(), vec![2, 1]);
        assert_eq!(symmetrize(&s), s);
        assert!(s.is_closed());
    }

    #[test]
    fn symmetrization_collapse_pair_exists() {
        let (a, b) = find_symmetrization_collapse(4).expect("a collapsing pair on at most 4 vertices");
        let (ka, kb) = (lift_directed_flag(&a, 2), lift_directed_flag(&b, 2));
        assert!(!isomorphic_exhaustive(&ka, &kb));
        assert!(isomorphic_exhaustive(&symmetrize(&ka), &symmetrize(&kb)));
    }

    #[test]
    fn max_dim_is_monotone() {
        let g = Digraph::circulant(6, &[1, 2]).unwrap();
        let k1 = lift_directed_flag(&g, 1);
        let k3 = lift_directed_flag(&g, 3);
        assert_eq!(k1.per_dim_counts()[..], k3.per_dim_counts()[..2]);
    }
}
