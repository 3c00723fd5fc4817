//! Operators of one complex, compiled for one model.

use std::collections::HashMap;

use dirsimplex::adjacency::IncidenceRelation;
use dirsimplex::{adjacency, undirected_lower, DirectedSimplicialComplex, Matrix, Scalar, SparseMatrix};

use crate::error::{Error, Result};
use crate::spec::{Aggregation, ModelSpec, NeighborhoodKind};

/// Identifies one sparse operator; rows index the updated dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKey {
    Relation(usize, NeighborhoodKind),
    /// Witness-to-κ map of an adjacency relation.
    Kappa(usize, NeighborhoodKind),
    Boundary(usize, Option<usize>),
    Coboundary(usize),
}

#[derive(Clone, Debug)]
pub struct Domain<T> {
    counts: Vec<usize>,
    ops: HashMap<OpKey, SparseMatrix<T>>,
    /// Dimension of κ for each `Kappa` operator.
    kappa_dims: HashMap<OpKey, usize>,
}

impl<T: Scalar> Domain<T> {
    /// Compiles every operator the model reads on `complex`.
    pub fn new(complex: &DirectedSimplicialComplex, spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        let counts: Vec<usize> = spec.dims.iter().map(|&d| complex.count(d)).collect();
        let mut dom = Self { counts, ops: HashMap::new(), kappa_dims: HashMap::new() };
        for layer in &spec.layers {
            for r in &layer.relations {
                let key = OpKey::Relation(r.dim, r.kind);
                if dom.ops.contains_key(&key) {
                    continue;
                }
                let n = complex.count(r.dim);
                let op = match r.kind {
                    NeighborhoodKind::Adjacency(s) => {
                        let rel = adjacency(complex, r.dim, s)?;
                        if layer.use_kappa {
                            if let Some(kd) = rel.kappa_dim() {
                                if spec.position(kd).is_none() {
                                    return Err(Error::InvalidModel(format!("κ dimension {kd} of {s} carries no features")));
                                }
                                let kop = rel.kappa_operator(complex.count(kd));
                                let kkey = OpKey::Kappa(r.dim, r.kind);
                                dom.ops.insert(kkey, aggregate(kop, spec.aggregation));
                                dom.kappa_dims.insert(kkey, kd);
                            }
                        }
                        rel.witness_operator()
                    }
                    NeighborhoodKind::UndirectedLower => undirected_lower(complex, r.dim).to_weighted(),
                    NeighborhoodKind::GcnNormalized => gcn_operator(complex),
                    NeighborhoodKind::InNeighbors => SparseMatrix::from_triplets(n, n, edges(complex).map(|(u, v)| (v, u, T::one()))),
                    NeighborhoodKind::OutNeighbors => SparseMatrix::from_triplets(n, n, edges(complex).map(|(u, v)| (u, v, T::one()))),
                };
                let op = if r.kind == NeighborhoodKind::GcnNormalized { op } else { aggregate(op, spec.aggregation) };
                dom.ops.insert(key, op);
            }
            for &d in &spec.dims {
                if layer.use_boundary && d > 0 && spec.position(d - 1).is_some() {
                    let inc = IncidenceRelation::boundary(complex, d);
                    let faces: Vec<Option<usize>> = if layer.per_face_incidence { (0..=d).map(Some).collect() } else { vec![None] };
                    for f in faces {
                        let op = inc.operator(complex.count(d), complex.count(d - 1), f);
                        dom.ops.entry(OpKey::Boundary(d, f)).or_insert_with(|| aggregate(op, spec.aggregation));
                    }
                }
                if layer.use_coboundary && spec.position(d + 1).is_some() {
                    let op = IncidenceRelation::coboundary(complex, d).operator(complex.count(d), complex.count(d + 1), None);
                    dom.ops.entry(OpKey::Coboundary(d)).or_insert_with(|| aggregate(op, spec.aggregation));
                }
            }
        }
        Ok(dom)
    }

    /// Simplex count per model dimension, in `ModelSpec::dims` order.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn op(&self, key: &OpKey) -> Option<&SparseMatrix<T>> {
        self.ops.get(key)
    }

    pub fn kappa_dim(&self, key: &OpKey) -> Option<usize> {
        self.kappa_dims.get(key).copied()
    }
}

fn aggregate<T: Scalar>(op: SparseMatrix<T>, agg: Aggregation) -> SparseMatrix<T> {
    match agg {
        Aggregation::Sum => op,
        Aggregation::Mean => op.row_normalized(),
    }
}

fn edges(complex: &DirectedSimplicialComplex) -> impl Iterator<Item = (usize, usize)> + '_ {
    complex.simplices(1).iter().map(|e| (e.vertices()[0], e.vertices()[1]))
}

fn gcn_operator<T: Scalar>(complex: &DirectedSimplicialComplex) -> SparseMatrix<T> {
    let n = complex.count(0);
    let mut pairs: Vec<(usize, usize)> = edges(complex).flat_map(|(u, v)| [(u, v), (v, u)]).chain((0..n).map(|v| (v, v))).collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut deg = vec![0usize; n];
    for &(u, _) in &pairs {
        deg[u] += 1;
    }
    let inv_sqrt: Vec<T> = deg.iter().map(|&d| T::one() / T::from_usize_lossy(d).sqrt()).collect();
    SparseMatrix::from_triplets(n, n, pairs.into_iter().map(|(u, v)| (u, v, inv_sqrt[u] * inv_sqrt[v])))
}

/// Node signal whose value at `v` is the sum of the features of the edges incident to `v`.
pub fn project_edges_to_nodes<T: Scalar>(complex: &DirectedSimplicialComplex, x: &Matrix<T>) -> Matrix<T> {
    let inc = IncidenceRelation::boundary(complex, 1);
    let b: SparseMatrix<T> = inc.operator(complex.count(1), complex.count(0), None);
    b.apply_transpose(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{LayerSpec, Relation};
    use dirsimplex::{lift_directed_flag, Digraph};

    fn node_spec(kinds: &[NeighborhoodKind]) -> ModelSpec {
        ModelSpec {
            dims: vec![0],
            layers: vec![LayerSpec::new(1, 1, kinds.iter().map(|&k| Relation::new(0, k)).collect())],
            head: vec![],
            classes: 2,
            aggregation: Aggregation::Sum,
            seed: 0,
        }
    }

    #[test]
    fn node_operators() {
        let k = lift_directed_flag(&Digraph::new(3, [(0, 1), (0, 2)]).unwrap(), 1);
        let kinds = [NeighborhoodKind::InNeighbors, NeighborhoodKind::OutNeighbors, NeighborhoodKind::GcnNormalized];
        let d: Domain<f64> = Domain::new(&k, &node_spec(&kinds)).unwrap();
        let inn = d.op(&OpKey::Relation(0, NeighborhoodKind::InNeighbors)).unwrap();
        assert_eq!(inn.get(1, 0), 1.0);
        assert_eq!(inn.get(0, 1), 0.0);
        let out = d.op(&OpKey::Relation(0, NeighborhoodKind::OutNeighbors)).unwrap();
        assert_eq!(out.get(0, 2), 1.0);
        let gcn = d.op(&OpKey::Relation(0, NeighborhoodKind::GcnNormalized)).unwrap();
        assert!((gcn.get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((gcn.get(0, 1) - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert!(gcn.to_dense() == gcn.transpose().to_dense());
    }

    #[test]
    fn edge_to_node_projection_sums_incident_edges() {
        let k = lift_directed_flag(&Digraph::new(3, [(0, 1), (1, 2)]).unwrap(), 1);
        let x = Matrix::from_vec(2, 1, vec![2.0, 5.0]);
        assert_eq!(project_edges_to_nodes(&k, &x).as_slice(), &[2.0, 7.0, 5.0]);
    }

    #[test]
    fn mean_aggregation_normalizes_rows() {
        let k = lift_directed_flag(&Digraph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap(), 1);
        let mut spec = node_spec(&[NeighborhoodKind::OutNeighbors]);
        spec.aggregation = Aggregation::Mean;
        let d: Domain<f64> = Domain::new(&k, &spec).unwrap();
        assert_eq!(d.op(&OpKey::Relation(0, NeighborhoodKind::OutNeighbors)).unwrap().get(0, 1), 0.5);
    }
}
