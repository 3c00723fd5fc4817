//! The source-localization architectures: Dir-SNN and its SNN, Dir-GNN and GCN baselines.

use std::fmt;
use std::str::FromStr;

use dirsimplex::{AdjacencySpec, DirectedSimplicialComplex, Matrix, Scalar};

use crate::domain::project_edges_to_nodes;
use crate::spec::{Aggregation, LayerSpec, ModelSpec, NeighborhoodKind, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Architecture {
    /// Edge convolution over the four lower `(1,i,j)`-adjacencies, one weight each.
    DirSnn,
    /// Edge convolution over the undirected lower adjacency.
    Snn,
    /// Node convolution with separate in- and out-neighbour weights.
    DirGnn,
    /// Symmetric-normalized node convolution.
    Gcn,
}

impl Architecture {
    pub const ALL: [Architecture; 4] = [Architecture::DirSnn, Architecture::Snn, Architecture::DirGnn, Architecture::Gcn];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::DirSnn => "dir-snn",
            Architecture::Snn => "snn",
            Architecture::DirGnn => "dir-gnn",
            Architecture::Gcn => "gcn",
        }
    }

    /// Dimension the layers act on: edges for the simplicial models, nodes for the graph ones.
    pub fn working_dim(self) -> usize {
        match self {
            Architecture::DirSnn | Architecture::Snn => 1,
            Architecture::DirGnn | Architecture::Gcn => 0,
        }
    }

    pub fn relations(self) -> Vec<Relation> {
        match self {
            Architecture::DirSnn => lower_edge_relations(),
            Architecture::Snn => vec![Relation::new(1, NeighborhoodKind::UndirectedLower)],
            Architecture::DirGnn => vec![Relation::new(0, NeighborhoodKind::InNeighbors), Relation::new(0, NeighborhoodKind::OutNeighbors)],
            Architecture::Gcn => vec![Relation::new(0, NeighborhoodKind::GcnNormalized)],
        }
    }

    /// `layers` message-passing layers of width `width`, then a one-hidden-layer MLP head.
    pub fn model_spec(self, in_features: usize, layers: usize, width: usize, classes: usize, seed: u64) -> ModelSpec {
        let layers = (0..layers)
            .map(|l| {
                let mut spec = LayerSpec::new(if l == 0 { in_features } else { width }, width, self.relations());
                spec.self_weight = self != Architecture::Gcn;
                spec
            })
            .collect();
        ModelSpec { dims: vec![self.working_dim()], layers, head: vec![width], classes, aggregation: Aggregation::Sum, seed }
    }

    /// Model input for an edge signal: the signal itself, or its projection onto nodes.
    pub fn input<T: Scalar>(self, complex: &DirectedSimplicialComplex, edge_signal: &Matrix<T>) -> Matrix<T> {
        match self.working_dim() {
            1 => edge_signal.clone(),
            _ => project_edges_to_nodes(complex, edge_signal),
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Architecture {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Architecture::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| format!("unknown model {s:?} (expected dir-snn|snn|dir-gnn|gcn)"))
    }
}

/// `A_{↓,1}^{ij}` on edges for `i, j ∈ {0, 1}`.
pub fn lower_edge_relations() -> Vec<Relation> {
    (0..2).flat_map(|i| (0..2).map(move |j| Relation::adjacency(1, AdjacencySpec::down(1, i, j)))).collect()
}
