//! Declarative model descriptions.

use std::fmt;

use dirsimplex::AdjacencySpec;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Nonlinearity {
    Relu,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Aggregation {
    Sum,
    Mean,
}

/// Where messages come from, relative to the simplices being updated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NeighborhoodKind {
    /// A lower or upper `(k,i,j)`-adjacency on the same dimension.
    Adjacency(AdjacencySpec),
    /// Distinct simplices sharing a facet, orientation ignored.
    UndirectedLower,
    /// `D^-1/2 (A + I) D^-1/2` on nodes, `A` the symmetrized 1-skeleton.
    GcnNormalized,
    /// Node in-neighbours in the 1-skeleton.
    InNeighbors,
    /// Node out-neighbours in the 1-skeleton.
    OutNeighbors,
}

impl fmt::Display for NeighborhoodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeighborhoodKind::Adjacency(s) => write!(f, "{s}"),
            NeighborhoodKind::UndirectedLower => f.write_str("lower"),
            NeighborhoodKind::GcnNormalized => f.write_str("gcn"),
            NeighborhoodKind::InNeighbors => f.write_str("in"),
            NeighborhoodKind::OutNeighbors => f.write_str("out"),
        }
    }
}

/// A neighbourhood acting on the simplices of dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    pub dim: usize,
    pub kind: NeighborhoodKind,
}

impl Relation {
    pub fn new(dim: usize, kind: NeighborhoodKind) -> Self {
        Self { dim, kind }
    }

    pub fn adjacency(dim: usize, spec: AdjacencySpec) -> Self {
        Self { dim, kind: NeighborhoodKind::Adjacency(spec) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerSpec {
    pub in_features: usize,
    pub out_features: usize,
    pub relations: Vec<Relation>,
    pub use_boundary: bool,
    pub use_coboundary: bool,
    /// One boundary weight per face map instead of a shared one.
    pub per_face_incidence: bool,
    /// Adds a `x_κ W'` term for every adjacency witness.
    pub use_kappa: bool,
    pub self_weight: bool,
    pub nonlinearity: Nonlinearity,
}

impl LayerSpec {
    pub fn new(in_features: usize, out_features: usize, relations: Vec<Relation>) -> Self {
        Self {
            in_features,
            out_features,
            relations,
            use_boundary: false,
            use_coboundary: false,
            per_face_incidence: false,
            use_kappa: false,
            self_weight: true,
            nonlinearity: Nonlinearity::Relu,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    /// Simplex dimensions carrying features, ascending. Inputs are given in this order.
    pub dims: Vec<usize>,
    pub layers: Vec<LayerSpec>,
    /// Hidden widths of the MLP head.
    pub head: Vec<usize>,
    pub classes: usize,
    pub aggregation: Aggregation,
    pub seed: u64,
}

impl ModelSpec {
    pub fn in_features(&self) -> usize {
        self.layers.first().map_or(0, |l| l.in_features)
    }

    /// Width of the pooled vector fed to the head.
    pub fn readout_width(&self) -> usize {
        self.layers.last().map_or(0, |l| l.out_features) * self.dims.len()
    }

    pub fn position(&self, dim: usize) -> Option<usize> {
        self.dims.iter().position(|&d| d == dim)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        if self.dims.is_empty() || self.dims.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("dims {:?} must be non-empty and strictly ascending", self.dims));
        }
        if self.layers.is_empty() {
            return bad("at least one layer is required".into());
        }
        if self.classes < 2 {
            return bad(format!("classes = {} (need at least 2)", self.classes));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.in_features == 0 || layer.out_features == 0 {
                return bad(format!("layer {l} has a zero width"));
            }
            if l > 0 && self.layers[l - 1].out_features != layer.in_features {
                return bad(format!("layer {l} expects {} features but layer {} emits {}", layer.in_features, l - 1, self.layers[l - 1].out_features));
            }
            if layer.relations.is_empty() && !layer.use_boundary && !layer.use_coboundary {
                return bad(format!("layer {l} has no relation or incidence"));
            }
            for r in &layer.relations {
                if self.position(r.dim).is_none() {
                    return bad(format!("layer {l}: relation {} acts on dimension {} which carries no features", r.kind, r.dim));
                }
                let node_only = matches!(r.kind, NeighborhoodKind::GcnNormalized | NeighborhoodKind::InNeighbors | NeighborhoodKind::OutNeighbors);
                if node_only && r.dim != 0 {
                    return bad(format!("layer {l}: {} is a node relation but dim = {}", r.kind, r.dim));
                }
                if let NeighborhoodKind::Adjacency(s) = r.kind {
                    if layer.use_kappa {
                        let kd = match s.direction {
                            dirsimplex::Direction::Down => r.dim.checked_sub(s.k),
                            dirsimplex::Direction::Up => Some(r.dim + s.k),
                        };
                        if kd.and_then(|d| self.position(d)).is_none() {
                            return bad(format!("layer {l}: κ of {s} on dimension {} carries no features", r.dim));
                        }
                    }
                }
            }
        }
        if self.head.contains(&0) {
            return bad("head widths must be positive".into());
        }
        Ok(())
    }
}
