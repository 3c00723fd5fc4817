//! Directed simplicial complexes, directed flag lifts, (k,i,j)-adjacencies and colour
//! refinement, plus the synthetic source-localization generator.

pub mod adjacency;
pub mod complex;
pub mod datagen;
pub mod dswl;
pub mod error;
pub mod io;
pub mod lift;
pub mod linalg;
pub mod scalar;

pub use adjacency::{adjacency, lower_adjacency, undirected_lower, upper_adjacency, AdjacencyRelation, AdjacencySpec, Direction, IncidenceRelation, Witness};
pub use complex::{DirectedSimplex, DirectedSimplicialComplex, SimplexId, VertexId};
pub use dswl::{distinguish, dswl_refine, dwl_refine, find_counterexample, RefineOptions, Variant, Verdict};
pub use error::{Error, Result};
pub use lift::{lift_directed_flag, lift_undirected_flag, symmetrize, Digraph, UndirectedGraph};
pub use linalg::{BoolCsr, Matrix, SparseMatrix};
pub use scalar::Scalar;

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type SparseMatrix64 = SparseMatrix<f64>;
pub type SparseMatrix32 = SparseMatrix<f32>;
