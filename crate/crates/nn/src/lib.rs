//! Directed simplicial message passing with hand-written gradients, plus graph and
//! undirected baselines.

pub mod baselines;
pub mod checkpoint;
pub mod domain;
pub mod error;
pub mod gradcheck;
pub mod model;
pub mod spec;
pub mod train;

pub use baselines::Architecture;
pub use domain::{project_edges_to_nodes, Domain, OpKey};
pub use error::{Error, Result};
pub use gradcheck::{grad_check, GradCheck};
pub use model::{Forward, Model};
pub use spec::{Aggregation, LayerSpec, ModelSpec, NeighborhoodKind, Nonlinearity, Relation};
pub use train::{evaluate, metrics_csv, train, EpochMetrics, Example, Phase, TrainConfig, TrainOutcome};

pub type Model64 = Model<f64>;
pub type Model32 = Model<f32>;
pub type Domain64 = Domain<f64>;
pub type Domain32 = Domain<f32>;
