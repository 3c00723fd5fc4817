//! Two-graph discrimination: Dir-GNN on the digraphs vs Dir-SNN on their flag lifts.

use dirsimplex::{find_counterexample, lift_directed_flag, AdjacencySpec, Digraph, Matrix};
use dirsimplex_nn::baselines::lower_edge_relations;
use dirsimplex_nn::model::argmax;
use dirsimplex_nn::Aggregation;
use dirsimplex_nn::{train, Architecture, Domain, Example, LayerSpec, Model, ModelSpec, Relation, TrainConfig};

use crate::error::{CliError, Result};

pub const LAYERS: usize = 2;
pub const WIDTH: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct ExpressivityOptions {
    pub seeds: Vec<u64>,
    pub epochs: usize,
    pub lr: f64,
    /// Assign label 1 to the first graph instead of label 0.
    pub swap_labels: bool,
}

impl Default for ExpressivityOptions {
    fn default() -> Self {
        Self { seeds: (0..5).collect(), epochs: 300, lr: 1e-2, swap_labels: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpressivityRow {
    pub model: &'static str,
    /// Discrimination accuracy per seed, in `[0, 1]`.
    pub per_seed: Vec<f64>,
}

impl ExpressivityRow {
    pub fn mean(&self) -> f64 {
        self.per_seed.iter().sum::<f64>() / self.per_seed.len().max(1) as f64
    }
}

/// The smallest pair that D-WL cannot separate but D-SWL on the lifts can.
pub fn counterexample_pair() -> Result<(Digraph, Digraph)> {
    find_counterexample(6, 0, 0).ok_or_else(|| CliError::Runtime("no separating pair found".into()))
}

pub fn dir_snn_spec(seed: u64) -> ModelSpec {
    let mut relations = lower_edge_relations();
    relations.push(Relation::adjacency(1, AdjacencySpec::up(1, 2, 0)));
    let layers = (0..LAYERS).map(|l| LayerSpec::new(if l == 0 { 1 } else { WIDTH }, WIDTH, relations.clone())).collect();
    ModelSpec { dims: vec![1], layers, head: vec![WIDTH], classes: 2, aggregation: Aggregation::Sum, seed }
}

pub fn dir_gnn_spec(seed: u64) -> ModelSpec {
    Architecture::DirGnn.model_spec(1, LAYERS, WIDTH, 2, seed)
}

/// Trains on the two inputs and returns the fraction classified correctly.
fn discriminate(spec: ModelSpec, domains: [&Domain<f64>; 2], opts: &ExpressivityOptions, seed: u64) -> Result<f64> {
    let labels = if opts.swap_labels { [1, 0] } else { [0, 1] };
    let examples: Vec<Example<'_, f64>> =
        domains.iter().zip(labels).map(|(d, label)| Example { domain: *d, inputs: vec![Matrix::filled(d.counts()[0], 1, 1.0)], label }).collect();
    let mut model = Model::new(spec)?;
    let cfg = TrainConfig { lr: opts.lr, epochs: opts.epochs, batch_size: 2, seed, restore_best: false, ..TrainConfig::default() };
    train(&mut model, &examples, &[], &cfg)?;
    let mut correct = 0;
    for e in &examples {
        let logits = model.logits(e.domain, &e.inputs, 1)?;
        if argmax(logits.row(0)) == e.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / examples.len() as f64)
}

pub fn run(opts: &ExpressivityOptions) -> Result<Vec<ExpressivityRow>> {
    if opts.seeds.is_empty() {
        return Err(CliError::Validation("at least one seed is required".into()));
    }
    let (a, b) = counterexample_pair()?;
    let (ka, kb) = (lift_directed_flag(&a, 2), lift_directed_flag(&b, 2));
    let mut gnn = ExpressivityRow { model: "dir-gnn", per_seed: Vec::new() };
    let mut snn = ExpressivityRow { model: "dir-snn", per_seed: Vec::new() };
    for &seed in &opts.seeds {
        let spec = dir_gnn_spec(seed);
        let (da, db) = (Domain::new(&ka, &spec)?, Domain::new(&kb, &spec)?);
        gnn.per_seed.push(discriminate(spec, [&da, &db], opts, seed)?);
        let spec = dir_snn_spec(seed);
        let (da, db) = (Domain::new(&ka, &spec)?, Domain::new(&kb, &spec)?);
        snn.per_seed.push(discriminate(spec, [&da, &db], opts, seed)?);
    }
    Ok(vec![gnn, snn])
}

pub fn table(rows: &[ExpressivityRow]) -> String {
    let mut out = String::from("model,accuracy\n");
    for r in rows {
        out.push_str(&format!("{},{:.1}%\n", r.model, 100.0 * r.mean()));
    }
    out
}
