//! SNR sweep over the source-localization task.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use dirsimplex::datagen::{gen_signals, split, SbmSpec, SignalSample, SignalSpec, SourceTask};
use dirsimplex::{Error as CoreError, Matrix};
use dirsimplex_nn::{evaluate, metrics_csv, train, Architecture, Domain, Example, Model, TrainConfig};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{self, CliError, Result};

const TASK_ATTEMPTS: u64 = 16;

/// splitmix64 finalizer, used to derive independent seeds from tuples.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5eed, |acc, &p| mix(acc ^ p))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub directed: bool,
    pub snr_db: f64,
    pub seed: u64,
}

impl Cell {
    pub fn mode(&self) -> &'static str {
        if self.directed {
            "directed"
        } else {
            "undirected"
        }
    }
}

pub fn run_matrix(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for mode in &cfg.experiment.modes {
        for &snr_db in &cfg.experiment.snr_db {
            for &seed in &cfg.experiment.seeds {
                cells.push(Cell { directed: mode == "directed", snr_db, seed });
            }
        }
    }
    cells
}

/// The planned runs, one line per (mode, snr, seed, model).
pub fn describe_matrix(cfg: &ExperimentConfig) -> String {
    let mut out = String::from("mode,snr_db,seed,model,candidates\n");
    let candidates = cfg.grid.layers.len() * cfg.grid.widths.len();
    for cell in run_matrix(cfg) {
        for model in &cfg.experiment.models {
            writeln!(out, "{},{},{},{},{}", cell.mode(), cell.snr_db, cell.seed, model, candidates).unwrap();
        }
    }
    out
}

/// Builds the SBM task, redrawing the graph when some class has no edges.
pub fn build_task(cfg: &ExperimentConfig, directed: bool, seed: u64) -> Result<SourceTask> {
    let d = &cfg.dataset;
    let mut last = None;
    for attempt in 0..TASK_ATTEMPTS {
        let spec = SbmSpec { n: d.nodes, communities: d.communities, p_in: d.p_in, p_out: d.p_out, directed, seed: derive(&[seed, directed as u64, attempt]) };
        match SourceTask::new(&spec) {
            Ok(task) => return Ok(task),
            Err(e @ CoreError::EmptyCommunity(_)) => last = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(CliError::Runtime(format!("no usable graph after {TASK_ATTEMPTS} draws: {}", last.expect("at least one attempt"))))
}

pub fn signals(cfg: &ExperimentConfig, task: &SourceTask, cell: &Cell) -> Result<Vec<SignalSample>> {
    let mut spec = SignalSpec::new(cfg.dataset.signals, cell.snr_db, derive(&[cell.seed, cell.directed as u64, cell.snr_db.to_bits()]));
    spec.spike_edges = cfg.dataset.spike_edges;
    Ok(gen_signals(task, &spec)?)
}

/// Scales a signal to unit root-mean-square; diffusion orders up to 100 span many magnitudes.
pub fn normalize(x: &[f64]) -> Matrix<f64> {
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt();
    let s = if rms > 0.0 && rms.is_finite() { 1.0 / rms } else { 0.0 };
    Matrix::from_vec(x.len(), 1, x.iter().map(|v| v * s).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub mode: &'static str,
    pub snr_db: f64,
    pub seed: u64,
    pub model: String,
    pub layers: usize,
    pub width: usize,
    pub parameters: usize,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
    pub wall_clock_s: f64,
    #[serde(skip)]
    pub metrics: String,
}

struct Candidate {
    layers: usize,
    width: usize,
    parameters: usize,
    val: f64,
    test: f64,
    metrics: String,
}

/// Trains every grid point for one model and keeps the best on validation.
fn run_model(
    cfg: &ExperimentConfig,
    arch: Architecture,
    task: &SourceTask,
    samples: &[SignalSample],
    parts: &dirsimplex::datagen::Split,
    seed: u64,
) -> Result<Candidate> {
    let classes = task.num_classes();
    let probe = arch.model_spec(1, 1, cfg.grid.widths[0], classes, 0);
    let domain = Domain::<f64>::new(&task.complex, &probe)?;
    let inputs: Vec<Matrix<f64>> = samples.iter().map(|s| arch.input(&task.complex, &normalize(&s.x))).collect();
    let examples = |idx: &[usize]| -> Vec<Example<'_, f64>> {
        idx.iter().map(|&i| Example { domain: &domain, inputs: vec![inputs[i].clone()], label: samples[i].label }).collect()
    };
    let (train_set, val_set, test_set) = (examples(&parts.train), examples(&parts.val), examples(&parts.test));
    let t = &cfg.training;
    let mut best: Option<Candidate> = None;
    for &layers in &cfg.grid.layers {
        for &width in &cfg.grid.widths {
            let model_seed = derive(&[seed, layers as u64, width as u64]);
            let mut model = Model::new(arch.model_spec(1, layers, width, classes, model_seed))?;
            let tc = TrainConfig { lr: t.lr, epochs: t.epochs, batch_size: t.batch_size, seed: model_seed, ..TrainConfig::default() };
            let outcome = train(&mut model, &train_set, &val_set, &tc)?;
            let val = outcome.best_val_accuracy.unwrap_or(0.0);
            let (_, test) = evaluate(&model, &test_set, t.batch_size)?;
            let c = Candidate { layers, width, parameters: model.num_parameters(), val, test, metrics: metrics_csv(&outcome.trace) };
            let better = best.as_ref().is_none_or(|b| {
                (c.val, std::cmp::Reverse(c.parameters), std::cmp::Reverse(c.layers)) > (b.val, std::cmp::Reverse(b.parameters), std::cmp::Reverse(b.layers))
            });
            if better {
                best = Some(c);
            }
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// Runs one (mode, snr, seed) cell for every configured model.
pub fn run_cell(cfg: &ExperimentConfig, cell: &Cell, config_hash: &str) -> Result<Vec<RunRecord>> {
    let task = build_task(cfg, cell.directed, cell.seed)?;
    let samples = signals(cfg, &task, cell)?;
    let labels: Vec<usize> = samples.iter().map(|s| s.label).collect();
    let parts = split(&labels, cfg.experiment.split, derive(&[cell.seed, 0x5917]))?;
    let mut out = Vec::new();
    for name in &cfg.experiment.models {
        let arch: Architecture = name.parse().map_err(CliError::Validation)?;
        let start = Instant::now();
        let c = run_model(cfg, arch, &task, &samples, &parts, derive(&[cell.seed, arch as u64]))?;
        out.push(RunRecord {
            config_hash: config_hash.to_string(),
            mode: cell.mode(),
            snr_db: cell.snr_db,
            seed: cell.seed,
            model: name.clone(),
            layers: c.layers,
            width: c.width,
            parameters: c.parameters,
            val_accuracy: c.val,
            test_accuracy: c.test,
            wall_clock_s: start.elapsed().as_secs_f64(),
            metrics: c.metrics,
        });
    }
    Ok(out)
}

/// `model,snr_db,seed,accuracy`, keyed so row order does not depend on run order.
pub fn results_csv(records: &[RunRecord]) -> String {
    let mut rows: BTreeMap<(String, u64, u64), f64> = BTreeMap::new();
    for r in records {
        rows.insert((r.model.clone(), ordered(r.snr_db), r.seed), r.test_accuracy);
    }
    let mut out = String::from("model,snr_db,seed,accuracy\n");
    for ((model, snr, seed), acc) in rows {
        writeln!(out, "{model},{},{seed},{acc:.6}", unordered(snr)).unwrap();
    }
    out
}

/// Mean and sample standard deviation per (model, snr).
pub fn summarize(records: &[RunRecord]) -> BTreeMap<(String, u64), (f64, f64)> {
    let mut groups: BTreeMap<(String, u64), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry((r.model.clone(), ordered(r.snr_db))).or_default().push(r.test_accuracy);
    }
    groups
        .into_iter()
        .map(|(k, v)| {
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let std = if v.len() > 1 { (v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
            (k, (mean, std))
        })
        .collect()
}

pub fn mean_accuracy(records: &[RunRecord], model: &str, snr_db: f64) -> Option<f64> {
    summarize(records).get(&(model.to_string(), ordered(snr_db))).map(|v| v.0)
}

pub fn plot_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("model,snr_db,mean,std\n");
    for ((model, snr), (mean, std)) in summarize(records) {
        writeln!(out, "{model},{},{mean:.6},{std:.6}", unordered(snr)).unwrap();
    }
    out
}

/// Total order on finite floats that sorts like the numbers themselves.
fn ordered(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | 1 << 63
    }
}

fn unordered(k: u64) -> f64 {
    f64::from_bits(if k >> 63 == 1 { k & !(1 << 63) } else { !k })
}

/// Runs the whole sweep and writes per-mode results under `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path, mut progress: impl FnMut(&Cell, &[RunRecord])) -> Result<BTreeMap<&'static str, Vec<RunRecord>>> {
    let hash = cfg.hash();
    error::write(&out.join("config.toml"), cfg.to_toml())?;
    let mut by_mode: BTreeMap<&'static str, Vec<RunRecord>> = BTreeMap::new();
    for cell in run_matrix(cfg) {
        let records = run_cell(cfg, &cell, &hash)?;
        progress(&cell, &records);
        by_mode.entry(cell.mode()).or_default().extend(records);
    }
    for (mode, records) in &by_mode {
        let dir = out.join(mode);
        error::write(&dir.join("results.csv"), results_csv(records))?;
        error::write(&dir.join("plot.csv"), plot_csv(records))?;
        let mut jsonl = String::new();
        for r in records {
            jsonl.push_str(&serde_json::to_string(r).expect("record serializes"));
            jsonl.push('\n');
            let name = format!("{}_snr{}_seed{}.csv", r.model, r.snr_db, r.seed);
            error::write(&dir.join("metrics").join(name), &r.metrics)?;
        }
        error::write(&dir.join("runs.jsonl"), jsonl)?;
    }
    Ok(by_mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_keys_sort_numerically() {
        let xs = [-10.0, -5.0, -0.5, 0.0, 2.5, 10.0];
        for w in xs.windows(2) {
            assert!(ordered(w[0]) < ordered(w[1]));
        }
        for x in xs {
            assert_eq!(unordered(ordered(x)), x);
        }
    }

    #[test]
    fn normalize_gives_unit_rms() {
        let m = normalize(&[3.0, -4.0, 0.0, 0.0]);
        let rms = (m.as_slice().iter().map(|v| v * v).sum::<f64>() / 4.0).sqrt();
        assert!((rms - 1.0).abs() < 1e-12);
        assert_eq!(normalize(&[0.0, 0.0]).as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn summary_uses_sample_std() {
        let rec = |seed, acc| RunRecord {
            config_hash: String::new(),
            mode: "directed",
            snr_db: 0.0,
            seed,
            model: "snn".into(),
            layers: 1,
            width: 1,
            parameters: 0,
            val_accuracy: 0.0,
            test_accuracy: acc,
            wall_clock_s: 0.0,
            metrics: String::new(),
        };
        let s = summarize(&[rec(0, 0.5), rec(1, 0.7)]);
        let (mean, std) = s[&("snn".to_string(), ordered(0.0))];
        assert!((mean - 0.6).abs() < 1e-12);
        assert!((std - 0.02f64.sqrt()).abs() < 1e-12);
        assert_eq!(results_csv(&[rec(1, 0.7), rec(0, 0.5)]), "model,snr_db,seed,accuracy\nsnn,0,0,0.500000\nsnn,0,1,0.700000\n");
    }

    #[test]
    fn dry_run_matrix_lists_every_run() {
        let cfg = ExperimentConfig::profile(crate::config::Profile::Desk);
        let text = describe_matrix(&cfg);
        assert_eq!(text.lines().count(), 1 + 2 * 3 * 2 * 4);
        assert!(text.contains("directed,-5,0,dir-snn,2"));
    }
}
