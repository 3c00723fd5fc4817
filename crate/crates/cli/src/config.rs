//! Experiment configuration: a TOML file layered over a named profile.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Profile {
    Desk,
    Paper,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dataset: DatasetConfig,
    pub grid: Grid,
    pub training: Training,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub seeds: Vec<u64>,
    pub snr_db: Vec<f64>,
    pub modes: Vec<String>,
    pub models: Vec<String>,
    /// Train, validation and test fractions.
    pub split: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub nodes: usize,
    pub communities: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub signals: usize,
    pub spike_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub layers: Vec<usize>,
    pub widths: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Training {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl ExperimentConfig {
    pub fn profile(p: Profile) -> Self {
        let modes = vec!["directed".to_string(), "undirected".to_string()];
        let models = dirsimplex_nn::Architecture::ALL.iter().map(|a| a.name().to_string()).collect();
        match p {
            Profile::Desk => Self {
                experiment: Experiment { seeds: vec![0, 1], snr_db: vec![-5.0, 0.0, 5.0], modes, models, split: [0.6, 0.2, 0.2] },
                dataset: DatasetConfig { nodes: 30, communities: 5, p_in: 0.9, p_out: 0.01, signals: 200, spike_edges: 5 },
                grid: Grid { layers: vec![2, 3], widths: vec![32] },
                training: Training { lr: 3e-3, epochs: 100, batch_size: 16 },
            },
            Profile::Paper => Self {
                experiment: Experiment { seeds: (0..5).collect(), snr_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0], modes, models, split: [0.8, 0.1, 0.1] },
                dataset: DatasetConfig { nodes: 70, communities: 10, p_in: 0.9, p_out: 0.01, signals: 1000, spike_edges: 5 },
                grid: Grid { layers: vec![1, 2, 3], widths: vec![16, 32, 64] },
                training: Training { lr: 1e-3, epochs: 100, batch_size: 32 },
            },
        }
    }

    /// Profile defaults overridden key by key by the TOML in `text`.
    pub fn from_toml(profile: Profile, text: &str) -> Result<Self> {
        let overrides: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Validation(format!("config: {}", e.message())))?;
        let mut base = toml::Table::try_from(Self::profile(profile)).expect("profile serializes");
        merge(&mut base, overrides, "")?;
        let cfg: Self = base.try_into().map_err(|e: toml::de::Error| CliError::Validation(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML text.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(CliError::Validation(format!("config field `{field}`: {msg}")));
        let e = &self.experiment;
        if e.seeds.is_empty() {
            return bad("experiment.seeds", "must not be empty".into());
        }
        if e.snr_db.is_empty() || e.snr_db.iter().any(|s| s.is_nan()) {
            return bad("experiment.snr_db", "must be a non-empty list of numbers".into());
        }
        if e.modes.is_empty() {
            return bad("experiment.modes", "must not be empty".into());
        }
        if let Some(m) = e.modes.iter().find(|m| *m != "directed" && *m != "undirected") {
            return bad("experiment.modes", format!("unknown mode {m:?} (expected directed|undirected)"));
        }
        if e.models.is_empty() {
            return bad("experiment.models", "must not be empty".into());
        }
        for m in &e.models {
            if let Err(msg) = m.parse::<dirsimplex_nn::Architecture>() {
                return bad("experiment.models", msg);
            }
        }
        if e.split.iter().any(|r| !(0.0..=1.0).contains(r)) || (e.split.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("experiment.split", format!("{:?} must lie in [0,1] and sum to 1", e.split));
        }
        let d = &self.dataset;
        if d.communities == 0 || !d.nodes.is_multiple_of(d.communities) {
            return bad("dataset.nodes", format!("{} is not divisible by dataset.communities = {}", d.nodes, d.communities));
        }
        for (f, p) in [("dataset.p_in", d.p_in), ("dataset.p_out", d.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(f, format!("{p} is not a probability"));
            }
        }
        if d.signals == 0 {
            return bad("dataset.signals", "must be positive".into());
        }
        if self.grid.layers.is_empty() || self.grid.layers.contains(&0) {
            return bad("grid.layers", "must be a non-empty list of positive integers".into());
        }
        if self.grid.widths.is_empty() || self.grid.widths.contains(&0) {
            return bad("grid.widths", "must be a non-empty list of positive integers".into());
        }
        let t = &self.training;
        if !(t.lr.is_finite() && t.lr >= 0.0) {
            return bad("training.lr", format!("{} is not a non-negative number", t.lr));
        }
        if t.epochs == 0 || t.batch_size == 0 {
            return bad("training", "epochs and batch_size must be positive".into());
        }
        Ok(())
    }
}

fn merge(base: &mut toml::Table, overrides: toml::Table, prefix: &str) -> Result<()> {
    for (key, value) in overrides {
        let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o, &path)?,
            (Some(toml::Value::Table(_)), _) => return Err(CliError::Validation(format!("config field `{path}`: expected a section"))),
            (Some(slot), v) => *slot = v,
            (None, _) => return Err(CliError::Validation(format!("config field `{path}`: unknown key"))),
        }
    }
    Ok(())
}
