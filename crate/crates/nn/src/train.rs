//! Mini-batch training with Adam.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dirsimplex::{Matrix, Scalar};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::model::{argmax, Model};

/// One labelled input on some domain; `inputs` has one matrix per model dimension.
#[derive(Clone, Debug)]
pub struct Example<'a, T> {
    pub domain: &'a Domain<T>,
    pub inputs: Vec<Matrix<T>>,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Keep the parameters of the epoch with the best validation accuracy.
    pub restore_best: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { lr: 1e-3, epochs: 100, batch_size: 32, seed: 0, beta1: 0.9, beta2: 0.999, eps: 1e-8, restore_best: true }
    }
}

pub struct Adam<T> {
    m: Vec<Matrix<T>>,
    v: Vec<Matrix<T>>,
    t: i32,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl<T: Scalar> Adam<T> {
    pub fn new(params: &[Matrix<T>], cfg: &TrainConfig) -> Self {
        let zeros = || params.iter().map(|p| Matrix::zeros(p.rows(), p.cols())).collect();
        Self { m: zeros(), v: zeros(), t: 0, lr: cfg.lr, beta1: cfg.beta1, beta2: cfg.beta2, eps: cfg.eps }
    }

    pub fn step(&mut self, params: &mut [Matrix<T>], grads: &[Matrix<T>]) {
        self.t += 1;
        let c = T::from_f64_lossy;
        let (b1, b2) = (c(self.beta1), c(self.beta2));
        let bc1 = c(1.0 - self.beta1.powi(self.t));
        let bc2 = c(1.0 - self.beta2.powi(self.t));
        let (lr, eps) = (c(self.lr), c(self.eps));
        for (((p, g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            let ps = p.as_mut_slice();
            let (ms, vs) = (m.as_mut_slice(), v.as_mut_slice());
            for (k, &gk) in g.as_slice().iter().enumerate() {
                ms[k] = b1 * ms[k] + (T::one() - b1) * gk;
                vs[k] = b2 * vs[k] + (T::one() - b2) * gk * gk;
                ps[k] -= lr * (ms[k] / bc1) / ((vs[k] / bc2).sqrt() + eps);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Train,
    Val,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Train => "train",
            Phase::Val => "val",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub phase: Phase,
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub trace: Vec<EpochMetrics>,
    pub best_epoch: usize,
    pub best_val_accuracy: Option<f64>,
}

/// `epoch,split,loss,accuracy` with one row per epoch and phase.
pub fn metrics_csv(trace: &[EpochMetrics]) -> String {
    let mut out = String::from("epoch,split,loss,accuracy\n");
    for m in trace {
        writeln!(out, "{},{},{:.6},{:.6}", m.epoch, m.phase.as_str(), m.loss, m.accuracy).unwrap();
    }
    out
}

/// Calls `f` once per run of consecutive examples sharing a domain, with their inputs stacked.
fn for_each_group<T: Scalar>(examples: &[&Example<'_, T>], mut f: impl FnMut(&Domain<T>, &[Matrix<T>], usize, &[usize]) -> Result<()>) -> Result<()> {
    let mut start = 0;
    while start < examples.len() {
        let dom = examples[start].domain;
        let end = start + examples[start..].iter().take_while(|e| std::ptr::eq(e.domain, dom)).count();
        let group = &examples[start..end];
        let positions = group[0].inputs.len();
        let stacked: Vec<Matrix<T>> = (0..positions)
            .map(|p| {
                let cols = group[0].inputs[p].cols();
                let data: Vec<T> = group.iter().flat_map(|e| e.inputs[p].as_slice().iter().copied()).collect();
                Matrix::from_vec(data.len() / cols.max(1), cols, data)
            })
            .collect();
        let labels: Vec<usize> = group.iter().map(|e| e.label).collect();
        f(dom, &stacked, group.len(), &labels)?;
        start = end;
    }
    Ok(())
}

/// Mean cross-entropy and accuracy.
pub fn evaluate<T: Scalar>(model: &Model<T>, examples: &[Example<'_, T>], batch_size: usize) -> Result<(f64, f64)> {
    if examples.is_empty() {
        return Ok((0.0, 0.0));
    }
    let mut loss = 0.0;
    let mut correct = 0;
    let refs: Vec<&Example<T>> = examples.iter().collect();
    for chunk in refs.chunks(batch_size.max(1)) {
        for_each_group(chunk, |dom, inputs, batch, labels| {
            let logits = model.logits(dom, inputs, batch)?;
            let (l, c, _) = crate::model::softmax_cross_entropy(&logits, labels);
            loss += l.to_f64_lossy();
            correct += c;
            Ok(())
        })?;
    }
    let n = examples.len() as f64;
    Ok((loss / n, correct as f64 / n))
}

pub fn predict<T: Scalar>(model: &Model<T>, example: &Example<'_, T>) -> Result<usize> {
    let logits = model.logits(example.domain, &example.inputs, 1)?;
    Ok(argmax(logits.row(0)))
}

/// Minimizes mean cross-entropy over `train`, recording train and validation metrics per epoch.
pub fn train<T: Scalar>(model: &mut Model<T>, train: &[Example<'_, T>], val: &[Example<'_, T>], cfg: &TrainConfig) -> Result<TrainOutcome> {
    if let Some(e) = train.iter().chain(val).find(|e| e.label >= model.spec().classes) {
        return Err(Error::InvalidModel(format!("label {} outside 0..{}", e.label, model.spec().classes)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = Adam::new(model.params(), cfg);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut trace = Vec::new();
    let mut best: Option<(f64, usize, Vec<Matrix<T>>)> = None;
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut epoch_correct = 0;
        for (bi, chunk) in order.chunks(cfg.batch_size.max(1)).enumerate() {
            let batch: Vec<&Example<T>> = chunk.iter().map(|&i| &train[i]).collect();
            let mut grads = model.zero_grads();
            let mut batch_loss = 0.0;
            for_each_group(&batch, |dom, inputs, b, labels| {
                let (l, c) = model.loss_and_grad(dom, inputs, b, labels, &mut grads)?;
                batch_loss += l.to_f64_lossy();
                epoch_correct += c;
                Ok(())
            })?;
            if !batch_loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch: bi, loss: batch_loss });
            }
            let scale = T::from_f64_lossy(1.0 / chunk.len() as f64);
            for g in &mut grads {
                g.scale(scale);
            }
            adam.step(model.params_mut(), &grads);
            epoch_loss += batch_loss;
        }
        let n = train.len().max(1) as f64;
        trace.push(EpochMetrics { epoch, phase: Phase::Train, loss: epoch_loss / n, accuracy: epoch_correct as f64 / n });
        if !val.is_empty() {
            let (loss, accuracy) = evaluate(model, val, cfg.batch_size)?;
            trace.push(EpochMetrics { epoch, phase: Phase::Val, loss, accuracy });
            if best.as_ref().is_none_or(|b| accuracy > b.0) {
                best = Some((accuracy, epoch, if cfg.restore_best { model.params().to_vec() } else { Vec::new() }));
            }
        }
    }
    match best {
        Some((acc, epoch, params)) => {
            if cfg.restore_best {
                model.params_mut().clone_from_slice(&params);
            }
            Ok(TrainOutcome { trace, best_epoch: epoch, best_val_accuracy: Some(acc) })
        }
        None => Ok(TrainOutcome { trace, best_epoch: cfg.epochs, best_val_accuracy: None }),
    }
}
