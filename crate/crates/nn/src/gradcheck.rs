//! Central finite-difference check of the reverse pass.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dirsimplex::{Matrix, Scalar};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::model::Model;

/// Gradients smaller than this in magnitude are compared absolutely.
pub const RELATIVE_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheck {
    pub max_relative_error: f64,
    pub checked: usize,
}

/// Compares the analytic gradient of the cross-entropy of one sample against
/// `(L(θ + ε) - L(θ - ε)) / 2ε` on a random `fraction` of the parameter entries.
pub fn grad_check<T: Scalar>(
    model: &Model<T>,
    domain: &Domain<T>,
    inputs: &[Matrix<T>],
    label: usize,
    epsilon: f64,
    fraction: f64,
    seed: u64,
) -> Result<GradCheck> {
    if !(1e-7..=1e-4).contains(&epsilon) {
        return Err(Error::InvalidModel(format!("epsilon {epsilon} outside [1e-7, 1e-4]")));
    }
    let mut grads = model.zero_grads();
    model.loss_and_grad(domain, inputs, 1, &[label], &mut grads)?;

    let sizes: Vec<usize> = model.params().iter().map(|p| p.rows() * p.cols()).collect();
    let total: usize = sizes.iter().sum();
    let amount = ((fraction * total as f64).ceil() as usize).clamp(1, total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = model.clone();
    let loss = |m: &Model<T>| -> Result<f64> {
        let logits = m.logits(domain, inputs, 1)?;
        Ok(crate::model::softmax_cross_entropy(&logits, &[label]).0.to_f64_lossy())
    };
    let mut worst: f64 = 0.0;
    for flat in index::sample(&mut rng, total, amount) {
        let (mut t, mut k) = (0, flat);
        while k >= sizes[t] {
            k -= sizes[t];
            t += 1;
        }
        let orig = probe.params()[t].as_slice()[k];
        probe.params_mut()[t].as_mut_slice()[k] = orig + T::from_f64_lossy(epsilon);
        let up = loss(&probe)?;
        probe.params_mut()[t].as_mut_slice()[k] = orig - T::from_f64_lossy(epsilon);
        let down = loss(&probe)?;
        probe.params_mut()[t].as_mut_slice()[k] = orig;
        let numeric = (up - down) / (2.0 * epsilon);
        let analytic = grads[t].as_slice()[k].to_f64_lossy();
        let err = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_FLOOR);
        worst = worst.max(err);
    }
    Ok(GradCheck { max_relative_error: worst, checked: amount })
}
