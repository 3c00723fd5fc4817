use dirsimplex::{lift_directed_flag, Digraph, Matrix};
use dirsimplex_nn::*;

fn toy() -> (dirsimplex::DirectedSimplicialComplex, ModelSpec) {
    let k = lift_directed_flag(&Digraph::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 0)]).unwrap(), 2);
    (k, Architecture::DirSnn.model_spec(2, 1, 8, 2, 11))
}

/// Column 0 equals the label on every edge, column 1 is noise.
fn separable(n_edges: usize, count: usize) -> Vec<(Vec<Matrix<f64>>, usize)> {
    (0..count)
        .map(|i| {
            let label = i % 2;
            let x = Matrix::from_fn(n_edges, 2, |r, c| if c == 0 { label as f64 } else { (((i * 13 + r * 7) % 9) as f64 - 4.0) / 4.0 });
            (vec![x], label)
        })
        .collect()
}

#[test]
fn learns_a_separable_dataset() {
    let (k, spec) = toy();
    let dom = Domain64::new(&k, &spec).unwrap();
    let data: Vec<Example<f64>> = separable(k.count(1), 40).into_iter().map(|(inputs, label)| Example { domain: &dom, inputs, label }).collect();
    let mut m = Model64::new(spec).unwrap();
    let cfg = TrainConfig { lr: 1e-2, epochs: 200, batch_size: 8, ..TrainConfig::default() };
    let out = train(&mut m, &data, &[], &cfg).unwrap();
    let last = out.trace.last().unwrap();
    assert_eq!(last.phase, Phase::Train);
    assert_eq!(evaluate(&m, &data, 16).unwrap().1, 1.0);
}

#[test]
fn zero_learning_rate_keeps_parameters() {
    let (k, spec) = toy();
    let dom = Domain64::new(&k, &spec).unwrap();
    let data: Vec<Example<f64>> = separable(k.count(1), 10).into_iter().map(|(inputs, label)| Example { domain: &dom, inputs, label }).collect();
    let mut m = Model64::new(spec).unwrap();
    let before = m.params().to_vec();
    train(&mut m, &data, &data, &TrainConfig { lr: 0.0, epochs: 3, ..TrainConfig::default() }).unwrap();
    assert_eq!(m.params(), &before[..]);
}

#[test]
fn same_seed_gives_identical_traces() {
    let (k, spec) = toy();
    let dom = Domain64::new(&k, &spec).unwrap();
    let data: Vec<Example<f64>> = separable(k.count(1), 24).into_iter().map(|(inputs, label)| Example { domain: &dom, inputs, label }).collect();
    let (tr, va) = data.split_at(16);
    let cfg = TrainConfig { lr: 5e-3, epochs: 15, batch_size: 4, seed: 8, ..TrainConfig::default() };
    let run = || {
        let mut m = Model64::new(spec.clone()).unwrap();
        let out = train(&mut m, tr, va, &cfg).unwrap();
        (metrics_csv(&out.trace), checkpoint::save(&m))
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert!(a.0.starts_with("epoch,split,loss,accuracy\n1,train,"));
    assert_eq!(a.0.lines().count(), 1 + 2 * 15);
}

#[test]
fn non_finite_inputs_abort_training() {
    let (k, spec) = toy();
    let dom = Domain64::new(&k, &spec).unwrap();
    let data = vec![Example { domain: &dom, inputs: vec![Matrix::filled(k.count(1), 2, f64::NAN)], label: 0 }];
    let mut m = Model64::new(spec).unwrap();
    let err = train(&mut m, &data, &[], &TrainConfig { epochs: 1, ..TrainConfig::default() }).unwrap_err();
    assert!(matches!(err, Error::NonFiniteLoss { epoch: 1, .. }), "{err}");
}

#[test]
fn labels_out_of_range_are_rejected() {
    let (k, spec) = toy();
    let dom = Domain64::new(&k, &spec).unwrap();
    let data = vec![Example { domain: &dom, inputs: vec![Matrix::zeros(k.count(1), 2)], label: 5 }];
    let mut m = Model64::new(spec).unwrap();
    assert!(train(&mut m, &data, &[], &TrainConfig::default()).is_err());
}

#[test]
fn checkpoint_roundtrip_and_validation() {
    let (_, spec) = toy();
    let a = Model64::new(spec.clone()).unwrap();
    let bytes = checkpoint::save(&a);
    let mut b = Model64::new(ModelSpec { seed: 99, ..spec.clone() }).unwrap();
    assert_ne!(a.params(), b.params());
    checkpoint::load(&mut b, &bytes).unwrap();
    assert_eq!(a.params(), b.params());
    assert!(checkpoint::load(&mut b, &bytes[..bytes.len() - 3]).is_err());
    let mut other = Model64::new(Architecture::Snn.model_spec(2, 1, 8, 2, 0)).unwrap();
    assert!(checkpoint::load(&mut other, &bytes).is_err());
    let mut wrong = bytes.clone();
    wrong[4] = 9;
    assert!(checkpoint::load(&mut b, &wrong).is_err());
}

#[test]
fn single_precision_models_train() {
    let (k, spec) = toy();
    let dom = Domain32::new(&k, &spec).unwrap();
    let data: Vec<Example<f32>> = separable(k.count(1), 20)
        .into_iter()
        .map(|(inputs, label)| Example { domain: &dom, inputs: inputs.iter().map(|m| m.cast()).collect(), label })
        .collect();
    let mut m = Model32::new(spec).unwrap();
    train(&mut m, &data, &[], &TrainConfig { lr: 1e-2, epochs: 100, batch_size: 5, ..TrainConfig::default() }).unwrap();
    assert_eq!(evaluate(&m, &data, 8).unwrap().1, 1.0);
}
