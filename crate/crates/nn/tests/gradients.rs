use dirsimplex::{lift_directed_flag, AdjacencySpec, Digraph, Matrix};
use dirsimplex_nn::*;

fn complex() -> dirsimplex::DirectedSimplicialComplex {
    lift_directed_flag(&Digraph::new(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4), (4, 5), (5, 0), (1, 3), (3, 1)]).unwrap(), 2)
}

fn inputs(k: &dirsimplex::DirectedSimplicialComplex, dims: &[usize], f: usize, salt: usize) -> Vec<Matrix<f64>> {
    dims.iter().map(|&d| Matrix::from_fn(k.count(d), f, |r, c| (((r * 31 + c * 17 + d * 7 + salt) % 23) as f64 - 11.0) / 7.0)).collect()
}

#[test]
fn linear_single_layer_matches_finite_differences() {
    let k = complex();
    let mut layer = LayerSpec::new(4, 8, baselines::lower_edge_relations());
    layer.nonlinearity = Nonlinearity::Identity;
    let spec = ModelSpec { dims: vec![1], layers: vec![layer], head: vec![], classes: 3, aggregation: Aggregation::Sum, seed: 4 };
    let model = Model64::new(spec.clone()).unwrap();
    let dom = Domain64::new(&k, &spec).unwrap();
    let x = inputs(&k, &[1], 4, 0);
    let r = grad_check(&model, &dom, &x, 2, 1e-6, 0.05, 1).unwrap();
    println!("linear: {r:?}");
    assert!(r.max_relative_error < 1e-7, "{r:?}");
}

#[test]
fn three_layer_relu_model_matches_finite_differences() {
    let k = complex();
    let mut rels = Vec::new();
    for d in 0..=2usize {
        if d >= 1 {
            rels.push(Relation::adjacency(d, AdjacencySpec::down(1, 0, d)));
            rels.push(Relation::adjacency(d, AdjacencySpec::down(1, d, 0)));
        }
        if d <= 1 {
            rels.push(Relation::adjacency(d, AdjacencySpec::up(1, d + 1, 0)));
        }
    }
    let layer = |i, o| {
        let mut l = LayerSpec::new(i, o, rels.clone());
        l.use_boundary = true;
        l.use_coboundary = true;
        l.use_kappa = true;
        l.per_face_incidence = true;
        l
    };
    let spec = ModelSpec {
        dims: vec![0, 1, 2],
        layers: vec![layer(2, 6), layer(6, 6), layer(6, 5)],
        head: vec![7],
        classes: 4,
        aggregation: Aggregation::Sum,
        seed: 9,
    };
    let model = Model64::new(spec.clone()).unwrap();
    let dom = Domain64::new(&k, &spec).unwrap();
    let x = inputs(&k, &[0, 1, 2], 2, 3);
    let r = grad_check(&model, &dom, &x, 1, 1e-6, 0.05, 2).unwrap();
    println!("relu: {r:?}");
    assert!(r.checked > 10);
    assert!(r.max_relative_error < 1e-4, "{r:?}");
}

#[test]
fn mean_aggregation_gradients() {
    let k = complex();
    let mut spec = Architecture::DirSnn.model_spec(2, 2, 5, 3, 1);
    spec.aggregation = Aggregation::Mean;
    let model = Model64::new(spec.clone()).unwrap();
    let dom = Domain64::new(&k, &spec).unwrap();
    let r = grad_check(&model, &dom, &inputs(&k, &[1], 2, 5), 0, 1e-6, 0.2, 3).unwrap();
    assert!(r.max_relative_error < 1e-4, "{r:?}");
}

#[test]
fn baseline_gradients() {
    let k = complex();
    for arch in Architecture::ALL {
        let spec = arch.model_spec(2, 2, 4, 3, 7);
        let model = Model64::new(spec.clone()).unwrap();
        let dom = Domain64::new(&k, &spec).unwrap();
        let x = inputs(&k, &[arch.working_dim()], 2, 1);
        let r = grad_check(&model, &dom, &x, 1, 1e-6, 0.3, 4).unwrap();
        assert!(r.max_relative_error < 1e-4, "{arch}: {r:?}");
    }
}

#[test]
fn epsilon_outside_range_is_rejected() {
    let k = complex();
    let spec = Architecture::Snn.model_spec(1, 1, 2, 2, 0);
    let model = Model64::new(spec.clone()).unwrap();
    let dom = Domain64::new(&k, &spec).unwrap();
    assert!(grad_check(&model, &dom, &inputs(&k, &[1], 1, 0), 0, 1e-2, 0.05, 0).is_err());
}
