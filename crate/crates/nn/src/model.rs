//! Parameters, forward pass and hand-written reverse pass.
//!
//! A batch of `B` samples on one [`Domain`] is laid out as one matrix per model dimension with
//! `B * n_d` rows: sample `b` owns rows `b * n_d .. (b + 1) * n_d`. Sparse operators act on each
//! block separately, dense weights act on all rows at once.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dirsimplex::{Matrix, Scalar};

use crate::domain::{Domain, OpKey};
use crate::error::{shape_mismatch, Result};
use crate::spec::{ModelSpec, NeighborhoodKind, Nonlinearity};

#[derive(Clone, Debug)]
struct Term {
    key: OpKey,
    /// Model-dimension position of the source features; `None` resolves the κ dimension
    /// from the domain.
    src: Option<usize>,
    weight: usize,
}

#[derive(Clone, Debug)]
struct Unit {
    terms: Vec<Term>,
    self_w: Option<usize>,
    bias: usize,
}

#[derive(Clone, Debug)]
pub struct Model<T> {
    spec: ModelSpec,
    units: Vec<Vec<Unit>>,
    head: Vec<(usize, usize)>,
    params: Vec<Matrix<T>>,
    names: Vec<String>,
}

/// Everything the reverse pass needs from a forward pass.
#[derive(Clone, Debug)]
pub struct Forward<T> {
    batch: usize,
    /// `acts[0]` are the inputs, `acts[l + 1]` the outputs of layer `l`; one matrix per dimension.
    acts: Vec<Vec<Matrix<T>>>,
    /// Operator-applied sources per layer, dimension and term.
    aggregated: Vec<Vec<Vec<Option<Matrix<T>>>>>,
    pre: Vec<Vec<Matrix<T>>>,
    argmax: Vec<Option<usize>>,
    head_in: Vec<Matrix<T>>,
    head_pre: Vec<Matrix<T>>,
    pub logits: Matrix<T>,
}

impl<T: Scalar> Forward<T> {
    /// Features after layer `l` (0-based), one matrix per model dimension.
    pub fn layer_output(&self, l: usize) -> &[Matrix<T>] {
        &self.acts[l + 1]
    }

    pub fn pooled(&self) -> &Matrix<T> {
        &self.head_in[0]
    }
}

fn activate<T: Scalar>(m: &Matrix<T>, nl: Nonlinearity) -> Matrix<T> {
    match nl {
        Nonlinearity::Relu => m.map(|v| if v < T::zero() { T::zero() } else { v }),
        Nonlinearity::Identity => m.clone(),
    }
}

fn activation_grad<T: Scalar>(grad: &mut Matrix<T>, pre: &Matrix<T>, nl: Nonlinearity) {
    if nl == Nonlinearity::Relu {
        for (g, &p) in grad.as_mut_slice().iter_mut().zip(pre.as_slice()) {
            if p <= T::zero() {
                *g = T::zero();
            }
        }
    }
}

impl<T: Scalar> Model<T> {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        let mut shapes: Vec<(usize, usize)> = Vec::new();
        let mut names = Vec::new();
        let mut alloc = |name: String, shape: (usize, usize)| {
            shapes.push(shape);
            names.push(name);
            shapes.len() - 1
        };
        let mut units = Vec::new();
        for (l, layer) in spec.layers.iter().enumerate() {
            let w = (layer.in_features, layer.out_features);
            let mut per_dim = Vec::new();
            for (p, &d) in spec.dims.iter().enumerate() {
                let mut terms = Vec::new();
                for r in layer.relations.iter().filter(|r| r.dim == d) {
                    let key = OpKey::Relation(d, r.kind);
                    terms.push(Term { key, src: Some(p), weight: alloc(format!("layer{l}.dim{d}.{}", r.kind), w) });
                    if layer.use_kappa && matches!(r.kind, NeighborhoodKind::Adjacency(_)) {
                        let key = OpKey::Kappa(d, r.kind);
                        terms.push(Term { key, src: None, weight: alloc(format!("layer{l}.dim{d}.{}.kappa", r.kind), w) });
                    }
                }
                if layer.use_boundary && d > 0 {
                    if let Some(q) = spec.position(d - 1) {
                        let faces: Vec<Option<usize>> = if layer.per_face_incidence { (0..=d).map(Some).collect() } else { vec![None] };
                        for f in faces {
                            let name = match f {
                                Some(i) => format!("layer{l}.dim{d}.boundary{i}"),
                                None => format!("layer{l}.dim{d}.boundary"),
                            };
                            terms.push(Term { key: OpKey::Boundary(d, f), src: Some(q), weight: alloc(name, w) });
                        }
                    }
                }
                if layer.use_coboundary {
                    if let Some(q) = spec.position(d + 1) {
                        terms.push(Term { key: OpKey::Coboundary(d), src: Some(q), weight: alloc(format!("layer{l}.dim{d}.coboundary"), w) });
                    }
                }
                let self_w = layer.self_weight.then(|| alloc(format!("layer{l}.dim{d}.self"), w));
                let bias = alloc(format!("layer{l}.dim{d}.bias"), (1, layer.out_features));
                per_dim.push(Unit { terms, self_w, bias });
            }
            units.push(per_dim);
        }
        let mut widths = vec![spec.readout_width()];
        widths.extend_from_slice(&spec.head);
        widths.push(spec.classes);
        let head =
            widths.windows(2).enumerate().map(|(i, w)| (alloc(format!("head{i}.weight"), (w[0], w[1])), alloc(format!("head{i}.bias"), (1, w[1])))).collect();

        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let params = shapes
            .iter()
            .zip(&names)
            .map(|(&(r, c), name)| {
                if name.ends_with("bias") {
                    Matrix::zeros(r, c)
                } else {
                    let a = 1.0 / (r as f64).sqrt();
                    Matrix::from_fn(r, c, |_, _| T::from_f64_lossy(rng.random_range(-a..a)))
                }
            })
            .collect();
        Ok(Self { spec, units, head, params, names })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn params(&self) -> &[Matrix<T>] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Matrix<T>] {
        &mut self.params
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_parameters(&self) -> usize {
        self.params.iter().map(|p| p.rows() * p.cols()).sum()
    }

    pub fn zero_grads(&self) -> Vec<Matrix<T>> {
        self.params.iter().map(|p| Matrix::zeros(p.rows(), p.cols())).collect()
    }

    fn check_inputs(&self, dom: &Domain<T>, inputs: &[Matrix<T>], batch: usize) -> Result<()> {
        if inputs.len() != self.spec.dims.len() {
            return Err(shape_mismatch("input dimensions", self.spec.dims.len(), inputs.len()));
        }
        for (p, x) in inputs.iter().enumerate() {
            let want = (batch * dom.counts()[p], self.spec.in_features());
            if x.shape() != want {
                return Err(shape_mismatch(format!("input for dimension {}", self.spec.dims[p]), format!("{want:?}"), format!("{:?}", x.shape())));
            }
        }
        Ok(())
    }

    pub fn forward(&self, dom: &Domain<T>, inputs: &[Matrix<T>], batch: usize) -> Result<Forward<T>> {
        self.check_inputs(dom, inputs, batch)?;
        let mut acts = vec![inputs.to_vec()];
        let mut aggregated = Vec::new();
        let mut pres = Vec::new();
        for (l, layer) in self.spec.layers.iter().enumerate() {
            let x = &acts[l];
            let mut layer_agg = Vec::new();
            let mut layer_pre = Vec::new();
            let mut layer_out = Vec::new();
            for (p, unit) in self.units[l].iter().enumerate() {
                let rows = batch * dom.counts()[p];
                let mut pre = Matrix::zeros(rows, layer.out_features);
                if let Some(w) = unit.self_w {
                    pre.add_assign(&x[p].matmul(&self.params[w]));
                }
                let mut aggs = Vec::new();
                for term in &unit.terms {
                    let agg = self.resolve(dom, term).map(|(op, src)| op.apply_blocks(&x[src], batch));
                    if let Some(a) = &agg {
                        pre.add_assign(&a.matmul(&self.params[term.weight]));
                    }
                    aggs.push(agg);
                }
                pre.add_row_broadcast(self.params[unit.bias].as_slice());
                layer_out.push(activate(&pre, layer.nonlinearity));
                layer_pre.push(pre);
                layer_agg.push(aggs);
            }
            aggregated.push(layer_agg);
            pres.push(layer_pre);
            acts.push(layer_out);
        }

        let last = acts.last().unwrap();
        let f = self.spec.layers.last().unwrap().out_features;
        let width = self.spec.readout_width();
        let mut pooled = Matrix::zeros(batch, width);
        let mut argmax = vec![None; batch * width];
        for (p, out) in last.iter().enumerate() {
            let n = dom.counts()[p];
            for b in 0..batch {
                for c in 0..f {
                    let best = (b * n..(b + 1) * n).fold(None, |best: Option<usize>, r| match best {
                        Some(q) if out[(q, c)].is_nan() || out[(q, c)] >= out[(r, c)] => Some(q),
                        _ => Some(r),
                    });
                    if let Some(r) = best {
                        pooled[(b, p * f + c)] = out[(r, c)];
                        argmax[b * width + p * f + c] = Some(r);
                    }
                }
            }
        }

        let mut head_in = vec![pooled];
        let mut head_pre = Vec::new();
        for (i, &(w, bias)) in self.head.iter().enumerate() {
            let mut z = head_in[i].matmul(&self.params[w]);
            z.add_row_broadcast(self.params[bias].as_slice());
            if i + 1 < self.head.len() {
                head_in.push(activate(&z, Nonlinearity::Relu));
            }
            head_pre.push(z);
        }
        let logits = head_pre.last().unwrap().clone();
        Ok(Forward { batch, acts, aggregated, pre: pres, argmax, head_in, head_pre, logits })
    }

    fn resolve<'d>(&self, dom: &'d Domain<T>, term: &Term) -> Option<(&'d dirsimplex::SparseMatrix<T>, usize)> {
        let op = dom.op(&term.key)?;
        let src = match term.src {
            Some(s) => s,
            None => self.spec.position(dom.kappa_dim(&term.key)?)?,
        };
        Some((op, src))
    }

    /// Adds the gradient of the summed cross-entropy over the batch to `grads` and returns
    /// `(summed loss, correct predictions)`.
    pub fn backward(&self, dom: &Domain<T>, fwd: &Forward<T>, labels: &[usize], grads: &mut [Matrix<T>]) -> Result<(T, usize)> {
        let batch = fwd.batch;
        if labels.len() != batch {
            return Err(shape_mismatch("labels", batch, labels.len()));
        }
        let (loss, correct, mut d) = softmax_cross_entropy(&fwd.logits, labels);

        for i in (0..self.head.len()).rev() {
            let (w, b) = self.head[i];
            grads[w].add_assign(&fwd.head_in[i].t_matmul(&d));
            add_row(&mut grads[b], &d.column_sums());
            let mut dh = d.matmul_t(&self.params[w]);
            if i > 0 {
                activation_grad(&mut dh, &fwd.head_pre[i - 1], Nonlinearity::Relu);
            }
            d = dh;
        }

        let layers = &self.spec.layers;
        let f = layers.last().unwrap().out_features;
        let width = self.spec.readout_width();
        let last = fwd.acts.last().unwrap();
        let mut d_out: Vec<Matrix<T>> = last.iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect();
        for b in 0..batch {
            for k in 0..width {
                if let Some(r) = fwd.argmax[b * width + k] {
                    d_out[k / f][(r, k % f)] += d[(b, k)];
                }
            }
        }

        for l in (0..layers.len()).rev() {
            let x = &fwd.acts[l];
            let mut d_in: Vec<Matrix<T>> = x.iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect();
            for (p, unit) in self.units[l].iter().enumerate() {
                let mut dpre = std::mem::replace(&mut d_out[p], Matrix::zeros(0, 0));
                activation_grad(&mut dpre, &fwd.pre[l][p], layers[l].nonlinearity);
                add_row(&mut grads[unit.bias], &dpre.column_sums());
                if let Some(w) = unit.self_w {
                    grads[w].add_assign(&x[p].t_matmul(&dpre));
                    d_in[p].add_assign(&dpre.matmul_t(&self.params[w]));
                }
                for (term, agg) in unit.terms.iter().zip(&fwd.aggregated[l][p]) {
                    let (Some(agg), Some((op, src))) = (agg, self.resolve(dom, term)) else { continue };
                    grads[term.weight].add_assign(&agg.t_matmul(&dpre));
                    let dagg = dpre.matmul_t(&self.params[term.weight]);
                    d_in[src].add_assign(&op.apply_transpose_blocks(&dagg, batch));
                }
            }
            d_out = d_in;
        }
        Ok((loss, correct))
    }

    /// Forward pass plus reverse pass in one call.
    pub fn loss_and_grad(&self, dom: &Domain<T>, inputs: &[Matrix<T>], batch: usize, labels: &[usize], grads: &mut [Matrix<T>]) -> Result<(T, usize)> {
        let fwd = self.forward(dom, inputs, batch)?;
        self.backward(dom, &fwd, labels, grads)
    }

    pub fn logits(&self, dom: &Domain<T>, inputs: &[Matrix<T>], batch: usize) -> Result<Matrix<T>> {
        Ok(self.forward(dom, inputs, batch)?.logits)
    }
}

fn add_row<T: Scalar>(dst: &mut Matrix<T>, row: &[T]) {
    for (a, &b) in dst.as_mut_slice().iter_mut().zip(row) {
        *a += b;
    }
}

/// First index of the row maximum.
pub fn argmax<T: Scalar>(row: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Summed cross-entropy, correct count and the gradient with respect to the logits.
pub fn softmax_cross_entropy<T: Scalar>(logits: &Matrix<T>, labels: &[usize]) -> (T, usize, Matrix<T>) {
    let mut grad = Matrix::zeros(logits.rows(), logits.cols());
    let mut loss = T::zero();
    let mut correct = 0;
    for (b, &y) in labels.iter().enumerate() {
        let row = logits.row(b);
        let m = row.iter().copied().fold(T::neg_infinity(), T::max);
        let exps: Vec<T> = row.iter().map(|&v| (v - m).exp()).collect();
        let z: T = exps.iter().copied().sum();
        loss += z.ln() + m - row[y];
        if argmax(row) == y {
            correct += 1;
        }
        for (c, g) in grad.row_mut(b).iter_mut().enumerate() {
            *g = exps[c] / z - if c == y { T::one() } else { T::zero() };
        }
    }
    (loss, correct, grad)
}
