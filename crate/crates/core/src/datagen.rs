//! Synthetic source-localization benchmark on edge signals.
//!
//! An SBM graph is lifted to a flag complex. Each sample starts from white noise on the edges,
//! receives a few random spikes inside one edge partition, is diffused `t` times by an edge
//! operator and is finally corrupted by Gaussian noise at a prescribed SNR. The label is the
//! partition that held the spikes: one per node community plus one for inter-community edges.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, StudentT};

use crate::adjacency::{lower_adjacency, undirected_lower};
use crate::complex::DirectedSimplicialComplex;
use crate::error::{Error, Result};
use crate::lift::{lift_directed_flag, lift_undirected_flag, Digraph, UndirectedGraph};
use crate::linalg::SparseMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct SbmSpec {
    pub n: usize,
    pub communities: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub directed: bool,
    pub seed: u64,
}

impl SbmSpec {
    pub fn paper(directed: bool, seed: u64) -> Self {
        Self { n: 70, communities: 10, p_in: 0.9, p_out: 0.01, directed, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.communities == 0 || !self.n.is_multiple_of(self.communities) {
            return Err(Error::InvalidSpec(format!("n = {} is not divisible by communities = {}", self.n, self.communities)));
        }
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidSpec(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }

    pub fn community_of(&self, v: usize) -> usize {
        v / (self.n / self.communities)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SbmGraph {
    Directed(Digraph),
    Undirected(UndirectedGraph),
}

impl SbmGraph {
    pub fn num_edges(&self) -> usize {
        match self {
            SbmGraph::Directed(g) => g.num_edges(),
            SbmGraph::Undirected(g) => g.num_edges(),
        }
    }

    pub fn lift(&self, max_dim: usize) -> DirectedSimplicialComplex {
        match self {
            SbmGraph::Directed(g) => lift_directed_flag(g, max_dim),
            SbmGraph::Undirected(g) => lift_undirected_flag(g, max_dim),
        }
    }
}

/// Samples an SBM graph. In directed mode every sampled edge gets one uniformly random orientation.
pub fn gen_sbm(spec: &SbmSpec) -> Result<SbmGraph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges = Vec::new();
    for u in 0..spec.n {
        for v in u + 1..spec.n {
            let p = if spec.community_of(u) == spec.community_of(v) { spec.p_in } else { spec.p_out };
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(if spec.directed {
        let oriented: Vec<_> = edges.into_iter().map(|(u, v)| if rng.random_bool(0.5) { (u, v) } else { (v, u) }).collect();
        SbmGraph::Directed(Digraph::new(spec.n, oriented)?)
    } else {
        SbmGraph::Undirected(UndirectedGraph::new(spec.n, edges)?)
    })
}

/// Edge classes: intra-community edges carry their community, inter-community edges carry `communities`.
pub fn edge_labels(complex: &DirectedSimplicialComplex, spec: &SbmSpec) -> Vec<usize> {
    complex
        .simplices(1)
        .iter()
        .map(|e| {
            let (a, b) = (spec.community_of(e.vertices()[0]), spec.community_of(e.vertices()[1]));
            if a == b {
                a
            } else {
                spec.communities
            }
        })
        .collect()
}

/// Diffusion operator on edges: the binary lower (1,0,1)-adjacency for directed lifts, the
/// symmetric facet-sharing adjacency otherwise.
pub fn diffusion_operator(complex: &DirectedSimplicialComplex, directed: bool) -> SparseMatrix<f64> {
    if complex.count(1) == 0 {
        return SparseMatrix::from_triplets(0, 0, std::iter::empty());
    }
    if directed {
        lower_adjacency(complex, 1, 1, 0, 1).expect("edge relation indices are in range").to_operator().to_weighted()
    } else {
        undirected_lower(complex, 1).to_weighted()
    }
}

/// A lifted SBM instance ready for signal generation.
#[derive(Clone, Debug)]
pub struct SourceTask {
    pub spec: SbmSpec,
    pub complex: DirectedSimplicialComplex,
    pub edge_labels: Vec<usize>,
    /// Edge indices per class, `communities + 1` entries.
    pub partitions: Vec<Vec<usize>>,
    pub operator: SparseMatrix<f64>,
}

impl SourceTask {
    pub fn new(spec: &SbmSpec) -> Result<Self> {
        let graph = gen_sbm(spec)?;
        let complex = graph.lift(2);
        let edge_labels = edge_labels(&complex, spec);
        let mut partitions = vec![Vec::new(); spec.communities + 1];
        for (e, &l) in edge_labels.iter().enumerate() {
            partitions[l].push(e);
        }
        if let Some(empty) = partitions.iter().position(Vec::is_empty) {
            return Err(Error::EmptyCommunity(empty));
        }
        let operator = diffusion_operator(&complex, spec.directed);
        Ok(Self { spec: spec.clone(), complex, edge_labels, partitions, operator })
    }

    pub fn num_edges(&self) -> usize {
        self.edge_labels.len()
    }

    pub fn num_classes(&self) -> usize {
        self.partitions.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalSpec {
    pub count: usize,
    pub spike_edges: usize,
    /// `f64::INFINITY` disables the noise.
    pub snr_db: f64,
    pub seed: u64,
    /// Fixes the diffusion order instead of drawing it.
    pub fixed_t: Option<usize>,
}

impl SignalSpec {
    pub fn new(count: usize, snr_db: f64, seed: u64) -> Self {
        Self { count, spike_edges: 5, snr_db, seed, fixed_t: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalSample {
    /// Observed signal `S^t x + n`.
    pub x: Vec<f64>,
    /// Noise-free diffused signal `S^t x`.
    pub clean: Vec<f64>,
    pub label: usize,
    pub t: usize,
}

pub const MAX_DIFFUSION_ORDER: usize = 100;

/// `t = min(100, round(|T|))` with `T ~ Student-t(10)`.
pub fn diffusion_order<R: Rng + ?Sized>(rng: &mut R) -> usize {
    let t: f64 = StudentT::new(10.0).expect("positive degrees of freedom").sample(rng);
    (t.abs().round() as usize).min(MAX_DIFFUSION_ORDER)
}

fn power(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// `10 log10(P_signal / P_noise)` for an observed sample and its clean part.
pub fn measured_snr_db(clean: &[f64], observed: &[f64]) -> f64 {
    let noise: Vec<f64> = observed.iter().zip(clean).map(|(o, c)| o - c).collect();
    10.0 * (power(clean) / power(&noise)).log10()
}

/// Draws `spec.count` samples. Sample `i` uses its own random stream, so output does not
/// depend on generation order.
pub fn gen_signals(task: &SourceTask, spec: &SignalSpec) -> Result<Vec<SignalSample>> {
    if spec.snr_db.is_nan() {
        return Err(Error::InvalidSpec("snr_db is NaN".into()));
    }
    let n = task.num_edges();
    let base = Normal::new(0.0, (1.0 / n as f64).sqrt()).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    (0..spec.count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            let mut x: Vec<f64> = (0..n).map(|_| base.sample(&mut rng)).collect();
            let label = rng.random_range(0..task.num_classes());
            let part = &task.partitions[label];
            for pick in index::sample(&mut rng, part.len(), spec.spike_edges.min(part.len())) {
                let alpha: f64 = rng.sample(StandardNormal);
                x[part[pick]] += alpha;
            }
            let t = spec.fixed_t.unwrap_or_else(|| diffusion_order(&mut rng));
            let mut m = crate::linalg::Matrix::from_vec(n, 1, x);
            for _ in 0..t {
                m = task.operator.apply(&m);
            }
            let clean = m.into_vec();
            let mut noise: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let (ps, pn) = (power(&clean), power(&noise));
            let scale = if spec.snr_db.is_infinite() || ps == 0.0 || pn == 0.0 { 0.0 } else { (ps / (pn * 10f64.powf(spec.snr_db / 10.0))).sqrt() };
            noise.iter_mut().for_each(|v| *v *= scale);
            let x = clean.iter().zip(&noise).map(|(c, v)| c + v).collect();
            Ok(SignalSample { x, clean, label, t })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified split of sample indices by label; each part is returned sorted.
pub fn split(labels: &[usize], ratios: [f64; 3], seed: u64) -> Result<Split> {
    if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSpec(format!("split ratios {ratios:?} must be in [0,1] and sum to 1")));
    }
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Split { train: Vec::new(), val: Vec::new(), test: Vec::new() };
    for c in 0..classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        for i in (1..members.len()).rev() {
            members.swap(i, rng.random_range(0..=i));
        }
        let n = members.len() as f64;
        let n_train = (ratios[0] * n).round() as usize;
        let n_val = ((ratios[1] * n).round() as usize).min(members.len() - n_train);
        out.train.extend_from_slice(&members[..n_train]);
        out.val.extend_from_slice(&members[n_train..n_train + n_val]);
        out.test.extend_from_slice(&members[n_train + n_val..]);
    }
    out.train.sort_unstable();
    out.val.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}

const DATASET_MAGIC: &[u8; 4] = b"DSXD";
const DATASET_VERSION: u32 = 1;

/// Serialized dataset: header plus `(label, t, x)` records, little-endian.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub n_edges: usize,
    pub snr_db: f64,
    pub seed: u64,
    pub directed: bool,
    pub samples: Vec<(usize, usize, Vec<f64>)>,
}

impl Dataset {
    pub fn from_samples(samples: &[SignalSample], n_edges: usize, snr_db: f64, seed: u64, directed: bool) -> Self {
        Self { n_edges, snr_db, seed, directed, samples: samples.iter().map(|s| (s.label, s.t, s.x.clone())).collect() }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(48 + self.samples.len() * (8 + 8 * self.n_edges));
        b.extend_from_slice(DATASET_MAGIC);
        b.extend_from_slice(&DATASET_VERSION.to_le_bytes());
        b.extend_from_slice(&(self.n_edges as u64).to_le_bytes());
        b.extend_from_slice(&1u32.to_le_bytes());
        b.extend_from_slice(&(self.samples.len() as u64).to_le_bytes());
        b.extend_from_slice(&self.snr_db.to_le_bytes());
        b.extend_from_slice(&self.seed.to_le_bytes());
        b.push(self.directed as u8);
        for (label, t, x) in &self.samples {
            b.extend_from_slice(&(*label as u32).to_le_bytes());
            b.extend_from_slice(&(*t as u32).to_le_bytes());
            for v in x {
                b.extend_from_slice(&v.to_le_bytes());
            }
        }
        b
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != DATASET_MAGIC {
            return Err(Error::Malformed("bad magic".into()));
        }
        let version = r.u32()?;
        if version != DATASET_VERSION {
            return Err(Error::Malformed(format!("unsupported version {version}")));
        }
        let n_edges = r.u64()? as usize;
        let features = r.u32()?;
        if features != 1 {
            return Err(Error::Malformed(format!("expected 1 feature, found {features}")));
        }
        let count = r.u64()? as usize;
        let snr_db = f64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let seed = r.u64()?;
        let directed = match r.take(1)?[0] {
            0 => false,
            1 => true,
            m => return Err(Error::Malformed(format!("unknown mode byte {m}"))),
        };
        let mut samples = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            let label = r.u32()? as usize;
            let t = r.u32()? as usize;
            let x = (0..n_edges).map(|_| r.take(8).map(|s| f64::from_le_bytes(s.try_into().unwrap()))).collect::<Result<_>>()?;
            samples.push((label, t, x));
        }
        if r.pos != bytes.len() {
            return Err(Error::Malformed(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(Self { n_edges, snr_db, seed, directed, samples })
    }

    pub fn labels_csv(&self) -> String {
        let mut out = String::from("index,label,t\n");
        for (i, (label, t, _)) in self.samples.iter().enumerate() {
            out.push_str(&format!("{i},{label},{t}\n"));
        }
        out
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let s = self.bytes.get(self.pos..end).ok_or_else(|| Error::Malformed(format!("truncated at byte {}", self.pos)))?;
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
