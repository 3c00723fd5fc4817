//! Colour refinement on directed simplicial complexes and on digraphs.
//!
//! The simplicial test refines every simplex with its own colour, the ordered tuple of its
//! facet colours, the multiset of its coface colours, and for each pair of face maps `(i, j)`
//! the multisets of `(c_τ, c_κ)` pairs over its lower and upper `(1,i,j)`-neighbours. The
//! reduced variant keeps only the own colour, the facet tuple and the upper pairs.
//!
//! New colours are ranks of the distinct signatures in sorted order, computed per dimension
//! and shared by every complex refined together. Colours are therefore comparable across the
//! complexes of one joint run and do not depend on vertex labels.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adjacency::{lower_adjacency, upper_adjacency};
use crate::complex::{DirectedSimplicialComplex, SimplexId};
use crate::lift::{lift_directed_flag, Digraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Own colour, boundary tuple, coboundary multiset, lower and upper pairs.
    Full,
    /// Own colour, boundary tuple and upper pairs only.
    Reduced,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(Variant::Full),
            "reduced" => Ok(Variant::Reduced),
            other => Err(format!("unknown variant {other:?} (expected full|reduced)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefineOptions {
    pub variant: Variant,
    /// Upper bound on refinement rounds; `None` runs to stability.
    pub max_rounds: Option<usize>,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self { variant: Variant::Full, max_rounds: None }
    }
}

impl RefineOptions {
    pub fn new(variant: Variant) -> Self {
        Self { variant, max_rounds: None }
    }
}

/// Colours per dimension, dense within each dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<Vec<u32>>,
    iteration: usize,
}

impl Coloring {
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn color(&self, id: SimplexId) -> u32 {
        self.colors[id.dim][id.index]
    }

    pub fn colors(&self, dim: usize) -> &[u32] {
        self.colors.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn dims(&self) -> usize {
        self.colors.len()
    }

    /// Colour classes of one dimension, each sorted, ordered by smallest member.
    pub fn partition(&self, dim: usize) -> Vec<Vec<usize>> {
        partition_of(self.colors(dim))
    }

    /// True when every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Coloring) -> bool {
        self.colors.len() == coarser.colors.len() && self.colors.iter().zip(&coarser.colors).all(|(fine, coarse)| refines(fine, coarse))
    }

    pub fn histogram(&self) -> StableHistogram {
        StableHistogram(
            self.colors
                .iter()
                .map(|level| {
                    let mut h = BTreeMap::new();
                    for &c in level {
                        *h.entry(c).or_insert(0) += 1;
                    }
                    h
                })
                .collect(),
        )
    }
}

pub fn partition_of(colors: &[u32]) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &c) in colors.iter().enumerate() {
        classes.entry(c).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort();
    out
}

/// `fine` refines `coarse` when equal fine colours imply equal coarse colours.
pub fn refines(fine: &[u32], coarse: &[u32]) -> bool {
    let mut map: BTreeMap<u32, u32> = BTreeMap::new();
    fine.len() == coarse.len() && fine.iter().zip(coarse).all(|(&f, &c)| *map.entry(f).or_insert(c) == c)
}

/// Per-dimension multiset of colours.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StableHistogram(pub Vec<BTreeMap<u32, usize>>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub coloring: Coloring,
    pub histogram: StableHistogram,
    /// Rounds performed, including the last one that left the partition unchanged.
    pub rounds: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Distinguished,
    NotDistinguished,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Distinguished => "distinguished",
            Verdict::NotDistinguished => "not-distinguished",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Signature {
    own: u32,
    boundary: Vec<u32>,
    coboundary: Vec<u32>,
    down: Vec<Vec<(u32, u32)>>,
    up: Vec<Vec<(u32, u32)>>,
}

/// `(τ, κ)` lists per simplex for one `(i, j)` pair; κ lives in `kappa_dim`.
struct PairTable {
    kappa_dim: usize,
    rows: Vec<Vec<(usize, usize)>>,
}

/// Neighbourhood structure of one complex, precomputed once per refinement.
struct Structure<'a> {
    complex: &'a DirectedSimplicialComplex,
    down: Vec<Vec<PairTable>>,
    up: Vec<Vec<PairTable>>,
}

impl<'a> Structure<'a> {
    fn new(complex: &'a DirectedSimplicialComplex, variant: Variant) -> Self {
        let levels = complex.per_dim_counts().len();
        let mut down = Vec::with_capacity(levels);
        let mut up = Vec::with_capacity(levels);
        for d in 0..levels {
            let n = complex.count(d);
            let mut dl = Vec::new();
            if d >= 1 && variant == Variant::Full {
                for i in 0..=d {
                    for j in 0..=d {
                        let rel = lower_adjacency(complex, d, 1, i, j).expect("indices in range");
                        dl.push(table(n, d - 1, rel.witnesses().iter().map(|w| (w.sigma, w.tau, w.kappa.index))));
                    }
                }
            }
            let mut ul = Vec::new();
            if d + 1 < levels {
                for i in 0..=d + 1 {
                    for j in 0..=d + 1 {
                        let rel = upper_adjacency(complex, d, 1, i, j).expect("indices in range");
                        ul.push(table(n, d + 1, rel.witnesses().iter().map(|w| (w.sigma, w.tau, w.kappa.index))));
                    }
                }
            }
            down.push(dl);
            up.push(ul);
        }
        Self { complex, down, up }
    }

    fn signature(&self, colors: &[Vec<u32>], d: usize, s: usize, variant: Variant) -> Signature {
        let k = self.complex;
        let boundary = if d == 0 { Vec::new() } else { k.facet_indices(d, s).iter().map(|&f| colors[d - 1][f]).collect() };
        let pairs = |tables: &[PairTable]| -> Vec<Vec<(u32, u32)>> {
            tables
                .iter()
                .map(|t| {
                    let mut v: Vec<(u32, u32)> = t.rows[s].iter().map(|&(tau, kap)| (colors[d][tau], colors[t.kappa_dim][kap])).collect();
                    v.sort_unstable();
                    v
                })
                .collect()
        };
        let (coboundary, down) = match variant {
            Variant::Full => {
                let mut cob: Vec<u32> = k.coface_entries(d, s).iter().map(|&(_, t)| colors[d + 1][t]).collect();
                cob.sort_unstable();
                (cob, pairs(&self.down[d]))
            }
            Variant::Reduced => (Vec::new(), Vec::new()),
        };
        Signature { own: colors[d][s], boundary, coboundary, down, up: pairs(&self.up[d]) }
    }
}

fn table(n: usize, kappa_dim: usize, witnesses: impl Iterator<Item = (usize, usize, usize)>) -> PairTable {
    let mut rows = vec![Vec::new(); n];
    for (s, t, k) in witnesses {
        rows[s].push((t, k));
    }
    PairTable { kappa_dim, rows }
}

/// Refines one complex to stability.
pub fn dswl_refine(complex: &DirectedSimplicialComplex, variant: Variant) -> Refinement {
    dswl_refine_joint(&[complex], RefineOptions::new(variant)).pop().expect("one complex in, one refinement out")
}

/// Refines several complexes with a shared signature table so their colours are comparable.
pub fn dswl_refine_joint(complexes: &[&DirectedSimplicialComplex], opts: RefineOptions) -> Vec<Refinement> {
    let structures: Vec<Structure> = complexes.iter().map(|k| Structure::new(k, opts.variant)).collect();
    let levels = complexes.iter().map(|k| k.per_dim_counts().len()).max().unwrap_or(0);
    let mut colors: Vec<Vec<Vec<u32>>> = complexes.iter().map(|k| k.per_dim_counts().iter().map(|&n| vec![0u32; n]).collect()).collect();
    let count_classes = |colors: &[Vec<Vec<u32>>]| -> Vec<usize> {
        (0..levels).map(|d| colors.iter().filter_map(|c| c.get(d)).flatten().collect::<BTreeSet<_>>().len()).collect()
    };
    let mut classes = count_classes(&colors);
    let mut rounds = 0;
    loop {
        if opts.max_rounds.is_some_and(|m| rounds >= m) {
            break;
        }
        let mut next: Vec<Vec<Vec<u32>>> = Vec::with_capacity(colors.len());
        let sigs: Vec<Vec<Vec<Signature>>> = structures
            .iter()
            .zip(&colors)
            .map(|(st, col)| (0..col.len()).map(|d| (0..col[d].len()).map(|s| st.signature(col, d, s, opts.variant)).collect()).collect())
            .collect();
        for d in 0..levels {
            let table: BTreeSet<&Signature> = sigs.iter().filter_map(|c| c.get(d)).flatten().collect();
            let rank: BTreeMap<&Signature, u32> = table.into_iter().enumerate().map(|(r, s)| (s, r as u32)).collect();
            for (ci, c) in sigs.iter().enumerate() {
                if next.len() <= ci {
                    next.push(Vec::new());
                }
                if let Some(level) = c.get(d) {
                    next[ci].push(level.iter().map(|s| rank[s]).collect());
                }
            }
        }
        if next.len() < colors.len() {
            next.resize(colors.len(), Vec::new());
        }
        rounds += 1;
        colors = next;
        let new_classes = count_classes(&colors);
        if new_classes == classes {
            break;
        }
        classes = new_classes;
    }
    colors
        .into_iter()
        .map(|c| {
            let coloring = Coloring { colors: c, iteration: rounds };
            Refinement { histogram: coloring.histogram(), coloring, rounds }
        })
        .collect()
}

/// Joint refinement of two complexes; distinguished iff the stable histograms differ.
pub fn distinguish(a: &DirectedSimplicialComplex, b: &DirectedSimplicialComplex, opts: RefineOptions) -> (Verdict, Refinement, Refinement) {
    let mut r = dswl_refine_joint(&[a, b], opts);
    let rb = r.pop().unwrap();
    let ra = r.pop().unwrap();
    let verdict = if ra.histogram == rb.histogram { Verdict::NotDistinguished } else { Verdict::Distinguished };
    (verdict, ra, rb)
}

/// Directed 1-WL on the nodes of one digraph.
pub fn dwl_refine(g: &Digraph) -> Refinement {
    dwl_refine_joint(&[g]).pop().unwrap()
}

type InOut = (Vec<Vec<usize>>, Vec<Vec<usize>>);
/// Own colour, sorted in-neighbour colours, sorted out-neighbour colours.
type NodeSignature = (u32, Vec<u32>, Vec<u32>);

/// Directed 1-WL: own colour plus in- and out-neighbour colour multisets, shared table.
pub fn dwl_refine_joint(graphs: &[&Digraph]) -> Vec<Refinement> {
    let adj: Vec<InOut> = graphs.iter().map(|g| (g.in_neighbors(), g.out_neighbors())).collect();
    let mut colors: Vec<Vec<u32>> = graphs.iter().map(|g| vec![0; g.num_vertices()]).collect();
    let distinct = |c: &[Vec<u32>]| c.iter().flatten().collect::<BTreeSet<_>>().len();
    let mut classes = distinct(&colors);
    let mut rounds = 0;
    loop {
        let sigs: Vec<Vec<NodeSignature>> = adj
            .iter()
            .zip(&colors)
            .map(|((inn, out), col)| {
                (0..col.len())
                    .map(|v| {
                        let mut i: Vec<u32> = inn[v].iter().map(|&u| col[u]).collect();
                        let mut o: Vec<u32> = out[v].iter().map(|&u| col[u]).collect();
                        i.sort_unstable();
                        o.sort_unstable();
                        (col[v], i, o)
                    })
                    .collect()
            })
            .collect();
        let table: BTreeSet<&NodeSignature> = sigs.iter().flatten().collect();
        let rank: BTreeMap<&NodeSignature, u32> = table.into_iter().enumerate().map(|(r, s)| (s, r as u32)).collect();
        colors = sigs.iter().map(|g| g.iter().map(|s| rank[s]).collect()).collect();
        rounds += 1;
        let new_classes = distinct(&colors);
        if new_classes == classes {
            break;
        }
        classes = new_classes;
    }
    colors
        .into_iter()
        .map(|c| {
            let coloring = Coloring { colors: vec![c], iteration: rounds };
            Refinement { histogram: coloring.histogram(), coloring, rounds }
        })
        .collect()
}

pub fn dwl_distinguish(a: &Digraph, b: &Digraph) -> Verdict {
    let r = dwl_refine_joint(&[a, b]);
    if r[0].histogram == r[1].histogram {
        Verdict::NotDistinguished
    } else {
        Verdict::Distinguished
    }
}

/// True when D-WL cannot tell `a` and `b` apart but the simplicial test on their directed
/// flag complexes can.
pub fn is_separating_pair(a: &Digraph, b: &Digraph) -> bool {
    if dwl_distinguish(a, b) == Verdict::Distinguished {
        return false;
    }
    let (ka, kb) = (lift_directed_flag(a, 2), lift_directed_flag(b, 2));
    distinguish(&ka, &kb, RefineOptions::new(Variant::Full)).0 == Verdict::Distinguished
}

/// Searches for two digraphs that directed 1-WL cannot separate while the simplicial test on
/// their directed flag complexes can.
///
/// Vertex counts are scanned from `n_max` (capped at 8) downwards. For each count, circulant
/// digraphs with equally many connection steps are tried first, in lexicographic order of the
/// step sets; then `trials` random digraphs drawn from `seed` are compared pairwise.
pub fn find_counterexample(n_max: usize, trials: usize, seed: u64) -> Option<(Digraph, Digraph)> {
    let n_max = n_max.min(8);
    for n in (2..=n_max).rev() {
        let steps: Vec<usize> = (1..n).collect();
        let mut sets: Vec<Vec<usize>> =
            (1u32..(1 << steps.len())).map(|mask| steps.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &s)| s).collect()).collect();
        sets.sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for (ai, a) in sets.iter().enumerate() {
            for b in sets[ai + 1..].iter().take_while(|b| b.len() == a.len()) {
                let ga = Digraph::circulant(n, a).expect("valid steps");
                let gb = Digraph::circulant(n, b).expect("valid steps");
                if is_separating_pair(&ga, &gb) {
                    return Some((ga, gb));
                }
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut pool: Vec<(Vec<usize>, Digraph)> = Vec::new();
        for _ in 0..trials {
            let edges: Vec<(usize, usize)> =
                (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v).filter(|_| rng.random_bool(0.5)).collect();
            let g = Digraph::new(n, edges).expect("valid by construction");
            let mut degrees: Vec<usize> = g.in_neighbors().iter().zip(g.out_neighbors()).map(|(i, o)| i.len() * n + o.len()).collect();
            degrees.sort_unstable();
            for (dh, h) in &pool {
                if *dh == degrees && is_separating_pair(h, &g) {
                    return Some((h.clone(), g));
                }
            }
            pool.push((degrees, g));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::any_permutation;

    #[test]
    fn single_edge_endpoints_get_distinct_colors() {
        let k = DirectedSimplicialComplex::build([vec![0, 1]]).unwrap();
        let r = dswl_refine(&k, Variant::Full);
        let c = r.coloring.colors(0);
        assert_ne!(c[0], c[1]);
        assert_eq!(r.histogram.0.len(), 2);
    }

    #[test]
    fn zero_rounds_gives_one_color_per_dimension() {
        let k = lift_directed_flag(&Digraph::circulant(6, &[1, 2]).unwrap(), 2);
        let r = dswl_refine_joint(&[&k], RefineOptions { variant: Variant::Full, max_rounds: Some(0) }).pop().unwrap();
        for d in 0..3 {
            assert_eq!(r.coloring.partition(d).len(), 1);
        }
        assert_eq!(r.rounds, 0);
    }

    #[test]
    fn dwl_examples() {
        let reg = Digraph::circulant(5, &[1, 2]).unwrap();
        assert_eq!(dwl_refine(&reg).coloring.partition(0).len(), 1);
        let path = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(dwl_refine(&path).coloring.partition(0).len(), 3);
        let tri = Digraph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(dwl_refine(&tri).coloring.partition(0).len(), 3);
    }

    #[test]
    fn c6_pair_separates() {
        let a = Digraph::circulant(6, &[1, 2]).unwrap();
        let b = Digraph::circulant(6, &[1, 3]).unwrap();
        assert_eq!(dwl_distinguish(&a, &b), Verdict::NotDistinguished);
        let (ka, kb) = (lift_directed_flag(&a, 2), lift_directed_flag(&b, 2));
        assert!(ka.count(2) > 0);
        assert_eq!(kb.count(2), 0);
        for v in [Variant::Full, Variant::Reduced] {
            assert_eq!(distinguish(&ka, &kb, RefineOptions::new(v)).0, Verdict::Distinguished);
        }
        assert_eq!(distinguish(&ka, &ka, RefineOptions::default()).0, Verdict::NotDistinguished);
    }

    #[test]
    fn relabelled_lift_is_not_distinguished() {
        let g = Digraph::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 2)]).unwrap();
        let h = g.permuted(&[3, 0, 4, 1, 2]);
        let (kg, kh) = (lift_directed_flag(&g, 2), lift_directed_flag(&h, 2));
        assert_eq!(distinguish(&kg, &kh, RefineOptions::default()).0, Verdict::NotDistinguished);
        assert_eq!(dswl_refine(&kg, Variant::Full).histogram, dswl_refine(&kh, Variant::Full).histogram);
    }

    #[test]
    fn search_finds_c6_pair() {
        let (a, b) = find_counterexample(6, 0, 0).unwrap();
        assert_eq!(a, Digraph::circulant(6, &[1, 2]).unwrap());
        assert_eq!(b, Digraph::circulant(6, &[1, 3]).unwrap());
        assert_eq!(find_counterexample(6, 50, 9), find_counterexample(6, 50, 9));
    }

    #[test]
    fn no_pair_on_two_vertices() {
        assert_eq!(find_counterexample(2, 200, 1), None);
        // exhaustive: every digraph on at most two vertices
        let mut all = vec![Digraph::new(1, []).unwrap()];
        for mask in 0..4u32 {
            let edges = [(0, 1), (1, 0)].into_iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, e)| e);
            all.push(Digraph::new(2, edges).unwrap());
        }
        for a in &all {
            for b in &all {
                assert!(!is_separating_pair(a, b));
            }
        }
    }

    #[test]
    fn refinement_is_monotone() {
        let k = lift_directed_flag(&Digraph::new(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 3), (1, 4)]).unwrap(), 2);
        let mut prev: Option<Coloring> = None;
        for t in 0..6 {
            let r = dswl_refine_joint(&[&k], RefineOptions { variant: Variant::Full, max_rounds: Some(t) }).pop().unwrap();
            if let Some(p) = &prev {
                assert!(r.coloring.refines(p));
            }
            prev = Some(r.coloring);
        }
        assert!(dswl_refine(&k, Variant::Full).rounds <= k.len());
    }

    #[test]
    fn histogram_is_label_invariant_under_all_permutations() {
        let g = Digraph::new(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let base = dswl_refine(&lift_directed_flag(&g, 2), Variant::Full).histogram;
        any_permutation(4, |p| {
            assert_eq!(dswl_refine(&lift_directed_flag(&g.permuted(p), 2), Variant::Full).histogram, base);
            false
        });
    }
}
