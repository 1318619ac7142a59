//! Seeded constructors for test complexes.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, so a generator is
//! a pure function of its [`GeneratorSpec`]. Each generation is single
//! threaded.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{Link, Simplex, SimplicialComplex, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::mixing::FaceSet;

/// Identifier of the random source recorded in generator metadata.
pub const RNG_ID: &str = "chacha8/rand_chacha-0.3/seed_from_u64";

/// Retry budget for rejection sampling.
pub const MAX_ATTEMPTS: usize = 1000;

/// Upper limit on the number of candidate top faces a generator enumerates.
const MAX_CANDIDATES: u128 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Complete { m: usize, n: usize },
    RandomPure { m: usize, n: usize, p: f64, seed: u64 },
    RegularGraphMatching { v: usize, s: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMetadata {
    pub kind: String,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub rng_id: Option<String>,
    /// Extra measured facts about the instance (e.g. `F(A)` of a matching).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub report: BTreeMap<String, Value>,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub complex: WeightedComplex,
    pub face_set: Option<FaceSet>,
    pub metadata: GeneratorMetadata,
}

fn invalid(msg: impl Into<String>) -> HdxError {
    HdxError::InvalidParameters(msg.into())
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// All `r`-subsets of `0..m` in lexicographic order.
pub fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > m {
        return out;
    }
    let mut cur: Vec<usize> = (0..r).collect();
    loop {
        out.push(cur.clone());
        let mut i = r;
        while i > 0 && cur[i - 1] == m - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn check_candidates(m: usize, n: usize) -> Result<()> {
    if binomial(m, n + 1) > MAX_CANDIDATES {
        return Err(invalid(format!("C({m}, {}) candidate faces is too many", n + 1)));
    }
    Ok(())
}

fn homogeneous_from(tops: &[Vec<usize>]) -> Result<WeightedComplex> {
    let simplices = tops
        .iter()
        .map(|t| Simplex::new(t.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    WeightedComplex::homogeneous(SimplicialComplex::from_top_faces(&simplices)?)
}

/// Every `(n+1)`-subset of `{0, ..., m-1}` with the homogeneous weight.
pub fn complete_complex(m: usize, n: usize) -> Result<WeightedComplex> {
    if m <= n {
        return Err(invalid(format!("complete complex needs m > n, got m={m} n={n}")));
    }
    check_candidates(m, n)?;
    homogeneous_from(&combinations(m, n + 1))
}

/// Whether every `(n-1)`-face lies in at least two top faces and every link
/// of dimension at least one (including the whole complex) is connected.
pub fn passes_random_pure_checks(wc: &WeightedComplex) -> Result<bool> {
    let x = wc.complex();
    let n = x.dim() as isize;
    if n >= 1 && (0..x.num_faces(n - 1)).any(|i| x.cofaces_of(n - 1, i).len() < 2) {
        return Ok(false);
    }
    for k in -1..n - 1 {
        for tau in x.faces(k) {
            if !Link::new(wc, tau)?.complex().complex().one_skeleton_connected() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Keeps each top face of the complete complex independently with
/// probability `p`, rejecting samples that fail
/// [`passes_random_pure_checks`].
pub fn random_pure_complex(m: usize, n: usize, p: f64, seed: u64) -> Result<WeightedComplex> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("keep probability must lie in (0, 1], got {p}")));
    }
    if n == 0 || m < n + 2 {
        return Err(invalid(format!("random pure complex needs n >= 1 and m >= n+2, got m={m} n={n}")));
    }
    check_candidates(m, n)?;
    let candidates = combinations(m, n + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::from("no faces kept");
    for _ in 0..MAX_ATTEMPTS {
        let kept: Vec<Vec<usize>> =
            candidates.iter().filter(|_| rng.gen::<f64>() < p).cloned().collect();
        if kept.is_empty() {
            last = "no faces kept".into();
            continue;
        }
        let wc = homogeneous_from(&kept)?;
        if passes_random_pure_checks(&wc)? {
            return Ok(wc);
        }
        last = format!("{} top faces kept, but a thin ridge or disconnected link remained", kept.len());
    }
    Err(HdxError::GenerationFailure { attempts: MAX_ATTEMPTS, reason: last })
}

/// A simple `s`-regular graph on `v` vertices: a circulant graph randomized
/// by `10 |E|` seeded double-edge swaps. Edges are returned sorted.
pub fn regular_graph(v: usize, s: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if s < 3 || s >= v || (v * s) % 2 != 0 {
        return Err(invalid(format!("need 3 <= s < v and v*s even, got v={v} s={s}")));
    }
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(v * s / 2);
    for i in 0..v {
        for off in 1..=s / 2 {
            let j = (i + off) % v;
            edges.push((i.min(j), i.max(j)));
        }
        if s % 2 == 1 && i < v / 2 {
            edges.push((i, i + v / 2));
        }
    }
    let mut set: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    debug_assert_eq!(set.len(), edges.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10 * edges.len() {
        let i = rng.gen_range(0..edges.len());
        let j = rng.gen_range(0..edges.len());
        let (a, b) = edges[i];
        let (c, d) = if rng.gen::<bool>() { edges[j] } else { (edges[j].1, edges[j].0) };
        if a == c || a == d || b == c || b == d {
            continue;
        }
        let e1 = (a.min(d), a.max(d));
        let e2 = (c.min(b), c.max(b));
        if set.contains(&e1) || set.contains(&e2) {
            continue;
        }
        set.remove(&edges[i]);
        set.remove(&edges[j]);
        set.insert(e1);
        set.insert(e2);
        edges[i] = e1;
        edges[j] = e2;
    }
    Ok(set.into_iter().collect())
}

/// Greedy maximal matching over a seeded shuffle of `edges`, returned sorted.
pub fn maximal_matching(edges: &[(usize, usize)], rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut order = edges.to_vec();
    order.shuffle(rng);
    let mut used = BTreeSet::new();
    let mut out = Vec::new();
    for (a, b) in order {
        if !used.contains(&a) && !used.contains(&b) {
            used.insert(a);
            used.insert(b);
            out.push((a, b));
        }
    }
    out.sort_unstable();
    out
}

fn edge_set(edges: &[(usize, usize)]) -> Result<FaceSet> {
    FaceSet::new(1, edges.iter().map(|&(a, b)| Simplex::new([a, b])).collect::<Result<_>>()?)
}

/// The `s`-regular graph itself as a pure 1-complex, with a maximal
/// matching.
pub fn regular_graph_complex_1d(v: usize, s: usize, seed: u64) -> Result<(WeightedComplex, FaceSet)> {
    let edges = regular_graph(v, s, seed)?;
    let tops: Vec<Vec<usize>> = edges.iter().map(|&(a, b)| vec![a, b]).collect();
    let wc = homogeneous_from(&tops)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let a = edge_set(&maximal_matching(&edges, &mut rng))?;
    Ok((wc, a))
}

fn triangles(v: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![BTreeSet::new(); v];
    for &(a, b) in edges {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut out = Vec::new();
    for &(a, b) in edges {
        for &c in adj[a].intersection(&adj[b]) {
            if c > b {
                out.push(vec![a, b, c]);
            }
        }
    }
    out.sort();
    out
}

/// An `s`-regular graph filled in to the pure 2-complex spanned by its
/// triangles, plus a maximal matching among the edges that survive. Graphs
/// without triangles are redrawn from the same stream.
pub fn regular_graph_matching(v: usize, s: usize, seed: u64) -> Result<(WeightedComplex, FaceSet)> {
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let edges = regular_graph(v, s, seeds.gen())?;
        let tris = triangles(v, &edges);
        if tris.is_empty() {
            continue;
        }
        let wc = homogeneous_from(&tris)?;
        let surviving: Vec<(usize, usize)> = wc
            .complex()
            .faces(1)
            .iter()
            .map(|e| (e.vertices()[0], e.vertices()[1]))
            .collect();
        let a = edge_set(&maximal_matching(&surviving, &mut seeds))?;
        return Ok((wc, a));
    }
    Err(HdxError::GenerationFailure {
        attempts: MAX_ATTEMPTS,
        reason: format!("no triangles in any {s}-regular graph on {v} vertices"),
    })
}

impl GeneratorSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorSpec::Complete { .. } => "complete",
            GeneratorSpec::RandomPure { .. } => "random-pure",
            GeneratorSpec::RegularGraphMatching { .. } => "regular-graph-matching",
        }
    }

    fn seed(&self) -> Option<u64> {
        match *self {
            GeneratorSpec::Complete { .. } => None,
            GeneratorSpec::RandomPure { seed, .. } | GeneratorSpec::RegularGraphMatching { seed, .. } => {
                Some(seed)
            }
        }
    }

    fn params(&self) -> BTreeMap<String, Value> {
        let mut p = BTreeMap::new();
        match *self {
            GeneratorSpec::Complete { m, n } => {
                p.insert("m".into(), m.into());
                p.insert("n".into(), n.into());
            }
            GeneratorSpec::RandomPure { m, n, p: prob, .. } => {
                p.insert("m".into(), m.into());
                p.insert("n".into(), n.into());
                p.insert("p".into(), prob.into());
            }
            GeneratorSpec::RegularGraphMatching { v, s, .. } => {
                p.insert("v".into(), v.into());
                p.insert("s".into(), s.into());
            }
        }
        p
    }

    pub fn generate(&self) -> Result<Generated> {
        let (complex, face_set) = match *self {
            GeneratorSpec::Complete { m, n } => (complete_complex(m, n)?, None),
            GeneratorSpec::RandomPure { m, n, p, seed } => (random_pure_complex(m, n, p, seed)?, None),
            GeneratorSpec::RegularGraphMatching { v, s, seed } => {
                let (wc, a) = regular_graph_matching(v, s, seed)?;
                (wc, Some(a))
            }
        };
        let mut report = BTreeMap::new();
        if let Some(a) = &face_set {
            report.insert("matching_size".into(), a.faces.len().into());
            report.insert("thinness".into(), crate::mixing::local_thinness(&complex, a)?.into());
            report.insert("top_faces".into(), complex.num_faces(complex.dim() as isize).into());
        }
        let seed = self.seed();
        let metadata = GeneratorMetadata {
            kind: self.kind().into(),
            params: self.params(),
            seed,
            rng_id: seed.map(|_| RNG_ID.to_string()),
            report,
        };
        Ok(Generated { complex, face_set, metadata })
    }
}
