//! Pure weighted simplicial complexes, the weight recursion and links.
//!
//! Faces are stored per dimension `k = -1..=n` in lexicographic order of
//! their sorted vertex lists, so the index of a face is a pure function of
//! the face set. Face incidence (facets and cofaces) is precomputed at
//! construction and shared by every operator assembled later.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{HdxError, Result};

/// A simplex given by its strictly increasing vertex ids. The empty simplex
/// has dimension -1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = vertices.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(HdxError::RepeatedVertex(w[0]));
        }
        Ok(Simplex(v))
    }

    pub fn empty() -> Self {
        Simplex(Vec::new())
    }

    #[allow(dead_code)]
    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Simplex(v)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ⊆ other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.0.len() > other.0.len() {
            return false;
        }
        let mut it = other.0.iter();
        self.0.iter().all(|v| it.any(|w| w == v))
    }

    pub fn is_disjoint(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.0.binary_search(v).is_err())
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        let mut v: Vec<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        Simplex(v)
    }

    pub fn difference(&self, other: &Simplex) -> Simplex {
        Simplex(
            self.0
                .iter()
                .copied()
                .filter(|v| other.0.binary_search(v).is_err())
                .collect(),
        )
    }

    /// Codimension-one faces, in the order obtained by dropping vertex 0, 1, ...
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.0.len()).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }

    /// All subsets, including the empty simplex and `self`.
    pub fn subsets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.0.len();
        assert!(n < usize::BITS as usize, "simplex too large to enumerate subsets");
        (0usize..(1 << n)).map(move |mask| {
            Simplex(
                (0..n)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| self.0[b])
                    .collect(),
            )
        })
    }
}

impl TryFrom<Vec<usize>> for Simplex {
    type Error = HdxError;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<usize> {
    fn from(s: Simplex) -> Self {
        s.0
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Debug, Default)]
struct Level {
    faces: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
    /// Indices into the level below.
    facets: Vec<Vec<usize>>,
    /// Indices into the level above.
    cofaces: Vec<Vec<usize>>,
}

/// A finite simplicial complex with faces `X(-1) ..= X(n)`.
///
/// Complexes built through [`SimplicialComplex::from_top_faces`] are closed
/// and pure by construction. [`SimplicialComplex::from_faces`] keeps an
/// arbitrary face collection as given so that [`validate`] can report what is
/// wrong with it.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    levels: Vec<Level>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.levels.len() == other.levels.len()
            && self
                .levels
                .iter()
                .zip(&other.levels)
                .all(|(a, b)| a.faces == b.faces)
    }
}

impl SimplicialComplex {
    /// Downward closure of a list of equal-size top faces.
    pub fn from_top_faces(tops: &[Simplex]) -> Result<Self> {
        let first = tops.first().ok_or(HdxError::EmptyComplex)?;
        if first.is_empty() {
            return Err(HdxError::EmptyComplex);
        }
        let n = first.dim();
        let mut seen = BTreeSet::new();
        for t in tops {
            if t.dim() != n {
                return Err(HdxError::DimensionMismatch { expected: n, found: t.dim() });
            }
            if !seen.insert(t) {
                return Err(HdxError::DuplicateFace(t.clone()));
            }
        }
        let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); n as usize + 2];
        for t in tops {
            for s in t.subsets() {
                sets[s.len()].insert(s);
            }
        }
        Ok(Self::from_levels(
            sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        ))
    }

    /// Keeps exactly the given faces (plus the empty simplex). The result may
    /// fail closure or purity.
    pub fn from_faces(faces: &[Simplex]) -> Result<Self> {
        let n = faces
            .iter()
            .map(Simplex::dim)
            .max()
            .ok_or(HdxError::EmptyComplex)?;
        if n < 0 {
            return Err(HdxError::EmptyComplex);
        }
        let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); n as usize + 2];
        sets[0].insert(Simplex::empty());
        for f in faces {
            if !sets[f.len()].insert(f.clone()) && !f.is_empty() {
                return Err(HdxError::DuplicateFace(f.clone()));
            }
        }
        Ok(Self::from_levels(
            sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        ))
    }

    /// `levels[k + 1]` must already be sorted and hold only `k`-faces.
    pub(crate) fn from_levels(faces: Vec<Vec<Simplex>>) -> Self {
        let mut levels: Vec<Level> = faces
            .into_iter()
            .map(|faces| {
                let index = faces.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
                Level { faces, index, facets: Vec::new(), cofaces: Vec::new() }
            })
            .collect();
        for l in 0..levels.len() {
            levels[l].cofaces = vec![Vec::new(); levels[l].faces.len()];
        }
        for l in 1..levels.len() {
            let (below, rest) = levels.split_at_mut(l);
            let below = &mut below[l - 1];
            let here = &mut rest[0];
            here.facets = here
                .faces
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let mut ids: Vec<usize> =
                        f.facets().filter_map(|g| below.index.get(&g).copied()).collect();
                    ids.sort_unstable();
                    for &j in &ids {
                        below.cofaces[j].push(i);
                    }
                    ids
                })
                .collect();
        }
        if let Some(l0) = levels.first_mut() {
            l0.facets = vec![Vec::new(); l0.faces.len()];
        }
        SimplicialComplex { levels }
    }

    /// Top dimension `n`.
    pub fn dim(&self) -> usize {
        self.levels.len() - 2
    }

    fn level(&self, k: isize) -> Option<&Level> {
        usize::try_from(k + 1).ok().and_then(|l| self.levels.get(l))
    }

    /// Faces of dimension `k` in canonical order; empty outside `-1..=n`.
    pub fn faces(&self, k: isize) -> &[Simplex] {
        self.level(k).map(|l| l.faces.as_slice()).unwrap_or(&[])
    }

    pub fn num_faces(&self, k: isize) -> usize {
        self.faces(k).len()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.level(s.dim()).and_then(|l| l.index.get(s).copied())
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Indices in `X(k-1)` of the facets of face `i` of `X(k)`.
    pub fn facets_of(&self, k: isize, i: usize) -> &[usize] {
        &self.level(k).expect("dimension in range").facets[i]
    }

    /// Indices in `X(k+1)` of the cofaces of face `i` of `X(k)`.
    pub fn cofaces_of(&self, k: isize, i: usize) -> &[usize] {
        &self.level(k).expect("dimension in range").cofaces[i]
    }

    /// For face `i` of `X(k)`, the indices of all faces containing it, grouped
    /// by dimension: entry `j` lists faces of `X(k + j)`.
    pub fn superfaces(&self, k: isize, i: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![i]];
        let mut dim = k;
        while dim < self.dim() as isize {
            let mut next = BTreeSet::new();
            for &j in out.last().unwrap() {
                next.extend(self.cofaces_of(dim, j).iter().copied());
            }
            out.push(next.into_iter().collect());
            dim += 1;
        }
        out
    }

    /// Faces that have a subset missing from the complex.
    pub fn closure_violations(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for l in &self.levels {
            for f in &l.faces {
                if f.facets().any(|g| !self.contains(&g)) {
                    out.push(f.clone());
                }
            }
        }
        out
    }

    /// Faces not contained in any top face.
    pub fn purity_violations(&self) -> Vec<Simplex> {
        let n = self.dim() as isize;
        let mut covered: Vec<Vec<bool>> =
            self.levels.iter().map(|l| vec![false; l.faces.len()]).collect();
        for top in self.faces(n) {
            for s in top.subsets() {
                if let Some(i) = self.index_of(&s) {
                    covered[s.len()][i] = true;
                }
            }
        }
        self.levels
            .iter()
            .zip(&covered)
            .flat_map(|(l, c)| {
                l.faces.iter().zip(c).filter(|(_, &c)| !c).map(|(f, _)| f.clone())
            })
            .collect()
    }

    /// Number of top faces containing each face, by direct enumeration of
    /// subsets of the top faces.
    pub fn top_coface_counts(&self) -> Vec<Vec<u64>> {
        let n = self.dim() as isize;
        let mut counts: Vec<Vec<u64>> =
            self.levels.iter().map(|l| vec![0; l.faces.len()]).collect();
        for top in self.faces(n) {
            for s in top.subsets() {
                if let Some(i) = self.index_of(&s) {
                    counts[s.len()][i] += 1;
                }
            }
        }
        counts
    }

    /// Vertices of the 1-skeleton and whether it is connected.
    pub fn one_skeleton_connected(&self) -> bool {
        let nv = self.num_faces(0);
        if nv == 0 {
            return true;
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &e in self.cofaces_of(0, v) {
                for &w in self.facets_of(1, e) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Positive face weights, stored per dimension in canonical face order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunction {
    levels: Vec<Vec<f64>>,
}

impl WeightFunction {
    /// `levels[k + 1]` holds the weights of `X(k)`.
    pub fn from_levels(levels: Vec<Vec<f64>>) -> Self {
        WeightFunction { levels }
    }

    /// Extends weights given on `X(n)` downwards by the coface-sum recursion.
    pub fn from_top_weights(x: &SimplicialComplex, top: &[f64]) -> Result<Self> {
        let n = x.dim() as isize;
        if top.len() != x.num_faces(n) {
            return Err(HdxError::CochainLength { k: n, expected: x.num_faces(n), found: top.len() });
        }
        for (f, &w) in x.faces(n).iter().zip(top) {
            if !(w > 0.0 && w.is_finite()) {
                return Err(HdxError::NonPositiveWeight { face: f.clone(), weight: w });
            }
        }
        let mut levels = vec![Vec::new(); x.dim() + 2];
        levels[x.dim() + 1] = top.to_vec();
        for k in (-1..n).rev() {
            let above = &levels[(k + 2) as usize];
            let here: Vec<f64> = (0..x.num_faces(k))
                .map(|i| x.cofaces_of(k, i).iter().map(|&j| above[j]).sum())
                .collect();
            levels[(k + 1) as usize] = here;
        }
        Ok(WeightFunction { levels })
    }

    pub fn level(&self, k: isize) -> &[f64] {
        usize::try_from(k + 1)
            .ok()
            .and_then(|l| self.levels.get(l))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn get(&self, k: isize, i: usize) -> f64 {
        self.level(k)[i]
    }

    pub fn set(&mut self, k: isize, i: usize, value: f64) {
        self.levels[(k + 1) as usize][i] = value;
    }

    /// `m(X(k))`.
    pub fn total(&self, k: isize) -> f64 {
        self.level(k).iter().sum()
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }
}

/// Exact integer weights, used for the homogeneous weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactWeights {
    levels: Vec<Vec<u128>>,
}

impl ExactWeights {
    pub fn level(&self, k: isize) -> &[u128] {
        &self.levels[(k + 1) as usize]
    }

    pub fn to_weight_function(&self) -> WeightFunction {
        WeightFunction {
            levels: self
                .levels
                .iter()
                .map(|l| l.iter().map(|&w| w as f64).collect())
                .collect(),
        }
    }
}

pub(crate) fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, x| acc.checked_mul(x))
}

/// `m_h(τ) = (n-k)! · #{top faces ⊇ τ}` in exact arithmetic.
pub fn homogeneous_weight_exact(x: &SimplicialComplex) -> Result<ExactWeights> {
    let n = x.dim();
    let counts = x.top_coface_counts();
    let mut levels = Vec::with_capacity(n + 2);
    for (l, c) in counts.into_iter().enumerate() {
        let k = l as isize - 1;
        let fact = factorial(n + 1 - l).ok_or(HdxError::Overflow)?;
        let mut row = Vec::with_capacity(c.len());
        for (i, cnt) in c.into_iter().enumerate() {
            if cnt == 0 {
                return Err(HdxError::NotPure(x.faces(k)[i].clone()));
            }
            row.push((cnt as u128).checked_mul(fact).ok_or(HdxError::Overflow)?);
        }
        levels.push(row);
    }
    Ok(ExactWeights { levels })
}

pub fn homogeneous_weight(x: &SimplicialComplex) -> Result<WeightFunction> {
    Ok(homogeneous_weight_exact(x)?.to_weight_function())
}

/// Builds the closure of `top` and extends the top weights by recursion.
pub fn build_from_top_faces(
    top: &[(Vec<usize>, f64)],
) -> Result<(SimplicialComplex, WeightFunction)> {
    if top.is_empty() {
        return Err(HdxError::EmptyComplex);
    }
    let simplices = top
        .iter()
        .map(|(v, _)| Simplex::new(v.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    let n = simplices[0].dim();
    for (s, (_, w)) in simplices.iter().zip(top) {
        if s.dim() != n {
            return Err(HdxError::DimensionMismatch { expected: n, found: s.dim() });
        }
        if !(*w > 0.0 && w.is_finite()) {
            return Err(HdxError::NonPositiveWeight { face: s.clone(), weight: *w });
        }
    }
    let x = SimplicialComplex::from_top_faces(&simplices)?;
    let by_face: HashMap<&Simplex, f64> =
        simplices.iter().zip(top).map(|(s, (_, w))| (s, *w)).collect();
    let top_w: Vec<f64> = x.faces(n).iter().map(|f| by_face[f]).collect();
    let m = WeightFunction::from_top_weights(&x, &top_w)?;
    Ok((x, m))
}

/// A complex together with a weight function of matching shape.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedComplex {
    complex: SimplicialComplex,
    weights: WeightFunction,
}

impl WeightedComplex {
    /// Checks shape and positivity. The recursion itself is checked by
    /// [`validate`].
    pub fn new(complex: SimplicialComplex, weights: WeightFunction) -> Result<Self> {
        if weights.levels.len() != complex.levels.len() {
            return Err(HdxError::DimensionMismatch {
                expected: complex.dim() as isize,
                found: weights.levels.len() as isize - 2,
            });
        }
        for (l, (lv, w)) in complex.levels.iter().zip(&weights.levels).enumerate() {
            if lv.faces.len() != w.len() {
                return Err(HdxError::CochainLength {
                    k: l as isize - 1,
                    expected: lv.faces.len(),
                    found: w.len(),
                });
            }
            for (f, &m) in lv.faces.iter().zip(w) {
                if !(m > 0.0 && m.is_finite()) {
                    return Err(HdxError::NonPositiveWeight { face: f.clone(), weight: m });
                }
            }
        }
        Ok(WeightedComplex { complex, weights })
    }

    pub fn homogeneous(complex: SimplicialComplex) -> Result<Self> {
        let weights = homogeneous_weight(&complex)?;
        Ok(WeightedComplex { complex, weights })
    }

    pub fn from_top_faces(top: &[(Vec<usize>, f64)]) -> Result<Self> {
        let (complex, weights) = build_from_top_faces(top)?;
        Ok(WeightedComplex { complex, weights })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn weights(&self) -> &WeightFunction {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn num_faces(&self, k: isize) -> usize {
        self.complex.num_faces(k)
    }

    pub fn m(&self, k: isize, i: usize) -> f64 {
        self.weights.get(k, i)
    }

    /// Top faces with their weights, in canonical order.
    pub fn top_faces(&self) -> Vec<(Vec<usize>, f64)> {
        let n = self.dim() as isize;
        self.complex
            .faces(n)
            .iter()
            .zip(self.weights.level(n))
            .map(|(f, &w)| (f.vertices().to_vec(), w))
            .collect()
    }

    /// Returns the same weighted complex with every vertex id `v` replaced
    /// by `perm(v)`. Face indices change; weights follow their faces.
    pub fn relabel(&self, perm: impl Fn(usize) -> usize) -> Result<Self> {
        let top: Vec<(Vec<usize>, f64)> = self
            .top_faces()
            .into_iter()
            .map(|(v, w)| (v.into_iter().map(&perm).collect(), w))
            .collect();
        Self::from_top_faces(&top)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelResidual {
    pub k: isize,
    pub max_relative_residual: f64,
    pub worst_face: Option<Simplex>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TotalResidual {
    pub k: isize,
    pub l: isize,
    pub relative_residual: f64,
}

/// Outcome of [`validate`]. All residuals are relative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    /// `m(τ) = Σ_{σ ⊃ τ, σ ∈ X(k+1)} m(σ)` per dimension `k = -1..n-1`.
    pub recursion: Vec<LevelResidual>,
    /// `m(τ) = (n-k)! Σ_{σ ∈ X(n), σ ⊇ τ} m(σ)` per dimension.
    pub top_sum: Vec<LevelResidual>,
    /// `(k+1)! m(X(k)) = (l+1)! m(X(l))` for every `k < l`.
    pub totals: Vec<TotalResidual>,
    pub closure_violations: Vec<Simplex>,
    pub purity_violations: Vec<Simplex>,
    pub nonpositive_weights: Vec<Simplex>,
    pub tolerance: f64,
    pub ok: bool,
}

pub const VALIDATION_TOLERANCE: f64 = 1e-12;

pub(crate) fn relative_residual(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `|a - b| / max(|a|, |b|, floor)`, for identities whose two sides can both
/// vanish while the natural scale (`floor`) does not.
pub(crate) fn scaled_residual(a: f64, b: f64, floor: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(floor.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Report-only check of closure, purity and the weight identities.
pub fn validate(x: &SimplicialComplex, m: &WeightFunction) -> ValidationReport {
    let n = x.dim();
    let shape_ok = m.levels.len() == x.levels.len()
        && m.levels.iter().zip(&x.levels).all(|(w, l)| w.len() == l.faces.len());
    let closure_violations = x.closure_violations();
    let purity_violations = x.purity_violations();
    let mut nonpositive_weights = Vec::new();
    let mut recursion = Vec::new();
    let mut top_sum = Vec::new();
    let mut totals = Vec::new();

    if shape_ok {
        for k in -1..=n as isize {
            for (f, &w) in x.faces(k).iter().zip(m.level(k)) {
                if !(w > 0.0 && w.is_finite()) {
                    nonpositive_weights.push(f.clone());
                }
            }
        }
        for k in -1..n as isize {
            let mut worst = LevelResidual { k, max_relative_residual: 0.0, worst_face: None };
            for i in 0..x.num_faces(k) {
                let s: f64 = x.cofaces_of(k, i).iter().map(|&j| m.get(k + 1, j)).sum();
                let r = relative_residual(m.get(k, i), s);
                if r > worst.max_relative_residual || (r.is_nan() && worst.worst_face.is_none()) {
                    worst.max_relative_residual = r;
                    worst.worst_face = Some(x.faces(k)[i].clone());
                }
            }
            recursion.push(worst);
        }
        let top = n as isize;
        let tops = x.faces(top);
        let mut sums: Vec<Vec<f64>> = x.levels.iter().map(|l| vec![0.0; l.faces.len()]).collect();
        for (t, &w) in tops.iter().zip(m.level(top)) {
            for s in t.subsets() {
                if let Some(i) = x.index_of(&s) {
                    sums[s.len()][i] += w;
                }
            }
        }
        for k in -1..=top {
            let fact = factorial((top - k) as usize).map(|f| f as f64).unwrap_or(f64::INFINITY);
            let mut worst = LevelResidual { k, max_relative_residual: 0.0, worst_face: None };
            for i in 0..x.num_faces(k) {
                let r = relative_residual(m.get(k, i), fact * sums[(k + 1) as usize][i]);
                if r > worst.max_relative_residual {
                    worst.max_relative_residual = r;
                    worst.worst_face = Some(x.faces(k)[i].clone());
                }
            }
            top_sum.push(worst);
        }
        for k in -1..top {
            for l in (k + 1)..=top {
                let lhs = m.total(k);
                let ratio = (k + 2..=l + 1).map(|v| v as f64).product::<f64>();
                totals.push(TotalResidual {
                    k,
                    l,
                    relative_residual: relative_residual(lhs, ratio * m.total(l)),
                });
            }
        }
    }
    let tol = VALIDATION_TOLERANCE;
    let ok = shape_ok
        && closure_violations.is_empty()
        && purity_violations.is_empty()
        && nonpositive_weights.is_empty()
        && recursion.iter().all(|r| r.max_relative_residual <= tol)
        && top_sum.iter().all(|r| r.max_relative_residual <= tol)
        && totals.iter().all(|r| r.relative_residual <= tol);
    ValidationReport {
        n,
        recursion,
        top_sum,
        totals,
        closure_violations,
        purity_violations,
        nonpositive_weights,
        tolerance: tol,
        ok,
    }
}

/// Counts of exact-integer identity failures for a homogeneous weight.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExactIdentityReport {
    /// Failures of `m(τ) = Σ_{σ ∈ X(k+1), σ ⊃ τ} m(σ)`.
    pub recursion_failures: usize,
    /// Failures of `m(τ) = (n-k)! Σ_{σ ∈ X(n), σ ⊇ τ} m(σ)`.
    pub top_sum_failures: usize,
    /// Failures of `m(τ) = (l-k)! Σ_{σ ∈ X(l), σ ⊃ τ} m(σ)` over all `k < l`.
    pub intermediate_sum_failures: usize,
    /// Failures of `(k+1)! m(X(k)) = (l+1)! m(X(l))`.
    pub total_failures: usize,
    pub checked: usize,
}

impl ExactIdentityReport {
    pub fn all_hold(&self) -> bool {
        self.recursion_failures == 0
            && self.top_sum_failures == 0
            && self.intermediate_sum_failures == 0
            && self.total_failures == 0
    }
}

/// Checks the weight identities with exact integer arithmetic.
pub fn check_exact_identities(x: &SimplicialComplex, m: &ExactWeights) -> Result<ExactIdentityReport> {
    let n = x.dim() as isize;
    let mut rep = ExactIdentityReport::default();
    let fact = |j: isize| factorial(j as usize).ok_or(HdxError::Overflow);
    for k in -1..=n {
        for i in 0..x.num_faces(k) {
            let w = m.level(k)[i];
            if k < n {
                let s: u128 = x.cofaces_of(k, i).iter().map(|&j| m.level(k + 1)[j]).sum();
                rep.checked += 1;
                if s != w {
                    rep.recursion_failures += 1;
                }
            }
            let up = x.superfaces(k, i);
            for (j, ids) in up.iter().enumerate().skip(1) {
                let l = k + j as isize;
                let s: u128 = ids.iter().map(|&t| m.level(l)[t]).sum();
                let rhs = s.checked_mul(fact(l - k)?).ok_or(HdxError::Overflow)?;
                rep.checked += 1;
                if rhs != w {
                    if l == n {
                        rep.top_sum_failures += 1;
                    } else {
                        rep.intermediate_sum_failures += 1;
                    }
                }
            }
        }
    }
    for k in -1..n {
        for l in (k + 1)..=n {
            let lhs = m.level(k).iter().sum::<u128>().checked_mul(fact(k + 1)?);
            let rhs = m.level(l).iter().sum::<u128>().checked_mul(fact(l + 1)?);
            rep.checked += 1;
            match (lhs, rhs) {
                (Some(a), Some(b)) if a == b => {}
                (Some(_), Some(_)) => rep.total_failures += 1,
                _ => return Err(HdxError::Overflow),
            }
        }
    }
    Ok(rep)
}

/// The link `X_τ` with its induced weight `m_τ(η) = m(τ ∪ η)`.
#[derive(Clone, Debug)]
pub struct Link {
    base: Simplex,
    inner: WeightedComplex,
    /// `to_parent[l + 1][i]` is the index of `τ ∪ η` in `X(|τ| + l)`.
    to_parent: Vec<Vec<usize>>,
}

impl Link {
    /// Requires `τ ∈ X(k)` with `-1 <= k <= n-1`.
    pub fn new(wc: &WeightedComplex, tau: &Simplex) -> Result<Link> {
        let x = wc.complex();
        let n = x.dim() as isize;
        let idx = x.index_of(tau).ok_or_else(|| HdxError::MissingFace(tau.clone()))?;
        let k = tau.dim();
        if k > n - 1 {
            return Err(HdxError::OutOfRange { what: "link base", k, min: -1, max: n - 1 });
        }
        if tau.is_empty() {
            let to_parent = (-1..=n).map(|d| (0..x.num_faces(d)).collect()).collect();
            return Ok(Link { base: tau.clone(), inner: wc.clone(), to_parent });
        }
        let up = x.superfaces(k, idx);
        let mut faces = Vec::with_capacity(up.len());
        let mut weights = Vec::with_capacity(up.len());
        let mut to_parent = Vec::with_capacity(up.len());
        for (j, ids) in up.iter().enumerate() {
            let d = k + j as isize;
            let mut rows: Vec<(Simplex, usize)> =
                ids.iter().map(|&p| (x.faces(d)[p].difference(tau), p)).collect();
            rows.sort();
            weights.push(rows.iter().map(|&(_, p)| wc.m(d, p)).collect());
            to_parent.push(rows.iter().map(|&(_, p)| p).collect());
            faces.push(rows.into_iter().map(|(s, _)| s).collect());
        }
        let inner = WeightedComplex {
            complex: SimplicialComplex::from_levels(faces),
            weights: WeightFunction::from_levels(weights),
        };
        Ok(Link { base: tau.clone(), inner, to_parent })
    }

    pub fn base(&self) -> &Simplex {
        &self.base
    }

    pub fn complex(&self) -> &WeightedComplex {
        &self.inner
    }

    /// Index in the parent complex of `τ ∪ η` for face `i` of `X_τ(l)`.
    pub fn parent_index(&self, l: isize, i: usize) -> usize {
        self.to_parent[(l + 1) as usize][i]
    }
}
