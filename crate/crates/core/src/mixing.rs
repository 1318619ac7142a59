//! Mixing bounds for the upper walks on `C^k_0`, and one-step mixing of
//! indicator cochains of locally thin face sets.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cochain::Cochain;
use crate::complex::{Simplex, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::linalg::{eigenvalues_on_complement, symmetrize};
use crate::operators::{apply_upper_walk, assemble_nonlazy_upper, assemble_upper_walk, OperatorMatrix};
use crate::spectra::{SpectralProfile, BOUND_TOLERANCE};

/// Spectrum (ascending) of a walk restricted to `C^k_0`: the symmetrized
/// operator with the direction of `D^{1/2} 𝟙` deflated.
pub fn spectrum_on_c0(wc: &WeightedComplex, op: &OperatorMatrix) -> Vec<f64> {
    let w = wc.weights().level(op.k());
    let s = symmetrize(w, op.matrix());
    let u = DVector::from_iterator(w.len(), w.iter().map(|x| x.sqrt()));
    eigenvalues_on_complement(&s, &u)
}

/// Extreme eigenvalues of a walk on `C^k_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct C0Extremes {
    pub top: f64,
    pub bottom: f64,
}

/// Largest and smallest eigenvalue on `C^k_0`; `None` when `X(k)` has a
/// single face.
pub fn second_eigenvalue_on_c0(wc: &WeightedComplex, op: &OperatorMatrix) -> Option<C0Extremes> {
    let ev = spectrum_on_c0(wc, op);
    Some(C0Extremes { top: *ev.last()?, bottom: ev[0] })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// Second eigenvalue of `M⁺_k` against `(k+1)/(k+2) + (k+1)λ`, one-sided `λ`.
    LazyUpper,
    /// Spectral radius of `(M')⁺_k` on `C^k_0` against `k/(k+1) + (k+1)λ`,
    /// two-sided `λ`.
    NonlazyTwoSided,
    /// Spectral radius of `(M')⁺_k` against
    /// `max{k/(k+1) + (k+1)λ, 2(k+1)/(2(n-k-1)-1)}`, one-sided `λ`. Advisory.
    NonlazyOneSided,
    /// `‖M⁺χ_A‖/‖χ_A‖` against `1/√(k+2) + √(F(A)+λ)`.
    BinaryThin,
}

impl TheoremId {
    pub const ALL: [TheoremId; 4] = [
        TheoremId::LazyUpper,
        TheoremId::NonlazyTwoSided,
        TheoremId::NonlazyOneSided,
        TheoremId::BinaryThin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::LazyUpper => "lazy-upper",
            TheoremId::NonlazyTwoSided => "nonlazy-two-sided",
            TheoremId::NonlazyOneSided => "nonlazy-one-sided",
            TheoremId::BinaryThin => "binary-thin",
        }
    }

    /// Short numeric aliases accepted on the command line.
    const ALIASES: [(&'static str, TheoremId); 4] = [
        ("6.5.1", TheoremId::LazyUpper),
        ("6.5.2", TheoremId::NonlazyTwoSided),
        ("6.6", TheoremId::NonlazyOneSided),
        ("7.3", TheoremId::BinaryThin),
    ];
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = HdxError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .or_else(|| TheoremId::ALIASES.iter().find(|(a, _)| *a == s).map(|(_, t)| *t))
            .ok_or_else(|| HdxError::InvalidParameters(format!("unknown theorem id `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingEntry {
    pub theorem_id: TheoremId,
    pub k: usize,
    /// Second eigenvalue of `M⁺_k`, spectral radius of `(M')⁺_k`, or the
    /// ratio `‖M⁺χ_A‖/‖χ_A‖`, all on `C^k_0` where applicable.
    pub achieved: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub advisory: bool,
    pub lambda: f64,
    /// Largest eigenvalue on `C^k_0` (non-lazy entries).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top: Option<f64>,
    /// Smallest eigenvalue on `C^k_0` (non-lazy entries).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bottom: Option<f64>,
    /// `-(k+1)λ`, the lower estimate for the two-sided non-lazy case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    /// `F(A)` for the binary entries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thinness: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaSource {
    Measured,
    Override,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    pub lambda_one_sided: f64,
    pub lambda_two_sided: f64,
    pub lambda_source: LambdaSource,
    pub entries: Vec<MixingEntry>,
    /// All non-advisory entries pass.
    pub pass: bool,
    /// Advisory entries that fail.
    pub advisory_violations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingOptions {
    pub theorems: Vec<TheoremId>,
    /// Replaces both measured `λ`s.
    pub lambda_override: Option<f64>,
    /// Face set for the binary bound; the binary bound is skipped without it.
    pub face_set: Option<FaceSet>,
}

impl Default for MixingOptions {
    fn default() -> Self {
        MixingOptions {
            theorems: vec![TheoremId::LazyUpper, TheoremId::NonlazyTwoSided, TheoremId::NonlazyOneSided],
            lambda_override: None,
            face_set: None,
        }
    }
}

fn entry(theorem_id: TheoremId, k: usize, achieved: f64, bound: f64, lambda: f64) -> MixingEntry {
    MixingEntry {
        theorem_id,
        k,
        achieved,
        bound,
        margin: bound - achieved,
        pass: achieved <= bound + BOUND_TOLERANCE,
        advisory: false,
        lambda,
        top: None,
        bottom: None,
        lower_bound: None,
        thinness: None,
    }
}

/// Entries for one `k`, in [`TheoremId`] order.
fn entries_for_k(
    wc: &WeightedComplex,
    k: usize,
    theorems: &BTreeSet<TheoremId>,
    lam_one: f64,
    lam_two: f64,
) -> Result<Vec<MixingEntry>> {
    let n = wc.dim();
    let kf = k as f64;
    let mut out = Vec::new();
    if wc.num_faces(k as isize) < 2 {
        return Ok(out);
    }
    if theorems.contains(&TheoremId::LazyUpper) {
        let up = assemble_upper_walk(wc, k)?;
        let ex = second_eigenvalue_on_c0(wc, &up).expect("at least two faces");
        let bound = (kf + 1.0) / (kf + 2.0) + (kf + 1.0) * lam_one;
        out.push(entry(TheoremId::LazyUpper, k, ex.top, bound, lam_one));
    }
    let two = theorems.contains(&TheoremId::NonlazyTwoSided);
    let one = theorems.contains(&TheoremId::NonlazyOneSided);
    if two || one {
        let mp = assemble_nonlazy_upper(wc, k)?;
        let ex = second_eigenvalue_on_c0(wc, &mp).expect("at least two faces");
        let radius = ex.top.abs().max(ex.bottom.abs());
        if two {
            let bound = kf / (kf + 1.0) + (kf + 1.0) * lam_two;
            let lower = -(kf + 1.0) * lam_two;
            let mut e = entry(TheoremId::NonlazyTwoSided, k, radius, bound, lam_two);
            e.pass = e.pass && ex.bottom >= lower - BOUND_TOLERANCE;
            e.top = Some(ex.top);
            e.bottom = Some(ex.bottom);
            e.lower_bound = Some(lower);
            out.push(e);
        }
        let den = 2.0 * (n as f64 - kf - 1.0) - 1.0;
        if one && den > 0.0 {
            let bound = (kf / (kf + 1.0) + (kf + 1.0) * lam_one).max(2.0 * (kf + 1.0) / den);
            let mut e = entry(TheoremId::NonlazyOneSided, k, radius, bound, lam_one);
            e.advisory = true;
            e.top = Some(ex.top);
            e.bottom = Some(ex.bottom);
            out.push(e);
        }
    }
    Ok(out)
}

/// Compares achieved walk spectra on `C^k_0` with every requested bound,
/// for each `k = 0..n-1`. `λ` is the measured one from `profile` unless
/// overridden.
pub fn check_mixing_bounds(
    wc: &WeightedComplex,
    profile: &SpectralProfile,
    options: &MixingOptions,
) -> Result<MixingReport> {
    let (lam_one, lam_two, lambda_source) = match options.lambda_override {
        Some(l) => {
            if !(0.0..=1.0).contains(&l) {
                return Err(HdxError::InvalidParameters(format!("lambda {l} outside [0, 1]")));
            }
            (l, l, LambdaSource::Override)
        }
        None => (profile.lambda_one_sided, profile.lambda_two_sided, LambdaSource::Measured),
    };
    let theorems: BTreeSet<TheoremId> = options.theorems.iter().copied().collect();
    let per_k: Vec<Vec<MixingEntry>> = (0..wc.dim())
        .into_par_iter()
        .map(|k| entries_for_k(wc, k, &theorems, lam_one, lam_two))
        .collect::<Result<_>>()?;
    let mut entries: Vec<MixingEntry> = per_k.into_iter().flatten().collect();
    if theorems.contains(&TheoremId::BinaryThin) {
        if let Some(a) = &options.face_set {
            let b = check_binary_mixing(wc, a, lam_one)?;
            let mut e = entry(TheoremId::BinaryThin, b.k, b.achieved, b.bound, lam_one);
            e.pass = b.pass;
            e.thinness = Some(b.thinness);
            entries.push(e);
        }
    }
    entries.sort_by_key(|e| (e.theorem_id, e.k));
    let pass = entries.iter().filter(|e| !e.advisory).all(|e| e.pass);
    let advisory_violations = entries.iter().filter(|e| e.advisory && !e.pass).count();
    Ok(MixingReport {
        lambda_one_sided: lam_one,
        lambda_two_sided: lam_two,
        lambda_source,
        entries,
        pass,
        advisory_violations,
    })
}

/// A set of `k`-faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceSet {
    pub k: isize,
    pub faces: Vec<Simplex>,
}

impl FaceSet {
    pub fn new(k: isize, faces: Vec<Simplex>) -> Result<Self> {
        let fs = FaceSet { k, faces };
        fs.check_shape()?;
        Ok(fs)
    }

    fn check_shape(&self) -> Result<()> {
        if self.faces.is_empty() {
            return Err(HdxError::EmptyFaceSet);
        }
        let mut seen = BTreeSet::new();
        for f in &self.faces {
            if f.dim() != self.k {
                return Err(HdxError::DimensionMismatch { expected: self.k, found: f.dim() });
            }
            if !seen.insert(f) {
                return Err(HdxError::DuplicateFace(f.clone()));
            }
        }
        Ok(())
    }

    /// Face indices in `X(k)`, sorted.
    pub fn indices(&self, wc: &WeightedComplex) -> Result<Vec<usize>> {
        self.check_shape()?;
        if self.k < 0 || self.k > wc.dim() as isize {
            return Err(HdxError::OutOfRange {
                what: "face set",
                k: self.k,
                min: 0,
                max: wc.dim() as isize,
            });
        }
        let mut idx = self
            .faces
            .iter()
            .map(|f| wc.complex().index_of(f).ok_or_else(|| HdxError::MissingFace(f.clone())))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        Ok(idx)
    }

    pub fn indicator(&self, wc: &WeightedComplex) -> Result<Cochain> {
        Ok(Cochain::indicator(wc, self.k, &self.indices(wc)?))
    }
}

/// `F(A) = max_{τ ∈ A} (1/(k+1)) Σ_{η ⊂ τ} (1/m(η)) Σ_{τ' ∈ A, η ⊂ τ'} m(τ')`,
/// with `η` ranging over `X(k-1)`.
pub fn local_thinness(wc: &WeightedComplex, a: &FaceSet) -> Result<f64> {
    let idx = a.indices(wc)?;
    let k = a.k;
    let x = wc.complex();
    // weight of A through each (k-1)-face
    let mut through = vec![0.0; x.num_faces(k - 1)];
    for &t in &idx {
        for &e in x.facets_of(k, t) {
            through[e] += wc.m(k, t);
        }
    }
    let c = (k + 1) as f64;
    Ok(idx
        .iter()
        .map(|&t| x.facets_of(k, t).iter().map(|&e| through[e] / wc.m(k - 1, e)).sum::<f64>() / c)
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BinaryMixing {
    pub k: usize,
    pub thinness: f64,
    pub lambda: f64,
    /// `‖M⁺χ_A‖ / ‖χ_A‖`.
    pub achieved: f64,
    /// `1/√(k+2) + √(F(A) + λ)`.
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

/// One step of the lazy upper walk applied to the indicator of `A`.
pub fn check_binary_mixing(wc: &WeightedComplex, a: &FaceSet, lambda: f64) -> Result<BinaryMixing> {
    let n = wc.dim() as isize;
    if a.k < 0 || a.k > n - 1 {
        return Err(HdxError::OutOfRange { what: "binary mixing", k: a.k, min: 0, max: n - 1 });
    }
    let thinness = local_thinness(wc, a)?;
    let chi = a.indicator(wc)?;
    let achieved = wc.norm(&apply_upper_walk(wc, &chi)?)? / wc.norm(&chi)?;
    let bound = 1.0 / ((a.k + 2) as f64).sqrt() + (thinness + lambda).sqrt();
    Ok(BinaryMixing {
        k: a.k as usize,
        thinness,
        lambda,
        achieved,
        bound,
        margin: bound - achieved,
        pass: achieved <= bound + BOUND_TOLERANCE,
    })
}
