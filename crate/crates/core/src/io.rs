//! JSON file formats.
//!
//! Reports serialize struct fields in declaration order and maps as
//! `BTreeMap`, so equal inputs give byte-identical output. Floats are written
//! in the shortest form that parses back to the same `f64`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cochain::Cochain;
use crate::complex::{Simplex, WeightedComplex};
use crate::decomposition::DecompositionReport;
use crate::error::{HdxError, Result};
use crate::generators::{GeneratorMetadata, Generated};
use crate::mixing::FaceSet;
use crate::spectra::SpectralProfile;

fn default_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopFace {
    pub vertices: Vec<usize>,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

/// `{"n": int, "top_faces": [{"vertices": [...], "weight": number}, ...]}`
/// with an optional generator `metadata` block. Lower weights always come
/// from the coface-sum recursion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub n: usize,
    pub top_faces: Vec<TopFace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<GeneratorMetadata>,
}

impl ComplexFile {
    pub fn from_complex(wc: &WeightedComplex, metadata: Option<GeneratorMetadata>) -> Self {
        ComplexFile {
            n: wc.dim(),
            top_faces: wc
                .top_faces()
                .into_iter()
                .map(|(vertices, weight)| TopFace { vertices, weight })
                .collect(),
            metadata,
        }
    }

    pub fn from_generated(g: &Generated) -> Self {
        Self::from_complex(&g.complex, Some(g.metadata.clone()))
    }

    pub fn to_complex(&self) -> Result<WeightedComplex> {
        for f in &self.top_faces {
            if f.vertices.len() != self.n + 1 {
                return Err(HdxError::DimensionMismatch {
                    expected: self.n as isize,
                    found: f.vertices.len() as isize - 1,
                });
            }
        }
        let top: Vec<(Vec<usize>, f64)> =
            self.top_faces.iter().map(|f| (f.vertices.clone(), f.weight)).collect();
        WeightedComplex::from_top_faces(&top)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainEntry {
    pub vertices: Vec<usize>,
    pub value: f64,
}

/// `{"k": int, "entries": [{"vertices": [...], "value": number}, ...]}`;
/// unlisted faces are 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainFile {
    pub k: isize,
    pub entries: Vec<CochainEntry>,
}

impl CochainFile {
    pub fn from_cochain(wc: &WeightedComplex, phi: &Cochain) -> Self {
        CochainFile {
            k: phi.k(),
            entries: wc
                .complex()
                .faces(phi.k())
                .iter()
                .zip(phi.values())
                .map(|(f, &value)| CochainEntry { vertices: f.vertices().to_vec(), value })
                .collect(),
        }
    }

    pub fn to_cochain(&self, wc: &WeightedComplex) -> Result<Cochain> {
        let n = wc.dim() as isize;
        if self.k < -1 || self.k > n {
            return Err(HdxError::OutOfRange { what: "cochain", k: self.k, min: -1, max: n });
        }
        let mut values = vec![0.0; wc.num_faces(self.k)];
        let mut seen = BTreeSet::new();
        for e in &self.entries {
            let s = Simplex::new(e.vertices.iter().copied())?;
            if s.dim() != self.k {
                return Err(HdxError::DimensionMismatch { expected: self.k, found: s.dim() });
            }
            let i = wc.complex().index_of(&s).ok_or_else(|| HdxError::MissingFace(s.clone()))?;
            if !seen.insert(i) {
                return Err(HdxError::DuplicateFace(s));
            }
            values[i] = e.value;
        }
        Cochain::new(self.k, values)
    }
}

/// Reads a face set `{"k": int, "faces": [[...], ...]}`.
pub fn parse_face_set(text: &str) -> Result<FaceSet> {
    let raw: FaceSet = serde_json::from_str(text)?;
    FaceSet::new(raw.k, raw.faces)
}

pub fn parse_complex(text: &str) -> Result<WeightedComplex> {
    let file: ComplexFile = serde_json::from_str(text)?;
    file.to_complex()
}

pub fn parse_cochain(text: &str, wc: &WeightedComplex) -> Result<Cochain> {
    let file: CochainFile = serde_json::from_str(text)?;
    file.to_cochain(wc)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Canonical compact JSON of a complex (for digests): top faces in canonical
/// order, no metadata.
pub fn canonical_complex_json(wc: &WeightedComplex) -> Result<String> {
    Ok(serde_json::to_string(&ComplexFile::from_complex(wc, None))?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileLevelJson {
    pub k: usize,
    pub mu_k: f64,
    pub nu_k: f64,
    pub argmax_face: Simplex,
    pub argmin_face: Simplex,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub lambda_one_sided: f64,
    pub lambda_two_sided: f64,
    pub connected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileJson {
    pub n: usize,
    pub levels: Vec<ProfileLevelJson>,
    pub classification: Classification,
    /// Per-face `μ_τ`, `ν_τ` keyed by level, present on request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub faces: Option<BTreeMap<usize, Vec<crate::spectra::FaceSpectrum>>>,
}

impl ProfileJson {
    pub fn new(p: &SpectralProfile, with_faces: bool) -> Self {
        ProfileJson {
            n: p.n,
            levels: p
                .levels
                .iter()
                .map(|l| ProfileLevelJson {
                    k: l.k,
                    mu_k: l.mu_k,
                    nu_k: l.nu_k,
                    argmax_face: l.argmax_face.clone(),
                    argmin_face: l.argmin_face.clone(),
                })
                .collect(),
            classification: Classification {
                lambda_one_sided: p.lambda_one_sided,
                lambda_two_sided: p.lambda_two_sided,
                connected: p.all_links_connected,
            },
            faces: with_faces.then(|| p.levels.iter().map(|l| (l.k, l.faces.clone())).collect()),
        }
    }
}

/// Compact ladder summary of one decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderJson {
    pub k: usize,
    pub levels: Vec<crate::decomposition::LadderLevel>,
    pub identity1_residual: f64,
    pub identity2_residual: f64,
    pub cor64_upper_pass: bool,
    pub cor64_lower_pass: bool,
    /// Upper bound with every `μ_j` taken literally, which may be negative.
    pub cor64_upper_literal_pass: bool,
    pub pass: bool,
}

impl From<&DecompositionReport> for LadderJson {
    fn from(r: &DecompositionReport) -> Self {
        LadderJson {
            k: r.k,
            levels: r.levels.clone(),
            identity1_residual: r.identity1_residual,
            identity2_residual: r.identity2_residual,
            cor64_upper_pass: r.cor64_upper_clamped_pass,
            cor64_lower_pass: r.cor64_lower_pass,
            cor64_upper_literal_pass: r.cor64_upper_pass,
            pass: r.pass,
        }
    }
}
