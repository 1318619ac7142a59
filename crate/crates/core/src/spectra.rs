//! Local spectra of links and the quantities derived from them.
//!
//! For a face `τ` whose link has dimension at least one, `μ_τ` and `ν_τ` are
//! the second largest and the smallest eigenvalue of the non-lazy upper walk
//! on the vertices of the link. Aggregating over `τ ∈ X(k-1)` gives `μ_k`
//! (max) and `ν_k` (min).

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::Cochain;
use crate::complex::{scaled_residual, Link, Simplex, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::operators::{
    apply_codifferential, apply_differential, apply_nonlazy_upper, assemble_lower_walk,
    assemble_nonlazy_upper,
};

/// Absolute slack used when comparing a measured quantity against a bound.
pub const BOUND_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkSpectrum {
    pub face: Simplex,
    pub mu: f64,
    pub nu: f64,
    pub connected: bool,
    /// Eigenvalues of the link's non-lazy vertex walk, ascending.
    pub eigenvalues: Vec<f64>,
}

/// Spectrum of `(M')⁺_{τ,0}` on the link of `τ`.
///
/// Connectivity of the link's 1-skeleton is decided by graph search. A
/// disconnected link reports `μ_τ = 1`.
pub fn link_mu_nu(wc: &WeightedComplex, tau: &Simplex) -> Result<LinkSpectrum> {
    let link = Link::new(wc, tau)?;
    let lc = link.complex();
    if lc.dim() < 1 || lc.num_faces(1) == 0 {
        return Err(HdxError::EmptyLink(tau.clone()));
    }
    let walk = assemble_nonlazy_upper(lc, 0)?;
    let eigenvalues = walk.eigenvalues(lc);
    let connected = lc.complex().one_skeleton_connected();
    let len = eigenvalues.len();
    let mu = if connected { eigenvalues[len - 2] } else { 1.0 };
    Ok(LinkSpectrum { face: tau.clone(), mu, nu: eigenvalues[0], connected, eigenvalues })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceSpectrum {
    pub face: Simplex,
    pub mu: f64,
    pub nu: f64,
    pub connected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelProfile {
    pub k: usize,
    pub mu_k: f64,
    pub nu_k: f64,
    /// First face in canonical order attaining `μ_k`.
    pub argmax_face: Simplex,
    /// First face in canonical order attaining `ν_k`.
    pub argmin_face: Simplex,
    pub faces: Vec<FaceSpectrum>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralProfile {
    pub n: usize,
    /// One entry per `k = 0..n-1`, aggregating over `τ ∈ X(k-1)`.
    pub levels: Vec<LevelProfile>,
    pub all_links_connected: bool,
    pub lambda_one_sided: f64,
    pub lambda_two_sided: f64,
}

impl SpectralProfile {
    pub fn mu(&self, k: usize) -> f64 {
        self.levels[k].mu_k
    }

    pub fn nu(&self, k: usize) -> f64 {
        self.levels[k].nu_k
    }

    pub fn is_one_sided(&self, lambda: f64) -> bool {
        lambda >= self.lambda_one_sided
    }

    pub fn is_two_sided(&self, lambda: f64) -> bool {
        lambda >= self.lambda_two_sided
    }
}

/// Computes every link spectrum. Per-link work runs on the rayon pool;
/// results are reduced in canonical face order.
pub fn profile(wc: &WeightedComplex) -> Result<SpectralProfile> {
    let n = wc.dim();
    let mut levels = Vec::with_capacity(n);
    for k in 0..n {
        let faces = wc.complex().faces(k as isize - 1);
        let spectra: Vec<LinkSpectrum> =
            faces.par_iter().map(|tau| link_mu_nu(wc, tau)).collect::<Result<_>>()?;
        let mut imax = 0;
        let mut imin = 0;
        for (i, s) in spectra.iter().enumerate() {
            if s.mu > spectra[imax].mu {
                imax = i;
            }
            if s.nu < spectra[imin].nu {
                imin = i;
            }
        }
        levels.push(LevelProfile {
            k,
            mu_k: spectra[imax].mu,
            nu_k: spectra[imin].nu,
            argmax_face: spectra[imax].face.clone(),
            argmin_face: spectra[imin].face.clone(),
            faces: spectra
                .into_iter()
                .map(|s| FaceSpectrum { face: s.face, mu: s.mu, nu: s.nu, connected: s.connected })
                .collect(),
        });
    }
    let all_links_connected = levels.iter().all(|l| l.faces.iter().all(|f| f.connected));
    let max_mu = levels.iter().map(|l| l.mu_k).fold(f64::NEG_INFINITY, f64::max);
    let min_nu = levels.iter().map(|l| l.nu_k).fold(f64::INFINITY, f64::min);
    let lambda_one_sided = max_mu.max(0.0);
    let lambda_two_sided = lambda_one_sided.max(-min_nu);
    Ok(SpectralProfile { n, levels, all_links_connected, lambda_one_sided, lambda_two_sided })
}

/// Links of every `τ ∈ X(k-1)`, built once and reused across cochains.
#[derive(Clone, Debug)]
pub struct LinkAtlas {
    k: usize,
    links: Vec<Link>,
}

impl LinkAtlas {
    pub fn new(wc: &WeightedComplex, k: usize) -> Result<Self> {
        let n = wc.dim();
        if k >= n {
            return Err(HdxError::OutOfRange {
                what: "link atlas",
                k: k as isize,
                min: 0,
                max: n as isize - 1,
            });
        }
        let links = wc
            .complex()
            .faces(k as isize - 1)
            .par_iter()
            .map(|tau| Link::new(wc, tau))
            .collect::<Result<_>>()?;
        Ok(LinkAtlas { k, links })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// `⟨(M')⁺_{τ,0} (I - M⁻_{τ,0}) φ_τ, φ_τ⟩` for each `τ ∈ X(k-1)`,
    /// matrix-free. On a link, `M⁻_{τ,0}` maps a vertex function to its
    /// weighted mean.
    pub fn correction_terms(&self, phi: &Cochain) -> Result<Vec<f64>> {
        self.check(phi)?;
        self.links
            .iter()
            .map(|link| {
                let lc = link.complex();
                let local = link.localize(phi)?;
                let mean = lc.inner_product(&local, &lc.one(0))? / lc.m(-1, 0);
                let centred = local.add_scaled(-mean, &lc.one(0))?;
                let moved = apply_nonlazy_upper(lc, &centred)?;
                lc.inner_product(&moved, &local)
            })
            .collect()
    }

    /// Same quantity as [`LinkAtlas::correction_terms`], through the dense
    /// matrices of `(M')⁺_{τ,0}` and `M⁻_{τ,0}`.
    pub fn correction_terms_dense(&self, phi: &Cochain) -> Result<Vec<f64>> {
        self.check(phi)?;
        self.links
            .iter()
            .map(|link| {
                let lc = link.complex();
                let local = link.localize(phi)?;
                let v = DVector::from_column_slice(local.values());
                let mp = assemble_nonlazy_upper(lc, 0)?.into_matrix();
                let lower = assemble_lower_walk(lc, 0)?.into_matrix();
                let centred = &v - lower * &v;
                let moved = mp * centred;
                let w = DVector::from_column_slice(lc.weights().level(0));
                Ok(moved.component_mul(&w).dot(&v))
            })
            .collect()
    }

    fn check(&self, phi: &Cochain) -> Result<()> {
        if phi.k() != self.k as isize {
            return Err(HdxError::DimensionMismatch { expected: self.k as isize, found: phi.k() });
        }
        Ok(())
    }
}

/// Correction sum and the identity
/// `‖dφ‖² = ‖d*φ‖² + ‖φ‖² + Σ_τ ⟨(M')⁺_{τ,0}(I - M⁻_{τ,0}) φ_τ, φ_τ⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GarlandReport {
    pub k: usize,
    pub terms: Vec<f64>,
    pub total: f64,
    pub norm_sq: f64,
    pub d_norm_sq: f64,
    pub dstar_norm_sq: f64,
    pub identity_residual: f64,
    /// `(k+1) ν_k ‖φ‖²`.
    pub lower_bound: f64,
    /// `(k+1) max(μ_k, 0) ‖φ‖²`.
    pub upper_bound: f64,
    /// `(k+1) μ_k ‖φ‖²` without clamping; only a valid bound when `μ_k >= 0`.
    pub upper_bound_unclamped: f64,
    pub bounds_hold: bool,
    pub unclamped_upper_holds: bool,
}

pub fn garland_terms(
    wc: &WeightedComplex,
    phi: &Cochain,
    profile: &SpectralProfile,
) -> Result<GarlandReport> {
    let atlas = LinkAtlas::new(wc, phi.k().max(0) as usize)?;
    garland_terms_with(wc, &atlas, phi, profile)
}

pub fn garland_terms_with(
    wc: &WeightedComplex,
    atlas: &LinkAtlas,
    phi: &Cochain,
    profile: &SpectralProfile,
) -> Result<GarlandReport> {
    wc.check_cochain(phi)?;
    let k = atlas.k();
    let ki = k as isize;
    let terms = atlas.correction_terms(phi)?;
    let total: f64 = terms.iter().sum();
    let norm_sq = wc.norm_sq(phi)?;
    let d_norm_sq = wc.norm_sq(&apply_differential(wc, ki, phi)?)?;
    let dstar_norm_sq = wc.norm_sq(&apply_codifferential(wc, ki - 1, phi)?)?;
    let identity_residual = scaled_residual(d_norm_sq, dstar_norm_sq + norm_sq + total, norm_sq);
    let c = (k + 1) as f64;
    let lower_bound = c * profile.nu(k) * norm_sq;
    let upper_bound = c * profile.mu(k).max(0.0) * norm_sq;
    let upper_bound_unclamped = c * profile.mu(k) * norm_sq;
    let slack = BOUND_TOLERANCE * norm_sq.max(1.0);
    Ok(GarlandReport {
        k,
        terms,
        total,
        norm_sq,
        d_norm_sq,
        dstar_norm_sq,
        identity_residual,
        lower_bound,
        upper_bound,
        upper_bound_unclamped,
        bounds_hold: lower_bound - slack <= total && total <= upper_bound + slack,
        unclamped_upper_holds: total <= upper_bound_unclamped + slack,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentStep {
    pub k: usize,
    /// Dimension the bound is derived from (`k+1` for one step, `n-1` for
    /// the iterated form).
    pub from: usize,
    pub mu_k: f64,
    /// `None` when the denominator is not positive (vacuous).
    pub mu_bound: Option<f64>,
    pub mu_pass: bool,
    pub nu_k: f64,
    pub nu_bound: Option<f64>,
    pub nu_pass: bool,
}

/// Sufficient condition on the top links for local spectral expansion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopLinkCriterion {
    /// Smallest `λ` with `μ_{n-1} <= λ/(1+(n-1)λ)`; 0 when `μ_{n-1} <= 0`,
    /// `None` when no `λ` works.
    pub lambda_one_sided: Option<f64>,
    /// Smallest `λ` also satisfying `-λ/(1+(n-1)λ) <= ν_{n-1}`.
    pub lambda_two_sided: Option<f64>,
    /// Whether the measured profile is consistent with the implied `λ`s.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentReport {
    /// False when some link of dimension >= 1 is disconnected.
    pub applicable: bool,
    pub one_step: Vec<DescentStep>,
    pub from_top: Vec<DescentStep>,
    pub top_link: Option<TopLinkCriterion>,
    pub pass: bool,
}

pub const DESCENT_TOLERANCE: f64 = 1e-12;

fn descent_step(k: usize, from: usize, p: &SpectralProfile, steps: f64) -> DescentStep {
    let mu_from = p.mu(from);
    let nu_from = p.nu(from);
    let mu_den = 1.0 - steps * mu_from;
    let nu_den = 1.0 - steps * nu_from;
    let mu_bound = (mu_den > 0.0).then(|| mu_from / mu_den);
    let nu_bound = (nu_den > 0.0).then(|| nu_from / nu_den);
    let mu_k = p.mu(k);
    let nu_k = p.nu(k);
    DescentStep {
        k,
        from,
        mu_k,
        mu_bound,
        mu_pass: mu_bound.is_none_or(|b| mu_k <= b + DESCENT_TOLERANCE),
        nu_k,
        nu_bound,
        nu_pass: nu_bound.is_none_or(|b| nu_k >= b - DESCENT_TOLERANCE),
    }
}

/// `λ` with `a = λ/(1+(n-1)λ)`, i.e. `λ = a/(1-(n-1)a)`.
fn invert_top_condition(a: f64, n: usize) -> Option<f64> {
    if a <= 0.0 {
        return Some(0.0);
    }
    let den = 1.0 - (n as f64 - 1.0) * a;
    (den > 0.0).then(|| a / den).filter(|&l| l <= 1.0)
}

/// Checks one-step and iterated spectral descent, and the top-link criterion.
pub fn check_descent(p: &SpectralProfile) -> DescentReport {
    let n = p.n;
    if !p.all_links_connected {
        return DescentReport {
            applicable: false,
            one_step: Vec::new(),
            from_top: Vec::new(),
            top_link: None,
            pass: true,
        };
    }
    let mut one_step = Vec::new();
    let mut from_top = Vec::new();
    for k in 0..n.saturating_sub(1) {
        one_step.push(descent_step(k, k + 1, p, 1.0));
        from_top.push(descent_step(k, n - 1, p, (n - 1 - k) as f64));
    }
    let top_link = (n >= 2).then(|| {
        let one = invert_top_condition(p.mu(n - 1), n);
        let two = one.and_then(|a| invert_top_condition(-p.nu(n - 1), n).map(|b| a.max(b)));
        let consistent = one.is_none_or(|l| p.lambda_one_sided <= l + DESCENT_TOLERANCE)
            && two.is_none_or(|l| p.lambda_two_sided <= l + DESCENT_TOLERANCE);
        TopLinkCriterion { lambda_one_sided: one, lambda_two_sided: two, consistent }
    });
    let pass = one_step.iter().chain(&from_top).all(|s| s.mu_pass && s.nu_pass)
        && top_link.as_ref().is_none_or(|t| t.consistent);
    DescentReport { applicable: true, one_step, from_top, top_link, pass }
}
