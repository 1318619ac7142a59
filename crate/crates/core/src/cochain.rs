//! Non-oriented cochains with the weighted inner product, the constant
//! complement `C^k_0` and localization to links.

use rand::Rng;
use serde::Serialize;

use crate::complex::{relative_residual, scaled_residual, Link, Simplex, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::operators::{apply_codifferential, apply_differential};

/// A real function on `X(k)`, indexed by the canonical face order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cochain {
    k: isize,
    values: Vec<f64>,
}

impl Cochain {
    pub fn new(k: isize, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(HdxError::NonFiniteValue(i));
        }
        Ok(Cochain { k, values })
    }

    pub(crate) fn from_raw(k: isize, values: Vec<f64>) -> Self {
        Cochain { k, values }
    }

    pub fn zeros(wc: &WeightedComplex, k: isize) -> Self {
        Cochain { k, values: vec![0.0; wc.num_faces(k)] }
    }

    pub fn constant(wc: &WeightedComplex, k: isize, c: f64) -> Self {
        Cochain { k, values: vec![c; wc.num_faces(k)] }
    }

    /// `χ_A` for a set of face indices of `X(k)`.
    pub fn indicator(wc: &WeightedComplex, k: isize, faces: &[usize]) -> Self {
        let mut c = Self::zeros(wc, k);
        for &i in faces {
            c.values[i] = 1.0;
        }
        c
    }

    pub fn from_fn(wc: &WeightedComplex, k: isize, f: impl Fn(&Simplex) -> f64) -> Self {
        Cochain { k, values: wc.complex().faces(k).iter().map(f).collect() }
    }

    /// Entries drawn independently and uniformly from `[-1, 1)`.
    pub fn random<R: Rng + ?Sized>(wc: &WeightedComplex, k: isize, rng: &mut R) -> Self {
        Cochain {
            k,
            values: (0..wc.num_faces(k)).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    pub fn k(&self) -> isize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, a: f64) -> Cochain {
        Cochain { k: self.k, values: self.values.iter().map(|v| a * v).collect() }
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: f64, other: &Cochain) -> Result<Cochain> {
        if self.k != other.k || self.len() != other.len() {
            return Err(HdxError::DimensionMismatch { expected: self.k, found: other.k });
        }
        Ok(Cochain {
            k: self.k,
            values: self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect(),
        })
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add_scaled(-1.0, other)
    }

    pub fn max_abs_diff(&self, other: &Cochain) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl WeightedComplex {
    pub(crate) fn check_cochain(&self, phi: &Cochain) -> Result<()> {
        let n = self.dim() as isize;
        if phi.k < -1 || phi.k > n {
            return Err(HdxError::OutOfRange { what: "cochain", k: phi.k, min: -1, max: n });
        }
        let expected = self.num_faces(phi.k);
        if phi.len() != expected {
            return Err(HdxError::CochainLength { k: phi.k, expected, found: phi.len() });
        }
        Ok(())
    }

    /// `⟨φ, ψ⟩ = Σ_σ m(σ) φ(σ) ψ(σ)`.
    pub fn inner_product(&self, phi: &Cochain, psi: &Cochain) -> Result<f64> {
        self.check_cochain(phi)?;
        self.check_cochain(psi)?;
        if phi.k != psi.k {
            return Err(HdxError::DimensionMismatch { expected: phi.k, found: psi.k });
        }
        Ok(self
            .weights()
            .level(phi.k)
            .iter()
            .zip(phi.values.iter().zip(&psi.values))
            .map(|(m, (a, b))| m * a * b)
            .sum())
    }

    pub fn norm_sq(&self, phi: &Cochain) -> Result<f64> {
        self.inner_product(phi, phi)
    }

    pub fn norm(&self, phi: &Cochain) -> Result<f64> {
        Ok(self.norm_sq(phi)?.sqrt())
    }

    pub fn one(&self, k: isize) -> Cochain {
        Cochain::constant(self, k, 1.0)
    }

    /// `|⟨φ, 1⟩| / (‖φ‖ ‖1‖)`; zero for the zero cochain.
    pub fn c0_residual(&self, phi: &Cochain) -> Result<f64> {
        let one = self.one(phi.k);
        let dot = self.inner_product(phi, &one)?;
        let scale = self.norm(phi)? * self.norm(&one)?;
        Ok(if scale == 0.0 { 0.0 } else { dot.abs() / scale })
    }

    /// Weighted-orthogonal projection onto `C^k_0`.
    pub fn project_c0(&self, phi: &Cochain) -> Result<Cochain> {
        let one = self.one(phi.k);
        let coef = self.inner_product(phi, &one)? / self.weights().total(phi.k);
        phi.add_scaled(-coef, &one)
    }

    /// `φ_τ(η) = φ(τ ∪ η)` on the link of `τ`.
    pub fn localize(&self, phi: &Cochain, tau: &Simplex) -> Result<Cochain> {
        self.check_cochain(phi)?;
        let link = Link::new(self, tau)?;
        link.localize(phi)
    }
}

impl Link {
    /// Localization of a cochain of the parent complex onto this link.
    pub fn localize(&self, phi: &Cochain) -> Result<Cochain> {
        let k = self.base().dim();
        if k >= phi.k {
            return Err(HdxError::OutOfRange {
                what: "localization base",
                k,
                min: -1,
                max: phi.k - 1,
            });
        }
        let l = phi.k - k - 1;
        let values = (0..self.complex().num_faces(l))
            .map(|i| phi.values[self.parent_index(l, i)])
            .collect();
        Ok(Cochain { k: l, values })
    }
}

/// Relative residuals of the three localization identities for `φ ∈ C^l`
/// localized at `X(k)`:
///
/// * `C(l+1, k+1) ‖φ‖² = Σ_{τ ∈ X(k)} ‖φ_τ‖²`
/// * `C(l, k+1) ‖d*φ‖² = Σ_{τ ∈ X(k)} ‖d*_τ φ_τ‖²`
/// * `‖dφ‖² = Σ_{τ ∈ X(l-1)} (‖d_τ φ_τ‖² - l/(l+1) ‖φ_τ‖²)`, only for `l < n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalizationResiduals {
    pub norm: f64,
    pub codifferential: f64,
    /// `None` when `l = n`.
    pub differential: Option<f64>,
}

impl LocalizationResiduals {
    pub fn max(&self) -> f64 {
        self.norm.max(self.codifferential).max(self.differential.unwrap_or(0.0))
    }
}

fn binomial(n: isize, r: isize) -> f64 {
    if r < 0 || r > n {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn check_localization_identities(
    wc: &WeightedComplex,
    phi: &Cochain,
    k: isize,
) -> Result<LocalizationResiduals> {
    wc.check_cochain(phi)?;
    let n = wc.dim() as isize;
    let l = phi.k;
    if k < -1 || k >= l {
        return Err(HdxError::OutOfRange { what: "localization dimension", k, min: -1, max: l - 1 });
    }
    let x = wc.complex();

    let mut loc_norm = 0.0;
    let mut loc_codiff = 0.0;
    for tau in x.faces(k) {
        let link = Link::new(wc, tau)?;
        let lc = link.complex();
        let pt = link.localize(phi)?;
        loc_norm += lc.norm_sq(&pt)?;
        let dstar = apply_codifferential(lc, pt.k - 1, &pt)?;
        loc_codiff += lc.norm_sq(&dstar)?;
    }
    let norm = relative_residual(binomial(l + 1, k + 1) * wc.norm_sq(phi)?, loc_norm);
    let dstar = apply_codifferential(wc, l - 1, phi)?;
    let codifferential = relative_residual(binomial(l, k + 1) * wc.norm_sq(&dstar)?, loc_codiff);

    let differential = if l < n {
        let mut sum = 0.0;
        for tau in x.faces(l - 1) {
            let link = Link::new(wc, tau)?;
            let lc = link.complex();
            let pt = link.localize(phi)?;
            let dp = apply_differential(lc, 0, &pt)?;
            sum += lc.norm_sq(&dp)? - (l as f64 / (l + 1) as f64) * lc.norm_sq(&pt)?;
        }
        let dphi = apply_differential(wc, l, phi)?;
        Some(scaled_residual(wc.norm_sq(&dphi)?, sum, wc.norm_sq(phi)?))
    } else {
        None
    };
    Ok(LocalizationResiduals { norm, codifferential, differential })
}
