//! The cochain ladder `φ^k, (φ^{k-1})', φ^{k-1}, ..., φ^0` of a cochain in
//! `C^k_0`, and the two energy identities it satisfies.
//!
//! One step splits `φ` into its part in `ker d*_{k-1}` and its part in
//! `Im d_{k-1}`, solves `d_{k-1} ψ = φ'`, and continues one dimension down
//! with `√(d*d) ψ`. All linear algebra happens in weighted coordinates
//! `x ↦ D^{1/2} x`, where `d*` becomes the plain transpose.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cochain::Cochain;
use crate::complex::{scaled_residual, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::linalg::symmetric_eigen;
use crate::operators::{apply_differential, assemble_differential};
use crate::spectra::{LinkAtlas, SpectralProfile};

/// Singular values of `d` below this fraction of the largest one count as
/// zero.
pub const SINGULAR_CUTOFF: f64 = 1e-11;

/// Eigenvalues of `d*d` below this fraction of the largest one count as
/// zero. Round-off in a symmetric eigensolver is of order `1e-16` relative,
/// so this floor dominates [`SINGULAR_CUTOFF`] in practice.
pub const KERNEL_CUTOFF: f64 = 1e-12;

/// Largest `C^k_0` residual accepted by [`Decomposer::decompose`].
pub const C0_TOLERANCE: f64 = 1e-12;

/// Tolerance for the two ladder identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-8;

/// How `ψ` with `d ψ = φ'` is chosen. The ladder does not depend on the
/// choice since `ker d ⊆ ker √(d*d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PsiSolver {
    /// Minimum-norm solution through the pseudoinverse.
    MinimumNorm,
    /// Minimum-norm solution plus a seeded random element of `ker d`, of
    /// comparable size.
    KernelShifted { seed: u64 },
}

/// Precomputed linear algebra for `d_{i-1} : C^{i-1} → C^i`.
#[derive(Clone, Debug)]
struct LevelPlan {
    sqrt_hi: Vec<f64>,
    sqrt_lo: Vec<f64>,
    a: DMatrix<f64>,
    pinv: DMatrix<f64>,
    kernel: DMatrix<f64>,
    sqrt_op: DMatrix<f64>,
}

impl LevelPlan {
    fn new(wc: &WeightedComplex, i: usize) -> Result<Self> {
        let ii = i as isize;
        let d = assemble_differential(wc, ii - 1)?.into_matrix();
        let sqrt_hi: Vec<f64> = wc.weights().level(ii).iter().map(|w| w.sqrt()).collect();
        let sqrt_lo: Vec<f64> = wc.weights().level(ii - 1).iter().map(|w| w.sqrt()).collect();
        let a = DMatrix::from_fn(d.nrows(), d.ncols(), |r, c| sqrt_hi[r] * d[(r, c)] / sqrt_lo[c]);

        // d*d in weighted coordinates is AᵀA. Its square root, its kernel
        // and the pseudoinverse (AᵀA)⁺Aᵀ all come from one symmetric
        // eigendecomposition and share one cutoff. Eigenvalues at or below
        // the cutoff are exact zeros: the square root would otherwise lift
        // round-off of order 1e-16 to order 1e-8 and leak kernel components
        // of ψ into the ladder.
        //
        // nalgebra's SVD is avoided here: on some wide incidence matrices with
        // clustered singular values it returns factors off by 1e-2.
        let ata = a.transpose() * &a;
        let ata = (&ata + ata.transpose()) * 0.5;
        let sp = symmetric_eigen(ata);
        let top = sp.values.last().copied().unwrap_or(0.0).max(0.0);
        let cut = (SINGULAR_CUTOFF * top.sqrt()).powi(2).max(KERNEL_CUTOFF * top);
        let nlo = sp.values.len();
        let keep: Vec<bool> = sp.values.iter().map(|&v| v > cut).collect();
        let diag = |f: &dyn Fn(f64) -> f64| {
            let d = DVector::from_iterator(nlo, sp.values.iter().zip(&keep).map(|(&v, &k)| if k { f(v) } else { 0.0 }));
            &sp.vectors * DMatrix::from_diagonal(&d) * sp.vectors.transpose()
        };
        let sqrt_op = diag(&f64::sqrt);
        let pinv = diag(&|v| 1.0 / v) * a.transpose();
        let kernel_cols: Vec<usize> = (0..nlo).filter(|&c| !keep[c]).collect();
        let kernel = DMatrix::from_fn(nlo, kernel_cols.len(), |r, c| sp.vectors[(r, kernel_cols[c])]);

        Ok(LevelPlan { sqrt_hi, sqrt_lo, a, pinv, kernel, sqrt_op })
    }

    fn to_weighted(w: &[f64], phi: &Cochain) -> DVector<f64> {
        DVector::from_iterator(w.len(), w.iter().zip(phi.values()).map(|(s, v)| s * v))
    }

    fn from_weighted(w: &[f64], k: isize, x: &DVector<f64>) -> Cochain {
        Cochain::from_raw(k, w.iter().zip(x.iter()).map(|(s, v)| v / s).collect())
    }
}

/// The ladder of a single cochain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionResult {
    pub k: usize,
    pub input: Cochain,
    /// `components[i] = φ^i`.
    pub components: Vec<Cochain>,
    /// `intermediates[i] = (φ^i)'`, with `intermediates[k] = φ`.
    pub intermediates: Vec<Cochain>,
    /// `energies[i] = ‖φ^i‖²`.
    pub energies: Vec<f64>,
    /// `corrections[i] = Σ_{τ ∈ X(i-1)} ⟨(M')⁺_{τ,0}(I - M⁻_{τ,0}) (φ^i)'_τ, (φ^i)'_τ⟩`.
    pub corrections: Vec<f64>,
    /// `‖dφ‖²`, matrix-free.
    pub d_norm_sq: f64,
    /// Worst relative residual of `‖(φ^i)'‖² = Σ_{j ≤ i} ‖φ^j‖²`.
    pub identity1_residual: f64,
    /// Relative residual of
    /// `‖dφ‖² = Σ_i (k+1-i) ‖φ^i‖² + Σ_i corrections[i]`.
    pub identity2_residual: f64,
    /// Worst `|⟨φ^i, (φ^i)' - φ^i⟩| / ‖φ‖²`.
    pub orthogonality_residual: f64,
    /// Worst relative gap between `‖√(d*d) ψ‖` and `‖dψ‖`.
    pub sqrt_norm_residual: f64,
    /// Worst `C_0` residual over all components and intermediates, scaled
    /// by `‖φ‖`.
    pub c0_residual: f64,
}

/// Decomposes cochains of a fixed dimension on a fixed complex. The spectral
/// square roots and link atlases are computed once.
#[derive(Clone, Debug)]
pub struct Decomposer<'a> {
    wc: &'a WeightedComplex,
    k: usize,
    solver: PsiSolver,
    /// `plans[i - 1]` serves level `i`, for `i = 1..=k`.
    plans: Vec<LevelPlan>,
    atlases: Vec<LinkAtlas>,
}

fn check_k(wc: &WeightedComplex, k: usize) -> Result<()> {
    let n = wc.dim();
    if k + 1 > n {
        return Err(HdxError::OutOfRange {
            what: "decomposition",
            k: k as isize,
            min: 0,
            max: n as isize - 1,
        });
    }
    Ok(())
}

impl<'a> Decomposer<'a> {
    pub fn new(wc: &'a WeightedComplex, k: usize, solver: PsiSolver) -> Result<Self> {
        check_k(wc, k)?;
        let plans = (1..=k).map(|i| LevelPlan::new(wc, i)).collect::<Result<_>>()?;
        let atlases = (0..=k).map(|i| LinkAtlas::new(wc, i)).collect::<Result<_>>()?;
        Ok(Decomposer { wc, k, solver, plans, atlases })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn atlas(&self, i: usize) -> &LinkAtlas {
        &self.atlases[i]
    }

    /// [`verify_decomposition`] reusing this decomposer's link atlases.
    pub fn verify(&self, result: &DecompositionResult, profile: &SpectralProfile) -> Result<DecompositionReport> {
        if result.k != self.k {
            return Err(HdxError::DimensionMismatch { expected: self.k as isize, found: result.k as isize });
        }
        verify_with(self.wc, result, profile, &self.atlases)
    }

    /// Ladder of `φ ∈ C^k_0`. Fails with [`HdxError::NotInC0`] when the
    /// `C_0` residual of `φ` exceeds [`C0_TOLERANCE`].
    pub fn decompose(&self, phi: &Cochain) -> Result<DecompositionResult> {
        let wc = self.wc;
        let k = self.k;
        wc.check_cochain(phi)?;
        if phi.k() != k as isize {
            return Err(HdxError::DimensionMismatch { expected: k as isize, found: phi.k() });
        }
        let r0 = wc.c0_residual(phi)?;
        if r0 > C0_TOLERANCE {
            return Err(HdxError::NotInC0(r0));
        }

        let mut components = vec![Cochain::from_raw(0, Vec::new()); k + 1];
        let mut intermediates = components.clone();
        let mut orthogonality_residual: f64 = 0.0;
        let mut sqrt_norm_residual: f64 = 0.0;
        let mut rng = match self.solver {
            PsiSolver::KernelShifted { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            PsiSolver::MinimumNorm => None,
        };

        let norm_sq = wc.norm_sq(phi)?;
        let input_norm = norm_sq.sqrt();
        let mut cur = phi.clone();
        for i in (1..=k).rev() {
            let plan = &self.plans[i - 1];
            let ii = i as isize;
            let x = LevelPlan::to_weighted(&plan.sqrt_hi, &cur);
            let mut psi = &plan.pinv * &x;
            let range = &plan.a * &psi;
            let ker = &x - &range;

            if let Some(rng) = rng.as_mut() {
                if plan.kernel.ncols() > 0 {
                    let z = DVector::from_fn(plan.kernel.ncols(), |_, _| rng.gen_range(-1.0..1.0));
                    let shift = &plan.kernel * z;
                    let scale = psi.norm().max(1.0) / shift.norm().max(f64::MIN_POSITIVE);
                    psi += shift * scale;
                }
            }

            let next = &plan.sqrt_op * &psi;
            let d_psi = (&plan.a * &psi).norm();
            sqrt_norm_residual = sqrt_norm_residual.max(scaled_residual(next.norm(), d_psi, input_norm));
            if norm_sq > 0.0 {
                orthogonality_residual = orthogonality_residual.max(ker.dot(&range).abs() / norm_sq);
            }

            components[i] = LevelPlan::from_weighted(&plan.sqrt_hi, ii, &ker);
            intermediates[i] = cur;
            cur = LevelPlan::from_weighted(&plan.sqrt_lo, ii - 1, &next);
        }
        components[0] = cur.clone();
        intermediates[0] = cur;

        let energies: Vec<f64> =
            components.iter().map(|c| wc.norm_sq(c)).collect::<Result<_>>()?;
        let corrections: Vec<f64> = intermediates
            .iter()
            .zip(&self.atlases)
            .map(|(c, atlas)| Ok(atlas.correction_terms(c)?.iter().sum()))
            .collect::<Result<_>>()?;

        let mut identity1_residual: f64 = 0.0;
        let mut partial = 0.0;
        for i in 0..=k {
            partial += energies[i];
            let lhs = wc.norm_sq(&intermediates[i])?;
            identity1_residual = identity1_residual.max(scaled_residual(lhs, partial, norm_sq));
        }
        let d_norm_sq = wc.norm_sq(&apply_differential(wc, k as isize, phi)?)?;
        let identity2_residual =
        scaled_residual(d_norm_sq, identity2_rhs(k, &energies, &corrections), norm_sq);

        let mut c0_residual: f64 = 0.0;
        for c in components.iter().chain(&intermediates) {
            c0_residual = c0_residual.max(c0_residual_against(wc, c, input_norm)?);
        }

        Ok(DecompositionResult {
            k,
            input: phi.clone(),
            components,
            intermediates,
            energies,
            corrections,
            d_norm_sq,
            identity1_residual,
            identity2_residual,
            orthogonality_residual,
            sqrt_norm_residual,
            c0_residual,
        })
    }
}

/// `|⟨c, 1⟩| / (s ‖1‖)`: the `C_0` residual of a ladder entry measured
/// against the norm `s` of the input rather than its own, which may vanish.
fn c0_residual_against(wc: &WeightedComplex, c: &Cochain, s: f64) -> Result<f64> {
    let one = wc.one(c.k());
    let scale = s * wc.norm(&one)?;
    let dot = wc.inner_product(c, &one)?;
    Ok(if scale == 0.0 { 0.0 } else { dot.abs() / scale })
}

fn identity2_rhs(k: usize, energies: &[f64], corrections: &[f64]) -> f64 {
    let weighted: f64 = energies.iter().enumerate().map(|(i, e)| (k + 1 - i) as f64 * e).sum();
    weighted + corrections.iter().sum::<f64>()
}

/// One-shot ladder with the minimum-norm solver.
pub fn decompose(wc: &WeightedComplex, phi: &Cochain, k: usize) -> Result<DecompositionResult> {
    Decomposer::new(wc, k, PsiSolver::MinimumNorm)?.decompose(phi)
}

/// Largest entrywise gap between two ladders of the same cochain, relative
/// to the largest entry of the input.
pub fn ladder_distance(a: &DecompositionResult, b: &DecompositionResult) -> f64 {
    let scale = a.input.values().iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.components
        .iter()
        .zip(&b.components)
        .chain(a.intermediates.iter().zip(&b.intermediates))
        .map(|(x, y)| x.max_abs_diff(y))
        .fold(0.0, f64::max)
        / scale
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderLevel {
    pub i: usize,
    pub energy: f64,
    pub c0_residual: f64,
}

/// Independent recomputation of a ladder's identities plus the spectral
/// bounds on `‖dφ‖²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub k: usize,
    pub levels: Vec<LadderLevel>,
    pub norm_sq: f64,
    /// `‖dφ‖²` through the assembled incidence matrix.
    pub d_norm_sq: f64,
    /// Correction sums recomputed through dense link operators.
    pub corrections: Vec<f64>,
    pub identity1_residual: f64,
    pub identity2_residual: f64,
    /// `Σ_i (k+1-i + Σ_{j=i}^{k} (j+1) μ_j) ‖φ^i‖²`.
    pub cor64_upper: f64,
    /// Same with every `μ_j` replaced by `max(μ_j, 0)`.
    pub cor64_upper_clamped: f64,
    /// `Σ_i (k+1-i + Σ_{j=i}^{k} (j+1) ν_j) ‖φ^i‖²`.
    pub cor64_lower: f64,
    pub cor64_upper_pass: bool,
    pub cor64_upper_clamped_pass: bool,
    pub cor64_lower_pass: bool,
    /// Every link of dimension at least one is connected.
    pub links_connected: bool,
    pub pass: bool,
}

pub fn verify_decomposition(
    wc: &WeightedComplex,
    result: &DecompositionResult,
    profile: &SpectralProfile,
) -> Result<DecompositionReport> {
    check_k(wc, result.k)?;
    let atlases = (0..=result.k).map(|i| LinkAtlas::new(wc, i)).collect::<Result<Vec<_>>>()?;
    verify_with(wc, result, profile, &atlases)
}

fn verify_with(
    wc: &WeightedComplex,
    result: &DecompositionResult,
    profile: &SpectralProfile,
    atlases: &[LinkAtlas],
) -> Result<DecompositionReport> {
    let k = result.k;
    let phi = &result.input;
    let norm_sq = wc.norm_sq(phi)?;

    let d = assemble_differential(wc, k as isize)?;
    let d_norm_sq = wc.norm_sq(&d.apply(phi)?)?;

    let mut levels = Vec::with_capacity(k + 1);
    let mut energies = Vec::with_capacity(k + 1);
    let mut corrections = Vec::with_capacity(k + 1);
    let mut identity1_residual: f64 = 0.0;
    let mut partial = 0.0;
    for i in 0..=k {
        let comp = &result.components[i];
        let energy = wc.norm_sq(comp)?;
        partial += energy;
        let inter = &result.intermediates[i];
        identity1_residual = identity1_residual.max(scaled_residual(wc.norm_sq(inter)?, partial, norm_sq));
        corrections.push(atlases[i].correction_terms_dense(inter)?.iter().sum::<f64>());
        levels.push(LadderLevel {
            i,
            energy,
            c0_residual: c0_residual_against(wc, comp, norm_sq.sqrt())?
                .max(c0_residual_against(wc, inter, norm_sq.sqrt())?),
        });
        energies.push(energy);
    }
    let identity2_residual =
        scaled_residual(d_norm_sq, identity2_rhs(k, &energies, &corrections), norm_sq);

    let bound = |f: &dyn Fn(usize) -> f64| -> f64 {
        (0..=k)
            .map(|i| {
                let tail: f64 = (i..=k).map(|j| (j + 1) as f64 * f(j)).sum();
                ((k + 1 - i) as f64 + tail) * energies[i]
            })
            .sum()
    };
    let cor64_upper = bound(&|j| profile.mu(j));
    let cor64_upper_clamped = bound(&|j| profile.mu(j).max(0.0));
    let cor64_lower = bound(&|j| profile.nu(j));
    let slack = IDENTITY_TOLERANCE * norm_sq.max(d_norm_sq);
    let cor64_upper_pass = d_norm_sq <= cor64_upper + slack;
    let cor64_upper_clamped_pass = d_norm_sq <= cor64_upper_clamped + slack;
    let cor64_lower_pass = d_norm_sq >= cor64_lower - slack;

    let pass = identity1_residual <= IDENTITY_TOLERANCE
        && identity2_residual <= IDENTITY_TOLERANCE
        && cor64_upper_clamped_pass
        && cor64_lower_pass;
    Ok(DecompositionReport {
        k,
        levels,
        norm_sq,
        d_norm_sq,
        corrections,
        identity1_residual,
        identity2_residual,
        cor64_upper,
        cor64_upper_clamped,
        cor64_lower,
        cor64_upper_pass,
        cor64_upper_clamped_pass,
        cor64_lower_pass,
        links_connected: profile.all_links_connected,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::apply_codifferential;
    use crate::spectra::profile;

    fn tri() -> WeightedComplex {
        WeightedComplex::from_top_faces(&[(vec![0, 1, 2], 1.0)]).unwrap()
    }

    fn k4() -> WeightedComplex {
        WeightedComplex::from_top_faces(&[
            (vec![0, 1, 2], 1.0),
            (vec![0, 1, 3], 1.0),
            (vec![0, 2, 3], 1.0),
            (vec![1, 2, 3], 1.0),
        ])
        .unwrap()
    }

    fn random_c0(wc: &WeightedComplex, k: usize, rng: &mut ChaCha8Rng) -> Cochain {
        wc.project_c0(&Cochain::random(wc, k as isize, rng)).unwrap()
    }

    #[test]
    fn base_case_is_identity() {
        let wc = k4();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = random_c0(&wc, 0, &mut rng);
        let r = decompose(&wc, &phi, 0).unwrap();
        assert_eq!(r.components, vec![phi.clone()]);
        assert_eq!(r.intermediates, vec![phi]);
        assert!(r.identity2_residual < 1e-12);
    }

    #[test]
    fn cocycle_part_stays_on_top() {
        let wc = k4();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi = random_c0(&wc, 1, &mut rng);
        let r = decompose(&wc, &phi, 1).unwrap();
        let top = &r.components[1];
        assert!(wc.norm(&apply_codifferential(&wc, 0, top).unwrap()).unwrap() < 1e-12);
        let r2 = decompose(&wc, top, 1).unwrap();
        assert!(r2.components[1].max_abs_diff(top) < 1e-12);
        assert!(r2.energies[0] < 1e-24);
    }

    #[test]
    fn k4_identities_and_psi_independence() {
        let wc = k4();
        let p = profile(&wc).unwrap();
        let a = Decomposer::new(&wc, 1, PsiSolver::MinimumNorm).unwrap();
        let b = Decomposer::new(&wc, 1, PsiSolver::KernelShifted { seed: 9 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let phi = random_c0(&wc, 1, &mut rng);
            let ra = a.decompose(&phi).unwrap();
            let rb = b.decompose(&phi).unwrap();
            assert!(ra.identity1_residual <= 1e-10);
            assert!(ra.identity2_residual <= 1e-10);
            assert!(ra.orthogonality_residual <= 1e-10);
            assert!(ra.sqrt_norm_residual <= 1e-10);
            assert!(ladder_distance(&ra, &rb) <= 1e-8);
            let rep = verify_decomposition(&wc, &ra, &p).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn kernel_shift_leaves_ladder_unchanged() {
        let wc = crate::suite::stacked_tetrahedra();
        let a = Decomposer::new(&wc, 2, PsiSolver::MinimumNorm).unwrap();
        let b = Decomposer::new(&wc, 2, PsiSolver::KernelShifted { seed: 1 }).unwrap();
        // 12 edges, 10 triangles: d_1 has a kernel
        assert!(a.plans[1].kernel.ncols() >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let phi = random_c0(&wc, 2, &mut rng);
            let ra = a.decompose(&phi).unwrap();
            let rb = b.decompose(&phi).unwrap();
            assert!(ladder_distance(&ra, &rb) <= 1e-12, "{}", ladder_distance(&ra, &rb));
        }
    }

    #[test]
    fn triangle_identity_two() {
        let wc = tri();
        let d = Decomposer::new(&wc, 1, PsiSolver::MinimumNorm).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let r = d.decompose(&random_c0(&wc, 1, &mut rng)).unwrap();
            assert!(r.identity2_residual <= 1e-8, "{r:?}");
        }
    }

    #[test]
    fn rejects_non_c0_and_bad_k() {
        let wc = k4();
        assert!(matches!(decompose(&wc, &wc.one(1), 1), Err(HdxError::NotInC0(_))));
        assert!(decompose(&wc, &wc.one(2), 2).is_err());
    }
}
