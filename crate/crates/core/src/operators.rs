//! Upper, lower and non-lazy walks, the signless differential and its
//! weighted adjoint.
//!
//! Every operator has a matrix-free `apply_*` form driven by the face
//! incidence lists, and an `assemble_*` form that materializes the dense
//! matrix entry by entry from its definition. The two are kept independent so
//! each can check the other.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cochain::Cochain;
use crate::complex::WeightedComplex;
use crate::error::{HdxError, Result};
use crate::linalg::{frobenius_relative, symmetric_eigenvalues, symmetrize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    UpperWalk,
    LowerWalk,
    NonlazyUpper,
    Differential,
    Codifferential,
}

/// A dense operator between cochain spaces.
///
/// For walks `k` is the dimension they act on. For the differential `d_k`
/// and its adjoint `d*_k`, `k` is the index of `d_k : C^k → C^{k+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    kind: OperatorKind,
    k: isize,
    matrix: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn k(&self) -> isize {
        self.k
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn source_dim(&self) -> isize {
        match self.kind {
            OperatorKind::Codifferential => self.k + 1,
            _ => self.k,
        }
    }

    pub fn target_dim(&self) -> isize {
        match self.kind {
            OperatorKind::Differential => self.k + 1,
            _ => self.k,
        }
    }

    pub fn apply(&self, phi: &Cochain) -> Result<Cochain> {
        if phi.k() != self.source_dim() || phi.len() != self.matrix.ncols() {
            return Err(HdxError::DimensionMismatch { expected: self.source_dim(), found: phi.k() });
        }
        let v = &self.matrix * nalgebra::DVector::from_column_slice(phi.values());
        Ok(Cochain::from_raw(self.target_dim(), v.as_slice().to_vec()))
    }

    /// `max_i |Σ_j M(i, j) - 1|`.
    pub fn row_sum_residual(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Relative asymmetry of `D M` where `D` is the diagonal of weights on
    /// the source dimension. Zero for a weighted self-adjoint operator.
    pub fn self_adjointness_residual(&self, wc: &WeightedComplex) -> f64 {
        let w = wc.weights().level(self.k);
        let dm = DMatrix::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            w[i] * self.matrix[(i, j)]
        });
        frobenius_relative(&dm.transpose(), &dm)
    }

    /// Eigenvalues (ascending) of a square walk operator, computed on its
    /// weighted symmetrization.
    pub fn eigenvalues(&self, wc: &WeightedComplex) -> Vec<f64> {
        symmetric_eigenvalues(symmetrize(wc.weights().level(self.k), &self.matrix))
    }

    /// Row-major CSV with full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in self.matrix.row_iter() {
            let row: Vec<String> = r.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// `index,vertices` legend for the faces of `X(k)`.
pub fn face_legend(wc: &WeightedComplex, k: isize) -> String {
    let mut out = String::from("index,vertices\n");
    for (i, f) in wc.complex().faces(k).iter().enumerate() {
        let vs: Vec<String> = f.vertices().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{i},{}", vs.join(" "));
    }
    out
}

fn check_range(what: &'static str, k: isize, min: isize, max: isize) -> Result<()> {
    if k < min || k > max {
        return Err(HdxError::OutOfRange { what, k, min, max });
    }
    Ok(())
}

/// `M⁺_k`: diagonal `1/(k+2)`, and `m(τ ∪ τ')/((k+2) m(τ))` when `τ ∪ τ'` is
/// a `(k+1)`-face.
pub fn assemble_upper_walk(wc: &WeightedComplex, k: usize) -> Result<OperatorMatrix> {
    let k = k as isize;
    check_range("upper walk", k, 0, wc.dim() as isize - 1)?;
    let x = wc.complex();
    let nf = x.num_faces(k);
    let c = (k + 2) as f64;
    let mut m = DMatrix::zeros(nf, nf);
    for (i, tau) in x.faces(k).iter().enumerate() {
        m[(i, i)] = 1.0 / c;
        for (j, other) in x.faces(k).iter().enumerate() {
            if i == j {
                continue;
            }
            let u = tau.union(other);
            if let Some(s) = x.index_of(&u).filter(|_| u.dim() == k + 1) {
                m[(i, j)] = wc.m(k + 1, s) / (c * wc.m(k, i));
            }
        }
    }
    Ok(OperatorMatrix { kind: OperatorKind::UpperWalk, k, matrix: m })
}

/// `M⁻_k`: diagonal `Σ_{η ⊂ τ} m(τ)/((k+1) m(η))`, and
/// `m(τ')/((k+1) m(τ ∩ τ'))` when `τ ∩ τ'` is a `(k-1)`-face.
pub fn assemble_lower_walk(wc: &WeightedComplex, k: usize) -> Result<OperatorMatrix> {
    let k = k as isize;
    check_range("lower walk", k, 0, wc.dim() as isize)?;
    let x = wc.complex();
    let nf = x.num_faces(k);
    let c = (k + 1) as f64;
    let mut m = DMatrix::zeros(nf, nf);
    for (i, tau) in x.faces(k).iter().enumerate() {
        m[(i, i)] = tau
            .facets()
            .map(|eta| wc.m(k, i) / (c * wc.m(k - 1, x.index_of(&eta).expect("closed complex"))))
            .sum();
        for (j, other) in x.faces(k).iter().enumerate() {
            if i == j {
                continue;
            }
            let cap = tau.difference(&tau.difference(other));
            if cap.dim() == k - 1 {
                let e = x.index_of(&cap).expect("closed complex");
                m[(i, j)] = wc.m(k, j) / (c * wc.m(k - 1, e));
            }
        }
    }
    Ok(OperatorMatrix { kind: OperatorKind::LowerWalk, k, matrix: m })
}

/// `(M')⁺_k = ((k+2)/(k+1)) M⁺_k - (1/(k+1)) I`.
pub fn assemble_nonlazy_upper(wc: &WeightedComplex, k: usize) -> Result<OperatorMatrix> {
    let up = assemble_upper_walk(wc, k)?;
    let kf = k as f64;
    let lazy = 1.0 / (kf + 2.0);
    let nf = up.matrix.nrows();
    let mut m = &up.matrix * ((kf + 2.0) / (kf + 1.0));
    for i in 0..nf {
        m[(i, i)] = if up.matrix[(i, i)] == lazy {
            0.0
        } else {
            m[(i, i)] - 1.0 / (kf + 1.0)
        };
    }
    Ok(OperatorMatrix { kind: OperatorKind::NonlazyUpper, k: k as isize, matrix: m })
}

/// `Δ⁺_k = I - (M')⁺_k`.
pub fn upper_laplacian(wc: &WeightedComplex, k: usize) -> Result<DMatrix<f64>> {
    let mp = assemble_nonlazy_upper(wc, k)?;
    let n = mp.matrix.nrows();
    Ok(DMatrix::identity(n, n) - mp.matrix)
}

/// `d_k : C^k → C^{k+1}`, the 0/1 face-incidence matrix.
pub fn assemble_differential(wc: &WeightedComplex, k: isize) -> Result<OperatorMatrix> {
    check_range("differential", k, -1, wc.dim() as isize - 1)?;
    let x = wc.complex();
    let mut m = DMatrix::zeros(x.num_faces(k + 1), x.num_faces(k));
    for (s, sigma) in x.faces(k + 1).iter().enumerate() {
        for tau in sigma.facets() {
            m[(s, x.index_of(&tau).expect("closed complex"))] = 1.0;
        }
    }
    Ok(OperatorMatrix { kind: OperatorKind::Differential, k, matrix: m })
}

/// `d*_k : C^{k+1} → C^k`, entries `m(σ)/m(τ)` for `τ ⊂ σ`.
pub fn assemble_codifferential(wc: &WeightedComplex, k: isize) -> Result<OperatorMatrix> {
    check_range("codifferential", k, -1, wc.dim() as isize - 1)?;
    let x = wc.complex();
    let mut m = DMatrix::zeros(x.num_faces(k), x.num_faces(k + 1));
    for (s, sigma) in x.faces(k + 1).iter().enumerate() {
        for tau in sigma.facets() {
            let t = x.index_of(&tau).expect("closed complex");
            m[(t, s)] = wc.m(k + 1, s) / wc.m(k, t);
        }
    }
    Ok(OperatorMatrix { kind: OperatorKind::Codifferential, k, matrix: m })
}

fn check_input(wc: &WeightedComplex, phi: &Cochain, k: isize) -> Result<()> {
    wc.check_cochain(phi)?;
    if phi.k() != k {
        return Err(HdxError::DimensionMismatch { expected: k, found: phi.k() });
    }
    Ok(())
}

/// `(d_k φ)(σ) = Σ_{τ ⊂ σ} φ(τ)`.
pub fn apply_differential(wc: &WeightedComplex, k: isize, phi: &Cochain) -> Result<Cochain> {
    check_range("differential", k, -1, wc.dim() as isize - 1)?;
    check_input(wc, phi, k)?;
    let x = wc.complex();
    let v = phi.values();
    let out = (0..x.num_faces(k + 1))
        .map(|s| x.facets_of(k + 1, s).iter().map(|&t| v[t]).sum())
        .collect();
    Ok(Cochain::from_raw(k + 1, out))
}

/// `(d*_k ψ)(τ) = Σ_{σ ⊃ τ} (m(σ)/m(τ)) ψ(σ)` for `ψ ∈ C^{k+1}`.
pub fn apply_codifferential(wc: &WeightedComplex, k: isize, psi: &Cochain) -> Result<Cochain> {
    check_range("codifferential", k, -1, wc.dim() as isize - 1)?;
    check_input(wc, psi, k + 1)?;
    let x = wc.complex();
    let v = psi.values();
    let out = (0..x.num_faces(k))
        .map(|t| {
            x.cofaces_of(k, t).iter().map(|&s| wc.m(k + 1, s) * v[s]).sum::<f64>() / wc.m(k, t)
        })
        .collect();
    Ok(Cochain::from_raw(k, out))
}

/// `M⁺_k φ`, matrix-free.
pub fn apply_upper_walk(wc: &WeightedComplex, phi: &Cochain) -> Result<Cochain> {
    let k = phi.k();
    check_range("upper walk", k, 0, wc.dim() as isize - 1)?;
    wc.check_cochain(phi)?;
    let x = wc.complex();
    let v = phi.values();
    let c = (k + 2) as f64;
    let out = (0..x.num_faces(k))
        .map(|t| {
            let mut acc = v[t] / c;
            for &s in x.cofaces_of(k, t) {
                let w = wc.m(k + 1, s) / (c * wc.m(k, t));
                for &u in x.facets_of(k + 1, s) {
                    if u != t {
                        acc += w * v[u];
                    }
                }
            }
            acc
        })
        .collect();
    Ok(Cochain::from_raw(k, out))
}

/// `M⁻_k φ`, matrix-free.
pub fn apply_lower_walk(wc: &WeightedComplex, phi: &Cochain) -> Result<Cochain> {
    let k = phi.k();
    check_range("lower walk", k, 0, wc.dim() as isize)?;
    wc.check_cochain(phi)?;
    let x = wc.complex();
    let v = phi.values();
    let c = (k + 1) as f64;
    let out = (0..x.num_faces(k))
        .map(|t| {
            let mut acc = 0.0;
            for &e in x.facets_of(k, t) {
                let me = wc.m(k - 1, e);
                for &u in x.cofaces_of(k - 1, e) {
                    acc += wc.m(k, u) / (c * me) * v[u];
                }
            }
            acc
        })
        .collect();
    Ok(Cochain::from_raw(k, out))
}

/// `(M')⁺_k φ`, matrix-free: the lazy step with the holding term removed.
pub fn apply_nonlazy_upper(wc: &WeightedComplex, phi: &Cochain) -> Result<Cochain> {
    let k = phi.k();
    check_range("non-lazy upper walk", k, 0, wc.dim() as isize - 1)?;
    wc.check_cochain(phi)?;
    let x = wc.complex();
    let v = phi.values();
    let c = (k + 1) as f64;
    let out = (0..x.num_faces(k))
        .map(|t| {
            let mut acc = 0.0;
            for &s in x.cofaces_of(k, t) {
                let w = wc.m(k + 1, s) / (c * wc.m(k, t));
                for &u in x.facets_of(k + 1, s) {
                    if u != t {
                        acc += w * v[u];
                    }
                }
            }
            acc
        })
        .collect();
    Ok(Cochain::from_raw(k, out))
}

/// Residuals tying the walks to the differential at one dimension `k`.
/// Entries are `None` where the operator is not defined.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub k: usize,
    /// `‖d*d - (k+2) M⁺‖_F / ‖M⁺‖_F`.
    pub upper: Option<f64>,
    /// `‖dd* - (k+1) M⁻‖_F / ‖M⁻‖_F`.
    pub lower: Option<f64>,
    /// `‖(D_k d*_k)ᵀ - D_{k+1} d_k‖_F / ‖D_{k+1} d_k‖_F`, i.e. `⟨dφ, ψ⟩ = ⟨φ, d*ψ⟩`.
    pub adjointness: Option<f64>,
    pub upper_row_sum: Option<f64>,
    pub lower_row_sum: Option<f64>,
    pub upper_self_adjoint: Option<f64>,
    pub lower_self_adjoint: Option<f64>,
}

impl FactorizationReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.upper,
            self.lower,
            self.adjointness,
            self.upper_row_sum,
            self.lower_row_sum,
            self.upper_self_adjoint,
            self.lower_self_adjoint,
        ]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
    }
}

/// Report-only. Valid for `0 <= k <= n`; the upper-walk entries are `None`
/// at `k = n`.
pub fn verify_factorizations(wc: &WeightedComplex, k: usize) -> Result<FactorizationReport> {
    let n = wc.dim();
    check_range("factorization", k as isize, 0, n as isize)?;
    let ki = k as isize;
    let mut rep = FactorizationReport {
        k,
        upper: None,
        lower: None,
        adjointness: None,
        upper_row_sum: None,
        lower_row_sum: None,
        upper_self_adjoint: None,
        lower_self_adjoint: None,
    };
    if k < n {
        let d = assemble_differential(wc, ki)?;
        let ds = assemble_codifferential(wc, ki)?;
        let up = assemble_upper_walk(wc, k)?;
        let dsd = ds.matrix() * d.matrix();
        rep.upper = Some(frobenius_relative(&dsd, &(up.matrix() * (ki + 2) as f64)));
        rep.upper_row_sum = Some(up.row_sum_residual());
        rep.upper_self_adjoint = Some(up.self_adjointness_residual(wc));

        let w_lo = wc.weights().level(ki);
        let w_hi = wc.weights().level(ki + 1);
        let dd = DMatrix::from_fn(d.matrix.nrows(), d.matrix.ncols(), |i, j| w_hi[i] * d.matrix[(i, j)]);
        let dsw =
            DMatrix::from_fn(ds.matrix.nrows(), ds.matrix.ncols(), |i, j| w_lo[i] * ds.matrix[(i, j)]);
        rep.adjointness = Some(frobenius_relative(&dsw.transpose(), &dd));
    }
    let d = assemble_differential(wc, ki - 1)?;
    let ds = assemble_codifferential(wc, ki - 1)?;
    let lo = assemble_lower_walk(wc, k)?;
    let ddsd = d.matrix() * ds.matrix();
    rep.lower = Some(frobenius_relative(&ddsd, &(lo.matrix() * (ki + 1) as f64)));
    rep.lower_row_sum = Some(lo.row_sum_residual());
    rep.lower_self_adjoint = Some(lo.self_adjointness_residual(wc));
    Ok(rep)
}

/// `‖M⁺φ‖² ≤ (ε/(k+2)) ‖φ‖²` with `ε = ‖dφ‖²/‖φ‖²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DifferentialNormBound {
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub const BOUND_SLACK: f64 = 1e-10;

pub fn bound_from_differential_norm(
    wc: &WeightedComplex,
    phi: &Cochain,
) -> Result<DifferentialNormBound> {
    let k = phi.k();
    check_range("upper walk", k, 0, wc.dim() as isize - 1)?;
    let norm_sq = wc.norm_sq(phi)?;
    if norm_sq == 0.0 {
        return Err(HdxError::ZeroCochain);
    }
    let dphi = apply_differential(wc, k, phi)?;
    let epsilon = wc.norm_sq(&dphi)? / norm_sq;
    let lhs = wc.norm_sq(&apply_upper_walk(wc, phi)?)?;
    let rhs = epsilon / (k + 2) as f64 * norm_sq;
    Ok(DifferentialNormBound { epsilon, lhs, rhs, pass: lhs <= rhs + BOUND_SLACK * norm_sq })
}
