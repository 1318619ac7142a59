//! Dense symmetric eigenproblems in the weighted geometry.
//!
//! An operator `M` on `C^k` that is self-adjoint for the weighted inner
//! product becomes the symmetric matrix `S = D^{1/2} M D^{-1/2}` where `D` is
//! the diagonal of face weights. Spectra are computed on `S`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// `D^{1/2} M D^{-1/2}`, with the rounding asymmetry averaged out.
pub fn symmetrize(weights: &[f64], m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = weights.len();
    assert_eq!(m.nrows(), n);
    assert_eq!(m.ncols(), n);
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| sq[i] * m[(i, j)] / sq[j]);
    (&s + s.transpose()) * 0.5
}

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn symmetric_eigen(s: DMatrix<f64>) -> Spectrum {
    let n = s.nrows();
    if n == 0 {
        return Spectrum { values: Vec::new(), vectors: DMatrix::zeros(0, 0) };
    }
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Spectrum { values, vectors }
}

pub fn symmetric_eigenvalues(s: DMatrix<f64>) -> Vec<f64> {
    symmetric_eigen(s).values
}

/// Orthonormal basis of the orthogonal complement of `u`, as the columns of a
/// `n × (n-1)` matrix (a Householder reflection mapping `e_0` to `u/|u|`).
pub fn complement_basis(u: &DVector<f64>) -> DMatrix<f64> {
    let n = u.len();
    let unit = u / u.norm();
    let mut w = unit.clone();
    // reflect e_0 onto unit; pick the sign that avoids cancellation
    let sign = if unit[0] >= 0.0 { 1.0 } else { -1.0 };
    w[0] += sign;
    let wn2 = w.norm_squared();
    let h = DMatrix::<f64>::identity(n, n) - (&w * w.transpose()) * (2.0 / wn2);
    h.columns(1, n - 1).into_owned()
}

/// Eigenvalues (ascending) of symmetric `s` restricted to `u^⊥`, where `u`
/// spans an invariant subspace of `s`.
pub fn eigenvalues_on_complement(s: &DMatrix<f64>, u: &DVector<f64>) -> Vec<f64> {
    if s.nrows() <= 1 {
        return Vec::new();
    }
    let q = complement_basis(u);
    let r = q.transpose() * s * &q;
    symmetric_eigenvalues((&r + r.transpose()) * 0.5)
}

/// Frobenius norm of `a - b` relative to the Frobenius norm of `b`.
pub fn frobenius_relative(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let denom = b.norm();
    let diff = (a - b).norm();
    if denom == 0.0 {
        diff
    } else {
        diff / denom
    }
}
