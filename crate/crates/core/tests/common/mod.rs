//! Reference implementations written straight from the definitions, sharing
//! nothing with the library beyond face enumeration and top-face weights.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use hdx_core::WeightedComplex;

pub struct Oracle {
    pub n: usize,
    /// `faces[k+1]`, vertex lists in library order.
    pub faces: Vec<Vec<Vec<usize>>>,
    /// `weights[k+1]`, from the coface-sum recursion on the top weights.
    pub weights: Vec<Vec<f64>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl Oracle {
    pub fn new(wc: &WeightedComplex) -> Self {
        let n = wc.dim();
        let x = wc.complex();
        let faces: Vec<Vec<Vec<usize>>> = (-1..=n as isize)
            .map(|k| x.faces(k).iter().map(|f| f.vertices().to_vec()).collect())
            .collect();
        let index: Vec<HashMap<Vec<usize>, usize>> = faces
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect())
            .collect();
        let top: HashMap<Vec<usize>, f64> = wc.top_faces().into_iter().collect();
        let mut weights = vec![Vec::new(); n + 2];
        weights[n + 1] = faces[n + 1].iter().map(|f| top[f]).collect();
        for level in (0..=n).rev() {
            let mut w = vec![0.0; faces[level].len()];
            for (s, sigma) in faces[level + 1].iter().enumerate() {
                for drop in 0..sigma.len() {
                    let mut tau = sigma.clone();
                    tau.remove(drop);
                    w[index[level][&tau]] += weights[level + 1][s];
                }
            }
            weights[level] = w;
        }
        Oracle { n, faces, weights, index }
    }

    pub fn faces(&self, k: isize) -> &[Vec<usize>] {
        &self.faces[(k + 1) as usize]
    }

    pub fn w(&self, k: isize) -> &[f64] {
        &self.weights[(k + 1) as usize]
    }

    pub fn idx(&self, k: isize, f: &[usize]) -> Option<usize> {
        self.index.get((k + 1) as usize)?.get(f).copied()
    }

    pub fn inner(&self, k: isize, a: &[f64], b: &[f64]) -> f64 {
        self.w(k).iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum()
    }

    pub fn norm_sq(&self, k: isize, a: &[f64]) -> f64 {
        self.inner(k, a, a)
    }

    pub fn project_c0(&self, k: isize, a: &[f64]) -> Vec<f64> {
        let total: f64 = self.w(k).iter().sum();
        let mean = self.w(k).iter().zip(a).map(|(w, x)| w * x).sum::<f64>() / total;
        a.iter().map(|x| x - mean).collect()
    }

    /// `d_k : C^k → C^{k+1}`, `(dφ)(σ) = Σ_{τ ⊂ σ} φ(τ)`.
    pub fn d(&self, k: isize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.faces(k + 1).len(), self.faces(k).len());
        for (s, sigma) in self.faces(k + 1).iter().enumerate() {
            for drop in 0..sigma.len() {
                let mut tau = sigma.clone();
                tau.remove(drop);
                m[(s, self.idx(k, &tau).unwrap())] = 1.0;
            }
        }
        m
    }

    /// Weighted adjoint of `d_k`: `D_k^{-1} d_kᵀ D_{k+1}`.
    pub fn dstar(&self, k: isize) -> DMatrix<f64> {
        let d = self.d(k);
        let lo = self.w(k);
        let hi = self.w(k + 1);
        DMatrix::from_fn(d.ncols(), d.nrows(), |i, j| d[(j, i)] * hi[j] / lo[i])
    }

    /// Lazy upper walk: stay with probability `1/(k+2)`, otherwise move
    /// through a `(k+1)`-face chosen by weight to one of its other facets.
    pub fn upper(&self, k: usize) -> DMatrix<f64> {
        let ki = k as isize;
        let faces = self.faces(ki);
        let w = self.w(ki);
        let c = (k + 2) as f64;
        DMatrix::from_fn(faces.len(), faces.len(), |i, j| {
            if i == j {
                return 1.0 / c;
            }
            let mut u = faces[i].clone();
            u.extend_from_slice(&faces[j]);
            u.sort_unstable();
            u.dedup();
            match self.idx(ki + 1, &u) {
                Some(s) if u.len() == k + 2 => self.w(ki + 1)[s] / (c * w[i]),
                _ => 0.0,
            }
        })
    }

    /// Lower walk: drop a uniform vertex, then pick a coface of the
    /// remaining face by weight.
    pub fn lower(&self, k: usize) -> DMatrix<f64> {
        let ki = k as isize;
        let faces = self.faces(ki);
        let w = self.w(ki);
        let c = (k + 1) as f64;
        DMatrix::from_fn(faces.len(), faces.len(), |i, j| {
            let mut total = 0.0;
            for drop in 0..faces[i].len() {
                let mut eta = faces[i].clone();
                eta.remove(drop);
                if eta.iter().all(|v| faces[j].contains(v)) {
                    total += w[j] / (c * self.w(ki - 1)[self.idx(ki - 1, &eta).unwrap()]);
                }
            }
            total
        })
    }

    /// `((k+2) M⁺ - I)/(k+1)`.
    pub fn nonlazy(&self, k: usize) -> DMatrix<f64> {
        let up = self.upper(k);
        let id = DMatrix::identity(up.nrows(), up.ncols());
        (up * (k + 2) as f64 - id) / (k + 1) as f64
    }

    /// Spectrum of a weighted self-adjoint operator on `C^k`, descending.
    pub fn spectrum(&self, k: isize, m: &DMatrix<f64>) -> Vec<f64> {
        let w = self.w(k);
        let s = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * w[i].sqrt() / w[j].sqrt());
        let s = (&s + s.transpose()) * 0.5;
        let mut e: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        e
    }

    /// Spectrum on `C^k_0` of an operator fixing constants: the full
    /// spectrum with one copy of the eigenvalue 1 removed.
    pub fn c0_spectrum(&self, k: isize, m: &DMatrix<f64>) -> Vec<f64> {
        let mut e = self.spectrum(k, m);
        let at = e
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 1.0).abs().partial_cmp(&(b.1 - 1.0).abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        assert!((e[at] - 1.0).abs() < 1e-9, "constants are not fixed");
        e.remove(at);
        e
    }

    /// Vertices and edges of the link of `tau ∈ X(k-1)` with link weights.
    fn link(&self, tau: &[usize]) -> (Vec<usize>, Vec<f64>, Vec<(usize, usize, f64)>) {
        let k = tau.len() as isize - 1;
        let with = |extra: &[usize]| {
            let mut f = tau.to_vec();
            f.extend_from_slice(extra);
            f.sort_unstable();
            f
        };
        let verts: Vec<usize> = self.faces(0).iter().map(|f| f[0]).filter(|v| {
            !tau.contains(v) && self.idx(k + 1, &with(&[*v])).is_some()
        }).collect();
        let vw: Vec<f64> = verts.iter().map(|&v| self.w(k + 1)[self.idx(k + 1, &with(&[v])).unwrap()]).collect();
        let mut edges = Vec::new();
        for a in 0..verts.len() {
            for b in a + 1..verts.len() {
                if let Some(s) = self.idx(k + 2, &with(&[verts[a], verts[b]])) {
                    edges.push((a, b, self.w(k + 2)[s]));
                }
            }
        }
        (verts, vw, edges)
    }

    /// `(μ_τ, ν_τ)`: second largest and smallest eigenvalue of the non-lazy
    /// walk on the link graph.
    pub fn link_mu_nu(&self, tau: &[usize]) -> (f64, f64) {
        let (verts, vw, edges) = self.link(tau);
        let mut s = DMatrix::zeros(verts.len(), verts.len());
        for &(a, b, w) in &edges {
            let v = w / (vw[a] * vw[b]).sqrt();
            s[(a, b)] = v;
            s[(b, a)] = v;
        }
        let mut e: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        (e[1], *e.last().unwrap())
    }

    /// `(μ_k, ν_k)` for `k = 0..n-1`.
    pub fn profile(&self) -> Vec<(f64, f64)> {
        (0..self.n)
            .map(|k| {
                self.faces(k as isize - 1)
                    .iter()
                    .map(|t| self.link_mu_nu(t))
                    .fold((f64::NEG_INFINITY, f64::INFINITY), |(m, n), (a, b)| (m.max(a), n.min(b)))
            })
            .collect()
    }

    pub fn lambda_one_sided(&self) -> f64 {
        self.profile().iter().map(|p| p.0).fold(0.0, f64::max)
    }

    /// `Σ_{τ ∈ X(k-1)} ⟨(M')⁺_{τ,0}(I - M⁻_{τ,0}) φ_τ, φ_τ⟩_τ` for
    /// `φ ∈ C^k`. On a link, `M⁻_0` averages against the vertex weights, so
    /// the term is the link edge form evaluated on the centred `φ_τ`.
    pub fn corrections(&self, k: usize, phi: &[f64]) -> f64 {
        let ki = k as isize;
        let mut total = 0.0;
        for tau in self.faces(ki - 1) {
            let (verts, vw, edges) = self.link(tau);
            let vals: Vec<f64> = verts
                .iter()
                .map(|&v| {
                    let mut f = tau.clone();
                    f.push(v);
                    f.sort_unstable();
                    phi[self.idx(ki, &f).unwrap()]
                })
                .collect();
            let mass: f64 = vw.iter().sum();
            let mean = vw.iter().zip(&vals).map(|(w, x)| w * x).sum::<f64>() / mass;
            let c: Vec<f64> = vals.iter().map(|x| x - mean).collect();
            total += edges.iter().map(|&(a, b, w)| 2.0 * w * c[a] * c[b]).sum::<f64>();
        }
        total
    }

    pub fn apply(&self, m: &DMatrix<f64>, phi: &[f64]) -> Vec<f64> {
        (m * DVector::from_column_slice(phi)).as_slice().to_vec()
    }

    /// `‖dφ‖²` straight from the definition.
    pub fn d_norm_sq(&self, k: usize, phi: &[f64]) -> f64 {
        let ki = k as isize;
        self.faces(ki + 1)
            .iter()
            .zip(self.w(ki + 1))
            .map(|(sigma, w)| {
                let s: f64 = (0..sigma.len())
                    .map(|drop| {
                        let mut t = sigma.clone();
                        t.remove(drop);
                        phi[self.idx(ki, &t).unwrap()]
                    })
                    .sum();
                w * s * s
            })
            .sum()
    }
}

pub fn frobenius_rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.norm().max(a.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

pub fn random_values(rng: &mut impl rand::Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// `Π_{i ≤ r} i` as an exact integer.
pub fn factorial(r: usize) -> u128 {
    (1..=r as u128).product()
}
