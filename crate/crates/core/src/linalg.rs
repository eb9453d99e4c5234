//! Dense complex linear algebra helpers shared by the subspace code.
//!
//! Everything is stored as `DMatrix<Complex64>`; matrices tagged with the real
//! field are decomposed with the real SVD so frames stay real.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type CMatrix = DMatrix<Complex64>;

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }

    /// Field of the smallest type holding both operands.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

/// Singular value decomposition with singular values sorted in decreasing
/// order. `u` is `rows x min(rows, cols)`; `v` is always the full
/// `cols x cols` unitary so null spaces can be read off its trailing columns
/// (`sigma` is padded with zeros up to `cols`).
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(field: Field, m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let keep = rows.min(cols);
    if keep == 0 {
        return Svd {
            u: CMatrix::zeros(rows, 0),
            sigma: vec![0.0; cols],
            v: CMatrix::identity(cols, cols),
        };
    }
    let (u, mut sigma, v) = match field {
        Field::Real => {
            let a = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)].re);
            let s = a.svd().expect("svd converges");
            let lift = |x: faer::MatRef<'_, f64>| CMatrix::from_fn(x.nrows(), x.ncols(), |i, j| Complex64::new(x[(i, j)], 0.0));
            let sigma: Vec<f64> = (0..keep).map(|j| s.S().column_vector()[j]).collect();
            (lift(s.U()), sigma, lift(s.V()))
        }
        Field::Complex => {
            let a = faer::Mat::<Complex64>::from_fn(rows, cols, |i, j| m[(i, j)]);
            let s = a.svd().expect("svd converges");
            let copy = |x: faer::MatRef<'_, Complex64>| CMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)]);
            let sigma: Vec<f64> = (0..keep).map(|j| s.S().column_vector()[j].re).collect();
            (copy(s.U()), sigma, copy(s.V()))
        }
    };
    sigma.resize(cols, 0.0);
    Svd {
        u: u.columns(0, keep).into_owned(),
        sigma,
        v,
    }
}

/// Singular value decomposition of a real symmetric positive definite
/// matrix from its eigendecomposition, so that `u = v` exactly.
pub fn symmetric_svd(m: &CMatrix) -> Svd {
    let n = m.nrows();
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
    let e = a.self_adjoint_eigen(faer::Side::Lower).expect("eigendecomposition converges");
    let values = e.S().column_vector();
    let vectors = e.U();
    // Eigenvalues come in increasing order.
    let v = CMatrix::from_fn(n, n, |i, j| Complex64::new(vectors[(i, n - 1 - j)], 0.0));
    let sigma = (0..n).map(|j| values[n - 1 - j].abs()).collect();
    Svd { u: v.clone(), sigma, v }
}

/// Number of singular values strictly above `rel_tol * sigma_max`.
pub fn numerical_rank(sigma: &[f64], rel_tol: f64) -> usize {
    let max = sigma.first().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Orthonormal basis of the column space at relative rank tolerance.
pub fn orthonormal_basis(field: Field, m: &CMatrix, rel_tol: f64) -> CMatrix {
    let s = svd(field, m);
    let r = numerical_rank(&s.sigma, rel_tol).min(s.u.ncols());
    s.u.columns(0, r).into_owned()
}

/// Orthonormal basis of the dominant `dim`-dimensional column space.
pub fn orthonormal_basis_of_dim(field: Field, m: &CMatrix, dim: usize) -> CMatrix {
    if dim == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let s = svd(field, m);
    s.u.columns(0, dim.min(s.u.ncols())).into_owned()
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let a = faer::Mat::<Complex64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    a.singular_values()
        .expect("svd converges")
        .into_iter()
        .fold(0.0, f64::max)
}

/// Gap between the column spans of two orthonormal frames of one ambient
/// space: the operator norm of the difference of the orthogonal projectors.
pub fn frame_gap(u: &CMatrix, v: &CMatrix) -> f64 {
    if u.ncols() != v.ncols() {
        return 1.0;
    }
    if u.ncols() == 0 {
        return 0.0;
    }
    // For equal dimensions ||P_U - P_V|| = ||(I - P_U) V||.
    let residual = v - u * (u.adjoint() * v);
    spectral_norm(&residual).clamp(0.0, 1.0)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.re)
}

/// Largest imaginary magnitude; zero for matrices of the real field.
pub fn max_imag(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Smallest over largest singular value, or `None` for empty matrices.
pub fn inverse_condition(field: Field, m: &CMatrix) -> Option<f64> {
    let s = svd(field, m);
    let max = *s.sigma.first()?;
    if max == 0.0 {
        return Some(0.0);
    }
    let min = s.sigma[..m.nrows().min(m.ncols())]
        .last()
        .copied()
        .unwrap_or(0.0);
    Some(min / max)
}

/// Block diagonal embedding `[a 0; 0 b]`.
pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Horizontal concatenation of matrices with equal row counts.
pub fn hstack(parts: &[&CMatrix]) -> CMatrix {
    let rows = parts.first().map(|m| m.nrows()).unwrap_or(0);
    let cols = parts.iter().map(|m| m.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for m in parts {
        out.view_mut((0, at), m.shape()).copy_from(m);
        at += m.ncols();
    }
    out
}

/// Vertical concatenation of matrices with equal column counts.
pub fn vstack(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.view_mut((0, 0), top.shape()).copy_from(top);
    out.view_mut((top.nrows(), 0), bottom.shape()).copy_from(bottom);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn svd_of_wide_matrix_has_full_v() {
        let m = CMatrix::from_row_slice(1, 3, &[c(1.0), c(0.0), c(0.0)]);
        let s = svd(Field::Real, &m);
        assert_eq!(s.v.shape(), (3, 3));
        assert_eq!(s.sigma.len(), 3);
        assert!((s.sigma[0] - 1.0).abs() < 1e-15);
        assert_eq!(numerical_rank(&s.sigma, RANK_TOL), 1);
        let null = s.v.columns(1, 2);
        assert!(max_abs(&(m * null)) < 1e-15);
    }

    #[test]
    fn rank_of_proportional_columns() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(1.0), c(2.0)]);
        assert_eq!(orthonormal_basis(Field::Real, &m, RANK_TOL).ncols(), 1);
    }

    #[test]
    fn gap_of_rotated_lines_is_sine() {
        let theta: f64 = 0.3;
        let u = CMatrix::from_column_slice(2, 1, &[c(1.0), c(0.0)]);
        let v = CMatrix::from_column_slice(2, 1, &[c(theta.cos()), c(theta.sin())]);
        assert!((frame_gap(&u, &v) - theta.sin()).abs() < 1e-15);
    }

    #[test]
    fn real_svd_keeps_frames_real() {
        let m = CMatrix::from_row_slice(3, 2, &[c(1.0), c(2.0), c(3.0), c(-1.0), c(0.5), c(4.0)]);
        let basis = orthonormal_basis(Field::Real, &m, RANK_TOL);
        assert_eq!(max_imag(&basis), 0.0);
        let gram = basis.adjoint() * &basis;
        assert!(max_abs(&(gram - CMatrix::identity(2, 2))) < 1e-14);
    }
}
