//! Seeded random matrices for property tests and the command line.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, Field};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with independent standard normal entries (complex normal for the
/// complex field).
pub fn gaussian(rng: &mut SeededRng, field: Field, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = match field {
            Field::Real => 0.0,
            Field::Complex => rng.sample(StandardNormal),
        };
        Complex64::new(re, im)
    })
}

/// Haar-distributed unitary (orthogonal for the real field).
pub fn unitary(rng: &mut SeededRng, field: Field, n: usize) -> CMatrix {
    let g = gaussian(rng, field, n, n);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// `U·diag(s)·W` with Haar `U`, `W` and singular values spread
/// log-uniformly so that the condition number is at most `max_cond`.
pub fn well_conditioned(rng: &mut SeededRng, field: Field, n: usize, max_cond: f64) -> CMatrix {
    let u = unitary(rng, field, n);
    let w = unitary(rng, field, n);
    let half = max_cond.max(1.0).ln() / 2.0;
    let s = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-half..=half).exp(), 0.0)
    }));
    u * s * w
}

/// Random real matrix with standard normal entries.
pub fn real_gaussian(rng: &mut SeededRng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random real symmetric positive definite matrix with condition number at
/// most `max_cond`.
pub fn symmetric_positive_definite(rng: &mut SeededRng, n: usize, max_cond: f64) -> DMatrix<f64> {
    let q = crate::linalg::real_part(&unitary(rng, Field::Real, n));
    let half = max_cond.max(1.0).ln() / 2.0;
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        rng.random_range(-half..=half).exp()
    }));
    let s = q.transpose() * d * &q;
    (&s + s.transpose()) * 0.5
}
