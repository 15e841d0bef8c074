//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Row-major real data lifted to a complex matrix.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols, "real_matrix: data length mismatch");
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)))
}

/// Row-major `(re, im)` data as a complex matrix.
pub fn complex_matrix(rows: usize, cols: usize, data: &[(f64, f64)]) -> CMatrix {
    assert_eq!(data.len(), rows * cols, "complex_matrix: data length mismatch");
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&(re, im)| C64::new(re, im)))
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&x| C64::new(x, 0.0)),
    ))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// `(m + m*) / 2`
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).unscale(2.0)
}

/// `(m - m*) / 2i`, the Hermitian "imaginary part" of `m`.
pub fn imaginary_part(m: &CMatrix) -> CMatrix {
    (m - m.adjoint()) / (I * 2.0)
}

/// Frobenius norm of `m - m*`.
pub fn asymmetry(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in descending order.
///
/// Only the lower triangle of `m` is read, so callers should symmetrize first
/// if `m` is merely close to Hermitian.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(h: &CMatrix) -> f64 {
    match h.nrows() {
        0 => 0.0,
        1 => h[(0, 0)].re,
        2 => {
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let b = h[(1, 0)].norm();
            0.5 * (a + d) + (0.5 * (a - d)).hypot(b)
        }
        _ => h.clone().symmetric_eigenvalues().max(),
    }
}

/// `(smallest, largest)` eigenvalue of a Hermitian matrix.
pub fn extreme_eigenvalues(h: &CMatrix) -> (f64, f64) {
    match h.nrows() {
        0 => (0.0, 0.0),
        1 => (h[(0, 0)].re, h[(0, 0)].re),
        2 => {
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let r = (0.5 * (a - d)).hypot(h[(1, 0)].norm());
            (0.5 * (a + d) - r, 0.5 * (a + d) + r)
        }
        _ => {
            let values = h.clone().symmetric_eigenvalues();
            (values.min(), values.max())
        }
    }
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    let gram = if m.nrows() <= m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    max_eigenvalue(&gram).max(0.0).sqrt()
}

/// Eigenvalues of a general complex square matrix (complex Schur form).
pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        _ => {
            let (_, t) = m.clone().schur().unpack();
            t.diagonal().iter().copied().collect()
        }
    }
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &CMatrix) -> f64 {
    eigenvalues(m).into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Block-diagonal matrix with `block` repeated `d` times.
pub fn repeat_diagonal(block: &CMatrix, d: usize) -> CMatrix {
    let (r, c) = block.shape();
    let mut out = CMatrix::zeros(d * r, d * c);
    for k in 0..d {
        out.view_mut((k * r, k * c), (r, c)).copy_from(block);
    }
    out
}

/// Maximum entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
