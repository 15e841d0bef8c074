//! Positive semidefinite contexts and the semi-inner product they induce.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::tolerance::ToleranceConfig;

/// A nonzero positive semidefinite matrix `A` together with the spectral
/// data every `A`-quantity is computed from.
///
/// Eigenvalues below `rank_rtol * lambda_max` are set to exactly zero, and
/// every cached matrix (`A^{1/2}`, `A^+`, `(A^{1/2})^+`, the range projection
/// and `A` itself) is recomposed from that truncated spectrum, so the caches
/// are mutually consistent to rounding. The matrix passed in is kept
/// separately as [`PsdContext::source`].
#[derive(Clone, Debug)]
pub struct PsdContext {
    source: CMatrix,
    a: CMatrix,
    eigvals: Vec<f64>,
    eigvecs: CMatrix,
    rank: usize,
    sqrt_a: CMatrix,
    pinv_a: CMatrix,
    pinv_sqrt_a: CMatrix,
    proj_range: CMatrix,
}

impl PsdContext {
    pub fn new(a: CMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let n = linalg::ensure_square(&a)?;
        if n == 0 {
            return Err(Error::ZeroOperator);
        }
        let asym = linalg::asymmetry(&a);
        if asym > tol.slack(a.norm()) {
            return Err(Error::NotHermitian(asym));
        }
        let (mut eigvals, eigvecs) = linalg::eigh(&linalg::hermitian_part(&a));
        let lmax = eigvals[0];
        let lmin = eigvals[n - 1];
        if lmin < -tol.cmp_atol * lmax.abs().max(1.0) {
            return Err(Error::NotPositive(lmin));
        }
        if lmax <= tol.cmp_atol {
            return Err(Error::ZeroOperator);
        }
        let cutoff = tol.rank_rtol * lmax;
        for v in eigvals.iter_mut() {
            if *v < cutoff {
                *v = 0.0;
            }
        }
        let rank = eigvals.iter().take_while(|&&v| v > 0.0).count();
        Ok(Self::from_spectrum(a, eigvals, eigvecs, rank))
    }

    fn from_spectrum(source: CMatrix, eigvals: Vec<f64>, eigvecs: CMatrix, rank: usize) -> Self {
        let spectral = |f: &dyn Fn(f64) -> f64| -> CMatrix {
            let vr = eigvecs.columns(0, rank);
            let mut scaled = vr.clone_owned();
            for (k, mut col) in scaled.column_iter_mut().enumerate() {
                col *= C64::new(f(eigvals[k]), 0.0);
            }
            scaled * vr.adjoint()
        };
        let a = spectral(&|x| x);
        let sqrt_a = spectral(&f64::sqrt);
        let pinv_a = spectral(&|x| 1.0 / x);
        let pinv_sqrt_a = spectral(&|x| 1.0 / x.sqrt());
        let proj_range = spectral(&|_| 1.0);
        Self { source, a, eigvals, eigvecs, rank, sqrt_a, pinv_a, pinv_sqrt_a, proj_range }
    }

    /// The `d`-fold block-diagonal context `diag(A, ..., A)`.
    ///
    /// Caches are embedded blockwise from `self` rather than recomputed, so the
    /// lifted projection and pseudoinverses are bit-identical to the base ones
    /// on each diagonal tile.
    pub fn lift(&self, d: usize) -> Self {
        assert!(d >= 1, "lift: d must be at least 1");
        let n = self.dim();
        let mut eigvals = Vec::with_capacity(n * d);
        let mut eigvecs = CMatrix::zeros(n * d, n * d);
        for k in 0..n {
            for copy in 0..d {
                let col = k * d + copy;
                eigvals.push(self.eigvals[k]);
                eigvecs.view_mut((copy * n, col), (n, 1)).copy_from(&self.eigvecs.column(k));
            }
        }
        let rep = |m: &CMatrix| linalg::repeat_diagonal(m, d);
        Self {
            source: rep(&self.source),
            a: rep(&self.a),
            eigvals,
            eigvecs,
            rank: self.rank * d,
            sqrt_a: rep(&self.sqrt_a),
            pinv_a: rep(&self.pinv_a),
            pinv_sqrt_a: rep(&self.pinv_sqrt_a),
            proj_range: rep(&self.proj_range),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// The matrix this context was built from, before spectral truncation.
    pub fn source(&self) -> &CMatrix {
        &self.source
    }

    /// `A` recomposed from the truncated spectrum.
    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    /// Truncated eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigvals
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigvecs
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn sqrt_a(&self) -> &CMatrix {
        &self.sqrt_a
    }

    pub fn pinv_a(&self) -> &CMatrix {
        &self.pinv_a
    }

    pub fn pinv_sqrt_a(&self) -> &CMatrix {
        &self.pinv_sqrt_a
    }

    /// Orthogonal projection onto the range of `A`.
    pub fn projection(&self) -> &CMatrix {
        &self.proj_range
    }

    /// Operator norm of `A` (its largest eigenvalue).
    pub fn norm(&self) -> f64 {
        self.eigvals[0]
    }

    /// Orthonormal basis of the range of `A`, as an `n x rank` matrix.
    pub fn range_basis(&self) -> CMatrix {
        self.eigvecs.columns(0, self.rank).clone_owned()
    }

    /// Orthonormal basis of the null space of `A`, as an `n x (n - rank)` matrix.
    pub fn null_basis(&self) -> CMatrix {
        self.eigvecs.columns(self.rank, self.dim() - self.rank).clone_owned()
    }

    fn check_dim(&self, x: &CVector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    /// `<x | y>_A = <Ax, y> = y* A x`.
    pub fn semi_inner(&self, x: &CVector, y: &CVector) -> Result<C64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(y.dotc(&(&self.a * x)))
    }

    pub fn semi_norm(&self, x: &CVector) -> Result<f64> {
        Ok(self.semi_inner(x, x)?.re.max(0.0).sqrt())
    }

    /// Two contexts are the same if they share storage or hold equal `A`.
    pub fn same_as(&self, other: &PsdContext) -> bool {
        std::ptr::eq(self, other) || self.a == other.a
    }
}
