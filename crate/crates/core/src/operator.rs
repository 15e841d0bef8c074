//! Operators interpreted against a positive context: membership in `B_A`
//! and `B_{A^{1/2}}`, the `A`-adjoint, the reduction map and the `A`-seminorm.

use std::sync::Arc;

use crate::context::PsdContext;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::tolerance::ToleranceConfig;

/// A dense square matrix `T` acting on a semi-Hilbertian space `(C^n, <.|.>_A)`.
#[derive(Clone, Debug)]
pub struct Operator {
    t: CMatrix,
    ctx: Arc<PsdContext>,
}

/// Result of an `A`-seminorm query.
///
/// When the operator is not `A`-bounded the supremum is infinite; `value` is
/// then `f64::INFINITY` and `a_bounded` is false.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Seminorm {
    pub value: f64,
    pub a_bounded: bool,
}

impl Seminorm {
    /// The finite value, or `NotABounded` carrying the membership residual.
    pub fn finite(self, residual: f64) -> Result<f64> {
        if self.a_bounded {
            Ok(self.value)
        } else {
            Err(Error::NotABounded(residual))
        }
    }
}

impl Operator {
    pub fn new(t: CMatrix, ctx: Arc<PsdContext>) -> Result<Self> {
        let n = linalg::ensure_square(&t)?;
        if n != ctx.dim() {
            return Err(Error::DimensionMismatch { expected: ctx.dim(), found: n });
        }
        Ok(Self { t, ctx })
    }

    pub fn zero(ctx: Arc<PsdContext>) -> Self {
        let n = ctx.dim();
        Self { t: CMatrix::zeros(n, n), ctx }
    }

    pub fn identity(ctx: Arc<PsdContext>) -> Self {
        let n = ctx.dim();
        Self { t: linalg::identity(n), ctx }
    }

    /// The orthogonal projection onto the range of `A`, as an operator.
    pub fn range_projection(ctx: Arc<PsdContext>) -> Self {
        Self { t: ctx.projection().clone(), ctx }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.t
    }

    pub fn into_matrix(self) -> CMatrix {
        self.t
    }

    pub fn context(&self) -> &Arc<PsdContext> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// A new operator on the same context. `t` must have matching shape.
    pub(crate) fn sibling(&self, t: CMatrix) -> Self {
        debug_assert_eq!(t.shape(), self.t.shape());
        Self { t, ctx: Arc::clone(&self.ctx) }
    }

    pub(crate) fn check_same_context(&self, other: &Operator) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx.same_as(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// `self * other`.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.check_same_context(other)?;
        Ok(self.sibling(&self.t * &other.t))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_context(other)?;
        Ok(self.sibling(&self.t + &other.t))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_context(other)?;
        Ok(self.sibling(&self.t - &other.t))
    }

    pub fn scale(&self, c: C64) -> Operator {
        self.sibling(&self.t * c)
    }

    pub fn pow(&self, k: u32) -> Operator {
        self.sibling(self.t.pow(k))
    }

    /// The Hilbert-space adjoint `T*` (not the `A`-adjoint).
    pub fn adjoint(&self) -> Operator {
        self.sibling(self.t.adjoint())
    }

    /// Scaled residual `||(I - P) T* A|| / (1 + ||A|| ||T||)`; zero exactly when
    /// `R(T* A)` lies in `R(A)`.
    pub fn ba_residual(&self) -> f64 {
        let ta = self.t.adjoint() * self.ctx.a();
        let outside = &ta - self.ctx.projection() * &ta;
        linalg::spectral_norm(&outside) / (1.0 + self.ctx.norm() * linalg::spectral_norm(&self.t))
    }

    /// Membership in `B_A(H)`, the operators admitting an `A`-adjoint.
    pub fn in_ba(&self, tol: &ToleranceConfig) -> bool {
        self.ba_residual() <= tol.cmp_atol
    }

    /// Scaled residual `||A^{1/2} T (I - P)|| / (1 + ||A^{1/2}|| ||T||)`.
    pub fn ba_half_residual(&self) -> f64 {
        let st = self.ctx.sqrt_a() * &self.t;
        let leak = &st - &st * self.ctx.projection();
        linalg::spectral_norm(&leak) / (1.0 + self.ctx.norm().sqrt() * linalg::spectral_norm(&self.t))
    }

    /// Membership in `B_{A^{1/2}}(H)`, the `A`-bounded operators.
    pub fn in_ba_half(&self, tol: &ToleranceConfig) -> bool {
        self.ba_half_residual() <= tol.cmp_atol
    }

    /// `T^{#_A} = A^+ T* A`, the reduced solution of `A X = T* A`.
    pub fn a_adjoint(&self, tol: &ToleranceConfig) -> Result<Operator> {
        let residual = self.ba_residual();
        if residual > tol.cmp_atol {
            return Err(Error::NotInBA(residual));
        }
        Ok(self.sibling(self.ctx.pinv_a() * self.t.adjoint() * self.ctx.a()))
    }

    /// `A^{1/2} T (A^{1/2})^+`.
    ///
    /// For `A`-bounded `T` this carries `||T||_A`, `w_A(T)` and `r_A(T)` to the
    /// classical norm, numerical radius and spectral radius.
    pub fn reduce(&self, tol: &ToleranceConfig) -> Result<CMatrix> {
        self.check_a_bounded(tol)?;
        Ok(self.ctx.sqrt_a() * &self.t * self.ctx.pinv_sqrt_a())
    }

    /// The reduction restricted to the range of `A`, in the eigenbasis of `A`:
    /// `diag(sqrt l) V_r* T V_r diag(1/sqrt l)`. Unitarily equivalent to the
    /// nonzero corner of [`Operator::reduce`], so it has the same norm,
    /// numerical radius and nonzero spectrum.
    pub fn reduce_on_range(&self, tol: &ToleranceConfig) -> Result<CMatrix> {
        self.check_a_bounded(tol)?;
        Ok(self.compress_unchecked())
    }

    pub(crate) fn compress_unchecked(&self) -> CMatrix {
        let vr = self.ctx.range_basis();
        let mut m = vr.adjoint() * &self.t * &vr;
        let roots: Vec<f64> = self.ctx.eigenvalues()[..self.ctx.rank()].iter().map(|l| l.sqrt()).collect();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] *= roots[i] / roots[j];
            }
        }
        m
    }

    fn check_a_bounded(&self, tol: &ToleranceConfig) -> Result<()> {
        let residual = self.ba_half_residual();
        if residual > tol.cmp_atol {
            return Err(Error::NotABounded(residual));
        }
        Ok(())
    }

    /// `||T||_A`, the largest singular value of the reduction.
    pub fn a_op_norm(&self, tol: &ToleranceConfig) -> Seminorm {
        if !self.in_ba_half(tol) {
            return Seminorm { value: f64::INFINITY, a_bounded: false };
        }
        Seminorm { value: linalg::spectral_norm(&self.compress_unchecked()), a_bounded: true }
    }

    /// `||T||_A` or `NotABounded`.
    pub fn try_a_op_norm(&self, tol: &ToleranceConfig) -> Result<f64> {
        let s = self.a_op_norm(tol);
        s.finite(if s.a_bounded { 0.0 } else { self.ba_half_residual() })
    }

    /// `A T` Hermitian within tolerance.
    pub fn is_a_selfadjoint(&self, tol: &ToleranceConfig) -> bool {
        let at = self.ctx.a() * &self.t;
        linalg::asymmetry(&at) <= tol.slack(at.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, identity, max_abs_diff, real_matrix};

    fn ctx(a: CMatrix) -> Arc<PsdContext> {
        Arc::new(PsdContext::new(a, &ToleranceConfig::default()).unwrap())
    }

    fn op(c: &Arc<PsdContext>, t: CMatrix) -> Operator {
        Operator::new(t, Arc::clone(c)).unwrap()
    }

    const JORDAN: [f64; 4] = [0.0, 1.0, 0.0, 0.0];

    #[test]
    fn membership_full_rank_is_unconstrained() {
        let tol = ToleranceConfig::default();
        let c = ctx(real_matrix(2, 2, &[2.0, 1.0, 1.0, 2.0]));
        let t = op(&c, real_matrix(2, 2, &[0.3, -7.0, 11.0, 2.0]));
        assert!(t.in_ba(&tol));
        assert!(t.in_ba_half(&tol));
    }

    #[test]
    fn membership_with_singular_weight() {
        let tol = ToleranceConfig::default();
        let c = ctx(diag_real(&[1.0, 0.0]));
        // (I - P) T* A = [[0,0],[1,0]] for the Jordan block
        let bad = op(&c, real_matrix(2, 2, &JORDAN));
        assert!(!bad.in_ba(&tol));
        assert!(!bad.in_ba_half(&tol));
        let good = op(&c, real_matrix(2, 2, &[1.0, 0.0, 3.0, 7.0]));
        assert!(good.in_ba(&tol));
        assert!(good.in_ba_half(&tol));
    }

    #[test]
    fn adjoint_examples() {
        let tol = ToleranceConfig::default();
        let c = ctx(identity(2));
        let s = op(&c, real_matrix(2, 2, &JORDAN)).a_adjoint(&tol).unwrap();
        assert!(max_abs_diff(s.matrix(), &real_matrix(2, 2, &[0.0, 0.0, 1.0, 0.0])) < 1e-15);

        let c = ctx(diag_real(&[1.0, 0.0]));
        let s = op(&c, real_matrix(2, 2, &[2.0, 0.0, 3.0, 4.0])).a_adjoint(&tol).unwrap();
        assert!(max_abs_diff(s.matrix(), &real_matrix(2, 2, &[2.0, 0.0, 0.0, 0.0])) < 1e-15);

        let bad = op(&c, real_matrix(2, 2, &JORDAN));
        assert!(matches!(bad.a_adjoint(&tol), Err(Error::NotInBA(_))));
    }

    #[test]
    fn projection_is_its_own_adjoint_and_reduction() {
        let tol = ToleranceConfig::default();
        let c = ctx(real_matrix(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0]));
        let p = Operator::range_projection(Arc::clone(&c));
        let ps = p.a_adjoint(&tol).unwrap();
        assert!(max_abs_diff(ps.matrix(), p.matrix()) < 1e-14);
        assert!(max_abs_diff(&p.reduce(&tol).unwrap(), p.matrix()) < 1e-14);
    }

    #[test]
    fn reduction_examples() {
        let tol = ToleranceConfig::default();
        let t = real_matrix(2, 2, &[0.3, -7.0, 11.0, 2.0]);
        let c = ctx(identity(2));
        assert!(max_abs_diff(&op(&c, t.clone()).reduce(&tol).unwrap(), &t) < 1e-14);

        let c = ctx(diag_real(&[4.0, 0.0]));
        let r = op(&c, real_matrix(2, 2, &[3.0, 0.0, 5.0, 6.0])).reduce(&tol).unwrap();
        assert!(max_abs_diff(&r, &real_matrix(2, 2, &[3.0, 0.0, 0.0, 0.0])) < 1e-14);

        let bad = op(&c, real_matrix(2, 2, &JORDAN));
        assert!(matches!(bad.reduce(&tol), Err(Error::NotABounded(_))));
    }

    #[test]
    fn norm_examples() {
        let tol = ToleranceConfig::default();
        let c = ctx(identity(2));
        assert!((op(&c, real_matrix(2, 2, &JORDAN)).try_a_op_norm(&tol).unwrap() - 1.0).abs() < 1e-14);

        let c = ctx(diag_real(&[1.0, 0.0]));
        assert!((op(&c, diag_real(&[2.0, 5.0])).try_a_op_norm(&tol).unwrap() - 2.0).abs() < 1e-14);

        let unbounded = op(&c, real_matrix(2, 2, &JORDAN)).a_op_norm(&tol);
        assert!(!unbounded.a_bounded);
        assert!(unbounded.value.is_infinite());
    }

    #[test]
    fn self_adjointness() {
        let tol = ToleranceConfig::default();
        let c = ctx(diag_real(&[1.0, 0.0]));
        assert!(op(&c, real_matrix(2, 2, &[1.0, 0.0, 3.0, 4.0])).is_a_selfadjoint(&tol));
        assert!(!op(&c, real_matrix(2, 2, &[1.0, 2.0, 0.0, 4.0])).is_a_selfadjoint(&tol));
    }

    #[test]
    fn rejects_wrong_dimension_and_context() {
        let c2 = ctx(identity(2));
        assert!(matches!(Operator::new(identity(3), Arc::clone(&c2)), Err(Error::DimensionMismatch { .. })));
        let other = ctx(diag_real(&[1.0, 2.0]));
        let a = Operator::identity(c2);
        assert!(matches!(a.compose(&Operator::identity(other)), Err(Error::ContextMismatch)));
    }
}
