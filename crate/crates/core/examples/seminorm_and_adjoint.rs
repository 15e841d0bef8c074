//! A-seminorm, A-adjoint and the reduction for a singular weight.

use std::sync::Arc;

use semihilbert::linalg::{self, real_matrix, CVector, C64};
use semihilbert::{Operator, PsdContext, Result, ToleranceConfig};

fn main() -> Result<()> {
    let tol = ToleranceConfig::default();

    // weight with a one-dimensional null space
    let ctx = Arc::new(PsdContext::new(linalg::diag_real(&[1.0, 0.0]), &tol)?);
    println!("rank(A) = {}, ||A|| = {}", ctx.rank(), ctx.norm());

    // lower triangular: maps null(A) into null(A), so T admits an A-adjoint
    let t = Operator::new(real_matrix(2, 2, &[1.0, 0.0, 3.0, 4.0]), Arc::clone(&ctx))?;
    println!("in B_A: {} (residual {:.1e})", t.in_ba(&tol), t.ba_residual());

    let sharp = t.a_adjoint(&tol)?;
    println!("T^# =\n{:.3}", sharp.matrix());

    // Douglas equation A T^# = T* A
    let lhs = ctx.a() * sharp.matrix();
    let rhs = t.matrix().adjoint() * ctx.a();
    assert!(linalg::max_abs_diff(&lhs, &rhs) < 1e-12);

    // only the range block survives in the seminorm
    let norm = t.try_a_op_norm(&tol)?;
    println!("||T||_A = {norm}");
    assert!((norm - 1.0).abs() < 1e-12);
    println!("reduction =\n{:.3}", t.reduce(&tol)?);

    // upper triangular: leaks null(A) into range(A), no finite seminorm
    let leak = Operator::new(real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]), ctx)?;
    let s = leak.a_op_norm(&tol);
    println!("leaking operator: A-bounded = {}, seminorm = {}", s.a_bounded, s.value);
    assert!(leak.a_adjoint(&tol).is_err());

    // a full-rank weight with coupled coordinates
    let weight = Arc::new(PsdContext::new(real_matrix(2, 2, &[2.0, 1.0, 1.0, 2.0]), &tol)?);
    let x = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
    let norm = weight.semi_norm(&x)?;
    println!("||x||_A for x = (1, 2): {norm:.6}");
    assert!((norm - 14f64.sqrt()).abs() < 1e-12);
    Ok(())
}
