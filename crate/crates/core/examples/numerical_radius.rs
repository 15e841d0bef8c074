//! Classical and A-weighted numerical radii, with both computation routes.

use std::sync::Arc;

use semihilbert::generate::{self, Ensemble};
use semihilbert::linalg::{self, real_matrix};
use semihilbert::radii;
use semihilbert::{Operator, PsdContext, Result, ToleranceConfig};

fn main() -> Result<()> {
    let tol = ToleranceConfig::default();

    // classical: the numerical range of a Jordan block is the disk of radius 1/2
    let jordan = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let w = radii::classical_numerical_radius(&jordan, &tol);
    println!("w(jordan) = {:.12} at theta = {:.4}", w.value, w.argmax_theta);

    // Hermitian: the numerical radius is the norm
    let w = radii::classical_numerical_radius(&linalg::diag_real(&[1.0, -1.0]), &tol);
    println!("w(diag(1, -1)) = {:.12}", w.value);

    // A-weighted, random singular weight of rank 2 in dimension 3
    let ctx = Arc::new(generate::gen_psd(3, 2, 7, &tol)?);
    let t = generate::gen_compatible(&ctx, 8, Ensemble::Ginibre, 1.0);
    let detail = radii::a_numerical_radius_detailed(&t, &tol)?;
    let formula = detail.formula.expect("T is in B_A");
    println!("w_A(T): reduction route {:.15}", detail.reduced.value);
    println!("        theta formula   {:.15}", formula.value);
    println!("        argmax theta    {:.6} / {:.6}", detail.reduced.argmax_theta, formula.argmax_theta);

    // the equivalence with the seminorm
    let norm = t.try_a_op_norm(&tol)?;
    println!("||T||_A / 2 = {:.6} <= w_A = {:.6} <= ||T||_A = {:.6}", norm / 2.0, detail.value, norm);

    // square-zero operators sit on the lower end
    let nil = generate::gen_compatible(&ctx, 9, Ensemble::NilpotentLift, 1.0);
    let (w, n) = (radii::a_numerical_radius(&nil, &tol)?, nil.try_a_op_norm(&tol)?);
    println!("A T^2 = 0: w_A = {w:.12}, ||T||_A / 2 = {:.12}", n / 2.0);

    // and A-selfadjoint ones on the upper end
    let herm = generate::gen_compatible(&ctx, 10, Ensemble::ASelfadjoint, 1.0);
    println!(
        "A T Hermitian: w_A = {:.12}, ||T||_A = {:.12}",
        radii::a_numerical_radius(&herm, &tol)?,
        herm.try_a_op_norm(&tol)?
    );

    // off-diagonal pair radius: (1/2) sup ||e^{it} T + e^{-it} S^#||_A
    let ident = Arc::new(PsdContext::new(linalg::identity(2), &tol)?);
    let t = Operator::new(jordan.clone(), Arc::clone(&ident))?;
    let s = Operator::new(jordan.transpose(), ident)?;
    println!("pair radius of (E12, E21) = {:.12}", radii::omega_offdiag(&t, &s, &tol)?);
    Ok(())
}
