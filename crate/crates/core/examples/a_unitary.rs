//! Random A-unitary operators and the invariance of w_A under them.

use std::sync::Arc;

use semihilbert::generate::{self, Ensemble};
use semihilbert::radii;
use semihilbert::{Result, ToleranceConfig};

fn main() -> Result<()> {
    let tol = ToleranceConfig::default();
    let ctx = Arc::new(generate::gen_psd(4, 2, 5, &tol)?);
    let u = generate::gen_a_unitary(&ctx, 6, &tol)?;
    let u_sharp = u.a_adjoint(&tol)?;

    // isometric in the seminorm, in both directions
    let mut rng = generate::rng_from_seed(7);
    for _ in 0..3 {
        let x = generate::complex_gaussian_vector(&mut rng, 4);
        println!(
            "||x||_A = {:.12}  ||Ux||_A = {:.12}  ||U^# x||_A = {:.12}",
            ctx.semi_norm(&x)?,
            ctx.semi_norm(&(u.matrix() * &x))?,
            ctx.semi_norm(&(u_sharp.matrix() * &x))?
        );
    }
    // yet U itself is far from unitary on the whole space
    println!("||U|| = {:.4}, ||U||_A = {:.12}", semihilbert::linalg::spectral_norm(u.matrix()), u.try_a_op_norm(&tol)?);

    // w_A(U^# T U) = w_A(T)
    for seed in 0..3 {
        let t = generate::gen_compatible(&ctx, 100 + seed, Ensemble::Ginibre, 1.0);
        let conjugated = u_sharp.compose(&t)?.compose(&u)?;
        println!(
            "w_A(T) = {:.12}, w_A(U^# T U) = {:.12}",
            radii::a_numerical_radius(&t, &tol)?,
            radii::a_numerical_radius(&conjugated, &tol)?
        );
    }
    Ok(())
}
