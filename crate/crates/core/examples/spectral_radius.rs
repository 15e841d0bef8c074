//! A-spectral radius and the Gelfand sequence that cross-checks it.

use std::sync::Arc;

use semihilbert::generate::{self, Ensemble};
use semihilbert::linalg::real_matrix;
use semihilbert::radii;
use semihilbert::{Operator, PsdContext, Result, ToleranceConfig};

fn main() -> Result<()> {
    let tol = ToleranceConfig::default();

    let ctx = Arc::new(PsdContext::new(real_matrix(3, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]), &tol)?);
    let t = Operator::new(real_matrix(3, 3, &[0.5, 1.0, 0.0, 0.0, 0.3, 0.0, 1.0, 2.0, 0.7]), ctx)?;
    let r = radii::a_spectral_radius_detailed(&t, &tol)?;
    println!("r_A(T) = {:.12}", r.value);
    println!("  n    ||T^n||_A^(1/n)");
    for (n, v) in &r.gelfand {
        println!("{n:>3}    {v:.12}");
    }
    println!("relative gap at the last power: {:.3e}", r.last_relative_gap);

    // r_A(TS) = r_A(ST)
    let weight = Arc::new(PsdContext::new(real_matrix(2, 2, &[2.0, 1.0, 1.0, 2.0]), &tol)?);
    let a = generate::gen_compatible(&weight, 1, Ensemble::Ginibre, 1.0);
    let b = generate::gen_compatible(&weight, 2, Ensemble::Ginibre, 1.0);
    let ab = radii::a_spectral_radius(&a.compose(&b)?, &tol)?;
    let ba = radii::a_spectral_radius(&b.compose(&a)?, &tol)?;
    println!("r_A(TS) = {ab:.12}, r_A(ST) = {ba:.12}");
    assert!((ab - ba).abs() < 1e-8);

    // r_A <= w_A
    let w = radii::a_numerical_radius(&a, &tol)?;
    println!("r_A(T) = {:.6} <= w_A(T) = {w:.6}", radii::a_spectral_radius(&a, &tol)?);
    Ok(())
}
