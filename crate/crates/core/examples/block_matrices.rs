//! Block operator matrices over the lifted weight diag(A, ..., A).

use std::sync::Arc;

use semihilbert::block::{self, BlockMatrix, Shape};
use semihilbert::generate::{self, Ensemble};
use semihilbert::linalg;
use semihilbert::radii;
use semihilbert::{Result, ToleranceConfig};

fn main() -> Result<()> {
    let tol = ToleranceConfig::default();
    let ctx = Arc::new(generate::gen_psd(2, 1, 3, &tol)?);

    // a random 3x3 grid of 2x2 blocks, each in B_A
    let grid = (0..3)
        .map(|i| (0..3).map(|j| generate::gen_compatible(&ctx, 10 * i + j, Ensemble::Ginibre, 1.0).into_matrix()).collect())
        .collect();
    let bm = BlockMatrix::assemble(grid, Arc::clone(&ctx))?;
    let t = bm.flatten();
    println!("flattened {}x{}, lifted rank {}", t.dim(), t.dim(), bm.lifted_context().rank());

    // block (i, j) of the A-adjoint is the A-adjoint of block (j, i)
    let blockwise = bm.block_sharp(&tol)?.flatten();
    let direct = t.a_adjoint(&tol)?;
    println!("blockwise vs lifted A-adjoint: {:.1e}", linalg::max_abs_diff(blockwise.matrix(), direct.matrix()));

    // seminorm of the block matrix against its matrix of block seminorms
    let hat = bm.hat_matrix(&tol)?;
    println!("block seminorms:\n{hat:.4}");
    let hat_norm = hat.map(|x| linalg::C64::new(x, 0.0));
    println!("||T||_A = {:.6} <= ||hat|| = {:.6}", t.try_a_op_norm(&tol)?, linalg::spectral_norm(&hat_norm));

    // U_k permutes blocks and leaves w_A unchanged
    let u = block::u_k(3, 3, Arc::clone(&ctx))?.flatten();
    let conjugated = u.a_adjoint(&tol)?.compose(&t)?.compose(&u)?;
    println!(
        "w_A(T) = {:.10}, w_A(U^# T U) = {:.10}",
        radii::a_numerical_radius(&t, &tol)?,
        radii::a_numerical_radius(&conjugated, &tol)?
    );

    // diagonal and antidiagonal block matrices reduce to their entries
    let entries: Vec<_> = (0..3).map(|k| generate::gen_compatible(&ctx, 100 + k, Ensemble::Ginibre, 1.0)).collect();
    let mats: Vec<_> = entries.iter().map(|e| e.matrix().clone()).collect();
    for shape in [Shape::Diagonal, Shape::Antidiagonal] {
        let full = BlockMatrix::structured(&mats, shape, Arc::clone(&ctx))?.flatten();
        println!(
            "{shape:?}: max entry seminorm {:.10}, assembled {:.10}",
            block::structured_norm(&entries, shape, &tol)?,
            full.try_a_op_norm(&tol)?
        );
    }
    Ok(())
}
