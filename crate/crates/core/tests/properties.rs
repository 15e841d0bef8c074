//! Property tests over randomly drawn weights, operators and block matrices.

use std::sync::Arc;

use proptest::prelude::*;
use semihilbert::block::{self, BlockMatrix};
use semihilbert::bounds::{evaluate_all, BoundKind};
use semihilbert::generate::{self, Ensemble, GenSpec};
use semihilbert::linalg::{self, max_abs_diff, CMatrix};
use semihilbert::radii;
use semihilbert::{Operator, PsdContext, ToleranceConfig};

const IDENTITY_TOL: f64 = 1e-9;
const SLACK: f64 = 1e-8;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn ensemble() -> impl Strategy<Value = Ensemble> {
    prop_oneof![
        Just(Ensemble::Ginibre),
        Just(Ensemble::NilpotentLift),
        Just(Ensemble::ASelfadjoint),
        Just(Ensemble::Sparse),
    ]
}

/// `(n, rank, seed)` with `1 <= rank <= n`.
fn weight_params() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=4).prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))
}

fn context(n: usize, rank: usize, seed: u64) -> Arc<PsdContext> {
    Arc::new(generate::gen_psd(n, rank, seed, &tol()).unwrap())
}

/// Residual relative to the size of the compared quantities.
fn rel(diff: f64, scale: f64) -> f64 {
    diff / (1.0 + scale)
}

fn block_spec() -> impl Strategy<Value = GenSpec> {
    (2usize..=3, 2usize..=4, ensemble(), any::<u64>()).prop_flat_map(|(n, d, ensemble, seed)| {
        (1..=n).prop_map(move |rank| GenSpec { n, d, rank, ensemble, scale: 1.0, seed })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sharp_solves_the_adjoint_equation((n, rank, seed) in weight_params(), ens in ensemble()) {
        let t = tol();
        let ctx = context(n, rank, seed);
        let op = generate::gen_compatible(&ctx, seed ^ 1, ens, 1.0);
        let sharp = op.a_adjoint(&t).unwrap();
        // A T^# = T^* A, and T^# has range inside the range of A
        let lhs = ctx.a() * sharp.matrix();
        let rhs = op.matrix().adjoint() * ctx.a();
        prop_assert!(rel(max_abs_diff(&lhs, &rhs), rhs.norm()) < IDENTITY_TOL);
        let leak = max_abs_diff(&(ctx.projection() * sharp.matrix()), sharp.matrix());
        prop_assert!(rel(leak, sharp.matrix().norm()) < IDENTITY_TOL);
    }

    #[test]
    fn double_sharp_is_compression((n, rank, seed) in weight_params(), ens in ensemble()) {
        let t = tol();
        let ctx = context(n, rank, seed);
        let op = generate::gen_compatible(&ctx, seed ^ 2, ens, 1.0);
        let twice = op.a_adjoint(&t).unwrap().a_adjoint(&t).unwrap();
        let p = ctx.projection();
        let ptp = p * op.matrix() * p;
        prop_assert!(rel(max_abs_diff(twice.matrix(), &ptp), ptp.norm()) < IDENTITY_TOL);
    }

    #[test]
    fn sharp_products_square_the_seminorm((n, rank, seed) in weight_params(), ens in ensemble()) {
        let t = tol();
        let ctx = context(n, rank, seed);
        let op = generate::gen_compatible(&ctx, seed ^ 3, ens, 1.0);
        let sharp = op.a_adjoint(&t).unwrap();
        let norm = op.try_a_op_norm(&t).unwrap();
        let left = sharp.compose(&op).unwrap().try_a_op_norm(&t).unwrap();
        let right = op.compose(&sharp).unwrap().try_a_op_norm(&t).unwrap();
        prop_assert!(rel((left - norm * norm).abs(), norm * norm) < IDENTITY_TOL);
        prop_assert!(rel((right - norm * norm).abs(), norm * norm) < IDENTITY_TOL);
        // the sharp has the same seminorm
        prop_assert!(rel((sharp.try_a_op_norm(&t).unwrap() - norm).abs(), norm) < IDENTITY_TOL);
    }

    #[test]
    fn reduction_intertwines_the_square_root((n, rank, seed) in weight_params(), ens in ensemble()) {
        let t = tol();
        let ctx = context(n, rank, seed);
        let op = generate::gen_compatible(&ctx, seed ^ 4, ens, 1.0);
        let reduced = op.reduce(&t).unwrap();
        let lhs = &reduced * ctx.sqrt_a();
        let rhs = ctx.sqrt_a() * op.matrix();
        prop_assert!(rel(max_abs_diff(&lhs, &rhs), rhs.norm()) < IDENTITY_TOL);
        // and the seminorm is the spectral norm of the reduction
        let norm = op.try_a_op_norm(&t).unwrap();
        prop_assert!(rel((linalg::spectral_norm(&reduced) - norm).abs(), norm) < IDENTITY_TOL);
    }

    #[test]
    fn reduction_is_multiplicative((n, rank, seed) in weight_params(), ens in ensemble()) {
        let t = tol();
        let ctx = context(n, rank, seed);
        let a = generate::gen_compatible(&ctx, seed ^ 5, ens, 1.0);
        let b = generate::gen_compatible(&ctx, seed ^ 6, Ensemble::Ginibre, 1.0);
        let product = a.compose(&b).unwrap().reduce(&t).unwrap();
        let separate = a.reduce(&t).unwrap() * b.reduce(&t).unwrap();
        prop_assert!(rel(max_abs_diff(&product, &separate), separate.norm()) < IDENTITY_TOL);
    }

    #[test]
    fn reduction_of_sharp_is_adjoint_of_reduction((n, rank, seed) in weight_params(), ens in ensemble()) {
        let t = tol();
        let ctx = context(n, rank, seed);
        let op = generate::gen_compatible(&ctx, seed ^ 11, ens, 1.0);
        let of_sharp = op.a_adjoint(&t).unwrap().reduce(&t).unwrap();
        let adjoint = op.reduce(&t).unwrap().adjoint();
        prop_assert!(rel(max_abs_diff(&of_sharp, &adjoint), adjoint.norm()) < 1e-10);
        prop_assert!(op.in_ba_half(&t));
    }

    #[test]
    fn radius_sits_between_half_seminorm_and_seminorm((n, rank, seed) in weight_params(), ens in ensemble()) {
        let t = tol();
        let ctx = context(n, rank, seed);
        let op = generate::gen_compatible(&ctx, seed ^ 7, ens, 1.0);
        let omega = radii::a_numerical_radius(&op, &t).unwrap();
        let norm = op.try_a_op_norm(&t).unwrap();
        let r = radii::a_spectral_radius(&op, &t).unwrap();
        prop_assert!(0.5 * norm <= omega + SLACK * (1.0 + omega));
        prop_assert!(omega <= norm + SLACK * (1.0 + norm));
        prop_assert!(r <= omega + SLACK * (1.0 + omega));
        // power inequality for the square
        let omega2 = radii::a_numerical_radius(&op.pow(2), &t).unwrap();
        prop_assert!(omega2 <= omega * omega + SLACK * (1.0 + omega * omega));
    }

    #[test]
    fn radius_is_unchanged_by_null_space_perturbation((n, rank, seed) in weight_params()) {
        prop_assume!(rank < n);
        let t = tol();
        let ctx = context(n, rank, seed);
        let op = generate::gen_compatible(&ctx, seed ^ 8, Ensemble::Ginibre, 1.0);
        // adding anything that maps into the null space of A is invisible
        let mut rng = generate::rng_from_seed(seed);
        let noise = ctx.null_basis() * generate::complex_gaussian(&mut rng, n - rank, n, 1.0);
        let shifted = Operator::new(op.matrix() + noise, Arc::clone(&ctx)).unwrap();
        let a = radii::a_numerical_radius(&op, &t).unwrap();
        let b = radii::a_numerical_radius(&shifted, &t).unwrap();
        prop_assert!(rel((a - b).abs(), a) < 1e-9);
    }

    #[test]
    fn pair_radius_is_symmetric((n, rank, seed) in weight_params()) {
        let t = tol();
        let ctx = context(n, rank, seed);
        let a = generate::gen_compatible(&ctx, seed ^ 9, Ensemble::Ginibre, 1.0);
        let b = generate::gen_compatible(&ctx, seed ^ 10, Ensemble::Ginibre, 1.0);
        let ab = radii::omega_offdiag(&a, &b, &t).unwrap();
        let ba = radii::omega_offdiag(&b, &a, &t).unwrap();
        prop_assert!(rel((ab - ba).abs(), ab) < 1e-9);
        let mean = 0.5 * (a.try_a_op_norm(&t).unwrap() + b.try_a_op_norm(&t).unwrap());
        prop_assert!(ab <= mean + t.cmp_atol);
        // it is the radius of the 2x2 off-diagonal block matrix
        let zero = CMatrix::zeros(n, n);
        let bm = BlockMatrix::assemble(
            vec![vec![zero.clone(), a.matrix().clone()], vec![b.matrix().clone(), zero]],
            Arc::clone(&ctx),
        )
        .unwrap();
        let full = radii::a_numerical_radius(&bm.flatten(), &t).unwrap();
        prop_assert!(rel((full - ab).abs(), ab) < 1e-7);
    }

    #[test]
    fn block_sharp_matches_sharp_of_flattening(spec in block_spec()) {
        let t = tol();
        let bm = generate::gen_block_instance(&spec, &t).unwrap();
        let by_blocks = bm.block_sharp(&t).unwrap().flatten();
        let direct = bm.flatten().a_adjoint(&t).unwrap();
        prop_assert!(rel(max_abs_diff(by_blocks.matrix(), direct.matrix()), direct.matrix().norm()) < IDENTITY_TOL);
    }

    #[test]
    fn bounds_dominate_radius_and_refine_prior(spec in block_spec()) {
        let t = tol();
        let bm = generate::gen_block_instance(&spec, &t).unwrap();
        let report = evaluate_all(&bm, &t, "prop").unwrap();
        for kind in BoundKind::ALL {
            prop_assert!(
                report.bounds[&kind] >= report.omega - SLACK * (1.0 + report.omega),
                "{} = {} below {}", kind.key(), report.bounds[&kind], report.omega
            );
        }
        prop_assert!(report.bounds[&BoundKind::Th2] <= report.bounds[&BoundKind::Prior] + t.cmp_atol);
        prop_assert!(report.refinement_ok);
    }

    #[test]
    fn block_spectral_radius_dominated_by_hat_matrix(spec in block_spec()) {
        let t = tol();
        let bm = generate::gen_block_instance(&spec, &t).unwrap();
        let full = bm.flatten();
        let hat = bm.hat_matrix(&t).unwrap();
        let hat_radius = linalg::spectral_radius(&hat.map(|x| linalg::C64::new(x, 0.0)));
        let hat_norm = hat.norm().max(linalg::spectral_norm(&hat.map(|x| linalg::C64::new(x, 0.0))));
        let r = radii::a_spectral_radius(&full, &t).unwrap();
        let norm = full.try_a_op_norm(&t).unwrap();
        prop_assert!(r <= hat_radius + SLACK * (1.0 + hat_radius));
        prop_assert!(norm <= hat_norm + SLACK * (1.0 + hat_norm));
    }

    #[test]
    fn permutation_blocks_are_a_unitary(k in 2usize..=4, extra in 0usize..=2, (n, rank, seed) in weight_params()) {
        let t = tol();
        let d = k + extra;
        let ctx = context(n, rank, seed);
        let u = block::u_k(k, d, Arc::clone(&ctx)).unwrap();
        let full = u.flatten();
        // the sharp is the projected permutation, and U^# U = P
        let sharp = full.a_adjoint(&t).unwrap();
        let p = block::lifted_projection(&u);
        let pu = p.compose(&full).unwrap();
        prop_assert!(max_abs_diff(sharp.matrix(), pu.matrix()) < IDENTITY_TOL);
        let gram = sharp.compose(&full).unwrap();
        prop_assert!(max_abs_diff(gram.matrix(), p.matrix()) < IDENTITY_TOL);
        // an involution with exact entries
        prop_assert_eq!(full.pow(2).into_matrix(), linalg::identity(n * d));
    }

    #[test]
    fn permutation_conjugation_preserves_radius(spec in block_spec(), k_offset in 0usize..3) {
        let t = tol();
        let bm = generate::gen_block_instance(&spec, &t).unwrap();
        let k = 2 + k_offset % (bm.d() - 1);
        let u = block::u_k(k, bm.d(), Arc::clone(bm.base_context())).unwrap().flatten();
        let conj = u.compose(&bm.flatten()).unwrap().compose(&u).unwrap();
        let before = radii::a_numerical_radius(&bm.flatten(), &t).unwrap();
        let after = radii::a_numerical_radius(&conj, &t).unwrap();
        prop_assert!(rel((before - after).abs(), before) < 1e-8);
    }

    #[test]
    fn split_inverts_flatten(spec in block_spec()) {
        let t = tol();
        let bm = generate::gen_block_instance(&spec, &t).unwrap();
        let again = BlockMatrix::split(bm.flatten().matrix(), bm.d(), Arc::clone(bm.base_context())).unwrap();
        for i in 0..bm.d() {
            for j in 0..bm.d() {
                prop_assert_eq!(bm.block(i, j), again.block(i, j));
            }
        }
    }

    #[test]
    fn generators_are_sound((n, rank, seed) in weight_params(), ens in ensemble()) {
        let t = tol();
        let ctx = context(n, rank, seed);
        // eigenvalues above the truncation threshold, rank as requested
        prop_assert_eq!(ctx.rank(), rank);
        let op = generate::gen_compatible(&ctx, seed, ens, 1.0);
        prop_assert!(op.in_ba(&t));
        match ens {
            Ensemble::NilpotentLift => {
                let a_t2 = ctx.a() * op.pow(2).matrix();
                prop_assert!(a_t2.norm() <= 1e-10 * (1.0 + op.matrix().norm().powi(2)));
            }
            Ensemble::ASelfadjoint => prop_assert!(op.is_a_selfadjoint(&t)),
            _ => {}
        }
        // same seed, same draw
        let again = generate::gen_compatible(&ctx, seed, ens, 1.0);
        prop_assert_eq!(op.matrix(), again.matrix());
    }
}
