//! Self-checks: fixed golden values and randomized property suites.
//!
//! Every randomized suite draws its instances from seeds `0..trials`, measures
//! one normalized residual per draw and fails the draw when the residual
//! exceeds the suite threshold. Errors raised while evaluating a draw count as
//! failures.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::block::{self, BlockMatrix, Shape};
use crate::bounds::{self, BoundKind};
use crate::context::PsdContext;
use crate::error::Result;
use crate::generate::{self, Ensemble, GenSpec, InstanceRng};
use crate::linalg::{self, CMatrix, C64};
use crate::operator::Operator;
use crate::radii;
use crate::tolerance::ToleranceConfig;

const MAX_LISTED_FAILURES: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest residual seen.
    pub worst: f64,
    pub threshold: f64,
    /// The first few failing draws (seed or case name, and the reason).
    pub failed_cases: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {}/{} passed, worst residual {:.3e} (threshold {:.0e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.trials - self.failures,
            self.trials,
            self.worst,
            self.threshold
        )
    }
}

struct Tally {
    outcome: SuiteOutcome,
}

impl Tally {
    fn new(name: &str, threshold: f64) -> Self {
        Tally {
            outcome: SuiteOutcome {
                name: name.to_string(),
                trials: 0,
                failures: 0,
                worst: 0.0,
                threshold,
                failed_cases: Vec::new(),
            },
        }
    }

    fn record(&mut self, case: impl std::fmt::Display, residual: Result<f64>) {
        let o = &mut self.outcome;
        o.trials += 1;
        let reason = match residual {
            Ok(r) if r <= o.threshold => {
                o.worst = o.worst.max(r);
                return;
            }
            Ok(r) => {
                o.worst = o.worst.max(r);
                format!("residual {r:.3e}")
            }
            Err(e) => e.to_string(),
        };
        o.failures += 1;
        if o.failed_cases.len() < MAX_LISTED_FAILURES {
            o.failed_cases.push(format!("{case}: {reason}"));
        }
    }

    fn finish(self) -> SuiteOutcome {
        self.outcome
    }
}

fn run_suite(
    name: &str,
    trials: usize,
    threshold: f64,
    mut draw: impl FnMut(&mut InstanceRng) -> Result<f64>,
) -> SuiteOutcome {
    let mut tally = Tally::new(name, threshold);
    for seed in 0..trials as u64 {
        let mut rng = generate::rng_from_seed(seed);
        tally.record(format_args!("seed {seed}"), draw(&mut rng));
    }
    tally.finish()
}

fn random_context(rng: &mut InstanceRng, max_n: usize, tol: &ToleranceConfig) -> Result<Arc<PsdContext>> {
    let n = rng.random_range(2..=max_n);
    let rank = rng.random_range(1..=n);
    Ok(Arc::new(generate::gen_psd_with(rng, n, rank, tol)?))
}

fn random_operator(rng: &mut InstanceRng, ensemble: Ensemble, tol: &ToleranceConfig) -> Result<Operator> {
    let ctx = random_context(rng, 4, tol)?;
    Ok(generate::gen_compatible_with(rng, &ctx, ensemble, 1.0))
}

fn random_block_matrix(rng: &mut InstanceRng, tol: &ToleranceConfig) -> Result<BlockMatrix> {
    let n = rng.random_range(2..=3);
    let spec = GenSpec {
        n,
        d: rng.random_range(2..=3),
        rank: rng.random_range(1..=n),
        ensemble: Ensemble::Ginibre,
        scale: 1.0,
        seed: rng.random(),
    };
    generate::gen_block_instance(&spec, tol)
}

fn relative(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / (1.0 + scale.abs())
}

/// Excess of `lhs` over `rhs`, normalized; zero when the inequality holds.
fn excess(lhs: f64, rhs: f64) -> f64 {
    ((lhs - rhs) / (1.0 + lhs.abs().max(rhs.abs()))).max(0.0)
}

// ---------------------------------------------------------------------------
// Golden values

fn golden_case(tally: &mut Tally, name: &str, got: Result<f64>, want: f64) {
    tally.record(name, got.map(|g| (g - want).abs()));
}

/// Hand-computed values of the basic operations and the tightness witness.
pub fn golden(tol: &ToleranceConfig) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("golden", 1e-9);
    let identity2 = Arc::new(PsdContext::new(linalg::identity(2), tol)?);
    let coordinate = Arc::new(PsdContext::new(linalg::diag_real(&[1.0, 0.0]), tol)?);
    let jordan = linalg::real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let lower = Operator::new(linalg::real_matrix(2, 2, &[1.0, 0.0, 3.0, 4.0]), Arc::clone(&coordinate))?;

    golden_case(&mut tally, "w(jordan)", Ok(radii::classical_numerical_radius(&jordan, tol).value), 0.5);
    golden_case(
        &mut tally,
        "w(diag(1,-1))",
        Ok(radii::classical_numerical_radius(&linalg::diag_real(&[1.0, -1.0]), tol).value),
        1.0,
    );
    golden_case(&mut tally, "w(2 jordan)", Ok(radii::classical_numerical_radius(&(&jordan * C64::new(2.0, 0.0)), tol).value), 1.0);
    golden_case(
        &mut tally,
        "r([[0,2],[3,0]])",
        Ok(radii::classical_spectral_radius(&linalg::real_matrix(2, 2, &[0.0, 2.0, 3.0, 0.0]))),
        6f64.sqrt(),
    );
    golden_case(&mut tally, "||lower||_A", lower.try_a_op_norm(tol), 1.0);
    golden_case(&mut tally, "w_A(lower)", radii::a_numerical_radius(&lower, tol), 1.0);
    golden_case(&mut tally, "r_A(lower)", radii::a_spectral_radius(&lower, tol), 1.0);
    golden_case(
        &mut tally,
        "lower sharp",
        lower.a_adjoint(tol).map(|s| linalg::max_abs_diff(s.matrix(), &linalg::diag_real(&[1.0, 0.0]))),
        0.0,
    );
    let id_op = Operator::identity(Arc::clone(&identity2));
    golden_case(&mut tally, "offdiag(I, I)", radii::omega_offdiag(&id_op, &id_op, tol), 1.0);

    let witness = witness_instance(tol)?;
    let report = bounds::evaluate_all(&witness, tol, "witness")?;
    golden_case(&mut tally, "witness omega", Ok(report.omega), 0.5);
    for (kind, want) in witness_bounds() {
        golden_case(&mut tally, &format!("witness {}", kind.key()), Ok(report.bounds[&kind]), want);
    }
    Ok(tally.finish())
}

/// `d = 2`, `A = I_2`, `T_12 = I`, every other block zero.
pub fn witness_instance(tol: &ToleranceConfig) -> Result<BlockMatrix> {
    let ctx = Arc::new(PsdContext::new(linalg::identity(2), tol)?);
    let zero = CMatrix::zeros(2, 2);
    BlockMatrix::assemble(vec![vec![zero.clone(), linalg::identity(2)], vec![zero.clone(), zero]], ctx)
}

/// Bound values of [`witness_instance`], derived by hand.
pub fn witness_bounds() -> [(BoundKind, f64); 7] {
    [
        (BoundKind::Thf1, 0.5),
        (BoundKind::R2, 0.75),
        (BoundKind::Th2, 0.5),
        (BoundKind::DiagOffdiag, 0.5),
        (BoundKind::ReIm, std::f64::consts::FRAC_1_SQRT_2),
        (BoundKind::MaxDiag, 0.5),
        (BoundKind::Prior, 0.5),
    ]
}

// ---------------------------------------------------------------------------
// Equality cases

/// `A T^2 = 0` forces `w_A(T) = ||T||_A / 2`.
pub fn square_zero_equality(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("square-zero equality", trials, 1e-8, |rng| {
        let t = random_operator(rng, Ensemble::NilpotentLift, tol)?;
        let norm = t.try_a_op_norm(tol)?;
        Ok(relative(radii::a_numerical_radius(&t, tol)?, 0.5 * norm, norm))
    })
}

/// `A T` Hermitian forces `||T||_A = w_A(T) = r_A(T)`.
pub fn selfadjoint_equality(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("a-selfadjoint equality", trials, 1e-8, |rng| {
        let t = random_operator(rng, Ensemble::ASelfadjoint, tol)?;
        let norm = t.try_a_op_norm(tol)?;
        let omega = radii::a_numerical_radius(&t, tol)?;
        let r = radii::a_spectral_radius(&t, tol)?;
        Ok(relative(norm, omega, norm).max(relative(norm, r, norm)).max(relative(omega, r, norm)))
    })
}

fn structured_entries(rng: &mut InstanceRng, tol: &ToleranceConfig) -> Result<(Arc<PsdContext>, Vec<Operator>)> {
    let ctx = random_context(rng, 3, tol)?;
    let d = rng.random_range(2..=4);
    let entries = (0..d).map(|_| generate::gen_compatible_with(rng, &ctx, Ensemble::Ginibre, 1.0)).collect();
    Ok((ctx, entries))
}

/// Structured formulas for diagonal block matrices against the assembled
/// matrix: seminorm and numerical radius.
pub fn diagonal_structure(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("diagonal structure", trials, 1e-8, |rng| {
        let (ctx, entries) = structured_entries(rng, tol)?;
        let mats: Vec<CMatrix> = entries.iter().map(|e| e.matrix().clone()).collect();
        let full = BlockMatrix::structured(&mats, Shape::Diagonal, ctx)?.flatten();
        let norm = block::structured_norm(&entries, Shape::Diagonal, tol)?;
        let omega = block::structured_omega(&entries, tol)?;
        let norm_gap = relative(norm, full.try_a_op_norm(tol)?, norm);
        let omega_gap = relative(omega, radii::a_numerical_radius(&full, tol)?, omega);
        Ok(norm_gap.max(omega_gap))
    })
}

/// Structured seminorm of antidiagonal block matrices against the assembled
/// matrix.
pub fn antidiagonal_structure(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("antidiagonal structure", trials, 1e-8, |rng| {
        let (ctx, entries) = structured_entries(rng, tol)?;
        let mats: Vec<CMatrix> = entries.iter().map(|e| e.matrix().clone()).collect();
        let full = BlockMatrix::structured(&mats, Shape::Antidiagonal, ctx)?.flatten();
        let norm = block::structured_norm(&entries, Shape::Antidiagonal, tol)?;
        Ok(relative(norm, full.try_a_op_norm(tol)?, norm))
    })
}

// ---------------------------------------------------------------------------
// Core identities

/// The four Penrose identities for the cached pseudoinverse, `n <= 8`.
pub fn penrose(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("penrose identities", trials, 1e-9, |rng| {
        let n = rng.random_range(1..=8);
        let rank = rng.random_range(1..=n);
        let ctx = generate::gen_psd_with(rng, n, rank, tol)?;
        let a = ctx.a();
        let p = ctx.pinv_a();
        let ap = a * p;
        let pa = p * a;
        Ok(linalg::max_abs_diff(&(&ap * a), a)
            .max(linalg::max_abs_diff(&(&pa * p), p))
            .max(linalg::max_abs_diff(&ap, &ap.adjoint()))
            .max(linalg::max_abs_diff(&pa, &pa.adjoint())))
    })
}

/// `A T^# = T* A`.
pub fn douglas(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("douglas equation", trials, 1e-9, |rng| {
        let t = random_operator(rng, Ensemble::Ginibre, tol)?;
        let a = t.context().a();
        let sharp = t.a_adjoint(tol)?;
        let residual = linalg::spectral_norm(&(a * sharp.matrix() - t.matrix().adjoint() * a));
        Ok(residual / (1.0 + t.context().norm() * linalg::spectral_norm(t.matrix())))
    })
}

/// `(T^#)^# = P T P`.
pub fn double_sharp(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("double sharp", trials, 1e-9, |rng| {
        let t = random_operator(rng, Ensemble::Ginibre, tol)?;
        let p = t.context().projection();
        let twice = t.a_adjoint(tol)?.a_adjoint(tol)?;
        Ok(linalg::max_abs_diff(twice.matrix(), &(p * t.matrix() * p)) / (1.0 + linalg::spectral_norm(t.matrix())))
    })
}

/// `||T||_A^2 = ||T^# T||_A`.
pub fn sharp_square_norm(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("sharp-square seminorm", trials, 1e-9, |rng| {
        let t = random_operator(rng, Ensemble::Ginibre, tol)?;
        let norm = t.try_a_op_norm(tol)?;
        let product = t.a_adjoint(tol)?.compose(&t)?.try_a_op_norm(tol)?;
        Ok(relative(norm * norm, product, norm * norm))
    })
}

/// The reduction is multiplicative and turns `T^#` into the adjoint.
pub fn reduction_homomorphism(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("reduction homomorphism", trials, 1e-9, |rng| {
        let t = random_operator(rng, Ensemble::Ginibre, tol)?;
        let s = generate::gen_compatible_with(rng, t.context(), Ensemble::Ginibre, 1.0);
        let rt = t.reduce(tol)?;
        let rs = s.reduce(tol)?;
        let scale = 1.0 + linalg::spectral_norm(&rt) * linalg::spectral_norm(&rs);
        let product = linalg::max_abs_diff(&t.compose(&s)?.reduce(tol)?, &(&rt * &rs)) / scale;
        let adjoint = linalg::max_abs_diff(&t.a_adjoint(tol)?.reduce(tol)?, &rt.adjoint())
            / (1.0 + linalg::spectral_norm(&rt));
        Ok(product.max(adjoint))
    })
}

/// Primary and formula routes to `w_A` agree to a relative `1e-7`.
pub fn route_agreement(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("numerical radius routes", trials, 1e-7, |rng| {
        let t = random_operator(rng, Ensemble::Ginibre, tol)?;
        let detail = radii::a_numerical_radius_detailed(&t, tol)?;
        let formula = detail.formula.map_or(f64::INFINITY, |f| f.value);
        Ok((formula - detail.value).abs() / detail.value.max(f64::MIN_POSITIVE))
    })
}

// ---------------------------------------------------------------------------
// Lemmas

/// `r_A` of a block matrix is at most the spectral radius of its seminorm matrix.
pub fn block_spectral_domination(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("block spectral radius domination", trials, 1e-8, |rng| {
        let bm = random_block_matrix(rng, tol)?;
        let r = radii::a_spectral_radius(&bm.flatten(), tol)?;
        let hat = bm.hat_matrix(tol)?.map(|x| C64::new(x, 0.0));
        Ok(excess(r, linalg::spectral_radius(&hat)))
    })
}

/// `||T||_A` of a block matrix is at most the norm of its seminorm matrix.
pub fn block_norm_domination(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("block seminorm domination", trials, 1e-8, |rng| {
        let bm = random_block_matrix(rng, tol)?;
        let norm = bm.flatten().try_a_op_norm(tol)?;
        let hat = bm.hat_matrix(tol)?.map(|x| C64::new(x, 0.0));
        Ok(excess(norm, linalg::spectral_norm(&hat)))
    })
}

/// The pair formula against the assembled `[[0, T], [S, 0]]`, in both orders.
pub fn offdiagonal_pair(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("off-diagonal pair radius", trials, 1e-8, |rng| {
        let t = random_operator(rng, Ensemble::Ginibre, tol)?;
        let s = generate::gen_compatible_with(rng, t.context(), Ensemble::Sparse, 1.0);
        let formula = radii::omega_offdiag(&t, &s, tol)?;
        let swapped = radii::omega_offdiag(&s, &t, tol)?;
        let zero = CMatrix::zeros(t.dim(), t.dim());
        let assembled = BlockMatrix::assemble(
            vec![vec![zero.clone(), t.matrix().clone()], vec![s.matrix().clone(), zero]],
            Arc::clone(t.context()),
        )?;
        let direct = radii::a_numerical_radius(&assembled.flatten(), tol)?;
        Ok(relative(formula, direct, direct).max(relative(swapped, direct, direct)))
    })
}

/// `w(T) = r(T + T^T) / 2` for entrywise nonnegative `T`.
pub fn nonnegative_radius(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("nonnegative matrix radius", trials, 1e-8, |rng| {
        let d = rng.random_range(2..=5);
        let t = DMatrix::from_fn(d, d, |_, _| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..2.0) });
        let classical = radii::classical_numerical_radius(&t.map(|x| C64::new(x, 0.0)), tol).value;
        let formula = bounds::nonnegative_numerical_radius(&t);
        Ok(relative(classical, formula, formula))
    })
}

/// `w_A(T) <= sqrt(||Re_A T||_A^2 + ||Im_A T||_A^2)`.
pub fn cartesian_bound(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("cartesian bound", trials, 1e-8, |rng| {
        let t = random_operator(rng, Ensemble::Ginibre, tol)?;
        let re = radii::re_a(&t, tol)?.try_a_op_norm(tol)?;
        let im = radii::im_a(&t, tol)?.try_a_op_norm(tol)?;
        Ok(excess(radii::a_numerical_radius(&t, tol)?, re.hypot(im)))
    })
}

/// `w_A(U^# T U) = w_A(T)` for generated `A`-unitaries `U`.
pub fn unitary_invariance(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("a-unitary invariance", trials, 1e-8, |rng| {
        let t = random_operator(rng, Ensemble::Ginibre, tol)?;
        let u = generate::gen_a_unitary_with(rng, t.context(), tol)?;
        let conjugated = u.a_adjoint(tol)?.compose(&t)?.compose(&u)?;
        let omega = radii::a_numerical_radius(&t, tol)?;
        Ok(relative(radii::a_numerical_radius(&conjugated, tol)?, omega, omega))
    })
}

/// `w_A(U_k^# T U_k) = w_A(T)` for block matrices and the block permutations
/// `U_k`, which also pass the `A`-unitary probe test.
pub fn block_permutation_invariance(trials: usize, tol: &ToleranceConfig) -> SuiteOutcome {
    run_suite("block permutation invariance", trials, 1e-8, |rng| {
        let bm = random_block_matrix(rng, tol)?;
        let k = rng.random_range(2..=bm.d());
        let u = block::u_k(k, bm.d(), Arc::clone(bm.base_context()))?.flatten();
        if !generate::is_a_unitary(&u, rng, tol)? {
            return Ok(f64::INFINITY);
        }
        let t = bm.flatten();
        let conjugated = u.a_adjoint(tol)?.compose(&t)?.compose(&u)?;
        let omega = radii::a_numerical_radius(&t, tol)?;
        Ok(relative(radii::a_numerical_radius(&conjugated, tol)?, omega, omega))
    })
}

/// Trial counts for [`all`].
#[derive(Clone, Copy, Debug)]
pub struct SuiteSizes {
    pub equality: usize,
    pub identities: usize,
    pub routes: usize,
    pub lemmas: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        SuiteSizes { equality: 200, identities: 500, routes: 500, lemmas: 200 }
    }
}

/// Golden values followed by every randomized suite.
pub fn all(sizes: SuiteSizes, tol: &ToleranceConfig) -> Result<Vec<SuiteOutcome>> {
    Ok(vec![
        golden(tol)?,
        square_zero_equality(sizes.equality, tol),
        selfadjoint_equality(sizes.equality, tol),
        diagonal_structure(sizes.equality, tol),
        antidiagonal_structure(sizes.equality, tol),
        penrose(sizes.identities, tol),
        douglas(sizes.identities, tol),
        double_sharp(sizes.identities, tol),
        sharp_square_norm(sizes.identities, tol),
        reduction_homomorphism(sizes.identities, tol),
        route_agreement(sizes.routes, tol),
        block_spectral_domination(sizes.lemmas, tol),
        block_norm_domination(sizes.lemmas, tol),
        offdiagonal_pair(sizes.lemmas, tol),
        nonnegative_radius(sizes.lemmas, tol),
        cartesian_bound(sizes.lemmas, tol),
        unitary_invariance(sizes.lemmas, tol),
        block_permutation_invariance(sizes.lemmas, tol),
    ])
}
