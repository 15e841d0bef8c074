//! Seeded random instances.
//!
//! Operators are drawn in the eigenbasis `V = [V_r, V_0]` of `A` as
//! `[[X, 0], [Y, Z]]` (range rows first) and rotated back, so the block that
//! would carry `N(A)` into `R(A)` is exactly zero and every draw lies in `B_A`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::block::BlockMatrix;
use crate::context::PsdContext;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::operator::Operator;
use crate::tolerance::ToleranceConfig;

pub type InstanceRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    /// iid complex Gaussian in every free block.
    Ginibre,
    /// `A T^2 = 0`: the range block is a unitarily rotated strictly block
    /// upper triangular matrix.
    NilpotentLift,
    /// `A T` Hermitian.
    ASelfadjoint,
    /// Ginibre with each free entry zeroed with probability 1/2.
    Sparse,
    /// The zero operator.
    Zero,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Ginibre => "ginibre",
            Ensemble::NilpotentLift => "nilpotent-lift",
            Ensemble::ASelfadjoint => "a-selfadjoint",
            Ensemble::Sparse => "sparse",
            Ensemble::Zero => "zero",
        }
    }
}

fn default_scale() -> f64 {
    1.0
}

/// Parameters of one family of random block instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    /// Block size.
    pub n: usize,
    /// Number of block rows and columns.
    pub d: usize,
    /// Rank of `A`.
    pub rank: usize,
    pub ensemble: Ensemble,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::InvalidConfig(format!("n and d must be positive (n = {}, d = {})", self.n, self.d)));
        }
        if self.rank == 0 || self.rank > self.n {
            return Err(Error::InvalidConfig(format!("rank {} outside 1..={}", self.rank, self.n)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidConfig(format!("scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }
}

pub fn complex_gaussian(rng: &mut impl Rng, rows: usize, cols: usize, sigma: f64) -> CMatrix {
    let s = sigma / std::f64::consts::SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

pub fn complex_gaussian_vector(rng: &mut impl Rng, n: usize) -> CVector {
    complex_gaussian(rng, n, 1, 1.0).column(0).into_owned()
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let qr = complex_gaussian(rng, n, n, 1.0).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// `A = V diag(l_1, ..., l_rank, 0, ..., 0) V*` with `V` Haar and `l_i` uniform
/// on `[0.1, 2]`.
pub fn gen_psd(n: usize, rank: usize, seed: u64, tol: &ToleranceConfig) -> Result<PsdContext> {
    gen_psd_with(&mut rng_from_seed(seed), n, rank, tol)
}

pub fn gen_psd_with(rng: &mut impl Rng, n: usize, rank: usize, tol: &ToleranceConfig) -> Result<PsdContext> {
    if rank == 0 || rank > n {
        return Err(Error::InvalidConfig(format!("rank {rank} outside 1..={n}")));
    }
    let v = haar_unitary(rng, n);
    let values: Vec<f64> = (0..n).map(|k| if k < rank { rng.random_range(0.1..=2.0) } else { 0.0 }).collect();
    let a = &v * linalg::diag_real(&values) * v.adjoint();
    PsdContext::new(linalg::hermitian_part(&a), tol)
}

fn sparsify(rng: &mut impl Rng, mut m: CMatrix) -> CMatrix {
    for z in m.iter_mut() {
        if rng.random_bool(0.5) {
            *z = C64::new(0.0, 0.0);
        }
    }
    m
}

/// `V [[X, 0], [Y, Z]] V*` for the given eigenbasis blocks.
fn rotate_back(ctx: &PsdContext, x: &CMatrix, y: &CMatrix, z: &CMatrix) -> CMatrix {
    let n = ctx.dim();
    let r = ctx.rank();
    let mut local = CMatrix::zeros(n, n);
    local.view_mut((0, 0), (r, r)).copy_from(x);
    local.view_mut((r, 0), (n - r, r)).copy_from(y);
    local.view_mut((r, r), (n - r, n - r)).copy_from(z);
    let v = ctx.eigenvectors();
    v * local * v.adjoint()
}

/// A random operator in `B_A` drawn from `ensemble`.
pub fn gen_compatible(ctx: &Arc<PsdContext>, seed: u64, ensemble: Ensemble, scale: f64) -> Operator {
    gen_compatible_with(&mut rng_from_seed(seed), ctx, ensemble, scale)
}

pub fn gen_compatible_with(rng: &mut impl Rng, ctx: &Arc<PsdContext>, ensemble: Ensemble, scale: f64) -> Operator {
    let n = ctx.dim();
    let r = ctx.rank();
    let k = n - r;
    let t = match ensemble {
        Ensemble::Zero => CMatrix::zeros(n, n),
        Ensemble::Ginibre | Ensemble::Sparse => {
            let mut x = complex_gaussian(rng, r, r, scale);
            let mut y = complex_gaussian(rng, k, r, scale);
            let mut z = complex_gaussian(rng, k, k, scale);
            if ensemble == Ensemble::Sparse {
                x = sparsify(rng, x);
                y = sparsify(rng, y);
                z = sparsify(rng, z);
            }
            rotate_back(ctx, &x, &y, &z)
        }
        Ensemble::NilpotentLift => {
            // [[0, B], [0, 0]] squares to zero; conjugating by a unitary keeps that.
            let q_dim = r / 2;
            let p_dim = r - q_dim;
            let mut nil = CMatrix::zeros(r, r);
            nil.view_mut((0, p_dim), (p_dim, q_dim)).copy_from(&complex_gaussian(rng, p_dim, q_dim, scale));
            let u = haar_unitary(rng, r);
            let x = &u * nil * u.adjoint();
            let y = complex_gaussian(rng, k, r, scale);
            let z = complex_gaussian(rng, k, k, scale);
            rotate_back(ctx, &x, &y, &z)
        }
        Ensemble::ASelfadjoint => {
            // X = L_r^{-1} H makes L_r X = H Hermitian.
            let g = complex_gaussian(rng, r, r, scale);
            let mut x = linalg::hermitian_part(&g);
            for i in 0..r {
                let inv = 1.0 / ctx.eigenvalues()[i];
                let mut row = x.row_mut(i);
                row *= C64::new(inv, 0.0);
            }
            let y = complex_gaussian(rng, k, r, scale);
            let z = complex_gaussian(rng, k, k, scale);
            rotate_back(ctx, &x, &y, &z)
        }
    };
    Operator::new(t, Arc::clone(ctx)).expect("generated operator matches context")
}

const A_UNITARY_ATTEMPTS: usize = 16;
const A_UNITARY_PROBES: usize = 100;

/// A random `A`-unitary operator: `||Ux||_A = ||U^# x||_A = ||x||_A` for all `x`.
///
/// On the range of `A` the eigenbasis block is `L^{-1/2} Q L^{1/2}` with `Q`
/// Haar, which satisfies `W* L W = L`. Both isometry identities are checked on
/// random vectors before returning; a miss triggers a resample.
pub fn gen_a_unitary(ctx: &Arc<PsdContext>, seed: u64, tol: &ToleranceConfig) -> Result<Operator> {
    gen_a_unitary_with(&mut rng_from_seed(seed), ctx, tol)
}

pub fn gen_a_unitary_with(rng: &mut impl Rng, ctx: &Arc<PsdContext>, tol: &ToleranceConfig) -> Result<Operator> {
    let n = ctx.dim();
    let r = ctx.rank();
    let roots: Vec<f64> = ctx.eigenvalues()[..r].iter().map(|l| l.sqrt()).collect();
    for _ in 0..A_UNITARY_ATTEMPTS {
        let q = haar_unitary(rng, r);
        let w = CMatrix::from_fn(r, r, |i, j| q[(i, j)] * (roots[j] / roots[i]));
        let y = complex_gaussian(rng, n - r, r, 1.0);
        let z = haar_unitary(rng, n - r);
        let u = Operator::new(rotate_back(ctx, &w, &y, &z), Arc::clone(ctx))?;
        if is_a_unitary(&u, rng, tol)? {
            return Ok(u);
        }
    }
    Err(Error::ConstructionFailed(A_UNITARY_ATTEMPTS))
}

/// Checks `||Ux||_A = ||U^# x||_A = ||x||_A` on random probe vectors.
pub fn is_a_unitary(u: &Operator, rng: &mut impl Rng, tol: &ToleranceConfig) -> Result<bool> {
    if !u.in_ba(tol) {
        return Ok(false);
    }
    let sharp = u.a_adjoint(tol)?;
    let ctx = u.context();
    for _ in 0..A_UNITARY_PROBES {
        let x = complex_gaussian_vector(rng, u.dim());
        let base = ctx.semi_norm(&x)?;
        let slack = 1e-10 * (1.0 + base);
        let ux = ctx.semi_norm(&(u.matrix() * &x))?;
        let sx = ctx.semi_norm(&(sharp.matrix() * &x))?;
        if (ux - base).abs() > slack || (sx - base).abs() > slack {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A random `d x d` block instance for `spec`. The context and every block are
/// drawn from one stream seeded by `spec.seed`.
pub fn gen_block_instance(spec: &GenSpec, tol: &ToleranceConfig) -> Result<BlockMatrix> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let ctx = Arc::new(gen_psd_with(&mut rng, spec.n, spec.rank, tol)?);
    let grid = (0..spec.d)
        .map(|_| {
            (0..spec.d)
                .map(|_| gen_compatible_with(&mut rng, &ctx, spec.ensemble, spec.scale).into_matrix())
                .collect()
        })
        .collect();
    BlockMatrix::assemble(grid, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(3);
        let q = haar_unitary(&mut rng, 5);
        assert!(linalg::max_abs_diff(&(q.adjoint() * &q), &linalg::identity(5)) < 1e-13);
    }

    #[test]
    fn psd_generation_is_deterministic() {
        let a = gen_psd(3, 2, 11, &tol()).unwrap();
        let b = gen_psd(3, 2, 11, &tol()).unwrap();
        assert_eq!(a.source(), b.source());
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn rank_one_projection_has_unit_trace() {
        let c = gen_psd(2, 1, 5, &tol()).unwrap();
        assert_eq!(c.rank(), 1);
        assert!((c.projection().trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn full_rank_context_accepts_everything() {
        let c = Arc::new(gen_psd(3, 3, 1, &tol()).unwrap());
        for seed in 0..10 {
            assert!(gen_compatible(&c, seed, Ensemble::Ginibre, 1.0).in_ba(&tol()));
        }
    }

    #[test]
    fn compatible_pattern_for_coordinate_weight() {
        let c = Arc::new(PsdContext::new(linalg::diag_real(&[1.0, 0.0]), &tol()).unwrap());
        for seed in 0..20 {
            let t = gen_compatible(&c, seed, Ensemble::Ginibre, 1.0);
            assert!(t.matrix()[(0, 1)].norm() < 1e-14);
        }
    }

    #[test]
    fn every_ensemble_lands_in_ba() {
        let t = tol();
        for seed in 0..30 {
            let c = Arc::new(gen_psd(4, 1 + (seed as usize % 4), seed, &t).unwrap());
            for e in [Ensemble::Ginibre, Ensemble::NilpotentLift, Ensemble::ASelfadjoint, Ensemble::Sparse, Ensemble::Zero] {
                let op = gen_compatible(&c, seed + 100, e, 1.5);
                assert!(op.in_ba(&t), "{e:?} seed {seed}");
            }
        }
    }

    #[test]
    fn nilpotent_lift_squares_to_null() {
        let t = tol();
        for seed in 0..30 {
            let c = Arc::new(gen_psd(4, 1 + (seed as usize % 4), seed, &t).unwrap());
            let op = gen_compatible(&c, seed, Ensemble::NilpotentLift, 1.0);
            let r = c.a() * op.matrix() * op.matrix();
            assert!(linalg::spectral_norm(&r) < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn a_selfadjoint_ensemble() {
        let t = tol();
        for seed in 0..30 {
            let c = Arc::new(gen_psd(3, 1 + (seed as usize % 3), seed, &t).unwrap());
            assert!(gen_compatible(&c, seed, Ensemble::ASelfadjoint, 1.0).is_a_selfadjoint(&t));
        }
    }

    #[test]
    fn a_unitary_with_identity_weight_is_unitary() {
        let c = Arc::new(PsdContext::new(linalg::identity(3), &tol()).unwrap());
        let u = gen_a_unitary(&c, 9, &tol()).unwrap();
        assert!(linalg::max_abs_diff(&(u.matrix().adjoint() * u.matrix()), &linalg::identity(3)) < 1e-12);
    }

    #[test]
    fn a_unitary_with_singular_weight() {
        let t = tol();
        for seed in 0..10 {
            let c = Arc::new(gen_psd(4, 2, seed, &t).unwrap());
            let u = gen_a_unitary(&c, seed, &t).unwrap();
            assert!(is_a_unitary(&u, &mut rng_from_seed(seed + 1), &t).unwrap());
        }
    }

    #[test]
    fn block_instances_are_reproducible() {
        let spec = GenSpec { n: 3, d: 2, rank: 2, ensemble: Ensemble::Ginibre, scale: 1.0, seed: 42 };
        let a = gen_block_instance(&spec, &tol()).unwrap();
        let b = gen_block_instance(&spec, &tol()).unwrap();
        assert_eq!(a.flatten().matrix(), b.flatten().matrix());
        assert!(a.check_blocks_in_ba(&tol()).is_ok());
    }

    #[test]
    fn spec_validation() {
        let mut spec = GenSpec { n: 2, d: 2, rank: 3, ensemble: Ensemble::Ginibre, scale: 1.0, seed: 0 };
        assert!(spec.validate().is_err());
        spec.rank = 2;
        spec.scale = 0.0;
        assert!(spec.validate().is_err());
    }
}
