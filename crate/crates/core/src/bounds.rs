//! Upper bounds for the `A`-numerical radius of a block operator matrix.
//!
//! Every bound is a function of blockwise quantities: `A`-seminorms of the
//! blocks, `A`-numerical radii of the diagonal blocks, the radii of the
//! off-diagonal pairs `[[0, T_ij], [T_ji, 0]]`, and the row sums
//! `sum_j T_ij T_ij^{#_A}`. [`BlockQuantities`] computes each of those once.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::block::BlockMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::operator::Operator;
use crate::radii;
use crate::tolerance::ToleranceConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    /// Diagonal seminorm plus the root of the row sum of `T T^#`.
    #[serde(rename = "B1_thf1")]
    Thf1,
    /// Diagonal radii plus a quarter of `d + sum ||T_ij||_A^2`.
    #[serde(rename = "B2_r2")]
    R2,
    /// Numerical radius of the matrix of diagonal and off-diagonal pair radii.
    #[serde(rename = "B3_th2")]
    Th2,
    #[serde(rename = "B4_diag_offdiag")]
    DiagOffdiag,
    /// Built from the `A`-real and `A`-imaginary parts of the diagonal.
    #[serde(rename = "B5_re_im")]
    ReIm,
    #[serde(rename = "B6_maxdiag")]
    MaxDiag,
    /// Numerical radius of `[t_ij]` with `t_ii = w_A(T_ii)`, `t_ij = ||T_ij||_A`.
    #[serde(rename = "B7_prior")]
    Prior,
}

impl BoundKind {
    pub const ALL: [BoundKind; 7] = [
        BoundKind::Thf1,
        BoundKind::R2,
        BoundKind::Th2,
        BoundKind::DiagOffdiag,
        BoundKind::ReIm,
        BoundKind::MaxDiag,
        BoundKind::Prior,
    ];

    pub fn key(self) -> &'static str {
        match self {
            BoundKind::Thf1 => "B1_thf1",
            BoundKind::R2 => "B2_r2",
            BoundKind::Th2 => "B3_th2",
            BoundKind::DiagOffdiag => "B4_diag_offdiag",
            BoundKind::ReIm => "B5_re_im",
            BoundKind::MaxDiag => "B6_maxdiag",
            BoundKind::Prior => "B7_prior",
        }
    }

    /// Whether the bound scales linearly under `T -> cT`, `c > 0`.
    /// `R2` carries the constant `d/4` and does not.
    pub fn is_homogeneous(self) -> bool {
        self != BoundKind::R2
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Lazily computed blockwise inputs shared by the bound evaluators.
pub struct BlockQuantities<'a> {
    bm: &'a BlockMatrix,
    tol: &'a ToleranceConfig,
    ops: Vec<Operator>,
    norms: OnceCell<DMatrix<f64>>,
    sharps: OnceCell<Vec<Operator>>,
    diag_omegas: OnceCell<Vec<f64>>,
    row_sums: OnceCell<Vec<(f64, f64)>>,
    pair_radii: OnceCell<DMatrix<f64>>,
    cartesian: OnceCell<Vec<(f64, f64)>>,
}

fn cached<T>(cell: &OnceCell<T>, init: impl FnOnce() -> Result<T>) -> Result<&T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = init()?;
    Ok(cell.get_or_init(|| v))
}

/// `sqrt` that clamps round-off negatives (down to `-1e-12`) to zero.
fn clamped_sqrt(x: f64) -> f64 {
    debug_assert!(x >= -1e-12, "clamped_sqrt: {x}");
    x.max(0.0).sqrt()
}

impl<'a> BlockQuantities<'a> {
    /// Fails with `BlockNotInBA` if any block lacks an `A`-adjoint.
    pub fn new(bm: &'a BlockMatrix, tol: &'a ToleranceConfig) -> Result<Self> {
        bm.check_blocks_in_ba(tol)?;
        let d = bm.d();
        let ops = (0..d * d).map(|k| bm.block_op(k / d, k % d)).collect();
        Ok(Self {
            bm,
            tol,
            ops,
            norms: OnceCell::new(),
            sharps: OnceCell::new(),
            diag_omegas: OnceCell::new(),
            row_sums: OnceCell::new(),
            pair_radii: OnceCell::new(),
            cartesian: OnceCell::new(),
        })
    }

    pub fn d(&self) -> usize {
        self.bm.d()
    }

    fn op(&self, i: usize, j: usize) -> &Operator {
        &self.ops[i * self.d() + j]
    }

    /// `||T_ij||_A`.
    pub fn norms(&self) -> Result<&DMatrix<f64>> {
        cached(&self.norms, || self.bm.hat_matrix(self.tol))
    }

    fn sharps(&self) -> Result<&Vec<Operator>> {
        cached(&self.sharps, || self.ops.iter().map(|t| t.a_adjoint(self.tol)).collect())
    }

    /// `w_A(T_ii)`.
    pub fn diag_omegas(&self) -> Result<&Vec<f64>> {
        cached(&self.diag_omegas, || {
            (0..self.d()).map(|i| radii::a_numerical_radius(self.op(i, i), self.tol)).collect()
        })
    }

    /// `(||sum_j T_ij T_ij^#||_A, ||sum_{j != i} T_ij T_ij^#||_A)` per row.
    pub fn row_sums(&self) -> Result<&Vec<(f64, f64)>> {
        cached(&self.row_sums, || {
            let sharps = self.sharps()?;
            let d = self.d();
            (0..d)
                .map(|i| {
                    let mut off = Operator::zero(std::sync::Arc::clone(self.bm.base_context()));
                    for j in (0..d).filter(|&j| j != i) {
                        off = off.add(&self.op(i, j).compose(&sharps[i * d + j])?)?;
                    }
                    let full = off.add(&self.op(i, i).compose(&sharps[i * d + i])?)?;
                    Ok((full.try_a_op_norm(self.tol)?, off.try_a_op_norm(self.tol)?))
                })
                .collect()
        })
    }

    /// `s_ij = w([[0, T_ij], [T_ji, 0]])` off the diagonal, `w_A(T_ii)` on it.
    ///
    /// `s_ij` and `s_ji` are evaluated independently and must agree to
    /// `1e-10` relative.
    pub fn pair_radii(&self) -> Result<&DMatrix<f64>> {
        cached(&self.pair_radii, || {
            let d = self.d();
            let diag = self.diag_omegas()?;
            let mut s = DMatrix::zeros(d, d);
            for i in 0..d {
                s[(i, i)] = diag[i];
                for j in (i + 1)..d {
                    let upper = radii::omega_offdiag(self.op(i, j), self.op(j, i), self.tol)?;
                    let lower = radii::omega_offdiag(self.op(j, i), self.op(i, j), self.tol)?;
                    if (upper - lower).abs() > 1e-10 * (1.0 + upper.max(lower)) {
                        return Err(Error::AsymmetricRadii { row: i, col: j, upper, lower });
                    }
                    let v = 0.5 * (upper + lower);
                    s[(i, j)] = v;
                    s[(j, i)] = v;
                }
            }
            Ok(s)
        })
    }

    /// `(||Re_A(T_ii)||_A, ||Im_A(T_ii)||_A)`.
    pub fn cartesian_norms(&self) -> Result<&Vec<(f64, f64)>> {
        cached(&self.cartesian, || {
            (0..self.d())
                .map(|i| {
                    let t = self.op(i, i);
                    let re = radii::re_a(t, self.tol)?.try_a_op_norm(self.tol)?;
                    let im = radii::im_a(t, self.tol)?.try_a_op_norm(self.tol)?;
                    Ok((re, im))
                })
                .collect()
        })
    }

    fn offdiag_row_square_sum(&self, i: usize) -> Result<f64> {
        let norms = self.norms()?;
        Ok((0..self.d()).filter(|&j| j != i).map(|j| norms[(i, j)].powi(2)).sum())
    }

    pub fn bound(&self, kind: BoundKind) -> Result<f64> {
        match kind {
            BoundKind::Thf1 => self.thf1(),
            BoundKind::R2 => self.r2(),
            BoundKind::Th2 => self.th2(),
            BoundKind::DiagOffdiag => self.diag_offdiag(),
            BoundKind::ReIm => self.re_im(),
            BoundKind::MaxDiag => self.max_diag(),
            BoundKind::Prior => self.prior(),
        }
    }

    fn thf1(&self) -> Result<f64> {
        let norms = self.norms()?;
        let rows = self.row_sums()?;
        Ok(0.5 * (0..self.d()).map(|i| norms[(i, i)] + clamped_sqrt(rows[i].0)).sum::<f64>())
    }

    fn r2(&self) -> Result<f64> {
        let omegas = self.diag_omegas()?;
        let norms = self.norms()?;
        let squares: f64 = norms.iter().map(|x| x * x).sum();
        Ok(0.5 * omegas.iter().sum::<f64>() + 0.25 * (self.d() as f64 + squares))
    }

    fn th2(&self) -> Result<f64> {
        let s = self.pair_radii()?.map(|x| C64::new(x, 0.0));
        Ok(radii::classical_numerical_radius(&s, self.tol).value)
    }

    fn diag_offdiag(&self) -> Result<f64> {
        let omegas = self.diag_omegas()?;
        let mut total = 0.0;
        for (i, &w) in omegas.iter().enumerate() {
            total += w + clamped_sqrt(w * w + self.offdiag_row_square_sum(i)?);
        }
        Ok(0.5 * total)
    }

    fn re_im(&self) -> Result<f64> {
        let parts = self.cartesian_norms()?;
        let mut total = 0.0;
        for (i, &(re, im)) in parts.iter().enumerate() {
            let off = self.offdiag_row_square_sum(i)?;
            let lambda = re + clamped_sqrt(re * re + off);
            let mu = im + clamped_sqrt(im * im + off);
            total += lambda.hypot(mu);
        }
        Ok(0.5 * total)
    }

    fn max_diag(&self) -> Result<f64> {
        let omegas = self.diag_omegas()?;
        let rows = self.row_sums()?;
        let max_omega = omegas.iter().copied().fold(0.0, f64::max);
        Ok(max_omega + 0.5 * rows.iter().map(|r| clamped_sqrt(r.1)).sum::<f64>())
    }

    /// Uses `w(T) = r(T + T^T) / 2` for entrywise nonnegative `T`.
    fn prior(&self) -> Result<f64> {
        let omegas = self.diag_omegas()?;
        let mut t = self.norms()?.clone();
        for (i, &w) in omegas.iter().enumerate() {
            t[(i, i)] = w;
        }
        Ok(nonnegative_numerical_radius(&t))
    }
}

macro_rules! bound_fn {
    ($(#[$doc:meta])* $name:ident, $kind:expr) => {
        $(#[$doc])*
        pub fn $name(bm: &BlockMatrix, tol: &ToleranceConfig) -> Result<f64> {
            BlockQuantities::new(bm, tol)?.bound($kind)
        }
    };
}

bound_fn!(
    /// `(1/2) sum_i (||T_ii||_A + sqrt ||sum_j T_ij T_ij^#||_A)`.
    bound_thf1,
    BoundKind::Thf1
);
bound_fn!(
    /// `(1/2) sum_i w_A(T_ii) + (1/4)(d + sum_ij ||T_ij||_A^2)`.
    bound_r2,
    BoundKind::R2
);
bound_fn!(
    /// `w(S)` for the symmetric matrix of pair radii.
    bound_th2,
    BoundKind::Th2
);
bound_fn!(
    /// `(1/2) sum_i (w_A(T_ii) + sqrt(w_A(T_ii)^2 + sum_{j != i} ||T_ij||_A^2))`.
    bound_diag_offdiag,
    BoundKind::DiagOffdiag
);
bound_fn!(
    /// `(1/2) sum_i sqrt(lambda_i^2 + mu_i^2)`.
    bound_re_im,
    BoundKind::ReIm
);
bound_fn!(
    /// `max_i w_A(T_ii) + (1/2) sum_i sqrt ||sum_{j != i} T_ij T_ij^#||_A`.
    bound_maxdiag,
    BoundKind::MaxDiag
);
bound_fn!(
    /// `w([t_ij])`, `t_ii = w_A(T_ii)`, `t_ij = ||T_ij||_A`.
    bound_prior,
    BoundKind::Prior
);

/// Per-instance record of `w_A` of the block matrix against all seven bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub instance_id: String,
    pub omega: f64,
    pub bounds: BTreeMap<BoundKind, f64>,
    /// `bound - omega`
    pub gaps: BTreeMap<BoundKind, f64>,
    pub holds: BTreeMap<BoundKind, bool>,
    /// `Th2 <= Prior + cmp_atol`
    pub refinement_ok: bool,
    /// Wall time per bound. Not serialized, so reports stay reproducible.
    #[serde(skip)]
    pub timing: BTreeMap<BoundKind, Duration>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.holds.values().all(|&h| h) && self.refinement_ok
    }

    pub fn min_gap(&self) -> f64 {
        self.gaps.values().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn failed(&self) -> impl Iterator<Item = BoundKind> + '_ {
        self.holds.iter().filter(|(_, &h)| !h).map(|(&k, _)| k)
    }

    pub fn csv_header() -> String {
        let mut cols = vec!["instance_id".to_string(), "omega".to_string()];
        cols.extend(BoundKind::ALL.iter().map(|k| k.key().to_string()));
        cols.push("min_gap".into());
        cols.push("all_hold".into());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![self.instance_id.clone(), format!("{:e}", self.omega)];
        cols.extend(BoundKind::ALL.iter().map(|k| format!("{:e}", self.bounds[k])));
        cols.push(format!("{:e}", self.min_gap()));
        cols.push(self.all_hold().to_string());
        cols.join(",")
    }
}

/// `w_A` of the flattened block matrix, every bound, and the comparison flags.
pub fn evaluate_all(bm: &BlockMatrix, tol: &ToleranceConfig, instance_id: &str) -> Result<BoundReport> {
    evaluate_all_with(bm, tol, instance_id, &|_, v| v)
}

/// As [`evaluate_all`], passing each bound through `adjust` before it is
/// compared. Used to exercise the violation reporting path.
pub fn evaluate_all_with(
    bm: &BlockMatrix,
    tol: &ToleranceConfig,
    instance_id: &str,
    adjust: &dyn Fn(BoundKind, f64) -> f64,
) -> Result<BoundReport> {
    let run = || -> Result<BoundReport> {
        let quantities = BlockQuantities::new(bm, tol)?;
        let omega = radii::a_numerical_radius(&bm.flatten(), tol)?;
        let slack = tol.slack(omega);
        let mut report = BoundReport {
            instance_id: instance_id.to_string(),
            omega,
            bounds: BTreeMap::new(),
            gaps: BTreeMap::new(),
            holds: BTreeMap::new(),
            refinement_ok: false,
            timing: BTreeMap::new(),
        };
        for kind in BoundKind::ALL {
            let start = Instant::now();
            let value = adjust(kind, quantities.bound(kind)?);
            report.timing.insert(kind, start.elapsed());
            report.bounds.insert(kind, value);
            report.gaps.insert(kind, value - omega);
            report.holds.insert(kind, value >= omega - slack);
        }
        report.refinement_ok = report.bounds[&BoundKind::Th2] <= report.bounds[&BoundKind::Prior] + tol.cmp_atol;
        Ok(report)
    };
    run().map_err(|e| e.in_instance(instance_id))
}

/// `w(T) = r(T + T^T) / 2`, valid for entrywise nonnegative `T`.
pub fn nonnegative_numerical_radius(t: &DMatrix<f64>) -> f64 {
    let sym = (t + t.transpose()).map(|x| C64::new(x, 0.0));
    0.5 * linalg::spectral_radius(&sym)
}
