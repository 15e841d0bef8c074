//! Numerical and spectral radii, classical and `A`-weighted.
//!
//! The `A`-weighted quantities are computed on the reduction of the operator
//! (see [`Operator::reduce`]). When the operator admits an `A`-adjoint the
//! numerical radius is also evaluated through
//! `w_A(T) = sup_theta ||Re_A(e^{i theta} T)||_A` and the two values must agree.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, I};
use crate::operator::Operator;
use crate::tolerance::ToleranceConfig;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaSearchResult {
    pub value: f64,
    /// In `[0, 2pi)`.
    pub argmax_theta: f64,
    pub samples: usize,
    /// True when the reported maximum came from golden-section refinement
    /// rather than from a grid point.
    pub refined: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const NEIGHBORHOODS: usize = 3;

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best_x, mut best_f) = if f2 > f1 { (x2, f2) } else { (x1, f1) };
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 > best_f {
                best_x = x1;
                best_f = f1;
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 > best_f {
                best_x = x2;
                best_f = f2;
            }
        }
    }
    (best_x, best_f)
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// `sup_theta objective(theta)` over `[0, 2pi)`.
///
/// Evaluates a uniform grid of `theta_samples` points, then runs golden-section
/// search on `[theta_k - h, theta_k + h]` around the three best local maxima of
/// the grid. Ties resolve to the smaller angle. The result is never below the
/// best grid value.
pub fn theta_supremum(objective: impl Fn(f64) -> f64, tol: &ToleranceConfig) -> ThetaSearchResult {
    let n = tol.theta_samples.max(8);
    let h = TAU / n as f64;
    let grid = (0..n).map(|k| objective(k as f64 * h)).collect();
    refine_grid(grid, &objective, tol)
}

/// As [`theta_supremum`] for an objective with period `pi`: grid points in the
/// second half-turn reuse the first half's values.
pub(crate) fn theta_supremum_half_period(objective: impl Fn(f64) -> f64, tol: &ToleranceConfig) -> ThetaSearchResult {
    let n = tol.theta_samples.max(8);
    if n % 2 == 1 {
        return theta_supremum(objective, tol);
    }
    let h = TAU / n as f64;
    let half: Vec<f64> = (0..n / 2).map(|k| objective(k as f64 * h)).collect();
    let grid = half.iter().chain(half.iter()).copied().collect();
    refine_grid(grid, &objective, tol)
}

fn refine_grid(grid: Vec<f64>, objective: &impl Fn(f64) -> f64, tol: &ToleranceConfig) -> ThetaSearchResult {
    let n = grid.len();
    let h = TAU / n as f64;
    let mut best = ThetaSearchResult { value: grid[0], argmax_theta: 0.0, samples: n, refined: false };
    for (k, &v) in grid.iter().enumerate() {
        if v > best.value {
            best.value = v;
            best.argmax_theta = k as f64 * h;
        }
    }

    let mut peaks: Vec<usize> = (0..n)
        .filter(|&k| grid[k] >= grid[(k + n - 1) % n] && grid[k] >= grid[(k + 1) % n])
        .collect();
    peaks.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]).then(a.cmp(&b)));
    peaks.truncate(NEIGHBORHOODS);

    for k in peaks {
        let centre = k as f64 * h;
        let (x, v) = golden_max(objective, centre - h, centre + h, tol.theta_refine_tol);
        let x = wrap_angle(x);
        if v > best.value || (v == best.value && x < best.argmax_theta) {
            best.refined = v > best.value || best.refined;
            best.value = v;
            best.argmax_theta = x;
        }
    }
    best
}

/// `w(M) = sup_theta lambda_max((e^{i theta} M + e^{-i theta} M*) / 2)`.
///
/// The Hermitian family `H(theta) = cos(theta) Re M - sin(theta) Im M` is odd
/// under `theta -> theta + pi`, so one eigenvalue solve at `theta` supplies the
/// grid values at both `theta` (largest eigenvalue) and `theta + pi` (minus the
/// smallest).
pub fn classical_numerical_radius(m: &CMatrix, tol: &ToleranceConfig) -> ThetaSearchResult {
    assert_eq!(m.nrows(), m.ncols(), "numerical radius of a non-square matrix");
    if m.is_empty() {
        return ThetaSearchResult { value: 0.0, argmax_theta: 0.0, samples: 0, refined: false };
    }
    let re = linalg::hermitian_part(m);
    let im = linalg::imaginary_part(m);
    let family = |theta: f64| {
        let (s, c) = theta.sin_cos();
        &re * C64::new(c, 0.0) - &im * C64::new(s, 0.0)
    };
    let objective = |theta: f64| linalg::max_eigenvalue(&family(theta));
    let n = tol.theta_samples.max(8);
    if n % 2 == 1 {
        return theta_supremum(objective, tol);
    }
    let h = TAU / n as f64;
    let mut grid = vec![0.0; n];
    for k in 0..n / 2 {
        let (lo, hi) = linalg::extreme_eigenvalues(&family(k as f64 * h));
        grid[k] = hi;
        grid[k + n / 2] = -lo;
    }
    refine_grid(grid, &objective, tol)
}

/// Largest eigenvalue modulus.
pub fn classical_spectral_radius(m: &CMatrix) -> f64 {
    linalg::spectral_radius(m)
}

/// `Re_A(T) = (T + T^{#_A}) / 2`.
pub fn re_a(op: &Operator, tol: &ToleranceConfig) -> Result<Operator> {
    let sharp = op.a_adjoint(tol)?;
    Ok(op.add(&sharp)?.scale(C64::new(0.5, 0.0)))
}

/// `Im_A(T) = (T - T^{#_A}) / 2i`.
pub fn im_a(op: &Operator, tol: &ToleranceConfig) -> Result<Operator> {
    let sharp = op.a_adjoint(tol)?;
    Ok(op.sub(&sharp)?.scale(C64::new(1.0, 0.0) / (I * 2.0)))
}

/// Both routes to `w_A(T)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NumericalRadius {
    pub value: f64,
    /// Search on the reduction (authoritative).
    pub reduced: ThetaSearchResult,
    /// `sup_theta ||Re_A(e^{i theta} T)||_A`; present when `T` is in `B_A`.
    pub formula: Option<ThetaSearchResult>,
}

/// `w_A(T)`, validated against the theta formula when `T` admits an `A`-adjoint.
pub fn a_numerical_radius(op: &Operator, tol: &ToleranceConfig) -> Result<f64> {
    Ok(a_numerical_radius_detailed(op, tol)?.value)
}

pub fn a_numerical_radius_detailed(op: &Operator, tol: &ToleranceConfig) -> Result<NumericalRadius> {
    let reduced_matrix = op.reduce_on_range(tol)?;
    let reduced = classical_numerical_radius(&reduced_matrix, tol);
    let formula = if op.in_ba(tol) {
        let sharp = op.a_adjoint(tol)?;
        // Re_A(e^{i theta} T) = (e^{i theta} T + e^{-i theta} T^#) / 2; the
        // reduction is linear, so reduce the two summands once.
        let rt = reduced_matrix;
        let rs = sharp.compress_unchecked();
        let route = theta_supremum_half_period(
            |theta| {
                let z = C64::from_polar(0.5, theta);
                linalg::spectral_norm(&(&rt * z + &rs * z.conj()))
            },
            tol,
        );
        if (route.value - reduced.value).abs() > tol.slack(reduced.value) {
            return Err(Error::RouteDisagreement { reduced: reduced.value, formula: route.value });
        }
        Some(route)
    } else {
        None
    };
    Ok(NumericalRadius { value: reduced.value, reduced, formula })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralRadius {
    pub value: f64,
    /// `(n, ||T^n||_A^{1/n})` for `n = 1, 2, 4, ...`.
    pub gelfand: Vec<(u32, f64)>,
    /// `(last - value) / max(value, tiny)` at the largest power.
    pub last_relative_gap: f64,
}

pub fn a_spectral_radius(op: &Operator, tol: &ToleranceConfig) -> Result<f64> {
    Ok(a_spectral_radius_detailed(op, tol)?.value)
}

/// `r_A(T)` from the spectrum of the reduction, cross-checked against the
/// Gelfand sequence `||T^n||_A^{1/n}`, which must never fall below it.
pub fn a_spectral_radius_detailed(op: &Operator, tol: &ToleranceConfig) -> Result<SpectralRadius> {
    let value = classical_spectral_radius(&op.reduce_on_range(tol)?);
    let gelfand = gelfand_sequence(op, value, tol)?;
    let last = gelfand.last().map(|&(_, v)| v).unwrap_or(value);
    let last_relative_gap = (last - value) / value.max(f64::MIN_POSITIVE);
    Ok(SpectralRadius { value, gelfand, last_relative_gap })
}

/// `(n, ||T^n||_A^{1/n})` for `n = 1, 2, 4, ..., gelfand_max_power`, failing
/// as soon as a term is certainly below `radius`.
fn gelfand_sequence(op: &Operator, radius: f64, tol: &ToleranceConfig) -> Result<Vec<(u32, f64)>> {
    let seminorm = op.try_a_op_norm(tol)?;
    if seminorm == 0.0 {
        return Ok(vec![(1, 0.0)]);
    }
    // Powers of P T P have the same A-seminorms as powers of T when T is
    // A-bounded, and they drop the null-space block. That block never affects
    // a seminorm, but left in place it can grow like ||Z||^n and swamp the
    // range block with round-off.
    let p = op.context().projection();
    let compressed = Operator::new(p * op.matrix() * p, Arc::clone(op.context()))?;
    // Dividing by (roughly) the spectral radius keeps ||M^n|| near 1: it
    // cannot underflow into round-off, and the 1e-3 floor caps its growth.
    let unit = radius.max(1e-3 * seminorm);
    // The primary value of a defective matrix is only accurate to about
    // eps^{1/k} ||T|| (k the Jordan block size), and each squaring adds
    // round-off of about dim eps ||M^n||^2. The check therefore compares
    // against the largest root consistent with the accumulated error bound;
    // for an index-k nilpotent that is again of order eps^{1/k} ||T||.
    let allowance = tol.slack(seminorm) + f64::EPSILON.sqrt() * seminorm;
    let product_eps = op.dim() as f64 * f64::EPSILON;
    let mut power = compressed.scale(C64::new(1.0 / unit, 0.0));
    let mut error = 0.0;
    let mut sequence = Vec::new();
    let mut n = 1u32;
    loop {
        let norm = linalg::spectral_norm(&power.compress_unchecked());
        let exponent = 1.0 / n as f64;
        let root = norm.powf(exponent) * unit;
        if (norm + error).powf(exponent) * unit < radius - allowance {
            return Err(Error::GelfandDivergence { power: n, value: root, radius });
        }
        sequence.push((n, root));
        if n.saturating_mul(2) > tol.gelfand_max_power {
            return Ok(sequence);
        }
        power = power.compose(&power)?;
        error = 2.0 * norm * error + error * error + product_eps * norm * norm;
        n *= 2;
    }
}

/// `(1/2) sup_theta ||e^{i theta} T + e^{-i theta} S^{#_A}||_A`, the numerical
/// radius of the off-diagonal block matrix `[[0, T], [S, 0]]` over `diag(A, A)`.
pub fn omega_offdiag(t: &Operator, s: &Operator, tol: &ToleranceConfig) -> Result<f64> {
    let s_sharp = s.a_adjoint(tol)?;
    if !t.in_ba(tol) {
        return Err(Error::NotInBA(t.ba_residual()));
    }
    t.check_same_context(s)?;
    let rt = t.compress_unchecked();
    let rs = s_sharp.compress_unchecked();
    let search = theta_supremum_half_period(
        |theta| {
            let z = C64::from_polar(1.0, theta);
            linalg::spectral_norm(&(&rt * z + &rs * z.conj()))
        },
        tol,
    );
    Ok(0.5 * search.value)
}

#[cfg(test)]
mod tests {

    use approx::assert_relative_eq;

    use super::*;
    use crate::context::PsdContext;
    use crate::linalg::{complex_matrix, diag_real, identity, max_abs_diff, real_matrix};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn ctx(a: CMatrix) -> Arc<PsdContext> {
        Arc::new(PsdContext::new(a, &tol()).unwrap())
    }

    fn op(c: &Arc<PsdContext>, t: CMatrix) -> Operator {
        Operator::new(t, Arc::clone(c)).unwrap()
    }

    #[test]
    fn golden_section_finds_interior_peak() {
        let (x, v) = golden_max(&|x: f64| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(v <= 0.0 && v > -1e-12);
    }

    #[test]
    fn theta_search_reports_argmax_in_range() {
        let r = theta_supremum(|t| (t - 5.0).cos(), &tol());
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-15);
        assert!((r.argmax_theta - 5.0).abs() < 1e-6);
        assert!((0.0..TAU).contains(&r.argmax_theta));
    }

    #[test]
    fn theta_search_wraps_peak_at_zero() {
        let r = theta_supremum(|t| (t + 1e-3).cos(), &tol());
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-15);
        assert!((r.argmax_theta - (TAU - 1e-3)).abs() < 1e-6);
    }

    #[test]
    fn classical_radius_examples() {
        let t = tol();
        assert_relative_eq!(classical_numerical_radius(&real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]), &t).value, 0.5, epsilon = 1e-14);
        assert_relative_eq!(classical_numerical_radius(&diag_real(&[1.0, -1.0]), &t).value, 1.0, epsilon = 1e-14);
        assert_relative_eq!(classical_numerical_radius(&real_matrix(2, 2, &[0.0, 2.0, 0.0, 0.0]), &t).value, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn spectral_radius_examples() {
        assert!(classical_spectral_radius(&real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0])) < 1e-14);
        assert_relative_eq!(classical_spectral_radius(&diag_real(&[3.0, -5.0])), 5.0, epsilon = 1e-14);
        assert_relative_eq!(classical_spectral_radius(&real_matrix(2, 2, &[0.0, 2.0, 3.0, 0.0])), 6f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn cartesian_decomposition_with_identity_weight() {
        let c = ctx(identity(2));
        let t = op(&c, real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        let re = re_a(&t, &tol()).unwrap();
        let im = im_a(&t, &tol()).unwrap();
        assert!(max_abs_diff(re.matrix(), &real_matrix(2, 2, &[0.0, 0.5, 0.5, 0.0])) < 1e-15);
        let expected = complex_matrix(2, 2, &[(0.0, 0.0), (0.0, -0.5), (0.0, 0.5), (0.0, 0.0)]);
        assert!(max_abs_diff(im.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn cartesian_decomposition_with_singular_weight() {
        let c = ctx(diag_real(&[1.0, 0.0]));
        let t = op(&c, real_matrix(2, 2, &[1.0, 0.0, 3.0, 4.0]));
        let re = re_a(&t, &tol()).unwrap();
        assert!(max_abs_diff(re.matrix(), &real_matrix(2, 2, &[1.0, 0.0, 1.5, 2.0])) < 1e-15);
        assert!(re.is_a_selfadjoint(&tol()));
        // T is A-selfadjoint, so A Im_A(T) vanishes
        let im = im_a(&t, &tol()).unwrap();
        assert!((c.a() * im.matrix()).norm() < 1e-15);
    }

    #[test]
    fn a_numerical_radius_examples() {
        let c = ctx(identity(2));
        assert_relative_eq!(a_numerical_radius(&op(&c, real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0])), &tol()).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(a_numerical_radius(&op(&c, diag_real(&[1.0, -1.0])), &tol()).unwrap(), 1.0, epsilon = 1e-12);
        let c = ctx(diag_real(&[1.0, 0.0]));
        let detail = a_numerical_radius_detailed(&op(&c, real_matrix(2, 2, &[1.0, 0.0, 3.0, 4.0])), &tol()).unwrap();
        assert_relative_eq!(detail.value, 1.0, epsilon = 1e-12);
        assert!(detail.formula.is_some());
    }

    #[test]
    fn a_spectral_radius_examples() {
        let c = ctx(identity(2));
        assert!(a_spectral_radius(&op(&c, real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0])), &tol()).unwrap() < 1e-12);
        let detail = a_spectral_radius_detailed(&op(&c, diag_real(&[1.0, -1.0])), &tol()).unwrap();
        assert_relative_eq!(detail.value, 1.0, epsilon = 1e-12);
        assert_eq!(detail.gelfand.last().unwrap().0, 64);
        assert!(detail.last_relative_gap.abs() < 1e-10);
    }

    #[test]
    fn unbounded_operator_is_rejected() {
        let c = ctx(diag_real(&[1.0, 0.0]));
        let t = op(&c, real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        assert!(matches!(a_numerical_radius(&t, &tol()), Err(Error::NotABounded(_))));
        assert!(matches!(a_spectral_radius(&t, &tol()), Err(Error::NotABounded(_))));
    }

    #[test]
    fn offdiag_examples() {
        let c = ctx(identity(2));
        let id = Operator::identity(Arc::clone(&c));
        assert_relative_eq!(omega_offdiag(&id, &id, &tol()).unwrap(), 1.0, epsilon = 1e-12);

        let t = op(&c, complex_matrix(2, 2, &[(0.4, 1.0), (2.0, 0.0), (-1.0, 0.5), (0.0, 0.3)]));
        let zero = Operator::zero(Arc::clone(&c));
        let norm = t.try_a_op_norm(&tol()).unwrap();
        assert_relative_eq!(omega_offdiag(&t, &zero, &tol()).unwrap(), 0.5 * norm, epsilon = 1e-12);

        let j = op(&c, real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        let jt = op(&c, real_matrix(2, 2, &[0.0, 0.0, 1.0, 0.0]));
        // S^# = J, so the objective is 2 |cos theta|
        assert_relative_eq!(omega_offdiag(&j, &jt, &tol()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gelfand_flags_an_overstated_radius() {
        let t = tol();
        let ctx = Arc::new(PsdContext::new(linalg::diag_real(&[2.0, 1.0, 0.0]), &t).unwrap());
        let m = linalg::real_matrix(3, 3, &[0.5, 1.0, 0.0, 0.0, 0.3, 0.0, 1.0, 2.0, 0.7]);
        let op = Operator::new(m, ctx).unwrap();
        let r = a_spectral_radius(&op, &t).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert!(gelfand_sequence(&op, r, &t).is_ok());
        assert!(matches!(gelfand_sequence(&op, 0.55, &t), Err(Error::GelfandDivergence { .. })));
    }

    #[test]
    fn gelfand_accepts_exactly_nilpotent_operators() {
        let t = tol();
        let ctx = Arc::new(PsdContext::new(linalg::identity(4), &t).unwrap());
        // strictly upper triangular: index-4 nilpotent, Schur eigenvalues are
        // only accurate to about eps^{1/4}
        let m = linalg::real_matrix(4, 4, &[0., 1., 2., 3., 0., 0., 1., 2., 0., 0., 0., 1., 0., 0., 0., 0.]);
        let s = a_spectral_radius_detailed(&Operator::new(m, ctx).unwrap(), &t).unwrap();
        assert!(s.value < 1e-3);
    }
}
