//! Operators on a finite-dimensional space carrying the semi-inner product
//! `<x|y>_A = <Ax|y>` of a positive semidefinite matrix `A`.
//!
//! * [`PsdContext`] holds `A` with its truncated spectral decomposition and the
//!   derived square root, pseudoinverses and range projection.
//! * [`Operator`] is a matrix bound to a context: `A`-adjoint, `A`-seminorm and
//!   the reduction `A^{1/2} T (A^{1/2})^+` on which `A`-quantities become
//!   classical ones.
//! * [`radii`] computes `A`-numerical and `A`-spectral radii, each validated by
//!   an independent second route.
//! * [`BlockMatrix`] assembles `d x d` operator matrices over `diag(A, ..., A)`.
//! * [`bounds`] evaluates seven upper bounds for the numerical radius of a
//!   block matrix.
//! * [`generate`], [`campaign`] and [`suites`] draw random instances and check
//!   the bounds and identities at scale.

pub mod block;
pub mod bounds;
pub mod campaign;
pub mod context;
pub mod error;
pub mod generate;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod radii;
pub mod suites;
pub mod tolerance;

pub use block::{BlockMatrix, Shape};
pub use bounds::{evaluate_all, BoundKind, BoundReport};
pub use campaign::{run_campaign, CampaignConfig, CampaignSummary};
pub use context::PsdContext;
pub use error::{Error, Result};
pub use generate::{Ensemble, GenSpec};
pub use linalg::{CMatrix, C64};
pub use operator::Operator;
pub use radii::{a_numerical_radius, a_spectral_radius};
pub use tolerance::ToleranceConfig;
