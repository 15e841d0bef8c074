use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every computation in the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Eigenvalues of `A` below `rank_rtol * lambda_max` are treated as zero.
    pub rank_rtol: f64,
    /// Absolute slack for inequality and membership predicates.
    pub cmp_atol: f64,
    /// Number of uniform grid points on `[0, 2pi)` for theta suprema.
    pub theta_samples: usize,
    /// Bracket width at which golden-section refinement stops.
    pub theta_refine_tol: f64,
    /// Largest power used by the Gelfand cross-check.
    pub gelfand_max_power: u32,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rtol: 1e-10,
            cmp_atol: 1e-8,
            theta_samples: 1024,
            theta_refine_tol: 1e-12,
            gelfand_max_power: 64,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rank_rtol", self.rank_rtol),
            ("cmp_atol", self.cmp_atol),
            ("theta_refine_tol", self.theta_refine_tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if self.theta_samples < 8 {
            return Err(Error::InvalidConfig(format!(
                "theta_samples must be at least 8, got {}",
                self.theta_samples
            )));
        }
        if self.gelfand_max_power == 0 {
            return Err(Error::InvalidConfig("gelfand_max_power must be positive".into()));
        }
        Ok(())
    }

    /// Slack used when comparing a value of magnitude `scale` against a bound.
    pub fn slack(&self, scale: f64) -> f64 {
        self.cmp_atol * (1.0 + scale.abs())
    }
}
