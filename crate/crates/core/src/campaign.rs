//! Randomized verification campaigns.
//!
//! A campaign draws `trials` block matrices from each [`GenSpec`], evaluates
//! every bound against `w_A`, and checks a fixed set of invariants on the
//! flattened operator. Instances run in parallel, each one sequentially, and
//! results are merged in instance order, so the reports depend only on the
//! configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block::BlockMatrix;
use crate::bounds::{self, BoundKind, BoundReport};
use crate::error::{Error, Result};
use crate::generate::{self, GenSpec};
use crate::linalg;
use crate::radii;
use crate::tolerance::ToleranceConfig;

/// Gap below which `Th2` counts as a strict improvement on `Prior`.
pub const STRICT_REFINEMENT_GAP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl ReportFormat {
    pub fn file_name(self) -> &'static str {
        match self {
            ReportFormat::Json => "reports.jsonl",
            ReportFormat::Csv => "reports.csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub dir: PathBuf,
    #[serde(default)]
    pub format: ReportFormat,
}

/// Multiplies one bound by `factor` before it is compared with `w_A`.
/// Only meant for exercising the violation path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundFault {
    pub bound: BoundKind,
    pub factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    /// Draws per generator; trial `t` of a generator uses seed `gen.seed + t`.
    pub trials: usize,
    pub gens: Vec<GenSpec>,
    #[serde(default)]
    pub tol: ToleranceConfig,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    /// Worker threads; 0 lets the thread pool decide.
    #[serde(default)]
    pub parallelism: usize,
    #[serde(skip)]
    pub fault: Option<BoundFault>,
}

impl CampaignConfig {
    pub fn new(trials: usize, gens: Vec<GenSpec>) -> Self {
        CampaignConfig { trials, gens, tol: ToleranceConfig::default(), output: None, parallelism: 0, fault: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.gens.is_empty() {
            return Err(Error::InvalidConfig("no generators configured".into()));
        }
        for g in &self.gens {
            g.validate()?;
        }
        self.tol.validate()
    }

    /// Every instance of the campaign, in report order.
    pub fn instances(&self) -> Vec<(String, GenSpec)> {
        let mut out = Vec::with_capacity(self.trials * self.gens.len());
        for (g, gen) in self.gens.iter().enumerate() {
            for t in 0..self.trials {
                let spec = GenSpec { seed: gen.seed.wrapping_add(t as u64), ..gen.clone() };
                let id = format!(
                    "g{g}-d{}-n{}-r{}-{}-s{}",
                    spec.d,
                    spec.n,
                    spec.rank,
                    spec.ensemble.name(),
                    spec.seed
                );
                out.push((id, spec));
            }
        }
        out
    }
}

/// `lhs <= rhs` up to `cmp_atol * (1 + max(|lhs|, |rhs|))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InvariantCheck {
    fn new(name: &str, lhs: f64, rhs: f64, tol: &ToleranceConfig) -> Self {
        let holds = lhs <= rhs + tol.slack(lhs.abs().max(rhs.abs()));
        InvariantCheck { name: name.to_string(), lhs, rhs, holds }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub instance_id: String,
    pub spec: GenSpec,
    pub report: Option<BoundReport>,
    pub invariants: Vec<InvariantCheck>,
    pub error: Option<String>,
}

impl InstanceOutcome {
    pub fn violations(&self) -> Vec<Violation> {
        let id = &self.instance_id;
        let mut out = Vec::new();
        if let Some(e) = &self.error {
            out.push(Violation { instance_id: id.clone(), check: "error".into(), detail: e.clone() });
        }
        if let Some(r) = &self.report {
            for kind in r.failed() {
                out.push(Violation {
                    instance_id: id.clone(),
                    check: kind.key().into(),
                    detail: format!("bound {} below omega {}", r.bounds[&kind], r.omega),
                });
            }
            if !r.refinement_ok {
                out.push(Violation {
                    instance_id: id.clone(),
                    check: "refinement".into(),
                    detail: format!(
                        "{} = {} exceeds {} = {}",
                        BoundKind::Th2.key(),
                        r.bounds[&BoundKind::Th2],
                        BoundKind::Prior.key(),
                        r.bounds[&BoundKind::Prior]
                    ),
                });
            }
        }
        for c in self.invariants.iter().filter(|c| !c.holds) {
            out.push(Violation {
                instance_id: id.clone(),
                check: c.name.clone(),
                detail: format!("{} > {}", c.lhs, c.rhs),
            });
        }
        out
    }

    fn csv_row(&self) -> String {
        let invariants_ok = self.invariants.iter().all(|c| c.holds);
        let error = self.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        match &self.report {
            Some(r) => format!("{},{invariants_ok},{error}", r.csv_row()),
            None => {
                let blanks = ",".repeat(BoundKind::ALL.len() + 3);
                format!("{}{blanks},{invariants_ok},{error}", self.instance_id)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub instance_id: String,
    /// Bound key, invariant name, `refinement`, or `error`.
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub instances: usize,
    pub violations: usize,
    pub violation_details: Vec<Violation>,
    /// Smallest `bound - omega` seen per bound.
    pub min_gap: BTreeMap<BoundKind, f64>,
    /// Instances with `Th2 < Prior - STRICT_REFINEMENT_GAP`.
    pub strict_refinements: usize,
    /// Largest `Prior - Th2`.
    pub max_refinement_margin: f64,
    pub wall_time_secs: f64,
}

impl CampaignSummary {
    /// 0 when nothing was violated, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.violations > 0)
    }
}

#[derive(Clone, Debug)]
pub struct CampaignRun {
    pub summary: CampaignSummary,
    pub outcomes: Vec<InstanceOutcome>,
}

/// Invariants of the flattened operator checked on every instance.
pub fn instance_invariants(bm: &BlockMatrix, omega: f64, tol: &ToleranceConfig) -> Result<Vec<InvariantCheck>> {
    let t = bm.flatten();
    let lifted = bm.lifted_context();
    let norm = t.try_a_op_norm(tol)?;
    let norm_sq = t.pow(2).try_a_op_norm(tol)?;
    let r = radii::a_spectral_radius(&t, tol)?;
    let hat = bm.hat_matrix(tol)?;
    let hat_c = hat.map(|x| linalg::C64::new(x, 0.0));
    let sharp = t.a_adjoint(tol)?;
    let douglas = linalg::spectral_norm(&(lifted.a() * sharp.matrix() - t.matrix().adjoint() * lifted.a()))
        / (1.0 + lifted.norm() * linalg::spectral_norm(t.matrix()));
    let blockwise = bm.block_sharp(tol)?.flatten();
    let sharp_routes = linalg::max_abs_diff(blockwise.matrix(), sharp.matrix()) / (1.0 + norm);
    Ok(vec![
        InvariantCheck::new("half_norm_le_omega", 0.5 * norm, omega, tol),
        InvariantCheck::new("omega_le_norm", omega, norm, tol),
        InvariantCheck::new("omega_le_power_mean", omega, 0.5 * (norm + norm_sq.sqrt()), tol),
        InvariantCheck::new("spectral_le_omega", r, omega, tol),
        InvariantCheck::new("spectral_le_hat_spectral", r, linalg::spectral_radius(&hat_c), tol),
        InvariantCheck::new("norm_le_hat_norm", norm, linalg::spectral_norm(&hat_c), tol),
        InvariantCheck::new("douglas_residual", douglas, 0.0, tol),
        InvariantCheck::new("block_sharp_routes", sharp_routes, 0.0, tol),
    ])
}

fn run_instance(id: String, spec: GenSpec, cfg: &CampaignConfig) -> InstanceOutcome {
    let tol = &cfg.tol;
    let fault = cfg.fault;
    let adjust = move |kind: BoundKind, v: f64| match fault {
        Some(f) if f.bound == kind => v * f.factor,
        _ => v,
    };
    let result = generate::gen_block_instance(&spec, tol).and_then(|bm| {
        let report = bounds::evaluate_all_with(&bm, tol, &id, &adjust)?;
        let invariants = instance_invariants(&bm, report.omega, tol).map_err(|e| e.in_instance(&id))?;
        Ok((report, invariants))
    });
    match result {
        Ok((report, invariants)) => {
            InstanceOutcome { instance_id: id, spec, report: Some(report), invariants, error: None }
        }
        Err(e) => {
            InstanceOutcome { instance_id: id, spec, report: None, invariants: Vec::new(), error: Some(e.to_string()) }
        }
    }
}

/// Runs the campaign and, when `cfg.output` is set, writes the per-instance
/// reports and `summary.json` into the output directory.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignRun> {
    cfg.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let instances = cfg.instances();
    let outcomes: Vec<InstanceOutcome> =
        pool.install(|| instances.into_par_iter().map(|(id, spec)| run_instance(id, spec, cfg)).collect());

    let mut min_gap: BTreeMap<BoundKind, f64> = BTreeMap::new();
    let mut strict_refinements = 0;
    let mut max_refinement_margin = f64::NEG_INFINITY;
    let mut violation_details = Vec::new();
    for o in &outcomes {
        violation_details.extend(o.violations());
        if let Some(r) = &o.report {
            for (&k, &g) in &r.gaps {
                let e = min_gap.entry(k).or_insert(f64::INFINITY);
                *e = e.min(g);
            }
            let margin = r.bounds[&BoundKind::Prior] - r.bounds[&BoundKind::Th2];
            max_refinement_margin = max_refinement_margin.max(margin);
            if margin > STRICT_REFINEMENT_GAP {
                strict_refinements += 1;
            }
        }
    }
    let summary = CampaignSummary {
        instances: outcomes.len(),
        violations: violation_details.len(),
        violation_details,
        min_gap,
        strict_refinements,
        max_refinement_margin,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    let run = CampaignRun { summary, outcomes };
    if let Some(out) = &cfg.output {
        write_outputs(&run, out)?;
    }
    Ok(run)
}

/// Report file contents for `outcomes` in the given format.
pub fn render_reports(outcomes: &[InstanceOutcome], format: ReportFormat) -> Result<String> {
    let mut text = String::new();
    match format {
        ReportFormat::Json => {
            for o in outcomes {
                text.push_str(&serde_json::to_string(o)?);
                text.push('\n');
            }
        }
        ReportFormat::Csv => {
            text.push_str(&BoundReport::csv_header());
            text.push_str(",invariants_ok,error\n");
            for o in outcomes {
                text.push_str(&o.csv_row());
                text.push('\n');
            }
        }
    }
    Ok(text)
}

fn write_outputs(run: &CampaignRun, out: &OutputSpec) -> Result<()> {
    fs::create_dir_all(&out.dir).map_err(|e| Error::io(&out.dir, e))?;
    let reports = out.dir.join(out.format.file_name());
    fs::write(&reports, render_reports(&run.outcomes, out.format)?).map_err(|e| Error::io(&reports, e))?;
    crate::io::write_json(&out.dir.join("summary.json"), &run.summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::Ensemble;

    fn gen(d: usize, n: usize, rank: usize, ensemble: Ensemble) -> GenSpec {
        GenSpec { n, d, rank, ensemble, scale: 1.0, seed: 0 }
    }

    #[test]
    fn zero_instance_shows_the_constant_floor() {
        let cfg = CampaignConfig::new(1, vec![gen(3, 2, 1, Ensemble::Zero)]);
        let run = run_campaign(&cfg).unwrap();
        assert_eq!(run.summary.instances, 1);
        assert_eq!(run.summary.violations, 0);
        let r = run.outcomes[0].report.as_ref().unwrap();
        assert_eq!(r.omega, 0.0);
        assert!((r.bounds[&BoundKind::R2] - 0.75).abs() < 1e-12);
        assert!(r.bounds.iter().filter(|(k, _)| **k != BoundKind::R2).all(|(_, &v)| v.abs() < 1e-12));
    }

    #[test]
    fn small_mixed_campaign_is_clean() {
        let gens = vec![
            gen(2, 2, 1, Ensemble::Ginibre),
            gen(3, 3, 2, Ensemble::Sparse),
            gen(2, 3, 3, Ensemble::NilpotentLift),
            gen(2, 2, 2, Ensemble::ASelfadjoint),
        ];
        let run = run_campaign(&CampaignConfig::new(5, gens)).unwrap();
        assert_eq!(run.summary.instances, 20);
        assert_eq!(run.summary.violations, 0, "{:?}", run.summary.violation_details);
        assert_eq!(run.summary.exit_code(), 0);
    }

    #[test]
    fn injected_fault_names_the_bound() {
        let mut cfg = CampaignConfig::new(2, vec![gen(2, 2, 2, Ensemble::Ginibre)]);
        cfg.fault = Some(BoundFault { bound: BoundKind::DiagOffdiag, factor: 0.5 });
        let run = run_campaign(&cfg).unwrap();
        assert_eq!(run.summary.exit_code(), 1);
        assert!(run.summary.violation_details.iter().all(|v| v.check == "B4_diag_offdiag"));
    }

    #[test]
    fn instance_ids_and_seeds() {
        let mut g = gen(2, 3, 2, Ensemble::Ginibre);
        g.seed = 10;
        let ids = CampaignConfig::new(3, vec![g]).instances();
        assert_eq!(ids[2].0, "g0-d2-n3-r2-ginibre-s12");
        assert_eq!(ids[2].1.seed, 12);
    }

    #[test]
    fn invalid_configs() {
        assert!(run_campaign(&CampaignConfig::new(0, vec![gen(2, 2, 1, Ensemble::Zero)])).is_err());
        assert!(run_campaign(&CampaignConfig::new(1, vec![])).is_err());
    }

    #[test]
    fn config_from_json_uses_defaults() {
        let cfg: CampaignConfig = serde_json::from_str(
            r#"{"trials": 2, "gens": [{"n": 2, "d": 2, "rank": 1, "ensemble": "nilpotent-lift"}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.gens[0].scale, 1.0);
        assert_eq!(cfg.tol, ToleranceConfig::default());
        assert!(cfg.output.is_none());
    }

    #[test]
    fn csv_rows_match_header() {
        let run = run_campaign(&CampaignConfig::new(2, vec![gen(2, 2, 1, Ensemble::Ginibre)])).unwrap();
        let text = render_reports(&run.outcomes, ReportFormat::Csv).unwrap();
        let widths: Vec<usize> = text.lines().map(|l| l.split(',').count()).collect();
        assert!(widths.iter().all(|&w| w == widths[0]));
        assert_eq!(widths.len(), 3);
    }
}
