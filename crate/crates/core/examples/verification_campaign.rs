//! A small verification campaign. Pass a trial count to scale it up:
//! `cargo run --release --example verification_campaign -- 100`.

use semihilbert::campaign::{self, CampaignConfig, OutputSpec, ReportFormat};
use semihilbert::generate::{Ensemble, GenSpec};
use semihilbert::Result;

fn main() -> Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);

    let mut gens = Vec::new();
    for (d, n, rank, ensemble) in [
        (2, 2, 1, Ensemble::Ginibre),
        (3, 3, 2, Ensemble::Sparse),
        (2, 3, 3, Ensemble::NilpotentLift),
        (4, 2, 2, Ensemble::ASelfadjoint),
    ] {
        gens.push(GenSpec { n, d, rank, ensemble, scale: 1.0, seed: 0 });
    }
    let mut cfg = CampaignConfig::new(trials, gens);
    let dir = std::env::temp_dir().join("semihilbert-campaign");
    cfg.output = Some(OutputSpec { dir: dir.clone(), format: ReportFormat::Csv });

    let run = campaign::run_campaign(&cfg)?;
    let s = &run.summary;
    println!("{} instances in {:.2}s, {} violations", s.instances, s.wall_time_secs, s.violations);
    for (kind, gap) in &s.min_gap {
        println!("  min gap {:<16} {gap:.4e}", kind.key());
    }
    println!("B3 strictly below B7 on {} instances (largest margin {:.4})", s.strict_refinements, s.max_refinement_margin);
    println!("reports written to {}", dir.display());
    std::process::exit(s.exit_code());
}
