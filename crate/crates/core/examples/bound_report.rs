//! All seven numerical radius bounds for a block matrix.

use semihilbert::generate::{self, Ensemble, GenSpec};
use semihilbert::suites;
use semihilbert::{evaluate_all, BoundKind, BoundReport, Result, ToleranceConfig};

fn print_report(r: &BoundReport) {
    println!("{}: w_A = {:.10}", r.instance_id, r.omega);
    for kind in BoundKind::ALL {
        let mark = if r.holds[&kind] { "ok" } else { "VIOLATED" };
        println!("  {:<16} {:.10}  gap {:+.3e}  {mark}", kind.key(), r.bounds[&kind], r.gaps[&kind]);
    }
    println!("  refinement (B3 <= B7): {}", r.refinement_ok);
}

fn main() -> Result<()> {
    let tol = ToleranceConfig::default();

    // the tightness witness: d = 2, A = I, T_12 = I
    let witness = suites::witness_instance(&tol)?;
    print_report(&evaluate_all(&witness, &tol, "witness")?);

    // a random instance with a singular weight
    let spec = GenSpec { n: 3, d: 3, rank: 2, ensemble: Ensemble::Ginibre, scale: 1.0, seed: 2024 };
    let bm = generate::gen_block_instance(&spec, &tol)?;
    let report = evaluate_all(&bm, &tol, "random")?;
    print_report(&report);

    println!("{}", BoundReport::csv_header());
    println!("{}", report.csv_row());
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}
