use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use semihilbert::campaign::{self, CampaignConfig, OutputSpec, ReportFormat};
use semihilbert::io::{self, BlockMatrixFile, OperatorSummary};
use semihilbert::suites::{self, SuiteSizes};
use semihilbert::{bounds, Operator, PsdContext, Result, ToleranceConfig};

/// A-numerical radius toolkit: single computations, bound reports and
/// randomized verification campaigns.
#[derive(Parser)]
#[command(name = "semihilbert", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Base seed for every generator of a campaign.
    #[arg(long, global = true, env = "SEMIHILBERT_SEED")]
    seed: Option<u64>,
    /// Trials per generator (verify) or per randomized suite (selftest).
    #[arg(long, global = true, env = "SEMIHILBERT_TRIALS")]
    trials: Option<usize>,
    #[arg(long, global = true, env = "SEMIHILBERT_RANK_RTOL")]
    rank_rtol: Option<f64>,
    #[arg(long, global = true, env = "SEMIHILBERT_CMP_ATOL")]
    cmp_atol: Option<f64>,
    #[arg(long, global = true, env = "SEMIHILBERT_THETA_SAMPLES")]
    theta_samples: Option<usize>,
    /// Worker threads for campaigns; 0 picks automatically.
    #[arg(long, global = true, env = "SEMIHILBERT_PARALLELISM")]
    parallelism: Option<usize>,
}

impl Global {
    fn apply(&self, tol: &mut ToleranceConfig) -> Result<()> {
        if let Some(v) = self.rank_rtol {
            tol.rank_rtol = v;
        }
        if let Some(v) = self.cmp_atol {
            tol.cmp_atol = v;
        }
        if let Some(v) = self.theta_samples {
            tol.theta_samples = v;
        }
        tol.validate()
    }

    fn tolerances(&self) -> Result<ToleranceConfig> {
        let mut tol = ToleranceConfig::default();
        self.apply(&mut tol)?;
        Ok(tol)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print ||T||_A, w_A(T), r_A(T) and T^# as JSON.
    Compute {
        /// JSON matrix, bare or as {"a": ...}.
        #[arg(long)]
        a: PathBuf,
        /// JSON matrix, bare or as {"t": ...}.
        #[arg(long)]
        t: PathBuf,
    },
    /// Run a verification campaign; exits 1 if anything is violated.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Directory for the per-instance reports and summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_format)]
        format: Option<ReportFormat>,
    },
    /// Print the bound report of one block matrix.
    Bounds {
        /// JSON {"d", "n", "blocks", "a"}.
        #[arg(long)]
        blocks: PathBuf,
    },
    /// Run the golden values and every randomized suite; exits 1 on failure.
    Selftest,
}

fn parse_format(s: &str) -> std::result::Result<ReportFormat, String> {
    match s {
        "json" => Ok(ReportFormat::Json),
        "csv" => Ok(ReportFormat::Csv),
        other => Err(format!("unknown format `{other}` (expected json or csv)")),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    match cli.command {
        Command::Compute { a, t } => {
            let tol = g.tolerances()?;
            let ctx = Arc::new(PsdContext::new(io::read_matrix(&a, "a")?, &tol)?);
            let op = Operator::new(io::read_matrix(&t, "t")?, ctx)?;
            print_json(&OperatorSummary::compute(&op, &tol)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config, out, format } => {
            let mut cfg: CampaignConfig = io::read_json(&config)?;
            g.apply(&mut cfg.tol)?;
            if let Some(trials) = g.trials {
                cfg.trials = trials;
            }
            if let Some(seed) = g.seed {
                cfg.gens.iter_mut().for_each(|gen| gen.seed = seed);
            }
            if let Some(p) = g.parallelism {
                cfg.parallelism = p;
            }
            if let Some(dir) = out {
                let format = format.or(cfg.output.as_ref().map(|o| o.format)).unwrap_or_default();
                cfg.output = Some(OutputSpec { dir, format });
            } else if let (Some(format), Some(output)) = (format, cfg.output.as_mut()) {
                output.format = format;
            }
            let run = campaign::run_campaign(&cfg)?;
            print_json(&run.summary)?;
            Ok(ExitCode::from(run.summary.exit_code() as u8))
        }
        Command::Bounds { blocks } => {
            let tol = g.tolerances()?;
            let file: BlockMatrixFile = io::read_json(&blocks)?;
            let bm = file.into_block_matrix(&tol)?;
            let id = blocks.file_stem().map_or("instance".into(), |s| s.to_string_lossy().into_owned());
            print_json(&bounds::evaluate_all(&bm, &tol, &id)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest => {
            let tol = g.tolerances()?;
            let sizes = match g.trials {
                Some(n) => SuiteSizes { equality: n, identities: n, routes: n, lemmas: n },
                None => SuiteSizes::default(),
            };
            let outcomes = suites::all(sizes, &tol)?;
            for s in &outcomes {
                println!("{}", s.line());
                for case in &s.failed_cases {
                    println!("    {case}");
                }
            }
            let ok = outcomes.iter().all(|s| s.passed());
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
