use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sublab::bundle::PQParams;
use sublab::lab::{self, ScenarioId, VerifyOptions};
use sublab::metric_space::{self, FiniteMetricSpace};

#[derive(Parser)]
#[command(name = "sublab", version, about = "Riemannian submersions, (p,q)-metrics and collapse experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite on a scenario; exits 1 if any check fails.
    Verify {
        #[arg(long)]
        scenario: ScenarioId,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 16)]
        res: usize,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a collapse experiment and write its CSV.
    Collapse {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out_path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Farthest-point ε-net of a scenario's sampled total space.
    Net {
        #[arg(long)]
        scenario: ScenarioId,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 16)]
        res: usize,
    },
    /// Gromov-Hausdorff bounds (or the exact value) between two distance-matrix CSVs.
    Gh {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        exact: bool,
    },
}

fn run(cli: Cli) -> sublab::Result<bool> {
    match cli.command {
        Command::Verify { scenario, p, q, res, tol, seed } => {
            let opts = VerifyOptions { pq: PQParams::new(p, q)?, resolution: res, tol, seed, ..VerifyOptions::default() };
            let report = lab::verify_all(scenario, &opts)?;
            println!("{report}");
            Ok(report.passed())
        }
        Command::Collapse { config, out } => {
            let cfg = lab::ScenarioConfig::load(&config)?;
            let run = lab::run_collapse(&cfg)?;
            let path = out.unwrap_or_else(|| cfg.out_path.clone());
            run.write_csv(BufWriter::new(File::create(&path)?))?;
            let last = run.final_record();
            println!(
                "{} records -> {} (final n = {}: gh_total_base {:.4}, gh_bundle_sm {:.4}, criterion_eps {:.4}, mesh {:.4})",
                run.records.len(),
                path.display(),
                last.n,
                last.gh_total_base,
                last.gh_bundle_sm,
                last.criterion_eps,
                run.mesh
            );
            Ok(true)
        }
        Command::Net { scenario, eps, res } => {
            let s = lab::Scenario::new(scenario, res, res, res)?;
            let sample = metric_space::sample_manifold(s.submersion.total(), &s.total_resolution)?;
            let net = metric_space::eps_net(&sample.space, eps)?;
            println!("points {}", sample.points.len());
            println!("net size {}", net.subset.len());
            println!("covering radius {}", net.covering_radius);
            Ok(true)
        }
        Command::Gh { x, y, exact } => {
            let (x, y) = (FiniteMetricSpace::load(x)?, FiniteMetricSpace::load(y)?);
            if exact {
                println!("gh {}", metric_space::gh_exact(&x, &y)?);
            } else {
                let b = metric_space::gh_bounds(&x, &y)?;
                println!("lower {}", b.lower);
                println!("upper {}", b.upper);
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    lab::configure_threads();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
