//! Collapse of the warped flat torus onto its base circle.
//!
//! Usage: `cargo run --release --example collapse_torus [config.toml]`. Without an argument
//! the shipped `f_n = 1/n` config is used. The CSV goes to standard output.

use std::path::PathBuf;

use sublab::lab::{run_collapse, ScenarioConfig};

fn main() -> sublab::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/collapse_constant.toml")
    });
    let cfg = ScenarioConfig::load(&path)?;
    let run = run_collapse(&cfg)?;
    run.write_csv(std::io::stdout())?;
    eprintln!(
        "mesh {:.6}; criterion at floor: {}; gh at floor: {}",
        run.mesh,
        run.criterion_at_floor(),
        run.gh_at_floor()
    );
    Ok(())
}
