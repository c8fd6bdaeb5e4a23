//! Scenario catalog, collapse experiments and verification reports.

mod collapse;
mod config;
mod scenario;
mod verify;

pub use collapse::{
    bundle_projection_map, criterion_check, epsilon_grid, net_lemma_check, projection_map, run_collapse,
    CollapseRecord, CollapseRun, CriterionResult, NetLemmaReport, CSV_HEADER, EPS_GRID_LEN,
};
pub use config::{ScenarioConfig, WarpFamily, WarpKind};
pub use scenario::{submersion, Scenario, ScenarioId};
pub use verify::{
    unit_samples, verify_all, CheckLine, VerifyOptions, VerifyReport, IDENTITY_WARP_TOL, LEMMA1_TOL, NET_EPSILONS,
    NET_SLACK, WARPED_TOL,
};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SUBLAB_THREADS";

/// Sizes the global thread pool from `SUBLAB_THREADS` when set. Returns the cap applied.
pub fn configure_threads() -> Option<usize> {
    let n: usize = std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok().map(|_| n)
}
