//! Scenario-driven front end for `lar-core`.

pub mod error;
pub mod invariants;
pub mod output;
pub mod run;
pub mod scenario;

use error::{CliError, Result};
use lar_core::Tolerances;
use scenario::{Scenario, Validated};
use std::path::{Path, PathBuf};

pub const THREADS_ENV: &str = "LAR_DYN_THREADS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub tol_scale: f64,
    pub seed: Option<u64>,
}

impl Default for Options {
    fn default() -> Self {
        Options { tol_scale: 1.0, seed: None }
    }
}

/// Input-validation tolerances widened (or tightened) by `k`. Thresholds
/// that are not slack values (pivot, interior margin, gap, condition) keep
/// their defaults.
pub fn scaled_tolerances(k: f64) -> Tolerances {
    let d = Tolerances::default();
    Tolerances {
        symmetry: d.symmetry * k,
        skew: d.skew * k,
        simplex_sum: d.simplex_sum * k,
        unit_norm: d.unit_norm * k,
        orthogonality: d.orthogonality * k,
        hyperbola: d.hyperbola * k,
        loop_closure: d.loop_closure * k,
        ..d
    }
}

pub fn load_validated(path: &Path, opts: &Options) -> Result<Validated> {
    let mut s: Scenario = scenario::load(path)?;
    if let Some(seed) = opts.seed {
        s.override_seed(seed);
    }
    s.validate(&scaled_tolerances(opts.tol_scale))
}

/// Maps `f` over the scenarios, at most `LAR_DYN_THREADS` at a time
/// (default: the rayon default). Results keep input order.
pub fn for_each_scenario<T, F>(paths: &[PathBuf], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&Path) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let threads = std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&k| k > 0);
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(k) = threads {
            builder = builder.num_threads(k);
        }
        match builder.build() {
            Ok(pool) => pool.install(|| paths.par_iter().map(|p| f(p)).collect()),
            Err(_) => paths.iter().map(|p| f(p)).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        paths.iter().map(|p| f(p)).collect()
    }
}

/// Output directory for one scenario of a batch: `out` itself for a single
/// scenario, `out/<name>` otherwise.
pub fn scenario_dir(out: &Path, name: &str, batch: bool) -> PathBuf {
    if batch {
        out.join(name)
    } else {
        out.to_path_buf()
    }
}

/// Rejects batches in which two scenarios would write to the same directory.
pub fn check_unique_names(items: &[(PathBuf, Validated)]) -> Result<()> {
    for (k, (path, v)) in items.iter().enumerate() {
        if items[..k].iter().any(|(_, w)| w.scenario.name == v.scenario.name) {
            return Err(CliError::validation(
                "name",
                format!("{}: name \"{}\" is used by another scenario in the batch", path.display(), v.scenario.name),
            ));
        }
    }
    Ok(())
}
