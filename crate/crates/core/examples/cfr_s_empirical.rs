//! CFR-S across seeds: the empirical frequency of sampled plan profiles.

use cce::experiment::{run, ExperimentConfig};
use cce::joint::Algorithm;

fn main() -> cce::Result<()> {
    let mut config = ExperimentConfig::new("K3-3".parse()?, Algorithm::CfrS, 20_000);
    config.seeds = (1..=5).collect();
    config.eval_every = 2000;
    config.workers = 5;
    let out = run(&config)?;
    for cell in &out.cells {
        let last = cell.trace.last().unwrap();
        println!("seed {}: α {:.2e} support {}", cell.seed.unwrap_or_default(), last.alpha, last.support);
    }
    for row in &out.summary.aggregate {
        println!("t={:>6} α = {:.2e} ± {:.1e}", row.iteration, row.alpha_mean, row.alpha_std);
    }
    for t in &out.summary.targets {
        println!("α ≤ {}: {}/{} seeds, mean iteration {:?}", t.alpha, t.hits, t.cells, t.mean_iteration);
    }
    Ok(())
}
