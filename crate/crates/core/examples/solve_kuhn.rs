//! CFR-Jr on three-player Kuhn poker.

use cce::games::kuhn3;
use cce::joint::run_cfr_jr;

fn main() -> cce::Result<()> {
    let ranks = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let game = kuhn3(ranks)?;
    println!("K3-{ranks}: {} terminals, {} infosets", game.num_terminals(), game.infosets().len());
    let (joint, trace) = run_cfr_jr(&game, 5000, 500);
    println!("{:>6} {:>12} {:>10} {:>8}", "t", "epsilon", "alpha", "support");
    for p in &trace {
        println!("{:>6} {:>12.3e} {:>10.3e} {:>8}", p.iteration, p.report.epsilon, p.report.alpha, p.support);
    }
    let mut top: Vec<_> = joint.iter().collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("heaviest profiles:");
    for (ids, w) in top.into_iter().take(3) {
        println!("  {ids:?} {w:.4}");
    }
    Ok(())
}
