//! Turn a behavioral strategy into a realization-equivalent distribution
//! over reduced normal-form plans.

use cce::efg::{behavioral_reach, single_player_chain, BehavioralStrategy};
use cce::eval::realization_equivalence_check;
use cce::games::kuhn3;
use cce::joint::reconstruct_with_stats;

fn main() -> cce::Result<()> {
    // root: L ends the game, R leads to a second choice between l and r
    let chain = single_player_chain();
    let pi = BehavioralStrategy::new(&chain, 0, vec![vec![0.5, 0.5], vec![0.4, 0.6]])?;
    println!("realization {:?}", behavioral_reach(&chain, &pi)?.terminals);
    let (x, stats) = reconstruct_with_stats(&chain, &pi)?;
    for (plan, w) in x.iter() {
        println!("  plan {:?} weight {w}", plan.choices);
    }
    println!("{} passes", stats.passes);

    let kuhn = kuhn3(4)?;
    let uniform = BehavioralStrategy::uniform(&kuhn, 1);
    let (x, stats) = reconstruct_with_stats(&kuhn, &uniform)?;
    println!(
        "K3-4 player 1 uniform: {} plans (|Z| = {}), {} passes, equivalent: {}",
        x.support(),
        kuhn.num_terminals(),
        stats.passes,
        realization_equivalence_check(&kuhn, &uniform, &x)
    );
    Ok(())
}
