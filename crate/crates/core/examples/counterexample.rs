//! No-regret play whose product of averages is not a CCE, while the
//! distribution of play is.

use cce::efg::{BehavioralStrategy, NormalFormPlan};
use cce::eval::{cce_gap, product_gap};
use cce::games::coordination_game;
use cce::joint::JointDistribution;
use cce::regret::{cfr_s_update, observed_utilities, RegretTable};

fn main() -> cce::Result<()> {
    let game = coordination_game();
    let mut tables: Vec<RegretTable> = (0..2).map(|p| RegretTable::new(&game, p)).collect();
    let mut play = JointDistribution::new(2);
    for t in 1..=1000 {
        let a = if t % 2 == 0 { 0 } else { 1 };
        let assignments = vec![vec![a], vec![a]];
        for p in 0..2 {
            let observed = observed_utilities(&game, p, &assignments)?;
            cfr_s_update(&game, &mut tables[p], &assignments[p], &observed)?;
        }
        let plan = |p| NormalFormPlan { owner: p, choices: vec![Some(a as u32)] };
        play.tally(&[plan(0), plan(1)])?;
    }
    for t in &tables {
        println!("player {} cumulative regrets {:?}", t.player, t.regrets[0]);
    }
    let avg = |p| BehavioralStrategy::new(&game, p, vec![vec![0.5, 0.5]]);
    let product = product_gap(&game, &[avg(0)?, avg(1)?])?;
    let joint = cce_gap(&game, &play);
    println!("product of averages: ε = {}", product.epsilon);
    println!("distribution of play: ε = {}, SW = {}", joint.epsilon, joint.sw);
    Ok(())
}
