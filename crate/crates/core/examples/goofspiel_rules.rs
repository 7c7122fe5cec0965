//! Goofspiel tie rules and the resulting game sizes.

use cce::games::{goofspiel, resolve_round, PrizeOrder, TieRule};

fn main() -> cce::Result<()> {
    let rounds: [&[usize]; 4] = [&[5, 5, 2], &[6, 6, 2], &[4, 4, 4], &[1, 3, 2]];
    for rule in TieRule::ALL {
        let outcomes: Vec<String> = rounds.iter().map(|b| format!("{b:?} -> {:?}", resolve_round(rule, b, 6))).collect();
        println!("{rule:>2}: {}", outcomes.join(", "));
    }
    for (players, ranks) in [(2, 3), (2, 4), (3, 3)] {
        let g = goofspiel(players, ranks, TieRule::DiscardAlways, PrizeOrder::Shuffled)?;
        println!("G{players}-{ranks}-AL: {} terminals, {} infosets", g.num_terminals(), g.infosets().len());
    }
    Ok(())
}
