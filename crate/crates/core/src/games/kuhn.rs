use crate::efg::{Draft, GameTree};
use crate::games::poker::{Hand, Round};
use crate::{Error, Result};

const PLAYERS: usize = 3;

/// Three-player Kuhn poker over `ranks` cards (one per rank). Each player
/// antes one chip and bets are one chip.
pub fn kuhn3(ranks: usize) -> Result<GameTree> {
    if ranks < 3 {
        return Err(Error::InvalidParams(format!("kuhn3 needs at least 3 ranks, got {ranks}")));
    }
    let deals: Vec<[usize; 3]> = (0..ranks)
        .flat_map(|a| (0..ranks).flat_map(move |b| (0..ranks).map(move |c| [a, b, c])))
        .filter(|[a, b, c]| a != b && b != c && a != c)
        .collect();
    let prob = 1.0 / deals.len() as f64;
    let outcomes = deals
        .into_iter()
        .map(|cards| {
            let label = format!("{}-{}-{}", cards[0] + 1, cards[1] + 1, cards[2] + 1);
            (label, prob, deal(cards))
        })
        .collect();
    GameTree::from_draft(PLAYERS, Draft::Chance(outcomes))
}

fn deal(cards: [usize; 3]) -> Draft {
    let key = move |p: usize, history: &str| format!("{}|{}", cards[p] + 1, history);
    let showdown = move |hand: Hand| {
        let winner = (0..PLAYERS)
            .filter(|&p| hand.active[p])
            .max_by_key(|&p| cards[p])
            .unwrap();
        Draft::Terminal(hand.payoffs(&[winner]))
    };
    Round {
        stake: 1.0,
        key: &key,
        next: &showdown,
    }
    .play(Hand::new(PLAYERS, 1.0))
}
