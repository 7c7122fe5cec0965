use crate::efg::{Draft, GameTree};
use crate::games::poker::{Hand, Round};
use crate::{Error, Result};

const PLAYERS: usize = 3;
const SUITS: usize = 3;
const FIRST_STAKE: f64 = 2.0;
const SECOND_STAKE: f64 = 4.0;

/// Three-player Leduc hold'em with three suits of `ranks` cards.
///
/// Suits never matter at showdown, so chance deals ranks directly with
/// probabilities given by the remaining card counts. The first betting round
/// uses a stake of 2 chips and the second 4; a player pairing the community
/// card beats any unpaired hand and equal hands split the pot.
pub fn leduc3(ranks: usize) -> Result<GameTree> {
    if ranks < 3 {
        return Err(Error::InvalidParams(format!("leduc3 needs at least 3 ranks, got {ranks}")));
    }
    let total = (SUITS * ranks) as f64;
    let mut outcomes = Vec::new();
    for a in 0..ranks {
        for b in 0..ranks {
            for c in 0..ranks {
                let cards = [a, b, c];
                let mut left = vec![SUITS; ranks];
                let mut prob = 1.0;
                for (k, &card) in cards.iter().enumerate() {
                    prob *= left[card] as f64 / (total - k as f64);
                    left[card] -= 1;
                }
                let label = format!("{}-{}-{}", a + 1, b + 1, c + 1);
                outcomes.push((label, prob, deal(cards, ranks)));
            }
        }
    }
    GameTree::from_draft(PLAYERS, Draft::Chance(outcomes))
}

fn deal(cards: [usize; 3], ranks: usize) -> Draft {
    let first_key = move |p: usize, history: &str| format!("{}|{}", cards[p] + 1, history);
    let after_first = move |hand: Hand| community(cards, ranks, hand);
    Round {
        stake: FIRST_STAKE,
        key: &first_key,
        next: &after_first,
    }
    .play(Hand::new(PLAYERS, 1.0))
}

fn community(cards: [usize; 3], ranks: usize, hand: Hand) -> Draft {
    let mut left = vec![SUITS; ranks];
    for &c in &cards {
        left[c] -= 1;
    }
    let remaining = (SUITS * ranks - PLAYERS) as f64;
    let outcomes = (0..ranks)
        .filter(|&board| left[board] > 0)
        .map(|board| {
            let prob = left[board] as f64 / remaining;
            let mut h = hand.clone();
            h.history.push('/');
            h.history.push_str(&(board + 1).to_string());
            h.history.push('/');
            let key = move |p: usize, history: &str| format!("{}|{}", cards[p] + 1, history);
            let showdown = move |hand: Hand| showdown(cards, board, hand);
            let sub = Round {
                stake: SECOND_STAKE,
                key: &key,
                next: &showdown,
            }
            .play(h);
            (format!("board {}", board + 1), prob, sub)
        })
        .collect();
    Draft::Chance(outcomes)
}

/// Pairs beat high cards; ties split.
fn hand_strength(card: usize, board: usize) -> (bool, usize) {
    (card == board, card)
}

fn showdown(cards: [usize; 3], board: usize, hand: Hand) -> Draft {
    let best = (0..PLAYERS)
        .filter(|&p| hand.active[p])
        .map(|p| hand_strength(cards[p], board))
        .max()
        .unwrap();
    let winners: Vec<usize> = (0..PLAYERS)
        .filter(|&p| hand.active[p] && hand_strength(cards[p], board) == best)
        .collect();
    Draft::Terminal(hand.payoffs(&winners))
}
