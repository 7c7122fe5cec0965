use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::efg::{Draft, GameTree};
use crate::{Error, Result};

/// How a round's prize is resolved when bids tie.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TieRule {
    /// Highest unique bid wins; if every bid is equal the prize is set
    /// aside and goes, together with the next prize, to the next winner.
    /// Prizes still set aside at the end are discarded.
    #[serde(rename = "A")]
    Accumulate,
    /// Highest unique bid wins; if every bid is equal the prize is discarded.
    #[serde(rename = "DA")]
    DiscardIfAll,
    /// The prize is discarded when two or more players bid the top card of
    /// the deck; otherwise the highest unique bid wins (discard if none).
    #[serde(rename = "DH")]
    DiscardIfHigh,
    /// The prize is discarded whenever any two bids tie.
    #[serde(rename = "AL")]
    DiscardAlways,
}

impl TieRule {
    pub const ALL: [TieRule; 4] = [
        TieRule::Accumulate,
        TieRule::DiscardIfAll,
        TieRule::DiscardIfHigh,
        TieRule::DiscardAlways,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TieRule::Accumulate => "A",
            TieRule::DiscardIfAll => "DA",
            TieRule::DiscardIfHigh => "DH",
            TieRule::DiscardAlways => "AL",
        }
    }
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.code())
    }
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TieRule::ALL
            .into_iter()
            .find(|r| r.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown tie rule `{s}`")))
    }
}

/// Outcome of one bidding round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundOutcome {
    Won(usize),
    Discarded,
    SetAside,
}

/// Resolves one round. `bids` are card values, `top` the highest card value
/// in the deck.
pub fn resolve_round(rule: TieRule, bids: &[usize], top: usize) -> RoundOutcome {
    let count = |v: usize| bids.iter().filter(|&&b| b == v).count();
    let all_equal = bids.iter().all(|&b| b == bids[0]);
    let any_tie = bids.iter().any(|&b| count(b) > 1);
    let highest_unique = bids
        .iter()
        .enumerate()
        .filter(|&(_, &b)| count(b) == 1)
        .max_by_key(|&(_, &b)| b)
        .map(|(p, _)| p);
    let unique_or_discard = || highest_unique.map_or(RoundOutcome::Discarded, RoundOutcome::Won);
    match rule {
        TieRule::Accumulate if all_equal => RoundOutcome::SetAside,
        TieRule::Accumulate => unique_or_discard(),
        TieRule::DiscardIfAll if all_equal => RoundOutcome::Discarded,
        TieRule::DiscardIfAll => unique_or_discard(),
        TieRule::DiscardIfHigh if count(top) > 1 => RoundOutcome::Discarded,
        TieRule::DiscardIfHigh => unique_or_discard(),
        TieRule::DiscardAlways if any_tie => RoundOutcome::Discarded,
        TieRule::DiscardAlways => unique_or_discard(),
    }
}

/// Prize order used by [`goofspiel`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrizeOrder {
    /// Chance reveals a uniformly random remaining prize each round.
    #[default]
    Shuffled,
    /// Prizes come in descending value; a smaller tree for quick runs.
    Descending,
}

#[derive(Clone, Debug)]
struct State {
    hands: Vec<Vec<usize>>,
    prizes: Vec<usize>,
    scores: Vec<f64>,
    set_aside: usize,
    history: String,
}

/// Goofspiel with `players` players holding cards `1..=ranks` and a prize
/// suit of the same values. Bids within a round are simultaneous: later
/// bidders' infosets hide the current round's earlier bids, while bids of
/// finished rounds are public. When a single card is left everything is
/// forced and the last round is scored without further moves.
pub fn goofspiel(players: usize, ranks: usize, rule: TieRule, order: PrizeOrder) -> Result<GameTree> {
    if !(2..=3).contains(&players) {
        return Err(Error::InvalidParams(format!("goofspiel needs 2 or 3 players, got {players}")));
    }
    if !(2..=13).contains(&ranks) {
        return Err(Error::InvalidParams(format!("goofspiel ranks must be in 2..=13, got {ranks}")));
    }
    let state = State {
        hands: vec![(1..=ranks).collect(); players],
        prizes: (1..=ranks).collect(),
        scores: vec![0.0; players],
        set_aside: 0,
        history: String::new(),
    };
    let builder = Builder { rule, order, top: ranks };
    GameTree::from_draft(players, builder.round(state))
}

struct Builder {
    rule: TieRule,
    order: PrizeOrder,
    top: usize,
}

impl Builder {
    fn round(&self, state: State) -> Draft {
        if state.prizes.len() == 1 {
            let bids: Vec<usize> = state.hands.iter().map(|h| h[0]).collect();
            let prize = state.prizes[0];
            let mut end = state;
            self.score(&mut end, prize, &bids);
            return Draft::Terminal(end.scores);
        }
        match self.order {
            PrizeOrder::Shuffled => {
                let p = 1.0 / state.prizes.len() as f64;
                let outcomes = state
                    .prizes
                    .iter()
                    .map(|&prize| (format!("prize {prize}"), p, self.reveal(&state, prize)))
                    .collect();
                Draft::Chance(outcomes)
            }
            PrizeOrder::Descending => {
                let prize = *state.prizes.iter().max().unwrap();
                self.reveal(&state, prize)
            }
        }
    }

    fn reveal(&self, state: &State, prize: usize) -> Draft {
        let mut next = state.clone();
        next.prizes.retain(|&p| p != prize);
        next.history.push_str(&format!("p{prize}:"));
        self.bid(next, prize, Vec::new())
    }

    fn bid(&self, state: State, prize: usize, bids: Vec<usize>) -> Draft {
        let player = bids.len();
        if player == state.hands.len() {
            let mut next = state;
            self.score(&mut next, prize, &bids);
            let shown: Vec<String> = bids.iter().map(usize::to_string).collect();
            next.history.push_str(&shown.join(","));
            next.history.push(';');
            for (hand, b) in next.hands.iter_mut().zip(&bids) {
                hand.retain(|c| c != b);
            }
            return self.round(next);
        }
        let actions = state.hands[player]
            .iter()
            .map(|&card| {
                let mut more = bids.clone();
                more.push(card);
                (card.to_string(), self.bid(state.clone(), prize, more))
            })
            .collect();
        Draft::Decision {
            player,
            infoset: state.history.clone(),
            actions,
        }
    }

    fn score(&self, state: &mut State, prize: usize, bids: &[usize]) {
        let pot = state.set_aside + prize;
        match resolve_round(self.rule, bids, self.top) {
            RoundOutcome::Won(p) => {
                state.scores[p] += pot as f64;
                state.set_aside = 0;
            }
            RoundOutcome::Discarded => state.set_aside = 0,
            RoundOutcome::SetAside => state.set_aside = pot,
        }
    }
}
