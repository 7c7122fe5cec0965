//! Single-bet betting rounds shared by the Kuhn and Leduc variants.
//!
//! In a round the active players act in seat order. Until someone bets each
//! may check or bet; after a bet every other active player, in seat order
//! starting after the bettor, folds or calls. There are no raises. A round
//! where everyone checks, or where every response to the bet is in, ends
//! with the continuation; a round that leaves a single active player ends
//! the hand.

use crate::efg::Draft;

pub(crate) const CHECK: &str = "check";
pub(crate) const BET: &str = "bet";
pub(crate) const FOLD: &str = "fold";
pub(crate) const CALL: &str = "call";

#[derive(Clone, Debug)]
pub(crate) struct Hand {
    pub active: Vec<bool>,
    pub contrib: Vec<f64>,
    /// Public action history, one character per action: k=check, b=bet,
    /// f=fold, c=call; rounds are separated by `/`.
    pub history: String,
}

impl Hand {
    pub fn new(players: usize, ante: f64) -> Self {
        Hand {
            active: vec![true; players],
            contrib: vec![ante; players],
            history: String::new(),
        }
    }

    pub fn pot(&self) -> f64 {
        self.contrib.iter().sum()
    }

    fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Net payoffs when `winners` split the pot equally.
    pub fn payoffs(&self, winners: &[usize]) -> Vec<f64> {
        let share = self.pot() / winners.len() as f64;
        let mut u: Vec<f64> = self.contrib.iter().map(|c| -c).collect();
        for &w in winners {
            u[w] += share;
        }
        u
    }
}

pub(crate) struct Round<'a> {
    pub stake: f64,
    /// Infoset key of a player given the public history.
    pub key: &'a dyn Fn(usize, &str) -> String,
    /// Continuation once the round closes with two or more active players.
    pub next: &'a dyn Fn(Hand) -> Draft,
}

impl Round<'_> {
    pub fn play(&self, hand: Hand) -> Draft {
        let order: Vec<usize> = (0..hand.active.len()).filter(|&p| hand.active[p]).collect();
        self.unopened(hand, &order)
    }

    fn unopened(&self, hand: Hand, to_act: &[usize]) -> Draft {
        let Some((&p, rest)) = to_act.split_first() else {
            return (self.next)(hand);
        };
        let mut check = hand.clone();
        check.history.push('k');
        let mut bet = hand.clone();
        bet.history.push('b');
        bet.contrib[p] += self.stake;
        let n = hand.active.len();
        let responders: Vec<usize> = (1..n)
            .map(|k| (p + k) % n)
            .filter(|&q| hand.active[q])
            .collect();
        Draft::Decision {
            player: p,
            infoset: (self.key)(p, &hand.history),
            actions: vec![
                (CHECK.into(), self.unopened(check, rest)),
                (BET.into(), self.facing_bet(bet, &responders)),
            ],
        }
    }

    fn facing_bet(&self, hand: Hand, to_act: &[usize]) -> Draft {
        if hand.active_count() == 1 {
            let winner = hand.active.iter().position(|&a| a).unwrap();
            return Draft::Terminal(hand.payoffs(&[winner]));
        }
        let Some((&p, rest)) = to_act.split_first() else {
            return (self.next)(hand);
        };
        let mut fold = hand.clone();
        fold.history.push('f');
        fold.active[p] = false;
        let mut call = hand.clone();
        call.history.push('c');
        call.contrib[p] += self.stake;
        Draft::Decision {
            player: p,
            infoset: (self.key)(p, &hand.history),
            actions: vec![
                (FOLD.into(), self.facing_bet(fold, rest)),
                (CALL.into(), self.facing_bet(call, rest)),
            ],
        }
    }
}
