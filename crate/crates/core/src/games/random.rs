use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::efg::{Draft, GameTree};
use crate::{Error, Result};

/// Parameters of [`random_game`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomGameParams {
    pub players: usize,
    pub depth: usize,
    pub seed: u64,
    #[serde(default = "default_branching")]
    pub branching: usize,
    #[serde(default = "default_chance_freq")]
    pub chance_freq: f64,
    #[serde(default = "default_payoff_range")]
    pub payoff_range: (f64, f64),
}

fn default_branching() -> usize {
    2
}

fn default_chance_freq() -> f64 {
    0.2
}

fn default_payoff_range() -> (f64, f64) {
    (0.0, 1.0)
}

impl RandomGameParams {
    pub fn new(players: usize, depth: usize, seed: u64) -> Self {
        RandomGameParams {
            players,
            depth,
            seed,
            branching: default_branching(),
            chance_freq: default_chance_freq(),
            payoff_range: default_payoff_range(),
        }
    }

    fn check(&self) -> Result<()> {
        let (lo, hi) = self.payoff_range;
        let problem = if self.players < 2 {
            "at least 2 players"
        } else if self.depth < 1 {
            "depth at least 1"
        } else if self.branching < 1 {
            "branching at least 1"
        } else if !(0.0..=1.0).contains(&self.chance_freq) {
            "chance frequency in [0, 1]"
        } else if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            "a finite payoff range with lo <= hi"
        } else {
            return Ok(());
        };
        Err(Error::InvalidParams(format!("random game needs {problem}")))
    }
}

/// Seeded random game of uniform depth. Each internal node is a chance node
/// with probability `chance_freq` (random positive probabilities) and
/// otherwise belongs to a uniformly drawn player. A player's nodes at the
/// same depth with the same own history are split at random into at most
/// two infosets, so perfect recall holds by construction. Payoffs are
/// i.i.d. uniform in `payoff_range`.
pub fn random_game(params: &RandomGameParams) -> Result<GameTree> {
    params.check()?;
    let mut gen = Generator {
        params,
        rng: ChaCha8Rng::seed_from_u64(params.seed),
    };
    let root = gen.node(0, &vec![String::new(); params.players]);
    GameTree::from_draft(params.players, root)
}

struct Generator<'a> {
    params: &'a RandomGameParams,
    rng: ChaCha8Rng,
}

impl Generator<'_> {
    fn node(&mut self, depth: usize, own: &[String]) -> Draft {
        let p = self.params;
        if depth == p.depth {
            let (lo, hi) = p.payoff_range;
            let payoffs = (0..p.players)
                .map(|_| if lo == hi { lo } else { self.rng.gen_range(lo..hi) })
                .collect();
            return Draft::Terminal(payoffs);
        }
        if self.rng.gen_bool(p.chance_freq) {
            let weights: Vec<f64> = (0..p.branching).map(|_| self.rng.gen_range(0.1..1.0)).collect();
            let total: f64 = weights.iter().sum();
            let outcomes = weights
                .iter()
                .enumerate()
                .map(|(a, w)| (format!("c{a}"), w / total, self.node(depth + 1, own)))
                .collect();
            return Draft::Chance(outcomes);
        }
        let player = self.rng.gen_range(0..p.players);
        let bucket = self.rng.gen_range(0..2);
        let infoset = format!("d{depth}|{}|g{bucket}", own[player]);
        let actions = (0..p.branching)
            .map(|a| {
                let mut next = own.to_vec();
                next[player] = format!("{infoset}:{a};");
                (format!("a{a}"), self.node(depth + 1, &next))
            })
            .collect();
        Draft::Decision { player, infoset, actions }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efg::{serial, validate, NodeKind};

    #[test]
    fn deterministic_per_seed() {
        let p = RandomGameParams::new(2, 4, 7);
        let a = serial::to_json(&random_game(&p).unwrap());
        let b = serial::to_json(&random_game(&p).unwrap());
        assert_eq!(a, b);
        let c = serial::to_json(&random_game(&RandomGameParams::new(2, 4, 8)).unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn no_chance_when_frequency_zero() {
        let mut p = RandomGameParams::new(3, 5, 1);
        p.chance_freq = 0.0;
        let g = random_game(&p).unwrap();
        assert!(g.nodes().iter().all(|n| !matches!(n.kind, NodeKind::Chance { .. })));
    }

    #[test]
    fn valid_and_in_range() {
        for seed in 0..30 {
            let mut p = RandomGameParams::new(2, 3, seed);
            p.branching = 3;
            p.payoff_range = (-2.0, 5.0);
            let g = random_game(&p).unwrap();
            assert!(validate(&g).is_empty());
            assert_eq!(g.num_terminals(), 27);
            for z in 0..g.num_terminals() {
                assert!(g.payoffs(z).iter().all(|&u| (-2.0..5.0).contains(&u)));
            }
        }
    }

    #[test]
    fn some_infosets_hide_information() {
        let merged = (0..20).any(|seed| {
            let g = random_game(&RandomGameParams::new(2, 4, seed)).unwrap();
            g.infosets().iter().any(|i| i.nodes.len() > 1)
        });
        assert!(merged);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(random_game(&RandomGameParams::new(1, 3, 0)).is_err());
        assert!(random_game(&RandomGameParams::new(2, 0, 0)).is_err());
        let mut p = RandomGameParams::new(2, 2, 0);
        p.chance_freq = 1.5;
        assert!(random_game(&p).is_err());
    }
}
