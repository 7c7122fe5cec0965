//! Benchmark games and a seeded random-game generator.
//!
//! Every constructor returns a validated [`GameTree`]. [`GameSpec`] names an
//! instance compactly and parses from, and prints to, strings such as:
//!
//! | string | game |
//! |---|---|
//! | `K3-4` | three-player Kuhn poker with 4 ranks |
//! | `L3-3` | three-player Leduc hold'em with 3 ranks |
//! | `G2-4-DA` | two-player Goofspiel, 4 cards, tie rule DA (`A`, `DA`, `DH`, `AL`) |
//! | `G3-4-A:descending` | prizes in fixed descending order |
//! | `SHAPLEY` | extensive-form Shapley game |
//! | `M:coordination`, `M:shapley`, `M:{json}` | matrix game |
//! | `R2-5:seed=7` | random game, 2 players, depth 5; also `branching`, `chance`, `lo`, `hi` |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::efg::GameTree;
use crate::{Error, Result};

mod goofspiel;
mod kuhn;
mod leduc;
mod matrix;
mod poker;
mod random;
mod shapley;

pub use goofspiel::{goofspiel, resolve_round, PrizeOrder, RoundOutcome, TieRule};
pub use kuhn::kuhn3;
pub use leduc::leduc3;
pub use matrix::{coordination, coordination_game, matrix_game, shapley as shapley_matrix, MatrixGame};
pub use random::{random_game, RandomGameParams};
pub use shapley::{shapley_efg, shapley_payoffs};

/// A named game instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GameSpec {
    Kuhn3 {
        rank: usize,
    },
    Leduc3 {
        rank: usize,
    },
    Goofspiel {
        players: usize,
        rank: usize,
        rule: TieRule,
        #[serde(default)]
        order: PrizeOrder,
    },
    ShapleyEfg,
    Matrix {
        game: MatrixGame,
    },
    Random(RandomGameParams),
}

impl GameSpec {
    pub fn build(&self) -> Result<GameTree> {
        match self {
            GameSpec::Kuhn3 { rank } => kuhn3(*rank),
            GameSpec::Leduc3 { rank } => leduc3(*rank),
            GameSpec::Goofspiel {
                players,
                rank,
                rule,
                order,
            } => goofspiel(*players, *rank, *rule, *order),
            GameSpec::ShapleyEfg => Ok(shapley_efg()),
            GameSpec::Matrix { game } => matrix_game(game),
            GameSpec::Random(params) => random_game(params),
        }
    }

    /// True for games whose payoffs sum to zero at every terminal by
    /// construction.
    pub fn is_zero_sum(&self) -> bool {
        matches!(self, GameSpec::Kuhn3 { .. } | GameSpec::Leduc3 { .. })
    }
}

impl fmt::Display for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameSpec::Kuhn3 { rank } => write!(f, "K3-{rank}"),
            GameSpec::Leduc3 { rank } => write!(f, "L3-{rank}"),
            GameSpec::Goofspiel {
                players,
                rank,
                rule,
                order,
            } => {
                write!(f, "G{players}-{rank}-{rule}")?;
                if *order == PrizeOrder::Descending {
                    f.write_str(":descending")?;
                }
                Ok(())
            }
            GameSpec::ShapleyEfg => f.write_str("SHAPLEY"),
            GameSpec::Matrix { game } if *game == coordination() => f.write_str("M:coordination"),
            GameSpec::Matrix { game } if *game == shapley_matrix() => f.write_str("M:shapley"),
            GameSpec::Matrix { game } => {
                let json = serde_json::to_string(game).map_err(|_| fmt::Error)?;
                write!(f, "M:{json}")
            }
            GameSpec::Random(p) => write!(
                f,
                "R{}-{}:seed={},branching={},chance={},lo={},hi={}",
                p.players, p.depth, p.seed, p.branching, p.chance_freq, p.payoff_range.0, p.payoff_range.1
            ),
        }
    }
}

fn bad(spec: &str, reason: impl Into<String>) -> Error {
    Error::GameSpec {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn number<T: FromStr>(spec: &str, field: &str, text: &str) -> Result<T> {
    text.parse()
        .map_err(|_| bad(spec, format!("{field} `{text}` is not a number")))
}

/// Splits `"<p>-<r>"` style parameter lists.
fn dashed<'a>(spec: &str, body: &'a str, want: usize) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = body.split('-').collect();
    if parts.len() != want {
        return Err(bad(spec, format!("expected {want} dash-separated fields")));
    }
    Ok(parts)
}

impl FromStr for GameSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("shapley") || s.eq_ignore_ascii_case("shapley_efg") {
            return Ok(GameSpec::ShapleyEfg);
        }
        if let Some(body) = s.strip_prefix("M:") {
            let game = match body {
                "coordination" => coordination(),
                "shapley" => shapley_matrix(),
                json => serde_json::from_str(json).map_err(|e| bad(s, e.to_string()))?,
            };
            return Ok(GameSpec::Matrix { game });
        }
        let (head, options) = match s.split_once(':') {
            Some((h, o)) => (h, Some(o)),
            None => (s, None),
        };
        let mut chars = head.chars();
        let family = chars.next().ok_or_else(|| bad(s, "empty game spec"))?;
        let body = chars.as_str();
        let spec = match family.to_ascii_uppercase() {
            'K' | 'L' => {
                let parts = dashed(s, body, 2)?;
                if parts[0] != "3" {
                    return Err(bad(s, "poker variants are three-player"));
                }
                let rank = number(s, "rank", parts[1])?;
                if family.eq_ignore_ascii_case(&'K') {
                    GameSpec::Kuhn3 { rank }
                } else {
                    GameSpec::Leduc3 { rank }
                }
            }
            'G' => {
                let parts = dashed(s, body, 3)?;
                let order = match options {
                    None => PrizeOrder::Shuffled,
                    Some(o) if o.eq_ignore_ascii_case("descending") => PrizeOrder::Descending,
                    Some(o) if o.eq_ignore_ascii_case("shuffled") => PrizeOrder::Shuffled,
                    Some(o) => return Err(bad(s, format!("unknown goofspiel option `{o}`"))),
                };
                GameSpec::Goofspiel {
                    players: number(s, "players", parts[0])?,
                    rank: number(s, "rank", parts[1])?,
                    rule: parts[2].parse().map_err(|_| bad(s, format!("unknown tie rule `{}`", parts[2])))?,
                    order,
                }
            }
            'R' => {
                let parts = dashed(s, body, 2)?;
                let mut params = RandomGameParams::new(
                    number(s, "players", parts[0])?,
                    number(s, "depth", parts[1])?,
                    0,
                );
                for kv in options.into_iter().flat_map(|o| o.split(',')).filter(|kv| !kv.is_empty()) {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| bad(s, format!("option `{kv}` is not key=value")))?;
                    match k {
                        "seed" => params.seed = number(s, k, v)?,
                        "branching" => params.branching = number(s, k, v)?,
                        "chance" => params.chance_freq = number(s, k, v)?,
                        "lo" => params.payoff_range.0 = number(s, k, v)?,
                        "hi" => params.payoff_range.1 = number(s, k, v)?,
                        _ => return Err(bad(s, format!("unknown random-game option `{k}`"))),
                    }
                }
                GameSpec::Random(params)
            }
            _ => return Err(bad(s, "unknown game family")),
        };
        if options.is_some() && !matches!(spec, GameSpec::Goofspiel { .. } | GameSpec::Random(_)) {
            return Err(bad(s, "this family takes no options"));
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        assert_eq!("K3-4".parse::<GameSpec>().unwrap(), GameSpec::Kuhn3 { rank: 4 });
        assert_eq!("L3-3".parse::<GameSpec>().unwrap(), GameSpec::Leduc3 { rank: 3 });
        assert_eq!(
            "G2-4-DA".parse::<GameSpec>().unwrap(),
            GameSpec::Goofspiel {
                players: 2,
                rank: 4,
                rule: TieRule::DiscardIfAll,
                order: PrizeOrder::Shuffled
            }
        );
        let GameSpec::Random(p) = "R2-5:seed=7".parse::<GameSpec>().unwrap() else {
            panic!()
        };
        assert_eq!(p, RandomGameParams::new(2, 5, 7));
    }

    #[test]
    fn string_round_trip() {
        let mut custom = RandomGameParams::new(3, 2, 11);
        custom.chance_freq = 0.35;
        custom.payoff_range = (-1.5, 2.0);
        let specs = [
            GameSpec::Kuhn3 { rank: 6 },
            GameSpec::Leduc3 { rank: 3 },
            GameSpec::Goofspiel {
                players: 3,
                rank: 4,
                rule: TieRule::Accumulate,
                order: PrizeOrder::Descending,
            },
            GameSpec::ShapleyEfg,
            GameSpec::Matrix { game: coordination() },
            GameSpec::Matrix { game: shapley_matrix() },
            GameSpec::Matrix {
                game: MatrixGame::bimatrix(&["a"], &["b", "c"], &[&[(0.5, 1.0), (2.0, -1.0)]]),
            },
            GameSpec::Random(custom),
        ];
        for spec in specs {
            let text = spec.to_string();
            assert_eq!(text.parse::<GameSpec>().unwrap(), spec, "{text}");
            let json = serde_json::to_string(&spec).unwrap();
            assert_eq!(serde_json::from_str::<GameSpec>(&json).unwrap(), spec, "{json}");
        }
    }

    #[test]
    fn json_block() {
        let spec: GameSpec = serde_json::from_str(r#"{"family":"goofspiel","players":2,"rank":3,"rule":"DH"}"#).unwrap();
        assert_eq!(spec.to_string(), "G2-3-DH");
        let spec: GameSpec =
            serde_json::from_str(r#"{"family":"random","players":2,"depth":3,"seed":4}"#).unwrap();
        assert_eq!(spec, GameSpec::Random(RandomGameParams::new(2, 3, 4)));
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "K3", "K2-4", "X1-2", "G2-3-ZZ", "R2-3:seed", "R2-3:speed=1", "K3-4:descending", "M:{"] {
            assert!(s.parse::<GameSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn builds_every_family() {
        for s in ["K3-3", "L3-3", "G2-3-AL", "SHAPLEY", "M:coordination", "R2-3:seed=1"] {
            let spec: GameSpec = s.parse().unwrap();
            assert!(spec.build().unwrap().num_terminals() > 0, "{s}");
        }
    }
}
