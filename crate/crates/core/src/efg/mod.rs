//! Extensive-form games with imperfect information and perfect recall.
//!
//! A [`GameTree`] is immutable once built. Nodes get dense ids in depth-first
//! preorder, so the same draft always yields the same ids. After validation
//! the tree carries one [`PlayerView`] per player: the player's infosets
//! arranged by their own sequences, which is all that behavioral and
//! normal-form strategy operations need.

pub mod serial;
mod strategy;
mod tree;
mod validate;

pub use strategy::{
    behavioral_reach, canonicalize, count_plans, enumerate_plans, plan_reach, plan_terminals_from,
    BehavioralStrategy, NormalFormPlan, RealizationVector, DEFAULT_PLAN_CAP, EQUIV_TOL,
    STRATEGY_TOL,
};
pub use tree::{diagnose, Draft, GameTree, Infoset, InfosetId, Node, NodeId, NodeKind, Player, PlayerView};
pub use validate::{validate, Diagnostic, PROB_TOL};

/// Small test fixture: player 0 chooses `L` (ending at z1) or `R`, then
/// `l`/`r` (z2, z3).
pub fn single_player_chain() -> GameTree {
    use Draft::*;
    GameTree::from_draft(
        1,
        Decision {
            player: 0,
            infoset: "root".into(),
            actions: vec![
                ("L".into(), Terminal(vec![1.0])),
                (
                    "R".into(),
                    Decision {
                        player: 0,
                        infoset: "R".into(),
                        actions: vec![
                            ("l".into(), Terminal(vec![2.0])),
                            ("r".into(), Terminal(vec![3.0])),
                        ],
                    },
                ),
            ],
        },
    )
    .expect("fixture is valid")
}
