use serde::{Deserialize, Serialize};

use crate::efg::{Draft, GameTree};
use crate::{Error, Result};

/// A normal-form game: action labels per player and one payoff vector per
/// joint action in row-major order (the last player's action varies
/// fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixGame {
    pub actions: Vec<Vec<String>>,
    pub payoffs: Vec<Vec<f64>>,
}

impl MatrixGame {
    /// Two-player game from a table of `(row payoff, column payoff)` cells.
    pub fn bimatrix(rows: &[&str], cols: &[&str], cells: &[&[(f64, f64)]]) -> Self {
        MatrixGame {
            actions: vec![
                rows.iter().map(|s| s.to_string()).collect(),
                cols.iter().map(|s| s.to_string()).collect(),
            ],
            payoffs: cells
                .iter()
                .flat_map(|row| row.iter().map(|&(a, b)| vec![a, b]))
                .collect(),
        }
    }

    fn check(&self) -> Result<()> {
        let players = self.actions.len();
        if players == 0 || self.actions.iter().any(Vec::is_empty) {
            return Err(Error::InvalidParams("every player needs at least one action".into()));
        }
        let cells: usize = self.actions.iter().map(Vec::len).product();
        if self.payoffs.len() != cells || self.payoffs.iter().any(|u| u.len() != players) {
            return Err(Error::InvalidParams(format!(
                "ragged payoff tensor: expected {cells} cells of {players} payoffs"
            )));
        }
        Ok(())
    }
}

/// Encodes a simultaneous-move game as a sequential tree in which every
/// player has a single infoset hiding the earlier moves.
pub fn matrix_game(game: &MatrixGame) -> Result<GameTree> {
    game.check()?;
    GameTree::from_draft(game.actions.len(), level(game, 0, 0))
}

fn level(game: &MatrixGame, player: usize, offset: usize) -> Draft {
    if player == game.actions.len() {
        return Draft::Terminal(game.payoffs[offset].clone());
    }
    let width = game.actions[player].len();
    let actions = game.actions[player]
        .iter()
        .enumerate()
        .map(|(a, label)| (label.clone(), level(game, player + 1, offset * width + a)))
        .collect();
    Draft::Decision {
        player,
        infoset: "move".into(),
        actions,
    }
}

/// The 2x2 coordination game on which the product of the players' average
/// strategies fails to be a CCE while their joint frequency is one.
pub fn coordination() -> MatrixGame {
    MatrixGame::bimatrix(
        &["L", "R"],
        &["L", "R"],
        &[&[(1.0, 1.0), (1.0, 0.0)], &[(0.0, 1.0), (1.0, 1.0)]],
    )
}

/// A variation of the 3x3 Shapley game.
pub fn shapley() -> MatrixGame {
    MatrixGame::bimatrix(
        &["0", "1", "2"],
        &["0", "1", "2"],
        &[
            &[(1.0, 0.0), (0.0, 1.0), (0.0, 0.0)],
            &[(0.0, 0.0), (2.0, 0.0), (0.0, 1.0)],
            &[(0.0, 1.0), (0.0, 0.0), (1.0, 0.0)],
        ],
    )
}

/// [`coordination`] as a game tree.
pub fn coordination_game() -> GameTree {
    matrix_game(&coordination()).expect("preset is well formed")
}
