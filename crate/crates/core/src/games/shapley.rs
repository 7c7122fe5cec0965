use crate::efg::{Draft, GameTree};

const CARDS: usize = 3;

/// Payoffs of the extensive-form Shapley variant for the card sequence
/// (first card of player 0, hidden card of player 1, second card of
/// player 0). The sum modulo 3 picks (0,0), (1,0) or (0,1); both utilities
/// double when player 1's card equals player 0's second card.
pub fn shapley_payoffs(first: usize, hidden: usize, second: usize) -> [f64; 2] {
    let base = match (first + hidden + second) % 3 {
        0 => [0.0, 0.0],
        1 => [1.0, 0.0],
        _ => [0.0, 1.0],
    };
    let factor = if hidden == second { 2.0 } else { 1.0 };
    [base[0] * factor, base[1] * factor]
}

/// Player 0 plays a card from {0, 1, 2} in the open, player 1 answers with a
/// hidden card, and player 0 plays again without seeing it.
pub fn shapley_efg() -> GameTree {
    let first = (0..CARDS)
        .map(|a| {
            let hidden = (0..CARDS)
                .map(|b| {
                    let second = (0..CARDS)
                        .map(|c| (c.to_string(), Draft::Terminal(shapley_payoffs(a, b, c).to_vec())))
                        .collect();
                    (
                        b.to_string(),
                        Draft::Decision {
                            player: 0,
                            infoset: format!("second after {a}"),
                            actions: second,
                        },
                    )
                })
                .collect();
            (
                a.to_string(),
                Draft::Decision {
                    player: 1,
                    infoset: format!("reply to {a}"),
                    actions: hidden,
                },
            )
        })
        .collect();
    GameTree::from_draft(
        2,
        Draft::Decision {
            player: 0,
            infoset: "first".into(),
            actions: first,
        },
    )
    .expect("shapley game is well formed")
}
