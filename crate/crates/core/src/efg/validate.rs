use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::efg::tree::{GameTree, InfosetId, NodeId, NodeKind, Player};

/// Probability tolerance used when checking chance distributions.
pub const PROB_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    EmptyTree,
    Structure { node: NodeId, reason: String },
    NoActions { node: NodeId },
    ChanceProbabilities { node: NodeId, sum: f64 },
    PayoffArity { node: NodeId, expected: usize, found: usize },
    NonFinitePayoff { node: NodeId },
    UnknownPlayer { node: NodeId, player: Player },
    InfosetActionMismatch { infoset: InfosetId, node: NodeId },
    InfosetMembership { infoset: InfosetId, node: NodeId },
    PerfectRecall { infoset: InfosetId, player: Player, node: NodeId },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EmptyTree => write!(f, "empty tree"),
            Diagnostic::Structure { node, reason } => write!(f, "malformed node {node}: {reason}"),
            Diagnostic::NoActions { node } => write!(f, "node {node} has no actions"),
            Diagnostic::ChanceProbabilities { node, sum } => {
                write!(f, "chance probabilities at node {node} are invalid (sum {sum})")
            }
            Diagnostic::PayoffArity {
                node,
                expected,
                found,
            } => write!(f, "terminal {node} has {found} payoffs, expected {expected}"),
            Diagnostic::NonFinitePayoff { node } => write!(f, "terminal {node} has a non-finite payoff"),
            Diagnostic::UnknownPlayer { node, player } => {
                write!(f, "node {node} is owned by unknown player {player}")
            }
            Diagnostic::InfosetActionMismatch { infoset, node } => {
                write!(f, "infoset action mismatch: infoset {infoset}, node {node}")
            }
            Diagnostic::InfosetMembership { infoset, node } => {
                write!(f, "infoset membership inconsistent: infoset {infoset}, node {node}")
            }
            Diagnostic::PerfectRecall {
                infoset,
                player,
                node,
            } => write!(
                f,
                "perfect recall violated for player {player}: infoset {infoset}, node {node}"
            ),
        }
    }
}

/// Checks every structural invariant; an empty result means the tree is a
/// well-formed game with perfect recall.
pub fn validate(tree: &GameTree) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let nodes = tree.nodes();
    if nodes.is_empty() {
        diags.push(Diagnostic::EmptyTree);
        return diags;
    }
    let players = tree.num_players();

    for (id, node) in nodes.iter().enumerate() {
        match (id, node.parent) {
            (0, Some(_)) => diags.push(structure(id, "root has a parent")),
            (0, None) => {}
            (_, None) => diags.push(structure(id, "non-root node without parent")),
            (_, Some(p)) if p >= id => diags.push(structure(id, "nodes are not in preorder")),
            (_, Some(p)) => {
                let ok = node
                    .action
                    .and_then(|a| nodes[p].children.get(a))
                    .is_some_and(|&c| c == id);
                if !ok {
                    diags.push(structure(id, "parent does not link back to this node"));
                }
            }
        }
        match &node.kind {
            NodeKind::Terminal { payoffs, .. } => {
                if !node.children.is_empty() {
                    diags.push(structure(id, "terminal with children"));
                }
                if payoffs.len() != players {
                    diags.push(Diagnostic::PayoffArity {
                        node: id,
                        expected: players,
                        found: payoffs.len(),
                    });
                }
                if payoffs.iter().any(|u| !u.is_finite()) {
                    diags.push(Diagnostic::NonFinitePayoff { node: id });
                }
            }
            kind => {
                if node.actions.is_empty() {
                    diags.push(Diagnostic::NoActions { node: id });
                }
                if node.actions.len() != node.children.len() {
                    diags.push(structure(id, "action and child counts differ"));
                }
                match kind {
                    NodeKind::Chance { probs } => {
                        let sum: f64 = probs.iter().sum();
                        let bad = probs.len() != node.actions.len()
                            || probs.iter().any(|p| !p.is_finite() || *p < 0.0)
                            || (sum - 1.0).abs() > PROB_TOL;
                        if bad {
                            diags.push(Diagnostic::ChanceProbabilities { node: id, sum });
                        }
                    }
                    NodeKind::Decision { player, infoset } => {
                        if *player >= players {
                            diags.push(Diagnostic::UnknownPlayer {
                                node: id,
                                player: *player,
                            });
                        }
                        match tree.infosets().get(*infoset) {
                            Some(info) if info.player == *player && info.nodes.contains(&id) => {
                                if info.actions != node.actions {
                                    diags.push(Diagnostic::InfosetActionMismatch {
                                        infoset: *infoset,
                                        node: id,
                                    });
                                }
                            }
                            _ => diags.push(Diagnostic::InfosetMembership {
                                infoset: *infoset,
                                node: id,
                            }),
                        }
                    }
                    NodeKind::Terminal { .. } => unreachable!(),
                }
            }
        }
    }

    for (i, info) in tree.infosets().iter().enumerate() {
        if info.nodes.is_empty() {
            diags.push(Diagnostic::InfosetMembership { infoset: i, node: usize::MAX });
        }
        for &n in &info.nodes {
            let member = nodes.get(n).is_some_and(|node| {
                matches!(node.kind, NodeKind::Decision { infoset, .. } if infoset == i)
            });
            if !member {
                diags.push(Diagnostic::InfosetMembership { infoset: i, node: n });
            }
        }
    }

    if diags.iter().any(|d| matches!(d, Diagnostic::Structure { .. })) {
        return diags;
    }
    check_perfect_recall(tree, &mut diags);
    diags
}

fn structure(node: NodeId, reason: &str) -> Diagnostic {
    Diagnostic::Structure {
        node,
        reason: reason.to_string(),
    }
}

/// Interns each node's own-move history (the ordered infoset/action pairs of
/// one player) and requires it to be constant across every infoset.
fn check_perfect_recall(tree: &GameTree, diags: &mut Vec<Diagnostic>) {
    let nodes = tree.nodes();
    for player in 0..tree.num_players() {
        let mut intern: HashMap<(usize, InfosetId, usize), usize> = HashMap::new();
        let mut history = vec![0usize; nodes.len()];
        for (id, node) in nodes.iter().enumerate() {
            let Some(p) = node.parent else { continue };
            history[id] = match nodes[p].kind {
                NodeKind::Decision { player: q, infoset } if q == player => {
                    let key = (history[p], infoset, node.action.unwrap_or(0));
                    let next = intern.len() + 1;
                    *intern.entry(key).or_insert(next)
                }
                _ => history[p],
            };
        }
        for &i in tree.player_infosets(player) {
            let info = tree.infoset(i);
            let Some(&first) = info.nodes.first() else { continue };
            for &n in &info.nodes[1..] {
                if history[n] != history[first] {
                    diags.push(Diagnostic::PerfectRecall {
                        infoset: i,
                        player,
                        node: n,
                    });
                }
            }
        }
    }
}
