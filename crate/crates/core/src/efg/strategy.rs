use serde::{Deserialize, Serialize};

use crate::efg::tree::{GameTree, Player, PlayerView};
use crate::{Error, Result};

/// Tolerance for probability-vector normalization of strategies.
pub const STRATEGY_TOL: f64 = 1e-12;

/// Tolerance for equivalence checks between realization vectors.
pub const EQUIV_TOL: f64 = 1e-9;

/// Default cap on enumerated plans per player.
pub const DEFAULT_PLAN_CAP: usize = 1_000_000;

/// One distribution per infoset of `owner`, indexed by local infoset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehavioralStrategy {
    owner: Player,
    probs: Vec<Vec<f64>>,
}

impl BehavioralStrategy {
    pub fn new(tree: &GameTree, owner: Player, probs: Vec<Vec<f64>>) -> Result<Self> {
        let s = BehavioralStrategy { owner, probs };
        s.check(tree)?;
        Ok(s)
    }

    pub fn uniform(tree: &GameTree, owner: Player) -> Self {
        let probs = tree
            .view(owner)
            .num_actions
            .iter()
            .map(|&n| vec![1.0 / n as f64; n])
            .collect();
        BehavioralStrategy { owner, probs }
    }

    /// Deterministic strategy playing the plan's action wherever it has
    /// one and the first action elsewhere.
    pub fn from_plan(tree: &GameTree, plan: &NormalFormPlan) -> Self {
        let view = tree.view(plan.owner);
        let probs = (0..view.num_infosets())
            .map(|local| {
                let mut d = vec![0.0; view.num_actions[local]];
                d[plan.choices[local].unwrap_or(0) as usize] = 1.0;
                d
            })
            .collect();
        BehavioralStrategy {
            owner: plan.owner,
            probs,
        }
    }

    pub(crate) fn from_raw(owner: Player, probs: Vec<Vec<f64>>) -> Self {
        BehavioralStrategy { owner, probs }
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn at(&self, local: usize) -> &[f64] {
        &self.probs[local]
    }

    pub fn check(&self, tree: &GameTree) -> Result<()> {
        if self.owner >= tree.num_players() {
            return Err(Error::InvalidStrategy(format!("unknown player {}", self.owner)));
        }
        let view = tree.view(self.owner);
        if self.probs.len() != view.num_infosets() {
            return Err(Error::InvalidStrategy(format!(
                "{} distributions for {} infosets",
                self.probs.len(),
                view.num_infosets()
            )));
        }
        for (local, d) in self.probs.iter().enumerate() {
            if d.len() != view.num_actions[local] {
                return Err(Error::InvalidStrategy(format!("wrong arity at infoset {local}")));
            }
            let sum: f64 = d.iter().sum();
            if d.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > STRATEGY_TOL {
                return Err(Error::InvalidStrategy(format!(
                    "infoset {local} is not a distribution (sum {sum})"
                )));
            }
        }
        Ok(())
    }
}

/// A reduced normal-form plan: an action at every infoset reachable under
/// the plan's own earlier choices, `None` ("any") elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalFormPlan {
    pub owner: Player,
    pub choices: Vec<Option<u32>>,
}

impl NormalFormPlan {
    pub fn action(&self, local: usize) -> Option<usize> {
        self.choices[local].map(|a| a as usize)
    }

    pub fn check(&self, tree: &GameTree) -> Result<()> {
        if self.owner >= tree.num_players() {
            return Err(Error::InvalidPlan(format!("unknown player {}", self.owner)));
        }
        let view = tree.view(self.owner);
        if self.choices.len() != view.num_infosets() {
            return Err(Error::InvalidPlan("length does not match the infoset count".into()));
        }
        let inc = view.sequence_inclusion(&self.choices);
        for local in 0..view.num_infosets() {
            let reachable = inc[view.parent_seq[local]];
            match self.choices[local] {
                Some(a) if !reachable || a as usize >= view.num_actions[local] => {
                    return Err(Error::InvalidPlan(format!("bad choice at infoset {local}")));
                }
                None if reachable => {
                    return Err(Error::InvalidPlan(format!("reachable infoset {local} has no action")));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Per-terminal reach probabilities of one player's strategy, with optional
/// per-infoset reach.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationVector {
    pub terminals: Vec<f64>,
    pub infosets: Option<Vec<f64>>,
}

impl RealizationVector {
    pub fn support(&self) -> Vec<usize> {
        self.terminals
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(z, _)| z)
            .collect()
    }

    pub fn max_abs_diff(&self, other: &RealizationVector) -> f64 {
        self.terminals
            .iter()
            .zip(&other.terminals)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn owner_view(tree: &GameTree, owner: Player) -> Result<&PlayerView> {
    if owner >= tree.num_players() {
        return Err(Error::OwnerMismatch {
            expected: tree.num_players().saturating_sub(1),
            found: owner,
        });
    }
    Ok(tree.view(owner))
}

/// Probability that the owner's strategy lets play reach each terminal,
/// treating chance and the other players as playing towards it.
pub fn behavioral_reach(tree: &GameTree, pi: &BehavioralStrategy) -> Result<RealizationVector> {
    let view = owner_view(tree, pi.owner)?;
    pi.check(tree)?;
    let seq = view.sequence_realization(&pi.probs);
    Ok(RealizationVector {
        terminals: view.terminal_seq.iter().map(|&s| seq[s]).collect(),
        infosets: Some(view.parent_seq.iter().map(|&s| seq[s]).collect()),
    })
}

/// 0/1 reach vector of a plan; its support is the plan's reachable terminals.
pub fn plan_reach(tree: &GameTree, plan: &NormalFormPlan) -> Result<RealizationVector> {
    let view = owner_view(tree, plan.owner)?;
    plan.check(tree)?;
    let inc = view.sequence_inclusion(&plan.choices);
    let as_f = |b: bool| if b { 1.0 } else { 0.0 };
    Ok(RealizationVector {
        terminals: view.terminal_seq.iter().map(|&s| as_f(inc[s])).collect(),
        infosets: Some(view.parent_seq.iter().map(|&s| as_f(inc[s])).collect()),
    })
}

/// Terminals reachable from infoset `local` after playing `action` there and
/// following `plan` below it.
pub fn plan_terminals_from(
    tree: &GameTree,
    plan: &NormalFormPlan,
    local: usize,
    action: usize,
) -> Vec<usize> {
    let view = tree.view(plan.owner);
    let mut out = Vec::new();
    let mut stack = vec![view.seq(local, action)];
    while let Some(s) = stack.pop() {
        out.extend_from_slice(&view.seq_terminals[s]);
        for &child in &view.seq_children[s] {
            if let Some(a) = plan.choices[child] {
                stack.push(view.seq(child, a as usize));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Reduces a full action-per-infoset assignment by dropping choices at
/// infosets the assignment itself makes unreachable.
pub fn canonicalize(tree: &GameTree, owner: Player, full: &[usize]) -> NormalFormPlan {
    let view = tree.view(owner);
    let mut choices = vec![None; view.num_infosets()];
    let mut inc = vec![false; view.num_sequences()];
    inc[0] = true;
    for local in 0..view.num_infosets() {
        if inc[view.parent_seq[local]] {
            choices[local] = Some(full[local] as u32);
            inc[view.seq(local, full[local])] = true;
        }
    }
    NormalFormPlan { owner, choices }
}

/// Number of reduced plans of `player`, saturating at `usize::MAX`.
pub fn count_plans(tree: &GameTree, player: Player) -> usize {
    let view = tree.view(player);
    // Infosets below a sequence have larger local indices.
    let mut info_count = vec![0usize; view.num_infosets()];
    for local in (0..view.num_infosets()).rev() {
        let mut total = 0usize;
        for a in 0..view.num_actions[local] {
            let s = view.seq(local, a);
            let mut prod = 1usize;
            for &c in &view.seq_children[s] {
                prod = prod.saturating_mul(info_count[c]);
            }
            total = total.saturating_add(prod);
        }
        info_count[local] = total;
    }
    view.seq_children[0]
        .iter()
        .fold(1usize, |acc, &c| acc.saturating_mul(info_count[c]))
}

/// Every reduced plan of `player`, each exactly once, in lexicographic
/// order of choices along depth-first infoset order.
pub fn enumerate_plans(tree: &GameTree, player: Player, cap: usize) -> Result<Vec<NormalFormPlan>> {
    let view = owner_view(tree, player)?;
    let count = count_plans(tree, player);
    if count > cap {
        return Err(Error::PlanCapExceeded { player, cap });
    }
    let mut out = Vec::with_capacity(count);
    let mut choices = vec![None; view.num_infosets()];
    let mut pending: Vec<usize> = view.seq_children[0].clone();
    pending.reverse();
    expand(view, &mut pending, &mut choices, &mut out);
    Ok(out)
}

fn expand(
    view: &PlayerView,
    pending: &mut Vec<usize>,
    choices: &mut Vec<Option<u32>>,
    out: &mut Vec<NormalFormPlan>,
) {
    let Some(local) = pending.pop() else {
        out.push(NormalFormPlan {
            owner: view.player,
            choices: choices.clone(),
        });
        return;
    };
    for a in 0..view.num_actions[local] {
        choices[local] = Some(a as u32);
        let children = &view.seq_children[view.seq(local, a)];
        let mark = pending.len();
        pending.extend(children.iter().rev());
        expand(view, pending, choices, out);
        pending.truncate(mark);
    }
    choices[local] = None;
    pending.push(local);
}
