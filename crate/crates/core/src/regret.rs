//! Regret matching and the per-infoset regret updates behind CFR and CFR-S.
//!
//! All strategies here are raw per-local-infoset probability tables in the
//! order of the owner's [`PlayerView`]; wrap them with
//! [`RegretTable::behavioral`] or [`AverageState::average`] for the checked
//! [`BehavioralStrategy`] type.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::efg::{canonicalize, BehavioralStrategy, GameTree, NodeKind, NormalFormPlan, Player, PlayerView};
use crate::{Error, Result};

/// Per-infoset action distributions of one player.
pub type Probs = Vec<Vec<f64>>;

/// Plays proportionally to positive regrets, uniformly if none is positive.
pub fn regret_matching(regrets: &[f64]) -> Result<Vec<f64>> {
    if regrets.is_empty() {
        return Err(Error::EmptyActions);
    }
    let mut out = vec![0.0; regrets.len()];
    regret_matching_into(regrets, &mut out);
    Ok(out)
}

fn regret_matching_into(regrets: &[f64], out: &mut [f64]) {
    let positive: f64 = regrets.iter().map(|r| r.max(0.0)).sum();
    if positive > 0.0 {
        for (o, r) in out.iter_mut().zip(regrets) {
            *o = r.max(0.0) / positive;
        }
    } else {
        out.fill(1.0 / regrets.len() as f64);
    }
}

/// Cumulative regrets `R_I(a)` of one player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretTable {
    pub player: Player,
    pub regrets: Vec<Vec<f64>>,
    /// Number of update rounds applied.
    pub updates: u64,
}

impl RegretTable {
    pub fn new(tree: &GameTree, player: Player) -> Self {
        let view = tree.view(player);
        RegretTable {
            player,
            regrets: view.num_actions.iter().map(|&n| vec![0.0; n]).collect(),
            updates: 0,
        }
    }

    /// Regret-matching strategy at every infoset.
    pub fn strategy(&self) -> Probs {
        self.regrets
            .iter()
            .map(|r| {
                let mut p = vec![0.0; r.len()];
                regret_matching_into(r, &mut p);
                p
            })
            .collect()
    }

    pub fn behavioral(&self) -> BehavioralStrategy {
        BehavioralStrategy::from_raw(self.player, self.strategy())
    }

    /// `Σ_I max_a R_I(a)⁺`, an upper bound on the player's external regret.
    pub fn positive_regret_sum(&self) -> f64 {
        self.regrets
            .iter()
            .map(|r| r.iter().fold(0.0f64, |m, &x| m.max(x)))
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("regret tables serialize")
    }
}

/// Reach-weighted running sums of a player's strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageState {
    pub player: Player,
    pub sums: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub updates: u64,
}

impl AverageState {
    pub fn new(tree: &GameTree, player: Player) -> Self {
        let view = tree.view(player);
        AverageState {
            player,
            sums: view.num_actions.iter().map(|&n| vec![0.0; n]).collect(),
            weights: vec![0.0; view.num_infosets()],
            updates: 0,
        }
    }

    /// Adds `probs` with weight `ρ_I` (the player's own reach of each infoset).
    pub fn add(&mut self, view: &PlayerView, probs: &[Vec<f64>]) {
        let seq = view.sequence_realization(probs);
        for (local, dist) in probs.iter().enumerate() {
            let reach = seq[view.parent_seq[local]];
            self.weights[local] += reach;
            for (s, p) in self.sums[local].iter_mut().zip(dist) {
                *s += reach * p;
            }
        }
        self.updates += 1;
    }

    /// Normalized average; uniform where the player never reached.
    pub fn average(&self) -> BehavioralStrategy {
        let probs = self
            .sums
            .iter()
            .zip(&self.weights)
            .map(|(s, &w)| {
                if w > 0.0 {
                    let total: f64 = s.iter().sum();
                    s.iter().map(|x| x / total).collect()
                } else {
                    vec![1.0 / s.len() as f64; s.len()]
                }
            })
            .collect();
        BehavioralStrategy::from_raw(self.player, probs)
    }
}

pub fn average_behavioral(state: &AverageState) -> BehavioralStrategy {
    state.average()
}

/// Decision-node owner and local infoset index, `None` for chance and
/// terminal nodes.
pub(crate) fn node_owners(tree: &GameTree) -> Vec<Option<(Player, usize)>> {
    tree.nodes()
        .iter()
        .map(|n| match n.kind {
            NodeKind::Decision { player, infoset } => Some((player, tree.infoset(infoset).local)),
            _ => None,
        })
        .collect()
}

/// One simultaneous CFR iteration from the profile `current`: adds every
/// player's counterfactual regrets to `tables`, folds `current` into
/// `averages` and returns the next regret-matching profile.
pub fn cfr_iteration(
    tree: &GameTree,
    current: &[Probs],
    tables: &mut [RegretTable],
    averages: &mut [AverageState],
) -> Vec<Probs> {
    let players = tree.num_players();
    let nodes = tree.nodes();
    let owners = node_owners(tree);
    let n = nodes.len();

    // reach[node * players + p]: player p's own contribution; chance separate.
    let mut reach = vec![1.0; n * players];
    let mut chance = vec![1.0; n];
    for (id, node) in nodes.iter().enumerate().skip(1) {
        let parent = node.parent.expect("non-root nodes have parents");
        let a = node.action.expect("non-root nodes have an incoming action");
        reach.copy_within(parent * players..(parent + 1) * players, id * players);
        chance[id] = chance[parent];
        match &nodes[parent].kind {
            NodeKind::Chance { probs } => chance[id] *= probs[a],
            NodeKind::Decision { player, .. } => {
                let (_, local) = owners[parent].unwrap();
                reach[id * players + player] *= current[*player][local][a];
            }
            NodeKind::Terminal { .. } => unreachable!(),
        }
    }

    let mut values = vec![0.0; n * players];
    for id in (0..n).rev() {
        let node = &nodes[id];
        match &node.kind {
            NodeKind::Terminal { payoffs, .. } => {
                values[id * players..(id + 1) * players].copy_from_slice(payoffs);
            }
            NodeKind::Chance { probs } => {
                for (&c, &p) in node.children.iter().zip(probs) {
                    for q in 0..players {
                        values[id * players + q] += p * values[c * players + q];
                    }
                }
            }
            NodeKind::Decision { player, .. } => {
                let (_, local) = owners[id].unwrap();
                let dist = &current[*player][local];
                for (&c, &p) in node.children.iter().zip(dist) {
                    for q in 0..players {
                        values[id * players + q] += p * values[c * players + q];
                    }
                }
                let others: f64 = (0..players)
                    .filter(|&q| q != *player)
                    .map(|q| reach[id * players + q])
                    .product();
                let cf = chance[id] * others;
                if cf != 0.0 {
                    let v = values[id * players + player];
                    let row = &mut tables[*player].regrets[local];
                    for (r, &c) in row.iter_mut().zip(&node.children) {
                        *r += cf * (values[c * players + player] - v);
                    }
                }
            }
        }
    }

    for p in 0..players {
        tables[p].updates += 1;
        averages[p].add(tree.view(p), &current[p]);
    }
    tables.iter().map(RegretTable::strategy).collect()
}

/// Regret tables, averages and the current profile of a vanilla CFR run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfrState {
    pub tables: Vec<RegretTable>,
    pub averages: Vec<AverageState>,
    pub current: Vec<Probs>,
    pub iteration: u64,
}

impl CfrState {
    pub fn new(tree: &GameTree) -> Self {
        let players = 0..tree.num_players();
        let tables: Vec<RegretTable> = players.clone().map(|p| RegretTable::new(tree, p)).collect();
        CfrState {
            current: tables.iter().map(RegretTable::strategy).collect(),
            averages: players.map(|p| AverageState::new(tree, p)).collect(),
            tables,
            iteration: 0,
        }
    }

    /// Runs one iteration and returns the profile that was played in it.
    pub fn step(&mut self, tree: &GameTree) -> Vec<Probs> {
        let next = cfr_iteration(tree, &self.current, &mut self.tables, &mut self.averages);
        self.iteration += 1;
        std::mem::replace(&mut self.current, next)
    }

    pub fn average_profile(&self) -> Vec<BehavioralStrategy> {
        self.averages.iter().map(AverageState::average).collect()
    }
}

/// Samples one action at every infoset, reachable or not.
pub fn sample_assignment<R: Rng + ?Sized>(probs: &[Vec<f64>], rng: &mut R) -> Vec<usize> {
    probs
        .iter()
        .map(|dist| {
            let mut u: f64 = rng.gen();
            let mut last = 0;
            for (a, &p) in dist.iter().enumerate() {
                if p > 0.0 {
                    if u < p {
                        return a;
                    }
                    u -= p;
                    last = a;
                }
            }
            last
        })
        .collect()
}

/// A reduced plan drawn by sampling each infoset independently from `pi`.
pub fn sampled_plan<R: Rng + ?Sized>(tree: &GameTree, pi: &BehavioralStrategy, rng: &mut R) -> NormalFormPlan {
    canonicalize(tree, pi.owner(), &sample_assignment(pi.probs(), rng))
}

fn assignment_inclusion(view: &PlayerView, assignment: &[usize]) -> Vec<bool> {
    let mut inc = vec![false; view.num_sequences()];
    inc[0] = true;
    for (local, &a) in assignment.iter().enumerate() {
        if inc[view.parent_seq[local]] {
            inc[view.seq(local, a)] = true;
        }
    }
    inc
}

fn check_assignment(tree: &GameTree, player: Player, assignment: &[usize]) -> Result<()> {
    let view = tree.view(player);
    if assignment.len() != view.num_infosets()
        || assignment.iter().zip(&view.num_actions).any(|(&a, &n)| a >= n)
    {
        return Err(Error::InvalidPlan(format!(
            "assignment does not fit the infosets of player {player}"
        )));
    }
    Ok(())
}

/// Utilities player `player` observes against the other players'
/// assignments: `u_i(z)` times chance reach for every terminal the others
/// and chance allow, zero elsewhere. `assignments[player]` is ignored.
pub fn observed_utilities(tree: &GameTree, player: Player, assignments: &[Vec<usize>]) -> Result<Vec<f64>> {
    if assignments.len() != tree.num_players() {
        return Err(Error::PlayerMismatch {
            expected: tree.num_players(),
            found: assignments.len(),
        });
    }
    let mut out: Vec<f64> = (0..tree.num_terminals())
        .map(|z| tree.chance_reach(z) * tree.payoff(z, player))
        .collect();
    for (q, assignment) in assignments.iter().enumerate().filter(|&(q, _)| q != player) {
        check_assignment(tree, q, assignment)?;
        let view = tree.view(q);
        let inc = assignment_inclusion(view, assignment);
        for (z, u) in out.iter_mut().enumerate() {
            if !inc[view.terminal_seq[z]] {
                *u = 0.0;
            }
        }
    }
    Ok(out)
}

/// Parameterized utilities `û_I(a)`: the utility collected directly after
/// `(I, a)` plus the values of the child infosets under `assignment`.
pub fn laminar_utilities(view: &PlayerView, assignment: &[usize], observed: &[f64]) -> Vec<Vec<f64>> {
    let mut direct = vec![0.0; view.num_sequences()];
    for (z, &u) in observed.iter().enumerate() {
        direct[view.terminal_seq[z]] += u;
    }
    let mut value = vec![0.0; view.num_infosets()];
    let mut util: Vec<Vec<f64>> = view.num_actions.iter().map(|&n| vec![0.0; n]).collect();
    for local in (0..view.num_infosets()).rev() {
        for a in 0..view.num_actions[local] {
            let s = view.seq(local, a);
            util[local][a] = direct[s] + view.seq_children[s].iter().map(|&c| value[c]).sum::<f64>();
        }
        value[local] = util[local][assignment[local]];
    }
    util
}

/// Laminar regret update of CFR-S for the sampled `assignment` of the
/// table's owner against the `observed` utilities.
pub fn cfr_s_update(tree: &GameTree, table: &mut RegretTable, assignment: &[usize], observed: &[f64]) -> Result<()> {
    check_assignment(tree, table.player, assignment)?;
    if observed.len() != tree.num_terminals() {
        return Err(Error::InvalidPlan("observed utilities must cover every terminal".into()));
    }
    let util = laminar_utilities(tree.view(table.player), assignment, observed);
    for ((row, u), &chosen) in table.regrets.iter_mut().zip(&util).zip(assignment) {
        let v = u[chosen];
        for (r, x) in row.iter_mut().zip(u) {
            *r += x - v;
        }
    }
    table.updates += 1;
    Ok(())
}
