//! Exact ε-CCE gaps, payoff range, social welfare and brute-force oracles.
//!
//! Everything reduces to per-terminal weights. For player `i` the
//! *opponent reach* of a distribution is, per terminal, the probability
//! that chance and every other player let play reach it. A deviation's
//! value is linear in it, so the best deviation is a bottom-up dynamic
//! program over `i`'s sequences.

use serde::{Deserialize, Serialize};

use crate::efg::{
    behavioral_reach, enumerate_plans, BehavioralStrategy, GameTree, NodeKind, NormalFormPlan, Player,
    PlayerView, RealizationVector, EQUIV_TOL,
};
use crate::joint::{JointDistribution, NormalFormStrategy};
use crate::Result;

/// Incentive to deviate, per player and overall, plus welfare.
///
/// `epsilon_i` is the best deviation value minus the on-path value and may
/// be negative; `epsilon` is `max(0, max_i epsilon_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub best_response: Vec<f64>,
    pub on_path: Vec<f64>,
    pub epsilon_i: Vec<f64>,
    pub epsilon: f64,
    pub alpha: f64,
    pub delta: f64,
    /// Set when the payoff range is zero and `alpha` is reported as 0.
    pub degenerate: bool,
    pub sw: f64,
    pub sw_upper_bound: Option<f64>,
    pub sw_ratio: Option<f64>,
}

impl GapReport {
    pub fn new(best_response: Vec<f64>, on_path: Vec<f64>, delta: f64) -> Self {
        let epsilon_i: Vec<f64> = best_response.iter().zip(&on_path).map(|(b, v)| b - v).collect();
        // a correlated distribution can pay more than every fixed deviation,
        // so single incentives may be negative; ε itself is the smallest
        // nonnegative bound
        let epsilon = epsilon_i.iter().copied().fold(0.0, f64::max);
        let degenerate = delta <= 0.0;
        GapReport {
            alpha: if degenerate { 0.0 } else { epsilon / delta },
            sw: on_path.iter().sum(),
            best_response,
            on_path,
            epsilon_i,
            epsilon,
            delta,
            degenerate,
            sw_upper_bound: None,
            sw_ratio: None,
        }
    }

    /// Attaches a welfare bound; the ratio is only defined for a positive bound.
    pub fn with_sw_upper_bound(mut self, bound: f64) -> Self {
        self.sw_upper_bound = Some(bound);
        self.sw_ratio = (bound > 0.0).then(|| self.sw / bound);
        self
    }
}

/// `max_i (max_z u_i(z) - min_z u_i(z))`.
pub fn payoff_range(tree: &GameTree) -> f64 {
    (0..tree.num_players())
        .map(|p| {
            let (lo, hi) = (0..tree.num_terminals())
                .map(|z| tree.payoff(z, p))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), u| (lo.min(u), hi.max(u)));
            hi - lo
        })
        .fold(0.0, f64::max)
}

pub(crate) fn terminal_inclusion(view: &PlayerView, plan: &NormalFormPlan) -> Vec<bool> {
    let inc = view.sequence_inclusion(&plan.choices);
    view.terminal_seq.iter().map(|&s| inc[s]).collect()
}

/// Per-player opponent reach and on-path value of a joint distribution.
fn joint_sums(tree: &GameTree, joint: &JointDistribution) -> (Vec<Vec<f64>>, Vec<f64>) {
    let players = tree.num_players();
    let terminals = tree.num_terminals();
    let inc: Vec<Vec<Vec<bool>>> = (0..players)
        .map(|p| {
            let view = tree.view(p);
            joint.plans(p).iter().map(|plan| terminal_inclusion(view, plan)).collect()
        })
        .collect();
    let mut opp = vec![vec![0.0; terminals]; players];
    let mut on_path = vec![0.0; players];
    for (ids, w) in joint.iter() {
        for z in 0..terminals {
            let mut missing = None;
            let mut count = 0;
            for (j, &id) in ids.iter().enumerate() {
                if !inc[j][id as usize][z] {
                    count += 1;
                    missing = Some(j);
                    if count > 1 {
                        break;
                    }
                }
            }
            let c = w * tree.chance_reach(z);
            match (count, missing) {
                (0, _) => {
                    for (i, u) in tree.payoffs(z).iter().enumerate() {
                        opp[i][z] += c;
                        on_path[i] += c * u;
                    }
                }
                (1, Some(j)) => opp[j][z] += c,
                _ => {}
            }
        }
    }
    (opp, on_path)
}

/// Probability per terminal that chance and every player other than `i`
/// reach it under `joint`.
pub fn opponent_reach(tree: &GameTree, i: Player, joint: &JointDistribution) -> RealizationVector {
    let (mut opp, _) = joint_sums(tree, joint);
    RealizationVector {
        terminals: opp.swap_remove(i),
        infosets: None,
    }
}

/// Best reduced plan of `i` against opponent reach `opp` (chance included).
/// Ties go to the lowest action index.
pub fn best_response(tree: &GameTree, i: Player, opp: &[f64]) -> (f64, NormalFormPlan) {
    let view = tree.view(i);
    let mut seq_value = vec![0.0; view.num_sequences()];
    for (z, &w) in opp.iter().enumerate() {
        if w != 0.0 {
            seq_value[view.terminal_seq[z]] += w * tree.payoff(z, i);
        }
    }
    let mut best = vec![0usize; view.num_infosets()];
    let mut value = vec![0.0; view.num_infosets()];
    for local in (0..view.num_infosets()).rev() {
        let mut top = f64::NEG_INFINITY;
        for a in 0..view.num_actions[local] {
            let s = view.seq(local, a);
            let v = seq_value[s] + view.seq_children[s].iter().map(|&c| value[c]).sum::<f64>();
            if v > top {
                top = v;
                best[local] = a;
            }
        }
        value[local] = top;
    }
    let root = seq_value[0] + view.seq_children[0].iter().map(|&c| value[c]).sum::<f64>();
    let mut choices = vec![None; view.num_infosets()];
    let mut reached = vec![false; view.num_sequences()];
    reached[0] = true;
    for local in 0..view.num_infosets() {
        if reached[view.parent_seq[local]] {
            choices[local] = Some(best[local] as u32);
            reached[view.seq(local, best[local])] = true;
        }
    }
    (root, NormalFormPlan { owner: i, choices })
}

fn report_from_sums(tree: &GameTree, opp: &[Vec<f64>], on_path: Vec<f64>) -> GapReport {
    let best = (0..tree.num_players()).map(|i| best_response(tree, i, &opp[i]).0).collect();
    GapReport::new(best, on_path, payoff_range(tree))
}

/// Exact gap of a joint distribution over reduced plans.
pub fn cce_gap(tree: &GameTree, joint: &JointDistribution) -> GapReport {
    let (opp, on_path) = joint_sums(tree, joint);
    report_from_sums(tree, &opp, on_path)
}

/// Gap of the product of independent behavioral strategies, without
/// materializing the product.
pub fn product_gap(tree: &GameTree, profile: &[BehavioralStrategy]) -> Result<GapReport> {
    let mut tracker = GapTracker::new(tree);
    let reaches = profile
        .iter()
        .map(|pi| behavioral_reach(tree, pi).map(|r| r.terminals))
        .collect::<Result<Vec<_>>>()?;
    tracker.add_product(tree, &reaches, 1.0);
    Ok(tracker.report(tree))
}

/// Sum of the players' expected utilities.
pub fn social_welfare(tree: &GameTree, joint: &JointDistribution) -> f64 {
    joint_sums(tree, joint).1.iter().sum()
}

/// Welfare of a fully coordinated team that also observes every move:
/// maximum at decision nodes, expectation at chance nodes. It bounds the
/// welfare of every joint plan, hence of every distribution.
pub fn sw_upper_bound(tree: &GameTree) -> f64 {
    let nodes = tree.nodes();
    let mut v = vec![0.0; nodes.len()];
    for id in (0..nodes.len()).rev() {
        let node = &nodes[id];
        v[id] = match &node.kind {
            NodeKind::Terminal { payoffs, .. } => payoffs.iter().sum(),
            NodeKind::Chance { probs } => node.children.iter().zip(probs).map(|(&c, p)| p * v[c]).sum(),
            NodeKind::Decision { .. } => node.children.iter().map(|&c| v[c]).fold(f64::NEG_INFINITY, f64::max),
        };
    }
    v[tree.root()]
}

/// Expected payoffs when every player follows its plan, by plain recursion.
fn play(tree: &GameTree, plans: &[&NormalFormPlan], node: usize) -> Vec<f64> {
    let n = tree.node(node);
    match &n.kind {
        NodeKind::Terminal { payoffs, .. } => payoffs.clone(),
        NodeKind::Chance { probs } => {
            let mut out = vec![0.0; tree.num_players()];
            for (&c, p) in n.children.iter().zip(probs) {
                for (o, u) in out.iter_mut().zip(play(tree, plans, c)) {
                    *o += p * u;
                }
            }
            out
        }
        NodeKind::Decision { player, infoset } => {
            let a = plans[*player]
                .action(tree.infoset(*infoset).local)
                .expect("a plan chooses at every infoset it reaches");
            play(tree, plans, n.children[a])
        }
    }
}

/// Reference gap: enumerates every reduced deviation of every player and
/// evaluates each against every support entry by tree recursion.
pub fn brute_force_cce_gap(tree: &GameTree, joint: &JointDistribution, cap: usize) -> Result<GapReport> {
    let players = tree.num_players();
    let entries: Vec<(Vec<&NormalFormPlan>, f64)> = joint
        .iter()
        .map(|(ids, w)| {
            let plans = ids.iter().enumerate().map(|(p, &id)| joint.plan(p, id)).collect();
            (plans, w)
        })
        .collect();
    let mut on_path = vec![0.0; players];
    for (plans, w) in &entries {
        for (o, u) in on_path.iter_mut().zip(play(tree, plans, tree.root())) {
            *o += w * u;
        }
    }
    let mut best = vec![f64::NEG_INFINITY; players];
    for i in 0..players {
        for deviation in enumerate_plans(tree, i, cap)? {
            let mut value = 0.0;
            for (plans, w) in &entries {
                let mut swapped = plans.clone();
                swapped[i] = &deviation;
                value += w * play(tree, &swapped, tree.root())[i];
            }
            best[i] = best[i].max(value);
        }
    }
    Ok(GapReport::new(best, on_path, payoff_range(tree)))
}

/// True iff the mixed plan reach of `x` matches `pi`'s reach at every
/// terminal within the equivalence tolerance.
pub fn realization_equivalence_check(tree: &GameTree, pi: &BehavioralStrategy, x: &NormalFormStrategy) -> bool {
    if pi.owner() != x.owner() {
        return false;
    }
    let Ok(want) = behavioral_reach(tree, pi) else {
        return false;
    };
    let got = x.realization(tree);
    want.max_abs_diff(&got) <= EQUIV_TOL
}

/// Running opponent-reach and on-path sums of a distribution that is built
/// up as a weighted sum of product distributions. Reports its exact gap in
/// time linear in the number of terminals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapTracker {
    pub opp: Vec<Vec<f64>>,
    pub on_path: Vec<f64>,
    pub mass: f64,
    pub delta: f64,
    pub sw_upper_bound: f64,
}

impl GapTracker {
    pub fn new(tree: &GameTree) -> Self {
        GapTracker {
            opp: vec![vec![0.0; tree.num_terminals()]; tree.num_players()],
            on_path: vec![0.0; tree.num_players()],
            mass: 0.0,
            delta: payoff_range(tree),
            sw_upper_bound: sw_upper_bound(tree),
        }
    }

    /// Adds `weight` times the product of independent per-player terminal
    /// reach vectors.
    pub fn add_product(&mut self, tree: &GameTree, reaches: &[Vec<f64>], weight: f64) {
        let players = reaches.len();
        for z in 0..tree.num_terminals() {
            let c = weight * tree.chance_reach(z);
            if c == 0.0 {
                continue;
            }
            let all: f64 = reaches.iter().map(|r| r[z]).product();
            let payoffs = tree.payoffs(z);
            for i in 0..players {
                let others: f64 = (0..players).filter(|&j| j != i).map(|j| reaches[j][z]).product();
                self.opp[i][z] += c * others;
                self.on_path[i] += c * all * payoffs[i];
            }
        }
        self.mass += weight;
    }

    /// Gap of the accumulated distribution divided by its mass.
    pub fn report(&self, tree: &GameTree) -> GapReport {
        let scale = if self.mass > 0.0 { 1.0 / self.mass } else { 0.0 };
        let best = (0..tree.num_players())
            .map(|i| best_response(tree, i, &self.opp[i]).0 * scale)
            .collect();
        let on_path = self.on_path.iter().map(|v| v * scale).collect();
        GapReport::new(best, on_path, self.delta).with_sw_upper_bound(self.sw_upper_bound)
    }

    /// Unnormalized external regret per player: best fixed deviation against
    /// the accumulated opponents minus the accumulated on-path utility.
    pub fn regrets(&self, tree: &GameTree) -> Vec<f64> {
        (0..tree.num_players())
            .map(|i| best_response(tree, i, &self.opp[i]).0 - self.on_path[i])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{coordination_game, kuhn3, shapley_efg};
    use crate::joint::JointDistribution;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plan(p: Player, a: u32) -> NormalFormPlan {
        NormalFormPlan {
            owner: p,
            choices: vec![Some(a)],
        }
    }

    fn fig2(entries: &[((u32, u32), f64)]) -> JointDistribution {
        JointDistribution::from_entries(2, entries.iter().map(|&((a, b), w)| (vec![plan(0, a), plan(1, b)], w)))
            .unwrap()
    }

    #[test]
    fn coordination_gaps() {
        let g = coordination_game();
        assert_eq!(payoff_range(&g), 1.0);
        let uniform = fig2(&[((0, 0), 0.25), ((0, 1), 0.25), ((1, 0), 0.25), ((1, 1), 0.25)]);
        let r = cce_gap(&g, &uniform);
        assert_eq!(r.epsilon_i, vec![0.25, 0.25]);
        assert_eq!(r.sw, 1.5);
        let diagonal = fig2(&[((0, 0), 0.5), ((1, 1), 0.5)]);
        assert_eq!(cce_gap(&g, &diagonal).epsilon, 0.0);
        assert_eq!(sw_upper_bound(&g), 2.0);
        for x in [&uniform, &diagonal] {
            let a = cce_gap(&g, x);
            let b = brute_force_cce_gap(&g, x, 100).unwrap();
            assert_eq!(a.epsilon_i, b.epsilon_i);
        }
    }

    #[test]
    fn coordination_best_responses() {
        let g = coordination_game();
        // opponent uniform: L earns 1, R earns 1/2
        let (v, p) = best_response(&g, 0, &[0.5, 0.5, 0.5, 0.5]);
        assert_eq!((v, p.choices), (1.0, vec![Some(0)]));
        // opponent plays R: both rows earn 1, the lower index wins
        let (v, p) = best_response(&g, 0, &[0.0, 1.0, 0.0, 1.0]);
        assert_eq!((v, p.choices), (1.0, vec![Some(0)]));
    }

    #[test]
    fn product_gap_of_alternating_averages() {
        let g = coordination_game();
        let half = |p| BehavioralStrategy::new(&g, p, vec![vec![0.5, 0.5]]).unwrap();
        let r = product_gap(&g, &[half(0), half(1)]).unwrap();
        assert!((r.epsilon - 0.25).abs() < 1e-15);
        // pure Nash equilibrium (L, L)
        let pure = |p| BehavioralStrategy::new(&g, p, vec![vec![1.0, 0.0]]).unwrap();
        assert_eq!(product_gap(&g, &[pure(0), pure(1)]).unwrap().epsilon, 0.0);
    }

    #[test]
    fn payoff_ranges() {
        assert_eq!(payoff_range(&shapley_efg()), 2.0);
        assert_eq!(payoff_range(&kuhn3(4).unwrap()), 6.0);
        assert_eq!(sw_upper_bound(&kuhn3(4).unwrap()), 0.0);
        let flat = crate::games::matrix_game(&crate::games::MatrixGame::bimatrix(
            &["a", "b"],
            &["c"],
            &[&[(1.0, 1.0)], &[(1.0, 1.0)]],
        ))
        .unwrap();
        assert_eq!(payoff_range(&flat), 0.0);
        let x = JointDistribution::from_entries(2, [(vec![plan(0, 1), plan(1, 0)], 1.0)]).unwrap();
        let r = cce_gap(&flat, &x);
        assert!(r.degenerate);
        assert_eq!((r.alpha, r.epsilon), (0.0, 0.0));
    }

    fn random_joint(g: &GameTree, support: usize, seed: u64) -> JointDistribution {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plans: Vec<Vec<NormalFormPlan>> = (0..g.num_players())
            .map(|p| enumerate_plans(g, p, 100_000).unwrap())
            .collect();
        let entries: Vec<_> = (0..support)
            .map(|_| {
                let joint = plans.iter().map(|ps| ps.choose(&mut rng).unwrap().clone()).collect();
                (joint, rng.gen_range(0.1..1.0))
            })
            .collect();
        JointDistribution::from_entries(g.num_players(), entries).unwrap()
    }

    #[test]
    fn kuhn_opponent_reach_matches_marginal_sum() {
        let g = kuhn3(3).unwrap();
        for seed in 0..5 {
            let x = random_joint(&g, 15, seed);
            for i in 0..3 {
                let got = opponent_reach(&g, i, &x);
                // direct marginal: sum over entries of w * chance * product of
                // the other players' 0/1 plan reaches
                let mut want = vec![0.0; g.num_terminals()];
                for (ids, w) in x.iter() {
                    let reaches: Vec<Vec<f64>> = (0..3)
                        .filter(|&j| j != i)
                        .map(|j| crate::efg::plan_reach(&g, x.plan(j, ids[j])).unwrap().terminals)
                        .collect();
                    for (z, t) in want.iter_mut().enumerate() {
                        *t += w * g.chance_reach(z) * reaches.iter().map(|r| r[z]).product::<f64>();
                    }
                }
                let diff = got.terminals.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(diff <= 1e-12, "{diff}");
            }
        }
    }

    #[test]
    fn kuhn_best_response_matches_enumeration() {
        let g = kuhn3(3).unwrap();
        for seed in 10..13 {
            let x = random_joint(&g, 10, seed);
            for i in 0..3 {
                let opp = opponent_reach(&g, i, &x).terminals;
                let (value, plan) = best_response(&g, i, &opp);
                let mut top = f64::NEG_INFINITY;
                for candidate in enumerate_plans(&g, i, 100_000).unwrap() {
                    let reach = crate::efg::plan_reach(&g, &candidate).unwrap().terminals;
                    let v: f64 = (0..g.num_terminals()).map(|z| reach[z] * opp[z] * g.payoff(z, i)).sum();
                    top = top.max(v);
                }
                assert!((value - top).abs() <= 1e-12);
                let reach = crate::efg::plan_reach(&g, &plan).unwrap().terminals;
                let attained: f64 = (0..g.num_terminals()).map(|z| reach[z] * opp[z] * g.payoff(z, i)).sum();
                assert!((attained - value).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn shapley_matches_brute_force() {
        let g = shapley_efg();
        for seed in 0..5 {
            let x = random_joint(&g, 8, seed);
            let a = cce_gap(&g, &x);
            let b = brute_force_cce_gap(&g, &x, 10_000).unwrap();
            for i in 0..2 {
                assert!((a.epsilon_i[i] - b.epsilon_i[i]).abs() <= 1e-9);
            }
            assert!(a.sw <= sw_upper_bound(&g) + 1e-9);
        }
    }

    #[test]
    fn correlation_can_beat_every_deviation() {
        let g = crate::games::matrix_game(&crate::games::MatrixGame::bimatrix(
            &["a", "b"],
            &["a", "b"],
            &[&[(2.0, 2.0), (0.0, 0.0)], &[(0.0, 0.0), (2.0, 2.0)]],
        ))
        .unwrap();
        let x = JointDistribution::from_entries(2, [(vec![plan(0, 0), plan(1, 0)], 1.0), (vec![plan(0, 1), plan(1, 1)], 1.0)])
            .unwrap();
        let r = cce_gap(&g, &x);
        assert_eq!(r.epsilon_i, vec![-1.0, -1.0]);
        assert_eq!((r.epsilon, r.alpha), (0.0, 0.0));
    }

    #[test]
    fn product_incentives_are_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for g in [shapley_efg(), kuhn3(3).unwrap()] {
            for _ in 0..20 {
                let profile: Vec<BehavioralStrategy> = (0..g.num_players())
                    .map(|p| {
                        let probs = g
                            .view(p)
                            .num_actions
                            .iter()
                            .map(|&n| {
                                let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
                                let s: f64 = w.iter().sum();
                                w.iter().map(|x| x / s).collect()
                            })
                            .collect();
                        BehavioralStrategy::new(&g, p, probs).unwrap()
                    })
                    .collect();
                let r = product_gap(&g, &profile).unwrap();
                assert!(r.epsilon_i.iter().all(|&e| e >= -1e-9), "{:?}", r.epsilon_i);
            }
        }
    }

    #[test]
    fn report_json_is_flat() {
        let g = coordination_game();
        let r = cce_gap(&g, &fig2(&[((0, 0), 1.0)])).with_sw_upper_bound(2.0);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert!(v.as_object().unwrap().values().all(|x| !x.is_object()));
        assert_eq!(v["sw_ratio"], 1.0);
    }
}
