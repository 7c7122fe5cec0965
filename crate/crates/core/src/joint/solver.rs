use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{joint_accumulate, reconstruct_raw, JointDistribution, NormalFormStrategy, ReconstructionStats};
use crate::efg::{canonicalize, BehavioralStrategy, GameTree, PlayerView};
use crate::eval::{product_gap, GapReport, GapTracker};
use crate::regret::{cfr_s_update, observed_utilities, sample_assignment, CfrState, Probs, RegretTable};
use crate::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;
const CHECKPOINT_FORMAT: &str = "cce-checkpoint";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Cfr,
    CfrS,
    CfrJr,
    CfrJrK,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Cfr, Algorithm::CfrS, Algorithm::CfrJr, Algorithm::CfrJrK];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cfr => "cfr",
            Algorithm::CfrS => "cfr-s",
            Algorithm::CfrJr => "cfr-jr",
            Algorithm::CfrJrK => "cfr-jr-k",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

/// Metrics of a solver's output after `iteration` iterations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: u64,
    pub support: usize,
    #[serde(flatten)]
    pub report: GapReport,
}

/// A learning dynamic that can be advanced one iteration at a time.
pub trait Solver {
    fn algorithm(&self) -> Algorithm;
    fn iteration(&self) -> u64;
    fn step(&mut self);
    /// Gap of the current output; `None` before any output exists.
    fn report(&self) -> Option<GapReport>;
    /// Support size of the output distribution.
    fn support(&self) -> usize;
    fn checkpoint(&self) -> Checkpoint;
}

/// Runs `iters` more iterations, recording a trace point every `eval_every`
/// iterations and after the last one. `eval_every = 0` records only the end.
pub fn drive(solver: &mut dyn Solver, iters: u64, eval_every: u64) -> Vec<TracePoint> {
    let mut trace = Vec::new();
    for n in 1..=iters {
        solver.step();
        let t = solver.iteration();
        if (eval_every > 0 && t.is_multiple_of(eval_every)) || n == iters {
            if let Some(report) = solver.report() {
                trace.push(TracePoint {
                    iteration: t,
                    support: solver.support(),
                    report,
                });
            }
        }
    }
    trace
}

fn terminal_reach(view: &PlayerView, probs: &[Vec<f64>]) -> Vec<f64> {
    let seq = view.sequence_realization(probs);
    view.terminal_seq.iter().map(|&s| seq[s]).collect()
}

fn check_shape(tree: &GameTree, tables: &[RegretTable]) -> Result<()> {
    let ok = tables.len() == tree.num_players()
        && tables.iter().enumerate().all(|(p, t)| {
            t.player == p
                && t.regrets.len() == tree.view(p).num_infosets()
                && t.regrets.iter().zip(&tree.view(p).num_actions).all(|(r, &n)| r.len() == n)
        });
    if ok {
        Ok(())
    } else {
        Err(Error::Schema("checkpoint does not match the game".into()))
    }
}

/// Vanilla CFR; the output is the product of the average strategies.
pub struct Cfr<'a> {
    tree: &'a GameTree,
    state: CfrState,
}

impl<'a> Cfr<'a> {
    pub fn new(tree: &'a GameTree) -> Self {
        Cfr {
            tree,
            state: CfrState::new(tree),
        }
    }

    pub fn state(&self) -> &CfrState {
        &self.state
    }

    pub fn average_profile(&self) -> Vec<BehavioralStrategy> {
        self.state.average_profile()
    }
}

impl Solver for Cfr<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Cfr
    }

    fn iteration(&self) -> u64 {
        self.state.iteration
    }

    fn step(&mut self) {
        self.state.step(self.tree);
    }

    fn report(&self) -> Option<GapReport> {
        (self.state.iteration > 0).then(|| {
            product_gap(self.tree, &self.average_profile()).expect("averages are valid strategies")
        })
    }

    /// Support of the product of the reconstructed averages.
    fn support(&self) -> usize {
        self.average_profile()
            .iter()
            .map(|pi| reconstruct_raw(self.tree, pi.owner(), pi.probs()).0.support())
            .fold(1usize, usize::saturating_mul)
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            cfr: Some(self.state.clone()),
            ..Checkpoint::empty(Algorithm::Cfr, self.state.iteration)
        }
    }
}

/// CFR-Jr: CFR whose iterates are reconstructed into normal-form strategies
/// every `k`-th iteration and accumulated as product distributions.
pub struct CfrJr<'a> {
    tree: &'a GameTree,
    k: u64,
    state: CfrState,
    joint: JointDistribution,
    output: GapTracker,
    ledger: GapTracker,
    last_stats: Vec<ReconstructionStats>,
}

impl<'a> CfrJr<'a> {
    pub fn new(tree: &'a GameTree, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("reconstruction rate k must be at least 1".into()));
        }
        Ok(CfrJr {
            tree,
            k,
            state: CfrState::new(tree),
            joint: JointDistribution::new(tree.num_players()),
            output: GapTracker::new(tree),
            ledger: GapTracker::new(tree),
            last_stats: Vec::new(),
        })
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn into_joint(self) -> JointDistribution {
        self.joint
    }

    pub fn state(&self) -> &CfrState {
        &self.state
    }

    /// Running sums of every played iterate; its per-player regrets are the
    /// players' external regrets.
    pub fn ledger(&self) -> &GapTracker {
        &self.ledger
    }

    /// `max_i R_i^t / t` from the played iterates.
    pub fn average_regret(&self) -> f64 {
        let t = self.state.iteration.max(1) as f64;
        self.ledger
            .regrets(self.tree)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
            / t
    }

    /// Statistics of the latest reconstruction, one entry per player.
    pub fn last_stats(&self) -> &[ReconstructionStats] {
        &self.last_stats
    }
}

impl Solver for CfrJr<'_> {
    fn algorithm(&self) -> Algorithm {
        if self.k == 1 {
            Algorithm::CfrJr
        } else {
            Algorithm::CfrJrK
        }
    }

    fn iteration(&self) -> u64 {
        self.state.iteration
    }

    fn step(&mut self) {
        let tree = self.tree;
        let played = self.state.step(tree);
        let reaches: Vec<Vec<f64>> = played
            .iter()
            .enumerate()
            .map(|(p, probs)| terminal_reach(tree.view(p), probs))
            .collect();
        self.ledger.add_product(tree, &reaches, 1.0);
        if self.state.iteration.is_multiple_of(self.k) {
            let (xs, stats): (Vec<NormalFormStrategy>, Vec<ReconstructionStats>) = played
                .iter()
                .enumerate()
                .map(|(p, probs)| reconstruct_raw(tree, p, probs))
                .unzip();
            let out: Vec<Vec<f64>> = xs.iter().map(|x| x.realization(tree).terminals).collect();
            joint_accumulate(&mut self.joint, &xs).expect("one strategy per player");
            self.output.add_product(tree, &out, 1.0);
            self.last_stats = stats;
        }
    }

    fn report(&self) -> Option<GapReport> {
        (self.output.mass > 0.0).then(|| self.output.report(self.tree))
    }

    fn support(&self) -> usize {
        self.joint.len()
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            k: self.k,
            cfr: Some(self.state.clone()),
            joint: Some(self.joint.clone()),
            output: Some(self.output.clone()),
            ledger: Some(self.ledger.clone()),
            ..Checkpoint::empty(self.algorithm(), self.state.iteration)
        }
    }
}

/// CFR-S: every player samples a plan from its regret-matching strategy,
/// updates laminar regrets against the sampled opponents, and the sampled
/// profiles are tallied into the empirical frequency of play.
pub struct CfrS<'a> {
    tree: &'a GameTree,
    seed: u64,
    tables: Vec<RegretTable>,
    rngs: Vec<ChaCha8Rng>,
    joint: JointDistribution,
    output: GapTracker,
    frozen: bool,
    iteration: u64,
}

fn player_rng(seed: u64, player: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(player as u64);
    rng
}

impl<'a> CfrS<'a> {
    pub fn new(tree: &'a GameTree, seed: u64) -> Self {
        let players = tree.num_players();
        CfrS {
            tree,
            seed,
            tables: (0..players).map(|p| RegretTable::new(tree, p)).collect(),
            rngs: (0..players).map(|p| player_rng(seed, p)).collect(),
            joint: JointDistribution::new(players),
            output: GapTracker::new(tree),
            frozen: false,
            iteration: 0,
        }
    }

    /// Test hook: keeps the current strategies fixed (no regret updates).
    pub fn freeze(mut self) -> Self {
        self.frozen = true;
        self
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn into_joint(self) -> JointDistribution {
        self.joint
    }

    pub fn tables(&self) -> &[RegretTable] {
        &self.tables
    }
}

impl Solver for CfrS<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::CfrS
    }

    fn iteration(&self) -> u64 {
        self.iteration
    }

    fn step(&mut self) {
        let tree = self.tree;
        let probs: Vec<Probs> = self.tables.iter().map(RegretTable::strategy).collect();
        let assignments: Vec<Vec<usize>> = probs
            .iter()
            .zip(self.rngs.iter_mut())
            .map(|(pr, rng)| sample_assignment(pr, rng))
            .collect();
        if !self.frozen {
            for (p, table) in self.tables.iter_mut().enumerate() {
                let observed = observed_utilities(tree, p, &assignments).expect("one assignment per player");
                cfr_s_update(tree, table, &assignments[p], &observed).expect("sampled assignments fit the tree");
            }
        }
        let plans: Vec<_> = assignments
            .iter()
            .enumerate()
            .map(|(p, a)| canonicalize(tree, p, a))
            .collect();
        let reaches: Vec<Vec<f64>> = plans
            .iter()
            .map(|plan| {
                let view = tree.view(plan.owner);
                let inc = view.sequence_inclusion(&plan.choices);
                view.terminal_seq.iter().map(|&s| if inc[s] { 1.0 } else { 0.0 }).collect()
            })
            .collect();
        self.joint.tally(&plans).expect("one plan per player");
        self.output.add_product(tree, &reaches, 1.0);
        self.iteration += 1;
    }

    fn report(&self) -> Option<GapReport> {
        (self.output.mass > 0.0).then(|| self.output.report(self.tree))
    }

    fn support(&self) -> usize {
        self.joint.len()
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            seed: Some(self.seed),
            frozen: self.frozen,
            tables: Some(self.tables.clone()),
            joint: Some(self.joint.clone()),
            output: Some(self.output.clone()),
            rng_words: Some(self.rngs.iter().map(|r| r.get_word_pos().to_string()).collect()),
            ..Checkpoint::empty(Algorithm::CfrS, self.iteration)
        }
    }
}

/// Complete solver state; resuming from it continues bit-identically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub algorithm: Algorithm,
    pub iteration: u64,
    pub k: u64,
    pub seed: Option<u64>,
    pub frozen: bool,
    pub cfr: Option<CfrState>,
    pub tables: Option<Vec<RegretTable>>,
    pub joint: Option<JointDistribution>,
    pub output: Option<GapTracker>,
    pub ledger: Option<GapTracker>,
    /// Position of every player's random stream, as decimal strings.
    pub rng_words: Option<Vec<String>>,
}

impl Checkpoint {
    fn empty(algorithm: Algorithm, iteration: u64) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            algorithm,
            iteration,
            k: 1,
            seed: None,
            frozen: false,
            cfr: None,
            tables: None,
            joint: None,
            output: None,
            ledger: None,
            rng_words: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoints serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("format").and_then(|f| f.as_str()) != Some(CHECKPOINT_FORMAT) {
            return Err(Error::Schema("not a solver checkpoint".into()));
        }
        match value.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == CHECKPOINT_VERSION as u64 => {}
            other => {
                return Err(Error::Schema(format!(
                    "checkpoint version {other:?} is not supported (expected {CHECKPOINT_VERSION})"
                )))
            }
        }
        serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Checkpoint::from_json(&text)
    }
}

fn missing(what: &str) -> Error {
    Error::Schema(format!("checkpoint lacks `{what}`"))
}

/// Rebuilds a solver from a checkpoint taken on the same game.
pub fn resume<'a>(tree: &'a GameTree, ck: &Checkpoint) -> Result<Box<dyn Solver + 'a>> {
    match ck.algorithm {
        Algorithm::Cfr => {
            let state = ck.cfr.clone().ok_or_else(|| missing("cfr"))?;
            check_shape(tree, &state.tables)?;
            Ok(Box::new(Cfr { tree, state }))
        }
        Algorithm::CfrJr | Algorithm::CfrJrK => {
            let state = ck.cfr.clone().ok_or_else(|| missing("cfr"))?;
            check_shape(tree, &state.tables)?;
            let mut solver = CfrJr::new(tree, ck.k)?;
            solver.state = state;
            solver.joint = ck.joint.clone().ok_or_else(|| missing("joint"))?;
            solver.output = ck.output.clone().ok_or_else(|| missing("output"))?;
            solver.ledger = ck.ledger.clone().ok_or_else(|| missing("ledger"))?;
            Ok(Box::new(solver))
        }
        Algorithm::CfrS => {
            let seed = ck.seed.ok_or_else(|| missing("seed"))?;
            let tables = ck.tables.clone().ok_or_else(|| missing("tables"))?;
            check_shape(tree, &tables)?;
            let words = ck.rng_words.as_ref().ok_or_else(|| missing("rng_words"))?;
            if words.len() != tree.num_players() {
                return Err(missing("rng_words"));
            }
            let mut solver = CfrS::new(tree, seed);
            for (rng, w) in solver.rngs.iter_mut().zip(words) {
                rng.set_word_pos(w.parse::<u128>().map_err(|_| Error::Schema(format!("bad stream position `{w}`")))?);
            }
            solver.tables = tables;
            solver.joint = ck.joint.clone().ok_or_else(|| missing("joint"))?;
            solver.output = ck.output.clone().ok_or_else(|| missing("output"))?;
            solver.frozen = ck.frozen;
            solver.iteration = ck.iteration;
            Ok(Box::new(solver))
        }
    }
}

/// Plain CFR for `iters` iterations; returns the average strategies.
pub fn run_cfr(tree: &GameTree, iters: u64, eval_every: u64) -> (Vec<BehavioralStrategy>, Vec<TracePoint>) {
    let mut solver = Cfr::new(tree);
    let trace = drive(&mut solver, iters, eval_every);
    (solver.average_profile(), trace)
}

/// CFR-Jr for `iters` iterations; returns the normalized average joint
/// distribution and the trace. Deterministic.
pub fn run_cfr_jr(tree: &GameTree, iters: u64, eval_every: u64) -> (JointDistribution, Vec<TracePoint>) {
    run_cfr_jr_k(tree, iters, 1, eval_every).expect("k = 1 is always valid")
}

/// CFR-Jr reconstructing only at iterations `k, 2k, ...` (counted from 1);
/// the output is normalized by `⌊iters / k⌋`.
pub fn run_cfr_jr_k(tree: &GameTree, iters: u64, k: u64, eval_every: u64) -> Result<(JointDistribution, Vec<TracePoint>)> {
    if k > iters {
        return Err(Error::InvalidParams(format!("reconstruction rate {k} exceeds the {iters} iterations")));
    }
    let mut solver = CfrJr::new(tree, k)?;
    let trace = drive(&mut solver, iters, eval_every);
    Ok((solver.into_joint(), trace))
}

/// CFR-S for `iters` iterations with one random stream per player derived
/// from `seed`; returns the empirical frequency of play.
pub fn run_cfr_s(tree: &GameTree, iters: u64, seed: u64, eval_every: u64) -> (JointDistribution, Vec<TracePoint>) {
    let mut solver = CfrS::new(tree, seed);
    let trace = drive(&mut solver, iters, eval_every);
    (solver.into_joint(), trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efg::NormalFormPlan;
    use crate::eval::cce_gap;
    use crate::games::{coordination_game, kuhn3, shapley_efg};

    #[test]
    fn first_cfr_jr_iterate_is_uniform_product() {
        let g = coordination_game();
        let (x, trace) = run_cfr_jr(&g, 1, 1);
        assert_eq!(x.len(), 4);
        for (_, w) in x.iter() {
            assert_eq!(w, 0.25);
        }
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].report.epsilon, 0.25);
    }

    #[test]
    fn trace_cadence() {
        let g = kuhn3(3).unwrap();
        let (_, trace) = run_cfr_jr(&g, 120, 50);
        let its: Vec<u64> = trace.iter().map(|p| p.iteration).collect();
        assert_eq!(its, vec![50, 100, 120]);
        assert!(trace.windows(2).all(|w| w[0].support <= w[1].support));
    }

    #[test]
    fn tracker_matches_materialized_gap() {
        let g = kuhn3(3).unwrap();
        let mut solver = CfrJr::new(&g, 1).unwrap();
        for _ in 0..60 {
            solver.step();
        }
        let tracked = solver.report().unwrap();
        let exact = cce_gap(&g, solver.joint());
        for i in 0..3 {
            assert!((tracked.epsilon_i[i] - exact.epsilon_i[i]).abs() < 1e-9);
        }
        assert!(tracked.epsilon <= solver.average_regret() + 1e-9);
    }

    #[test]
    fn k_equal_to_horizon_reconstructs_once() {
        let g = shapley_efg();
        let (x, trace) = run_cfr_jr_k(&g, 40, 40, 10).unwrap();
        assert!((x.normalizer() - 1.0).abs() < 1e-15);
        assert!((x.total_weight() - 1.0).abs() < 1e-9);
        assert_eq!(trace.len(), 1);
        assert!(run_cfr_jr_k(&g, 40, 41, 10).is_err());
        assert!(run_cfr_jr_k(&g, 40, 0, 10).is_err());
        let (a, _) = run_cfr_jr_k(&g, 30, 1, 0).unwrap();
        let (b, _) = run_cfr_jr(&g, 30, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn cfr_s_is_seed_deterministic() {
        let g = kuhn3(3).unwrap();
        let (a, ta) = run_cfr_s(&g, 300, 5, 100);
        let (b, tb) = run_cfr_s(&g, 300, 5, 100);
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        let (c, _) = run_cfr_s(&g, 300, 6, 100);
        assert_ne!(a, c);
    }

    #[test]
    fn frozen_uniform_sampling() {
        let g = coordination_game();
        let mut solver = CfrS::new(&g, 1).freeze();
        drive(&mut solver, 100_000, 0);
        let x = solver.joint();
        for a in 0..2 {
            for b in 0..2 {
                let profile = [
                    NormalFormPlan { owner: 0, choices: vec![Some(a)] },
                    NormalFormPlan { owner: 1, choices: vec![Some(b)] },
                ];
                assert!((x.weight(&profile) - 0.25).abs() < 0.02);
            }
        }
    }

    fn round_trip<'a>(tree: &'a GameTree, fresh: Box<dyn Solver + 'a>, mut full: Box<dyn Solver + 'a>) {
        let mut first = fresh;
        drive(first.as_mut(), 25, 0);
        let text = first.checkpoint().to_json();
        let mut resumed = resume(tree, &Checkpoint::from_json(&text).unwrap()).unwrap();
        drive(resumed.as_mut(), 15, 0);
        drive(full.as_mut(), 40, 0);
        assert_eq!(resumed.checkpoint(), full.checkpoint());
        assert_eq!(resumed.report(), full.report());
    }

    #[test]
    fn checkpoints_resume_exactly() {
        let g = kuhn3(3).unwrap();
        round_trip(&g, Box::new(Cfr::new(&g)), Box::new(Cfr::new(&g)));
        round_trip(&g, Box::new(CfrJr::new(&g, 1).unwrap()), Box::new(CfrJr::new(&g, 1).unwrap()));
        round_trip(&g, Box::new(CfrJr::new(&g, 3).unwrap()), Box::new(CfrJr::new(&g, 3).unwrap()));
        round_trip(&g, Box::new(CfrS::new(&g, 9)), Box::new(CfrS::new(&g, 9)));
    }

    #[test]
    fn checkpoint_validation() {
        let g = kuhn3(3).unwrap();
        let mut ck = CfrJr::new(&g, 1).unwrap().checkpoint();
        ck.version = 99;
        assert!(matches!(Checkpoint::from_json(&ck.to_json()), Err(Error::Schema(_))));
        let other = kuhn3(4).unwrap();
        let ck = CfrJr::new(&other, 1).unwrap().checkpoint();
        assert!(resume(&g, &ck).is_err());
        assert!(Checkpoint::from_json("{}").is_err());
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        assert!("cfr+".parse::<Algorithm>().is_err());
    }
}
