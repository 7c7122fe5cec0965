//! Normal-form reconstruction of behavioral strategies, sparse joint
//! distributions over reduced plans and the solver drivers built on them.

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use crate::efg::{BehavioralStrategy, GameTree, NormalFormPlan, Player, PlayerView, RealizationVector};
use crate::{Error, Result};

mod solver;

pub use solver::{
    drive, resume, run_cfr, run_cfr_jr, run_cfr_jr_k, run_cfr_s, Algorithm, Checkpoint, Cfr, CfrJr, CfrS, Solver,
    TracePoint, CHECKPOINT_VERSION,
};

/// Entries of ω below this are treated as zero.
pub const OMEGA_TOL: f64 = 1e-12;

/// Sparse mixed strategy over one player's reduced plans.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormStrategy {
    owner: Player,
    weights: IndexMap<NormalFormPlan, f64>,
}

impl NormalFormStrategy {
    pub fn new(owner: Player) -> Self {
        NormalFormStrategy {
            owner,
            weights: IndexMap::new(),
        }
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    /// Adds weight to a plan, merging with an existing entry.
    pub fn add(&mut self, plan: NormalFormPlan, weight: f64) {
        *self.weights.entry(plan).or_insert(0.0) += weight;
    }

    pub fn weight(&self, plan: &NormalFormPlan) -> f64 {
        self.weights.get(plan).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> usize {
        self.weights.len()
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NormalFormPlan, f64)> {
        self.weights.iter().map(|(p, &w)| (p, w))
    }

    /// Mixed plan reach `Σ_σ x(σ) ρ^σ` per terminal.
    pub fn realization(&self, tree: &GameTree) -> RealizationVector {
        let view = tree.view(self.owner);
        let mut seq = vec![0.0; view.num_sequences()];
        for (plan, w) in self.iter() {
            for (s, inc) in view.sequence_inclusion(&plan.choices).into_iter().enumerate() {
                if inc {
                    seq[s] += w;
                }
            }
        }
        RealizationVector {
            terminals: view.terminal_seq.iter().map(|&s| seq[s]).collect(),
            infosets: Some(view.parent_seq.iter().map(|&s| seq[s]).collect()),
        }
    }
}

/// Work done by one reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionStats {
    /// Iterations of the main loop; each one fixes a plan and zeroes at
    /// least one terminal.
    pub passes: usize,
    /// Sequences and infosets visited over all passes.
    pub work: usize,
    /// Smallest ω entry seen before clamping.
    pub min_omega: f64,
}

/// Bottom-up max-min over the player's sequences. `group[s]` is the
/// smallest ω among the terminals whose last own sequence is `s`, or
/// infinity if there are none. Fills `best` with the arg max per infoset and
/// returns the plan's value.
fn max_min(view: &PlayerView, group: &[f64], best: &mut [usize], value: &mut [f64]) -> f64 {
    let m = |s: usize, value: &[f64]| {
        view.seq_children[s].iter().fold(group[s], |acc, &c| acc.min(value[c]))
    };
    for local in (0..view.num_infosets()).rev() {
        let mut top = f64::NEG_INFINITY;
        for a in 0..view.num_actions[local] {
            let v = m(view.seq(local, a), value);
            if v > top {
                top = v;
                best[local] = a;
            }
        }
        value[local] = top;
    }
    m(0, value)
}

fn plan_from(view: &PlayerView, best: &[usize]) -> NormalFormPlan {
    let mut choices = vec![None; view.num_infosets()];
    let mut reached = vec![false; view.num_sequences()];
    reached[0] = true;
    for local in 0..view.num_infosets() {
        if reached[view.parent_seq[local]] {
            choices[local] = Some(best[local] as u32);
            reached[view.seq(local, best[local])] = true;
        }
    }
    NormalFormPlan {
        owner: view.player,
        choices,
    }
}

/// The plan maximizing the smallest ω over its reachable terminals, and
/// that smallest value. Ties go to the lowest action index.
pub fn argmax_min_plan(tree: &GameTree, i: Player, omega: &[f64]) -> Result<(NormalFormPlan, f64)> {
    if omega.len() != tree.num_terminals() {
        return Err(Error::InvalidStrategy("ω must have one entry per terminal".into()));
    }
    if omega.iter().all(|&w| w <= OMEGA_TOL) {
        return Err(Error::ZeroRealization);
    }
    let view = tree.view(i);
    let mut group = vec![f64::INFINITY; view.num_sequences()];
    for (z, &w) in omega.iter().enumerate() {
        let s = view.terminal_seq[z];
        group[s] = group[s].min(if w < OMEGA_TOL { 0.0 } else { w });
    }
    let mut best = vec![0; view.num_infosets()];
    let mut value = vec![0.0; view.num_infosets()];
    let top = max_min(view, &group, &mut best, &mut value);
    Ok((plan_from(view, &best), top))
}

/// Decomposes a behavioral strategy into a realization-equivalent mixed
/// strategy over at most `|Z|` reduced plans by repeatedly extracting the
/// max-min plan of the remaining realization ω.
pub fn nf_strategy_reconstruction(tree: &GameTree, pi: &BehavioralStrategy) -> Result<NormalFormStrategy> {
    Ok(reconstruct_with_stats(tree, pi)?.0)
}

/// [`nf_strategy_reconstruction`] together with its work counters.
pub fn reconstruct_with_stats(
    tree: &GameTree,
    pi: &BehavioralStrategy,
) -> Result<(NormalFormStrategy, ReconstructionStats)> {
    pi.check(tree)?;
    Ok(reconstruct_raw(tree, pi.owner(), pi.probs()))
}

pub(crate) fn reconstruct_raw(tree: &GameTree, owner: Player, probs: &[Vec<f64>]) -> (NormalFormStrategy, ReconstructionStats) {
    let view = tree.view(owner);
    let real = view.sequence_realization(probs);
    // ω is constant on the terminals sharing a last own sequence, so it is
    // tracked once per such group.
    let mut group: Vec<f64> = (0..view.num_sequences())
        .map(|s| if view.seq_terminals[s].is_empty() { f64::INFINITY } else { real[s] })
        .collect();
    let mut best = vec![0; view.num_infosets()];
    let mut value = vec![0.0; view.num_infosets()];
    let mut x = NormalFormStrategy::new(owner);
    let mut stats = ReconstructionStats {
        passes: 0,
        work: 0,
        min_omega: 0.0,
    };
    loop {
        for g in group.iter_mut() {
            if *g < OMEGA_TOL {
                stats.min_omega = stats.min_omega.min(*g);
                *g = 0.0;
            }
        }
        let top = max_min(view, &group, &mut best, &mut value);
        stats.work += view.num_sequences() + view.num_infosets();
        if !(top > 0.0 && top.is_finite()) {
            break;
        }
        stats.passes += 1;
        assert!(
            stats.passes <= tree.num_terminals(),
            "reconstruction exceeded |Z| passes"
        );
        let plan = plan_from(view, &best);
        for (s, inc) in view.sequence_inclusion(&plan.choices).into_iter().enumerate() {
            if inc && group[s].is_finite() {
                group[s] -= top;
            }
        }
        debug_assert!(x.weight(&plan) == 0.0, "plan selected twice");
        x.add(plan, top);
    }
    (x, stats)
}

/// Sparse joint distribution over reduced plan profiles.
///
/// Plans are interned per player and profiles are keyed by plan ids.
/// Entries hold raw accumulated mass; [`JointDistribution::iter`] divides by
/// the normalizer, which counts accumulation rounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "JointDoc", try_from = "JointDoc")]
pub struct JointDistribution {
    plans: Vec<IndexSet<NormalFormPlan>>,
    weights: IndexMap<Box<[u32]>, f64>,
    norm: f64,
}

#[derive(Serialize, Deserialize)]
struct JointDoc {
    plans: Vec<Vec<Vec<Option<u32>>>>,
    entries: Vec<(Vec<u32>, f64)>,
    norm: f64,
}

impl From<JointDistribution> for JointDoc {
    fn from(j: JointDistribution) -> Self {
        JointDoc {
            plans: j.plans.into_iter().map(|ps| ps.into_iter().map(|p| p.choices).collect()).collect(),
            entries: j.weights.into_iter().map(|(k, w)| (k.into_vec(), w)).collect(),
            norm: j.norm,
        }
    }
}

impl TryFrom<JointDoc> for JointDistribution {
    type Error = Error;

    fn try_from(doc: JointDoc) -> Result<Self> {
        let plans: Vec<IndexSet<NormalFormPlan>> = doc
            .plans
            .into_iter()
            .enumerate()
            .map(|(owner, ps)| ps.into_iter().map(|choices| NormalFormPlan { owner, choices }).collect())
            .collect();
        for (ids, _) in &doc.entries {
            if ids.len() != plans.len() || ids.iter().zip(&plans).any(|(&id, ps)| id as usize >= ps.len()) {
                return Err(Error::Schema("joint entry refers to an unknown plan".into()));
            }
        }
        Ok(JointDistribution {
            plans,
            weights: doc.entries.into_iter().map(|(k, w)| (k.into_boxed_slice(), w)).collect(),
            norm: doc.norm,
        })
    }
}

impl JointDistribution {
    pub fn new(players: usize) -> Self {
        JointDistribution {
            plans: vec![IndexSet::new(); players],
            weights: IndexMap::new(),
            norm: 0.0,
        }
    }

    /// A distribution with the given (unnormalized) entries; duplicates merge.
    pub fn from_entries(
        players: usize,
        entries: impl IntoIterator<Item = (Vec<NormalFormPlan>, f64)>,
    ) -> Result<Self> {
        let mut joint = JointDistribution::new(players);
        for (profile, w) in entries {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidStrategy(format!("joint weight {w} is not a finite nonnegative number")));
            }
            joint.check_profile(&profile)?;
            joint.add_mass(&profile, w);
            joint.norm += w;
        }
        Ok(joint)
    }

    fn check_profile(&self, profile: &[NormalFormPlan]) -> Result<()> {
        if profile.len() != self.plans.len() {
            return Err(Error::PlayerMismatch {
                expected: self.plans.len(),
                found: profile.len(),
            });
        }
        for (p, plan) in profile.iter().enumerate() {
            if plan.owner != p {
                return Err(Error::OwnerMismatch {
                    expected: p,
                    found: plan.owner,
                });
            }
        }
        Ok(())
    }

    fn intern(&mut self, plan: &NormalFormPlan) -> u32 {
        let set = &mut self.plans[plan.owner];
        match set.get_index_of(plan) {
            Some(id) => id as u32,
            None => set.insert_full(plan.clone()).0 as u32,
        }
    }

    fn add_ids(&mut self, ids: &[u32], w: f64) {
        match self.weights.get_mut(ids) {
            Some(x) => *x += w,
            None => {
                self.weights.insert(ids.into(), w);
            }
        }
    }

    fn add_mass(&mut self, profile: &[NormalFormPlan], w: f64) {
        let ids: Vec<u32> = profile.iter().map(|p| self.intern(p)).collect();
        self.add_ids(&ids, w);
    }

    /// Counts one sampled profile as a round of mass 1.
    pub fn tally(&mut self, profile: &[NormalFormPlan]) -> Result<()> {
        self.check_profile(profile)?;
        self.add_mass(profile, 1.0);
        self.norm += 1.0;
        Ok(())
    }

    pub fn num_players(&self) -> usize {
        self.plans.len()
    }

    /// Number of distinct profiles with mass.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Number of accumulation rounds (or total entry weight for
    /// [`JointDistribution::from_entries`]).
    pub fn normalizer(&self) -> f64 {
        self.norm
    }

    pub fn total_weight(&self) -> f64 {
        self.iter().map(|(_, w)| w).sum()
    }

    pub fn plans(&self, player: Player) -> &IndexSet<NormalFormPlan> {
        &self.plans[player]
    }

    pub fn plan(&self, player: Player, id: u32) -> &NormalFormPlan {
        &self.plans[player][id as usize]
    }

    /// Profiles as per-player plan ids with normalized weights, in insertion
    /// order.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32], f64)> {
        let scale = if self.norm > 0.0 { 1.0 / self.norm } else { 0.0 };
        self.weights.iter().map(move |(k, &w)| (&k[..], w * scale))
    }

    /// Normalized weight of a profile.
    pub fn weight(&self, profile: &[NormalFormPlan]) -> f64 {
        let ids: Option<Vec<u32>> = profile
            .iter()
            .enumerate()
            .map(|(p, plan)| self.plans.get(p)?.get_index_of(plan).map(|i| i as u32))
            .collect();
        match ids.and_then(|ids| self.weights.get(&ids[..]).copied()) {
            Some(w) if self.norm > 0.0 => w / self.norm,
            _ => 0.0,
        }
    }
}

/// Adds the product distribution `⊗_i x_i` as one round of mass 1.
pub fn joint_accumulate(acc: &mut JointDistribution, xs: &[NormalFormStrategy]) -> Result<()> {
    if xs.len() != acc.num_players() {
        return Err(Error::PlayerMismatch {
            expected: acc.num_players(),
            found: xs.len(),
        });
    }
    let mut supports: Vec<Vec<(u32, f64)>> = Vec::with_capacity(xs.len());
    for (p, x) in xs.iter().enumerate() {
        if x.owner() != p {
            return Err(Error::OwnerMismatch {
                expected: p,
                found: x.owner(),
            });
        }
        supports.push(x.iter().map(|(plan, w)| (acc.intern(plan), w)).collect());
    }
    if supports.iter().any(Vec::is_empty) {
        return Err(Error::InvalidStrategy("empty normal-form strategy".into()));
    }
    // odometer over the per-player supports
    let mut digits = vec![0usize; supports.len()];
    let mut ids = vec![0u32; supports.len()];
    'outer: loop {
        let mut w = 1.0;
        for (p, &d) in digits.iter().enumerate() {
            ids[p] = supports[p][d].0;
            w *= supports[p][d].1;
        }
        acc.add_ids(&ids, w);
        for p in (0..digits.len()).rev() {
            digits[p] += 1;
            if digits[p] < supports[p].len() {
                continue 'outer;
            }
            digits[p] = 0;
        }
        break;
    }
    acc.norm += 1.0;
    Ok(())
}
