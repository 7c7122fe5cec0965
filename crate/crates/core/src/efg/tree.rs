use std::collections::HashMap;

use crate::efg::validate::{validate, Diagnostic};
use crate::{Error, Result};

pub type NodeId = usize;
pub type InfosetId = usize;
pub type Player = usize;

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Chance { probs: Vec<f64> },
    Decision { player: Player, infoset: InfosetId },
    Terminal { index: usize, payoffs: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub parent: Option<NodeId>,
    /// Index of the edge leading here within the parent's action list.
    pub action: Option<usize>,
    pub actions: Vec<String>,
    pub children: Vec<NodeId>,
    pub kind: NodeKind,
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, NodeKind::Terminal { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Infoset {
    pub player: Player,
    pub label: String,
    pub actions: Vec<String>,
    pub nodes: Vec<NodeId>,
    /// Position among the owner's infosets.
    pub local: usize,
}

/// Recursive description of a game used by the constructors. Infosets are
/// named by `(player, key)`; nodes sharing a key form one infoset.
#[derive(Clone, Debug)]
pub enum Draft {
    Terminal(Vec<f64>),
    Chance(Vec<(String, f64, Draft)>),
    Decision {
        player: Player,
        infoset: String,
        actions: Vec<(String, Draft)>,
    },
}

/// Per-player projection of the tree onto the player's own sequences.
///
/// Sequence `0` is the empty sequence; sequence `seq_start[I] + a` is the
/// pair (infoset `I`, action `a`) where `I` is a local infoset index. Local
/// infosets are numbered in depth-first discovery order, so every infoset
/// comes after the infoset owning its parent sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayerView {
    pub player: Player,
    pub infosets: Vec<InfosetId>,
    pub parent_seq: Vec<usize>,
    pub seq_start: Vec<usize>,
    pub num_actions: Vec<usize>,
    /// `(local infoset, action)` per sequence; entry 0 is unused.
    pub seq_owner: Vec<(usize, usize)>,
    pub seq_children: Vec<Vec<usize>>,
    pub seq_terminals: Vec<Vec<usize>>,
    pub terminal_seq: Vec<usize>,
}

impl PlayerView {
    pub fn num_infosets(&self) -> usize {
        self.infosets.len()
    }

    pub fn num_sequences(&self) -> usize {
        self.seq_owner.len()
    }

    pub fn seq(&self, local: usize, action: usize) -> usize {
        self.seq_start[local] + action
    }

    /// Realization weight of every sequence under per-infoset distributions.
    pub fn sequence_realization(&self, probs: &[Vec<f64>]) -> Vec<f64> {
        let mut r = vec![0.0; self.num_sequences()];
        r[0] = 1.0;
        for local in 0..self.num_infosets() {
            let base = r[self.parent_seq[local]];
            for (a, p) in probs[local].iter().enumerate() {
                r[self.seq_start[local] + a] = base * p;
            }
        }
        r
    }

    /// Sequences permitted by a (reduced or full) choice vector.
    pub fn sequence_inclusion(&self, choices: &[Option<u32>]) -> Vec<bool> {
        let mut inc = vec![false; self.num_sequences()];
        inc[0] = true;
        for local in 0..self.num_infosets() {
            if inc[self.parent_seq[local]] {
                if let Some(a) = choices[local] {
                    inc[self.seq_start[local] + a as usize] = true;
                }
            }
        }
        inc
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameTree {
    num_players: usize,
    nodes: Vec<Node>,
    infosets: Vec<Infoset>,
    player_infosets: Vec<Vec<InfosetId>>,
    terminals: Vec<NodeId>,
    chance_reach: Vec<f64>,
    views: Vec<PlayerView>,
}

impl GameTree {
    /// Builds and validates a tree; fails with the full diagnostic list.
    pub fn from_draft(num_players: usize, root: Draft) -> Result<Self> {
        let mut tree = Self::from_draft_unchecked(num_players, root);
        tree.finish()?;
        Ok(tree)
    }

    /// Builds a tree without validation. Only [`validate`] and the plain
    /// accessors are meaningful on the result until [`GameTree::finish`]
    /// succeeds.
    pub fn from_draft_unchecked(num_players: usize, root: Draft) -> Self {
        let mut b = Flattener {
            nodes: Vec::new(),
            infosets: Vec::new(),
            keys: HashMap::new(),
            player_infosets: vec![Vec::new(); num_players],
        };
        b.push(root, None, None);
        Self::from_parts(num_players, b.nodes, b.infosets)
    }

    /// Assembles a tree from flat parts whose nodes are in preorder.
    /// Infosets are renumbered in order of their first node, and terminal
    /// and infoset `local` indices are recomputed.
    pub(crate) fn from_parts(
        num_players: usize,
        mut nodes: Vec<Node>,
        infosets: Vec<Infoset>,
    ) -> Self {
        let mut order: Vec<usize> = (0..infosets.len()).collect();
        order.sort_by_key(|&i| infosets[i].nodes.iter().min().copied().unwrap_or(usize::MAX));
        let mut renumber = vec![0; infosets.len()];
        for (new, &old) in order.iter().enumerate() {
            renumber[old] = new;
        }
        let mut slots: Vec<Option<Infoset>> = infosets.into_iter().map(Some).collect();
        let mut infosets: Vec<Infoset> = order.iter().map(|&i| slots[i].take().unwrap()).collect();
        for node in nodes.iter_mut() {
            if let NodeKind::Decision { infoset, .. } = &mut node.kind {
                if let Some(&n) = renumber.get(*infoset) {
                    *infoset = n;
                }
            }
        }
        let mut player_infosets = vec![Vec::new(); num_players];
        for (id, info) in infosets.iter_mut().enumerate() {
            if info.player < num_players {
                info.local = player_infosets[info.player].len();
                player_infosets[info.player].push(id);
            }
        }
        let mut terminals = Vec::new();
        for id in 0..nodes.len() {
            if let NodeKind::Terminal { index, .. } = &mut nodes[id].kind {
                *index = terminals.len();
                terminals.push(id);
            }
        }
        let mut chance_reach = Vec::with_capacity(terminals.len());
        for &t in &terminals {
            let mut p = 1.0;
            let mut cur = t;
            while let Some(parent) = nodes[cur].parent {
                if let NodeKind::Chance { probs } = &nodes[parent].kind {
                    p *= nodes[cur].action.and_then(|a| probs.get(a)).copied().unwrap_or(0.0);
                }
                cur = parent;
            }
            chance_reach.push(p);
        }
        GameTree {
            num_players,
            nodes,
            infosets,
            player_infosets,
            terminals,
            chance_reach,
            views: Vec::new(),
        }
    }

    /// Validates the tree and prepares the per-player sequence views.
    pub fn finish(&mut self) -> Result<()> {
        let diags = validate(self);
        if !diags.is_empty() {
            return Err(Error::InvalidTree(diags));
        }
        self.views = (0..self.num_players).map(|p| self.build_view(p)).collect();
        Ok(())
    }

    pub fn is_ready(&self) -> bool {
        self.views.len() == self.num_players
    }

    fn build_view(&self, player: Player) -> PlayerView {
        let infosets = self.player_infosets[player].clone();
        let num_actions: Vec<usize> = infosets
            .iter()
            .map(|&i| self.infosets[i].actions.len())
            .collect();
        let mut seq_start = Vec::with_capacity(infosets.len());
        let mut seq_owner = vec![(usize::MAX, usize::MAX)];
        for (local, &n) in num_actions.iter().enumerate() {
            seq_start.push(seq_owner.len());
            seq_owner.extend((0..n).map(|a| (local, a)));
        }
        let num_seqs = seq_owner.len();
        let mut parent_seq = vec![usize::MAX; infosets.len()];
        let mut seq_children = vec![Vec::new(); num_seqs];
        let mut seq_terminals = vec![Vec::new(); num_seqs];
        let mut terminal_seq = vec![0; self.terminals.len()];

        // Preorder: parents are visited before children.
        let mut last = vec![0usize; self.nodes.len()];
        for id in 0..self.nodes.len() {
            let node = &self.nodes[id];
            let mine = match node.parent {
                None => 0,
                Some(p) => match &self.nodes[p].kind {
                    NodeKind::Decision { player: q, infoset } if *q == player => {
                        seq_start[self.infosets[*infoset].local] + node.action.unwrap()
                    }
                    _ => last[p],
                },
            };
            last[id] = mine;
            match &node.kind {
                NodeKind::Decision { player: q, infoset } if *q == player => {
                    let local = self.infosets[*infoset].local;
                    if parent_seq[local] == usize::MAX {
                        parent_seq[local] = mine;
                        seq_children[mine].push(local);
                    }
                }
                NodeKind::Terminal { index, .. } => {
                    terminal_seq[*index] = mine;
                    seq_terminals[mine].push(*index);
                }
                _ => {}
            }
        }
        PlayerView {
            player,
            infosets,
            parent_seq,
            seq_start,
            num_actions,
            seq_owner,
            seq_children,
            seq_terminals,
            terminal_seq,
        }
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id]
    }

    pub fn player_infosets(&self, player: Player) -> &[InfosetId] {
        &self.player_infosets[player]
    }

    pub fn num_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn terminal_node(&self, z: usize) -> NodeId {
        self.terminals[z]
    }

    pub fn payoffs(&self, z: usize) -> &[f64] {
        match &self.nodes[self.terminals[z]].kind {
            NodeKind::Terminal { payoffs, .. } => payoffs,
            _ => unreachable!("terminal list holds a non-terminal"),
        }
    }

    pub fn payoff(&self, z: usize, player: Player) -> f64 {
        self.payoffs(z)[player]
    }

    /// Product of chance probabilities on the path to terminal `z`.
    pub fn chance_reach(&self, z: usize) -> f64 {
        self.chance_reach[z]
    }

    pub fn chance_reaches(&self) -> &[f64] {
        &self.chance_reach
    }

    /// Sequence view of `player`. Panics on trees that were never validated.
    pub fn view(&self, player: Player) -> &PlayerView {
        assert!(self.is_ready(), "game tree was not validated");
        &self.views[player]
    }

    /// Ordered action labels from the root to `node`; the node's identity.
    pub fn history(&self, node: NodeId) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            out.push(self.nodes[p].actions[self.nodes[cur].action.unwrap()].as_str());
            cur = p;
        }
        out.reverse();
        out
    }

    /// Follows action labels from the root; `None` if some label is missing.
    pub fn find(&self, history: &[&str]) -> Option<NodeId> {
        let mut cur = self.root();
        for label in history {
            let node = &self.nodes[cur];
            let idx = node.actions.iter().position(|a| a == label)?;
            cur = node.children[idx];
        }
        Some(cur)
    }

    /// Terminal index reached by following `history`, if it ends on a leaf.
    pub fn find_terminal(&self, history: &[&str]) -> Option<usize> {
        match &self.nodes[self.find(history)?].kind {
            NodeKind::Terminal { index, .. } => Some(*index),
            _ => None,
        }
    }

    /// Infoset id by owner and label.
    pub fn find_infoset(&self, player: Player, label: &str) -> Option<InfosetId> {
        self.player_infosets
            .get(player)?
            .iter()
            .copied()
            .find(|&i| self.infosets[i].label == label)
    }
}

struct Flattener {
    nodes: Vec<Node>,
    infosets: Vec<Infoset>,
    keys: HashMap<(Player, String), InfosetId>,
    player_infosets: Vec<Vec<InfosetId>>,
}

impl Flattener {
    fn push(&mut self, draft: Draft, parent: Option<NodeId>, action: Option<usize>) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent,
            action,
            actions: Vec::new(),
            children: Vec::new(),
            kind: NodeKind::Terminal {
                index: 0,
                payoffs: Vec::new(),
            },
        });
        match draft {
            Draft::Terminal(payoffs) => {
                self.nodes[id].kind = NodeKind::Terminal { index: 0, payoffs };
            }
            Draft::Chance(outcomes) => {
                let mut probs = Vec::with_capacity(outcomes.len());
                let mut labels = Vec::with_capacity(outcomes.len());
                let mut subs = Vec::with_capacity(outcomes.len());
                for (label, p, sub) in outcomes {
                    labels.push(label);
                    probs.push(p);
                    subs.push(sub);
                }
                self.nodes[id].actions = labels;
                self.nodes[id].kind = NodeKind::Chance { probs };
                for (a, sub) in subs.into_iter().enumerate() {
                    let child = self.push(sub, Some(id), Some(a));
                    self.nodes[id].children.push(child);
                }
            }
            Draft::Decision {
                player,
                infoset,
                actions,
            } => {
                let (labels, subs): (Vec<String>, Vec<Draft>) = actions.into_iter().unzip();
                let info = match self.keys.get(&(player, infoset.clone())) {
                    Some(&i) => i,
                    None => {
                        let i = self.infosets.len();
                        let local = self.player_infosets.get(player).map_or(0, Vec::len);
                        if let Some(list) = self.player_infosets.get_mut(player) {
                            list.push(i);
                        }
                        self.infosets.push(Infoset {
                            player,
                            label: infoset.clone(),
                            actions: labels.clone(),
                            nodes: Vec::new(),
                            local,
                        });
                        self.keys.insert((player, infoset), i);
                        i
                    }
                };
                self.infosets[info].nodes.push(id);
                self.nodes[id].actions = labels;
                self.nodes[id].kind = NodeKind::Decision {
                    player,
                    infoset: info,
                };
                for (a, sub) in subs.into_iter().enumerate() {
                    let child = self.push(sub, Some(id), Some(a));
                    self.nodes[id].children.push(child);
                }
            }
        }
        id
    }
}

/// Convenience for diagnostics that want the tree regardless of validity.
pub fn diagnose(num_players: usize, root: Draft) -> Vec<Diagnostic> {
    validate(&GameTree::from_draft_unchecked(num_players, root))
}
