//! Versioned JSON encoding of game trees.
//!
//! The document layout is fixed by `schema/game.schema.json`:
//!
//! ```text
//! { "format": "cce-efg", "version": 1, "num_players": 2,
//!   "nodes": [ { "parent": null, "action": null, "kind": "chance",
//!                "player": null, "infoset": null, "actions": ["a", "b"],
//!                "chance_probs": [0.5, 0.5], "payoffs": null }, ... ],
//!   "infosets": [ { "player": 0, "label": "...", "actions": [...],
//!                   "nodes": [3, 7] }, ... ] }
//! ```
//!
//! Nodes are listed in preorder; `action` is the index of the incoming edge
//! within the parent's `actions`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::efg::tree::{GameTree, Infoset, Node, NodeKind};
use crate::{Error, Result};

pub const FORMAT: &str = "cce-efg";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameDoc {
    pub format: String,
    pub version: u32,
    pub num_players: usize,
    pub nodes: Vec<NodeDoc>,
    pub infosets: Vec<InfosetDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKindDoc {
    Chance,
    Decision,
    Terminal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub parent: Option<usize>,
    pub action: Option<usize>,
    pub kind: NodeKindDoc,
    pub player: Option<usize>,
    pub infoset: Option<usize>,
    pub actions: Vec<String>,
    pub chance_probs: Option<Vec<f64>>,
    pub payoffs: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfosetDoc {
    pub player: usize,
    pub label: String,
    pub actions: Vec<String>,
    pub nodes: Vec<usize>,
}

impl GameDoc {
    pub fn from_tree(tree: &GameTree) -> Self {
        let nodes = tree
            .nodes()
            .iter()
            .map(|n| {
                let (kind, player, infoset, chance_probs, payoffs) = match &n.kind {
                    NodeKind::Chance { probs } => (NodeKindDoc::Chance, None, None, Some(probs.clone()), None),
                    NodeKind::Decision { player, infoset } => {
                        (NodeKindDoc::Decision, Some(*player), Some(*infoset), None, None)
                    }
                    NodeKind::Terminal { payoffs, .. } => {
                        (NodeKindDoc::Terminal, None, None, None, Some(payoffs.clone()))
                    }
                };
                NodeDoc {
                    parent: n.parent,
                    action: n.action,
                    kind,
                    player,
                    infoset,
                    actions: n.actions.clone(),
                    chance_probs,
                    payoffs,
                }
            })
            .collect();
        let infosets = tree
            .infosets()
            .iter()
            .map(|i| InfosetDoc {
                player: i.player,
                label: i.label.clone(),
                actions: i.actions.clone(),
                nodes: i.nodes.clone(),
            })
            .collect();
        GameDoc {
            format: FORMAT.to_string(),
            version: VERSION,
            num_players: tree.num_players(),
            nodes,
            infosets,
        }
    }

    pub fn into_tree(self) -> Result<GameTree> {
        if self.format != FORMAT {
            return Err(Error::Schema(format!("unknown format `{}`", self.format)));
        }
        if self.version != VERSION {
            return Err(Error::Schema(format!(
                "unsupported version {} (expected {VERSION})",
                self.version
            )));
        }
        let count = self.nodes.len();
        let mut nodes = Vec::with_capacity(count);
        for (id, doc) in self.nodes.into_iter().enumerate() {
            let kind = match doc.kind {
                NodeKindDoc::Chance => NodeKind::Chance {
                    probs: doc
                        .chance_probs
                        .ok_or_else(|| Error::Schema(format!("chance node {id} lacks chance_probs")))?,
                },
                NodeKindDoc::Decision => NodeKind::Decision {
                    player: doc
                        .player
                        .ok_or_else(|| Error::Schema(format!("decision node {id} lacks player")))?,
                    infoset: doc
                        .infoset
                        .ok_or_else(|| Error::Schema(format!("decision node {id} lacks infoset")))?,
                },
                NodeKindDoc::Terminal => NodeKind::Terminal {
                    index: 0,
                    payoffs: doc
                        .payoffs
                        .ok_or_else(|| Error::Schema(format!("terminal node {id} lacks payoffs")))?,
                },
            };
            nodes.push(Node {
                parent: doc.parent,
                action: doc.action,
                actions: doc.actions,
                children: Vec::new(),
                kind,
            });
        }
        for id in 0..count {
            let (Some(p), Some(a)) = (nodes[id].parent, nodes[id].action) else {
                continue;
            };
            if p >= count {
                return Err(Error::Schema(format!("node {id} has out-of-range parent {p}")));
            }
            let width = nodes[p].actions.len();
            if a >= width {
                return Err(Error::Schema(format!("node {id} has out-of-range action {a}")));
            }
            let children = &mut nodes[p].children;
            if children.len() < width {
                children.resize(width, usize::MAX);
            }
            children[a] = id;
        }
        if nodes.iter().any(|n| n.children.contains(&usize::MAX)) {
            return Err(Error::Schema("some action has no child node".into()));
        }
        let infosets = self
            .infosets
            .into_iter()
            .map(|i| Infoset {
                player: i.player,
                label: i.label,
                actions: i.actions,
                nodes: i.nodes,
                local: 0,
            })
            .collect();
        let mut tree = GameTree::from_parts(self.num_players, nodes, infosets);
        tree.finish()?;
        Ok(tree)
    }
}

pub fn to_json(tree: &GameTree) -> String {
    serde_json::to_string_pretty(&GameDoc::from_tree(tree)).expect("game documents always serialize")
}

pub fn from_json(text: &str) -> Result<GameTree> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(VERSION) => {}
        Some(v) => return Err(Error::Schema(format!("unsupported version {v} (expected {VERSION})"))),
        None => return Err(Error::Schema("missing version".into())),
    }
    let doc: GameDoc = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
    doc.into_tree()
}

pub fn save(tree: &GameTree, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(tree)).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<GameTree> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}
