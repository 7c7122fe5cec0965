use std::path::PathBuf;

use crate::efg::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid game tree: {}", format_diagnostics(.0))]
    InvalidTree(Vec<Diagnostic>),

    #[error("strategy is for player {found} but player {expected} was expected")]
    OwnerMismatch { expected: usize, found: usize },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("plan enumeration for player {player} exceeds the cap of {cap} plans")]
    PlanCapExceeded { player: usize, cap: usize },

    #[error("empty action set")]
    EmptyActions,

    #[error("realization weights are all zero")]
    ZeroRealization,

    #[error("invalid game parameters: {0}")]
    InvalidParams(String),

    #[error("cannot parse game spec `{spec}`: {reason}")]
    GameSpec { spec: String, reason: String },

    #[error("player set mismatch: expected {expected} players, found {found}")]
    PlayerMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
