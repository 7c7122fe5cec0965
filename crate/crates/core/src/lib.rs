//! Approximate coarse correlated equilibria (CCEs) of multi-player, general-sum
//! extensive-form games computed with no-regret learning.
//!
//! The crate is organised bottom-up:
//!
//! - [`efg`]: game trees with imperfect information and perfect recall,
//!   behavioral strategies, reduced normal-form plans and realization vectors.
//! - [`games`]: benchmark constructors (three-player Kuhn and Leduc poker,
//!   Goofspiel with four tie-breaking rules, an extensive-form Shapley game,
//!   matrix games) and a seeded random-game generator.
//! - [`regret`]: regret matching, vanilla CFR iterations and the sampled
//!   laminar-regret update used by CFR-S.
//! - [`joint`]: normal-form strategy reconstruction from behavioral
//!   strategies, sparse joint distributions and the CFR-Jr, CFR-Jr-k and CFR-S
//!   drivers.
//! - [`eval`]: exact ε-CCE gaps via best-response dynamic programs, payoff
//!   range, social welfare and brute-force enumeration oracles.
//! - [`experiment`]: configuration-driven runs, CSV/JSON traces and instance
//!   persistence.
//!
//! ```
//! use cce::games;
//! use cce::joint::run_cfr_jr;
//!
//! let game = games::shapley_efg();
//! let (joint, trace) = run_cfr_jr(&game, 200, 50);
//! assert_eq!(trace.len(), 4);
//! assert!((joint.total_weight() - 1.0).abs() < 1e-9);
//! ```

pub mod efg;
pub mod eval;
pub mod experiment;
pub mod games;
pub mod joint;
pub mod regret;

mod error;

pub use error::{Error, Result};
