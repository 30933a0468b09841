//! Appraisal-coping agent for the Cascades sum-pyramid puzzle.
//!
//! The agent reads the task through a plan (a subset of local inference
//! rules), appraises the grid against it, updates its valence and
//! frustration, and picks a coping action: fill a cell, erase a wrong one,
//! switch plan, give up, or stop when solved. Episodes are deterministic
//! given a seed and produce a per-step trace.
//!
//! ```
//! use cascade_affect::{agent::{run_episode, EpisodeConfig, Outcome}, cascade::Puzzle};
//!
//! let puzzle = Puzzle::from_json(r#"{"rows":3,"cells":[[1,null,3],[null,5],[null]]}"#).unwrap();
//! let (result, trace) = run_episode(&EpisodeConfig::new(puzzle), 0).unwrap();
//! assert_eq!(result.outcome, Outcome::Solved);
//! assert_eq!(trace[0].action, "change_plan");
//! ```

pub mod agent;
pub mod appraisal;
pub mod cascade;
pub mod coping;
pub mod emotion;
pub mod plans;
pub mod rng;
#[cfg(feature = "cli")]
pub mod simcli;

pub use agent::{run_episode, EpisodeConfig, EpisodeResult, Outcome, TraceEvent};
pub use cascade::{CellPos, Grid, GridStatus, Puzzle};
pub use plans::{Plan, Repertoire, Rule, RuleSet};
pub use rng::SplitMix64;
