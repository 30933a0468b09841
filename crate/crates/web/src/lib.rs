//! Browser bindings for the cascade-affect simulator.
//!
//! Exposes three calls to the static page in `www/`: generate a puzzle,
//! solve it by closure, and simulate one agent episode. Everything crosses
//! the boundary as JSON strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use cascade_affect::agent::{run_episode, EpisodeConfig, TraceEvent};
use cascade_affect::cascade::{generate_puzzle, GridStatus, Puzzle};
use cascade_affect::plans::{closure, Repertoire, RuleSet};
use cascade_affect::rng::SplitMix64;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Puzzle JSON (`{"rows":..,"cells":..,"vmax":..,"requires_subtraction":..}`).
#[wasm_bindgen]
pub fn generate(rows: usize, vmax: i32, require_subtraction: bool, seed: u64) -> Result<String, JsError> {
    let mut rng = SplitMix64::new(seed);
    let puzzle = generate_puzzle(rows, i64::from(vmax), require_subtraction, &mut rng).map_err(js_err)?;
    Ok(puzzle.to_json())
}

#[derive(Serialize)]
struct SolveReply {
    solved: bool,
    cells: Vec<Vec<Option<i64>>>,
    /// Whether addition alone would have completed the grid.
    addition_suffices: bool,
}

/// Closure completion of a puzzle; `solved` is false when inference stalls.
#[wasm_bindgen]
pub fn solve(puzzle_json: &str) -> Result<String, JsError> {
    let puzzle = Puzzle::from_json(puzzle_json).map_err(js_err)?;
    let done = closure(&puzzle.grid, RuleSet::FULL);
    let reply = SolveReply {
        solved: done.status() == GridStatus::Solved,
        cells: done.values(),
        addition_suffices: closure(&puzzle.grid, RuleSet::ADD_ONLY).status() == GridStatus::Solved,
    };
    serde_json::to_string(&reply).map_err(js_err)
}

#[derive(Serialize)]
struct EpisodeReply {
    outcome: &'static str,
    steps: u32,
    plan_changes: u32,
    fills: u32,
    corrections: u32,
    slips: u32,
    final_cells: Vec<Vec<Option<i64>>>,
    trace: Vec<TraceEvent>,
}

/// Runs one episode. `repertoire` is a comma-separated list of plan names.
#[wasm_bindgen]
pub fn simulate(
    puzzle_json: &str,
    repertoire: &str,
    p_slip: f64,
    theta_abandon: f64,
    max_changes: u32,
    seed: u64,
) -> Result<String, JsError> {
    let puzzle = Puzzle::from_json(puzzle_json).map_err(js_err)?;
    let names: Vec<&str> = repertoire.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let mut cfg = EpisodeConfig::new(puzzle);
    cfg.repertoire = Repertoire::from_names(&names, true).map_err(js_err)?;
    cfg.p_slip = p_slip;
    cfg.coping_params.theta_abandon = theta_abandon;
    cfg.max_changes = max_changes;

    let (result, trace) = run_episode(&cfg, seed).map_err(js_err)?;
    let reply = EpisodeReply {
        outcome: result.outcome.as_str(),
        steps: result.steps,
        plan_changes: result.plan_changes,
        fills: result.fills,
        corrections: result.corrections,
        slips: result.slips,
        final_cells: result.final_grid.values(),
        trace,
    };
    serde_json::to_string(&reply).map_err(js_err)
}
