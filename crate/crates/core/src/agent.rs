//! The appraise -> feel -> cope -> act loop, one grid action per step.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appraisal::{appraise, AppraisalKind};
use crate::cascade::{CellPos, Grid, GridStatus, Puzzle};
use crate::coping::{decide, CopingAction, CopingError, CopingParams, PlanContext, DEFAULT_MAX_CHANGES};
use crate::emotion::{update, EmotionEvent, EmotionParams, EmotionParamsError, EmotionState};
use crate::plans::{Move, Repertoire, Rule};
use crate::rng::SplitMix64;

pub const DEFAULT_STEP_CAP: u32 = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpisodeError {
    #[error(transparent)]
    Unsatisfiable(#[from] CopingError),
    #[error(transparent)]
    Emotion(#[from] EmotionParamsError),
    #[error("{field} = {value} is out of range ({expected})")]
    OutOfRange { field: &'static str, value: f64, expected: &'static str },
    #[error("episode already finished")]
    Finished,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub puzzle: Puzzle,
    pub repertoire: Repertoire,
    pub emotion_params: EmotionParams,
    pub coping_params: CopingParams,
    pub max_changes: u32,
    /// Probability that a fill is off by one.
    pub p_slip: f64,
    pub step_cap: u32,
}

impl EpisodeConfig {
    /// Default parameters, repertoire `[add_only, full]`, no slips.
    pub fn new(puzzle: Puzzle) -> Self {
        Self {
            puzzle,
            repertoire: Repertoire::default(),
            emotion_params: EmotionParams::default(),
            coping_params: CopingParams::default(),
            max_changes: DEFAULT_MAX_CHANGES,
            p_slip: 0.0,
            step_cap: DEFAULT_STEP_CAP,
        }
    }

    pub fn validate(&self) -> Result<(), EpisodeError> {
        self.emotion_params.validate()?;
        let theta = self.coping_params.theta_abandon;
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(EpisodeError::OutOfRange { field: "theta_abandon", value: theta, expected: "0 < theta <= 1" });
        }
        if !(0.0..=1.0).contains(&self.p_slip) {
            return Err(EpisodeError::OutOfRange { field: "p_slip", value: self.p_slip, expected: "0 <= p <= 1" });
        }
        if self.step_cap == 0 {
            return Err(EpisodeError::OutOfRange { field: "step_cap", value: 0.0, expected: ">= 1" });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    Abandoned,
    StepCapReached,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Solved => "solved",
            Outcome::Abandoned => "abandoned",
            Outcome::StepCapReached => "step_cap_reached",
        }
    }
}

/// Move as recorded in a trace. `value` is the number actually written,
/// which differs from the rule's result by one when the fill slipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceMove {
    pub row: usize,
    pub col: usize,
    pub value: i64,
    pub rule: Rule,
}

/// One line of the JSONL trace. Field order is part of the format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub t: u32,
    pub plan: String,
    pub appraisal: String,
    #[serde(rename = "move")]
    pub mv: Option<TraceMove>,
    pub action: String,
    pub valence: f64,
    pub frustration: f64,
    pub slipped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub grid: Grid,
    pub ctx: PlanContext,
    pub emotion: EmotionState,
    /// Agent-filled cells in fill order.
    pub fill_history: Vec<(CellPos, u64)>,
    pub next_seq: u64,
    pub step: u32,
    pub terminal: Option<Outcome>,
}

impl AgentState {
    pub fn new(config: &EpisodeConfig) -> Self {
        Self {
            grid: config.puzzle.grid.clone(),
            ctx: PlanContext::new(config.repertoire.clone(), config.max_changes),
            emotion: EmotionState::default(),
            fill_history: Vec::new(),
            next_seq: 0,
            step: 0,
            terminal: None,
        }
    }

    /// One loop iteration. Returns the trace record and, if the episode
    /// ended on this step, its outcome.
    pub fn step(
        &mut self,
        config: &EpisodeConfig,
        rng: &mut SplitMix64,
    ) -> Result<(TraceEvent, Option<Outcome>), EpisodeError> {
        if self.terminal.is_some() {
            return Err(EpisodeError::Finished);
        }
        let plan_name = self.ctx.active_plan().name().to_string();
        let appraisal = appraise(&self.grid, self.ctx.active_plan());

        let event = match appraisal.kind {
            AppraisalKind::Solved => EmotionEvent::TaskSolved,
            AppraisalKind::Progress(_) => EmotionEvent::ProgressMade,
            AppraisalKind::Error(_) => EmotionEvent::ErrorDetected,
            AppraisalKind::Impasse => EmotionEvent::ImpasseHit,
        };
        self.emotion = update(self.emotion, event, &config.emotion_params);

        let action = decide(&appraisal, &self.emotion, &self.ctx, &config.coping_params, &self.fill_history)?;

        let mut written = None;
        let mut slipped = false;
        let mut outcome = None;
        match action {
            CopingAction::FillCell(m) => {
                let offset = slip_offset(config.p_slip, rng);
                slipped = offset != 0;
                let value = m.value + offset;
                self.write(m, value);
                written = Some(TraceMove { row: m.target.row, col: m.target.col, value, rule: m.rule });
            }
            CopingAction::CorrectCell(pos) => {
                self.grid = self.grid.clear_cell(pos).expect("correction targets a filled cell");
                if let Some(i) = self.fill_history.iter().rposition(|(p, _)| *p == pos) {
                    self.fill_history.remove(i);
                }
            }
            CopingAction::ChangePlan(index) => {
                self.ctx.current_index = index;
                self.ctx.changes_used += 1;
                self.emotion = update(self.emotion, EmotionEvent::PlanChanged, &config.emotion_params);
            }
            CopingAction::Abandon => outcome = Some(Outcome::Abandoned),
            CopingAction::StopSuccess => outcome = Some(Outcome::Solved),
        }

        let record = TraceEvent {
            t: self.step,
            plan: plan_name,
            appraisal: appraisal.kind.as_str().to_string(),
            mv: written,
            action: action.as_str().to_string(),
            valence: self.emotion.valence,
            frustration: self.emotion.frustration,
            slipped,
        };
        self.step += 1;
        self.terminal = outcome;
        Ok((record, outcome))
    }

    fn write(&mut self, m: Move, value: i64) {
        let seq = self.next_seq;
        self.grid = self.grid.set_cell(m.target, value, seq).expect("moves target blank cells");
        self.fill_history.push((m.target, seq));
        self.next_seq += 1;
    }
}

/// 0 with probability `1 - p_slip`, otherwise -1 or +1 with equal odds.
/// The occurrence draw always happens; the sign draw only on a slip.
fn slip_offset(p_slip: f64, rng: &mut SplitMix64) -> i64 {
    if rng.next_f64() < p_slip {
        if rng.next_u64() >> 63 == 0 {
            -1
        } else {
            1
        }
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub outcome: Outcome,
    pub steps: u32,
    pub plan_changes: u32,
    pub fills: u32,
    pub corrections: u32,
    pub slips: u32,
    pub final_emotion: EmotionState,
    pub final_grid: Grid,
}

pub fn run_episode(config: &EpisodeConfig, seed: u64) -> Result<(EpisodeResult, Vec<TraceEvent>), EpisodeError> {
    config.validate()?;
    let mut rng = SplitMix64::new(seed);
    let mut state = AgentState::new(config);
    let mut trace = Vec::new();
    let (mut fills, mut corrections, mut slips) = (0, 0, 0);
    let mut outcome = Outcome::StepCapReached;

    while state.step < config.step_cap {
        let (event, terminal) = state.step(config, &mut rng)?;
        match event.action.as_str() {
            "fill" => fills += 1,
            "correct" => corrections += 1,
            _ => {}
        }
        slips += u32::from(event.slipped);
        trace.push(event);
        if let Some(o) = terminal {
            outcome = o;
            break;
        }
    }
    debug_assert!(outcome != Outcome::Solved || state.grid.status() == GridStatus::Solved);

    let result = EpisodeResult {
        outcome,
        steps: state.step,
        plan_changes: state.ctx.changes_used,
        fills,
        corrections,
        slips,
        final_emotion: state.emotion,
        final_grid: state.grid,
    };
    Ok((result, trace))
}

/// Rebuilds the grid an episode ends with from its trace alone: fills
/// write the recorded value, corrections erase the latest fill.
pub fn replay_trace(puzzle: &Puzzle, trace: &[TraceEvent]) -> Grid {
    let mut grid = puzzle.grid.clone();
    let mut stack: Vec<CellPos> = Vec::new();
    for (seq, ev) in trace.iter().enumerate() {
        match ev.action.as_str() {
            "fill" => {
                let m = ev.mv.expect("fill events carry a move");
                let pos = CellPos::new(m.row, m.col);
                grid = grid.set_cell(pos, m.value, seq as u64).expect("replayed fill targets a blank cell");
                stack.push(pos);
            }
            "correct" => {
                let pos = stack.pop().expect("correction follows a fill");
                grid = grid.clear_cell(pos).expect("replayed correction targets a filled cell");
            }
            _ => {}
        }
    }
    grid
}
