//! Valence/frustration state and its per-event update.
//!
//! Valence follows a decay-plus-impulse recurrence clamped to `[-1, 1]`.
//! Frustration only accumulates (no decay, no reset) and is clamped to
//! `[0, 1]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EmotionState {
    pub valence: f64,
    pub frustration: f64,
}

impl EmotionState {
    pub fn new(valence: f64, frustration: f64) -> Self {
        Self { valence, frustration }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmotionEvent {
    ProgressMade,
    ErrorDetected,
    ImpasseHit,
    PlanChanged,
    TaskSolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmotionParams {
    /// Valence decay per update, in (0, 1].
    pub lambda: f64,
    pub delta_pos: f64,
    pub delta_err: f64,
    pub delta_imp: f64,
    pub delta_solve: f64,
    pub phi_err: f64,
    pub phi_imp: f64,
    pub phi_change: f64,
}

impl Default for EmotionParams {
    fn default() -> Self {
        Self {
            lambda: 0.9,
            delta_pos: 0.2,
            delta_err: 0.3,
            delta_imp: 0.4,
            delta_solve: 0.5,
            phi_err: 0.1,
            phi_imp: 0.25,
            phi_change: 0.3,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("emotion.{field} = {value} is out of range ({expected})")]
pub struct EmotionParamsError {
    pub field: &'static str,
    pub value: f64,
    pub expected: &'static str,
}

impl EmotionParams {
    pub fn validate(&self) -> Result<(), EmotionParamsError> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(EmotionParamsError { field: "lambda", value: self.lambda, expected: "0 < lambda <= 1" });
        }
        let magnitudes = [
            ("delta_pos", self.delta_pos),
            ("delta_err", self.delta_err),
            ("delta_imp", self.delta_imp),
            ("delta_solve", self.delta_solve),
            ("phi_err", self.phi_err),
            ("phi_imp", self.phi_imp),
            ("phi_change", self.phi_change),
        ];
        for (field, value) in magnitudes {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(EmotionParamsError { field, value, expected: ">= 0" });
            }
        }
        Ok(())
    }
}

pub fn update(state: EmotionState, event: EmotionEvent, params: &EmotionParams) -> EmotionState {
    let (impulse, pressure) = match event {
        EmotionEvent::ProgressMade => (params.delta_pos, 0.0),
        EmotionEvent::ErrorDetected => (-params.delta_err, params.phi_err),
        EmotionEvent::ImpasseHit => (-params.delta_imp, params.phi_imp),
        EmotionEvent::PlanChanged => (0.0, params.phi_change),
        EmotionEvent::TaskSolved => (params.delta_solve, 0.0),
    };
    EmotionState {
        valence: (params.lambda * state.valence + impulse).clamp(-1.0, 1.0),
        frustration: (state.frustration + pressure).clamp(0.0, 1.0),
    }
}
