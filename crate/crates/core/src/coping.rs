//! Coping: turn an appraisal plus the current emotion into a decision.

use thiserror::Error;

use crate::appraisal::{Appraisal, AppraisalKind};
use crate::cascade::CellPos;
use crate::emotion::EmotionState;
use crate::plans::{Move, Plan, Repertoire};

pub const DEFAULT_MAX_CHANGES: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CopingAction {
    FillCell(Move),
    CorrectCell(CellPos),
    ChangePlan(usize),
    Abandon,
    StopSuccess,
}

impl CopingAction {
    pub fn as_str(&self) -> &'static str {
        match self {
            CopingAction::FillCell(_) => "fill",
            CopingAction::CorrectCell(_) => "correct",
            CopingAction::ChangePlan(_) => "change_plan",
            CopingAction::Abandon => "abandon",
            CopingAction::StopSuccess => "stop_success",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanContext {
    pub repertoire: Repertoire,
    pub current_index: usize,
    pub changes_used: u32,
    pub max_changes: u32,
}

impl PlanContext {
    pub fn new(repertoire: Repertoire, max_changes: u32) -> Self {
        Self { repertoire, current_index: 0, changes_used: 0, max_changes }
    }

    pub fn active_plan(&self) -> &Plan {
        self.repertoire.plan(self.current_index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopingParams {
    /// Frustration at or above which the agent gives up, in (0, 1].
    pub theta_abandon: f64,
}

impl Default for CopingParams {
    fn default() -> Self {
        Self { theta_abandon: 1.0 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CopingError {
    /// The violated triples contain only Given cells.
    #[error("puzzle is unsatisfiable: constraint(s) at {0:?} are violated by given cells alone")]
    Unsatisfiable(Vec<CellPos>),
}

/// The three positions of the triple whose child is `child`.
fn triple_members(child: CellPos) -> [CellPos; 3] {
    debug_assert!(child.row >= 1);
    [child, CellPos::new(child.row - 1, child.col), CellPos::new(child.row - 1, child.col + 1)]
}

/// Policy, first match wins: solved, frustration threshold, fill, correct
/// the latest culprit, change plan at an impasse, otherwise give up.
pub fn decide(
    appraisal: &Appraisal,
    emotion: &EmotionState,
    ctx: &PlanContext,
    params: &CopingParams,
    fill_history: &[(CellPos, u64)],
) -> Result<CopingAction, CopingError> {
    if appraisal.kind == AppraisalKind::Solved {
        return Ok(CopingAction::StopSuccess);
    }
    if emotion.frustration >= params.theta_abandon {
        return Ok(CopingAction::Abandon);
    }
    match &appraisal.kind {
        AppraisalKind::Solved => unreachable!(),
        AppraisalKind::Progress(m) => Ok(CopingAction::FillCell(*m)),
        AppraisalKind::Error(children) => {
            let culprits: Vec<CellPos> = children.iter().flat_map(|c| triple_members(*c)).collect();
            fill_history
                .iter()
                .filter(|(pos, _)| culprits.contains(pos))
                .max_by_key(|(_, seq)| *seq)
                .map(|(pos, _)| CopingAction::CorrectCell(*pos))
                .ok_or_else(|| CopingError::Unsatisfiable(children.clone()))
        }
        AppraisalKind::Impasse => {
            let next = (ctx.changes_used < ctx.max_changes)
                .then(|| ctx.repertoire.next_plan(ctx.current_index))
                .flatten();
            Ok(next.map_or(CopingAction::Abandon, CopingAction::ChangePlan))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::Grid;
    use crate::plans::{builtin_plan, Rule};

    fn appraisal_of(kind: AppraisalKind) -> Appraisal {
        let relevance = kind != AppraisalKind::Solved;
        let congruence = matches!(kind, AppraisalKind::Solved | AppraisalKind::Progress(_));
        Appraisal { kind, relevance, congruence }
    }

    fn ctx() -> PlanContext {
        PlanContext::new(Repertoire::default(), DEFAULT_MAX_CHANGES)
    }

    fn sample_move() -> Move {
        Move { target: CellPos::new(0, 1), value: 5, rule: Rule::R3, child: CellPos::new(1, 0) }
    }

    #[test]
    fn solved_stops() {
        let e = EmotionState::new(0.0, 1.0);
        let a = appraisal_of(AppraisalKind::Solved);
        assert_eq!(decide(&a, &e, &ctx(), &CopingParams::default(), &[]), Ok(CopingAction::StopSuccess));
    }

    #[test]
    fn progress_fills() {
        let a = appraisal_of(AppraisalKind::Progress(sample_move()));
        let e = EmotionState::new(0.0, 0.4);
        assert_eq!(decide(&a, &e, &ctx(), &CopingParams::default(), &[]), Ok(CopingAction::FillCell(sample_move())));
    }

    #[test]
    fn impasse_changes_plan_then_abandons() {
        let a = appraisal_of(AppraisalKind::Impasse);
        let p = CopingParams::default();
        assert_eq!(decide(&a, &EmotionState::new(-0.4, 0.55), &ctx(), &p, &[]), Ok(CopingAction::ChangePlan(1)));
        assert_eq!(decide(&a, &EmotionState::new(-0.4, 1.0), &ctx(), &p, &[]), Ok(CopingAction::Abandon));

        let exhausted = PlanContext { changes_used: 3, ..ctx() };
        assert_eq!(decide(&a, &EmotionState::default(), &exhausted, &p, &[]), Ok(CopingAction::Abandon));

        let single = PlanContext::new(Repertoire::from_names(&["add_only"], true).unwrap(), 3);
        assert_eq!(decide(&a, &EmotionState::default(), &single, &p, &[]), Ok(CopingAction::Abandon));
    }

    #[test]
    fn correction_targets_latest_culprit() {
        // [[1,2],[4]] where (0,1) was the last agent write.
        let a = appraisal_of(AppraisalKind::Error(vec![CellPos::new(1, 0)]));
        let history = [(CellPos::new(0, 1), 7)];
        assert_eq!(
            decide(&a, &EmotionState::default(), &ctx(), &CopingParams::default(), &history),
            Ok(CopingAction::CorrectCell(CellPos::new(0, 1)))
        );

        // Non-culprit fills are ignored even when newer.
        let history = [(CellPos::new(1, 0), 2), (CellPos::new(0, 1), 3), (CellPos::new(2, 0), 9)];
        let a = appraisal_of(AppraisalKind::Error(vec![CellPos::new(1, 0)]));
        assert_eq!(
            decide(&a, &EmotionState::default(), &ctx(), &CopingParams::default(), &history),
            Ok(CopingAction::CorrectCell(CellPos::new(0, 1)))
        );
    }

    #[test]
    fn given_only_contradiction_is_an_error() {
        let g = Grid::from_values(&[vec![Some(1), Some(2)], vec![Some(4)]]).unwrap();
        let a = crate::appraisal::appraise(&g, &builtin_plan("full").unwrap());
        assert_eq!(
            decide(&a, &EmotionState::default(), &ctx(), &CopingParams::default(), &[]),
            Err(CopingError::Unsatisfiable(vec![CellPos::new(1, 0)]))
        );
    }

    #[test]
    fn abandonment_threshold_is_monotone() {
        let p = CopingParams { theta_abandon: 0.6 };
        let kinds = [
            AppraisalKind::Progress(sample_move()),
            AppraisalKind::Impasse,
            AppraisalKind::Error(vec![CellPos::new(1, 0)]),
        ];
        let history = [(CellPos::new(0, 1), 0)];
        for kind in kinds {
            let a = appraisal_of(kind);
            for f in [0.6, 0.7, 0.9, 1.0] {
                let e = EmotionState::new(0.0, f);
                assert_eq!(decide(&a, &e, &ctx(), &p, &history), Ok(CopingAction::Abandon));
            }
            // Below threshold, problem-focused appraisals never abandon.
            let e = EmotionState::new(0.0, 0.59);
            let action = decide(&a, &e, &ctx(), &p, &history).unwrap();
            if !matches!(a.kind, AppraisalKind::Impasse) {
                assert_ne!(action, CopingAction::Abandon);
            }
        }
    }
}
