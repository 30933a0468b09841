//! Appraisal: evaluate the grid against the active plan.

use crate::cascade::{CellPos, Grid, GridStatus};
use crate::plans::{applicable_moves, Move, Plan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AppraisalKind {
    Solved,
    Progress(Move),
    /// Child positions of the violated triples.
    Error(Vec<CellPos>),
    Impasse,
}

impl AppraisalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AppraisalKind::Solved => "solved",
            AppraisalKind::Progress(_) => "progress",
            AppraisalKind::Error(_) => "error",
            AppraisalKind::Impasse => "impasse",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Appraisal {
    pub kind: AppraisalKind,
    /// The task still bears on the goal.
    pub relevance: bool,
    /// The situation is goal-congruent.
    pub congruence: bool,
}

impl Appraisal {
    fn new(kind: AppraisalKind) -> Self {
        let relevance = !matches!(kind, AppraisalKind::Solved);
        let congruence = matches!(kind, AppraisalKind::Solved | AppraisalKind::Progress(_));
        Self { kind, relevance, congruence }
    }
}

/// Errors first, then solved, then the plan's first move, else impasse.
pub fn appraise(grid: &Grid, plan: &Plan) -> Appraisal {
    let violated = grid.violated_constraints();
    let kind = if !violated.is_empty() {
        AppraisalKind::Error(violated)
    } else if grid.status() == GridStatus::Solved {
        AppraisalKind::Solved
    } else if let Some(m) = applicable_moves(grid, plan.rules()).into_iter().next() {
        AppraisalKind::Progress(m)
    } else {
        AppraisalKind::Impasse
    };
    Appraisal::new(kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plans::{builtin_plan, Rule};

    fn grid(rows: &[&[Option<i64>]]) -> Grid {
        Grid::from_values(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn solved_grid() {
        let g = Grid::from_top_row(&[1, 2, 3]).unwrap();
        for name in ["add_only", "sub_only", "full"] {
            let a = appraise(&g, &builtin_plan(name).unwrap());
            assert_eq!(a.kind, AppraisalKind::Solved);
            assert!(!a.relevance);
            assert!(a.congruence);
        }
    }

    #[test]
    fn impasse_and_progress() {
        let g = grid(&[&[Some(4), None], &[Some(9)]]);
        let a = appraise(&g, &builtin_plan("add_only").unwrap());
        assert_eq!(a.kind, AppraisalKind::Impasse);
        assert!(a.relevance && !a.congruence);

        let a = appraise(&g, &builtin_plan("full").unwrap());
        assert_eq!(
            a.kind,
            AppraisalKind::Progress(Move { target: CellPos::new(0, 1), value: 5, rule: Rule::R3, child: CellPos::new(1, 0) })
        );
        assert!(a.relevance && a.congruence);
    }

    #[test]
    fn error_takes_precedence() {
        let g = grid(&[&[Some(1), Some(2)], &[Some(4)]]);
        let a = appraise(&g, &builtin_plan("full").unwrap());
        assert_eq!(a.kind, AppraisalKind::Error(vec![CellPos::new(1, 0)]));
        assert!(a.relevance && !a.congruence);

        // A violation elsewhere outranks an available move.
        let g = grid(&[&[Some(1), Some(2), Some(3)], &[Some(4), None], &[None]]);
        assert_eq!(appraise(&g, &builtin_plan("full").unwrap()).kind.as_str(), "error");
    }
}
