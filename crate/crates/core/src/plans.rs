//! Plans: readings of the task instructions, each licensing a subset of the
//! local inference rules.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cascade::{CellPos, Grid, Triple};

/// Local inference rule over one sum triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    /// child <- left + right
    R1,
    /// left <- child - right
    R2,
    /// right <- child - left
    R3,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::R1, Rule::R2, Rule::R3];

    fn bit(self) -> u8 {
        match self {
            Rule::R1 => 1,
            Rule::R2 => 2,
            Rule::R3 => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
        }
    }

    /// Fires when exactly this rule's target is blank and both sources are known.
    fn fire(self, grid: &Grid, t: &Triple) -> Option<(CellPos, i64)> {
        let (c, l, r) = (grid.value(t.child), grid.value(t.left), grid.value(t.right));
        match (self, c, l, r) {
            (Rule::R1, None, Some(l), Some(r)) => Some((t.child, l + r)),
            (Rule::R2, Some(c), None, Some(r)) => Some((t.left, c - r)),
            (Rule::R3, Some(c), Some(l), None) => Some((t.right, c - l)),
            _ => None,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A subset of {R1, R2, R3}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RuleSet(u8);

impl RuleSet {
    pub const EMPTY: RuleSet = RuleSet(0);
    pub const ADD_ONLY: RuleSet = RuleSet(1);
    pub const SUB_ONLY: RuleSet = RuleSet(2 | 4);
    pub const FULL: RuleSet = RuleSet(1 | 2 | 4);

    pub fn contains(self, rule: Rule) -> bool {
        self.0 & rule.bit() != 0
    }

    pub fn with(self, rule: Rule) -> Self {
        RuleSet(self.0 | rule.bit())
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Rule> {
        Rule::ALL.into_iter().filter(move |r| self.contains(*r))
    }
}

impl FromIterator<Rule> for RuleSet {
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        iter.into_iter().fold(RuleSet::EMPTY, RuleSet::with)
    }
}

impl fmt::Debug for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("plan {0:?} allows no rules")]
    EmptyRules(String),
    #[error("repertoire is empty")]
    EmptyRepertoire,
    #[error("plan name {0:?} appears twice in the repertoire")]
    DuplicateName(String),
    #[error("unknown plan {0:?}")]
    UnknownPlan(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    name: String,
    rules: RuleSet,
}

impl Plan {
    pub fn new(name: impl Into<String>, rules: RuleSet) -> Result<Self, PlanError> {
        let name = name.into();
        if rules.is_empty() {
            return Err(PlanError::EmptyRules(name));
        }
        Ok(Self { name, rules })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rules(&self) -> RuleSet {
        self.rules
    }
}

/// `add_only`, `sub_only` and `full`.
pub fn builtin_plans() -> BTreeMap<&'static str, Plan> {
    [("add_only", RuleSet::ADD_ONLY), ("sub_only", RuleSet::SUB_ONLY), ("full", RuleSet::FULL)]
        .into_iter()
        .map(|(name, rules)| (name, Plan { name: name.to_string(), rules }))
        .collect()
}

pub fn builtin_plan(name: &str) -> Result<Plan, PlanError> {
    builtin_plans().remove(name).ok_or_else(|| PlanError::UnknownPlan(name.to_string()))
}

/// Ordered plans the agent may switch between.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repertoire {
    plans: Vec<Plan>,
    cycling: bool,
}

impl Repertoire {
    pub fn new(plans: Vec<Plan>, cycling: bool) -> Result<Self, PlanError> {
        if plans.is_empty() {
            return Err(PlanError::EmptyRepertoire);
        }
        for (i, plan) in plans.iter().enumerate() {
            if plans[..i].iter().any(|p| p.name == plan.name) {
                return Err(PlanError::DuplicateName(plan.name.clone()));
            }
        }
        Ok(Self { plans, cycling })
    }

    /// Repertoire of builtin plans looked up by name.
    pub fn from_names<S: AsRef<str>>(names: &[S], cycling: bool) -> Result<Self, PlanError> {
        let plans = names.iter().map(|n| builtin_plan(n.as_ref())).collect::<Result<_, _>>()?;
        Self::new(plans, cycling)
    }

    pub fn plans(&self) -> &[Plan] {
        &self.plans
    }

    pub fn plan(&self, index: usize) -> &Plan {
        &self.plans[index]
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }

    pub fn cycling(&self) -> bool {
        self.cycling
    }

    /// Index of the plan to switch to from `current`, if any. Never
    /// returns `current` itself.
    pub fn next_plan(&self, current: usize) -> Option<usize> {
        debug_assert!(current < self.plans.len());
        let next = if current + 1 < self.plans.len() {
            current + 1
        } else if self.cycling {
            0
        } else {
            return None;
        };
        (next != current).then_some(next)
    }
}

impl Default for Repertoire {
    /// `[add_only, full]`, cycling.
    fn default() -> Self {
        Repertoire::from_names(&["add_only", "full"], true).expect("builtin plans")
    }
}

/// One fill licensed by a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub target: CellPos,
    pub value: i64,
    pub rule: Rule,
    /// Child of the triple the move was computed from.
    pub child: CellPos,
}

/// Moves licensed by `rules`, by child position row-major then rule order.
pub fn applicable_moves(grid: &Grid, rules: RuleSet) -> Vec<Move> {
    grid.triples()
        .flat_map(|t| {
            rules.iter().filter_map(move |rule| {
                rule.fire(grid, &t).map(|(target, value)| Move { target, value, rule, child: t.child })
            })
        })
        .collect()
}

fn first_move(grid: &Grid, rules: RuleSet) -> Option<Move> {
    grid.triples().find_map(|t| {
        rules.iter().find_map(|rule| rule.fire(grid, &t).map(|(target, value)| Move { target, value, rule, child: t.child }))
    })
}

/// Fixpoint of repeatedly applying the first applicable move. New cells are
/// written as Filled with sequence numbers after the grid's highest.
pub fn closure(grid: &Grid, rules: RuleSet) -> Grid {
    let mut seq = grid.max_fill_seq().map_or(0, |s| s + 1);
    let mut g = grid.clone();
    while let Some(m) = first_move(&g, rules) {
        g = g.set_cell(m.target, m.value, seq).expect("move targets a blank cell");
        seq += 1;
    }
    g
}
