use proptest::prelude::*;

use cascade_affect::agent::{replay_trace, run_episode, EpisodeConfig, Outcome};
use cascade_affect::appraisal::{appraise, AppraisalKind};
use cascade_affect::cascade::{brute_force_completions, generate_puzzle, CellPos, CellState, Grid, GridStatus, Puzzle};
use cascade_affect::plans::{applicable_moves, builtin_plan, closure, RuleSet};
use cascade_affect::rng::SplitMix64;

/// Closure variant that always applies the LAST applicable move.
fn reversed_closure(grid: &Grid, rules: RuleSet) -> Grid {
    let mut g = grid.clone();
    let mut seq = 1000;
    while let Some(m) = applicable_moves(&g, rules).pop() {
        g = g.set_cell(m.target, m.value, seq).unwrap();
        seq += 1;
    }
    g
}

fn any_grid(max_rows: usize) -> impl Strategy<Value = Grid> {
    (1..=max_rows).prop_flat_map(|rows| {
        let n = rows * (rows + 1) / 2;
        prop::collection::vec(prop::option::weighted(0.6, -5i64..20), n).prop_map(move |flat| {
            let mut it = flat.into_iter();
            let cells: Vec<Vec<Option<i64>>> = (0..rows).map(|r| it.by_ref().take(rows - r).collect()).collect();
            Grid::from_values(&cells).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn top_row_completion_is_consistent(values in prop::collection::vec(-50i64..50, 1..8)) {
        let g = Grid::from_top_row(&values).unwrap();
        prop_assert_eq!(g.rows(), values.len());
        for r in 0..g.rows() {
            prop_assert_eq!(g.values()[r].len(), values.len() - r);
        }
        prop_assert!(g.violated_constraints().is_empty());
        prop_assert_eq!(g.status(), GridStatus::Solved);
    }

    #[test]
    fn set_then_clear_is_identity(g in any_grid(5), value in -9i64..30, seq in 0u64..100) {
        let blanks: Vec<CellPos> = g.cells().filter(|(_, c)| c.is_blank()).map(|(p, _)| p).collect();
        for pos in blanks {
            let filled = g.set_cell(pos, value, seq).unwrap();
            prop_assert_eq!(filled.clear_cell(pos).unwrap(), g.clone());
        }
    }

    #[test]
    fn moves_are_sound_and_plans_nest(g in any_grid(5)) {
        let full = applicable_moves(&g, RuleSet::FULL);
        for m in &full {
            let after = g.set_cell(m.target, m.value, 0).unwrap();
            prop_assert!(!after.violated_constraints().contains(&m.child));
        }
        let full_keys: Vec<_> = full.iter().map(|m| (m.target, m.value, m.rule)).collect();
        for m in applicable_moves(&g, RuleSet::ADD_ONLY) {
            prop_assert!(full_keys.contains(&(m.target, m.value, m.rule)));
        }
        prop_assert_eq!(applicable_moves(&g, RuleSet::FULL), full);
    }

    #[test]
    fn closure_is_monotone(g in any_grid(5)) {
        let c = closure(&g, RuleSet::FULL);
        prop_assert!(c.blank_count() <= g.blank_count());
        for (pos, cell) in g.cells() {
            if let CellState::Given(v) = cell {
                prop_assert_eq!(c.get(pos), Some(CellState::Given(v)));
            }
            if !cell.is_blank() {
                prop_assert_eq!(c.value(pos), cell.value());
            }
        }
    }

    #[test]
    fn appraisal_invariants(g in any_grid(4)) {
        for name in ["add_only", "sub_only", "full"] {
            let plan = builtin_plan(name).unwrap();
            let a = appraise(&g, &plan);
            prop_assert_eq!(a.relevance, a.kind != AppraisalKind::Solved);
            prop_assert_eq!(a.congruence, matches!(a.kind, AppraisalKind::Solved | AppraisalKind::Progress(_)));
            match &a.kind {
                AppraisalKind::Error(cells) => prop_assert_eq!(cells, &g.violated_constraints()),
                AppraisalKind::Progress(m) => prop_assert_eq!(Some(*m), applicable_moves(&g, plan.rules()).first().copied()),
                _ => {}
            }
        }
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), rows in 2usize..6, sub in any::<bool>()) {
        let a = generate_puzzle(rows, 9, sub, &mut SplitMix64::new(seed));
        let b = generate_puzzle(rows, 9, sub, &mut SplitMix64::new(seed));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn generated_puzzles_agree_with_oracle() {
    for seed in 0..60u64 {
        let rows = 2 + (seed % 3) as usize;
        let vmax = 1 + (seed % 9) as i64;
        let p = generate_puzzle(rows, vmax, seed.is_multiple_of(2), &mut SplitMix64::new(seed)).unwrap();
        let all = brute_force_completions(&p, vmax);
        assert_eq!(all.len(), 1, "seed {seed}");
        assert_eq!(all[0].values(), closure(&p.grid, RuleSet::FULL).values());
    }
}

#[test]
fn closure_is_confluent() {
    for seed in 0..100u64 {
        let rows = 2 + (seed % 3) as usize;
        let p = generate_puzzle(rows, 9, seed % 2 == 1, &mut SplitMix64::new(seed)).unwrap();
        let forward = closure(&p.grid, RuleSet::FULL);
        let backward = reversed_closure(&p.grid, RuleSet::FULL);
        assert_eq!(forward.values(), backward.values(), "seed {seed}");
    }
}

fn episode_config(seed: u64, p_slip: f64) -> EpisodeConfig {
    let rows = 2 + (seed % 4) as usize;
    let p = generate_puzzle(rows, 9, seed.is_multiple_of(2), &mut SplitMix64::new(seed)).unwrap();
    let mut cfg = EpisodeConfig::new(p);
    cfg.p_slip = p_slip;
    cfg
}

#[test]
fn episode_invariants() {
    for seed in 0..150u64 {
        let p_slip = [0.0, 0.1, 0.5, 1.0][(seed % 4) as usize];
        let cfg = episode_config(seed, p_slip);
        let (res, trace) = run_episode(&cfg, seed).unwrap();

        assert!(res.steps <= cfg.step_cap);
        assert_eq!(trace.len(), res.steps as usize);
        assert!(trace.iter().enumerate().all(|(i, e)| e.t as usize == i));
        assert!(res.plan_changes <= cfg.max_changes);
        assert!(res.corrections <= res.fills);
        assert_eq!(replay_trace(&cfg.puzzle, &trace).values(), res.final_grid.values(), "seed {seed}");

        for w in trace.windows(2) {
            if w[0].slipped {
                assert_eq!(w[1].appraisal, "error", "seed {seed}");
            }
        }
        if res.outcome == Outcome::Solved {
            assert_eq!(res.final_grid.status(), GridStatus::Solved);
        }
        if p_slip == 0.0 {
            assert_eq!((res.corrections, res.slips), (0, 0));
        }
        assert_eq!(run_episode(&cfg, seed).unwrap().1, trace);
    }
}

#[test]
fn run_episode_examples() {
    let full = Puzzle::new(Grid::from_top_row(&[2, 7, 1]).unwrap(), 9, false);
    let (res, trace) = run_episode(&EpisodeConfig::new(full), 0).unwrap();
    assert_eq!((res.outcome, res.steps, res.fills), (Outcome::Solved, 1, 0));
    assert_eq!(trace[0].appraisal, "solved");

    let blank = Puzzle::new(Grid::blank(2).unwrap(), 9, false);
    let (res, trace) = run_episode(&EpisodeConfig::new(blank), 0).unwrap();
    let frustration: Vec<f64> = trace.iter().map(|e| e.frustration).collect();
    assert_eq!(res.outcome, Outcome::Abandoned);
    assert!((frustration[0] - 0.55).abs() < 1e-12);
    assert!((frustration[1] - 1.0).abs() < 1e-12);
    assert_eq!(trace.iter().map(|e| e.action.as_str()).collect::<Vec<_>>(), ["change_plan", "change_plan", "abandon"]);
}
