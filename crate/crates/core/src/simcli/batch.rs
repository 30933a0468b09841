//! Seeded Monte-Carlo batches of episodes.

use rayon::prelude::*;
use thiserror::Error;

use crate::agent::{run_episode, EpisodeError, EpisodeResult, Outcome, TraceEvent};
use crate::cascade::{generate_puzzle, GenerateError, Puzzle};
use crate::rng::{derive_seed, SplitMix64};

use super::config::{PuzzleSource, SimConfig};

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("episode {index}: puzzle generation failed: {source}")]
    Generate { index: usize, source: GenerateError },
    #[error("episode {index}: {source}")]
    Episode { index: usize, source: EpisodeError },
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub index: usize,
    pub seed: u64,
    pub puzzle: Puzzle,
    pub result: EpisodeResult,
    pub trace: Vec<TraceEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub episodes: usize,
    pub solve_rate: f64,
    pub abandon_rate: f64,
    pub stepcap_rate: f64,
    pub mean_steps: f64,
    pub mean_plan_changes: f64,
    pub mean_corrections: f64,
    pub mean_final_valence: f64,
    pub mean_final_frustration: f64,
}

impl BatchSummary {
    /// Aggregates episode results in the order given.
    pub fn from_results<'a>(results: impl IntoIterator<Item = &'a EpisodeResult>) -> Self {
        let results: Vec<&EpisodeResult> = results.into_iter().collect();
        let n = results.len();
        assert!(n > 0, "summary of zero episodes");
        let count = |o: Outcome| results.iter().filter(|r| r.outcome == o).count();
        let mean = |f: &dyn Fn(&EpisodeResult) -> f64| results.iter().map(|r| f(r)).sum::<f64>() / n as f64;

        let solved = count(Outcome::Solved);
        let abandoned = count(Outcome::Abandoned);
        let capped = n - solved - abandoned;
        Self {
            episodes: n,
            solve_rate: solved as f64 / n as f64,
            abandon_rate: abandoned as f64 / n as f64,
            stepcap_rate: capped as f64 / n as f64,
            mean_steps: mean(&|r| r.steps as f64),
            mean_plan_changes: mean(&|r| r.plan_changes as f64),
            mean_corrections: mean(&|r| r.corrections as f64),
            mean_final_valence: mean(&|r| r.final_emotion.valence),
            mean_final_frustration: mean(&|r| r.final_emotion.frustration),
        }
    }
}

/// Runs episode `index` exactly as a batch would.
pub fn run_indexed_episode(config: &SimConfig, index: usize) -> Result<EpisodeRecord, BatchError> {
    run_seeded_episode(config, index, derive_seed(config.master_seed, index as u64))
}

/// One episode whose puzzle (when generated) and slips both come from
/// `seed`. `index` only labels the record and any error.
pub fn run_seeded_episode(config: &SimConfig, index: usize, seed: u64) -> Result<EpisodeRecord, BatchError> {
    let puzzle = match &config.source {
        PuzzleSource::Inline(p) => p.clone(),
        PuzzleSource::Generate(spec) => {
            let mut rng = SplitMix64::new(seed);
            generate_puzzle(spec.rows, spec.vmax, spec.require_subtraction, &mut rng)
                .map_err(|source| BatchError::Generate { index, source })?
        }
    };
    let (result, trace) = run_episode(&config.episode_config(puzzle.clone()), seed)
        .map_err(|source| BatchError::Episode { index, source })?;
    Ok(EpisodeRecord { index, seed, puzzle, result, trace })
}

/// Runs every episode on up to `jobs` threads. Output does not depend on
/// `jobs`: records come back in index order and the summary is computed
/// from that order.
pub fn run_batch(config: &SimConfig, jobs: usize) -> Result<(BatchSummary, Vec<EpisodeRecord>), BatchError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let outcomes: Vec<Result<EpisodeRecord, BatchError>> =
        pool.install(|| (0..config.episodes).into_par_iter().map(|i| run_indexed_episode(config, i)).collect());
    let records = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    let summary = BatchSummary::from_results(records.iter().map(|r| &r.result));
    Ok((summary, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcli::config::parse_config_str;
    use std::path::Path;

    fn config(text: &str) -> SimConfig {
        parse_config_str(text, Path::new("."), None).unwrap()
    }

    #[test]
    fn no_slip_inline_batch_always_solves() {
        let cfg = config(r#"{"puzzle":{"rows":3,"cells":[[1,2,3],[null,null],[null]]},"episodes":100,"master_seed":9}"#);
        let (summary, records) = run_batch(&cfg, 4).unwrap();
        assert_eq!(summary.episodes, 100);
        assert_eq!(summary.solve_rate, 1.0);
        assert_eq!(summary.mean_corrections, 0.0);
        assert_eq!(records.len(), 100);
        assert!(records.iter().enumerate().all(|(i, r)| r.index == i));
    }

    #[test]
    fn rates_sum_to_one() {
        let cfg = config(r#"{"generate":{"rows":4,"require_subtraction":true},"p_slip":0.4,"episodes":60,"master_seed":5}"#);
        let (s, _) = run_batch(&cfg, 3).unwrap();
        assert!((s.solve_rate + s.abandon_rate + s.stepcap_rate - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn jobs_do_not_change_results() {
        let cfg = config(r#"{"generate":{"rows":3},"p_slip":0.3,"episodes":40,"master_seed":77}"#);
        let a = run_batch(&cfg, 1).unwrap();
        let b = run_batch(&cfg, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn episode_is_independent_of_batch_size() {
        let cfg = config(r#"{"generate":{"rows":3},"p_slip":0.3,"episodes":12,"master_seed":1}"#);
        let (_, records) = run_batch(&cfg, 2).unwrap();
        let alone = run_indexed_episode(&cfg, 11).unwrap();
        assert_eq!(records[11], alone);
        assert_eq!(alone.seed, derive_seed(1, 11));
    }

    #[test]
    fn generation_failure_reports_episode_index() {
        let mut cfg = config(r#"{"generate":{"rows":3},"episodes":3}"#);
        if let PuzzleSource::Generate(spec) = &mut cfg.source {
            spec.rows = 1;
        }
        let err = run_batch(&cfg, 1).unwrap_err();
        assert!(matches!(err, BatchError::Generate { index: 0, .. }), "{err}");
    }
}
