//! Simulation config files.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::agent::{EpisodeConfig, DEFAULT_STEP_CAP};
use crate::cascade::{Puzzle, PuzzleFile};
use crate::coping::{CopingParams, DEFAULT_MAX_CHANGES};
use crate::emotion::EmotionParams;
use crate::plans::Repertoire;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{field}: {message}")]
    Syntax { field: String, message: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid { field: field.into(), message: message.into() }
    }

    /// Name of the offending field, when the error concerns one.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Read { .. } => None,
            ConfigError::Syntax { field, .. } | ConfigError::Invalid { field, .. } => Some(field),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub rows: usize,
    #[serde(default = "default_vmax")]
    pub vmax: i64,
    #[serde(default)]
    pub require_subtraction: bool,
}

fn default_vmax() -> i64 {
    9
}

#[derive(Debug, Clone, PartialEq)]
pub enum PuzzleSource {
    /// Each episode draws a fresh instance from its own seed.
    Generate(GenerateSpec),
    /// Every episode plays the same puzzle.
    Inline(Puzzle),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub source: PuzzleSource,
    pub repertoire: Repertoire,
    pub p_slip: f64,
    pub emotion: EmotionParams,
    pub coping: CopingParams,
    pub max_changes: u32,
    pub step_cap: u32,
    pub episodes: usize,
    pub master_seed: u64,
}

impl SimConfig {
    pub fn episode_config(&self, puzzle: Puzzle) -> EpisodeConfig {
        EpisodeConfig {
            puzzle,
            repertoire: self.repertoire.clone(),
            emotion_params: self.emotion,
            coping_params: self.coping,
            max_changes: self.max_changes,
            p_slip: self.p_slip,
            step_cap: self.step_cap,
        }
    }
}

/// `puzzle` may be a path to a puzzle file or the puzzle object itself.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawPuzzle {
    Path(PathBuf),
    Inline(PuzzleFile),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoping {
    theta_abandon: Option<f64>,
    max_changes: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    generate: Option<GenerateSpec>,
    puzzle: Option<RawPuzzle>,
    repertoire: Option<Vec<String>>,
    cycling: Option<bool>,
    p_slip: Option<f64>,
    #[serde(default)]
    emotion: EmotionParams,
    #[serde(default)]
    coping: RawCoping,
    step_cap: Option<u32>,
    episodes: Option<usize>,
    master_seed: Option<u64>,
}

pub fn parse_config(path: &Path) -> Result<SimConfig, ConfigError> {
    load_config(path, None)
}

/// Reads a config file; `puzzle_override` replaces whatever puzzle source
/// the file names (and makes the file's source optional).
pub fn load_config(path: &Path, puzzle_override: Option<Puzzle>) -> Result<SimConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base, puzzle_override)
}

pub fn parse_config_str(text: &str, base_dir: &Path, puzzle_override: Option<Puzzle>) -> Result<SimConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        ConfigError::Syntax { field: if field == "." { "<root>".into() } else { field }, message: e.into_inner().to_string() }
    })?;

    let source = match (puzzle_override, raw.generate, raw.puzzle) {
        (Some(p), _, _) => PuzzleSource::Inline(p),
        (None, Some(_), Some(_)) => {
            return Err(ConfigError::invalid("generate|puzzle", "give either `generate` or `puzzle`, not both"))
        }
        (None, None, None) => return Err(ConfigError::invalid("generate|puzzle", "a puzzle source is required")),
        (None, Some(spec), None) => {
            if spec.rows < 2 {
                return Err(ConfigError::invalid("generate.rows", format!("must be >= 2, got {}", spec.rows)));
            }
            if spec.vmax < 1 {
                return Err(ConfigError::invalid("generate.vmax", format!("must be >= 1, got {}", spec.vmax)));
            }
            PuzzleSource::Generate(spec)
        }
        (None, None, Some(raw_puzzle)) => PuzzleSource::Inline(load_puzzle(raw_puzzle, base_dir)?),
    };

    let names = raw.repertoire.unwrap_or_else(|| vec!["add_only".into(), "full".into()]);
    let repertoire = Repertoire::from_names(&names, raw.cycling.unwrap_or(true))
        .map_err(|e| ConfigError::invalid("repertoire", e.to_string()))?;

    let p_slip = raw.p_slip.unwrap_or(0.0);
    if !(0.0..=1.0).contains(&p_slip) {
        return Err(ConfigError::invalid("p_slip", format!("must be within [0, 1], got {p_slip}")));
    }
    raw.emotion.validate().map_err(|e| ConfigError::invalid(format!("emotion.{}", e.field), e.to_string()))?;

    let theta = raw.coping.theta_abandon.unwrap_or(CopingParams::default().theta_abandon);
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(ConfigError::invalid("coping.theta_abandon", format!("must be within (0, 1], got {theta}")));
    }
    let step_cap = raw.step_cap.unwrap_or(DEFAULT_STEP_CAP);
    if step_cap == 0 {
        return Err(ConfigError::invalid("step_cap", "must be >= 1"));
    }
    let episodes = raw.episodes.unwrap_or(1);
    if episodes == 0 {
        return Err(ConfigError::invalid("episodes", "must be >= 1"));
    }

    Ok(SimConfig {
        source,
        repertoire,
        p_slip,
        emotion: raw.emotion,
        coping: CopingParams { theta_abandon: theta },
        max_changes: raw.coping.max_changes.unwrap_or(DEFAULT_MAX_CHANGES),
        step_cap,
        episodes,
        master_seed: raw.master_seed.unwrap_or(0),
    })
}

fn load_puzzle(raw: RawPuzzle, base_dir: &Path) -> Result<Puzzle, ConfigError> {
    let file = match raw {
        RawPuzzle::Inline(file) => file,
        RawPuzzle::Path(rel) => {
            let path = base_dir.join(rel);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| ConfigError::invalid("puzzle", format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| ConfigError::invalid("puzzle", format!("{}: {e}", path.display())))?
        }
    };
    Puzzle::try_from(file).map_err(|e| ConfigError::invalid("puzzle", e.to_string()))
}
