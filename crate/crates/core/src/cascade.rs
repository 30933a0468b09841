//! The Cascades puzzle: a triangular grid in which every cell below the top
//! row holds the sum of the two cells directly above it.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plans::{closure, RuleSet};
use crate::rng::SplitMix64;

/// Number of shuffled removal passes tried before giving up on a puzzle that
/// must stall under addition alone.
pub const DEFAULT_REMOVAL_ATTEMPTS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("top row must contain at least one value")]
    EmptyTopRow,
    #[error("grid must have at least one row")]
    NoRows,
    #[error("row {row} has {found} cells, expected {expected}")]
    BadShape { row: usize, expected: usize, found: usize },
    #[error("cell {0} is out of range")]
    OutOfRange(CellPos),
    #[error("cell {0} is given and cannot be changed")]
    GivenCell(CellPos),
    #[error("cell {0} is already filled")]
    AlreadyFilled(CellPos),
    #[error("cell {0} is blank")]
    BlankCell(CellPos),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("puzzle needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("vmax must be at least 1, got {0}")]
    VmaxTooSmall(i64),
    #[error("no removal order left the puzzle unsolvable by addition alone after {0} attempts")]
    SubtractionUnachievable(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellPos {
    pub row: usize,
    pub col: usize,
}

impl CellPos {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for CellPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellState {
    Given(i64),
    /// Written by the agent (or a closure); `seq` orders fills within an episode.
    Filled { value: i64, seq: u64 },
    Blank,
}

impl CellState {
    pub fn value(self) -> Option<i64> {
        match self {
            CellState::Given(v) | CellState::Filled { value: v, .. } => Some(v),
            CellState::Blank => None,
        }
    }

    pub fn is_blank(self) -> bool {
        matches!(self, CellState::Blank)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridStatus {
    Solved,
    Incomplete,
    Inconsistent,
}

/// A sum constraint: `child == left + right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triple {
    pub child: CellPos,
    pub left: CellPos,
    pub right: CellPos,
}

impl Triple {
    pub fn members(&self) -> [CellPos; 3] {
        [self.child, self.left, self.right]
    }
}

/// Triangular grid stored row-major; row `r` holds `rows - r` cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cells: Vec<CellState>,
}

fn triangle(n: usize) -> usize {
    n * (n + 1) / 2
}

impl Grid {
    /// All-blank grid with `rows` rows.
    pub fn blank(rows: usize) -> Result<Self, GridError> {
        if rows == 0 {
            return Err(GridError::NoRows);
        }
        Ok(Self { rows, cells: vec![CellState::Blank; triangle(rows)] })
    }

    /// Builds a grid from rows of cell states, top row first.
    pub fn from_rows(rows: Vec<Vec<CellState>>) -> Result<Self, GridError> {
        let n = rows.len();
        if n == 0 {
            return Err(GridError::NoRows);
        }
        let mut cells = Vec::with_capacity(triangle(n));
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n - r {
                return Err(GridError::BadShape { row: r, expected: n - r, found: row.len() });
            }
            cells.extend(row);
        }
        Ok(Self { rows: n, cells })
    }

    /// Grid of Given/Blank cells from optional values (`None` = Blank).
    pub fn from_values(rows: &[Vec<Option<i64>>]) -> Result<Self, GridError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|v| v.map_or(CellState::Blank, CellState::Given)).collect())
                .collect(),
        )
    }

    /// The unique complete grid whose top row is `values`.
    pub fn from_top_row(values: &[i64]) -> Result<Self, GridError> {
        if values.is_empty() {
            return Err(GridError::EmptyTopRow);
        }
        let mut rows = vec![values.to_vec()];
        while rows.last().unwrap().len() > 1 {
            let prev = rows.last().unwrap();
            let next = prev.windows(2).map(|w| w[0] + w[1]).collect();
            rows.push(next);
        }
        Self::from_rows(rows.into_iter().map(|r| r.into_iter().map(CellState::Given).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn row_len(&self, row: usize) -> usize {
        self.rows - row
    }

    pub fn contains(&self, pos: CellPos) -> bool {
        pos.row < self.rows && pos.col < self.rows - pos.row
    }

    fn index(&self, pos: CellPos) -> Option<usize> {
        // Rows above `row` hold rows + (rows-1) + ... cells.
        self.contains(pos).then(|| pos.row * self.rows - pos.row * (pos.row.saturating_sub(1)) / 2 + pos.col)
    }

    pub fn get(&self, pos: CellPos) -> Option<CellState> {
        self.index(pos).map(|i| self.cells[i])
    }

    pub fn value(&self, pos: CellPos) -> Option<i64> {
        self.get(pos).and_then(CellState::value)
    }

    /// Every position, row-major.
    pub fn positions(&self) -> impl Iterator<Item = CellPos> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.rows - r).map(move |c| CellPos::new(r, c)))
    }

    /// Every sum constraint, ordered by child position row-major.
    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        (1..self.rows).flat_map(move |r| {
            (0..self.rows - r).map(move |i| Triple {
                child: CellPos::new(r, i),
                left: CellPos::new(r - 1, i),
                right: CellPos::new(r - 1, i + 1),
            })
        })
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellPos, CellState)> + '_ {
        self.positions().zip(self.cells.iter().copied())
    }

    pub fn blank_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_blank()).count()
    }

    /// Highest fill sequence number present, if any cell is Filled.
    pub fn max_fill_seq(&self) -> Option<u64> {
        self.cells
            .iter()
            .filter_map(|c| match c {
                CellState::Filled { seq, .. } => Some(*seq),
                _ => None,
            })
            .max()
    }

    /// Values row by row, `None` for blanks.
    pub fn values(&self) -> Vec<Vec<Option<i64>>> {
        (0..self.rows)
            .map(|r| (0..self.rows - r).map(|c| self.value(CellPos::new(r, c))).collect())
            .collect()
    }

    pub fn set_cell(&self, pos: CellPos, value: i64, seq: u64) -> Result<Grid, GridError> {
        let i = self.index(pos).ok_or(GridError::OutOfRange(pos))?;
        match self.cells[i] {
            CellState::Given(_) => Err(GridError::GivenCell(pos)),
            CellState::Filled { .. } => Err(GridError::AlreadyFilled(pos)),
            CellState::Blank => {
                let mut next = self.clone();
                next.cells[i] = CellState::Filled { value, seq };
                Ok(next)
            }
        }
    }

    pub fn clear_cell(&self, pos: CellPos) -> Result<Grid, GridError> {
        let i = self.index(pos).ok_or(GridError::OutOfRange(pos))?;
        match self.cells[i] {
            CellState::Given(_) => Err(GridError::GivenCell(pos)),
            CellState::Blank => Err(GridError::BlankCell(pos)),
            CellState::Filled { .. } => {
                let mut next = self.clone();
                next.cells[i] = CellState::Blank;
                Ok(next)
            }
        }
    }

    /// Child positions of fully-known triples whose sum does not hold.
    pub fn violated_constraints(&self) -> Vec<CellPos> {
        self.triples()
            .filter(|t| match (self.value(t.child), self.value(t.left), self.value(t.right)) {
                (Some(c), Some(l), Some(r)) => c != l + r,
                _ => false,
            })
            .map(|t| t.child)
            .collect()
    }

    pub fn status(&self) -> GridStatus {
        if !self.violated_constraints().is_empty() {
            GridStatus::Inconsistent
        } else if self.blank_count() > 0 {
            GridStatus::Incomplete
        } else {
            GridStatus::Solved
        }
    }
}

impl fmt::Display for Grid {
    /// One line per row, blanks shown as `_`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.rows - r)
                .map(|c| self.value(CellPos::new(r, c)).map_or_else(|| "_".to_string(), |v| v.to_string()))
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// A puzzle instance: Given and Blank cells only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Puzzle {
    pub grid: Grid,
    pub vmax: i64,
    pub requires_subtraction: bool,
}

/// On-disk puzzle format. `null` marks a blank cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuzzleFile {
    pub rows: usize,
    pub cells: Vec<Vec<Option<i64>>>,
    #[serde(default = "default_vmax")]
    pub vmax: i64,
    #[serde(default)]
    pub requires_subtraction: bool,
}

fn default_vmax() -> i64 {
    9
}

impl TryFrom<PuzzleFile> for Puzzle {
    type Error = GridError;

    fn try_from(file: PuzzleFile) -> Result<Self, Self::Error> {
        if file.cells.len() != file.rows {
            return Err(GridError::BadShape { row: file.cells.len().min(file.rows), expected: file.rows, found: file.cells.len() });
        }
        Ok(Puzzle {
            grid: Grid::from_values(&file.cells)?,
            vmax: file.vmax,
            requires_subtraction: file.requires_subtraction,
        })
    }
}

impl From<&Puzzle> for PuzzleFile {
    fn from(p: &Puzzle) -> Self {
        PuzzleFile {
            rows: p.grid.rows(),
            cells: p.grid.values(),
            vmax: p.vmax,
            requires_subtraction: p.requires_subtraction,
        }
    }
}

impl Puzzle {
    pub fn new(grid: Grid, vmax: i64, requires_subtraction: bool) -> Self {
        Self { grid, vmax, requires_subtraction }
    }

    pub fn from_json(text: &str) -> Result<Self, PuzzleParseError> {
        let file: PuzzleFile = serde_json::from_str(text)?;
        Ok(Puzzle::try_from(file)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PuzzleFile::from(self)).expect("puzzle serializes")
    }
}

#[derive(Debug, Error)]
pub enum PuzzleParseError {
    #[error("malformed puzzle JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid puzzle grid: {0}")]
    Grid(#[from] GridError),
}

/// Every completion whose top row lies in `[0, vmax]^R` and agrees with the
/// puzzle's Given cells, in lexicographic top-row order.
pub fn brute_force_completions(puzzle: &Puzzle, vmax: i64) -> Vec<Grid> {
    let rows = puzzle.grid.rows();
    if vmax < 0 {
        return Vec::new();
    }
    let givens: Vec<(CellPos, i64)> = puzzle
        .grid
        .cells()
        .filter_map(|(p, c)| match c {
            CellState::Given(v) => Some((p, v)),
            _ => None,
        })
        .collect();

    let mut out = Vec::new();
    let mut top = vec![0i64; rows];
    loop {
        let candidate = Grid::from_top_row(&top).expect("non-empty top row");
        if givens.iter().all(|&(p, v)| candidate.value(p) == Some(v)) {
            out.push(candidate);
        }
        // Odometer increment, last column fastest.
        let mut k = rows;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if top[k] < vmax {
                top[k] += 1;
                break;
            }
            top[k] = 0;
        }
    }
}

/// Generates a puzzle that local addition/subtraction inference completes.
///
/// The top row is drawn uniformly from `[0, vmax]`, the rest is filled by
/// sums, then cells are removed greedily in a shuffled order as long as the
/// full-rule closure still completes the grid. With `require_subtraction`,
/// further shuffles are tried until the result also stalls under addition
/// alone.
pub fn generate_puzzle(
    rows: usize,
    vmax: i64,
    require_subtraction: bool,
    rng: &mut SplitMix64,
) -> Result<Puzzle, GenerateError> {
    generate_puzzle_with_attempts(rows, vmax, require_subtraction, rng, DEFAULT_REMOVAL_ATTEMPTS)
}

pub fn generate_puzzle_with_attempts(
    rows: usize,
    vmax: i64,
    require_subtraction: bool,
    rng: &mut SplitMix64,
    attempts: usize,
) -> Result<Puzzle, GenerateError> {
    if rows < 2 {
        return Err(GenerateError::TooFewRows(rows));
    }
    if vmax < 1 {
        return Err(GenerateError::VmaxTooSmall(vmax));
    }
    let top: Vec<i64> = (0..rows).map(|_| rng.range_inclusive(0, vmax)).collect();
    let solution = Grid::from_top_row(&top).expect("rows >= 2");

    let passes = if require_subtraction { attempts.max(1) } else { 1 };
    for _ in 0..passes {
        let grid = greedy_removal(&solution, rng);
        if !require_subtraction || closure(&grid, RuleSet::ADD_ONLY).blank_count() > 0 {
            return Ok(Puzzle::new(grid, vmax, require_subtraction));
        }
    }
    Err(GenerateError::SubtractionUnachievable(passes))
}

fn greedy_removal(solution: &Grid, rng: &mut SplitMix64) -> Grid {
    let mut order: Vec<CellPos> = solution.positions().collect();
    rng.shuffle(&mut order);
    let mut grid = solution.clone();
    for pos in order {
        let i = grid.index(pos).expect("in range");
        let kept = grid.cells[i];
        grid.cells[i] = CellState::Blank;
        if closure(&grid, RuleSet::FULL).blank_count() > 0 {
            grid.cells[i] = kept;
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r: usize, c: usize) -> CellPos {
        CellPos::new(r, c)
    }

    fn grid(rows: &[&[Option<i64>]]) -> Grid {
        Grid::from_values(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// [[1,_,3],[_,5],[_]]
    fn sample() -> Grid {
        grid(&[&[Some(1), None, Some(3)], &[None, Some(5)], &[None]])
    }

    #[test]
    fn from_top_row_examples() {
        let g = Grid::from_top_row(&[1, 2, 3]).unwrap();
        assert_eq!(g.values(), vec![vec![Some(1), Some(2), Some(3)], vec![Some(3), Some(5)], vec![Some(8)]]);
        assert_eq!(g.status(), GridStatus::Solved);
        assert_eq!(Grid::from_top_row(&[5]).unwrap().values(), vec![vec![Some(5)]]);
        assert_eq!(Grid::from_top_row(&[0, 0]).unwrap().values(), vec![vec![Some(0), Some(0)], vec![Some(0)]]);
        assert_eq!(Grid::from_top_row(&[]), Err(GridError::EmptyTopRow));
    }

    #[test]
    fn set_cell_examples() {
        let g = sample().set_cell(p(0, 1), 2, 0).unwrap();
        assert_eq!(g.values()[0], vec![Some(1), Some(2), Some(3)]);
        assert_eq!(g.get(p(0, 1)), Some(CellState::Filled { value: 2, seq: 0 }));

        let given = grid(&[&[Some(1), None], &[None]]);
        assert_eq!(given.set_cell(p(0, 0), 9, 0), Err(GridError::GivenCell(p(0, 0))));
        assert_eq!(sample().set_cell(p(5, 0), 1, 0), Err(GridError::OutOfRange(p(5, 0))));
        assert_eq!(sample().set_cell(p(0, 3), 1, 0), Err(GridError::OutOfRange(p(0, 3))));
        assert_eq!(g.set_cell(p(0, 1), 4, 1), Err(GridError::AlreadyFilled(p(0, 1))));
    }

    #[test]
    fn clear_cell_examples() {
        let g = sample().set_cell(p(0, 1), 2, 0).unwrap();
        assert_eq!(g.clear_cell(p(0, 1)).unwrap(), sample());
        assert_eq!(g.clear_cell(p(0, 0)), Err(GridError::GivenCell(p(0, 0))));
        assert_eq!(g.clear_cell(p(2, 0)), Err(GridError::BlankCell(p(2, 0))));
    }

    #[test]
    fn violations_and_status() {
        let solved = Grid::from_top_row(&[1, 2, 3]).unwrap();
        assert!(solved.violated_constraints().is_empty());

        let bad = grid(&[&[Some(1), Some(2)], &[Some(4)]]);
        assert_eq!(bad.violated_constraints(), vec![p(1, 0)]);
        assert_eq!(bad.status(), GridStatus::Inconsistent);

        assert!(sample().violated_constraints().is_empty());
        assert_eq!(sample().status(), GridStatus::Incomplete);
        assert_eq!(solved.status(), GridStatus::Solved);
    }

    #[test]
    fn inconsistent_beats_incomplete() {
        let g = grid(&[&[Some(1), Some(2), None], &[Some(9), None], &[None]]);
        assert_eq!(g.status(), GridStatus::Inconsistent);
    }

    #[test]
    fn shape_is_triangular() {
        let g = Grid::blank(4).unwrap();
        for r in 0..4 {
            assert_eq!(g.row_len(r), 4 - r);
        }
        assert_eq!(g.positions().count(), 10);
        assert_eq!(g.triples().count(), 6);
        assert!(Grid::from_values(&[vec![Some(1), None], vec![None, None]]).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let puzzle = Puzzle::new(grid(&[&[Some(4), None], &[Some(9)]]), 9, true);
        let all = brute_force_completions(&puzzle, 9);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].values(), vec![vec![Some(4), Some(5)], vec![Some(9)]]);

        let full = Puzzle::new(Grid::from_top_row(&[1, 2, 3]).unwrap(), 9, false);
        let all = brute_force_completions(&full, 9);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].values(), full.grid.values());

        let blank = Puzzle::new(Grid::blank(2).unwrap(), 1, false);
        let tops: Vec<_> = brute_force_completions(&blank, 1).iter().map(|g| g.values()[0].clone()).collect();
        assert_eq!(
            tops,
            vec![
                vec![Some(0), Some(0)],
                vec![Some(0), Some(1)],
                vec![Some(1), Some(0)],
                vec![Some(1), Some(1)]
            ]
        );
    }

    #[test]
    fn generate_rejects_bad_arguments() {
        let mut rng = SplitMix64::new(1);
        assert_eq!(generate_puzzle(1, 9, false, &mut rng), Err(GenerateError::TooFewRows(1)));
        assert_eq!(generate_puzzle(3, 0, false, &mut rng), Err(GenerateError::VmaxTooSmall(0)));
    }

    #[test]
    fn generated_puzzles_are_closure_solvable() {
        for seed in 0..50 {
            let mut rng = SplitMix64::new(seed);
            let puzzle = generate_puzzle(3, 9, false, &mut rng).unwrap();
            assert_eq!(closure(&puzzle.grid, RuleSet::FULL).status(), GridStatus::Solved);
            assert!(puzzle.grid.cells().any(|(_, c)| matches!(c, CellState::Given(_))));
        }
    }

    #[test]
    fn subtraction_puzzles_stall_under_addition() {
        for seed in 0..50 {
            let mut rng = SplitMix64::new(seed);
            let puzzle = generate_puzzle(3, 9, true, &mut rng).unwrap();
            assert!(puzzle.requires_subtraction);
            assert_eq!(closure(&puzzle.grid, RuleSet::ADD_ONLY).status(), GridStatus::Incomplete);
            assert_eq!(closure(&puzzle.grid, RuleSet::FULL).status(), GridStatus::Solved);
        }
    }

    #[test]
    fn zero_attempts_still_tries_once() {
        // attempts is clamped to at least one pass
        let mut rng = SplitMix64::new(5);
        let r = generate_puzzle_with_attempts(2, 9, true, &mut rng, 0);
        assert!(matches!(r, Ok(_) | Err(GenerateError::SubtractionUnachievable(1))));
    }

    #[test]
    fn puzzle_json_format() {
        let puzzle = Puzzle::new(sample(), 9, true);
        let text = puzzle.to_json();
        assert_eq!(text, r#"{"rows":3,"cells":[[1,null,3],[null,5],[null]],"vmax":9,"requires_subtraction":true}"#);
        assert_eq!(Puzzle::from_json(&text).unwrap(), puzzle);
        assert!(Puzzle::from_json(r#"{"rows":2,"cells":[[1]]}"#).is_err());
        assert!(Puzzle::from_json(r#"{"rows":2,"cells":[[1],[2,3]]}"#).is_err());
    }
}
