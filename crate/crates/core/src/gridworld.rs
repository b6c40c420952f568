//! The maze environment: cells, four-action deterministic dynamics, reward
//! signal, random maze generation and solvability checking.
//!
//! Conventions: `(row, col)` indexing, 0-based. Moving into a wall or off the
//! grid keeps the agent in place. Every non-terminal transition earns reward
//! -1; the transition into the goal earns 0 and ends the episode.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::rng::{derive_seed, RngStream};

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("position ({0}, {1}) is out of bounds")]
    OutOfBounds(usize, usize),
    #[error("position ({0}, {1}) is an obstacle")]
    OnObstacle(usize, usize),
    #[error("cannot step from the goal cell")]
    AtGoal,
    #[error("invalid maze config: {0}")]
    BadConfig(String),
    #[error("no solvable maze found after {0} attempts")]
    Unsolvable(usize),
    #[error("malformed maze file: {0}")]
    Parse(String),
}

/// A grid cell, `(row, col)` 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// One of the four grid actions. Ordered Up < Down < Left < Right for
/// deterministic iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Up,
    Down,
    Left,
    Right,
}

impl Move {
    pub const ALL: [Move; 4] = [Move::Up, Move::Down, Move::Left, Move::Right];

    /// Dense index in 0..4, following the total ordering.
    pub fn index(self) -> usize {
        match self {
            Move::Up => 0,
            Move::Down => 1,
            Move::Left => 2,
            Move::Right => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Move::Up => "up",
            Move::Down => "down",
            Move::Left => "left",
            Move::Right => "right",
        }
    }

    fn delta(self) -> (isize, isize) {
        match self {
            Move::Up => (-1, 0),
            Move::Down => (1, 0),
            Move::Left => (0, -1),
            Move::Right => (0, 1),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The result of one environment transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub next: Position,
    pub reward: f64,
    pub terminal: bool,
}

/// A maze: dimensions, obstacle mask, start and goal cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    height: usize,
    width: usize,
    obstacles: Vec<bool>,
    start: Position,
    goal: Position,
}

impl GridMap {
    pub fn new(
        height: usize,
        width: usize,
        obstacles: Vec<bool>,
        start: Position,
        goal: Position,
    ) -> Result<Self, GridError> {
        if obstacles.len() != height * width {
            return Err(GridError::BadConfig(format!(
                "obstacle mask has {} cells, expected {}",
                obstacles.len(),
                height * width
            )));
        }
        if start == goal {
            return Err(GridError::BadConfig("start equals goal".into()));
        }
        let grid = Self {
            height,
            width,
            obstacles,
            start,
            goal,
        };
        for (name, p) in [("start", start), ("goal", goal)] {
            if !grid.in_bounds(p) {
                return Err(GridError::BadConfig(format!("{name} {p} out of bounds")));
            }
            if grid.is_obstacle(p) {
                return Err(GridError::BadConfig(format!("{name} {p} is an obstacle")));
            }
        }
        Ok(grid)
    }

    /// An obstacle-free grid, handy for tests.
    pub fn open(height: usize, width: usize, start: Position, goal: Position) -> Self {
        Self::new(height, width, vec![false; height * width], start, goal).unwrap()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn start(&self) -> Position {
        self.start
    }

    pub fn goal(&self) -> Position {
        self.goal
    }

    pub fn in_bounds(&self, p: Position) -> bool {
        p.row < self.height && p.col < self.width
    }

    pub fn is_obstacle(&self, p: Position) -> bool {
        self.obstacles[p.row * self.width + p.col]
    }

    pub fn cell_count(&self) -> usize {
        self.height * self.width
    }

    /// Dense cell index for table lookups.
    pub fn cell_index(&self, p: Position) -> usize {
        p.row * self.width + p.col
    }
}

/// Parameters for random maze generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MazeGenConfig {
    pub height: usize,
    pub width: usize,
    pub start: Position,
    pub goal: Position,
    pub sigma: f64,
    pub seed: u64,
}

impl MazeGenConfig {
    fn validate(&self) -> Result<(), GridError> {
        if self.height < 2 || self.width < 2 {
            return Err(GridError::BadConfig("grid must be at least 2x2".into()));
        }
        if !(self.sigma > 0.0) {
            return Err(GridError::BadConfig("sigma must be positive".into()));
        }
        if self.start == self.goal {
            return Err(GridError::BadConfig("start equals goal".into()));
        }
        for (name, p) in [("start", self.start), ("goal", self.goal)] {
            if p.row >= self.height || p.col >= self.width {
                return Err(GridError::BadConfig(format!("{name} {p} out of bounds")));
            }
        }
        Ok(())
    }
}

/// Executes one deterministic environment transition.
///
/// Blocked moves (off-grid or into a wall) keep the agent in place. Reward is
/// -1 except for the transition into the goal, which is 0 and terminal.
pub fn step(grid: &GridMap, at: Position, mv: Move) -> Result<StepOutcome, GridError> {
    if !grid.in_bounds(at) {
        return Err(GridError::OutOfBounds(at.row, at.col));
    }
    if grid.is_obstacle(at) {
        return Err(GridError::OnObstacle(at.row, at.col));
    }
    if at == grid.goal() {
        return Err(GridError::AtGoal);
    }
    let (dr, dc) = mv.delta();
    let row = at.row as isize + dr;
    let col = at.col as isize + dc;
    let candidate = if row >= 0 && col >= 0 {
        Position::new(row as usize, col as usize)
    } else {
        at
    };
    let next = if grid.in_bounds(candidate) && !grid.is_obstacle(candidate) {
        candidate
    } else {
        at
    };
    let terminal = next == grid.goal();
    Ok(StepOutcome {
        next,
        reward: if terminal { 0.0 } else { -1.0 },
        terminal,
    })
}

/// Raw obstacle mask for one generation attempt, before start/goal freeing
/// and before any solvability regeneration. Each cell draws
/// x ~ Normal(0, sigma^2); the cell is a wall iff |x| rounds away from zero,
/// i.e. |x| >= 0.5. Exposed so the obstacle-frequency statistics can be
/// measured on the untouched distribution.
pub fn raw_obstacle_mask(height: usize, width: usize, sigma: f64, seed: u64) -> Vec<bool> {
    let normal = Normal::new(0.0, sigma).expect("sigma must be positive and finite");
    let mut rng = RngStream::from_seed(seed);
    (0..height * width)
        .map(|_| {
            let x: f64 = normal.sample(&mut rng);
            x.abs() >= 0.5
        })
        .collect()
}

const MAX_GENERATION_ATTEMPTS: usize = 1000;

/// Generates a random solvable maze, a pure function of the config.
///
/// Unsolvable draws are regenerated from deterministically derived sub-seeds
/// (seed, attempt counter) up to a bounded number of attempts.
pub fn generate_maze(cfg: &MazeGenConfig) -> Result<GridMap, GridError> {
    cfg.validate()?;
    for attempt in 0..MAX_GENERATION_ATTEMPTS {
        let sub_seed = derive_seed(cfg.seed, "maze-attempt", &[attempt as u64]);
        let mut mask = raw_obstacle_mask(cfg.height, cfg.width, cfg.sigma, sub_seed);
        mask[cfg.start.row * cfg.width + cfg.start.col] = false;
        mask[cfg.goal.row * cfg.width + cfg.goal.col] = false;
        let grid = GridMap::new(cfg.height, cfg.width, mask, cfg.start, cfg.goal)?;
        if is_solvable(&grid) {
            return Ok(grid);
        }
    }
    Err(GridError::Unsolvable(MAX_GENERATION_ATTEMPTS))
}

/// Breadth-first reachability from start to goal over free cells.
pub fn is_solvable(grid: &GridMap) -> bool {
    let mut seen = vec![false; grid.cell_count()];
    let mut queue = VecDeque::new();
    seen[grid.cell_index(grid.start())] = true;
    queue.push_back(grid.start());
    while let Some(p) = queue.pop_front() {
        if p == grid.goal() {
            return true;
        }
        for mv in Move::ALL {
            let (dr, dc) = mv.delta();
            let row = p.row as isize + dr;
            let col = p.col as isize + dc;
            if row < 0 || col < 0 {
                continue;
            }
            let q = Position::new(row as usize, col as usize);
            if !grid.in_bounds(q) || grid.is_obstacle(q) {
                continue;
            }
            let idx = grid.cell_index(q);
            if !seen[idx] {
                seen[idx] = true;
                queue.push_back(q);
            }
        }
    }
    false
}

// Maze file format:
//   line 1: `height width`
//   line 2: `start_row start_col goal_row goal_col`
//   then `height` lines of `width` chars from {. # S G}
impl fmt::Display for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.height, self.width)?;
        writeln!(
            f,
            "{} {} {} {}",
            self.start.row, self.start.col, self.goal.row, self.goal.col
        )?;
        for row in 0..self.height {
            for col in 0..self.width {
                let p = Position::new(row, col);
                let ch = if p == self.start {
                    'S'
                } else if p == self.goal {
                    'G'
                } else if self.is_obstacle(p) {
                    '#'
                } else {
                    '.'
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for GridMap {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |tok: &str| {
            tok.parse::<usize>()
                .map_err(|_| GridError::Parse(format!("expected integer, got `{tok}`")))
        };
        let mut lines = s.lines();
        let dims: Vec<usize> = lines
            .next()
            .ok_or_else(|| GridError::Parse("missing dimensions line".into()))?
            .split_whitespace()
            .map(parse)
            .collect::<Result<_, _>>()?;
        let [height, width] = dims[..] else {
            return Err(GridError::Parse("dimensions line needs 2 fields".into()));
        };
        let ends: Vec<usize> = lines
            .next()
            .ok_or_else(|| GridError::Parse("missing start/goal line".into()))?
            .split_whitespace()
            .map(parse)
            .collect::<Result<_, _>>()?;
        let [sr, sc, gr, gc] = ends[..] else {
            return Err(GridError::Parse("start/goal line needs 4 fields".into()));
        };
        let start = Position::new(sr, sc);
        let goal = Position::new(gr, gc);
        let mut obstacles = vec![false; height * width];
        for row in 0..height {
            let line = lines
                .next()
                .ok_or_else(|| GridError::Parse(format!("missing grid row {row}")))?;
            if line.chars().count() != width {
                return Err(GridError::Parse(format!(
                    "row {row} has {} cells, expected {width}",
                    line.chars().count()
                )));
            }
            for (col, ch) in line.chars().enumerate() {
                let p = Position::new(row, col);
                match ch {
                    '.' => {}
                    '#' => obstacles[row * width + col] = true,
                    'S' if p == start => {}
                    'G' if p == goal => {}
                    _ => {
                        return Err(GridError::Parse(format!(
                            "unexpected `{ch}` at ({row}, {col})"
                        )))
                    }
                }
            }
        }
        GridMap::new(height, width, obstacles, start, goal)
    }
}
