//! Tabular value learning and Dyna planning.
//!
//! The Q-table and learned model are dense over one grid's state space, so
//! the hot loops are array lookups. All stochastic choices draw from an
//! explicit [`RngStream`]; the draw order within a step is fixed (action
//! draw, then tie-break draws, then planning draws) so runs replay exactly.

use std::fmt::Write as _;

use thiserror::Error;

use crate::gridworld::{step, GridMap, Move, Position};
use crate::heuristics::{heuristic_action, Heuristic};
use crate::rng::RngStream;

#[derive(Debug, Error, PartialEq)]
pub enum RlError {
    #[error("no legal moves to choose from")]
    EmptyLegalSet,
    #[error("reward must be finite, got {0}")]
    NonFiniteReward(f64),
    #[error("cannot sample from an empty model")]
    EmptyModel,
    #[error("invalid agent config: {0}")]
    BadConfig(String),
    #[error("environment fault: {0}")]
    Environment(#[from] crate::gridworld::GridError),
}

/// Which learning algorithm drives an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentKind {
    QLearning,
    DynaQ,
    DynaH,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::QLearning, AgentKind::DynaQ, AgentKind::DynaH];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::QLearning => "q-learning",
            AgentKind::DynaQ => "dyna-q",
            AgentKind::DynaH => "dyna-h",
        }
    }

    /// Stable numeric tag used in seed derivation.
    pub fn seed_tag(self) -> u64 {
        match self {
            AgentKind::QLearning => 0,
            AgentKind::DynaQ => 1,
            AgentKind::DynaH => 2,
        }
    }
}

impl std::str::FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "q-learning" | "qlearning" => Ok(AgentKind::QLearning),
            "dyna-q" | "dynaq" => Ok(AgentKind::DynaQ),
            "dyna-h" | "dynah" => Ok(AgentKind::DynaH),
            other => Err(format!("unknown agent kind `{other}`")),
        }
    }
}

/// Learning parameters. Defaults mirror the classic Dyna-maze setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentConfig {
    /// Step size alpha in (0, 1].
    pub alpha: f64,
    /// Discount gamma in [0, 1).
    pub gamma: f64,
    /// Exploration rate epsilon in [0, 1].
    pub epsilon: f64,
    /// Planning budget N per real step.
    pub planning_steps: usize,
    /// Hard cap on real steps per episode.
    pub max_episode_steps: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 0.95,
            epsilon: 0.1,
            planning_steps: 10,
            max_episode_steps: 10_000,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), RlError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(RlError::BadConfig(format!("alpha {} not in (0,1]", self.alpha)));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(RlError::BadConfig(format!("gamma {} not in [0,1)", self.gamma)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon <= 1.0) {
            return Err(RlError::BadConfig(format!(
                "epsilon {} not in [0,1]",
                self.epsilon
            )));
        }
        if self.max_episode_steps == 0 {
            return Err(RlError::BadConfig("max_episode_steps must be positive".into()));
        }
        Ok(())
    }
}

/// Dense state-action value table over one grid's state space. Unseen pairs
/// read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    height: usize,
    width: usize,
    values: Vec<[f64; 4]>,
}

impl QTable {
    pub fn zeros(grid: &GridMap) -> Self {
        Self {
            height: grid.height(),
            width: grid.width(),
            values: vec![[0.0; 4]; grid.cell_count()],
        }
    }

    fn cell(&self, s: Position) -> usize {
        debug_assert!(s.row < self.height && s.col < self.width);
        s.row * self.width + s.col
    }

    pub fn get(&self, s: Position, a: Move) -> f64 {
        self.values[self.cell(s)][a.index()]
    }

    pub fn set(&mut self, s: Position, a: Move, v: f64) {
        let cell = self.cell(s);
        self.values[cell][a.index()] = v;
    }

    /// Max action value at `s`, the bootstrap term of the TD target.
    pub fn max_value(&self, s: Position) -> f64 {
        let row = &self.values[self.cell(s)];
        row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Text dump: one line per nonzero entry, `row col move value`, sorted by
    /// (row, col, move order), values in 17-significant-digit form so dumps
    /// compare byte-for-byte across platforms.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for row in 0..self.height {
            for col in 0..self.width {
                for mv in Move::ALL {
                    let v = self.values[row * self.width + col][mv.index()];
                    if v != 0.0 {
                        writeln!(out, "{row} {col} {} {:.16e}", mv.name(), v).unwrap();
                    }
                }
            }
        }
        out
    }
}

/// Memory of experienced deterministic transitions:
/// (state, action) -> (next state, reward, terminal).
#[derive(Debug, Clone, PartialEq)]
pub struct LearnedModel {
    height: usize,
    width: usize,
    entries: Vec<Option<(Position, f64, bool)>>,
    /// Insertion-ordered observed keys, the support for uniform sampling.
    observed: Vec<(Position, Move)>,
}

impl LearnedModel {
    pub fn empty(grid: &GridMap) -> Self {
        Self {
            height: grid.height(),
            width: grid.width(),
            entries: vec![None; grid.cell_count() * 4],
            observed: Vec::new(),
        }
    }

    fn slot(&self, s: Position, a: Move) -> usize {
        (s.row * self.width + s.col) * 4 + a.index()
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    pub fn len(&self) -> usize {
        self.observed.len()
    }

    /// Records an experienced transition; re-recording a pair overwrites it.
    pub fn record(&mut self, s: Position, a: Move, next: Position, reward: f64, terminal: bool) {
        let slot = self.slot(s, a);
        if self.entries[slot].is_none() {
            self.observed.push((s, a));
        }
        self.entries[slot] = Some((next, reward, terminal));
    }

    /// The stored prediction, or `None` if the pair was never experienced.
    pub fn query(&self, s: Position, a: Move) -> Option<(Position, f64, bool)> {
        self.entries[self.slot(s, a)]
    }

    /// True if any action is modeled at `s`.
    pub fn has_state(&self, s: Position) -> bool {
        Move::ALL.iter().any(|&a| self.query(s, a).is_some())
    }

    /// Uniform draw over the observed (state, action) keys.
    pub fn sample_observed(&self, rng: &mut RngStream) -> Result<(Position, Move), RlError> {
        if self.observed.is_empty() {
            return Err(RlError::EmptyModel);
        }
        Ok(self.observed[rng.index(self.observed.len())])
    }
}

/// Epsilon-greedy action selection with uniform random tie-breaking.
///
/// Draw order is fixed: one explore/exploit draw, then (explore) one index
/// draw, or (exploit) one tie-break draw only when several moves tie at the
/// maximum.
pub fn epsilon_greedy(
    q: &QTable,
    s: Position,
    legal: &[Move],
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<Move, RlError> {
    if legal.is_empty() {
        return Err(RlError::EmptyLegalSet);
    }
    if rng.uniform() < epsilon {
        return Ok(legal[rng.index(legal.len())]);
    }
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<Move> = Vec::with_capacity(legal.len());
    for &mv in legal {
        let v = q.get(s, mv);
        if v > best {
            best = v;
            ties.clear();
            ties.push(mv);
        } else if v == best {
            ties.push(mv);
        }
    }
    Ok(if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.index(ties.len())]
    })
}

/// One-step TD update:
/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)),
/// with the bootstrap term taken as 0 on terminal transitions.
pub fn td_update(
    q: &mut QTable,
    s: Position,
    a: Move,
    r: f64,
    s_next: Position,
    terminal: bool,
    alpha: f64,
    gamma: f64,
) -> Result<(), RlError> {
    if !r.is_finite() {
        return Err(RlError::NonFiniteReward(r));
    }
    let bootstrap = if terminal { 0.0 } else { q.max_value(s_next) };
    let old = q.get(s, a);
    q.set(s, a, old + alpha * (r + gamma * bootstrap - old));
    Ok(())
}

/// Dyna-Q planning: N random-sample one-step Q-planning updates from the
/// learned model. A no-op while the model is empty.
pub fn dyna_q_plan(
    q: &mut QTable,
    model: &LearnedModel,
    cfg: &AgentConfig,
    rng: &mut RngStream,
) -> Result<(), RlError> {
    if model.is_empty() {
        return Ok(());
    }
    for _ in 0..cfg.planning_steps {
        let (s, a) = model.sample_observed(rng)?;
        let (s_next, r, terminal) = model.query(s, a).expect("sampled key must be modeled");
        td_update(q, s, a, r, s_next, terminal, cfg.alpha, cfg.gamma)?;
    }
    Ok(())
}

/// Dyna-H planning: walks a simulated cursor from the agent's current state,
/// each step simulating the worst modeled action under the heuristic. When
/// the cursor reaches a state with no modeled actions, it jumps to a random
/// observed pair instead, which is what lets simulated trajectories teleport
/// and pass through walls. A no-op while the model is empty.
pub fn dyna_h_plan(
    q: &mut QTable,
    model: &LearnedModel,
    heuristic: &dyn Heuristic,
    s_start: Position,
    goal: Position,
    cfg: &AgentConfig,
    rng: &mut RngStream,
) -> Result<(), RlError> {
    if model.is_empty() {
        return Ok(());
    }
    let mut cursor = s_start;
    for _ in 0..cfg.planning_steps {
        let (s, a) = match heuristic_action(cursor, heuristic, model, goal, rng) {
            Some(a) => (cursor, a),
            None => model.sample_observed(rng)?,
        };
        let (s_next, r, terminal) = model.query(s, a).expect("chosen pair must be modeled");
        td_update(q, s, a, r, s_next, terminal, cfg.alpha, cfg.gamma)?;
        cursor = s_next;
    }
    Ok(())
}

/// What one real episode produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeResult {
    /// Real environment steps taken.
    pub steps: usize,
    /// True if the step cap ended the episode before the goal.
    pub capped: bool,
}

/// Runs one real episode from the grid's start cell, learning in place.
///
/// Per real step: epsilon-greedy action over all four moves, environment
/// step, TD update, then (for the Dyna variants) model recording and the
/// planning routine from the agent's new state. Q-learning keeps no model.
pub fn run_episode(
    kind: AgentKind,
    grid: &GridMap,
    q: &mut QTable,
    model: &mut LearnedModel,
    heuristic: Option<&dyn Heuristic>,
    cfg: &AgentConfig,
    rng: &mut RngStream,
) -> Result<EpisodeResult, RlError> {
    cfg.validate()?;
    if kind == AgentKind::DynaH && heuristic.is_none() {
        return Err(RlError::BadConfig("Dyna-H requires a heuristic".into()));
    }
    let mut s = grid.start();
    let mut steps = 0usize;
    loop {
        let a = epsilon_greedy(q, s, &Move::ALL, cfg.epsilon, rng)?;
        let out = step(grid, s, a)?;
        steps += 1;
        td_update(q, s, a, out.reward, out.next, out.terminal, cfg.alpha, cfg.gamma)?;
        match kind {
            AgentKind::QLearning => {}
            AgentKind::DynaQ => {
                model.record(s, a, out.next, out.reward, out.terminal);
                dyna_q_plan(q, model, cfg, rng)?;
            }
            AgentKind::DynaH => {
                model.record(s, a, out.next, out.reward, out.terminal);
                dyna_h_plan(
                    q,
                    model,
                    heuristic.expect("checked above"),
                    out.next,
                    grid.goal(),
                    cfg,
                    rng,
                )?;
            }
        }
        if out.terminal {
            return Ok(EpisodeResult { steps, capped: false });
        }
        if steps >= cfg.max_episode_steps {
            return Ok(EpisodeResult { steps, capped: true });
        }
        s = out.next;
    }
}

/// Pure-exploitation rollout from start under the current Q-table; no
/// learning. Returns the step count and whether the cap cut it short.
pub fn greedy_rollout(
    grid: &GridMap,
    q: &QTable,
    max_steps: usize,
    rng: &mut RngStream,
) -> Result<EpisodeResult, RlError> {
    let mut s = grid.start();
    let mut steps = 0usize;
    while steps < max_steps {
        let a = epsilon_greedy(q, s, &Move::ALL, 0.0, rng)?;
        let out = step(grid, s, a)?;
        steps += 1;
        if out.terminal {
            return Ok(EpisodeResult { steps, capped: false });
        }
        s = out.next;
    }
    Ok(EpisodeResult {
        steps: max_steps,
        capped: true,
    })
}
