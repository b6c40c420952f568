//! Tabular reinforcement learning and heuristic planning on gridworld mazes.
//!
//! Implements three agents over deterministic four-action mazes: one-step
//! Q-learning, Dyna-Q (random-sample model planning) and Dyna-H (planning
//! along worst-trajectory simulated rollouts scored by a badness heuristic),
//! plus an A* optimality oracle and a reproducible multi-run experiment
//! harness.

pub mod astar;
pub mod experiment;
pub mod gridworld;
pub mod heuristics;
pub mod rl;
pub mod rng;

pub use astar::{astar_shortest, PathResult};
pub use experiment::{
    compare_algorithms, run_experiment, sweep_planning_steps, ExperimentConfig, LearningCurve,
    RunSummary,
};
pub use gridworld::{
    generate_maze, is_solvable, step, GridError, GridMap, MazeGenConfig, Move, Position,
    StepOutcome,
};
pub use heuristics::{heuristic_by_name, Heuristic, SquaredEuclidean};
pub use rl::{
    dyna_h_plan, dyna_q_plan, epsilon_greedy, greedy_rollout, run_episode, td_update, AgentConfig,
    AgentKind, EpisodeResult, LearnedModel, QTable, RlError,
};
pub use rng::{derive_seed, RngStream};
