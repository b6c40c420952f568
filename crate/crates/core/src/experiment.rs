//! The experimental protocol: multi-run averaging, algorithm comparisons,
//! planning-step sweeps, deterministic seeding and result persistence.
//!
//! Run i draws its maze from seed (master, "maze", i) and its agent stream
//! from (master, "agent", kind, i). Maze seeds never depend on the agent or
//! on N, so every algorithm and every sweep value sees the identical set of
//! mazes. Runs are independent and execute in parallel; results are
//! assembled in run-index order, so output is schedule-independent.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::astar::astar_shortest;
use crate::gridworld::{generate_maze, GridError, GridMap, MazeGenConfig};
use crate::heuristics::{heuristic_by_name, Heuristic};
use crate::rl::{
    greedy_rollout, run_episode, AgentConfig, AgentKind, LearnedModel, QTable, RlError,
};
use crate::rng::{derive_seed, RngStream};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("maze generation failed: {0}")]
    Maze(#[from] GridError),
    #[error("agent failure: {0}")]
    Agent(#[from] RlError),
    #[error("invalid experiment config: {0}")]
    BadConfig(String),
}

/// Full description of one experiment; results are a pure function of this.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Maze template; its `seed` field is ignored and replaced by the
    /// per-run derived seed.
    pub maze: MazeGenConfig,
    /// When set, every run uses this map instead of generating one.
    pub fixed_maze: Option<GridMap>,
    pub runs: usize,
    pub episodes: usize,
    pub kind: AgentKind,
    pub agent: AgentConfig,
    /// Heuristic registry name, only consulted for Dyna-H.
    pub heuristic: String,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.runs == 0 || self.episodes == 0 {
            return Err(ExperimentError::BadConfig(
                "runs and episodes must be at least 1".into(),
            ));
        }
        self.agent.validate()?;
        if self.kind == AgentKind::DynaH && heuristic_by_name(&self.heuristic).is_none() {
            return Err(ExperimentError::BadConfig(format!(
                "unknown heuristic `{}`",
                self.heuristic
            )));
        }
        Ok(())
    }

    pub fn maze_seed(&self, run: usize) -> u64 {
        derive_seed(self.master_seed, "maze", &[run as u64])
    }

    pub fn agent_seed(&self, run: usize) -> u64 {
        derive_seed(self.master_seed, "agent", &[self.kind.seed_tag(), run as u64])
    }
}

/// Per-episode step counts for every run, plus cross-run means.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    /// runs x episodes real step counts.
    pub per_run: Vec<Vec<f64>>,
    /// Arithmetic per-episode average across runs.
    pub mean: Vec<f64>,
    /// runs x episodes step-cap flags.
    pub capped: Vec<Vec<bool>>,
}

impl LearningCurve {
    fn from_runs(per_run: Vec<Vec<f64>>, capped: Vec<Vec<bool>>) -> Self {
        let runs = per_run.len();
        let episodes = per_run.first().map_or(0, Vec::len);
        let mean = (0..episodes)
            .map(|e| per_run.iter().map(|r| r[e]).sum::<f64>() / runs as f64)
            .collect();
        Self {
            per_run,
            mean,
            capped,
        }
    }

    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("curve has at least one episode")
    }

    /// Results CSV: header `episode,mean,run_0,...,run_{R-1}`, one row per
    /// episode, 17-significant-digit decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("episode,mean");
        for i in 0..self.per_run.len() {
            write!(out, ",run_{i}").unwrap();
        }
        out.push('\n');
        for (e, &mean) in self.mean.iter().enumerate() {
            write!(out, "{e},{}", fmt17(mean)).unwrap();
            for run in &self.per_run {
                write!(out, ",{}", fmt17(run[e])).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// 17-significant-digit decimal form; round-trips f64 exactly.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Post-training evaluation of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Steps of the epsilon=0 rollout after the final episode.
    pub greedy_length: usize,
    /// True when that rollout hit the step cap instead of the goal.
    pub greedy_capped: bool,
    /// A* optimal length for this run's maze.
    pub optimal_length: usize,
    /// Number of training episodes that hit the step cap.
    pub capped_episodes: usize,
    pub maze_seed: u64,
    pub agent_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    /// Mean steps at the final episode.
    pub final_mean_steps: f64,
    pub per_run: Vec<RunOutcome>,
}

struct SingleRun {
    steps: Vec<f64>,
    capped: Vec<bool>,
    outcome: RunOutcome,
}

fn execute_run(cfg: &ExperimentConfig, run: usize) -> Result<SingleRun, ExperimentError> {
    let maze_seed = cfg.maze_seed(run);
    let agent_seed = cfg.agent_seed(run);
    let grid = match &cfg.fixed_maze {
        Some(g) => g.clone(),
        None => generate_maze(&MazeGenConfig {
            seed: maze_seed,
            ..cfg.maze
        })?,
    };
    let heuristic: Option<Box<dyn Heuristic>> = if cfg.kind == AgentKind::DynaH {
        Some(heuristic_by_name(&cfg.heuristic).expect("validated"))
    } else {
        None
    };

    let mut q = QTable::zeros(&grid);
    let mut model = LearnedModel::empty(&grid);
    let mut rng = RngStream::from_seed(agent_seed);
    let mut steps = Vec::with_capacity(cfg.episodes);
    let mut capped = Vec::with_capacity(cfg.episodes);
    for _ in 0..cfg.episodes {
        let res = run_episode(
            cfg.kind,
            &grid,
            &mut q,
            &mut model,
            heuristic.as_deref(),
            &cfg.agent,
            &mut rng,
        )?;
        steps.push(res.steps as f64);
        capped.push(res.capped);
    }

    let rollout = greedy_rollout(&grid, &q, cfg.agent.max_episode_steps, &mut rng)?;
    let optimal = astar_shortest(&grid);
    debug_assert!(optimal.found, "generated mazes are solvable");

    Ok(SingleRun {
        outcome: RunOutcome {
            greedy_length: rollout.steps,
            greedy_capped: rollout.capped,
            optimal_length: optimal.length,
            capped_episodes: capped.iter().filter(|&&c| c).count(),
            maze_seed,
            agent_seed,
        },
        steps,
        capped,
    })
}

/// Runs the full protocol: `runs` independent runs of `episodes` episodes,
/// Q and model carried across episodes within a run and reset between runs,
/// one greedy rollout per run after training.
pub fn run_experiment(
    cfg: &ExperimentConfig,
) -> Result<(LearningCurve, RunSummary), ExperimentError> {
    cfg.validate()?;
    let results: Vec<SingleRun> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| execute_run(cfg, run))
        .collect::<Result<_, _>>()?;

    let per_run: Vec<Vec<f64>> = results.iter().map(|r| r.steps.clone()).collect();
    let capped: Vec<Vec<bool>> = results.iter().map(|r| r.capped.clone()).collect();
    let curve = LearningCurve::from_runs(per_run, capped);
    let summary = RunSummary {
        final_mean_steps: curve.final_mean(),
        per_run: results.into_iter().map(|r| r.outcome).collect(),
    };
    Ok((curve, summary))
}

/// One `run_experiment` per planning-step count, identical maze seeds
/// throughout. Results are keyed by N in the given order.
pub fn sweep_planning_steps(
    cfg: &ExperimentConfig,
    values: &[usize],
) -> Result<Vec<(usize, LearningCurve, RunSummary)>, ExperimentError> {
    if values.is_empty() {
        return Err(ExperimentError::BadConfig("empty sweep value list".into()));
    }
    values
        .iter()
        .map(|&n| {
            let variant = ExperimentConfig {
                agent: AgentConfig {
                    planning_steps: n,
                    ..cfg.agent
                },
                ..cfg.clone()
            };
            let (curve, summary) = run_experiment(&variant)?;
            Ok((n, curve, summary))
        })
        .collect()
}

/// Runs Q-learning, Dyna-Q and Dyna-H on identical maze seed sets and emits
/// aligned curves, in that fixed order.
pub fn compare_algorithms(
    cfg: &ExperimentConfig,
) -> Result<Vec<(AgentKind, LearningCurve, RunSummary)>, ExperimentError> {
    AgentKind::ALL
        .iter()
        .map(|&kind| {
            let variant = ExperimentConfig {
                kind,
                ..cfg.clone()
            };
            let (curve, summary) = run_experiment(&variant)?;
            Ok((kind, curve, summary))
        })
        .collect()
}

/// Summary text block: per-run evaluation plus the fully resolved config,
/// so result files are self-describing.
pub fn summary_text(cfg: &ExperimentConfig, summary: &RunSummary) -> String {
    let mut out = String::new();
    writeln!(out, "{{").unwrap();
    writeln!(out, "  \"agent\": \"{}\",", cfg.kind.name()).unwrap();
    writeln!(out, "  \"runs\": {},", cfg.runs).unwrap();
    writeln!(out, "  \"episodes\": {},", cfg.episodes).unwrap();
    writeln!(out, "  \"alpha\": {},", cfg.agent.alpha).unwrap();
    writeln!(out, "  \"gamma\": {},", cfg.agent.gamma).unwrap();
    writeln!(out, "  \"epsilon\": {},", cfg.agent.epsilon).unwrap();
    writeln!(out, "  \"planning_steps\": {},", cfg.agent.planning_steps).unwrap();
    writeln!(out, "  \"max_episode_steps\": {},", cfg.agent.max_episode_steps).unwrap();
    writeln!(out, "  \"heuristic\": \"{}\",", cfg.heuristic).unwrap();
    writeln!(out, "  \"master_seed\": {},", cfg.master_seed).unwrap();
    writeln!(
        out,
        "  \"maze\": {{\"height\": {}, \"width\": {}, \"start\": [{}, {}], \"goal\": [{}, {}], \"sigma\": {}, \"fixed\": {}}},",
        cfg.maze.height,
        cfg.maze.width,
        cfg.maze.start.row,
        cfg.maze.start.col,
        cfg.maze.goal.row,
        cfg.maze.goal.col,
        cfg.maze.sigma,
        cfg.fixed_maze.is_some(),
    )
    .unwrap();
    writeln!(out, "  \"final_mean_steps\": {},", fmt17(summary.final_mean_steps)).unwrap();
    writeln!(out, "  \"per_run\": [").unwrap();
    for (i, r) in summary.per_run.iter().enumerate() {
        let comma = if i + 1 < summary.per_run.len() { "," } else { "" };
        writeln!(
            out,
            "    {{\"run\": {i}, \"maze_seed\": {}, \"agent_seed\": {}, \"greedy_length\": {}, \"greedy_capped\": {}, \"optimal_length\": {}, \"capped_episodes\": {}}}{comma}",
            r.maze_seed, r.agent_seed, r.greedy_length, r.greedy_capped, r.optimal_length, r.capped_episodes,
        )
        .unwrap();
    }
    writeln!(out, "  ]").unwrap();
    writeln!(out, "}}").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::Position;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            maze: MazeGenConfig {
                height: 8,
                width: 8,
                start: Position::new(0, 0),
                goal: Position::new(7, 7),
                sigma: 0.3,
                seed: 0,
            },
            fixed_maze: None,
            runs: 3,
            episodes: 20,
            kind: AgentKind::DynaH,
            agent: AgentConfig::default(),
            heuristic: "euclidean-squared".into(),
            master_seed: 42,
        }
    }

    #[test]
    fn smallest_instance_trains_to_optimal() {
        let grid = GridMap::open(2, 2, Position::new(0, 0), Position::new(1, 1));
        let cfg = ExperimentConfig {
            fixed_maze: Some(grid),
            runs: 1,
            episodes: 30,
            ..small_cfg()
        };
        let (curve, summary) = run_experiment(&cfg).unwrap();
        assert_eq!(curve.mean.len(), 30);
        assert!(curve.mean.iter().all(|&s| s.is_finite() && s >= 1.0));
        assert_eq!(summary.per_run[0].optimal_length, 2);
        assert_eq!(summary.per_run[0].greedy_length, 2);
    }

    #[test]
    fn experiments_are_deterministic() {
        let cfg = small_cfg();
        let (a_curve, a_sum) = run_experiment(&cfg).unwrap();
        let (b_curve, b_sum) = run_experiment(&cfg).unwrap();
        assert_eq!(a_curve, b_curve);
        assert_eq!(a_sum, b_sum);
    }

    #[test]
    fn mean_matches_per_run_matrix() {
        let (curve, _) = run_experiment(&small_cfg()).unwrap();
        for (e, &m) in curve.mean.iter().enumerate() {
            let recomputed =
                curve.per_run.iter().map(|r| r[e]).sum::<f64>() / curve.per_run.len() as f64;
            assert_eq!(m, recomputed);
        }
    }

    #[test]
    fn maze_seeds_do_not_depend_on_agent() {
        let a = ExperimentConfig {
            kind: AgentKind::QLearning,
            ..small_cfg()
        };
        let b = ExperimentConfig {
            kind: AgentKind::DynaH,
            ..small_cfg()
        };
        for run in 0..5 {
            assert_eq!(a.maze_seed(run), b.maze_seed(run));
            assert_ne!(a.agent_seed(run), b.agent_seed(run));
        }
    }

    #[test]
    fn greedy_never_beats_oracle() {
        let (_, summary) = run_experiment(&small_cfg()).unwrap();
        for r in &summary.per_run {
            assert!(r.greedy_length >= r.optimal_length);
        }
    }

    #[test]
    fn sweep_n_zero_equals_plain_q_learning_curve() {
        let base = ExperimentConfig {
            kind: AgentKind::DynaQ,
            runs: 2,
            episodes: 10,
            ..small_cfg()
        };
        let swept = sweep_planning_steps(&base, &[0]).unwrap();
        let ql = ExperimentConfig {
            kind: AgentKind::QLearning,
            ..base.clone()
        };
        // Same maze seeds but per-kind agent seeds, so align them manually:
        // rerun Dyna-Q with N=0 directly and compare to the sweep result.
        let direct = run_experiment(&ExperimentConfig {
            agent: AgentConfig {
                planning_steps: 0,
                ..base.agent
            },
            ..base.clone()
        })
        .unwrap();
        assert_eq!(swept[0].1, direct.0);
        // and the Q-learning variant still sees identical mazes
        let (_, ql_sum) = run_experiment(&ql).unwrap();
        for (a, b) in swept[0].2.per_run.iter().zip(&ql_sum.per_run) {
            assert_eq!(a.maze_seed, b.maze_seed);
            assert_eq!(a.optimal_length, b.optimal_length);
        }
    }

    #[test]
    fn csv_layout() {
        let curve = LearningCurve::from_runs(
            vec![vec![4.0, 2.0], vec![6.0, 2.0]],
            vec![vec![false, false], vec![false, false]],
        );
        let csv = curve.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("episode,mean,run_0,run_1"));
        let row = lines.next().unwrap();
        assert!(row.starts_with(&format!("0,{}", fmt17(5.0))));
    }

    #[test]
    fn summary_text_is_valid_jsonish() {
        let cfg = small_cfg();
        let (_, summary) = run_experiment(&cfg).unwrap();
        let text = summary_text(&cfg, &summary);
        assert!(text.contains("\"agent\": \"dyna-h\""));
        assert!(text.contains("\"maze_seed\""));
        assert!(text.contains("\"optimal_length\""));
    }

    #[test]
    fn rejects_zero_runs() {
        let cfg = ExperimentConfig {
            runs: 0,
            ..small_cfg()
        };
        assert!(run_experiment(&cfg).is_err());
    }
}
