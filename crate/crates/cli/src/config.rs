//! Flag/config-file/environment resolution.
//!
//! Precedence, highest first: command-line flag, config file entry, the
//! `DYNAH_SEED` environment variable (seed only), built-in default. The
//! config file is a flat `key = value` text form mirroring the flag names;
//! `#` starts a comment.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

use dynah_core::{AgentConfig, AgentKind, ExperimentConfig, GridMap, MazeGenConfig, Position};

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                );
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("config key `{key}`: {e}")),
        }
    }
}

/// `row,col` flag syntax.
#[derive(Debug, Clone, Copy)]
pub struct PositionArg(pub Position);

impl FromStr for PositionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (row, col) = s
            .split_once(',')
            .ok_or_else(|| format!("expected `row,col`, got `{s}`"))?;
        let parse = |tok: &str| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| format!("expected integer, got `{tok}`"))
        };
        Ok(PositionArg(Position::new(parse(row)?, parse(col)?)))
    }
}

/// Common knobs shared by the experiment-running subcommands, before
/// resolution against config file and defaults.
#[derive(Debug, Clone, clap::Args)]
pub struct ExperimentFlags {
    /// Config file in flat `key = value` form mirroring these flag names
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Grid height
    #[arg(long)]
    pub height: Option<usize>,
    /// Grid width
    #[arg(long)]
    pub width: Option<usize>,
    /// Start cell as `row,col`, 0-based
    #[arg(long)]
    pub start: Option<PositionArg>,
    /// Goal cell as `row,col`, 0-based
    #[arg(long)]
    pub goal: Option<PositionArg>,
    /// Tile-noise standard deviation for maze generation
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Use this maze file for every run instead of generating mazes
    #[arg(long)]
    pub fixed_maze: Option<std::path::PathBuf>,
    /// Master seed (falls back to config file, then DYNAH_SEED)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Step size alpha
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Discount gamma
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Exploration rate epsilon
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Planning steps N
    #[arg(long)]
    pub planning_steps: Option<usize>,
    /// Per-episode real step cap
    #[arg(long)]
    pub max_episode_steps: Option<usize>,
    /// Independent runs to average over
    #[arg(long)]
    pub runs: Option<usize>,
    /// Episodes per run
    #[arg(long)]
    pub episodes: Option<usize>,
    /// Badness heuristic name (Dyna-H only)
    #[arg(long)]
    pub heuristic: Option<String>,
    /// Worker thread cap for parallel runs
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

/// Experiment defaults: the standard 39x36 scenario with alpha=0.1,
/// epsilon=0.1, N=10, 30 runs, 100 episodes, sigma=0.3, start (1,4),
/// goal (28,34); gamma=0.95.
pub struct Resolved {
    pub experiment: ExperimentConfig,
    pub jobs: Option<usize>,
    /// True when no seed came from flag, config or environment and one was
    /// drawn from OS entropy; callers must surface it in their outputs.
    pub seed_was_generated: bool,
}

impl ExperimentFlags {
    pub fn resolve(&self, kind: AgentKind) -> Result<Resolved> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };

        macro_rules! pick {
            ($flag:expr, $key:literal, $default:expr) => {
                match $flag {
                    Some(v) => v,
                    None => file.get($key)?.unwrap_or($default),
                }
            };
        }

        let (seed, seed_was_generated) = match self.seed {
            Some(s) => (s, false),
            None => match file.get::<u64>("seed")? {
                Some(s) => (s, false),
                None => match std::env::var("DYNAH_SEED") {
                    Ok(raw) => (
                        raw.parse()
                            .map_err(|_| anyhow!("DYNAH_SEED must be an integer, got `{raw}`"))?,
                        false,
                    ),
                    Err(_) => (rand::random(), true),
                },
            },
        };

        let fixed_maze_path = match &self.fixed_maze {
            Some(p) => Some(p.clone()),
            None => file
                .get::<String>("fixed-maze")?
                .map(std::path::PathBuf::from),
        };
        let fixed_maze: Option<GridMap> = match fixed_maze_path {
            Some(path) => {
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("cannot read maze file {}", path.display()))?;
                Some(
                    text.parse()
                        .map_err(|e| anyhow!("{}: {e}", path.display()))?,
                )
            }
            None => None,
        };

        let start = match self.start {
            Some(p) => p.0,
            None => file
                .get::<PositionArg>("start")?
                .map(|p| p.0)
                .unwrap_or(Position::new(1, 4)),
        };
        let goal = match self.goal {
            Some(p) => p.0,
            None => file
                .get::<PositionArg>("goal")?
                .map(|p| p.0)
                .unwrap_or(Position::new(28, 34)),
        };

        let experiment = ExperimentConfig {
            maze: MazeGenConfig {
                height: pick!(self.height, "height", 39),
                width: pick!(self.width, "width", 36),
                start,
                goal,
                sigma: pick!(self.sigma, "sigma", 0.3),
                seed: 0, // replaced per run
            },
            fixed_maze,
            runs: pick!(self.runs, "runs", 30),
            episodes: pick!(self.episodes, "episodes", 100),
            kind,
            agent: AgentConfig {
                alpha: pick!(self.alpha, "alpha", 0.1),
                gamma: pick!(self.gamma, "gamma", 0.95),
                epsilon: pick!(self.epsilon, "epsilon", 0.1),
                planning_steps: pick!(self.planning_steps, "planning-steps", 10),
                max_episode_steps: pick!(self.max_episode_steps, "max-episode-steps", 10_000),
            },
            heuristic: pick!(
                self.heuristic.clone(),
                "heuristic",
                "euclidean-squared".to_string()
            ),
            master_seed: seed,
        };
        let jobs = match self.jobs {
            Some(j) => Some(j),
            None => file.get::<usize>("jobs")?,
        };
        Ok(Resolved {
            experiment,
            jobs,
            seed_was_generated,
        })
    }
}
