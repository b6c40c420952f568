//! Command-line front door: maze generation, single-agent runs, algorithm
//! comparison, planning-step sweeps, A* solving and plot-ready CSV export.
//!
//! All output files are written atomically (write-then-rename) and embed the
//! fully resolved configuration, so identical invocations produce byte-
//! identical, self-describing results.

mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use dynah_core::experiment::summary_text;
use dynah_core::{
    astar_shortest, compare_algorithms, generate_maze, run_experiment, sweep_planning_steps,
    AgentKind, ExperimentConfig, GridMap, LearningCurve, MazeGenConfig, RunSummary,
};

use config::{ExperimentFlags, PositionArg, Resolved};

#[derive(Parser)]
#[command(name = "dynah", version, about = "Gridworld maze agents: Q-learning, Dyna-Q and Dyna-H, with an A* oracle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random solvable maze and write it as a maze file
    Generate {
        #[arg(long, default_value_t = 39)]
        height: usize,
        #[arg(long, default_value_t = 36)]
        width: usize,
        /// Start cell as `row,col`, 0-based
        #[arg(long, default_value = "1,4")]
        start: PositionArg,
        /// Goal cell as `row,col`, 0-based
        #[arg(long, default_value = "28,34")]
        goal: PositionArg,
        #[arg(long, default_value_t = 0.3)]
        sigma: f64,
        /// Generation seed; drawn from OS entropy (and printed) when omitted
        #[arg(long)]
        seed: Option<u64>,
        /// Output maze file
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the optimal path length (and path) for a maze file
    Solve {
        /// Maze file to solve
        maze: PathBuf,
        /// Also print the path cells
        #[arg(long)]
        path: bool,
    },
    /// Train one agent and write its learning curve CSV plus a summary
    Run {
        /// Agent: q-learning, dyna-q or dyna-h
        #[arg(long)]
        agent: AgentKindArg,
        #[command(flatten)]
        flags: ExperimentFlags,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all three agents on identical maze sets; one CSV each
    Compare {
        #[command(flatten)]
        flags: ExperimentFlags,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep Dyna-H over planning-step counts; one CSV per N
    Sweep {
        /// Comma-separated planning-step counts
        #[arg(long, value_delimiter = ',', default_value = "1,5,10,25")]
        values: Vec<usize>,
        /// Agent to sweep (defaults to dyna-h)
        #[arg(long, default_value = "dyna-h")]
        agent: AgentKindArg,
        #[command(flatten)]
        flags: ExperimentFlags,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy)]
struct AgentKindArg(AgentKind);

impl std::str::FromStr for AgentKindArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(AgentKindArg)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            height,
            width,
            start,
            goal,
            sigma,
            seed,
            out,
        } => {
            let (seed, generated) = match seed {
                Some(s) => (s, false),
                None => (rand::random(), true),
            };
            let cfg = MazeGenConfig {
                height,
                width,
                start: start.0,
                goal: goal.0,
                sigma,
                seed,
            };
            let grid = generate_maze(&cfg)?;
            write_atomic(&out, &grid.to_string())?;
            if generated {
                println!("seed {seed}");
            }
            Ok(())
        }
        Command::Solve { maze, path } => {
            let text = fs::read_to_string(&maze)
                .with_context(|| format!("cannot read maze file {}", maze.display()))?;
            let grid: GridMap = text.parse().map_err(|e| anyhow!("{}: {e}", maze.display()))?;
            let res = astar_shortest(&grid);
            if !res.found {
                println!("no path");
                return Ok(());
            }
            println!("{}", res.length);
            if path {
                for p in &res.path {
                    println!("{} {}", p.row, p.col);
                }
            }
            Ok(())
        }
        Command::Run { agent, flags, out } => {
            let resolved = flags.resolve(agent.0)?;
            with_jobs(resolved.jobs, || {
                let (curve, summary) = run_experiment(&resolved.experiment)?;
                fs::create_dir_all(&out)?;
                write_variant(&out, agent.0.name(), &resolved.experiment, &curve, &summary)?;
                announce_seed(&resolved);
                Ok(())
            })
        }
        Command::Compare { flags, out } => {
            let resolved = flags.resolve(AgentKind::QLearning)?;
            with_jobs(resolved.jobs, || {
                let results = compare_algorithms(&resolved.experiment)?;
                fs::create_dir_all(&out)?;
                let mut combined = String::new();
                for (kind, curve, summary) in &results {
                    let cfg = ExperimentConfig {
                        kind: *kind,
                        ..resolved.experiment.clone()
                    };
                    write_csv(&out, &format!("{}.csv", kind.name()), curve)?;
                    combined.push_str(&summary_text(&cfg, summary));
                }
                write_atomic(&out.join("summary.json"), &combined)?;
                announce_seed(&resolved);
                Ok(())
            })
        }
        Command::Sweep {
            values,
            agent,
            flags,
            out,
        } => {
            if values.is_empty() {
                return Err(anyhow!("--values must list at least one planning-step count"));
            }
            let resolved = flags.resolve(agent.0)?;
            with_jobs(resolved.jobs, || {
                let results = sweep_planning_steps(&resolved.experiment, &values)?;
                fs::create_dir_all(&out)?;
                let mut combined = String::new();
                for (n, curve, summary) in &results {
                    let cfg = ExperimentConfig {
                        agent: dynah_core::AgentConfig {
                            planning_steps: *n,
                            ..resolved.experiment.agent
                        },
                        ..resolved.experiment.clone()
                    };
                    write_csv(&out, &format!("{}_n{n}.csv", agent.0.name()), curve)?;
                    combined.push_str(&summary_text(&cfg, summary));
                }
                write_atomic(&out.join("summary.json"), &combined)?;
                announce_seed(&resolved);
                Ok(())
            })
        }
    }
}

fn with_jobs(jobs: Option<usize>, body: impl FnOnce() -> Result<()> + Send) -> Result<()> {
    match jobs {
        None => body(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("cannot build worker pool")?;
            pool.install(body)
        }
    }
}

fn announce_seed(resolved: &Resolved) {
    if resolved.seed_was_generated {
        println!("seed {}", resolved.experiment.master_seed);
    }
}

fn write_variant(
    dir: &Path,
    name: &str,
    cfg: &ExperimentConfig,
    curve: &LearningCurve,
    summary: &RunSummary,
) -> Result<()> {
    write_csv(dir, &format!("{name}.csv"), curve)?;
    write_atomic(&dir.join(format!("{name}_summary.json")), &summary_text(cfg, summary))?;
    Ok(())
}

fn write_csv(dir: &Path, file: &str, curve: &LearningCurve) -> Result<()> {
    write_atomic(&dir.join(file), &curve.to_csv())
}

/// Write-then-rename so partial outputs are never left behind.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .with_context(|| format!("cannot create temp file next to {}", path.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
