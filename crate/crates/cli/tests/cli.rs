//! End-to-end tests of the `dynah` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dynah(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynah"))
        .args(args)
        .current_dir(dir)
        .env_remove("DYNAH_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn generate_writes_solvable_maze_with_free_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynah(
        &[
            "generate", "--height", "39", "--width", "36", "--start", "1,4", "--goal", "28,34",
            "--sigma", "0.3", "--seed", "7", "--out", "maze.txt",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("maze.txt")).unwrap();
    let grid: dynah_core::GridMap = text.parse().unwrap();
    assert!(dynah_core::is_solvable(&grid));
    assert!(!grid.is_obstacle(grid.start()));
    assert!(!grid.is_obstacle(grid.goal()));
    // explicit seed given, so none is echoed
    assert!(stdout(&out).is_empty());
}

#[test]
fn generate_without_seed_records_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynah(
        &[
            "generate", "--height", "8", "--width", "8", "--start", "0,0", "--goal", "7,7",
            "--out", "maze.txt",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("seed "));
}

#[test]
fn solve_prints_corridor_length() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("corridor.txt"), "1 4\n0 0 0 3\nS..G\n").unwrap();
    let out = dynah(&["solve", "corridor.txt"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "3");
}

#[test]
fn solve_reports_unsolvable_maze() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("blocked.txt"), "1 4\n0 0 0 3\nS#.G\n").unwrap();
    let out = dynah(&["solve", "blocked.txt"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "no path");
}

#[test]
fn solve_with_path_lists_cells() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("corridor.txt"), "1 4\n0 0 0 3\nS..G\n").unwrap();
    let out = dynah(&["solve", "corridor.txt", "--path"], dir.path());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec!["3", "0 0", "0 1", "0 2", "0 3"]);
}

#[test]
fn run_emits_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynah(
        &[
            "run", "--agent", "dyna-h", "--height", "8", "--width", "8", "--start", "0,0",
            "--goal", "7,7", "--runs", "2", "--episodes", "5", "--seed", "9", "--out", "res",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("res/dyna-h.csv")).unwrap();
    assert!(csv.starts_with("episode,mean,run_0,run_1\n"));
    assert_eq!(csv.lines().count(), 6);
    let summary = fs::read_to_string(dir.path().join("res/dyna-h_summary.json")).unwrap();
    assert!(summary.contains("\"master_seed\": 9"));
    assert!(summary.contains("\"optimal_length\""));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("exp.conf"),
        "height = 8\nwidth = 8\nstart = 0,0\ngoal = 7,7\nruns = 2\nepisodes = 4\nseed = 5\n# comment\n",
    )
    .unwrap();
    let out = dynah(
        &[
            "run", "--agent", "q-learning", "--config", "exp.conf", "--episodes", "3", "--out",
            "res",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("res/q-learning.csv")).unwrap();
    // --episodes 3 overrides the config file's 4
    assert_eq!(csv.lines().count(), 4);
    let summary = fs::read_to_string(dir.path().join("res/q-learning_summary.json")).unwrap();
    assert!(summary.contains("\"master_seed\": 5"));
}

#[test]
fn env_seed_is_lowest_precedence_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dynah"))
        .args([
            "run", "--agent", "q-learning", "--height", "8", "--width", "8", "--start", "0,0",
            "--goal", "7,7", "--runs", "1", "--episodes", "2", "--out", "res",
        ])
        .current_dir(dir.path())
        .env("DYNAH_SEED", "77")
        .output()
        .unwrap();
    assert!(out.status.success());
    let summary = fs::read_to_string(dir.path().join("res/q-learning_summary.json")).unwrap();
    assert!(summary.contains("\"master_seed\": 77"));
}

#[test]
fn compare_writes_three_aligned_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynah(
        &[
            "compare", "--height", "8", "--width", "8", "--start", "0,0", "--goal", "7,7",
            "--runs", "2", "--episodes", "4", "--seed", "3", "--out", "res",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    for name in ["q-learning.csv", "dyna-q.csv", "dyna-h.csv"] {
        let csv = fs::read_to_string(dir.path().join("res").join(name)).unwrap();
        assert_eq!(csv.lines().count(), 5, "{name}");
    }
    let summary = fs::read_to_string(dir.path().join("res/summary.json")).unwrap();
    for kind in ["q-learning", "dyna-q", "dyna-h"] {
        assert!(summary.contains(&format!("\"agent\": \"{kind}\"")));
    }
}

#[test]
fn sweep_writes_one_csv_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynah(
        &[
            "sweep", "--values", "0,2", "--height", "8", "--width", "8", "--start", "0,0",
            "--goal", "7,7", "--runs", "1", "--episodes", "3", "--seed", "3", "--out", "res",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(dir.path().join("res/dyna-h_n0.csv").exists());
    assert!(dir.path().join("res/dyna-h_n2.csv").exists());
    assert!(dir.path().join("res/summary.json").exists());
}

#[test]
fn fixed_maze_is_used_for_every_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("maze.txt"), "2 3\n0 0 1 2\nS..\n..G\n").unwrap();
    let out = dynah(
        &[
            "run", "--agent", "dyna-q", "--fixed-maze", "maze.txt", "--runs", "2", "--episodes",
            "20", "--seed", "4", "--out", "res",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(dir.path().join("res/dyna-q_summary.json")).unwrap();
    // 2x3 open grid: optimal length 3 in both runs
    assert_eq!(summary.matches("\"optimal_length\": 3").count(), 2);
}

#[test]
fn bad_inputs_fail_with_diagnostic_and_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynah(
        &[
            "run", "--agent", "dyna-h", "--heuristic", "nope", "--height", "8", "--width", "8",
            "--start", "0,0", "--goal", "7,7", "--runs", "1", "--episodes", "1", "--seed", "1",
            "--out", "res",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    assert!(!dir.path().join("res").join("dyna-h.csv").exists());

    let missing = dynah(&["solve", "missing.txt"], dir.path());
    assert!(!missing.status.success());
}
