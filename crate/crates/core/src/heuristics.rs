//! Badness scoring for the heuristic planning loop.
//!
//! A heuristic guesses how bad an action is at a state; the planner simulates
//! the worst-scoring modeled action. Scores only consult the learned model,
//! never the true grid, so the planner stays model-free with respect to the
//! environment.

use crate::gridworld::{Move, Position};
use crate::rl::LearnedModel;
use crate::rng::RngStream;

/// A badness scorer. Returns `None` exactly when the transition is unmodeled
/// (the score needs the model's predicted successor); otherwise a finite
/// non-negative score.
pub trait Heuristic: Sync {
    fn badness(&self, s: Position, a: Move, model: &LearnedModel, goal: Position) -> Option<f64>;

    fn name(&self) -> &'static str;
}

/// Squared Euclidean distance of the model-predicted successor from the goal.
/// The square is kept un-rooted: argmax is unaffected and grid arithmetic
/// stays exact.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredEuclidean;

impl Heuristic for SquaredEuclidean {
    fn badness(&self, s: Position, a: Move, model: &LearnedModel, goal: Position) -> Option<f64> {
        let (next, _, _) = model.query(s, a)?;
        let dr = next.row as f64 - goal.row as f64;
        let dc = next.col as f64 - goal.col as f64;
        Some(dr * dr + dc * dc)
    }

    fn name(&self) -> &'static str {
        "euclidean-squared"
    }
}

/// City-block distance variant; interface-ready, not part of the standard
/// experiment protocol.
#[derive(Debug, Clone, Copy, Default)]
pub struct Manhattan;

impl Heuristic for Manhattan {
    fn badness(&self, s: Position, a: Move, model: &LearnedModel, goal: Position) -> Option<f64> {
        let (next, _, _) = model.query(s, a)?;
        let dr = (next.row as f64 - goal.row as f64).abs();
        let dc = (next.col as f64 - goal.col as f64).abs();
        Some(dr + dc)
    }

    fn name(&self) -> &'static str {
        "manhattan"
    }
}

/// Looks a heuristic up by its config-file name.
pub fn heuristic_by_name(name: &str) -> Option<Box<dyn Heuristic>> {
    match name {
        "euclidean-squared" => Some(Box::new(SquaredEuclidean)),
        "manhattan" => Some(Box::new(Manhattan)),
        _ => None,
    }
}

/// The worst modeled action at `s`: an argmax of badness over the modeled
/// moves, ties broken uniformly. `None` when no move at `s` is modeled,
/// which triggers the planner's random-jump fallback.
pub fn heuristic_action(
    s: Position,
    heuristic: &dyn Heuristic,
    model: &LearnedModel,
    goal: Position,
    rng: &mut RngStream,
) -> Option<Move> {
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<Move> = Vec::with_capacity(4);
    for mv in Move::ALL {
        let Some(score) = heuristic.badness(s, mv, model, goal) else {
            continue;
        };
        if score > best {
            best = score;
            ties.clear();
            ties.push(mv);
        } else if score == best {
            ties.push(mv);
        }
    }
    match ties.len() {
        0 => None,
        1 => Some(ties[0]),
        n => Some(ties[rng.index(n)]),
    }
}
