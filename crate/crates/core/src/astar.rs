//! A* shortest paths over the true grid.
//!
//! Used exclusively as an optimality oracle for validating learned policies.
//! Unit edge costs, 4-connected, Euclidean-distance heuristic (admissible:
//! never exceeds the remaining 4-connected path length).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::gridworld::{GridMap, Move, Position};

/// An optimal path, or the lack of one.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub found: bool,
    /// Step count, i.e. path length in edges; 0 when not found.
    pub length: usize,
    /// start..=goal inclusive; empty when not found.
    pub path: Vec<Position>,
}

impl PathResult {
    fn not_found() -> Self {
        Self {
            found: false,
            length: 0,
            path: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OpenNode {
    f: f64,
    g: usize,
    cell: usize,
}

impl Eq for OpenNode {}

// Min-heap on f; ties on f prefer the larger g (deeper nodes first).
impl Ord for OpenNode {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .partial_cmp(&self.f)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.g.cmp(&other.g))
    }
}

impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn euclidean(a: Position, b: Position) -> f64 {
    let dr = a.row as f64 - b.row as f64;
    let dc = a.col as f64 - b.col as f64;
    (dr * dr + dc * dc).sqrt()
}

/// Returns a provably optimal 4-connected start-to-goal path, or `found =
/// false` iff the grid is unsolvable. Nodes are reopened when rediscovered
/// with a lower g.
pub fn astar_shortest(grid: &GridMap) -> PathResult {
    let cells = grid.cell_count();
    let width = grid.width();
    let start = grid.cell_index(grid.start());
    let goal_pos = grid.goal();
    let goal = grid.cell_index(goal_pos);

    let mut best_g = vec![usize::MAX; cells];
    let mut parent = vec![usize::MAX; cells];
    let mut open = BinaryHeap::new();

    best_g[start] = 0;
    open.push(OpenNode {
        f: euclidean(grid.start(), goal_pos),
        g: 0,
        cell: start,
    });

    while let Some(OpenNode { g, cell, .. }) = open.pop() {
        if g > best_g[cell] {
            continue; // stale queue entry
        }
        if cell == goal {
            let mut path = Vec::with_capacity(g + 1);
            let mut cur = cell;
            while cur != usize::MAX {
                path.push(Position::new(cur / width, cur % width));
                cur = parent[cur];
            }
            path.reverse();
            return PathResult {
                found: true,
                length: g,
                path,
            };
        }
        let p = Position::new(cell / width, cell % width);
        for mv in Move::ALL {
            let q = match mv {
                Move::Up if p.row > 0 => Position::new(p.row - 1, p.col),
                Move::Down => Position::new(p.row + 1, p.col),
                Move::Left if p.col > 0 => Position::new(p.row, p.col - 1),
                Move::Right => Position::new(p.row, p.col + 1),
                _ => continue,
            };
            if !grid.in_bounds(q) || grid.is_obstacle(q) {
                continue;
            }
            let q_cell = grid.cell_index(q);
            let tentative = g + 1;
            if tentative < best_g[q_cell] {
                best_g[q_cell] = tentative;
                parent[q_cell] = cell;
                open.push(OpenNode {
                    f: tentative as f64 + euclidean(q, goal_pos),
                    g: tentative,
                    cell: q_cell,
                });
            }
        }
    }
    PathResult::not_found()
}
