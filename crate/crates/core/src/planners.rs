//! Best-first grid search: A* with pluggable heuristics, and Dijkstra as A*
//! with the zero heuristic.
//!
//! The open list is a binary heap ordered by `f = g + h`, then by smaller `h`,
//! then by insertion order. Improvements are pushed as fresh entries and stale
//! ones are skipped on pop. Closed nodes are never reopened, which keeps the
//! result optimal only for consistent heuristics (Zero, Diagonal, Euclidean
//! under unit/√2 step costs). Manhattan overestimates diagonal moves and may
//! return a longer path.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::SQRT_2;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::map::GridIndex;
use crate::search_graph::SearchProblem;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    Zero,
    Manhattan,
    Diagonal,
    Euclidean,
}

impl Heuristic {
    pub fn value(self, a: GridIndex, b: GridIndex) -> f64 {
        let dx = a.col.abs_diff(b.col) as f64;
        let dy = a.row.abs_diff(b.row) as f64;
        match self {
            Heuristic::Zero => 0.0,
            Heuristic::Manhattan => dx + dy,
            Heuristic::Diagonal => (dx + dy) + (SQRT_2 - 2.0) * dx.min(dy),
            Heuristic::Euclidean => dx.hypot(dy),
        }
    }

    /// Consistent under the unit/√2 cost model.
    pub fn is_consistent(self) -> bool {
        !matches!(self, Heuristic::Manhattan)
    }

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::Zero => "zero",
            Heuristic::Manhattan => "manhattan",
            Heuristic::Diagonal => "diagonal",
            Heuristic::Euclidean => "euclidean",
        }
    }
}

impl std::str::FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "zero" => Ok(Heuristic::Zero),
            "manhattan" => Ok(Heuristic::Manhattan),
            "diagonal" => Ok(Heuristic::Diagonal),
            "euclidean" => Ok(Heuristic::Euclidean),
            other => Err(format!("unknown heuristic `{other}`")),
        }
    }
}

pub fn heuristic_value(h: Heuristic, a: GridIndex, b: GridIndex) -> f64 {
    h.value(a, b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    /// Start to goal, inclusive.
    pub path: Vec<GridIndex>,
    /// Sum of step costs along `path`, in cells.
    pub cost: f64,
    /// Nodes popped from the open list and closed.
    pub expanded: usize,
    pub expansion_order: Vec<GridIndex>,
    /// Seconds.
    pub wall_time: f64,
}

struct OpenEntry {
    f: f64,
    h: f64,
    seq: u64,
    g: f64,
    node: usize,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenEntry {}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenEntry {
    // reversed so the max-heap pops the least f, then least h, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.h.total_cmp(&self.h))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

pub fn astar(problem: &SearchProblem<'_>, h: Heuristic) -> Result<PlanResult> {
    problem.validate()?;
    let started = Instant::now();
    let grid = problem.grid;
    let n = grid.len();
    let goal = problem.goal;

    let mut best_g = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    let mut expansion_order = Vec::new();
    let mut seq = 0u64;

    let s = grid.linear(problem.start);
    best_g[s] = 0.0;
    let h0 = h.value(problem.start, goal);
    open.push(OpenEntry {
        f: h0,
        h: h0,
        seq,
        g: 0.0,
        node: s,
    });

    while let Some(q) = open.pop() {
        if closed[q.node] || q.g > best_g[q.node] {
            continue;
        }
        closed[q.node] = true;
        let qi = grid.index_of(q.node);
        expansion_order.push(qi);
        if qi == goal {
            let path = walk_parents(
                |i| parent[grid.linear(i)].map(|p| grid.index_of(p)),
                goal,
                n,
            )?;
            return Ok(PlanResult {
                path,
                cost: q.g,
                expanded: expansion_order.len(),
                expansion_order,
                wall_time: started.elapsed().as_secs_f64(),
            });
        }
        for (m, step) in problem.successors(qi) {
            let k = grid.linear(m);
            if closed[k] {
                continue;
            }
            let g = q.g + step;
            // h(m) is fixed per node, so comparing g is comparing f
            if best_g[k] <= g {
                continue;
            }
            best_g[k] = g;
            parent[k] = Some(q.node);
            let hm = h.value(m, goal);
            seq += 1;
            open.push(OpenEntry {
                f: g + hm,
                h: hm,
                seq,
                g,
                node: k,
            });
        }
    }
    Err(Error::NoPath)
}

/// A* with the zero heuristic.
pub fn dijkstra(problem: &SearchProblem<'_>) -> Result<PlanResult> {
    astar(problem, Heuristic::Zero)
}

/// Follows parent links back from `goal` and returns the path start-first.
pub fn reconstruct_path(
    parents: &HashMap<GridIndex, GridIndex>,
    goal: GridIndex,
) -> Result<Vec<GridIndex>> {
    walk_parents(|i| parents.get(&i).copied(), goal, parents.len() + 1)
}

/// `max_nodes` bounds the chain length; exceeding it means a cycle.
fn walk_parents(
    parent_of: impl Fn(GridIndex) -> Option<GridIndex>,
    goal: GridIndex,
    max_nodes: usize,
) -> Result<Vec<GridIndex>> {
    let mut path = vec![goal];
    let mut cur = goal;
    while let Some(p) = parent_of(cur) {
        if path.len() >= max_nodes {
            return Err(Error::CorruptParentChain);
        }
        path.push(p);
        cur = p;
    }
    path.reverse();
    Ok(path)
}
