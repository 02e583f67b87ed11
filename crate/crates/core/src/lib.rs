//! Grid-based path planning and localization for a differential-drive robot.
//!
//! The pipeline runs occupancy map → 8-connected search graph → Dijkstra/A*
//! → closed-loop simulation with an EKF localizer and a PID waypoint follower.
//!
//! ```no_run
//! use gridnav::{map, planners::{astar, Heuristic}, search_graph::{snap_to_free, SearchProblem}};
//! use gridnav::map::WorldPoint;
//!
//! let grid = map::load_map("maps/office.yaml").unwrap().inflate(0.15);
//! let start = snap_to_free(&grid, WorldPoint::new(0.2, 0.2)).unwrap();
//! let goal = snap_to_free(&grid, WorldPoint::new(4.5, 3.0)).unwrap();
//! let problem = SearchProblem::new(&grid, start, goal).unwrap();
//! let plan = astar(&problem, Heuristic::Diagonal).unwrap();
//! println!("cost {} after {} expansions", plan.cost, plan.expanded);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimation;
pub mod fixtures;
pub mod guidance;
pub mod map;
pub mod planners;
pub mod render;
pub mod search_graph;
pub mod sim;
pub mod vehicle;

mod matrix_serde;

pub use error::{Error, Result};
