//! Generated maps and the reference navigation scenario.

use std::path::PathBuf;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::estimation::{Landmark, NoiseConfig};
use crate::guidance::FollowerConfig;
use crate::map::{GridIndex, MapOrigin, Occupancy, OccupancyGrid, WorldPoint};
use crate::planners::Heuristic;
use crate::sim::{Algorithm, Scenario, SensorMode};
use crate::vehicle::RobotState;
use crate::{Error, Result};

pub const DEFAULT_RESOLUTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    Empty,
    Wall,
    Random,
}

impl std::str::FromStr for FixtureKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "empty" => Ok(FixtureKind::Empty),
            "wall" => Ok(FixtureKind::Wall),
            "random" => Ok(FixtureKind::Random),
            other => Err(format!("unknown fixture kind `{other}`")),
        }
    }
}

pub fn diag2(a: f64, b: f64) -> Matrix2<f64> {
    Matrix2::from_diagonal(&Vector2::new(a, b))
}

pub fn diag3(a: f64, b: f64, c: f64) -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(a, b, c))
}

pub fn empty(width: usize, height: usize) -> Result<OccupancyGrid> {
    OccupancyGrid::filled(
        width,
        height,
        DEFAULT_RESOLUTION,
        MapOrigin::default(),
        Occupancy::Free,
    )
}

/// Vertical wall in column `width / 2` covering rows `0..=3·height/4`, open
/// above. On a 5×5 grid this is column 2, rows 0 through 3.
pub fn wall(width: usize, height: usize) -> Result<OccupancyGrid> {
    let mut g = empty(width, height)?;
    let col = width / 2;
    let top = (3 * height / 4).min(height - 1);
    for row in 0..=top {
        g.set(GridIndex::new(col, row), Occupancy::Occupied)?;
    }
    Ok(g)
}

/// Each cell Occupied with probability `density`; the four corners are
/// always Free.
pub fn random(width: usize, height: usize, density: f64, seed: u64) -> Result<OccupancyGrid> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidGrid(format!(
            "density {density} outside [0, 1]"
        )));
    }
    let mut g = empty(width, height)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in g.indices().collect::<Vec<_>>() {
        if rng.random::<f64>() < density {
            g.set(i, Occupancy::Occupied)?;
        }
    }
    for (c, r) in [
        (0, 0),
        (width - 1, 0),
        (0, height - 1),
        (width - 1, height - 1),
    ] {
        g.set(GridIndex::new(c, r), Occupancy::Free)?;
    }
    Ok(g)
}

pub fn generate(
    kind: FixtureKind,
    width: usize,
    height: usize,
    density: f64,
    seed: u64,
) -> Result<OccupancyGrid> {
    match kind {
        FixtureKind::Empty => empty(width, height),
        FixtureKind::Wall => wall(width, height),
        FixtureKind::Random => random(width, height, density, seed),
    }
}

/// Navigation scenario for the 100×100 wall map at 5 cm/cell (5 m × 5 m):
/// drive from the lower-left corner over the wall to the lower-right corner
/// with eight range-bearing landmarks. Start and goal sit on cell centers.
pub fn reference_scenario(map_path: impl Into<PathBuf>) -> Scenario {
    let landmarks = [
        (0.6, 2.0),
        (1.2, 4.6),
        (1.6, 0.8),
        (2.5, 4.6),
        (3.4, 0.8),
        (3.8, 4.6),
        (4.4, 2.0),
        (2.0, 2.6),
    ]
    .iter()
    .enumerate()
    .map(|(k, &(x, y))| Landmark {
        id: k as u32 + 1,
        x,
        y,
    })
    .collect();
    Scenario {
        map_path: map_path.into(),
        inflation_radius: 0.15,
        start_pose: RobotState::new(0.325, 0.325, 0.0),
        goal: WorldPoint::new(4.675, 0.325),
        algorithm: Algorithm::Astar,
        heuristic: Heuristic::Diagonal,
        landmarks,
        sensor_mode: SensorMode::RangeBearing,
        sensor_max_range: 2.5,
        noise: NoiseConfig::default(),
        dt: 0.1,
        max_steps: 3000,
        follower: FollowerConfig::default(),
        seed: 1,
    }
}
