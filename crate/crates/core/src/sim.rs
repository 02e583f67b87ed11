//! Closed-loop simulation: plan once, then per tick run guidance on the EKF
//! estimate, move the true robot with process noise, sense, filter, and check
//! for collisions against the uninflated map.
//!
//! All randomness comes from one `ChaCha8Rng` seeded with `Scenario::seed`.
//! Gaussian draws use the ziggurat `StandardNormal` sampler from `rand_distr`
//! and are correlated through a semi-definite Cholesky factor of the
//! configured covariance. Every tick consumes the same number of draws
//! whatever the noise level, so zero-noise runs are exact.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{SMatrix, SVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::estimation::{
    ekf_predict, ekf_update, ekf_update_pose, predict_measurement, BeliefState, Landmark,
    NoiseConfig, RangeBearing,
};
use crate::guidance::{at_goal, control_step, next_waypoint, FollowerConfig, FollowerState};
use crate::map::{load_map, GridIndex, OccupancyGrid, WorldPoint};
use crate::planners::{astar, dijkstra, Heuristic, PlanResult};
use crate::search_graph::{snap_to_free, SearchProblem};
use crate::vehicle::{propagate, wrap_angle, ControlInput, RobotState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Dijkstra,
    Astar,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dijkstra => "dijkstra",
            Algorithm::Astar => "astar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorMode {
    RangeBearing,
    DirectPose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Map descriptor; relative paths resolve against the scenario file's directory.
    pub map_path: PathBuf,
    pub inflation_radius: f64,
    pub start_pose: RobotState,
    pub goal: WorldPoint,
    pub algorithm: Algorithm,
    pub heuristic: Heuristic,
    pub landmarks: Vec<Landmark>,
    pub sensor_mode: SensorMode,
    pub sensor_max_range: f64,
    pub noise: NoiseConfig,
    pub dt: f64,
    pub max_steps: usize,
    pub follower: FollowerConfig,
    pub seed: u64,
}

impl Scenario {
    /// Parses and validates a scenario file.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        let mut sc = Self::from_json(&text)?;
        if sc.map_path.is_relative() {
            if let Some(dir) = path.parent() {
                sc.map_path = dir.join(&sc.map_path);
            }
        }
        Ok(sc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario =
            serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if !(self.dt > 0.0) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if self.max_steps < 1 {
            return bad("max_steps must be >= 1".into());
        }
        if !(self.sensor_max_range > 0.0) {
            return bad(format!(
                "sensor_max_range must be > 0, got {}",
                self.sensor_max_range
            ));
        }
        if !(self.inflation_radius >= 0.0) {
            return bad(format!(
                "inflation_radius must be >= 0, got {}",
                self.inflation_radius
            ));
        }
        let mut ids: Vec<u32> = self.landmarks.iter().map(|l| l.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return bad("landmark ids must be unique".into());
        }
        check_psd("noise.process_cov", &self.noise.process_cov)?;
        check_psd("noise.meas_cov", &self.noise.meas_cov)?;
        check_psd("noise.pose_meas_cov", &self.noise.pose_meas_cov)?;
        self.follower.validate()
    }
}

fn check_psd<const N: usize>(name: &str, m: &SMatrix<f64, N, N>) -> Result<()> {
    let asym = (m - m.transpose()).amax();
    if !m.iter().all(|v| v.is_finite()) || asym > 1e-12 {
        return Err(Error::InvalidScenario(format!(
            "{name} must be finite and symmetric"
        )));
    }
    if psd_factor(m).is_none() {
        return Err(Error::InvalidScenario(format!(
            "{name} must be positive semi-definite"
        )));
    }
    Ok(())
}

/// Lower-triangular `L` with `L·Lᵀ = m` for a symmetric PSD matrix; zero
/// pivots zero their column. `None` when `m` is not PSD.
fn psd_factor<const N: usize>(m: &SMatrix<f64, N, N>) -> Option<SMatrix<f64, N, N>> {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let mut l = SMatrix::<f64, N, N>::zeros();
    for j in 0..N {
        let d = m[(j, j)] - (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum::<f64>();
        if d < -tol {
            return None;
        }
        if d <= tol {
            for i in j + 1..N {
                let rest = m[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
                if rest.abs() > 1e-6 * scale {
                    return None;
                }
            }
            continue;
        }
        let root = d.sqrt();
        l[(j, j)] = root;
        for i in j + 1..N {
            let rest = m[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
            l[(i, j)] = rest / root;
        }
    }
    Some(l)
}

/// Zero-mean correlated Gaussian sampler.
struct Gaussian<const N: usize> {
    factor: SMatrix<f64, N, N>,
}

impl<const N: usize> Gaussian<N> {
    fn new(cov: &SMatrix<f64, N, N>) -> Result<Self> {
        psd_factor(cov)
            .map(|factor| Self { factor })
            .ok_or_else(|| {
                Error::InvalidScenario("covariance is not positive semi-definite".into())
            })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> SVector<f64, N> {
        let z = SVector::<f64, N>::from_fn(|_, _| StandardNormal.sample(rng));
        self.factor * z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Reached,
    Collided,
    Timeout,
    NoPath,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Reached => "reached",
            Outcome::Collided => "collided",
            Outcome::Timeout => "timeout",
            Outcome::NoPath => "no_path",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub truth: RobotState,
    pub estimate: RobotState,
    pub cov_trace: f64,
    pub control: ControlInput,
    pub measurements: Vec<RangeBearing>,
    /// Predict-only estimate driven by the same commands.
    pub dead_reckoning: RobotState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub records: Vec<StepRecord>,
    pub outcome: Outcome,
    /// Distance from the final true position to `nav_goal`, m.
    pub final_error: f64,
    pub plan: Option<PlanResult>,
    /// Waypoints handed to the follower (grid path cell centers).
    pub waypoints: Vec<WorldPoint>,
    pub nav_goal: Option<WorldPoint>,
}

pub const CSV_HEADER: &str =
    "step,true_x,true_y,true_gamma,est_x,est_y,est_gamma,cov_trace,v,omega";

impl SimTrace {
    fn no_path() -> Self {
        Self {
            records: Vec::new(),
            outcome: Outcome::NoPath,
            final_error: f64::NAN,
            plan: None,
            waypoints: Vec::new(),
            nav_goal: None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.step,
                r.truth.x,
                r.truth.y,
                r.truth.gamma,
                r.estimate.x,
                r.estimate.y,
                r.estimate.gamma,
                r.cov_trace,
                r.control.v,
                r.control.omega
            );
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    fn rmse(&self, pick: impl Fn(&StepRecord) -> RobotState) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let sum: f64 = self
            .records
            .iter()
            .map(|r| {
                let e = pick(r);
                (e.x - r.truth.x).powi(2) + (e.y - r.truth.y).powi(2)
            })
            .sum();
        (sum / self.records.len() as f64).sqrt()
    }

    /// Position RMSE of the EKF mean against truth over all steps.
    pub fn ekf_rmse(&self) -> f64 {
        self.rmse(|r| r.estimate)
    }

    pub fn dead_reckoning_rmse(&self) -> f64 {
        self.rmse(|r| r.dead_reckoning)
    }

    /// Largest absolute EKF-vs-truth state difference over the run.
    pub fn max_estimate_divergence(&self) -> f64 {
        self.records
            .iter()
            .map(|r| {
                (r.estimate.x - r.truth.x)
                    .abs()
                    .max((r.estimate.y - r.truth.y).abs())
                    .max(wrap_angle(r.estimate.gamma - r.truth.gamma).abs())
            })
            .fold(0.0, f64::max)
    }

    /// True if any recorded true position lies outside a Free cell of `grid`.
    pub fn any_collision(&self, grid: &OccupancyGrid) -> bool {
        self.records.iter().any(|r| {
            grid.world_to_grid(r.truth.position())
                .map(|i| !grid.is_free(i))
                .unwrap_or(true)
        })
    }
}

fn plan_with(
    problem: &SearchProblem<'_>,
    algorithm: Algorithm,
    h: Heuristic,
) -> Result<PlanResult> {
    match algorithm {
        Algorithm::Dijkstra => dijkstra(problem),
        Algorithm::Astar => astar(problem, h),
    }
}

/// Snaps both endpoints onto Free cells of the planning grid.
pub fn snap_endpoints(
    grid: &OccupancyGrid,
    start: WorldPoint,
    goal: WorldPoint,
) -> Result<(GridIndex, GridIndex)> {
    Ok((snap_to_free(grid, start)?, snap_to_free(grid, goal)?))
}

pub fn run_scenario(sc: &Scenario) -> Result<SimTrace> {
    sc.validate()?;
    let truth_grid = load_map(&sc.map_path)?;
    run_on_grid(sc, &truth_grid)
}

/// Runs a scenario against an already loaded (uninflated) map.
pub fn run_on_grid(sc: &Scenario, truth_grid: &OccupancyGrid) -> Result<SimTrace> {
    let planning = truth_grid.inflate(sc.inflation_radius);
    let (start_cell, goal_cell) = match snap_endpoints(&planning, sc.start_pose.position(), sc.goal)
    {
        Ok(cells) => cells,
        Err(Error::NoFreeCell) => return Ok(SimTrace::no_path()),
        Err(e) => return Err(e),
    };
    let problem = SearchProblem::new(&planning, start_cell, goal_cell)?;
    let plan = match plan_with(&problem, sc.algorithm, sc.heuristic) {
        Ok(p) => p,
        Err(Error::NoPath) => return Ok(SimTrace::no_path()),
        Err(e) => return Err(e),
    };

    let mut waypoints = plan
        .path
        .iter()
        .map(|&i| planning.grid_to_world(i))
        .collect::<Result<Vec<_>>>()?;
    // keep the exact requested goal when it was not snapped elsewhere
    if planning.world_to_grid(sc.goal).ok() == Some(goal_cell) {
        *waypoints.last_mut().expect("path is non-empty") = sc.goal;
    }
    let nav_goal = *waypoints.last().expect("path is non-empty");

    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let process = Gaussian::new(&sc.noise.process_cov)?;
    let range_bearing = Gaussian::new(&sc.noise.meas_cov)?;
    let pose = Gaussian::new(&sc.noise.pose_meas_cov)?;

    let mut landmarks = sc.landmarks.clone();
    landmarks.sort_by_key(|l| l.id);

    let mut truth = sc.start_pose;
    let mut belief = BeliefState::certain(sc.start_pose);
    let mut dead_reckoning = sc.start_pose;
    let mut follower = FollowerState::default();
    let mut records = Vec::new();
    let mut outcome = Outcome::Timeout;

    for step in 0..sc.max_steps {
        let (target, fs) = next_waypoint(&waypoints, belief.mean, follower, sc.follower.lookahead)?;
        let (u, fs) = control_step(belief.mean, target, nav_goal, fs, &sc.follower, sc.dt)?;
        follower = fs;

        let moved = propagate(truth, u, sc.dt)?;
        let w = process.sample(&mut rng);
        truth = RobotState::new(moved.x + w[0], moved.y + w[1], moved.gamma + w[2]);

        belief = ekf_predict(&belief, u, sc.dt, &sc.noise)?;
        dead_reckoning = propagate(dead_reckoning, u, sc.dt)?;

        let mut measurements = Vec::new();
        match sc.sensor_mode {
            SensorMode::RangeBearing => {
                for lm in &landmarks {
                    if truth.position().distance(&WorldPoint::new(lm.x, lm.y)) > sc.sensor_max_range
                    {
                        continue;
                    }
                    let Ok(clean) = predict_measurement(truth, *lm) else {
                        continue;
                    };
                    let n = range_bearing.sample(&mut rng);
                    let z = RangeBearing {
                        landmark_id: lm.id,
                        r: (clean.r + n[0]).max(0.0),
                        b: wrap_angle(clean.b + n[1]),
                    };
                    belief = skip_unusable(ekf_update(&belief, &z, *lm, &sc.noise), belief)?;
                    measurements.push(z);
                }
            }
            SensorMode::DirectPose => {
                let n = pose.sample(&mut rng);
                let observed = RobotState::new(truth.x + n[0], truth.y + n[1], truth.gamma + n[2]);
                belief = skip_unusable(ekf_update_pose(&belief, observed, &sc.noise), belief)?;
            }
        }

        records.push(StepRecord {
            step,
            truth,
            estimate: belief.mean,
            cov_trace: belief.cov.trace(),
            control: u,
            measurements,
            dead_reckoning,
        });

        let collided = truth_grid
            .world_to_grid(truth.position())
            .map(|i| !truth_grid.is_free(i))
            .unwrap_or(true);
        if collided {
            outcome = Outcome::Collided;
            break;
        }
        if at_goal(truth, nav_goal, sc.follower.goal_tolerance) {
            outcome = Outcome::Reached;
            break;
        }
    }

    Ok(SimTrace {
        final_error: truth.position().distance(&nav_goal),
        records,
        outcome,
        plan: Some(plan),
        waypoints,
        nav_goal: Some(nav_goal),
    })
}

/// A measurement that cannot be linearized (robot estimate on the landmark,
/// or a singular innovation such as zero prior and zero sensor noise) carries
/// no usable correction and is dropped.
fn skip_unusable(updated: Result<BeliefState>, prior: BeliefState) -> Result<BeliefState> {
    match updated {
        Ok(b) => Ok(b),
        Err(Error::DegenerateRange | Error::SingularInnovation) => Ok(prior),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub heuristic: Heuristic,
    pub dijkstra: PlanResult,
    pub astar: PlanResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlannerSummary {
    pub cost: f64,
    pub expanded: usize,
    pub runtime_ms: f64,
    pub path_len: usize,
}

impl From<&PlanResult> for PlannerSummary {
    fn from(p: &PlanResult) -> Self {
        Self {
            cost: p.cost,
            expanded: p.expanded,
            runtime_ms: p.wall_time * 1e3,
            path_len: p.path.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub dijkstra: PlannerSummary,
    pub astar: PlannerSummary,
    pub heuristic: Heuristic,
    pub expanded_ratio: f64,
    pub cost_delta: f64,
    pub time_ratio: f64,
}

impl Comparison {
    /// A* expansions over Dijkstra expansions.
    pub fn expanded_ratio(&self) -> f64 {
        self.astar.expanded as f64 / self.dijkstra.expanded as f64
    }

    /// A* cost minus Dijkstra cost.
    pub fn cost_delta(&self) -> f64 {
        self.astar.cost - self.dijkstra.cost
    }

    pub fn time_ratio(&self) -> f64 {
        if self.dijkstra.wall_time > 0.0 {
            self.astar.wall_time / self.dijkstra.wall_time
        } else {
            f64::NAN
        }
    }

    pub fn record(&self) -> ComparisonRecord {
        ComparisonRecord {
            dijkstra: (&self.dijkstra).into(),
            astar: (&self.astar).into(),
            heuristic: self.heuristic,
            expanded_ratio: self.expanded_ratio(),
            cost_delta: self.cost_delta(),
            time_ratio: self.time_ratio(),
        }
    }
}

/// Runs Dijkstra and A* on the same problem, concurrently. Both fail with
/// `NoPath` together since they search the same graph.
pub fn compare_planners(problem: &SearchProblem<'_>, heuristic: Heuristic) -> Result<Comparison> {
    let (d, a) = std::thread::scope(|s| {
        let d = s.spawn(|| dijkstra(problem));
        let a = s.spawn(|| astar(problem, heuristic));
        (
            d.join().expect("dijkstra thread"),
            a.join().expect("astar thread"),
        )
    });
    Ok(Comparison {
        heuristic,
        dijkstra: d?,
        astar: a?,
    })
}

/// Compares planners on a scenario's map and endpoints.
pub fn compare_scenario(sc: &Scenario) -> Result<Comparison> {
    let planning = load_map(&sc.map_path)?.inflate(sc.inflation_radius);
    let (start, goal) = match snap_endpoints(&planning, sc.start_pose.position(), sc.goal) {
        Err(Error::NoFreeCell) => return Err(Error::NoPath),
        other => other?,
    };
    compare_planners(&SearchProblem::new(&planning, start, goal)?, sc.heuristic)
}
