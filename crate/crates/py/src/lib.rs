//! Python bindings for the gridnav planning and localization toolkit.

use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gridnav::estimation::{self, BeliefState, Landmark, NoiseConfig, RangeBearing};
use gridnav::fixtures;
use gridnav::map::{self, GridIndex, OccupancyGrid, WorldPoint};
use gridnav::planners::{self, Heuristic};
use gridnav::search_graph::{snap_to_free, SearchProblem};
use gridnav::sim::{self, Scenario};
use gridnav::vehicle::{self, ControlInput, RobotState};
use gridnav::Error;

create_exception!(pygridnav, NoPathError, pyo3::exceptions::PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NoPath | Error::NoFreeCell => NoPathError::new_err(e.to_string()),
        Error::Io(_) | Error::MissingFile(_) => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

type Cell = (usize, usize);
type Pose = (f64, f64, f64);
type Mat = Vec<Vec<f64>>;

fn rows<const R: usize, const C: usize>(m: &nalgebra::SMatrix<f64, R, C>) -> Mat {
    (0..R)
        .map(|i| (0..C).map(|j| m[(i, j)]).collect())
        .collect()
}

fn matrix3(m: &Mat) -> PyResult<nalgebra::Matrix3<f64>> {
    if m.len() != 3 || m.iter().any(|r| r.len() != 3) {
        return Err(PyValueError::new_err("expected a 3x3 nested list"));
    }
    Ok(nalgebra::Matrix3::from_fn(|i, j| m[i][j]))
}

fn state((x, y, g): Pose) -> RobotState {
    RobotState::new(x, y, g)
}

fn pose(s: RobotState) -> Pose {
    (s.x, s.y, s.gamma)
}

fn heuristic(name: &str) -> PyResult<Heuristic> {
    name.parse().map_err(PyValueError::new_err)
}

/// Occupancy grid (row 0 at the bottom of the map).
#[pyclass(name = "Grid", module = "pygridnav", frozen)]
struct PyGrid {
    inner: OccupancyGrid,
}

#[pymethods]
impl PyGrid {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: map::load_map(path).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn empty(width: usize, height: usize) -> PyResult<Self> {
        Ok(Self {
            inner: fixtures::empty(width, height).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn wall(width: usize, height: usize) -> PyResult<Self> {
        Ok(Self {
            inner: fixtures::wall(width, height).map_err(to_py)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (width, height, density, seed=0))]
    fn random(width: usize, height: usize, density: f64, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: fixtures::random(width, height, density, seed).map_err(to_py)?,
        })
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn resolution(&self) -> f64 {
        self.inner.resolution()
    }

    fn is_free(&self, col: usize, row: usize) -> bool {
        self.inner.is_free(GridIndex::new(col, row))
    }

    fn inflate(&self, radius: f64) -> Self {
        Self {
            inner: self.inner.inflate(radius),
        }
    }

    fn world_to_grid(&self, x: f64, y: f64) -> PyResult<Cell> {
        let i = self
            .inner
            .world_to_grid(WorldPoint::new(x, y))
            .map_err(to_py)?;
        Ok((i.col, i.row))
    }

    fn grid_to_world(&self, col: usize, row: usize) -> PyResult<(f64, f64)> {
        let p = self
            .inner
            .grid_to_world(GridIndex::new(col, row))
            .map_err(to_py)?;
        Ok((p.x, p.y))
    }

    fn snap_to_free(&self, x: f64, y: f64) -> PyResult<Cell> {
        let i = snap_to_free(&self.inner, WorldPoint::new(x, y)).map_err(to_py)?;
        Ok((i.col, i.row))
    }

    /// Writes `<stem>.yaml` + `<stem>.pgm` and returns the descriptor path.
    fn save(&self, dir: &str, stem: &str) -> PyResult<String> {
        let p = map::save_map(&self.inner, dir, stem).map_err(to_py)?;
        Ok(p.display().to_string())
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid({}x{}, resolution={})",
            self.inner.width(),
            self.inner.height(),
            self.inner.resolution()
        )
    }
}

#[pyclass(name = "PlanResult", module = "pygridnav", frozen, get_all)]
struct PyPlanResult {
    path: Vec<Cell>,
    cost: f64,
    expanded: usize,
    expansion_order: Vec<Cell>,
    wall_time: f64,
}

impl From<planners::PlanResult> for PyPlanResult {
    fn from(p: planners::PlanResult) -> Self {
        let cells = |v: Vec<GridIndex>| v.into_iter().map(|i| (i.col, i.row)).collect();
        Self {
            path: cells(p.path),
            cost: p.cost,
            expanded: p.expanded,
            expansion_order: cells(p.expansion_order),
            wall_time: p.wall_time,
        }
    }
}

#[pymethods]
impl PyPlanResult {
    fn __repr__(&self) -> String {
        format!(
            "PlanResult(cost={}, expanded={}, path_len={})",
            self.cost,
            self.expanded,
            self.path.len()
        )
    }
}

fn problem<'g>(grid: &'g PyGrid, start: Cell, goal: Cell) -> PyResult<SearchProblem<'g>> {
    SearchProblem::new(
        &grid.inner,
        GridIndex::new(start.0, start.1),
        GridIndex::new(goal.0, goal.1),
    )
    .map_err(to_py)
}

/// Plans between two cells. `algorithm` is "astar" or "dijkstra".
#[pyfunction]
#[pyo3(signature = (grid, start, goal, algorithm="astar", heuristic="diagonal"))]
fn plan(
    grid: &PyGrid,
    start: Cell,
    goal: Cell,
    algorithm: &str,
    heuristic: &str,
) -> PyResult<PyPlanResult> {
    let p = problem(grid, start, goal)?;
    let result = match algorithm {
        "astar" => planners::astar(&p, self::heuristic(heuristic)?),
        "dijkstra" => planners::dijkstra(&p),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown algorithm `{other}`"
            )))
        }
    };
    result.map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (grid, start, goal, heuristic="diagonal"))]
fn compare<'py>(
    py: Python<'py>,
    grid: &PyGrid,
    start: Cell,
    goal: Cell,
    heuristic: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let p = problem(grid, start, goal)?;
    let cmp = sim::compare_planners(&p, self::heuristic(heuristic)?).map_err(to_py)?;
    let out = PyDict::new(py);
    for (name, r) in [("dijkstra", &cmp.dijkstra), ("astar", &cmp.astar)] {
        let d = PyDict::new(py);
        d.set_item("cost", r.cost)?;
        d.set_item("expanded", r.expanded)?;
        d.set_item("runtime_ms", r.wall_time * 1e3)?;
        d.set_item("path_len", r.path.len())?;
        out.set_item(name, d)?;
    }
    out.set_item("expanded_ratio", cmp.expanded_ratio())?;
    out.set_item("cost_delta", cmp.cost_delta())?;
    Ok(out)
}

#[pyfunction]
fn heuristic_value(name: &str, a: Cell, b: Cell) -> PyResult<f64> {
    Ok(heuristic(name)?.value(GridIndex::new(a.0, a.1), GridIndex::new(b.0, b.1)))
}

#[pyfunction]
fn wrap_angle(a: f64) -> f64 {
    vehicle::wrap_angle(a)
}

#[pyfunction]
fn propagate(s: Pose, u: (f64, f64), dt: f64) -> PyResult<Pose> {
    vehicle::propagate(state(s), ControlInput::new(u.0, u.1), dt)
        .map(pose)
        .map_err(to_py)
}

#[pyfunction]
fn motion_jacobian(s: Pose, u: (f64, f64), dt: f64) -> PyResult<Mat> {
    let a = vehicle::motion_jacobian(state(s), ControlInput::new(u.0, u.1), dt).map_err(to_py)?;
    Ok(rows(&a))
}

#[pyfunction]
fn control_matrix(s: Pose, dt: f64) -> PyResult<Mat> {
    let b = vehicle::control_matrix(state(s), dt).map_err(to_py)?;
    Ok(rows(&b))
}

fn landmark(l: (f64, f64)) -> Landmark {
    Landmark {
        id: 0,
        x: l.0,
        y: l.1,
    }
}

/// Range and bearing of `landmark` (x, y) seen from pose `s`.
#[pyfunction]
fn predict_measurement(s: Pose, landmark: (f64, f64)) -> PyResult<(f64, f64)> {
    let z = estimation::predict_measurement(state(s), self::landmark(landmark)).map_err(to_py)?;
    Ok((z.r, z.b))
}

#[pyfunction]
fn measurement_jacobian(s: Pose, landmark: (f64, f64)) -> PyResult<Mat> {
    let h = estimation::measurement_jacobian(state(s), self::landmark(landmark)).map_err(to_py)?;
    Ok(rows(&h))
}

/// EKF prediction; returns (mean, cov). Noise defaults to the library default.
#[pyfunction]
#[pyo3(signature = (mean, cov, u, dt, process_cov=None))]
fn ekf_predict(
    mean: Pose,
    cov: Mat,
    u: (f64, f64),
    dt: f64,
    process_cov: Option<Mat>,
) -> PyResult<(Pose, Mat)> {
    let mut noise = NoiseConfig::default();
    if let Some(q) = process_cov {
        noise.process_cov = matrix3(&q)?;
    }
    let bel = BeliefState::new(state(mean), matrix3(&cov)?);
    let out =
        estimation::ekf_predict(&bel, ControlInput::new(u.0, u.1), dt, &noise).map_err(to_py)?;
    Ok((pose(out.mean), rows(&out.cov)))
}

/// EKF range-bearing update with diagonal measurement noise (σ_r², σ_b²).
#[pyfunction]
#[pyo3(signature = (mean, cov, z, landmark, meas_var=(4e-4, 4e-4)))]
fn ekf_update(
    mean: Pose,
    cov: Mat,
    z: (f64, f64),
    landmark: (f64, f64),
    meas_var: (f64, f64),
) -> PyResult<(Pose, Mat)> {
    let noise = NoiseConfig {
        meas_cov: fixtures::diag2(meas_var.0, meas_var.1),
        ..NoiseConfig::default()
    };
    let bel = BeliefState::new(state(mean), matrix3(&cov)?);
    let z = RangeBearing {
        landmark_id: 0,
        r: z.0,
        b: z.1,
    };
    let out = estimation::ekf_update(&bel, &z, self::landmark(landmark), &noise).map_err(to_py)?;
    Ok((pose(out.mean), rows(&out.cov)))
}

/// Runs a scenario file; returns outcome, step count, final error and the CSV trace.
#[pyfunction]
#[pyo3(signature = (path, seed=None))]
fn run_scenario<'py>(
    py: Python<'py>,
    path: &str,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut sc = Scenario::from_json_file(path).map_err(to_py)?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    let trace = sim::run_scenario(&sc).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("outcome", trace.outcome.name())?;
    out.set_item("steps", trace.records.len())?;
    out.set_item("final_error", trace.final_error)?;
    out.set_item("ekf_rmse", trace.ekf_rmse())?;
    out.set_item("dead_reckoning_rmse", trace.dead_reckoning_rmse())?;
    out.set_item("csv", trace.to_csv())?;
    Ok(out)
}

/// Writes the reference scenario (and its 100x100 wall map) into `dir`;
/// returns the scenario path.
#[pyfunction]
fn write_reference_scenario(dir: &str) -> PyResult<String> {
    let grid = fixtures::wall(100, 100).map_err(to_py)?;
    let map_path = map::save_map(&grid, dir, "wall").map_err(to_py)?;
    let sc = fixtures::reference_scenario(
        map_path
            .file_name()
            .map(Into::into)
            .unwrap_or(map_path.clone()),
    );
    let out = std::path::Path::new(dir).join("scenario.json");
    std::fs::write(&out, sc.to_json()).map_err(|e| PyIOError::new_err(e.to_string()))?;
    Ok(out.display().to_string())
}

#[pymodule]
fn pygridnav(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NoPathError", m.py().get_type::<NoPathError>())?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyPlanResult>()?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(heuristic_value, m)?)?;
    m.add_function(wrap_pyfunction!(wrap_angle, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(motion_jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(control_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(predict_measurement, m)?)?;
    m.add_function(wrap_pyfunction!(measurement_jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(ekf_predict, m)?)?;
    m.add_function(wrap_pyfunction!(ekf_update, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(write_reference_scenario, m)?)?;
    Ok(())
}
