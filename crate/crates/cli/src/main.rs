#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use gridnav::fixtures::{self, FixtureKind};
use gridnav::map::{self, GridIndex, OccupancyGrid, WorldPoint};
use gridnav::planners::{astar, dijkstra, Heuristic, PlanResult};
use gridnav::render;
use gridnav::search_graph::{snap_to_free, SearchProblem};
use gridnav::sim::{self, Outcome, Scenario};
use gridnav::Error;

const EXIT_NO_PATH: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gridnav",
    version,
    about = "Grid path planning, comparison and closed-loop simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one path on a map.
    Plan(PlanArgs),
    /// Run Dijkstra and A* on the same problem and report both.
    Compare(CompareArgs),
    /// Run a closed-loop navigation scenario.
    Simulate(SimulateArgs),
    /// Generate a map descriptor + PGM pair.
    Fixture(FixtureArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Dijkstra,
    Astar,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Manhattan,
    Diagonal,
    Euclidean,
}

impl From<HeuristicArg> for Heuristic {
    fn from(h: HeuristicArg) -> Self {
        match h {
            HeuristicArg::Manhattan => Heuristic::Manhattan,
            HeuristicArg::Diagonal => Heuristic::Diagonal,
            HeuristicArg::Euclidean => Heuristic::Euclidean,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Empty,
    Wall,
    Random,
}

fn parse_point(s: &str) -> Result<WorldPoint, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected X,Y but got `{s}`"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{t}` is not a finite number"))
    };
    Ok(WorldPoint::new(num(x)?, num(y)?))
}

#[derive(clap::Args)]
struct Endpoints {
    /// Map descriptor (YAML).
    #[arg(long)]
    map: PathBuf,
    /// Start position in world meters, "X,Y".
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    start: WorldPoint,
    /// Goal position in world meters, "X,Y".
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    goal: WorldPoint,
    /// Obstacle inflation radius in meters.
    #[arg(long, default_value_t = 0.0)]
    inflate: f64,
}

#[derive(clap::Args)]
struct PlanArgs {
    #[command(flatten)]
    endpoints: Endpoints,
    #[arg(long, value_enum)]
    algorithm: AlgorithmArg,
    /// A* heuristic; defaults to diagonal.
    #[arg(long, value_enum)]
    heuristic: Option<HeuristicArg>,
    /// Write a PPM render of expansions and path.
    #[arg(long)]
    render: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct CompareArgs {
    #[command(flatten)]
    endpoints: Endpoints,
    #[arg(long, value_enum)]
    heuristic: Option<HeuristicArg>,
    /// Directory for dijkstra.ppm and astar.ppm renders.
    #[arg(long)]
    render_dir: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Per-step CSV trace output.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    render: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(clap::Args)]
struct FixtureArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    /// Occupied fraction for random maps.
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// `println!` that tolerates a closed stdout (e.g. piped into `head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoPath | Error::NoFreeCell => EXIT_NO_PATH,
            Error::Io(_) => EXIT_RUNTIME,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Fixture(a) => cmd_fixture(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Image scale giving roughly 500 px on the longer side.
fn render_scale(grid: &OccupancyGrid) -> usize {
    (500 / grid.width().max(grid.height())).clamp(1, 20)
}

fn write_render(
    grid: &OccupancyGrid,
    plan: Option<&PlanResult>,
    trace: Option<&sim::SimTrace>,
    out: &Path,
) -> Result<(), Failure> {
    render::render(grid, plan, trace, out, render_scale(grid)).map_err(|e| Failure {
        code: EXIT_RUNTIME,
        message: format!("writing {}: {e}", out.display()),
    })
}

struct Prepared {
    grid: OccupancyGrid,
    start: GridIndex,
    goal: GridIndex,
}

fn prepare(ep: &Endpoints) -> Result<Prepared, Failure> {
    if !(ep.inflate >= 0.0) {
        return Err(Failure {
            code: EXIT_INVALID,
            message: format!("--inflate must be >= 0, got {}", ep.inflate),
        });
    }
    let grid = map::load_map(&ep.map)?.inflate(ep.inflate);
    let snap = |name: &str, p: WorldPoint| -> Result<GridIndex, Failure> {
        let cell = snap_to_free(&grid, p)?;
        let on_free = grid
            .world_to_grid(p)
            .map(|i| grid.is_free(i))
            .unwrap_or(false);
        if !on_free {
            eprintln!(
                "warning: {name} ({}, {}) is not on a free cell; snapped to cell ({}, {})",
                p.x, p.y, cell.col, cell.row
            );
        }
        Ok(cell)
    };
    let start = snap("start", ep.start)?;
    let goal = snap("goal", ep.goal)?;
    Ok(Prepared { grid, start, goal })
}

fn cmd_plan(args: PlanArgs) -> CmdResult {
    let prepared = prepare(&args.endpoints)?;
    let defaulted = args.heuristic.is_none() && matches!(args.algorithm, AlgorithmArg::Astar);
    let heuristic: Heuristic = match args.algorithm {
        AlgorithmArg::Dijkstra => Heuristic::Zero,
        AlgorithmArg::Astar => args
            .heuristic
            .map(Into::into)
            .unwrap_or(Heuristic::Diagonal),
    };
    if defaulted && !args.json {
        out!("heuristic: diagonal (default)");
    }
    if matches!(args.algorithm, AlgorithmArg::Dijkstra) && args.heuristic.is_some() {
        eprintln!("note: --heuristic is ignored by dijkstra");
    }
    let algorithm = match args.algorithm {
        AlgorithmArg::Dijkstra => "dijkstra",
        AlgorithmArg::Astar => "astar",
    };
    let problem = SearchProblem::new(&prepared.grid, prepared.start, prepared.goal)?;
    let result = match args.algorithm {
        AlgorithmArg::Dijkstra => dijkstra(&problem),
        AlgorithmArg::Astar => astar(&problem, heuristic),
    };
    let cell = |i: GridIndex| json!([i.col, i.row]);
    match result {
        Ok(plan) => {
            if let Some(out) = &args.render {
                write_render(&prepared.grid, Some(&plan), None, out)?;
            }
            if args.json {
                let record = json!({
                    "status": "ok",
                    "algorithm": algorithm,
                    "heuristic": heuristic.name(),
                    "heuristic_defaulted": defaulted,
                    "start": cell(prepared.start),
                    "goal": cell(prepared.goal),
                    "cost": plan.cost,
                    "expanded": plan.expanded,
                    "runtime_ms": plan.wall_time * 1e3,
                    "path_len": plan.path.len(),
                    "path": plan.path.iter().map(|&i| cell(i)).collect::<Vec<_>>(),
                });
                out!("{record}");
            } else {
                out!("algorithm: {algorithm}");
                out!(
                    "cost: {:.6} cells ({:.3} m)",
                    plan.cost,
                    plan.cost * prepared.grid.resolution()
                );
                out!("expanded: {}", plan.expanded);
                out!("path length: {} cells", plan.path.len());
                out!("runtime: {:.3} ms", plan.wall_time * 1e3);
            }
            Ok(0)
        }
        Err(Error::NoPath) => {
            if args.json {
                let record = json!({
                    "status": "no_path",
                    "algorithm": algorithm,
                    "heuristic": heuristic.name(),
                    "start": cell(prepared.start),
                    "goal": cell(prepared.goal),
                });
                out!("{record}");
            } else {
                out!("no path");
            }
            Ok(EXIT_NO_PATH)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_compare(args: CompareArgs) -> CmdResult {
    let prepared = prepare(&args.endpoints)?;
    let heuristic = args
        .heuristic
        .map(Into::into)
        .unwrap_or(Heuristic::Diagonal);
    let problem = SearchProblem::new(&prepared.grid, prepared.start, prepared.goal)?;
    match sim::compare_planners(&problem, heuristic) {
        Ok(cmp) => {
            if let Some(dir) = &args.render_dir {
                std::fs::create_dir_all(dir).map_err(|e| Failure {
                    code: EXIT_RUNTIME,
                    message: format!("creating {}: {e}", dir.display()),
                })?;
                write_render(
                    &prepared.grid,
                    Some(&cmp.dijkstra),
                    None,
                    &dir.join("dijkstra.ppm"),
                )?;
                write_render(
                    &prepared.grid,
                    Some(&cmp.astar),
                    None,
                    &dir.join("astar.ppm"),
                )?;
            }
            out!(
                "{}",
                serde_json::to_string(&cmp.record()).expect("record serializes")
            );
            Ok(0)
        }
        Err(Error::NoPath) => {
            out!(
                "{}",
                json!({ "status": "no_path", "heuristic": heuristic.name() })
            );
            Ok(EXIT_NO_PATH)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_simulate(args: SimulateArgs) -> CmdResult {
    let mut scenario = Scenario::from_json_file(&args.scenario)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let grid = map::load_map(&scenario.map_path)?;
    let trace = sim::run_on_grid(&scenario, &grid)?;
    if let Some(out) = &args.trace {
        trace.write_csv(out).map_err(|e| Failure {
            code: EXIT_RUNTIME,
            message: format!("writing {}: {e}", out.display()),
        })?;
    }
    if let Some(out) = &args.render {
        write_render(&grid, trace.plan.as_ref(), Some(&trace), out)?;
    }
    out!("outcome: {}", trace.outcome.name());
    out!("steps: {}", trace.records.len());
    out!("final_error: {}", trace.final_error);
    if let Some(plan) = &trace.plan {
        out!("plan_cost: {}", plan.cost);
        out!("plan_expanded: {}", plan.expanded);
    }
    Ok(if trace.outcome == Outcome::Reached {
        0
    } else {
        EXIT_NO_PATH
    })
}

fn cmd_fixture(args: FixtureArgs) -> CmdResult {
    let kind = match args.kind {
        KindArg::Empty => FixtureKind::Empty,
        KindArg::Wall => FixtureKind::Wall,
        KindArg::Random => FixtureKind::Random,
    };
    let grid = fixtures::generate(kind, args.width, args.height, args.density, args.seed)?;
    let path = map::save_map(&grid, &args.out, "map")?;
    out!("{}", path.display());
    Ok(0)
}
