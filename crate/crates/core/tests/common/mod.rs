//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::f64::consts::SQRT_2;

use gridnav::fixtures;
use gridnav::map::{GridIndex, OccupancyGrid};
use gridnav::planners::PlanResult;
use nalgebra::{Matrix3, SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn free(g: &OccupancyGrid, c: i64, r: i64) -> bool {
    c >= 0 && r >= 0 && g.is_free(GridIndex::new(c as usize, r as usize))
}

/// Legal moves from `(c, r)` written directly from the movement rules:
/// 8-connected, unit / √2 costs, a diagonal needs both flanking cells Free.
pub fn legal_moves(g: &OccupancyGrid, i: GridIndex) -> Vec<(GridIndex, f64)> {
    let (c, r) = (i.col as i64, i.row as i64);
    let mut out = Vec::new();
    for dc in -1..=1i64 {
        for dr in -1..=1i64 {
            if (dc, dr) == (0, 0) || !free(g, c + dc, r + dr) {
                continue;
            }
            let diagonal = dc != 0 && dr != 0;
            if diagonal && !(free(g, c + dc, r) && free(g, c, r + dr)) {
                continue;
            }
            let cost = if diagonal { SQRT_2 } else { 1.0 };
            out.push((GridIndex::new((c + dc) as usize, (r + dr) as usize), cost));
        }
    }
    out
}

/// Shortest-path cost by repeated relaxation until nothing changes
/// (Bellman-Ford with alternating sweep direction).
pub fn brute_force_cost(g: &OccupancyGrid, start: GridIndex, goal: GridIndex) -> Option<f64> {
    let n = g.len();
    let nodes: Vec<GridIndex> = g.indices().filter(|&i| g.is_free(i)).collect();
    let moves: Vec<Vec<(usize, f64)>> = nodes
        .iter()
        .map(|&i| {
            legal_moves(g, i)
                .into_iter()
                .map(|(m, c)| (g.linear(m), c))
                .collect()
        })
        .collect();
    let mut dist = vec![f64::INFINITY; n];
    dist[g.linear(start)] = 0.0;
    let mut forward = true;
    loop {
        let mut changed = false;
        let mut relax = |k: usize| {
            let from = dist[g.linear(nodes[k])];
            if from.is_finite() {
                for &(m, c) in &moves[k] {
                    if from + c < dist[m] - 1e-12 {
                        dist[m] = from + c;
                        changed = true;
                    }
                }
            }
        };
        if forward {
            (0..nodes.len()).for_each(&mut relax);
        } else {
            (0..nodes.len()).rev().for_each(&mut relax);
        }
        forward = !forward;
        if !changed {
            break;
        }
    }
    let d = dist[g.linear(goal)];
    d.is_finite().then_some(d)
}

/// Checks every structural property a returned plan must have. Returns a
/// description of the first violation.
pub fn check_plan(
    g: &OccupancyGrid,
    start: GridIndex,
    goal: GridIndex,
    p: &PlanResult,
) -> Result<(), String> {
    if p.path.first() != Some(&start) || p.path.last() != Some(&goal) {
        return Err(format!(
            "path endpoints {:?} .. {:?}",
            p.path.first(),
            p.path.last()
        ));
    }
    let mut sum = 0.0;
    for w in p.path.windows(2) {
        let step = legal_moves(g, w[0])
            .into_iter()
            .find(|&(m, _)| m == w[1])
            .ok_or_else(|| format!("illegal step {:?} -> {:?}", w[0], w[1]))?;
        sum += step.1;
    }
    if !g.is_free(start) {
        return Err("start not free".into());
    }
    if (sum - p.cost).abs() > 1e-9 {
        return Err(format!("cost {} != step sum {}", p.cost, sum));
    }
    if p.expanded != p.expansion_order.len() {
        return Err("expanded count mismatch".into());
    }
    if p.expansion_order.iter().any(|&i| !g.is_free(i)) {
        return Err("expanded a non-free cell".into());
    }
    let goal_hits = p.expansion_order.iter().filter(|&&i| i == goal).count();
    if goal_hits != 1 || p.expansion_order.last() != Some(&goal) {
        return Err("goal must be expanded exactly once, last".into());
    }
    if p.wall_time.is_nan() || p.wall_time < 0.0 {
        return Err("negative wall time".into());
    }
    Ok(())
}

/// A seeded random map with two distinct Free endpoints, not necessarily connected.
pub fn random_instance(
    seed: u64,
    sizes: (usize, usize),
    densities: (f64, f64),
) -> (OccupancyGrid, GridIndex, GridIndex) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = rng.random_range(sizes.0..=sizes.1);
    let h = rng.random_range(sizes.0..=sizes.1);
    let density = rng.random_range(densities.0..=densities.1);
    let g = fixtures::random(w, h, density, rng.random()).expect("valid fixture");
    let free: Vec<GridIndex> = g.indices().filter(|&i| g.is_free(i)).collect();
    let a = free[rng.random_range(0..free.len())];
    let mut b = free[rng.random_range(0..free.len())];
    if a == b {
        b = *free.iter().find(|&&i| i != a).expect("corners are free");
    }
    (g, a, b)
}

/// The first `count` solvable instances in seed order, with their oracle cost.
pub fn solvable_instances(
    count: usize,
    sizes: (usize, usize),
    densities: (f64, f64),
) -> Vec<(OccupancyGrid, GridIndex, GridIndex, f64)> {
    let mut out = Vec::with_capacity(count);
    let mut seed = 0;
    while out.len() < count {
        let (g, a, b) = random_instance(seed, sizes, densities);
        if let Some(c) = brute_force_cost(&g, a, b) {
            out.push((g, a, b, c));
        }
        seed += 1;
    }
    out
}

/// Central finite-difference Jacobian of `f` at `x`.
pub fn fd_jacobian<const N: usize, const M: usize>(
    f: impl Fn(SVector<f64, N>) -> SVector<f64, M>,
    x: SVector<f64, N>,
    step: f64,
) -> SMatrix<f64, M, N> {
    let mut j = SMatrix::<f64, M, N>::zeros();
    for k in 0..N {
        let mut hi = x;
        let mut lo = x;
        hi[k] += step;
        lo[k] -= step;
        j.set_column(k, &((f(hi) - f(lo)) / (2.0 * step)));
    }
    j
}

/// (max asymmetry, min eigenvalue) of a covariance.
pub fn cov_health(p: &Matrix3<f64>) -> (f64, f64) {
    let asym = (p - p.transpose()).abs().max();
    let sym = (p + p.transpose()) * 0.5;
    let min_eig = sym.symmetric_eigenvalues().min();
    (asym, min_eig)
}
