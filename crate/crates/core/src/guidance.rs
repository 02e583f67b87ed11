//! Waypoint pursuit with PID heading control.

use serde::{Deserialize, Serialize};

use crate::map::WorldPoint;
use crate::vehicle::{wrap_angle, ControlInput, RobotState};
use crate::{Error, Result};

const KI_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FollowerConfig {
    /// m
    pub lookahead: f64,
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// m/s
    pub v_max: f64,
    /// rad/s
    pub omega_max: f64,
    /// m
    pub goal_tolerance: f64,
    /// Distance to the final waypoint inside which speed ramps down to zero, m.
    pub slowdown_radius: f64,
}

impl Default for FollowerConfig {
    /// TurtleBot3-class limits; lookahead is two 5 cm cells.
    fn default() -> Self {
        Self {
            lookahead: 0.1,
            kp: 2.0,
            ki: 0.0,
            kd: 0.1,
            v_max: 0.22,
            omega_max: 2.84,
            goal_tolerance: 0.1,
            slowdown_radius: 0.3,
        }
    }
}

impl FollowerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidScenario(format!("follower: {what}")));
        if !(self.lookahead > 0.0) {
            return bad("lookahead must be > 0");
        }
        if !(self.v_max > 0.0) {
            return bad("v_max must be > 0");
        }
        if !(self.omega_max > 0.0) {
            return bad("omega_max must be > 0");
        }
        if !(self.goal_tolerance > 0.0) {
            return bad("goal_tolerance must be > 0");
        }
        if !(self.slowdown_radius >= self.goal_tolerance) {
            return bad("slowdown_radius must be >= goal_tolerance");
        }
        if ![self.kp, self.ki, self.kd].iter().all(|g| g.is_finite()) {
            return bad("gains must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FollowerState {
    pub target_index: usize,
    /// rad·s
    pub integral_error: f64,
    /// rad
    pub prev_error: f64,
}

/// Advances past every consecutive waypoint already within `lookahead` of the
/// robot, stopping at the final one.
pub fn next_waypoint(
    path: &[WorldPoint],
    s: RobotState,
    fs: FollowerState,
    lookahead: f64,
) -> Result<(WorldPoint, FollowerState)> {
    if path.is_empty() {
        return Err(Error::EmptyPath);
    }
    let last = path.len() - 1;
    let here = s.position();
    let mut idx = fs.target_index.min(last);
    while idx < last && path[idx].distance(&here) <= lookahead {
        idx += 1;
    }
    Ok((
        path[idx],
        FollowerState {
            target_index: idx,
            ..fs
        },
    ))
}

/// PID on heading error toward `target`; forward speed shaped by `cos e` and
/// ramped down near `goal`, the final waypoint.
pub fn control_step(
    s: RobotState,
    target: WorldPoint,
    goal: WorldPoint,
    fs: FollowerState,
    cfg: &FollowerConfig,
    dt: f64,
) -> Result<(ControlInput, FollowerState)> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveTimestep(dt));
    }
    let e = wrap_angle((target.y - s.y).atan2(target.x - s.x) - s.gamma);

    let windup = cfg.omega_max / cfg.ki.abs().max(KI_EPSILON);
    let integral = (fs.integral_error + e * dt).clamp(-windup, windup);
    let derivative = (e - fs.prev_error) / dt;
    let omega =
        (cfg.kp * e + cfg.ki * integral + cfg.kd * derivative).clamp(-cfg.omega_max, cfg.omega_max);

    let to_goal = s.position().distance(&goal);
    let ramp = (to_goal / cfg.slowdown_radius).min(1.0);
    let v = (cfg.v_max * e.cos().max(0.0) * ramp).clamp(0.0, cfg.v_max);

    Ok((
        ControlInput::new(v, omega),
        FollowerState {
            target_index: fs.target_index,
            integral_error: integral,
            prev_error: e,
        },
    ))
}

/// Inclusive distance test.
pub fn at_goal(s: RobotState, goal: WorldPoint, tol: f64) -> bool {
    s.position().distance(&goal) <= tol
}
