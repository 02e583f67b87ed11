//! Differential-drive kinematics.
//!
//! The non-linear model is the ground truth for propagation. The Jacobian
//! [`motion_jacobian`] and the input matrix [`control_matrix`] exist for
//! covariance propagation and are not used to move the state.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Matrix3x2, Vector3};
use serde::{Deserialize, Serialize};

use crate::map::WorldPoint;
use crate::{Error, Result};

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    /// Heading in radians, kept in (−π, π].
    pub gamma: f64,
}

impl RobotState {
    pub fn new(x: f64, y: f64, gamma: f64) -> Self {
        Self {
            x,
            y,
            gamma: wrap_angle(gamma),
        }
    }

    pub fn position(&self) -> WorldPoint {
        WorldPoint::new(self.x, self.y)
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.gamma)
    }

    /// Heading is wrapped.
    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    /// m/s
    pub v: f64,
    /// rad/s
    pub omega: f64,
}

impl ControlInput {
    pub const ZERO: ControlInput = ControlInput { v: 0.0, omega: 0.0 };

    pub fn new(v: f64, omega: f64) -> Self {
        Self { v, omega }
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveTimestep(dt))
    }
}

/// One Euler step of the unicycle model, heading wrapped afterwards.
pub fn propagate(s: RobotState, u: ControlInput, dt: f64) -> Result<RobotState> {
    check_dt(dt)?;
    let (sin, cos) = s.gamma.sin_cos();
    Ok(RobotState::new(
        s.x + u.v * cos * dt,
        s.y + u.v * sin * dt,
        s.gamma + u.omega * dt,
    ))
}

/// ∂(x', y', γ')/∂(x, y, γ) of [`propagate`].
pub fn motion_jacobian(s: RobotState, u: ControlInput, dt: f64) -> Result<Matrix3<f64>> {
    check_dt(dt)?;
    let (sin, cos) = s.gamma.sin_cos();
    #[rustfmt::skip]
    let a = Matrix3::new(
        1.0, 0.0, -u.v * sin * dt,
        0.0, 1.0,  u.v * cos * dt,
        0.0, 0.0,  1.0,
    );
    Ok(a)
}

/// Input matrix B with `propagate(s, u, dt) == s + B·u` before the heading wrap.
pub fn control_matrix(s: RobotState, dt: f64) -> Result<Matrix3x2<f64>> {
    check_dt(dt)?;
    let (sin, cos) = s.gamma.sin_cos();
    #[rustfmt::skip]
    let b = Matrix3x2::new(
        cos * dt, 0.0,
        sin * dt, 0.0,
        0.0,      dt,
    );
    Ok(b)
}
