//! EKF localization against known range-bearing landmarks.
//!
//! Bearings are measured from the landmark toward the robot:
//! `b = atan2(y − y_lm, x − x_lm) − γ`. This is π off the more common
//! robot-to-landmark convention. Measurement synthesis in the simulator uses
//! the same function, so the loop is self-consistent.

use nalgebra::{Matrix2, Matrix2x3, Matrix3, SMatrix, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::vehicle::{motion_jacobian, propagate, wrap_angle, ControlInput, RobotState};
use crate::{Error, Result};

/// Relative condition bound below which an innovation covariance is treated
/// as singular.
pub const CONDITION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeBearing {
    pub landmark_id: u32,
    pub r: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeliefState {
    pub mean: RobotState,
    pub cov: Matrix3<f64>,
}

impl BeliefState {
    pub fn new(mean: RobotState, cov: Matrix3<f64>) -> Self {
        Self { mean, cov }
    }

    /// Exactly known pose.
    pub fn certain(mean: RobotState) -> Self {
        Self::new(mean, Matrix3::zeros())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Additive per-step state noise Q.
    #[serde(with = "crate::matrix_serde")]
    pub process_cov: Matrix3<f64>,
    /// Range/bearing noise R.
    #[serde(with = "crate::matrix_serde")]
    pub meas_cov: Matrix2<f64>,
    /// Direct-pose observation noise.
    #[serde(with = "crate::matrix_serde")]
    pub pose_meas_cov: Matrix3<f64>,
}

impl NoiseConfig {
    pub fn zero() -> Self {
        Self {
            process_cov: Matrix3::zeros(),
            meas_cov: Matrix2::zeros(),
            pose_meas_cov: Matrix3::zeros(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.process_cov.amax() == 0.0
            && self.meas_cov.amax() == 0.0
            && self.pose_meas_cov.amax() == 0.0
    }
}

impl Default for NoiseConfig {
    /// 1 mm / 3.2 mrad per-step process noise, 2 cm range and 0.02 rad
    /// bearing noise, 2 cm / 0.02 rad direct-pose noise.
    fn default() -> Self {
        Self {
            process_cov: Matrix3::from_diagonal(&Vector3::new(1e-6, 1e-6, 1e-5)),
            meas_cov: Matrix2::from_diagonal(&Vector2::new(4e-4, 4e-4)),
            pose_meas_cov: Matrix3::from_diagonal(&Vector3::new(4e-4, 4e-4, 4e-4)),
        }
    }
}

pub fn predict_measurement(s: RobotState, lm: Landmark) -> Result<RangeBearing> {
    let dx = s.x - lm.x;
    let dy = s.y - lm.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::DegenerateRange);
    }
    Ok(RangeBearing {
        landmark_id: lm.id,
        r: dx.hypot(dy),
        b: wrap_angle(dy.atan2(dx) - s.gamma),
    })
}

/// ∂(r, b)/∂(x, y, γ) of [`predict_measurement`].
pub fn measurement_jacobian(s: RobotState, lm: Landmark) -> Result<Matrix2x3<f64>> {
    let dx = s.x - lm.x;
    let dy = s.y - lm.y;
    let d2 = dx * dx + dy * dy;
    if d2 == 0.0 {
        return Err(Error::DegenerateRange);
    }
    let d = d2.sqrt();
    #[rustfmt::skip]
    let h = Matrix2x3::new(
        dx / d,   dy / d,  0.0,
        -dy / d2, dx / d2, -1.0,
    );
    Ok(h)
}

fn symmetrize<const N: usize>(p: SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    (p + p.transpose()) * 0.5
}

/// Inverse of an innovation covariance, refusing ill-conditioned ones
/// (Frobenius reciprocal condition number at or below [`CONDITION_TOLERANCE`]).
fn checked_inverse<const N: usize>(s: &SMatrix<f64, N, N>) -> Result<SMatrix<f64, N, N>>
where
    nalgebra::Const<N>: nalgebra::DimMin<nalgebra::Const<N>, Output = nalgebra::Const<N>>,
{
    let inv = s.try_inverse().ok_or(Error::SingularInnovation)?;
    let rcond = 1.0 / (s.norm() * inv.norm());
    if !(rcond > CONDITION_TOLERANCE) {
        return Err(Error::SingularInnovation);
    }
    Ok(inv)
}

/// Propagates the mean through the non-linear model and the covariance through
/// the Jacobian at the prior mean: `P' = A·P·Aᵀ + Q`.
pub fn ekf_predict(
    bel: &BeliefState,
    u: ControlInput,
    dt: f64,
    noise: &NoiseConfig,
) -> Result<BeliefState> {
    let a = motion_jacobian(bel.mean, u, dt)?;
    let mean = propagate(bel.mean, u, dt)?;
    let cov = symmetrize(a * bel.cov * a.transpose() + noise.process_cov);
    Ok(BeliefState { mean, cov })
}

/// Generic linearized correction shared by both observation modes.
/// Covariance uses the Joseph form.
fn correct<const M: usize>(
    bel: &BeliefState,
    h: SMatrix<f64, M, 3>,
    innovation: SMatrix<f64, M, 1>,
    r: SMatrix<f64, M, M>,
) -> Result<BeliefState>
where
    nalgebra::Const<M>: nalgebra::DimMin<nalgebra::Const<M>, Output = nalgebra::Const<M>>,
{
    let p = bel.cov;
    let s = h * p * h.transpose() + r;
    let k = p * h.transpose() * checked_inverse(&s)?;
    let delta = k * innovation;
    let mean = RobotState::new(
        bel.mean.x + delta[0],
        bel.mean.y + delta[1],
        bel.mean.gamma + delta[2],
    );
    let i_kh = Matrix3::identity() - k * h;
    let cov = symmetrize(i_kh * p * i_kh.transpose() + k * r * k.transpose());
    Ok(BeliefState { mean, cov })
}

/// Range-bearing update against one known landmark.
pub fn ekf_update(
    bel: &BeliefState,
    z: &RangeBearing,
    lm: Landmark,
    noise: &NoiseConfig,
) -> Result<BeliefState> {
    if z.landmark_id != lm.id {
        return Err(Error::InvalidScenario(format!(
            "measurement for landmark {} applied to landmark {}",
            z.landmark_id, lm.id
        )));
    }
    let predicted = predict_measurement(bel.mean, lm)?;
    let h = measurement_jacobian(bel.mean, lm)?;
    let nu = Vector2::new(z.r - predicted.r, wrap_angle(z.b - predicted.b));
    correct(bel, h, nu, noise.meas_cov)
}

/// Update from a direct pose observation (H = I).
pub fn ekf_update_pose(
    bel: &BeliefState,
    observed: RobotState,
    noise: &NoiseConfig,
) -> Result<BeliefState> {
    let nu = Vector3::new(
        observed.x - bel.mean.x,
        observed.y - bel.mean.y,
        wrap_angle(observed.gamma - bel.mean.gamma),
    );
    correct(bel, Matrix3::identity(), nu, noise.pose_meas_cov)
}
