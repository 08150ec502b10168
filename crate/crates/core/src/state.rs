//! State vectors exchanged between the frame, the sampler and the planner loop.

use serde::{Deserialize, Serialize};

/// Cartesian ego state as delivered by localization.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvState {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    #[serde(default)]
    pub a: f64,
    pub theta: f64,
}

impl EvState {
    pub fn new(x: f64, y: f64, v: f64, a: f64, theta: f64) -> Self {
        Self { x, y, v, a, theta }
    }
}

impl From<&TrajectoryPoint> for EvState {
    fn from(p: &TrajectoryPoint) -> Self {
        EvState { x: p.x, y: p.y, v: p.v, a: p.a, theta: p.theta }
    }
}

/// Curvilinear state: arc length and lateral offset with their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrenetState {
    pub s: f64,
    pub s_dot: f64,
    pub s_ddot: f64,
    pub d: f64,
    pub d_dot: f64,
    pub d_ddot: f64,
}

/// Cartesian kinematic state produced by the Frenet-to-Cartesian conversion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartesianState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    /// Signed speed; negative when the motion runs against the path direction.
    pub v: f64,
    pub a: f64,
    pub kappa: f64,
}

/// One discretized point of a candidate trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub a: f64,
    pub kappa: f64,
    pub kappa_dot: f64,
    pub yaw_rate: f64,
    pub s: f64,
    pub d: f64,
}

impl TrajectoryPoint {
    pub fn cartesian(&self) -> CartesianState {
        CartesianState { x: self.x, y: self.y, theta: self.theta, v: self.v, a: self.a, kappa: self.kappa }
    }
}
