//! Kinematic feasibility filter, cost terms and argmin selection.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ConfigError;
use crate::sampler::{steps_within, CandidateTrajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    pub wheelbase: f64,
    /// Maximum steering angle [rad].
    pub delta_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub kappa_dot_max: f64,
    pub length: f64,
    pub width: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            wheelbase: 2.7,
            delta_max: 0.6,
            a_min: -8.0,
            a_max: 4.0,
            kappa_dot_max: 0.4,
            length: 4.5,
            width: 1.8,
        }
    }
}

impl VehicleParams {
    /// Steering-limited curvature bound tan(delta_max) / L.
    pub fn kappa_max(&self) -> f64 {
        self.delta_max.tan() / self.wheelbase
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.wheelbase > 0.0 && self.wheelbase.is_finite()) {
            return Err(ConfigError::new("vehicle.wheelbase", "must be > 0"));
        }
        if !(self.delta_max > 0.0 && self.delta_max < std::f64::consts::FRAC_PI_2) {
            return Err(ConfigError::new("vehicle.delta_max", "must lie in (0, pi/2)"));
        }
        if !(self.a_min < 0.0) {
            return Err(ConfigError::new("vehicle.a_min", "must be < 0"));
        }
        if !(self.a_max > 0.0 && self.a_max.is_finite()) {
            return Err(ConfigError::new("vehicle.a_max", "must be > 0"));
        }
        if !(self.kappa_dot_max > 0.0) {
            return Err(ConfigError::new("vehicle.kappa_dot_max", "must be > 0"));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(ConfigError::new("vehicle.length", "must be > 0"));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(ConfigError::new("vehicle.width", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostWeights {
    pub w_ref: f64,
    pub w_vel: f64,
    pub w_lat: f64,
    pub w_lon: f64,
    pub v_des: f64,
    pub p_exponent: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self { w_ref: 1.0, w_vel: 1.0, w_lat: 0.2, w_lon: 0.2, v_des: 7.0, p_exponent: 2.0 }
    }
}

impl CostWeights {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let w = [self.w_ref, self.w_vel, self.w_lat, self.w_lon];
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(ConfigError::new("weights", "weights must be finite and >= 0"));
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(ConfigError::new("weights", "at least one weight must be > 0"));
        }
        if !(self.v_des >= 0.0 && self.v_des.is_finite()) {
            return Err(ConfigError::new("weights.v_des", "must be >= 0"));
        }
        if !(self.p_exponent > 0.0 && self.p_exponent.is_finite()) {
            return Err(ConfigError::new("weights.p_exponent", "must be > 0"));
        }
        Ok(())
    }

    /// All four weights multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            w_ref: self.w_ref * c,
            w_vel: self.w_vel * c,
            w_lat: self.w_lat * c,
            w_lon: self.w_lon * c,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostBreakdown {
    pub j_ref: f64,
    pub j_vel: f64,
    pub j_lat: f64,
    pub j_lon: f64,
    pub j_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Violation {
    Accel,
    Curvature,
    CurvatureRate,
    YawRate,
    ProjectionViolation,
    Collision,
}

impl Violation {
    pub const ALL: [Violation; 6] = [
        Violation::Accel,
        Violation::Curvature,
        Violation::CurvatureRate,
        Violation::YawRate,
        Violation::ProjectionViolation,
        Violation::Collision,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Violation::Accel => "AccelViolation",
            Violation::Curvature => "CurvatureViolation",
            Violation::CurvatureRate => "CurvatureRateViolation",
            Violation::YawRate => "YawRateViolation",
            Violation::ProjectionViolation => "ProjectionViolation",
            Violation::Collision => "Collision",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Unchecked,
    Feasible,
    /// First violated constraint and the first point index violating it.
    Infeasible {
        violation: Violation,
        index: usize,
    },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Unchecked => "Unchecked",
            Verdict::Feasible => "Feasible",
            Verdict::Infeasible { violation, .. } => violation.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ViolationCounts(pub [usize; 6]);

impl ViolationCounts {
    pub fn get(&self, v: Violation) -> usize {
        self.0[v.ordinal()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for ViolationCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in Violation::ALL.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}={}", v.name(), self.0[i])?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum EvaluationError {
    #[error("all {total} candidates infeasible ({counts})")]
    AllInfeasible { total: usize, counts: ViolationCounts },
    #[error("candidate set is empty")]
    NoCandidates,
}

/// Checks acceleration, curvature, curvature rate and yaw rate bounds in that
/// order. Each constraint is scanned over all points before the next one.
pub fn check_feasibility(candidate: &CandidateTrajectory, params: &VehicleParams) -> Verdict {
    if let Verdict::Infeasible { violation: Violation::ProjectionViolation, .. } = candidate.verdict {
        return candidate.verdict;
    }
    let pts = &candidate.points;
    let kappa_max = params.kappa_max();
    let first = |pred: &dyn Fn(usize) -> bool| (0..pts.len()).find(|&i| !pred(i));

    if let Some(i) = first(&|i| pts[i].a >= params.a_min && pts[i].a <= params.a_max) {
        return Verdict::Infeasible { violation: Violation::Accel, index: i };
    }
    if let Some(i) = first(&|i| pts[i].kappa.abs() <= kappa_max) {
        return Verdict::Infeasible { violation: Violation::Curvature, index: i };
    }
    if let Some(i) = first(&|i| pts[i].kappa_dot.abs() <= params.kappa_dot_max) {
        return Verdict::Infeasible { violation: Violation::CurvatureRate, index: i };
    }
    if let Some(i) = first(&|i| pts[i].yaw_rate.abs() <= kappa_max * pts[i].v) {
        return Verdict::Infeasible { violation: Violation::YawRate, index: i };
    }
    Verdict::Feasible
}

fn trapezoid(
    pts: &[crate::state::TrajectoryPoint],
    f: impl Fn(&crate::state::TrajectoryPoint) -> f64,
) -> f64 {
    pts.windows(2).map(|w| 0.5 * (f(&w[0]) + f(&w[1])) * (w[1].t - w[0].t)).sum()
}

/// Reference-deviation, velocity, lateral and longitudinal acceleration costs.
///
/// The two sums run over every emitted point; the acceleration integrals use
/// the trapezoidal rule over the polynomial segment `[0, tau]`.
pub fn compute_costs(candidate: &CandidateTrajectory, weights: &CostWeights) -> CostBreakdown {
    let pts = &candidate.points;
    let p = weights.p_exponent;
    let j_ref = pts.iter().map(|q| q.d * q.d).sum::<f64>();
    let j_vel = pts
        .iter()
        .map(|q| {
            let e = (q.v - weights.v_des).abs();
            if p == 2.0 {
                e * e
            } else {
                e.powf(p)
            }
        })
        .sum::<f64>();

    let dt = if pts.len() >= 2 { pts[1].t - pts[0].t } else { 1.0 };
    let end = (steps_within(candidate.poly.tau, dt) + 1).min(pts.len());
    let segment = &pts[..end];
    let j_lat = trapezoid(segment, |q| {
        let a_lat = q.v * q.v * q.kappa;
        a_lat * a_lat
    });
    let j_lon = trapezoid(segment, |q| q.a * q.a);

    let j_sum = weights.w_ref * j_ref + weights.w_vel * j_vel + weights.w_lat * j_lat + weights.w_lon * j_lon;
    CostBreakdown { j_ref, j_vel, j_lat, j_lon, j_sum }
}

/// Filters, costs and selects without obstacle checks.
pub fn select_optimal(
    candidates: &mut [CandidateTrajectory],
    params: &VehicleParams,
    weights: &CostWeights,
) -> Result<usize, EvaluationError> {
    select_optimal_with(candidates, params, weights, |_| None)
}

/// Filters every candidate, runs `collision` on the kinematically feasible
/// ones, costs the survivors and returns the slice position of the cheapest.
/// Ties go to the lowest position.
pub fn select_optimal_with<F>(
    candidates: &mut [CandidateTrajectory],
    params: &VehicleParams,
    weights: &CostWeights,
    mut collision: F,
) -> Result<usize, EvaluationError>
where
    F: FnMut(&CandidateTrajectory) -> Option<usize>,
{
    if candidates.is_empty() {
        return Err(EvaluationError::NoCandidates);
    }
    let mut counts = ViolationCounts::default();
    let mut best: Option<(usize, f64)> = None;
    for (k, c) in candidates.iter_mut().enumerate() {
        let mut verdict = check_feasibility(c, params);
        if verdict == Verdict::Feasible {
            if let Some(index) = collision(c) {
                verdict = Verdict::Infeasible { violation: Violation::Collision, index };
            }
        }
        c.verdict = verdict;
        match verdict {
            Verdict::Feasible => {
                let costs = compute_costs(c, weights);
                c.costs = Some(costs);
                if costs.j_sum.is_finite() && best.is_none_or(|(_, j)| costs.j_sum < j) {
                    best = Some((k, costs.j_sum));
                }
            }
            Verdict::Infeasible { violation, .. } => {
                c.costs = None;
                counts.0[violation.ordinal()] += 1;
            }
            Verdict::Unchecked => unreachable!("check_feasibility always decides"),
        }
    }
    best.map(|(k, _)| k).ok_or(EvaluationError::AllInfeasible { total: candidates.len(), counts })
}
