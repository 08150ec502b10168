//! Goal-state sampling and polynomial candidate generation.
//!
//! Longitudinal motion is a quartic in time (velocity keeping: the goal
//! position is free), lateral motion a quintic that settles at the sampled
//! offset with zero lateral velocity and acceleration. Both boundary-value
//! problems are solved in closed form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ConfigError;
use crate::evaluation::{CostBreakdown, Verdict, Violation};
use crate::frenet::FrenetFrame;
use crate::geometry::wrap_angle;
use crate::state::{FrenetState, TrajectoryPoint};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SamplerError {
    #[error("polynomial horizon must be positive, got {0}")]
    NonPositiveHorizon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
    pub d_min: f64,
    pub d_max: f64,
    pub n_d: usize,
    pub v_min: f64,
    pub v_max: f64,
    pub n_v: usize,
    pub dt: f64,
    pub horizon_steps: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            tau_min: 2.0,
            tau_max: 3.0,
            n_tau: 3,
            d_min: -2.0,
            d_max: 2.0,
            n_d: 5,
            v_min: 3.0,
            v_max: 11.0,
            n_v: 5,
            dt: 0.1,
            horizon_steps: 30,
        }
    }
}

impl SamplingConfig {
    pub fn sample_count(&self) -> usize {
        self.n_tau * self.n_d * self.n_v
    }

    /// Duration covered by the emitted trajectory.
    pub fn horizon(&self) -> f64 {
        self.horizon_steps as f64 * self.dt
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = [self.tau_min, self.tau_max, self.d_min, self.d_max, self.v_min, self.v_max, self.dt];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::new("sampling", "all ranges must be finite"));
        }
        if !(self.tau_min > 0.0) {
            return Err(ConfigError::new("sampling.tau_min", "must be > 0"));
        }
        if self.tau_min > self.tau_max {
            return Err(ConfigError::new("sampling.tau_min", "tau_min > tau_max"));
        }
        if self.d_min > self.d_max {
            return Err(ConfigError::new("sampling.d_min", "d_min > d_max"));
        }
        if self.v_min > self.v_max {
            return Err(ConfigError::new("sampling.v_min", "v_min > v_max"));
        }
        if self.v_min < 0.0 {
            return Err(ConfigError::new("sampling.v_min", "must be >= 0"));
        }
        for (field, n) in
            [("sampling.n_tau", self.n_tau), ("sampling.n_d", self.n_d), ("sampling.n_v", self.n_v)]
        {
            if n == 0 {
                return Err(ConfigError::new(field, "must be >= 1"));
            }
        }
        if !(self.dt > 0.0) {
            return Err(ConfigError::new("sampling.dt", "must be > 0"));
        }
        if self.horizon() + 1e-9 < self.tau_max {
            return Err(ConfigError::new("sampling.horizon_steps", "horizon_steps * dt must cover tau_max"));
        }
        Ok(())
    }

    /// Splits `count` into per-axis counts (tau, d, v) with the most balanced
    /// factorization; tau receives the smallest factor.
    pub fn with_total_count(&self, count: usize) -> Self {
        let mut best = (1, 1, count.max(1));
        let mut best_spread = usize::MAX;
        for a in 1..=count {
            if !count.is_multiple_of(a) {
                continue;
            }
            for b in a..=count / a {
                if !(count / a).is_multiple_of(b) {
                    continue;
                }
                let c = count / a / b;
                if c < b {
                    continue;
                }
                if c - a < best_spread {
                    best_spread = c - a;
                    best = (a, b, c);
                }
            }
        }
        Self { n_tau: best.0, n_d: best.1, n_v: best.2, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoalSample {
    pub tau: f64,
    pub d_tau: f64,
    pub v_tau: f64,
}

/// s(t) = a0 + a1 t + a2 t^2 + a3 t^3 + a4 t^4
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct QuarticPolynomial(pub [f64; 5]);

/// d(t) = b0 + b1 t + ... + b5 t^5
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct QuinticPolynomial(pub [f64; 6]);

impl QuarticPolynomial {
    /// Value and first three derivatives at `t`.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let [a0, a1, a2, a3, a4] = self.0;
        [
            a0 + t * (a1 + t * (a2 + t * (a3 + t * a4))),
            a1 + t * (2.0 * a2 + t * (3.0 * a3 + t * 4.0 * a4)),
            2.0 * a2 + t * (6.0 * a3 + t * 12.0 * a4),
            6.0 * a3 + t * 24.0 * a4,
        ]
    }
}

impl QuinticPolynomial {
    /// Value and first three derivatives at `t`.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let [b0, b1, b2, b3, b4, b5] = self.0;
        [
            b0 + t * (b1 + t * (b2 + t * (b3 + t * (b4 + t * b5)))),
            b1 + t * (2.0 * b2 + t * (3.0 * b3 + t * (4.0 * b4 + t * 5.0 * b5))),
            2.0 * b2 + t * (6.0 * b3 + t * (12.0 * b4 + t * 20.0 * b5)),
            6.0 * b3 + t * (24.0 * b4 + t * 60.0 * b5),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PolynomialPair {
    pub lon: QuarticPolynomial,
    pub lat: QuinticPolynomial,
    pub tau: f64,
}

/// Quartic with s(0), s'(0), s''(0) from `init`, s'(tau) = `v_goal`, s''(tau) = 0.
pub fn solve_quartic_lon(init: [f64; 3], v_goal: f64, tau: f64) -> Result<QuarticPolynomial, SamplerError> {
    if !(tau > 0.0) {
        return Err(SamplerError::NonPositiveHorizon(tau));
    }
    let [s0, v0, acc0] = init;
    let a2 = 0.5 * acc0;
    // [3T^2 4T^3; 6T 12T^2] [a3 a4]^T = [rv ra]^T
    let rv = v_goal - v0 - 2.0 * a2 * tau;
    let ra = -2.0 * a2;
    let t2 = tau * tau;
    let a3 = rv / t2 - ra / (3.0 * tau);
    let a4 = ra / (4.0 * t2) - rv / (2.0 * t2 * tau);
    Ok(QuarticPolynomial([s0, v0, a2, a3, a4]))
}

/// Quintic with d(0), d'(0), d''(0) from `init`, d(tau) = `d_goal`, d'(tau) = d''(tau) = 0.
pub fn solve_quintic_lat(init: [f64; 3], d_goal: f64, tau: f64) -> Result<QuinticPolynomial, SamplerError> {
    if !(tau > 0.0) {
        return Err(SamplerError::NonPositiveHorizon(tau));
    }
    let [d0, v0, acc0] = init;
    let b2 = 0.5 * acc0;
    let t2 = tau * tau;
    let t3 = t2 * tau;
    let rp = d_goal - (d0 + v0 * tau + b2 * t2);
    let rv = -(v0 + 2.0 * b2 * tau);
    let ra = -2.0 * b2;
    let b3 = (10.0 * rp - 4.0 * rv * tau + 0.5 * ra * t2) / t3;
    let b4 = (-15.0 * rp + 7.0 * rv * tau - ra * t2) / (t3 * tau);
    let b5 = (6.0 * rp - 3.0 * rv * tau + 0.5 * ra * t2) / (t3 * t2);
    Ok(QuinticPolynomial([d0, v0, b2, b3, b4, b5]))
}

fn grid(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Cartesian product of the three uniform grids, ordered (tau, d, v).
pub fn sample_goals(cfg: &SamplingConfig) -> Vec<GoalSample> {
    let mut out = Vec::with_capacity(cfg.sample_count());
    for i in 0..cfg.n_tau {
        let tau = grid(cfg.tau_min, cfg.tau_max, cfg.n_tau, i);
        for j in 0..cfg.n_d {
            let d_tau = grid(cfg.d_min, cfg.d_max, cfg.n_d, j);
            for k in 0..cfg.n_v {
                out.push(GoalSample { tau, d_tau, v_tau: grid(cfg.v_min, cfg.v_max, cfg.n_v, k) });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateTrajectory {
    /// Position in generation order.
    pub index: usize,
    pub goal: GoalSample,
    pub poly: PolynomialPair,
    /// Discretized points, `t_i = i * dt`. Shorter than the horizon only when
    /// the conversion failed (verdict `ProjectionViolation`).
    pub points: Vec<TrajectoryPoint>,
    pub verdict: Verdict,
    pub costs: Option<CostBreakdown>,
}

impl CandidateTrajectory {
    /// Empty candidate whose point buffer holds a full horizon.
    pub fn with_capacity(horizon_steps: usize) -> Self {
        Self {
            index: 0,
            goal: GoalSample { tau: 0.0, d_tau: 0.0, v_tau: 0.0 },
            poly: PolynomialPair::default(),
            points: Vec::with_capacity(horizon_steps + 1),
            verdict: Verdict::Unchecked,
            costs: None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }
}

/// Number of grid steps covered by the polynomial segment.
pub(crate) fn steps_within(tau: f64, dt: f64) -> usize {
    (tau / dt + 1e-9).floor() as usize
}

/// Fills `out` for one goal sample, reusing its point buffer.
pub fn fill_candidate(
    frame: &FrenetFrame,
    init: &FrenetState,
    goal: GoalSample,
    index: usize,
    cfg: &SamplingConfig,
    out: &mut CandidateTrajectory,
) -> Result<(), SamplerError> {
    let lon = solve_quartic_lon([init.s, init.s_dot, init.s_ddot], goal.v_tau, goal.tau)?;
    let lat = solve_quintic_lat([init.d, init.d_dot, init.d_ddot], goal.d_tau, goal.tau)?;
    out.index = index;
    out.goal = goal;
    out.poly = PolynomialPair { lon, lat, tau: goal.tau };
    out.points.clear();
    out.verdict = Verdict::Unchecked;
    out.costs = None;

    let poly_steps = steps_within(goal.tau, cfg.dt);
    let [s_end, ..] = lon.eval(goal.tau);
    for i in 0..=cfg.horizon_steps {
        let t = i as f64 * cfg.dt;
        let fs = if i <= poly_steps {
            let [s, s_dot, s_ddot, _] = lon.eval(t);
            let [d, d_dot, d_ddot, _] = lat.eval(t);
            FrenetState { s, s_dot, s_ddot, d, d_dot, d_ddot }
        } else {
            FrenetState {
                s: s_end + goal.v_tau * (t - goal.tau),
                s_dot: goal.v_tau,
                s_ddot: 0.0,
                d: goal.d_tau,
                d_dot: 0.0,
                d_ddot: 0.0,
            }
        };
        match frame.frenet_to_cart(&fs) {
            Ok(c) => out.points.push(TrajectoryPoint {
                t,
                x: c.x,
                y: c.y,
                theta: c.theta,
                v: c.v,
                a: c.a,
                kappa: c.kappa,
                kappa_dot: 0.0,
                yaw_rate: 0.0,
                s: fs.s,
                d: fs.d,
            }),
            Err(_) => {
                out.verdict = Verdict::Infeasible { violation: Violation::ProjectionViolation, index: i };
                break;
            }
        }
    }

    let pts = &mut out.points;
    let n = pts.len();
    if n >= 2 {
        for i in 0..n - 1 {
            pts[i].kappa_dot = (pts[i + 1].kappa - pts[i].kappa) / cfg.dt;
            pts[i].yaw_rate = wrap_angle(pts[i + 1].theta - pts[i].theta) / cfg.dt;
        }
        pts[n - 1].kappa_dot = pts[n - 2].kappa_dot;
        pts[n - 1].yaw_rate = pts[n - 2].yaw_rate;
    }
    Ok(())
}

/// Generates one candidate per goal sample, in sampling order.
pub fn generate_candidates(
    frame: &FrenetFrame,
    init: &FrenetState,
    cfg: &SamplingConfig,
) -> Vec<CandidateTrajectory> {
    sample_goals(cfg)
        .into_iter()
        .enumerate()
        .map(|(k, goal)| {
            let mut c = CandidateTrajectory::with_capacity(cfg.horizon_steps);
            // goal taus are positive for a validated config
            if fill_candidate(frame, init, goal, k, cfg, &mut c).is_err() {
                c.verdict = Verdict::Infeasible { violation: Violation::ProjectionViolation, index: 0 };
            }
            c
        })
        .collect()
}
