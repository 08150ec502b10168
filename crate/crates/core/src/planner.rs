//! One-time initialization and the cyclic receive / generate / evaluate /
//! emit loop, plus an ideal-tracking closed-loop runner.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collision::{check_collision, Obstacle};
use crate::config::ConfigError;
use crate::evaluation::{select_optimal_with, CostWeights, EvaluationError, VehicleParams, ViolationCounts};
use crate::frenet::{FrameConfig, FrameError, FrenetFrame, ReferencePathInput, TransformError};
use crate::sampler::{fill_candidate, sample_goals, CandidateTrajectory, GoalSample, SamplingConfig};
use crate::state::{EvState, FrenetState, TrajectoryPoint};

/// Every tunable of the planner except the reference path itself.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerSettings {
    pub frame: FrameConfig,
    pub sampling: SamplingConfig,
    pub vehicle: VehicleParams,
    pub weights: CostWeights,
}

impl PlannerSettings {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.frame.resample_step > 0.0 && self.frame.resample_step.is_finite()) {
            return Err(ConfigError::new("frame.resample_step", "must be > 0"));
        }
        if !(self.frame.kappa_bound > 0.0) {
            return Err(ConfigError::new("frame.kappa_bound", "must be > 0"));
        }
        self.sampling.validate()?;
        self.vehicle.validate()?;
        self.weights.validate()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InitError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("ConfigInvalid: {0}")]
    Config(#[from] ConfigError),
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum PlanError {
    #[error("ego state outside the projection domain: {0}")]
    OutsideProjectionDomain(TransformError),
    #[error("all {total} candidates infeasible ({counts})")]
    AllInfeasible { total: usize, counts: ViolationCounts },
}

impl From<EvaluationError> for PlanError {
    fn from(e: EvaluationError) -> Self {
        match e {
            EvaluationError::AllInfeasible { total, counts } => PlanError::AllInfeasible { total, counts },
            EvaluationError::NoCandidates => {
                PlanError::AllInfeasible { total: 0, counts: ViolationCounts::default() }
            }
        }
    }
}

/// Wall time spent in each step of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhaseTimings {
    pub receive: Duration,
    pub generate: Duration,
    pub evaluate: Duration,
    pub serialize: Duration,
}

impl PhaseTimings {
    pub fn total(&self) -> Duration {
        self.receive + self.generate + self.evaluate + self.serialize
    }
}

#[derive(Debug)]
pub struct PlanResult<'a> {
    pub cycle: u64,
    pub frenet: FrenetState,
    pub optimal_index: usize,
    pub optimal: &'a CandidateTrajectory,
    /// Every candidate of this cycle with its verdict and (if feasible) costs.
    pub candidates: &'a [CandidateTrajectory],
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone)]
pub struct PlannerContext {
    frame: FrenetFrame,
    settings: PlannerSettings,
    goals: Vec<GoalSample>,
    candidates: Vec<CandidateTrajectory>,
    cycle_index: u64,
}

impl PlannerContext {
    /// Builds the frame and allocates every per-cycle buffer.
    pub fn init(path: &ReferencePathInput, settings: PlannerSettings) -> Result<Self, InitError> {
        settings.validate()?;
        let frame = FrenetFrame::build(path, &settings.frame)?;
        let goals = sample_goals(&settings.sampling);
        let candidates = (0..goals.len())
            .map(|_| CandidateTrajectory::with_capacity(settings.sampling.horizon_steps))
            .collect();
        Ok(Self { frame, settings, goals, candidates, cycle_index: 0 })
    }

    pub fn frame(&self) -> &FrenetFrame {
        &self.frame
    }

    pub fn settings(&self) -> &PlannerSettings {
        &self.settings
    }

    pub fn candidate_capacity(&self) -> usize {
        self.candidates.capacity()
    }

    pub fn cycle_index(&self) -> u64 {
        self.cycle_index
    }

    /// Rewinds the logical clock used to time-align obstacle predictions.
    pub fn reset_cycle_index(&mut self, cycle: u64) {
        self.cycle_index = cycle;
    }

    /// Runs one planning cycle. Performs no heap allocation.
    pub fn plan_cycle(
        &mut self,
        state: &EvState,
        obstacles: &[Obstacle],
    ) -> Result<PlanResult<'_>, PlanError> {
        let Self { frame, settings, goals, candidates, cycle_index } = self;
        let cycle = *cycle_index;
        *cycle_index += 1;
        let start_time = cycle as f64 * settings.sampling.dt;

        let t0 = Instant::now();
        let init = frame.cart_to_frenet(state).map_err(PlanError::OutsideProjectionDomain)?;
        let t1 = Instant::now();

        for (k, (goal, cand)) in goals.iter().zip(candidates.iter_mut()).enumerate() {
            // taus are positive for validated settings
            let _ = fill_candidate(frame, &init, *goal, k, &settings.sampling, cand);
        }
        let t2 = Instant::now();

        let vehicle = settings.vehicle;
        let best = select_optimal_with(candidates, &settings.vehicle, &settings.weights, |c| {
            check_collision(c, obstacles, &vehicle, start_time)
        });
        let t3 = Instant::now();
        let best = best?;

        Ok(PlanResult {
            cycle,
            frenet: init,
            optimal_index: best,
            optimal: &candidates[best],
            candidates,
            timings: PhaseTimings {
                receive: t1 - t0,
                generate: t2 - t1,
                evaluate: t3 - t2,
                serialize: Duration::ZERO,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    /// Advance exactly one `dt` per cycle.
    #[default]
    Logical,
    /// Advance by the measured planning time (not reproducible).
    WallClock,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedLoopOptions {
    pub max_cycles: usize,
    pub goal_margin: f64,
    pub step: StepMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    GoalReached,
    MaxCycles,
    AllInfeasible(ViolationCounts),
    OutsideProjectionDomain,
    /// The remote planner answered with an empty trajectory.
    NoTrajectory,
    ConnectionLost,
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::GoalReached => "GoalReached",
            Termination::MaxCycles => "MaxCycles",
            Termination::AllInfeasible(_) => "AllInfeasible",
            Termination::OutsideProjectionDomain => "OutsideProjectionDomain",
            Termination::NoTrajectory => "NoTrajectory",
            Termination::ConnectionLost => "ConnectionLost",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub cycle: u64,
    /// Ego state the cycle planned from.
    pub state: EvState,
    pub frenet: FrenetState,
    pub optimal: Vec<TrajectoryPoint>,
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopTrace {
    pub records: Vec<CycleRecord>,
    pub termination: Termination,
    pub final_state: EvState,
}

/// Ego state after following `traj` for `elapsed` seconds (linear
/// interpolation between points, clamped to the horizon).
pub fn state_after(traj: &[TrajectoryPoint], elapsed: f64) -> EvState {
    match traj {
        [] => EvState::default(),
        [only] => EvState::from(only),
        _ => {
            let last = traj.len() - 1;
            let k = traj.partition_point(|p| p.t <= elapsed).clamp(1, last);
            let (a, b) = (&traj[k - 1], &traj[k]);
            let u = ((elapsed - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
            if u == 1.0 {
                return EvState::from(b);
            }
            if u == 0.0 {
                return EvState::from(a);
            }
            let lerp = |p: f64, q: f64| p + (q - p) * u;
            EvState {
                x: lerp(a.x, b.x),
                y: lerp(a.y, b.y),
                v: lerp(a.v, b.v),
                a: lerp(a.a, b.a),
                theta: a.theta + crate::geometry::wrap_angle(b.theta - a.theta) * u,
            }
        }
    }
}

/// Shared stepping rule of the in-process and bridged loops.
///
/// `plan` receives the current state and returns the optimal trajectory with
/// the cycle's timings, or the reason the loop has to stop.
pub fn drive_loop<F>(
    frame: &FrenetFrame,
    initial: EvState,
    opts: &ClosedLoopOptions,
    dt: f64,
    mut plan: F,
) -> ClosedLoopTrace
where
    F: FnMut(u64, &EvState) -> Result<(FrenetState, Vec<TrajectoryPoint>, PhaseTimings), Termination>,
{
    let goal_s = frame.length() - opts.goal_margin;
    let mut records = Vec::with_capacity(opts.max_cycles.min(4096));
    let mut state = initial;
    let reached = |st: &EvState| frame.cart_to_frenet(st).map(|fs| fs.s >= goal_s);

    let termination = loop {
        match reached(&state) {
            Ok(true) => break Termination::GoalReached,
            Ok(false) => {}
            Err(_) => break Termination::OutsideProjectionDomain,
        }
        if records.len() >= opts.max_cycles {
            break Termination::MaxCycles;
        }
        let cycle = records.len() as u64;
        let (frenet, optimal, timings) = match plan(cycle, &state) {
            Ok(r) => r,
            Err(t) => break t,
        };
        let elapsed = match opts.step {
            StepMode::Logical => dt,
            StepMode::WallClock => timings.total().as_secs_f64(),
        };
        let next = match opts.step {
            StepMode::Logical if optimal.len() > 1 => EvState::from(&optimal[1]),
            _ => state_after(&optimal, elapsed),
        };
        records.push(CycleRecord { cycle, state, frenet, optimal, timings });
        state = next;
    };
    ClosedLoopTrace { records, termination, final_state: state }
}

/// Plans, follows the optimal trajectory ideally for one step, and repeats
/// until the goal, a planner failure, or `max_cycles`.
pub fn run_closed_loop(
    ctx: &mut PlannerContext,
    initial: EvState,
    obstacles: &[Obstacle],
    opts: &ClosedLoopOptions,
) -> ClosedLoopTrace {
    let frame = ctx.frame.clone();
    let dt = ctx.settings.sampling.dt;
    ctx.reset_cycle_index(0);
    drive_loop(&frame, initial, opts, dt, |_, state| match ctx.plan_cycle(state, obstacles) {
        Ok(r) => Ok((r.frenet, r.optimal.points.clone(), r.timings)),
        Err(PlanError::AllInfeasible { counts, .. }) => Err(Termination::AllInfeasible(counts)),
        Err(PlanError::OutsideProjectionDomain(_)) => Err(Termination::OutsideProjectionDomain),
    })
}
