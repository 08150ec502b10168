//! C ABI for the planner.
//!
//! A planner is created once from a reference path and settings, then driven
//! with one `frt_planner_plan` call per cycle. Every function returns an
//! [`FrtStatus`]; panics are caught at the boundary and reported as
//! `FRT_STATUS_PANIC`. A handle is not synchronized, so callers must not use
//! one handle from two threads at once. The generated header lives in
//! `include/frenet_rt.h`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use frenet_rt::collision::{Obstacle, ObstaclePose};
use frenet_rt::evaluation::{CostWeights, VehicleParams, Violation};
use frenet_rt::frenet::{FrameConfig, ReferencePathInput};
use frenet_rt::geometry::Point2;
use frenet_rt::planner::{InitError, PlanError, PlannerContext, PlannerSettings};
use frenet_rt::sampler::SamplingConfig;
use frenet_rt::state::EvState;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigInvalid = 3,
    /// The reference path was rejected (degenerate, self-intersecting or too curved).
    InvalidPath = 4,
    OutsideProjectionDomain = 5,
    AllInfeasible = 6,
    BufferTooSmall = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FrtPoint {
    pub x: f64,
    pub y: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FrtEvState {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub a: f64,
    pub theta: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FrtFrenetState {
    pub s: f64,
    pub s_dot: f64,
    pub s_ddot: f64,
    pub d: f64,
    pub d_dot: f64,
    pub d_ddot: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FrtTrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub a: f64,
    pub kappa: f64,
    pub s: f64,
    pub d: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FrtObstaclePose {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// Rectangular obstacle; `poses` must hold `pose_count` entries with
/// strictly increasing `t`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FrtObstacle {
    pub id: u32,
    pub half_length: f64,
    pub half_width: f64,
    pub poses: *const FrtObstaclePose,
    pub pose_count: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FrtSettings {
    pub resample_step: f64,
    pub kappa_bound: f64,
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
    pub wheelbase: f64,
    pub delta_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub kappa_dot_max: f64,
    pub length: f64,
    pub width: f64,
    pub w_ref: f64,
    pub w_vel: f64,
    pub w_lat: f64,
    pub w_lon: f64,
    pub v_des: f64,
    pub p_exponent: f64,
}

impl From<PlannerSettings> for FrtSettings {
    fn from(s: PlannerSettings) -> Self {
        let (f, c, v, w) = (s.frame, s.sampling, s.vehicle, s.weights);
        FrtSettings {
            resample_step: f.resample_step,
            kappa_bound: f.kappa_bound,
            tau_min: c.tau_min,
            tau_max: c.tau_max,
            n_tau: c.n_tau,
            d_min: c.d_min,
            d_max: c.d_max,
            n_d: c.n_d,
            v_min: c.v_min,
            v_max: c.v_max,
            n_v: c.n_v,
            dt: c.dt,
            horizon_steps: c.horizon_steps,
            wheelbase: v.wheelbase,
            delta_max: v.delta_max,
            a_min: v.a_min,
            a_max: v.a_max,
            kappa_dot_max: v.kappa_dot_max,
            length: v.length,
            width: v.width,
            w_ref: w.w_ref,
            w_vel: w.w_vel,
            w_lat: w.w_lat,
            w_lon: w.w_lon,
            v_des: w.v_des,
            p_exponent: w.p_exponent,
        }
    }
}

impl From<&FrtSettings> for PlannerSettings {
    fn from(s: &FrtSettings) -> Self {
        PlannerSettings {
            frame: FrameConfig { resample_step: s.resample_step, kappa_bound: s.kappa_bound },
            sampling: SamplingConfig {
                tau_min: s.tau_min,
                tau_max: s.tau_max,
                n_tau: s.n_tau,
                d_min: s.d_min,
                d_max: s.d_max,
                n_d: s.n_d,
                v_min: s.v_min,
                v_max: s.v_max,
                n_v: s.n_v,
                dt: s.dt,
                horizon_steps: s.horizon_steps,
            },
            vehicle: VehicleParams {
                wheelbase: s.wheelbase,
                delta_max: s.delta_max,
                a_min: s.a_min,
                a_max: s.a_max,
                kappa_dot_max: s.kappa_dot_max,
                length: s.length,
                width: s.width,
            },
            weights: CostWeights {
                w_ref: s.w_ref,
                w_vel: s.w_vel,
                w_lat: s.w_lat,
                w_lon: s.w_lon,
                v_des: s.v_des,
                p_exponent: s.p_exponent,
            },
        }
    }
}

/// Per-cycle summary filled by `frt_planner_plan`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FrtPlanInfo {
    pub optimal_index: usize,
    pub candidate_count: usize,
    pub feasible_count: usize,
    pub cost: f64,
    /// Rejections per constraint: accel, curvature, curvature rate, yaw
    /// rate, projection, collision.
    pub violation_counts: [usize; 6],
}

/// Opaque planner handle.
pub struct FrtPlanner {
    ctx: PlannerContext,
    obstacles: Vec<Obstacle>,
    last_error: CString,
}

impl FrtPlanner {
    fn fail(&mut self, status: FrtStatus, msg: impl ToString) -> FrtStatus {
        self.last_error = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
        status
    }
}

fn guard(f: impl FnOnce() -> FrtStatus) -> FrtStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(FrtStatus::Panic)
}

/// Writes the default settings into `out`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn frt_settings_default(out: *mut FrtSettings) -> FrtStatus {
    if out.is_null() {
        return FrtStatus::NullPointer;
    }
    out.write(PlannerSettings::default().into());
    FrtStatus::Ok
}

/// Builds a planner from `point_count` path points. `settings` may be null
/// for defaults. On success `*out` owns a handle to release with
/// `frt_planner_free`.
///
/// # Safety
/// `points` must hold `point_count` readable entries, `settings` must be
/// null or readable and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn frt_planner_new(
    points: *const FrtPoint,
    point_count: usize,
    settings: *const FrtSettings,
    out: *mut *mut FrtPlanner,
) -> FrtStatus {
    guard(|| {
        if points.is_null() || out.is_null() {
            return FrtStatus::NullPointer;
        }
        out.write(ptr::null_mut());
        let pts = slice::from_raw_parts(points, point_count);
        let path = ReferencePathInput::new(pts.iter().map(|p| Point2::new(p.x, p.y)).collect());
        let settings = match settings.as_ref() {
            Some(s) => PlannerSettings::from(s),
            None => PlannerSettings::default(),
        };
        match PlannerContext::init(&path, settings) {
            Ok(ctx) => {
                let planner = FrtPlanner { ctx, obstacles: Vec::new(), last_error: CString::default() };
                out.write(Box::into_raw(Box::new(planner)));
                FrtStatus::Ok
            }
            Err(InitError::Config(_)) => FrtStatus::ConfigInvalid,
            Err(InitError::Frame(_)) => FrtStatus::InvalidPath,
        }
    })
}

/// Releases a planner. Null is ignored.
///
/// # Safety
/// `planner` must be null or a handle from `frt_planner_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn frt_planner_free(planner: *mut FrtPlanner) {
    if !planner.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(planner))));
    }
}

/// Replaces the obstacle set used by subsequent cycles. The data is copied.
///
/// # Safety
/// `planner` must be a live handle; `obstacles` must hold `count` entries
/// (may be null when `count` is 0), each with valid `poses`.
#[no_mangle]
pub unsafe extern "C" fn frt_planner_set_obstacles(
    planner: *mut FrtPlanner,
    obstacles: *const FrtObstacle,
    count: usize,
) -> FrtStatus {
    guard(|| {
        let Some(p) = planner.as_mut() else {
            return FrtStatus::NullPointer;
        };
        if count > 0 && obstacles.is_null() {
            return FrtStatus::NullPointer;
        }
        let src = if count == 0 { &[][..] } else { slice::from_raw_parts(obstacles, count) };
        let mut converted = Vec::with_capacity(count);
        for o in src {
            if o.pose_count > 0 && o.poses.is_null() {
                return FrtStatus::NullPointer;
            }
            let poses =
                if o.pose_count == 0 { &[][..] } else { slice::from_raw_parts(o.poses, o.pose_count) };
            let obstacle = Obstacle {
                id: o.id,
                half_length: o.half_length,
                half_width: o.half_width,
                prediction: poses
                    .iter()
                    .map(|q| ObstaclePose { t: q.t, x: q.x, y: q.y, theta: q.theta })
                    .collect(),
            };
            if let Err(e) = obstacle.validate() {
                return p.fail(FrtStatus::InvalidArgument, e);
            }
            converted.push(obstacle);
        }
        p.obstacles = converted;
        FrtStatus::Ok
    })
}

/// Runs one planning cycle and copies the optimal trajectory into `out`.
///
/// `*out_len` receives the number of points (also when the buffer is too
/// small, so callers can size it). `info` may be null.
///
/// # Safety
/// `planner` must be a live handle, `state` readable, `out` writable for
/// `capacity` entries, `out_len` writable and `info` null or writable.
#[no_mangle]
pub unsafe extern "C" fn frt_planner_plan(
    planner: *mut FrtPlanner,
    state: *const FrtEvState,
    out: *mut FrtTrajectoryPoint,
    capacity: usize,
    out_len: *mut usize,
    info: *mut FrtPlanInfo,
) -> FrtStatus {
    guard(|| {
        let Some(p) = planner.as_mut() else {
            return FrtStatus::NullPointer;
        };
        if state.is_null() || out_len.is_null() || (out.is_null() && capacity > 0) {
            return FrtStatus::NullPointer;
        }
        out_len.write(0);
        let s = state.read();
        let ev = EvState::new(s.x, s.y, s.v, s.a, s.theta);
        let FrtPlanner { ctx, obstacles, last_error } = p;
        let result = ctx.plan_cycle(&ev, obstacles);
        let (status, msg) = match result {
            Ok(r) => {
                if let Some(info) = info.as_mut() {
                    let mut counts = [0usize; 6];
                    for c in r.candidates {
                        if let frenet_rt::Verdict::Infeasible { violation, .. } = c.verdict {
                            counts[violation.ordinal()] += 1;
                        }
                    }
                    *info = FrtPlanInfo {
                        optimal_index: r.optimal_index,
                        candidate_count: r.candidates.len(),
                        feasible_count: r.candidates.iter().filter(|c| c.is_feasible()).count(),
                        cost: r.optimal.costs.map_or(f64::NAN, |c| c.j_sum),
                        violation_counts: counts,
                    };
                }
                let pts = &r.optimal.points;
                out_len.write(pts.len());
                if pts.len() > capacity {
                    (FrtStatus::BufferTooSmall, None)
                } else {
                    for (i, q) in pts.iter().enumerate() {
                        out.add(i).write(FrtTrajectoryPoint {
                            t: q.t,
                            x: q.x,
                            y: q.y,
                            theta: q.theta,
                            v: q.v,
                            a: q.a,
                            kappa: q.kappa,
                            s: q.s,
                            d: q.d,
                        });
                    }
                    (FrtStatus::Ok, None)
                }
            }
            Err(e) => {
                if let (Some(info), PlanError::AllInfeasible { total, counts }) = (info.as_mut(), &e) {
                    *info = FrtPlanInfo {
                        optimal_index: 0,
                        candidate_count: *total,
                        feasible_count: 0,
                        cost: f64::NAN,
                        violation_counts: Violation::ALL.map(|v| counts.get(v)),
                    };
                }
                let status = match e {
                    PlanError::AllInfeasible { .. } => FrtStatus::AllInfeasible,
                    PlanError::OutsideProjectionDomain(_) => FrtStatus::OutsideProjectionDomain,
                };
                (status, Some(e.to_string()))
            }
        };
        if let Some(m) = msg {
            *last_error = CString::new(m).unwrap_or_default();
        }
        status
    })
}

/// Projects a Cartesian state onto the planner's reference frame.
///
/// # Safety
/// `planner` must be a live handle, `state` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn frt_planner_cart_to_frenet(
    planner: *const FrtPlanner,
    state: *const FrtEvState,
    out: *mut FrtFrenetState,
) -> FrtStatus {
    guard(|| {
        let Some(p) = planner.as_ref() else {
            return FrtStatus::NullPointer;
        };
        if state.is_null() || out.is_null() {
            return FrtStatus::NullPointer;
        }
        let s = state.read();
        match p.ctx.frame().cart_to_frenet(&EvState::new(s.x, s.y, s.v, s.a, s.theta)) {
            Ok(f) => {
                out.write(FrtFrenetState {
                    s: f.s,
                    s_dot: f.s_dot,
                    s_ddot: f.s_ddot,
                    d: f.d,
                    d_dot: f.d_dot,
                    d_ddot: f.d_ddot,
                });
                FrtStatus::Ok
            }
            Err(_) => FrtStatus::OutsideProjectionDomain,
        }
    })
}

/// Arc length of the resampled reference path.
///
/// # Safety
/// `planner` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn frt_planner_path_length(planner: *const FrtPlanner, out: *mut f64) -> FrtStatus {
    let Some(p) = planner.as_ref() else {
        return FrtStatus::NullPointer;
    };
    if out.is_null() {
        return FrtStatus::NullPointer;
    }
    out.write(p.ctx.frame().length());
    FrtStatus::Ok
}

/// Points per trajectory for the planner's horizon, for sizing buffers.
///
/// # Safety
/// `planner` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn frt_planner_trajectory_len(planner: *const FrtPlanner) -> usize {
    planner.as_ref().map_or(0, |p| p.ctx.settings().sampling.horizon_steps + 1)
}

/// Detail message of the last failed call on this planner, or an empty
/// string. Valid until the next call on the same handle.
///
/// # Safety
/// `planner` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn frt_planner_last_error(planner: *const FrtPlanner) -> *const c_char {
    match planner.as_ref() {
        Some(p) => p.last_error.as_ptr(),
        None => c"".as_ptr(),
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn frt_status_string(status: FrtStatus) -> *const c_char {
    let s: &'static CStr = match status {
        FrtStatus::Ok => c"ok",
        FrtStatus::NullPointer => c"null pointer argument",
        FrtStatus::InvalidArgument => c"invalid argument",
        FrtStatus::ConfigInvalid => c"invalid planner settings",
        FrtStatus::InvalidPath => c"invalid reference path",
        FrtStatus::OutsideProjectionDomain => c"state outside the projection domain",
        FrtStatus::AllInfeasible => c"all candidates infeasible",
        FrtStatus::BufferTooSmall => c"output buffer too small",
        FrtStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Library version, e.g. "0.1.0".
#[no_mangle]
pub extern "C" fn frt_version() -> *const c_char {
    const VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => c"unknown",
        };
    VERSION.as_ptr()
}
