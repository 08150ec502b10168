//! Curvilinear (s, d) frame over a resampled reference path.
//!
//! The input polyline is resampled at uniform arc-length spacing. Heading,
//! curvature and curvature slope are finite-difference estimates on that grid
//! and every query linearly interpolates between samples, so a lookup is a
//! constant-time index computation.
//!
//! The lateral offset `d` is measured along the left normal of the
//! interpolated heading, positive to the left of the direction of travel.
//! [`FrenetFrame::project`] inverts exactly that map: it finds the arc length
//! where the residual vector is orthogonal to the interpolated heading.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{point_segment_distance_sq, segments_intersect, wrap_angle, Point2};
use crate::state::{CartesianState, EvState, FrenetState};

/// Longitudinal speeds below this are treated as standstill in the
/// Frenet-to-Cartesian conversion (heading follows the path).
const STANDSTILL_S_DOT: f64 = 1e-6;
const MIN_SEGMENT: f64 = 1e-9;
const PROJECTION_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("reference path needs at least two distinct points")]
    DegeneratePath,
    #[error("reference path intersects itself (segments {first} and {second})")]
    SelfIntersectingPath { first: usize, second: usize },
    #[error("reference curvature {kappa:.4} 1/m at s = {s:.3} m reaches the bound {bound:.4} 1/m")]
    CurvatureBoundExceeded { s: f64, kappa: f64, bound: f64 },
    #[error("resample step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum TransformError {
    #[error("position lies outside the projection domain of the reference path")]
    OutsideProjectionDomain,
    #[error("curvilinear transform is singular (1 - d*kappa_r = {0:.3e})")]
    SingularTransform(f64),
    #[error("arc length {s:.3} m outside [0, {length:.3}] m")]
    OutOfRange { s: f64, length: f64 },
}

/// Ordered reference path points as read from a scenario.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReferencePathInput {
    pub points: Vec<Point2>,
}

impl ReferencePathInput {
    pub fn new(points: Vec<Point2>) -> Self {
        Self { points }
    }
}

impl FromIterator<(f64, f64)> for ReferencePathInput {
    fn from_iter<I: IntoIterator<Item = (f64, f64)>>(iter: I) -> Self {
        Self { points: iter.into_iter().map(Point2::from).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameConfig {
    pub resample_step: f64,
    pub kappa_bound: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self { resample_step: 0.5, kappa_bound: 0.2 }
    }
}

/// Interpolated reference quantities at one arc length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefPoint {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub kappa: f64,
    /// d kappa / d s
    pub dkappa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrenetFrame {
    s: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    theta: Vec<f64>,
    kappa: Vec<f64>,
    dkappa: Vec<f64>,
    step: f64,
    kappa_bound: f64,
}

impl FrenetFrame {
    pub fn build(path: &ReferencePathInput, config: &FrameConfig) -> Result<Self, FrameError> {
        let step = config.resample_step;
        if !(step > 0.0 && step.is_finite()) {
            return Err(FrameError::InvalidStep(step));
        }

        let mut pts: Vec<Point2> = Vec::with_capacity(path.points.len());
        for &p in &path.points {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(FrameError::DegeneratePath);
            }
            match pts.last() {
                Some(&last) if last.distance(p) <= MIN_SEGMENT => {}
                _ => pts.push(p),
            }
        }
        if pts.len() < 2 {
            return Err(FrameError::DegeneratePath);
        }
        check_simple(&pts)?;

        let mut cum = Vec::with_capacity(pts.len());
        cum.push(0.0);
        for w in pts.windows(2) {
            cum.push(cum[cum.len() - 1] + w[0].distance(w[1]));
        }
        let total = cum[cum.len() - 1];

        let mut intervals = ((total / step) - 1e-9).ceil().max(1.0) as usize;
        // fold a sliver remainder into the previous interval
        if intervals >= 2 && total - (intervals - 1) as f64 * step < 0.5 * step {
            intervals -= 1;
        }
        let n = intervals + 1;

        // headings at the input vertices, unwrapped along the polyline
        let mut vertex_theta: Vec<f64> = Vec::with_capacity(pts.len());
        let px: Vec<f64> = pts.iter().map(|p| p.x).collect();
        let py: Vec<f64> = pts.iter().map(|p| p.y).collect();
        for i in 0..pts.len() {
            let raw = derivative(&cum, &py, i).atan2(derivative(&cum, &px, i));
            let value = match vertex_theta.last() {
                Some(&prev) => prev + wrap_angle(raw - prev),
                None => raw,
            };
            vertex_theta.push(value);
        }

        let mut s = Vec::with_capacity(n);
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        let mut theta = Vec::with_capacity(n);
        let mut seg = 0;
        for i in 0..n {
            let si = if i == intervals { total } else { i as f64 * step };
            while seg + 2 < pts.len() && cum[seg + 1] < si {
                seg += 1;
            }
            let u = ((si - cum[seg]) / (cum[seg + 1] - cum[seg])).clamp(0.0, 1.0);
            let p = pts[seg] + (pts[seg + 1] - pts[seg]) * u;
            s.push(si);
            x.push(p.x);
            y.push(p.y);
            theta.push(vertex_theta[seg] + (vertex_theta[seg + 1] - vertex_theta[seg]) * u);
        }
        let kappa: Vec<f64> = (0..n).map(|i| derivative(&s, &theta, i)).collect();
        let dkappa: Vec<f64> = (0..n).map(|i| derivative(&s, &kappa, i)).collect();

        if let Some(i) = kappa.iter().position(|k| !(k.abs() < config.kappa_bound)) {
            return Err(FrameError::CurvatureBoundExceeded {
                s: s[i],
                kappa: kappa[i],
                bound: config.kappa_bound,
            });
        }

        Ok(Self { s, x, y, theta, kappa, dkappa, step, kappa_bound: config.kappa_bound })
    }

    /// Total arc length S.
    pub fn length(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn kappa_bound(&self) -> f64 {
        self.kappa_bound
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn s_samples(&self) -> &[f64] {
        &self.s
    }

    pub fn theta_samples(&self) -> &[f64] {
        &self.theta
    }

    pub fn kappa_samples(&self) -> &[f64] {
        &self.kappa
    }

    pub fn position_samples(&self) -> impl Iterator<Item = Point2> + '_ {
        self.x.iter().zip(&self.y).map(|(&x, &y)| Point2::new(x, y))
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let last = self.s.len() - 2;
        let mut i = ((s / self.step).floor().max(0.0) as usize).min(last);
        if i > 0 && s < self.s[i] {
            i -= 1;
        }
        let u = (s - self.s[i]) / (self.s[i + 1] - self.s[i]);
        (i, u)
    }

    /// Reference quantities at arc length `s` (clamped to the path).
    pub fn sample(&self, s: f64) -> RefPoint {
        let s = s.clamp(0.0, self.length());
        let (i, u) = self.locate(s);
        let lerp = |v: &[f64]| v[i] + (v[i + 1] - v[i]) * u;
        RefPoint {
            s,
            x: lerp(&self.x),
            y: lerp(&self.y),
            theta: lerp(&self.theta),
            kappa: lerp(&self.kappa),
            dkappa: lerp(&self.dkappa),
        }
    }

    fn tangential_residual(&self, p: Point2, s: f64) -> f64 {
        let r = self.sample(s);
        let (sin, cos) = r.theta.sin_cos();
        (p.x - r.x) * cos + (p.y - r.y) * sin
    }

    /// Projects a position onto the path, returning `(s, d)`.
    pub fn project(&self, p: Point2) -> Result<(f64, f64), TransformError> {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(TransformError::OutsideProjectionDomain);
        }
        let n = self.s.len();
        let mut nearest = 0;
        let mut best = f64::INFINITY;
        for i in 0..n - 1 {
            let dist = point_segment_distance_sq(
                p,
                Point2::new(self.x[i], self.y[i]),
                Point2::new(self.x[i + 1], self.y[i + 1]),
            );
            if dist < best {
                best = dist;
                nearest = i;
            }
        }

        // the residual is strictly decreasing in s inside the projection domain
        let mut lo = nearest.saturating_sub(1);
        let mut hi = (nearest + 2).min(n - 1);
        while lo > 0 && self.tangential_residual(p, self.s[lo]) < 0.0 {
            lo -= 1;
        }
        while hi < n - 1 && self.tangential_residual(p, self.s[hi]) > 0.0 {
            hi += 1;
        }
        let g_lo = self.tangential_residual(p, self.s[lo]);
        let g_hi = self.tangential_residual(p, self.s[hi]);

        let s = if g_lo < 0.0 {
            if -g_lo > self.step {
                return Err(TransformError::OutsideProjectionDomain);
            }
            self.s[lo]
        } else if g_hi > 0.0 {
            if g_hi > self.step {
                return Err(TransformError::OutsideProjectionDomain);
            }
            self.s[hi]
        } else {
            let (mut a, mut b) = (self.s[lo], self.s[hi]);
            while b - a > PROJECTION_TOL {
                let mid = 0.5 * (a + b);
                if self.tangential_residual(p, mid) >= 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        };

        let r = self.sample(s);
        let (sin, cos) = r.theta.sin_cos();
        let d = -(p.x - r.x) * sin + (p.y - r.y) * cos;
        if !((d * r.kappa).abs() < 1.0) {
            return Err(TransformError::OutsideProjectionDomain);
        }
        Ok((s, d))
    }

    /// Converts an ego state to curvilinear coordinates.
    ///
    /// The ego curvature is not part of [`EvState`]; the lateral shape term
    /// d'' (second derivative of d w.r.t. s) is taken as zero, i.e. the
    /// vehicle is assumed to move parallel to its current offset curve.
    pub fn cart_to_frenet(&self, state: &EvState) -> Result<FrenetState, TransformError> {
        self.to_frenet(state.x, state.y, state.theta, state.v, state.a, None)
    }

    /// Converts a full Cartesian kinematic state (including curvature).
    pub fn cartesian_to_frenet(&self, state: &CartesianState) -> Result<FrenetState, TransformError> {
        self.to_frenet(state.x, state.y, state.theta, state.v, state.a, Some(state.kappa))
    }

    fn to_frenet(
        &self,
        x: f64,
        y: f64,
        theta: f64,
        v: f64,
        a: f64,
        kappa: Option<f64>,
    ) -> Result<FrenetState, TransformError> {
        let (s, d) = self.project(Point2::new(x, y))?;
        let r = self.sample(s);
        let one_minus = 1.0 - r.kappa * d;
        let delta = wrap_angle(theta - r.theta);
        let (sin_dt, cos_dt) = delta.sin_cos();
        if cos_dt.abs() < 1e-9 {
            return Err(TransformError::SingularTransform(cos_dt));
        }
        let tan_dt = sin_dt / cos_dt;
        let d_prime = one_minus * tan_dt;
        let kappa_r_d_prime = r.dkappa * d + r.kappa * d_prime;

        let (d_pp, kappa) = match kappa {
            Some(k) => {
                let d_pp = -kappa_r_d_prime * tan_dt
                    + one_minus / (cos_dt * cos_dt) * (k * one_minus / cos_dt - r.kappa);
                (d_pp, k)
            }
            None => {
                let k =
                    (kappa_r_d_prime * tan_dt * cos_dt * cos_dt / one_minus + r.kappa) * cos_dt / one_minus;
                (0.0, k)
            }
        };

        let s_dot = v * cos_dt / one_minus;
        let delta_prime = one_minus / cos_dt * kappa - r.kappa;
        let s_ddot = (a * cos_dt - s_dot * s_dot * (d_prime * delta_prime - kappa_r_d_prime)) / one_minus;
        Ok(FrenetState {
            s,
            s_dot,
            s_ddot,
            d,
            d_dot: d_prime * s_dot,
            d_ddot: d_pp * s_dot * s_dot + d_prime * s_ddot,
        })
    }

    /// Converts a curvilinear state back to Cartesian position, heading,
    /// speed, acceleration and curvature.
    pub fn frenet_to_cart(&self, fs: &FrenetState) -> Result<CartesianState, TransformError> {
        let length = self.length();
        if !(fs.s >= 0.0 && fs.s <= length) {
            return Err(TransformError::OutOfRange { s: fs.s, length });
        }
        let r = self.sample(fs.s);
        let one_minus = 1.0 - r.kappa * fs.d;
        if !(one_minus > 0.0) {
            return Err(TransformError::SingularTransform(one_minus));
        }
        let (sin_r, cos_r) = r.theta.sin_cos();

        let (d_prime, d_pp) = if fs.s_dot.abs() > STANDSTILL_S_DOT {
            let dp = fs.d_dot / fs.s_dot;
            (dp, (fs.d_ddot - dp * fs.s_ddot) / (fs.s_dot * fs.s_dot))
        } else {
            (0.0, 0.0)
        };

        let delta = d_prime.atan2(one_minus);
        let cos_dt = delta.cos();
        let tan_dt = d_prime / one_minus;
        let kappa_r_d_prime = r.dkappa * fs.d + r.kappa * d_prime;
        let kappa =
            ((d_pp + kappa_r_d_prime * tan_dt) * cos_dt * cos_dt / one_minus + r.kappa) * cos_dt / one_minus;

        let speed = (one_minus * fs.s_dot).hypot(fs.d_dot);
        let v = if fs.s_dot < 0.0 { -speed } else { speed };
        let delta_prime = one_minus / cos_dt * kappa - r.kappa;
        let a = fs.s_ddot * one_minus / cos_dt
            + fs.s_dot * fs.s_dot / cos_dt * (d_prime * delta_prime - kappa_r_d_prime);

        Ok(CartesianState {
            x: r.x - fs.d * sin_r,
            y: r.y + fs.d * cos_r,
            theta: wrap_angle(delta + r.theta),
            v,
            a,
            kappa,
        })
    }
}

/// Three-point Lagrange derivative of `f` over `s` at sample `i`
/// (central in the interior, one-sided second order at the ends).
fn derivative(s: &[f64], f: &[f64], i: usize) -> f64 {
    let n = s.len();
    if n == 2 {
        return (f[1] - f[0]) / (s[1] - s[0]);
    }
    let j = i.clamp(1, n - 2) - 1;
    let (s0, s1, s2) = (s[j], s[j + 1], s[j + 2]);
    let at = s[i];
    let l0 = ((at - s1) + (at - s2)) / ((s0 - s1) * (s0 - s2));
    let l1 = ((at - s0) + (at - s2)) / ((s1 - s0) * (s1 - s2));
    let l2 = ((at - s0) + (at - s1)) / ((s2 - s0) * (s2 - s1));
    f[j] * l0 + f[j + 1] * l1 + f[j + 2] * l2
}

/// Rejects polylines where non-adjacent segments touch or adjacent ones fold back.
fn check_simple(pts: &[Point2]) -> Result<(), FrameError> {
    let segs = pts.len() - 1;
    for i in 0..segs {
        let (a0, a1) = (pts[i], pts[i + 1]);
        for j in i + 1..segs {
            let (b0, b1) = (pts[j], pts[j + 1]);
            let hit = if j == i + 1 {
                let (u, v) = (a1 - a0, b1 - b0);
                u.cross(v) == 0.0 && u.dot(v) < 0.0
            } else {
                segments_intersect(a0, a1, b0, b1)
            };
            if hit {
                return Err(FrameError::SelfIntersectingPath { first: i, second: j });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn straight(len: f64) -> FrenetFrame {
        let path: ReferencePathInput = [(0.0, 0.0), (len, 0.0)].into_iter().collect();
        FrenetFrame::build(&path, &FrameConfig { resample_step: 1.0, kappa_bound: 0.2 }).unwrap()
    }

    fn arc(radius: f64, deg_step: f64, deg_end: f64) -> ReferencePathInput {
        let n = (deg_end / deg_step).round() as usize;
        (0..=n)
            .map(|i| {
                let a = (i as f64 * deg_step).to_radians();
                (radius * a.cos(), radius * a.sin())
            })
            .collect()
    }

    #[test]
    fn straight_frame_is_flat() {
        let f = straight(100.0);
        assert_eq!(f.length(), 100.0);
        assert_eq!(f.len(), 101);
        assert!(f.theta_samples().iter().all(|t| t.abs() < 1e-15));
        assert!(f.kappa_samples().iter().all(|k| k.abs() < 1e-15));
    }

    #[test]
    fn circle_curvature_close_to_inverse_radius() {
        let path = arc(50.0, 1.0, 270.0);
        let f = FrenetFrame::build(&path, &FrameConfig { resample_step: 0.5, kappa_bound: 0.2 }).unwrap();
        let worst = f.kappa_samples().iter().map(|k| (k - 0.02).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-3, "max curvature error {worst}");
    }

    #[test]
    fn heading_is_unwrapped() {
        let path = arc(30.0, 0.5, 350.0);
        let f = FrenetFrame::build(&path, &FrameConfig::default()).unwrap();
        let jump = f.theta_samples().windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        assert!(jump < PI);
        // total turning ~350 degrees, so the samples leave (-pi, pi]
        assert!(f.theta_samples().last().unwrap() - f.theta_samples()[0] > 5.5);
    }

    #[test]
    fn crossing_path_rejected() {
        let path: ReferencePathInput =
            [(0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (0.5, -1.0)].into_iter().collect();
        assert!(matches!(
            FrenetFrame::build(&path, &FrameConfig::default()),
            Err(FrameError::SelfIntersectingPath { first: 0, second: 2 })
        ));
    }

    #[test]
    fn fold_back_rejected() {
        let path: ReferencePathInput = [(0.0, 0.0), (2.0, 0.0), (1.0, 0.0)].into_iter().collect();
        assert!(matches!(
            FrenetFrame::build(&path, &FrameConfig::default()),
            Err(FrameError::SelfIntersectingPath { .. })
        ));
    }

    #[test]
    fn closed_loop_rejected() {
        let path: ReferencePathInput =
            [(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0), (0.0, 0.0)].into_iter().collect();
        assert!(matches!(
            FrenetFrame::build(&path, &FrameConfig::default()),
            Err(FrameError::SelfIntersectingPath { .. })
        ));
    }

    #[test]
    fn sharp_reversal_violates_curvature_bound() {
        // the two outer segments never touch, but the hairpin at (1, 0) cannot be a valid frame
        let path: ReferencePathInput =
            [(0.0, 0.0), (1.0, 0.0), (0.5, 0.1), (-1.0, 0.0)].into_iter().collect();
        assert!(matches!(
            FrenetFrame::build(&path, &FrameConfig::default()),
            Err(FrameError::CurvatureBoundExceeded { .. })
        ));
    }

    #[test]
    fn degenerate_inputs() {
        let one: ReferencePathInput = [(1.0, 1.0)].into_iter().collect();
        assert_eq!(FrenetFrame::build(&one, &FrameConfig::default()), Err(FrameError::DegeneratePath));
        let dup: ReferencePathInput = [(1.0, 1.0), (1.0, 1.0)].into_iter().collect();
        assert_eq!(FrenetFrame::build(&dup, &FrameConfig::default()), Err(FrameError::DegeneratePath));
        let ok: ReferencePathInput = [(0.0, 0.0), (5.0, 0.0)].into_iter().collect();
        assert!(matches!(
            FrenetFrame::build(&ok, &FrameConfig { resample_step: 0.0, kappa_bound: 0.2 }),
            Err(FrameError::InvalidStep(_))
        ));
    }

    #[test]
    fn straight_cart_to_frenet() {
        let f = straight(100.0);
        let fs = f.cart_to_frenet(&EvState::new(5.0, 2.0, 3.0, 0.0, 0.0)).unwrap();
        assert!((fs.s - 5.0).abs() < 1e-9);
        assert!((fs.d - 2.0).abs() < 1e-12);
        assert!((fs.s_dot - 3.0).abs() < 1e-12);
        assert!(fs.s_ddot.abs() < 1e-12);
        assert!(fs.d_dot.abs() < 1e-12);
        assert!(fs.d_ddot.abs() < 1e-12);
    }

    #[test]
    fn straight_frenet_to_cart() {
        let f = straight(100.0);
        let c = f
            .frenet_to_cart(&FrenetState {
                s: 7.0,
                s_dot: 4.0,
                s_ddot: 0.0,
                d: -1.0,
                d_dot: 0.0,
                d_ddot: 0.0,
            })
            .unwrap();
        assert!((c.x - 7.0).abs() < 1e-12 && (c.y + 1.0).abs() < 1e-12);
        assert!((c.v - 4.0).abs() < 1e-12);
        assert_eq!(c.theta, 0.0);
        assert_eq!(c.kappa, 0.0);
    }

    #[test]
    fn on_path_point_on_circle() {
        let path = arc(50.0, 1.0, 180.0);
        let f = FrenetFrame::build(&path, &FrameConfig::default()).unwrap();
        let fs = f.cart_to_frenet(&EvState::new(0.0, 50.0, 5.0, 0.0, PI)).unwrap();
        assert!(fs.d.abs() < 1e-3, "d = {}", fs.d);
        assert!(fs.d_dot.abs() < 1e-2, "d_dot = {}", fs.d_dot);
        assert!((fs.s - 50.0 * PI / 2.0).abs() < 0.05);
    }

    #[test]
    fn on_path_identity() {
        let path = arc(40.0, 1.0, 120.0);
        let f = FrenetFrame::build(&path, &FrameConfig::default()).unwrap();
        for &s in &[0.0, 3.3, 17.25, 60.0, f.length()] {
            let c = f
                .frenet_to_cart(&FrenetState { s, s_dot: 6.0, s_ddot: 0.5, d: 0.0, d_dot: 0.0, d_ddot: 0.0 })
                .unwrap();
            let r = f.sample(s);
            assert!((c.x - r.x).abs() < 1e-12 && (c.y - r.y).abs() < 1e-12);
            assert!((c.theta - wrap_angle(r.theta)).abs() < 1e-12);
            assert!((c.kappa - r.kappa).abs() < 1e-12);
        }
    }

    #[test]
    fn transform_errors() {
        let path = arc(20.0, 1.0, 90.0);
        let f = FrenetFrame::build(&path, &FrameConfig::default()).unwrap();
        let fs = FrenetState { s: f.length() + 0.1, ..Default::default() };
        assert!(matches!(f.frenet_to_cart(&fs), Err(TransformError::OutOfRange { .. })));
        // centre of curvature lies at d = +20 on the left
        let fs = FrenetState { s: 10.0, d: 25.0, ..Default::default() };
        assert!(matches!(f.frenet_to_cart(&fs), Err(TransformError::SingularTransform(_))));
        // far behind the start
        assert_eq!(
            f.cart_to_frenet(&EvState::new(20.0, -5.0, 1.0, 0.0, PI / 2.0)),
            Err(TransformError::OutsideProjectionDomain)
        );
        // beyond the centre of curvature
        assert_eq!(
            f.cart_to_frenet(&EvState::new(-1.0, -1.0, 1.0, 0.0, 0.0)),
            Err(TransformError::OutsideProjectionDomain)
        );
    }

    #[test]
    fn curvature_error_shrinks_with_step() {
        // densely sampled analytic circle so the polyline itself is not the error source
        let path = arc(30.0, 0.01, 120.0);
        let err = |step: f64| {
            let f =
                FrenetFrame::build(&path, &FrameConfig { resample_step: step, kappa_bound: 0.2 }).unwrap();
            f.kappa_samples().iter().map(|k| (k - 1.0 / 30.0).abs()).fold(0.0, f64::max)
        };
        // heading is linear in s on a circle, so only rounding remains
        for step in [4.0, 2.0, 1.0, 0.5] {
            assert!(err(step) < 1e-9, "step {step}: {}", err(step));
        }
    }

    #[test]
    fn curvature_error_shrinks_on_wavy_path() {
        // y = a sin(x / l), curvature known in closed form
        let (a, l) = (3.0, 15.0);
        let path: ReferencePathInput = (0..=20000)
            .map(|i| {
                let x = i as f64 * 0.005;
                (x, a * (x / l).sin())
            })
            .collect();
        let exact = |x: f64| {
            let yp = a / l * (x / l).cos();
            let ypp = -a / (l * l) * (x / l).sin();
            ypp / (1.0 + yp * yp).powf(1.5)
        };
        let err = |step: f64| {
            let f =
                FrenetFrame::build(&path, &FrameConfig { resample_step: step, kappa_bound: 0.2 }).unwrap();
            let xs: Vec<f64> = f.position_samples().map(|p| p.x).collect();
            // interior samples only; the one-sided ends converge at the same order
            (1..xs.len() - 1).map(|i| (f.kappa_samples()[i] - exact(xs[i])).abs()).fold(0.0, f64::max)
        };
        let mut prev = err(4.0);
        for step in [2.0, 1.0] {
            let e = err(step);
            assert!(e <= 0.5 * prev, "step {step}: {e} vs {prev}");
            prev = e;
        }
    }
}
