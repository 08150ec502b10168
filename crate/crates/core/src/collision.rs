//! Point-in-polygon, convex polygon overlap and per-timestep footprint checks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ConfigError;
use crate::evaluation::VehicleParams;
use crate::geometry::{on_segment, orient, segments_intersect, Point2};
use crate::sampler::CandidateTrajectory;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum PolygonError {
    #[error("polygon needs at least three vertices")]
    TooFewVertices,
    #[error("polygon edges intersect")]
    NotSimple,
    #[error("polygon vertices must be counter-clockwise")]
    NotCounterClockwise,
    #[error("polygon is not convex")]
    NonConvexInput,
}

/// Simple polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon2D {
    vertices: Vec<Point2>,
}

impl Polygon2D {
    pub fn new(vertices: Vec<Point2>) -> Result<Self, PolygonError> {
        if vertices.len() < 3 {
            return Err(PolygonError::TooFewVertices);
        }
        let n = vertices.len();
        for i in 0..n {
            for j in i + 1..n {
                // adjacent edges share a vertex; the first and last edge too
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n])
                {
                    return Err(PolygonError::NotSimple);
                }
            }
        }
        if !(signed_area(&vertices) > 0.0) {
            return Err(PolygonError::NotCounterClockwise);
        }
        Ok(Self { vertices })
    }

    /// Oriented rectangle centred at `center`, `length` along `theta`.
    pub fn rectangle(center: Point2, theta: f64, length: f64, width: f64) -> Self {
        Self { vertices: rectangle_corners(center, theta, 0.5 * length, 0.5 * width).to_vec() }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_convex(&self) -> bool {
        is_convex(&self.vertices)
    }

    pub fn translated(&self, by: Point2) -> Self {
        Self { vertices: self.vertices.iter().map(|&v| v + by).collect() }
    }
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>()
}

fn is_convex(v: &[Point2]) -> bool {
    let n = v.len();
    (0..n).all(|i| orient(v[i], v[(i + 1) % n], v[(i + 2) % n]) >= 0.0)
}

/// Corners of an oriented rectangle, counter-clockwise.
pub fn rectangle_corners(center: Point2, theta: f64, half_length: f64, half_width: f64) -> [Point2; 4] {
    let (sin, cos) = theta.sin_cos();
    let along = Point2::new(cos, sin);
    let across = along.perp();
    let l = along * half_length;
    let w = across * half_width;
    [center - l - w, center + l - w, center + l + w, center - l + w]
}

/// Boundary counts as inside. Crossing number with exact on-edge handling.
pub fn point_in_polygon(poly: &Polygon2D, p: Point2) -> bool {
    let v = &poly.vertices;
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if on_segment(a, b, p) {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// Separating-axis overlap test for convex vertex rings. Touching counts.
pub fn convex_overlap(a: &[Point2], b: &[Point2]) -> bool {
    !has_separating_axis(a, b) && !has_separating_axis(b, a)
}

fn has_separating_axis(reference: &[Point2], other: &[Point2]) -> bool {
    let n = reference.len();
    for i in 0..n {
        let axis = (reference[(i + 1) % n] - reference[i]).perp();
        let (min_a, max_a) = project(reference, axis);
        let (min_b, max_b) = project(other, axis);
        if max_a < min_b || max_b < min_a {
            return true;
        }
    }
    false
}

fn project(points: &[Point2], axis: Point2) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let q = p.dot(axis);
        (lo.min(q), hi.max(q))
    })
}

/// True iff the convex polygons overlap or touch.
pub fn polygons_intersect(a: &Polygon2D, b: &Polygon2D) -> Result<bool, PolygonError> {
    if !a.is_convex() || !b.is_convex() {
        return Err(PolygonError::NonConvexInput);
    }
    Ok(convex_overlap(&a.vertices, &b.vertices))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstaclePose {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// Rectangular object with a predicted pose sequence (times relative to scenario start).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub id: u32,
    pub half_length: f64,
    pub half_width: f64,
    pub prediction: Vec<ObstaclePose>,
}

impl Obstacle {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.half_length > 0.0 && self.half_width > 0.0) {
            return Err(ConfigError::new("obstacles.half_length", "half dimensions must be > 0"));
        }
        if self.prediction.is_empty() {
            return Err(ConfigError::new("obstacles.prediction", "needs at least one pose"));
        }
        if self.prediction.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(ConfigError::new("obstacles.prediction", "timestamps must be strictly increasing"));
        }
        Ok(())
    }

    /// Pose at time `t`; the last pose is held past the prediction and the
    /// first before it.
    pub fn pose_at(&self, t: f64) -> ObstaclePose {
        let k = self.prediction.partition_point(|p| p.t <= t + 1e-9);
        self.prediction[k.saturating_sub(1)]
    }

    pub fn footprint_at(&self, t: f64) -> [Point2; 4] {
        let pose = self.pose_at(t);
        rectangle_corners(Point2::new(pose.x, pose.y), pose.theta, self.half_length, self.half_width)
    }
}

/// First timestep at which the ego footprint overlaps any obstacle footprint.
///
/// `start_time` is the scenario time of the candidate's first point.
pub fn check_collision(
    candidate: &CandidateTrajectory,
    obstacles: &[Obstacle],
    params: &VehicleParams,
    start_time: f64,
) -> Option<usize> {
    if obstacles.is_empty() {
        return None;
    }
    let (hl, hw) = (0.5 * params.length, 0.5 * params.width);
    let ego_radius = hl.hypot(hw);
    for (i, p) in candidate.points.iter().enumerate() {
        let center = Point2::new(p.x, p.y);
        let ego = rectangle_corners(center, p.theta, hl, hw);
        let t = start_time + p.t;
        for o in obstacles {
            let pose = o.pose_at(t);
            let reach = ego_radius + o.half_length.hypot(o.half_width);
            if center.distance(Point2::new(pose.x, pose.y)) > reach {
                continue;
            }
            let other =
                rectangle_corners(Point2::new(pose.x, pose.y), pose.theta, o.half_length, o.half_width);
            if convex_overlap(&ego, &other) {
                return Some(i);
            }
        }
    }
    None
}
