//! Test-side oracles and generators shared by the integration tests and the
//! acceptance binary. Nothing here calls into the code under test except to
//! build inputs.

#![allow(dead_code)]

use std::path::PathBuf;

use frenet_rt::bridge::{WireMessage, WirePoint};
use frenet_rt::evaluation::{VehicleParams, Verdict, Violation};
use frenet_rt::TrajectoryPoint;
use frenet_rt::{EvState, FrameConfig, FrenetFrame, Obstacle, ObstaclePose, Point2, ReferencePathInput};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

/// Smooth random path with a known curvature profile.
pub struct SmoothPath {
    pub input: ReferencePathInput,
    pub frame: FrenetFrame,
    pub kappa_abs_max: f64,
}

/// Integrates kappa(s) = k0 + a1 sin(w1 s + p1) + a2 sin(w2 s + p2) with a
/// midpoint rule on a fine grid and keeps every fourth point.
pub fn smooth_path(rng: &mut impl Rng) -> SmoothPath {
    let length = rng.gen_range(120.0..200.0);
    let k0 = rng.gen_range(-0.01..0.01);
    let modes: Vec<(f64, f64, f64)> = (0..2)
        .map(|_| {
            let wavelength = rng.gen_range(30.0..90.0);
            (
                rng.gen_range(-0.03..0.03),
                std::f64::consts::TAU / wavelength,
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let kappa = |s: f64| k0 + modes.iter().map(|(a, w, p)| a * (w * s + p).sin()).sum::<f64>();

    let h = 0.05;
    let n = (length / h) as usize;
    let (mut x, mut y) = (rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
    let mut theta: f64 = rng.gen_range(-3.0..3.0);
    let mut points = vec![Point2::new(x, y)];
    let mut kappa_abs_max: f64 = 0.0;
    for i in 0..n {
        let s = i as f64 * h;
        let mid = theta + 0.5 * h * kappa(s);
        x += h * mid.cos();
        y += h * mid.sin();
        theta += h * kappa(s + 0.5 * h);
        kappa_abs_max = kappa_abs_max.max(kappa(s).abs());
        if (i + 1) % 4 == 0 {
            points.push(Point2::new(x, y));
        }
    }
    let input = ReferencePathInput::new(points);
    let frame = FrenetFrame::build(&input, &FrameConfig { resample_step: 0.5, kappa_bound: 0.2 })
        .expect("generated path is valid");
    SmoothPath { input, frame, kappa_abs_max }
}

/// Value and first three derivatives of `sum c_k t^k`, term by term.
pub fn poly_derivs(coeffs: &[f64], t: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (k, &c) in coeffs.iter().enumerate() {
        for (order, slot) in out.iter_mut().enumerate() {
            if k >= order {
                let falling: f64 = (0..order).map(|j| (k - j) as f64).product();
                *slot += c * falling * t.powi((k - order) as i32);
            }
        }
    }
    out
}

/// Checks every point against every constraint on its own, then reports the
/// first constraint (in the fixed order) with any violating point, and the
/// smallest such point index.
pub fn feasibility_oracle(points: &[TrajectoryPoint], prior: Verdict, params: &VehicleParams) -> Verdict {
    if let Verdict::Infeasible { violation: Violation::ProjectionViolation, .. } = prior {
        return prior;
    }
    let kmax = params.wheelbase.recip() * params.delta_max.tan();
    let masks: Vec<[bool; 4]> = points
        .iter()
        .map(|p| {
            [
                p.a < params.a_min || p.a > params.a_max,
                p.kappa.abs() > kmax,
                p.kappa_dot.abs() > params.kappa_dot_max,
                p.yaw_rate.abs() > kmax * p.v,
            ]
        })
        .collect();
    let tags = [Violation::Accel, Violation::Curvature, Violation::CurvatureRate, Violation::YawRate];
    for (c, tag) in tags.into_iter().enumerate() {
        let mut hits: Vec<usize> = masks.iter().enumerate().filter(|(_, m)| m[c]).map(|(i, _)| i).collect();
        hits.sort_unstable();
        if let Some(&index) = hits.first() {
            return Verdict::Infeasible { violation: tag, index };
        }
    }
    Verdict::Feasible
}

pub fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Half-plane oracle for a counter-clockwise convex ring; boundary inside.
pub fn convex_contains(ring: &[Point2], p: Point2) -> bool {
    (0..ring.len()).all(|i| cross(ring[i], ring[(i + 1) % ring.len()], p) >= 0.0)
}

fn within(a: f64, b: f64, v: f64) -> bool {
    a.min(b) <= v && v <= a.max(b)
}

/// Closed segments, exact for exactly representable inputs.
pub fn segments_touch(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on =
        |a: Point2, b: Point2, p: Point2, d: f64| d == 0.0 && within(a.x, b.x, p.x) && within(a.y, b.y, p.y);
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// Two convex rings share a point iff a vertex of one lies in the other or
/// two edges meet.
pub fn convex_overlap_oracle(a: &[Point2], b: &[Point2]) -> bool {
    if a.iter().any(|&p| convex_contains(b, p)) || b.iter().any(|&p| convex_contains(a, p)) {
        return true;
    }
    for i in 0..a.len() {
        for j in 0..b.len() {
            if segments_touch(a[i], a[(i + 1) % a.len()], b[j], b[(j + 1) % b.len()]) {
                return true;
            }
        }
    }
    false
}

/// Convex hull (monotone chain), counter-clockwise, collinear points dropped.
pub fn convex_hull(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Random convex polygon with small integer vertices so that every predicate
/// on it is evaluated exactly.
pub fn integer_convex(rng: &mut impl Rng, span: i32) -> Vec<Point2> {
    loop {
        let n = rng.gen_range(3..10);
        let ox = rng.gen_range(-span..span);
        let oy = rng.gen_range(-span..span);
        let pts = (0..n)
            .map(|_| {
                Point2::new(
                    (ox + rng.gen_range(-span..=span)) as f64,
                    (oy + rng.gen_range(-span..=span)) as f64,
                )
            })
            .collect();
        let hull = convex_hull(pts);
        if hull.len() >= 3 {
            return hull;
        }
    }
}

/// Random convex polygon from sorted angles on a jittered circle.
pub fn real_convex(rng: &mut impl Rng) -> Vec<Point2> {
    loop {
        let n = rng.gen_range(3..12);
        let c = Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let r = rng.gen_range(0.5..4.0);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let pts = angles.iter().map(|a| Point2::new(c.x + r * a.cos(), c.y + r * a.sin())).collect();
        let hull = convex_hull(pts);
        if hull.len() >= 3 {
            return hull;
        }
    }
}

fn finite(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..8) {
        0 => 0.0,
        1 => -0.0,
        2 => f64::from_bits(rng.gen::<u64>()),
        _ => rng.gen_range(-1e4..1e4),
    }
}

pub fn random_message(rng: &mut impl Rng) -> WireMessage {
    match rng.gen_range(0..5) {
        0 => WireMessage::EvState(EvState {
            x: finite(rng),
            y: finite(rng),
            v: finite(rng),
            a: finite(rng),
            theta: finite(rng),
        }),
        1 => WireMessage::ReferencePath(
            (0..rng.gen_range(0..50)).map(|_| Point2::new(finite(rng), finite(rng))).collect(),
        ),
        2 => WireMessage::Obstacles(
            (0..rng.gen_range(0..5))
                .map(|_| Obstacle {
                    id: rng.gen(),
                    half_length: finite(rng),
                    half_width: finite(rng),
                    prediction: (0..rng.gen_range(0..20))
                        .map(|_| ObstaclePose {
                            t: finite(rng),
                            x: finite(rng),
                            y: finite(rng),
                            theta: finite(rng),
                        })
                        .collect(),
                })
                .collect(),
        ),
        3 => WireMessage::Trajectory(
            (0..rng.gen_range(0..40))
                .map(|_| WirePoint {
                    t: finite(rng),
                    x: finite(rng),
                    y: finite(rng),
                    theta: finite(rng),
                    v: finite(rng),
                    a: finite(rng),
                })
                .collect(),
        ),
        _ => WireMessage::Shutdown,
    }
}

/// Every number in a message, floats as raw bits, so NaN payloads and signed
/// zeros take part in comparisons.
pub fn message_bits(m: &WireMessage) -> (u8, Vec<u64>) {
    let mut v = Vec::new();
    let tag = match m {
        WireMessage::EvState(s) => {
            v.extend(state_bits(s));
            1
        }
        WireMessage::ReferencePath(pts) => {
            v.push(pts.len() as u64);
            pts.iter().for_each(|p| v.extend([p.x.to_bits(), p.y.to_bits()]));
            2
        }
        WireMessage::Obstacles(obs) => {
            v.push(obs.len() as u64);
            for o in obs {
                v.extend([o.id as u64, o.half_length.to_bits(), o.half_width.to_bits()]);
                v.push(o.prediction.len() as u64);
                for p in &o.prediction {
                    v.extend([p.t, p.x, p.y, p.theta].map(f64::to_bits));
                }
            }
            3
        }
        WireMessage::Trajectory(pts) => {
            v.push(pts.len() as u64);
            pts.iter().for_each(|p| v.extend([p.t, p.x, p.y, p.theta, p.v, p.a].map(f64::to_bits)));
            4
        }
        WireMessage::Shutdown => 5,
    };
    (tag, v)
}

/// Fields of a trajectory point that travel over the wire, as raw bits.
pub fn wire_bits(p: &TrajectoryPoint) -> [u64; 6] {
    [p.t, p.x, p.y, p.theta, p.v, p.a].map(f64::to_bits)
}

pub fn state_bits(s: &EvState) -> [u64; 5] {
    [s.x, s.y, s.v, s.a, s.theta].map(f64::to_bits)
}
