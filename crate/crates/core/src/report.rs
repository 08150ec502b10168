//! CSV and SVG artifacts for single cycles and closed-loop traces.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::collision::Obstacle;
use crate::frenet::FrenetFrame;
use crate::planner::CycleRecord;
use crate::sampler::CandidateTrajectory;
use crate::state::TrajectoryPoint;

/// Header: `t,x,y,theta,v,a,kappa,kappa_dot,yaw_rate,s,d`.
pub fn write_trajectory_csv<W: Write>(out: W, points: &[TrajectoryPoint]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CandidateRow {
    candidate: usize,
    tau: f64,
    d_goal: f64,
    v_goal: f64,
    verdict: &'static str,
    violation_index: Option<usize>,
    j_ref: Option<f64>,
    j_vel: Option<f64>,
    j_lat: Option<f64>,
    j_lon: Option<f64>,
    j_sum: Option<f64>,
    optimal: bool,
}

/// One row per candidate with its goal, verdict and cost terms.
pub fn write_candidates_csv<W: Write>(
    out: W,
    candidates: &[CandidateTrajectory],
    optimal: usize,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in candidates {
        let violation_index = match c.verdict {
            crate::evaluation::Verdict::Infeasible { index, .. } => Some(index),
            _ => None,
        };
        w.serialize(CandidateRow {
            candidate: c.index,
            tau: c.goal.tau,
            d_goal: c.goal.d_tau,
            v_goal: c.goal.v_tau,
            verdict: c.verdict.label(),
            violation_index,
            j_ref: c.costs.map(|k| k.j_ref),
            j_vel: c.costs.map(|k| k.j_vel),
            j_lat: c.costs.map(|k| k.j_lat),
            j_lon: c.costs.map(|k| k.j_lon),
            j_sum: c.costs.map(|k| k.j_sum),
            optimal: c.index == optimal,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CandidatePointRow {
    candidate: usize,
    t: f64,
    x: f64,
    y: f64,
    s: f64,
    d: f64,
    v: f64,
}

/// Every point of every candidate, keyed by candidate index.
pub fn write_candidate_points_csv<W: Write>(out: W, candidates: &[CandidateTrajectory]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in candidates {
        for p in &c.points {
            w.serialize(CandidatePointRow {
                candidate: c.index,
                t: p.t,
                x: p.x,
                y: p.y,
                s: p.s,
                d: p.d,
                v: p.v,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TraceRow {
    cycle: u64,
    x: f64,
    y: f64,
    theta: f64,
    v: f64,
    a: f64,
    s: f64,
    d: f64,
    s_dot: f64,
    d_dot: f64,
}

/// One row per closed-loop cycle: the state planned from.
pub fn write_trace_csv<W: Write>(out: W, records: &[CycleRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(TraceRow {
            cycle: r.cycle,
            x: r.state.x,
            y: r.state.y,
            theta: r.state.theta,
            v: r.state.v,
            a: r.state.a,
            s: r.frenet.s,
            d: r.frenet.d,
            s_dot: r.frenet.s_dot,
            d_dot: r.frenet.d_dot,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    /// Arc length horizontally, lateral offset vertically.
    Frenet,
    Cartesian,
}

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 30.0;

struct Viewport {
    min_x: f64,
    min_y: f64,
    scale_x: f64,
    scale_y: f64,
}

impl Viewport {
    fn fit(points: impl Iterator<Item = (f64, f64)>, equal_axes: bool) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) =
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
        }
        let (w, h) = ((x1 - x0).max(1e-6), (y1 - y0).max(1e-6));
        let mut sx = (WIDTH - 2.0 * MARGIN) / w;
        let mut sy = (HEIGHT - 2.0 * MARGIN) / h;
        if equal_axes {
            sx = sx.min(sy);
            sy = sx;
        }
        Viewport { min_x: x0, min_y: y0, scale_x: sx, scale_y: sy }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (MARGIN + (x - self.min_x) * self.scale_x, HEIGHT - MARGIN - (y - self.min_y) * self.scale_y)
    }
}

fn polyline(svg: &mut String, vp: &Viewport, pts: impl Iterator<Item = (f64, f64)>, style: &str) {
    svg.push_str("<polyline points=\"");
    for (i, (x, y)) in pts.enumerate() {
        let (u, v) = vp.map(x, y);
        if i > 0 {
            svg.push(' ');
        }
        let _ = write!(svg, "{u:.2},{v:.2}");
    }
    let _ = writeln!(svg, "\" fill=\"none\" {style}/>");
}

/// Linear green to red over `[lo, hi]`.
fn cost_color(j: f64, lo: f64, hi: f64) -> String {
    let u = if hi > lo { ((j - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
    format!("rgb({},{},0)", (255.0 * u).round() as u8, (255.0 * (1.0 - u)).round() as u8)
}

/// Candidate set as SVG: infeasible gray, feasible colored by cost, optimal black.
pub fn candidates_svg(
    plane: Plane,
    candidates: &[CandidateTrajectory],
    optimal: usize,
    frame: Option<&FrenetFrame>,
    obstacles: &[Obstacle],
    start_time: f64,
) -> String {
    let coords = |p: &TrajectoryPoint| match plane {
        Plane::Frenet => (p.s, p.d),
        Plane::Cartesian => (p.x, p.y),
    };
    let all = candidates.iter().flat_map(|c| c.points.iter().map(coords));
    let vp = Viewport::fit(all, plane == Plane::Cartesian);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    if plane == Plane::Cartesian {
        if let Some(frame) = frame {
            polyline(
                &mut svg,
                &vp,
                frame.position_samples().map(|p| (p.x, p.y)),
                "stroke=\"#6fa8dc\" stroke-width=\"1\" stroke-dasharray=\"6 4\"",
            );
        }
        for o in obstacles {
            let corners = o.footprint_at(start_time);
            let mut ring: Vec<(f64, f64)> = corners.iter().map(|p| (p.x, p.y)).collect();
            ring.push(ring[0]);
            polyline(&mut svg, &vp, ring.into_iter(), "stroke=\"#3d85c6\" stroke-width=\"1.5\"");
        }
    } else {
        let s_end = candidates.iter().flat_map(|c| c.points.last()).map(|p| p.s).fold(0.0, f64::max);
        polyline(
            &mut svg,
            &vp,
            [(0.0, 0.0), (s_end, 0.0)].into_iter(),
            "stroke=\"#6fa8dc\" stroke-dasharray=\"6 4\"",
        );
    }

    let costs = candidates.iter().filter_map(|c| c.costs.map(|k| k.j_sum));
    let (lo, hi) = costs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), j| (a.min(j), b.max(j)));
    for c in candidates.iter().filter(|c| !c.is_feasible()) {
        polyline(&mut svg, &vp, c.points.iter().map(coords), "stroke=\"#b0b0b0\" stroke-width=\"1\"");
    }
    for c in candidates.iter().filter(|c| c.is_feasible() && c.index != optimal) {
        let color = cost_color(c.costs.map_or(hi, |k| k.j_sum), lo, hi);
        polyline(
            &mut svg,
            &vp,
            c.points.iter().map(coords),
            &format!("stroke=\"{color}\" stroke-width=\"1.2\""),
        );
    }
    if let Some(c) = candidates.iter().find(|c| c.index == optimal) {
        polyline(&mut svg, &vp, c.points.iter().map(coords), "stroke=\"black\" stroke-width=\"2.5\"");
    }
    svg.push_str("</svg>\n");
    svg
}
