mod common;

use common::{rng, smooth_path};
use frenet_rt::frenet::TransformError;
use frenet_rt::{EvState, FrameConfig, FrenetFrame, FrenetState, Point2, ReferencePathInput};
use proptest::prelude::*;
use rand::Rng;

fn offset_point(frame: &FrenetFrame, s: f64, d: f64) -> Point2 {
    let r = frame.sample(s);
    Point2::new(r.x - d * r.theta.sin(), r.y + d * r.theta.cos())
}

/// Arc length of the closest sample on a 1e-5 m grid around `near`.
fn nearest_on_grid(frame: &FrenetFrame, q: Point2, near: f64) -> f64 {
    let (lo, hi) = ((near - 1.0).max(0.0), (near + 1.0).min(frame.length()));
    let n = ((hi - lo) / 1e-5) as usize;
    (0..=n)
        .map(|k| lo + k as f64 * 1e-5)
        .map(|s| {
            let r = frame.sample(s);
            (s, (r.x - q.x).hypot(r.y - q.y))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_on_random_paths(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let path = smooth_path(&mut rng);
        let f = &path.frame;
        for _ in 0..50 {
            let s = rng.gen_range(f.step()..f.length() - f.step());
            let kr = f.sample(s).kappa.abs().max(1e-9);
            let d = rng.gen_range(-1.0..1.0) * (0.5 / kr).min(4.0);
            let s_dot = rng.gen_range(0.2..25.0);
            let fs = FrenetState {
                s,
                s_dot,
                s_ddot: rng.gen_range(-5.0..5.0),
                d,
                d_dot: s_dot * rng.gen_range(-0.6..0.6),
                d_ddot: rng.gen_range(-4.0..4.0),
            };
            let back = f.cartesian_to_frenet(&f.frenet_to_cart(&fs).unwrap()).unwrap();
            prop_assert!((back.s - fs.s).abs() < 1e-6 && (back.d - fs.d).abs() < 1e-6);
            for (a, b) in [(back.s_dot, fs.s_dot), (back.s_ddot, fs.s_ddot), (back.d_dot, fs.d_dot), (back.d_ddot, fs.d_ddot)] {
                prop_assert!((a - b).abs() < 1e-4, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn heading_has_no_jumps(seed in any::<u64>()) {
        // random walks with bounded turning, some of them rejected by the bound
        let mut rng = rng(seed);
        let mut heading: f64 = rng.gen_range(-3.0..3.0);
        let mut p = Point2::new(0.0, 0.0);
        let mut pts = vec![p];
        for _ in 0..rng.gen_range(3..60) {
            heading += rng.gen_range(-0.4..0.4);
            p = p + Point2::new(heading.cos(), heading.sin()) * rng.gen_range(0.5..3.0);
            pts.push(p);
        }
        if let Ok(f) = FrenetFrame::build(&ReferencePathInput::new(pts), &FrameConfig { resample_step: 0.5, kappa_bound: 5.0 }) {
            prop_assert!(f.theta_samples().windows(2).all(|w| (w[1] - w[0]).abs() < std::f64::consts::PI));
            prop_assert!(f.kappa_samples().iter().all(|k| k.abs() < f.kappa_bound()));
        }
    }

    #[test]
    fn projection_on_a_line_matches_the_dense_oracle(
        x in 1.0..99.0f64, y in -20.0..20.0f64, angle in -3.1..3.1f64,
    ) {
        let (sin, cos) = angle.sin_cos();
        let path: ReferencePathInput = [(3.0, -2.0), (3.0 + 100.0 * cos, -2.0 + 100.0 * sin)].into_iter().collect();
        let f = FrenetFrame::build(&path, &FrameConfig::default()).unwrap();
        let q = offset_point(&f, x, y);
        let (s, d) = f.project(q).unwrap();
        prop_assert!((s - nearest_on_grid(&f, q, s)).abs() <= 1e-4);
        prop_assert!((d - y).abs() < 1e-9);
    }
}

/// On a curved frame the projection follows the interpolated normal field,
/// which is what makes the round trip exact. Its foot differs from the
/// Euclidean nearest point of the sample polyline by at most |d| kappa h / 2.
#[test]
fn projection_on_curves_is_within_the_discretization_bound() {
    let mut rng = rng(21);
    for _ in 0..4 {
        let path = smooth_path(&mut rng);
        let f = &path.frame;
        for _ in 0..40 {
            let s = rng.gen_range(5.0..f.length() - 5.0);
            let d = rng.gen_range(-3.0..3.0);
            let q = offset_point(f, s, d);
            let (ps, pd) = f.project(q).unwrap();
            assert!((ps - s).abs() < 1e-8 && (pd - d).abs() < 1e-8);
            let bound = d.abs() * path.kappa_abs_max * f.step() / 2.0 * 1.05 + 1e-4;
            let oracle = nearest_on_grid(f, q, ps);
            assert!((ps - oracle).abs() <= bound, "{ps} vs {oracle}, bound {bound}");
        }
    }
}

/// Scans the tangential residual along the whole path: for a point inside
/// the projection domain exactly one admissible foot exists.
#[test]
fn projection_foot_is_unique() {
    let mut rng = rng(22);
    for _ in 0..4 {
        let path = smooth_path(&mut rng);
        let f = &path.frame;
        for _ in 0..20 {
            let s = rng.gen_range(5.0..f.length() - 5.0);
            let q = offset_point(f, s, rng.gen_range(-3.0..3.0));
            let (ps, _) = f.project(q).unwrap();
            let residual = |t: f64| {
                let r = f.sample(t);
                (q.x - r.x) * r.theta.cos() + (q.y - r.y) * r.theta.sin()
            };
            let lateral = |t: f64| {
                let r = f.sample(t);
                -(q.x - r.x) * r.theta.sin() + (q.y - r.y) * r.theta.cos()
            };
            let n = (f.length() / 1e-3) as usize;
            let mut roots = Vec::new();
            for k in 0..n {
                let (a, b) = (k as f64 * 1e-3, (k + 1) as f64 * 1e-3);
                if residual(a) >= 0.0 && residual(b) < 0.0 && (lateral(a) * f.sample(a).kappa).abs() < 1.0 {
                    roots.push(a);
                }
            }
            assert_eq!(roots.len(), 1, "feet at {roots:?}");
            assert!((roots[0] - ps).abs() <= 1e-3 + 1e-4);
        }
    }
}

#[test]
fn on_path_states_take_the_path_heading_and_curvature() {
    let mut rng = rng(23);
    let path = smooth_path(&mut rng);
    let f = &path.frame;
    for _ in 0..100 {
        let s = rng.gen_range(0.0..f.length());
        let c = f.frenet_to_cart(&FrenetState { s, s_dot: 5.0, ..Default::default() }).unwrap();
        let r = f.sample(s);
        assert!((c.x - r.x).abs() < 1e-12 && (c.y - r.y).abs() < 1e-12);
        assert!(frenet_rt::geometry::wrap_angle(c.theta - r.theta).abs() < 1e-12);
        assert!((c.kappa - r.kappa).abs() < 1e-12);
    }
}

#[test]
fn transform_error_cases() {
    let path: ReferencePathInput = [(0.0, 0.0), (100.0, 0.0)].into_iter().collect();
    let f = FrenetFrame::build(&path, &FrameConfig::default()).unwrap();
    let far = EvState::new(-50.0, 0.0, 5.0, 0.0, 0.0);
    assert_eq!(f.cart_to_frenet(&far), Err(TransformError::OutsideProjectionDomain));
    let past = FrenetState { s: 100.5, ..Default::default() };
    assert!(matches!(f.frenet_to_cart(&past), Err(TransformError::OutOfRange { .. })));
    let sideways = EvState::new(50.0, 1.0, 5.0, 0.0, std::f64::consts::FRAC_PI_2);
    assert!(matches!(f.cart_to_frenet(&sideways), Err(TransformError::SingularTransform(_))));

    let arc: ReferencePathInput =
        (0..=90).map(|k| (k as f64).to_radians()).map(|a| (20.0 * a.cos(), 20.0 * a.sin())).collect();
    let f = FrenetFrame::build(&arc, &FrameConfig::default()).unwrap();
    let beyond_centre = FrenetState { s: 10.0, d: 25.0, ..Default::default() };
    assert!(matches!(f.frenet_to_cart(&beyond_centre), Err(TransformError::SingularTransform(_))));
}
