mod common;

use common::{convex_contains, convex_overlap_oracle, integer_convex, real_convex, rng};
use frenet_rt::collision::{
    check_collision, point_in_polygon, polygons_intersect, rectangle_corners, PolygonError,
};
use frenet_rt::sampler::CandidateTrajectory;
use frenet_rt::{Obstacle, ObstaclePose, Point2, Polygon2D, TrajectoryPoint, VehicleParams};
use proptest::prelude::*;

fn poly(ring: Vec<Point2>) -> Polygon2D {
    Polygon2D::new(ring).unwrap()
}

fn straight_candidate(v: f64) -> CandidateTrajectory {
    let mut c = CandidateTrajectory::with_capacity(30);
    for i in 0..=30 {
        let t = i as f64 * 0.1;
        c.points.push(TrajectoryPoint { t, x: v * t, v, ..Default::default() });
    }
    c
}

fn parked(x: f64, y: f64) -> Obstacle {
    Obstacle {
        id: 1,
        half_length: 2.0,
        half_width: 1.0,
        prediction: vec![ObstaclePose { t: 0.0, x, y, theta: 0.0 }],
    }
}

/// First step whose footprints overlap, by the exact oracle.
fn first_hit(c: &CandidateTrajectory, o: &Obstacle, params: &VehicleParams) -> Option<usize> {
    c.points.iter().position(|p| {
        let ego = rectangle_corners(Point2::new(p.x, p.y), p.theta, params.length / 2.0, params.width / 2.0);
        let pose = o.pose_at(p.t);
        let other = rectangle_corners(Point2::new(pose.x, pose.y), pose.theta, o.half_length, o.half_width);
        convex_overlap_oracle(&ego, &other)
    })
}

proptest! {
    #[test]
    fn intersection_is_symmetric_and_translation_invariant(
        seed in any::<u64>(), dx in -20i32..20, dy in -20i32..20, tx in -50i32..50, ty in -50i32..50,
    ) {
        let mut rng = rng(seed);
        let a = integer_convex(&mut rng, 4);
        let b: Vec<Point2> = integer_convex(&mut rng, 4).into_iter().map(|p| p + Point2::new(dx as f64, dy as f64) * 0.5).collect();
        let (pa, pb) = (poly(a.clone()), poly(b.clone()));
        let ab = polygons_intersect(&pa, &pb).unwrap();
        prop_assert_eq!(ab, polygons_intersect(&pb, &pa).unwrap());
        prop_assert_eq!(ab, convex_overlap_oracle(&a, &b));
        let shift = Point2::new(tx as f64, ty as f64);
        prop_assert_eq!(ab, polygons_intersect(&pa.translated(shift), &pb.translated(shift)).unwrap());
        for &p in &a {
            prop_assert_eq!(point_in_polygon(&pb, p), point_in_polygon(&pb.translated(shift), p + shift));
        }
    }

    #[test]
    fn containment_implies_intersection(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let a = real_convex(&mut rng);
        let b = real_convex(&mut rng);
        let (pa, pb) = (poly(a.clone()), poly(b.clone()));
        if a.iter().any(|&p| point_in_polygon(&pb, p)) {
            prop_assert!(polygons_intersect(&pa, &pb).unwrap());
        }
        for &p in &a {
            prop_assert_eq!(point_in_polygon(&pb, p), convex_contains(&b, p));
        }
    }
}

#[test]
fn square_examples() {
    let sq = |x: f64| {
        poly(vec![
            Point2::new(x, 0.0),
            Point2::new(x + 1.0, 0.0),
            Point2::new(x + 1.0, 1.0),
            Point2::new(x, 1.0),
        ])
    };
    assert!(point_in_polygon(&sq(0.0), Point2::new(0.5, 0.5)));
    assert!(point_in_polygon(&sq(0.0), Point2::new(1.0, 0.5)));
    assert!(polygons_intersect(&sq(0.0), &sq(0.5)).unwrap());
    assert!(polygons_intersect(&sq(0.0), &sq(1.0)).unwrap());
    assert!(!polygons_intersect(&sq(0.0), &sq(3.0)).unwrap());
}

#[test]
fn non_convex_input_is_rejected() {
    let dart = poly(vec![
        Point2::new(0.0, 0.0),
        Point2::new(4.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 4.0),
    ]);
    let sq = poly(vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ]);
    assert_eq!(polygons_intersect(&dart, &sq), Err(PolygonError::NonConvexInput));
    assert_eq!(
        Polygon2D::new(vec![Point2::new(0.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 0.0)]),
        Err(PolygonError::NotCounterClockwise)
    );
}

#[test]
fn static_obstacle_ahead() {
    let params = VehicleParams::default();
    let c = straight_candidate(10.0);
    let o = parked(5.0 + params.length / 2.0 + 2.0, 0.0);
    let want = first_hit(&c, &o, &params);
    // centres meet once the gap of 5 m closes at 1 m per step
    assert_eq!(want, Some(5));
    assert_eq!(check_collision(&c, std::slice::from_ref(&o), &params, 0.0), want);
    assert_eq!(check_collision(&c, &[], &params, 0.0), None);
}

#[test]
fn collisions_are_time_aligned() {
    let params = VehicleParams::default();
    let c = straight_candidate(10.0);
    // crosses x = 20 at t = 0.5 s, while the ego gets there at t = 2 s
    let crossing = Obstacle {
        id: 2,
        half_length: 1.0,
        half_width: 1.0,
        prediction: (0..=30)
            .map(|i| {
                let t = i as f64 * 0.1;
                ObstaclePose { t, x: 20.0, y: -10.0 + 20.0 * t, theta: std::f64::consts::FRAC_PI_2 }
            })
            .collect(),
    };
    assert_eq!(first_hit(&c, &crossing, &params), None);
    assert_eq!(check_collision(&c, std::slice::from_ref(&crossing), &params, 0.0), None);
    // the same crossing shifted so both arrive together
    let mut late = crossing.clone();
    late.prediction.iter_mut().for_each(|p| p.y -= 30.0);
    assert_eq!(check_collision(&c, std::slice::from_ref(&late), &params, 0.0), first_hit(&c, &late, &params));
    assert!(first_hit(&c, &late, &params).is_some());
    // and the start time offsets the prediction lookup
    assert_eq!(check_collision(&c, std::slice::from_ref(&late), &params, 5.0), None);
}
