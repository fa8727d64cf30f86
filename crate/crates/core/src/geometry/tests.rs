use approx::assert_abs_diff_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;

fn e2() -> Space {
    Space::euclidean(2).unwrap()
}

fn h2() -> Space {
    Space::hyperbolic(2).unwrap()
}

fn s3() -> Space {
    Space::star_tree(3).unwrap()
}

fn sp(leg: usize, r: f64) -> Point {
    Point::Star { leg, r }
}

fn ep(x: f64, y: f64) -> Point {
    Point::Euclidean(smallvec::smallvec![x, y])
}

/// Arc length of `s -> (cosh s, sinh s, 0)` on `[0, 1]` by Simpson's rule on
/// the Minkowski speed.
fn hyperbolic_arclength_oracle() -> f64 {
    let n = 1000;
    let h = 1.0 / n as f64;
    let speed = |s: f64| {
        let v = [s.sinh(), s.cosh(), 0.0];
        hyperbolic::minkowski(&v, &v).sqrt()
    };
    let mut acc = speed(0.0) + speed(1.0);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * speed(k as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn distance_examples() {
    assert_eq!(e2().distance(&ep(0.0, 0.0), &ep(3.0, 4.0)).unwrap(), 5.0);
    assert_eq!(s3().distance(&sp(0, 2.0), &sp(1, 3.0)).unwrap(), 5.0);
    let h = h2();
    let x = h.point(&[1.0, 0.0, 0.0]).unwrap();
    let y = h.point(&[1f64.cosh(), 1f64.sinh(), 0.0]).unwrap();
    let oracle = hyperbolic_arclength_oracle();
    assert_abs_diff_eq!(oracle, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(h.distance(&x, &y).unwrap(), oracle, epsilon = 1e-12);
}

#[test]
fn mismatched_tags_are_rejected() {
    let err = e2().distance(&ep(0.0, 0.0), &sp(0, 1.0)).unwrap_err();
    assert!(matches!(err, Error::SpaceMismatch(_)));
}

#[test]
fn combine_examples() {
    let e = e2();
    assert_eq!(e.combine(&ep(0.0, 0.0), &ep(2.0, 0.0), 0.5).unwrap(), ep(1.0, 0.0));
    assert_eq!(s3().combine(&sp(0, 2.0), &sp(1, 2.0), 0.75).unwrap(), sp(1, 1.0));
    let (x, y) = (ep(0.3, -1.0), ep(4.0, 2.0));
    assert_eq!(e.combine(&x, &y, 0.0).unwrap(), x);
    assert_eq!(e.combine(&x, &y, 1.0).unwrap(), y);
    assert!(matches!(e.combine(&x, &y, 1.5), Err(Error::Usage(_))));
}

#[test]
fn ray_examples() {
    let e = e2();
    let u = e.direction(&[0.0, 1.0]).unwrap();
    assert_eq!(e.ray_point(&ep(1.0, 1.0), &u, 2.0).unwrap(), ep(1.0, 3.0));
    let s = s3();
    let leg0 = s.star_direction(0).unwrap();
    assert_eq!(s.ray_point(&sp(2, 1.0), &leg0, 3.0).unwrap(), sp(0, 2.0));
    assert_eq!(s.ray_point(&sp(0, 1.0), &leg0, 3.0).unwrap(), sp(0, 4.0));
}

#[test]
fn direction_through_examples() {
    let e = e2();
    assert_eq!(
        e.direction_through(&ep(0.0, 0.0), &ep(0.0, 5.0)).unwrap(),
        BoundaryDirection::Euclidean(smallvec::smallvec![0.0, 1.0])
    );
    let s = s3();
    assert_eq!(
        s.direction_through(&sp(1, 2.0), &sp(0, 1.0)).unwrap(),
        BoundaryDirection::Star(0)
    );
    let toward_hub = s.direction_through(&sp(0, 3.0), &sp(0, 1.0)).unwrap();
    assert_eq!(toward_hub, BoundaryDirection::Star(1));
    assert_eq!(s.ray_point(&sp(0, 3.0), &toward_hub, 2.0).unwrap(), sp(0, 1.0));
    assert!(matches!(
        s.direction_through(&sp(0, 0.0), &sp(2, 0.0)),
        Err(Error::Degenerate(_))
    ));
}

#[test]
fn busemann_examples() {
    let e = e2();
    let u = e.direction(&[1.0, 0.0]).unwrap();
    let y = ep(2.0, 3.0);
    assert_eq!(e.busemann(&u, &y).unwrap(), -2.0);
    // large-t limit oracle
    let t = 1e6;
    let r = e.ray_point(e.base(), &u, t).unwrap();
    assert_abs_diff_eq!(e.distance(&y, &r).unwrap() - t, -2.0, epsilon = 1e-5);
    assert_eq!(e.busemann(&u, e.base()).unwrap(), 0.0);

    let s = s3();
    let leg0 = s.star_direction(0).unwrap();
    assert_eq!(s.busemann(&leg0, &sp(0, 2.0)).unwrap(), -2.0);
    assert_eq!(s.busemann(&leg0, &sp(1, 2.0)).unwrap(), 2.0);
    for y in [sp(0, 2.0), sp(1, 2.0)] {
        let r = s.ray_point(s.base(), &leg0, t).unwrap();
        let lim = s.distance(&y, &r).unwrap() - t;
        assert_abs_diff_eq!(lim, s.busemann(&leg0, &y).unwrap(), epsilon = 1e-9);
    }

    let h = h2();
    let xi = h.direction(&[0.6, 0.8]).unwrap();
    assert_abs_diff_eq!(h.busemann(&xi, h.base()).unwrap(), 0.0, epsilon = 1e-15);
}

#[test]
fn pairing_examples() {
    let e = e2();
    let y = ep(2.0, 3.0);
    assert_eq!(e.pairing(&y, &ConeElement::Zero).unwrap(), 0.0);
    let g = ConeElement::new(e.direction(&[1.0, 0.0]).unwrap(), 2.0).unwrap();
    assert_eq!(e.pairing(&y, &g).unwrap(), -4.0);
    let g2 = g.scaled(2.0).unwrap();
    assert_eq!(e.pairing(&y, &g2).unwrap(), 2.0 * e.pairing(&y, &g).unwrap());
    assert!(ConeElement::new(BoundaryDirection::Star(1), 0.0).unwrap().is_zero());
}

#[test]
fn projection_examples() {
    let e = e2();
    let ball = ConvexSet::ball(&e, ep(0.0, 0.0), 1.0).unwrap();
    assert_eq!(ball.project(&e, &ep(3.0, 0.0)).unwrap(), ep(1.0, 0.0));
    assert_eq!(ConvexSet::WholeSpace.project(&e, &ep(3.0, 0.0)).unwrap(), ep(3.0, 0.0));

    let s = s3();
    let ball = ConvexSet::ball(&s, sp(0, 0.0), 2.0).unwrap();
    let x = sp(1, 5.0);
    let p = ball.project(&s, &x).unwrap();
    assert_eq!(p, sp(1, 2.0));
    // grid oracle over the ball
    let mut best = (f64::INFINITY, sp(0, 0.0));
    for leg in 0..3 {
        for k in 0..=2000 {
            let c = sp(leg, 2.0 * k as f64 / 2000.0);
            let d = s.distance(&c, &x).unwrap();
            if d < best.0 {
                best = (d, c);
            }
        }
    }
    assert_eq!(best.1, p);
}

#[test]
fn cat0_examples() {
    let e = e2();
    let d = e
        .cat0_defect(&ep(0.3, 0.1), (&ep(-1.0, 2.0), &ep(4.0, -0.5)), 0.3)
        .unwrap();
    assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);
    // LHS = d^2(hub, x) = 1 and RHS = 0.5*4 + 0.5*4 - 0.25*4 = 3.
    let s = s3();
    let d = s.cat0_defect(&sp(2, 1.0), (&sp(0, 1.0), &sp(1, 1.0)), 0.5).unwrap();
    assert_eq!(d, 2.0);
}

#[test]
fn q4bar_examples() {
    let e = e2();
    let x = ep(-1.0, 0.0);
    assert!(e.q4bar_check(&ep(-2.0, 0.0), &ep(2.0, 0.0), &x, &x, 5).unwrap());
    assert!(e
        .q4bar_check(&ep(-2.0, 0.0), &ep(2.0, 0.0), &ep(-1.0, 3.0), &ep(0.0, -4.0), 50)
        .unwrap());
}

#[test]
fn asymptotic_radius_examples() {
    let e = e2();
    let y = ep(1.0, 0.0);
    assert_eq!(e.asymptotic_radius(std::slice::from_ref(&y), &y).unwrap(), 0.0);
    assert_eq!(e.asymptotic_radius(&[ep(0.0, 0.0), ep(2.0, 0.0)], &y).unwrap(), 1.0);
    let z = ep(3.0, 4.0);
    assert_abs_diff_eq!(
        e.asymptotic_radius(&[z.clone(), z.clone(), z], &ep(0.0, 0.0)).unwrap(),
        25.0,
        epsilon = 1e-12
    );
    assert!(e.asymptotic_radius(&[], &y).is_err());
}

#[test]
fn hub_points_compare_equal() {
    assert_eq!(sp(0, 0.0), sp(2, 0.0));
    assert_ne!(sp(0, 1.0), sp(2, 1.0));
}

#[test]
fn hyperbolic_validation() {
    let h = h2();
    assert!(h.point(&[1.0, 0.5, 0.0]).is_err());
    let p = h.hyperbolic_point(&[0.5, -0.25]).unwrap();
    h.validate_point(&p).unwrap();
}

#[test]
fn sampled_ball_points_lie_in_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for space in [e2(), h2(), s3()] {
        let c = space.base().clone();
        for _ in 0..200 {
            let p = space.sample_ball(&c, 1.5, &mut rng).unwrap();
            assert!(space.distance(&c, &p).unwrap() <= 1.5 + 1e-9);
        }
    }
}

#[test]
fn json_round_trip() {
    let s: Space = serde_json::from_str(r#"{"kind":"euclidean","dim":2,"base":[0,0]}"#).unwrap();
    assert_eq!(s, e2());
    let s: Space = serde_json::from_str(r#"{"kind":"star_tree","legs":3,"base":{"leg":0,"r":0}}"#).unwrap();
    assert_eq!(s, s3());
    let s: Space = serde_json::from_str(r#"{"kind":"hyperbolic","dim":2}"#).unwrap();
    assert_eq!(s, h2());
    let p: Point = serde_json::from_str(r#"{"space":"euclidean","coords":[1,2]}"#).unwrap();
    assert_eq!(p, ep(1.0, 2.0));
    let p: Point = serde_json::from_str(r#"{"leg":1,"r":0.5}"#).unwrap();
    assert_eq!(p, sp(1, 0.5));
    let back: Point = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);
    let set: ConvexSet = serde_json::from_str(r#"{"kind":"ball","center":{"leg":0,"r":0},"radius":2}"#).unwrap();
    assert_eq!(set.diameter(), Some(4.0));
    let d: BoundaryDirection = serde_json::from_str(r#"{"space":"hyperbolic","u":[0,1]}"#).unwrap();
    h2().validate_direction(&d).unwrap();
    let g: ConeElement = serde_json::from_str(r#"{"speed":0}"#).unwrap();
    assert!(g.is_zero());
}
