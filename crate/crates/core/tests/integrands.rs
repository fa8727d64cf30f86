use approx::assert_abs_diff_eq;
use busemann::error::{Assumption, Error};
use busemann::geometry::{ConeElement, ConvexSet, Point, Space};
use busemann::integrands::{
    fenchel_conjugate, subgradient_certificate, Atom, ExactOracle, FixedSpeedOracle, IntegrandKind, ObjectiveSpec,
    ParametricFamily, StochasticObjective, SubgradientOracle,
};

fn e2() -> Space {
    Space::euclidean(2).unwrap()
}

fn ep(x: f64, y: f64) -> Point {
    e2().point(&[x, y]).unwrap()
}

#[test]
fn evaluations() {
    let e = e2();
    let a = ep(3.0, 4.0);
    assert_eq!(
        IntegrandKind::DistTo { a: a.clone() }.eval(&e, &ep(0.0, 0.0)).unwrap(),
        5.0
    );
    assert_eq!(
        IntegrandKind::HalfSqDist { a: a.clone() }
            .eval(&e, &ep(0.0, 0.0))
            .unwrap(),
        12.5
    );
    let lin = IntegrandKind::BusemannLinear {
        eta: e.direction(&[1.0, 0.0]).unwrap(),
        s0: 2.0,
    };
    assert_eq!(lin.eval(&e, &ep(1.5, 7.0)).unwrap(), -3.0);
    let max = IntegrandKind::FiniteMax {
        members: vec![IntegrandKind::DistTo { a }, lin],
    };
    assert_eq!(max.eval(&e, &ep(0.0, 0.0)).unwrap(), 5.0);
}

#[test]
fn subgradients_in_closed_form() {
    let e = e2();
    let a = ep(3.0, 4.0);
    let x = ep(0.0, 0.0);
    let g = IntegrandKind::DistTo { a: a.clone() }
        .busemann_subgradient(&e, &x)
        .unwrap();
    assert_eq!(g.speed(), 1.0);
    // the pairing reproduces the linear part <y - x, (a - x)/|a - x|>
    let y = ep(1.0, 2.0);
    assert_abs_diff_eq!(e.pairing(&y, &g).unwrap(), -(0.6 + 1.6), epsilon = 1e-15);
    let g = IntegrandKind::HalfSqDist { a: a.clone() }
        .busemann_subgradient(&e, &x)
        .unwrap();
    assert_abs_diff_eq!(g.speed(), 5.0, epsilon = 1e-15);
    assert!(IntegrandKind::DistTo { a: a.clone() }
        .busemann_subgradient(&e, &a)
        .unwrap()
        .is_zero());
    assert!(IntegrandKind::HalfSqDist { a: a.clone() }
        .busemann_subgradient(&e, &a)
        .unwrap()
        .is_zero());
}

#[test]
fn finite_max_uses_the_first_active_member() {
    let e = e2();
    let members = vec![
        IntegrandKind::DistTo { a: ep(1.0, 0.0) },
        IntegrandKind::DistTo { a: ep(-1.0, 0.0) },
    ];
    let max = IntegrandKind::FiniteMax {
        members: members.clone(),
    };
    let x = ep(0.0, 0.0);
    assert_eq!(
        max.busemann_subgradient(&e, &x).unwrap(),
        members[0].busemann_subgradient(&e, &x).unwrap()
    );
}

#[test]
fn speed_bounds() {
    let e = e2();
    let ball = ConvexSet::ball(&e, ep(0.0, 0.0), 1.0).unwrap();
    let half = IntegrandKind::HalfSqDist { a: ep(3.0, 0.0) };
    assert_eq!(half.speed_bound(&e, &ball).unwrap(), 4.0);
    let near = IntegrandKind::HalfSqDist { a: ep(0.5, 0.0) };
    assert_eq!(near.speed_bound(&e, &ball).unwrap(), 2.0);
    match half.speed_bound(&e, &ConvexSet::WholeSpace) {
        Err(Error::Config { assumption, .. }) => assert_eq!(assumption, Assumption::A2),
        other => panic!("expected an (A2) configuration error, got {other:?}"),
    }
}

#[test]
fn objective_constants() {
    let e = e2();
    let ball = ConvexSet::ball(&e, ep(0.0, 0.0), 1.0).unwrap();
    let spec = ObjectiveSpec::Atoms(vec![
        Atom {
            kind: IntegrandKind::HalfSqDist { a: ep(0.5, 0.0) },
            w: 0.25,
        },
        Atom {
            kind: IntegrandKind::DistTo { a: ep(0.0, 0.5) },
            w: 0.75,
        },
    ]);
    let obj = StochasticObjective::resolve(&spec, &e, &ball).unwrap();
    assert_eq!(obj.lipschitz_l(), 2.0);
    assert_eq!(obj.strong_convexity(), 0.25);
    assert_eq!(obj.atom_count(), Some(2));
    let x = ep(0.0, 0.0);
    assert_abs_diff_eq!(
        obj.mean_objective(&e, &x, 1).unwrap().value,
        0.25 * 0.125 + 0.75 * 0.5,
        epsilon = 1e-15
    );
}

#[test]
fn weights_must_sum_to_one() {
    let e = e2();
    let spec = ObjectiveSpec::Atoms(vec![Atom {
        kind: IntegrandKind::DistTo { a: ep(0.0, 0.0) },
        w: 0.5,
    }]);
    assert!(matches!(
        StochasticObjective::resolve(&spec, &e, &ConvexSet::WholeSpace),
        Err(Error::Usage(_))
    ));
}

#[test]
fn fixed_speed_oracle_keeps_the_direction() {
    let e = e2();
    let kind = IntegrandKind::DistTo { a: ep(3.0, 4.0) };
    let x = ep(0.0, 0.0);
    let exact = ExactOracle.subgradient(&e, &kind, &x).unwrap();
    let faulty = FixedSpeedOracle { speed: 2.0 }.subgradient(&e, &kind, &x).unwrap();
    match (exact, faulty) {
        (ConeElement::Ray { direction: d1, .. }, ConeElement::Ray { direction: d2, speed }) => {
            assert_eq!(d1, d2);
            assert_eq!(speed, 2.0);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn certificates_detect_wrong_subgradients() {
    let e = e2();
    let kind = IntegrandKind::DistTo { a: ep(1.0, 0.0) };
    let x = ep(0.0, 0.0);
    let probes: Vec<Point> = (-10..=10)
        .flat_map(|i| (-10..=10).map(move |j| ep(i as f64 * 0.2, j as f64 * 0.2)))
        .collect();
    let g = kind.busemann_subgradient(&e, &x).unwrap();
    assert!(subgradient_certificate(&e, &kind, &x, &g, &probes).unwrap() <= 1e-12);
    let wrong = ConeElement::new(e.direction(&[-1.0, 0.0]).unwrap(), 1.0).unwrap();
    assert!(subgradient_certificate(&e, &kind, &x, &wrong, &probes).unwrap() > 0.5);
    assert!(fenchel_conjugate(&e, &kind, &g, &[]).is_err());
    // sup_y -y_1 - |y - a| = -1, attained on the segment [x, a]
    assert_abs_diff_eq!(
        fenchel_conjugate(&e, &kind, &g, &probes).unwrap(),
        -1.0,
        epsilon = 1e-12
    );
}

#[test]
fn parametric_objective_estimates() {
    let e = e2();
    let spec = ObjectiveSpec::Parametric(ParametricFamily::DistToGaussianTargets {
        seed: 3,
        sigma: 1.0,
        center: ep(0.0, 0.0),
    });
    let obj = StochasticObjective::resolve(&spec, &e, &ConvexSet::WholeSpace).unwrap();
    assert!(obj.mean_objective(&e, &ep(0.0, 0.0), 1).is_err());
    // E|g| for a standard Gaussian in the plane is sqrt(pi / 2)
    let est = obj.mean_objective(&e, &ep(0.0, 0.0), 20_000).unwrap();
    assert!((est.value - (std::f64::consts::PI / 2.0).sqrt()).abs() < 3.0 * est.stderr + 1e-3);
    let again = obj.mean_objective(&e, &ep(0.0, 0.0), 20_000).unwrap();
    assert_eq!(est, again);
}

#[test]
fn objective_json_round_trip() {
    let e = e2();
    let spec = ObjectiveSpec::Atoms(vec![
        Atom {
            kind: IntegrandKind::DistTo { a: ep(1.0, 0.0) },
            w: 0.5,
        },
        Atom {
            kind: IntegrandKind::BusemannLinear {
                eta: e.direction(&[0.0, 1.0]).unwrap(),
                s0: 1.0,
            },
            w: 0.5,
        },
    ]);
    let json = serde_json::to_string(&spec).unwrap();
    let back: ObjectiveSpec = serde_json::from_str(&json).unwrap();
    assert_eq!(spec, back);
}
