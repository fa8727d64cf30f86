use busemann::analysis::per_step::step_defect;
use busemann::analysis::rates::{chi, theta, verify_chi, verify_theta};
use busemann::analysis::sequences::{qihou_check, random_qihou_instance};
use busemann::geometry::{ConvexSet, Point, Space};
use busemann::integrands::{tolerance_for, ExactOracle, IntegrandKind};
use busemann::solver::{reduce_replicas, sb_step, Moments, StepSchedule};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
enum Model {
    Euclidean,
    Hyperbolic,
    Star,
}

fn model() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::Euclidean), Just(Model::Hyperbolic), Just(Model::Star)]
}

fn space(m: Model) -> Space {
    match m {
        Model::Euclidean => Space::euclidean(2),
        Model::Hyperbolic => Space::hyperbolic(2),
        Model::Star => Space::star_tree(3),
    }
    .unwrap()
}

/// A point from raw draws: planar coordinates, or a leg and a radius.
fn point(s: &Space, m: Model, raw: (f64, f64, usize)) -> Point {
    match m {
        Model::Euclidean => s.point(&[raw.0, raw.1]).unwrap(),
        Model::Hyperbolic => s.hyperbolic_point(&[raw.0, raw.1]).unwrap(),
        Model::Star => s.star_point(raw.2 % 3, raw.0.abs() + raw.1.abs()).unwrap(),
    }
}

fn raw() -> impl Strategy<Value = (f64, f64, usize)> {
    (-1.5..1.5f64, -1.5..1.5f64, 0usize..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cat0_comparison(m in model(), p in raw(), q in raw(), x in raw(), t in 0.0..=1.0f64) {
        let s = space(m);
        let d = s.cat0_defect(&point(&s, m, x), (&point(&s, m, p), &point(&s, m, q)), t).unwrap();
        prop_assert!(d >= -tolerance_for(&s));
    }

    #[test]
    fn combine_hits_the_geodesic(m in model(), p in raw(), q in raw(), t in 0.0..=1.0f64) {
        let s = space(m);
        let (p, q) = (point(&s, m, p), point(&s, m, q));
        let c = s.combine(&p, &q, t).unwrap();
        let d = s.distance(&p, &q).unwrap();
        let tol = 10.0 * tolerance_for(&s);
        prop_assert!((s.distance(&p, &c).unwrap() - t * d).abs() <= tol);
        prop_assert!((s.distance(&c, &q).unwrap() - (1.0 - t) * d).abs() <= tol);
    }

    #[test]
    fn busemann_functions_are_one_lipschitz(m in model(), x in raw(), y in raw(), seed in any::<u64>()) {
        let s = space(m);
        let (x, y) = (point(&s, m, x), point(&s, m, y));
        let xi = s.random_direction(&x, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let gap = (s.busemann(&xi, &x).unwrap() - s.busemann(&xi, &y).unwrap()).abs();
        prop_assert!(gap <= s.distance(&x, &y).unwrap() + tolerance_for(&s));
    }

    #[test]
    fn ball_projection_is_nonexpansive_and_idempotent(m in model(), c in raw(), x in raw(), y in raw(), r in 0.1..1.0f64) {
        let s = space(m);
        let ball = ConvexSet::ball(&s, point(&s, m, c), r).unwrap();
        let (x, y) = (point(&s, m, x), point(&s, m, y));
        let (px, py) = (ball.project(&s, &x).unwrap(), ball.project(&s, &y).unwrap());
        let tol = tolerance_for(&s);
        prop_assert!(s.distance(&px, &py).unwrap() <= s.distance(&x, &y).unwrap() + tol);
        prop_assert!(ball.contains(&s, &px, 1e-9).unwrap());
        prop_assert!(s.distance(&ball.project(&s, &px).unwrap(), &px).unwrap() <= tol);
    }

    #[test]
    fn steps_stay_feasible_and_descend(
        m in model(), a in raw(), x in raw(), y in raw(), t in 1e-3..2.0f64, squared in any::<bool>()
    ) {
        let s = space(m);
        let ball = ConvexSet::ball(&s, s.base().clone(), 1.0).unwrap();
        let a = point(&s, m, a);
        let x = ball.project(&s, &point(&s, m, x)).unwrap();
        let y = ball.project(&s, &point(&s, m, y)).unwrap();
        let kind = if squared { IntegrandKind::HalfSqDist { a } } else { IntegrandKind::DistTo { a } };
        let step = sb_step(&s, &ball, &ExactOracle, &x, &kind, t).unwrap();
        prop_assert!(ball.contains(&s, &step.next, 1e-9).unwrap());
        let d = step_defect(&s, &kind, &x, &step.next, &step.g, t, &y).unwrap();
        prop_assert!(d >= -tolerance_for(&s));
    }

    #[test]
    fn sequence_lemma_on_generated_instances(seed in any::<u64>(), len in 1usize..200) {
        let inst = random_qihou_instance(&mut ChaCha8Rng::seed_from_u64(seed), len);
        prop_assert!(qihou_check(&inst, 1e-12).unwrap().holds);
    }

    #[test]
    fn rate_witnesses_satisfy_their_definitions(c in 0.2..3.0f64, eps in 1e-3..1.0f64, k in 0u64..1000, b in 0.01..4.0f64) {
        let s = StepSchedule::InvLinear { c };
        let n = chi(&s, eps).unwrap();
        prop_assert!(verify_chi(&s, eps, n).unwrap());
        let w = theta(&s, k, b * c).unwrap();
        prop_assert!(w >= k);
        prop_assert!(verify_theta(&s, k, b * c, w).unwrap());
        let sqrt = StepSchedule::InvSqrt { d: 2.0, m: 3, l: 1.0 };
        let w = theta(&sqrt, k, b).unwrap();
        prop_assert!(verify_theta(&sqrt, k, b, w).unwrap());
    }

    #[test]
    fn replica_reduction_is_order_free(values in prop::collection::vec(-1e3..1e3f64, 1..200)) {
        let reduce = || reduce_replicas(
            values.len(),
            Moments::default,
            |i, acc: &mut Moments| { acc.push(values[i as usize]); Ok(()) },
            |a: &mut Moments, b: Moments| a.merge(&b),
        ).unwrap();
        let pooled = reduce();
        prop_assert_eq!(pooled.count, values.len() as u64);
        let direct = values.iter().sum::<f64>() / values.len() as f64;
        prop_assert!((pooled.mean - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
        let again = reduce();
        prop_assert_eq!(pooled.mean.to_bits(), again.mean.to_bits());
    }
}
