use std::hint::black_box;

use busemann::analysis::monte_carlo::{simulate, EnsembleSpec};
use busemann::experiments::{self, Mixture, Model};
use busemann::integrands::DEFAULT_PROBE_WINDOW;
use busemann::rng::{self, Purpose};
use busemann::{integrands, solver, ExactOracle, Point};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn sample(model: Model) -> (busemann::Space, Vec<Point>) {
    let space = model.space();
    let mut rng = rng::stream(1, Purpose::Probe, 0, 0);
    let pts = integrands::probes(&space, &busemann::ConvexSet::WholeSpace, 64, 2.0, &mut rng).unwrap();
    (space, pts)
}

fn geometry(c: &mut Criterion) {
    let mut g = c.benchmark_group("geometry");
    for model in Model::ALL {
        let (space, pts) = sample(model);
        let mut rng = rng::stream(2, Purpose::Probe, 0, 0);
        let xi = space.random_direction(&pts[0], &mut rng).unwrap();
        g.bench_with_input(BenchmarkId::new("distance", model.name()), &pts, |b, pts| {
            b.iter(|| {
                pts.windows(2)
                    .map(|w| space.distance(&w[0], &w[1]).unwrap())
                    .sum::<f64>()
            })
        });
        g.bench_with_input(BenchmarkId::new("combine", model.name()), &pts, |b, pts| {
            b.iter(|| {
                for w in pts.windows(2) {
                    black_box(space.combine(&w[0], &w[1], 0.3).unwrap());
                }
            })
        });
        g.bench_with_input(BenchmarkId::new("ray_point", model.name()), &pts, |b, pts| {
            b.iter(|| {
                for p in pts {
                    black_box(space.ray_point(p, &xi, 0.7).unwrap());
                }
            })
        });
        g.bench_with_input(BenchmarkId::new("busemann", model.name()), &pts, |b, pts| {
            b.iter(|| pts.iter().map(|p| space.busemann(&xi, p).unwrap()).sum::<f64>())
        });
    }
    g.finish();
}

fn solver_runs(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_1000_steps");
    g.sample_size(20);
    for model in Model::ALL {
        for mixture in Mixture::ALL {
            let e = experiments::mixture(model, mixture, 1_000, 3);
            g.bench_function(e.name.as_str(), |b| {
                b.iter(|| solver::run(black_box(&e.config)).unwrap())
            });
        }
    }
    g.finish();
}

fn ensembles(c: &mut Criterion) {
    let mut g = c.benchmark_group("ensemble_64x1000");
    g.sample_size(10);
    for model in Model::ALL {
        let e = experiments::mixture(model, Mixture::HalfSq, 1_000, 5);
        let problem = e.config.problem().unwrap();
        let spec = EnsembleSpec {
            replicas: 64,
            horizon: 1_000,
            seed: 5,
            x_star: problem.x0.clone(),
            min_f: None,
            track_ergodic: false,
            exceedances: Vec::new(),
            exact_conditional_replicas: 0,
        };
        g.bench_function(model.name(), |b| {
            b.iter(|| simulate(&problem, &ExactOracle, &spec).unwrap())
        });
    }
    g.finish();
}

fn probes(c: &mut Criterion) {
    let e = experiments::mixture(Model::Hyperbolic, Mixture::DistTo, 1, 0);
    let problem = e.config.problem().unwrap();
    c.bench_function("probes_hyperbolic_ball_256", |b| {
        b.iter(|| {
            let mut rng = rng::stream(3, Purpose::Probe, 0, 0);
            integrands::probes(&problem.space, &problem.constraint, 256, DEFAULT_PROBE_WINDOW, &mut rng).unwrap()
        })
    });
}

criterion_group!(benches, geometry, solver_runs, ensembles, probes);
criterion_main!(benches);
