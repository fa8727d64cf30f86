//! Stochastic objectives `f(e, x)` with exact Busemann subgradient oracles.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Assumption, Error, Result};
use crate::geometry::{BoundaryDirection, ConeElement, ConvexSet, Point, Space, SpaceKind};
use crate::rng::{self, Purpose};

/// One integrand `f(e, .)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegrandKind {
    /// `d(., a)`.
    DistTo { a: Point },
    /// `d(., a)^2 / 2`.
    HalfSqDist { a: Point },
    /// `s0 b_eta`.
    BusemannLinear { eta: BoundaryDirection, s0: f64 },
    /// Pointwise maximum of the members.
    FiniteMax { members: Vec<IntegrandKind> },
}

impl IntegrandKind {
    pub fn eval(&self, space: &Space, x: &Point) -> Result<f64> {
        match self {
            IntegrandKind::DistTo { a } => space.distance(x, a),
            IntegrandKind::HalfSqDist { a } => Ok(0.5 * space.distance(x, a)?.powi(2)),
            IntegrandKind::BusemannLinear { eta, s0 } => Ok(s0 * space.busemann(eta, x)?),
            IntegrandKind::FiniteMax { members } => {
                let mut best = f64::NEG_INFINITY;
                for m in members {
                    best = best.max(m.eval(space, x)?);
                }
                Ok(best)
            }
        }
    }

    /// The closed-form Busemann subgradient at `x`.
    pub fn busemann_subgradient(&self, space: &Space, x: &Point) -> Result<ConeElement> {
        match self {
            IntegrandKind::DistTo { a } => {
                if space.distance(x, a)? == 0.0 {
                    return Ok(ConeElement::Zero);
                }
                ConeElement::new(space.direction_through(x, a)?, 1.0)
            }
            IntegrandKind::HalfSqDist { a } => {
                let d = space.distance(x, a)?;
                if d == 0.0 {
                    return Ok(ConeElement::Zero);
                }
                ConeElement::new(space.direction_through(x, a)?, d)
            }
            IntegrandKind::BusemannLinear { eta, s0 } => ConeElement::new(eta.clone(), *s0),
            IntegrandKind::FiniteMax { .. } => self.active_member(space, x)?.busemann_subgradient(space, x),
        }
    }

    /// First member attaining the maximum at `x`.
    fn active_member(&self, space: &Space, x: &Point) -> Result<&IntegrandKind> {
        match self {
            IntegrandKind::FiniteMax { members } => {
                let mut best: Option<(f64, &IntegrandKind)> = None;
                for m in members {
                    let v = m.eval(space, x)?;
                    if best.is_none_or(|(b, _)| v > b) {
                        best = Some((v, m));
                    }
                }
                best.map(|(_, m)| m)
                    .ok_or_else(|| Error::usage("finite_max needs at least one member"))
            }
            other => Ok(other),
        }
    }

    /// Strong convexity modulus along geodesics.
    pub fn strong_convexity(&self) -> f64 {
        match self {
            IntegrandKind::DistTo { .. } | IntegrandKind::BusemannLinear { .. } => 0.0,
            IntegrandKind::HalfSqDist { .. } => 1.0,
            IntegrandKind::FiniteMax { members } => members
                .iter()
                .map(IntegrandKind::strong_convexity)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Upper bound on the oracle speed over `C`.
    pub fn speed_bound(&self, space: &Space, constraint: &ConvexSet) -> Result<f64> {
        match self {
            IntegrandKind::DistTo { .. } => Ok(1.0),
            IntegrandKind::BusemannLinear { s0, .. } => Ok(*s0),
            IntegrandKind::HalfSqDist { a } => match constraint {
                ConvexSet::Ball { center, radius } => Ok((2.0 * radius).max(space.distance(center, a)? + radius)),
                _ => Err(Error::config(
                    Assumption::A2,
                    "half_sq_dist has no uniform speed bound unless the constraint is a closed ball",
                )),
            },
            IntegrandKind::FiniteMax { members } => {
                let mut l = 0.0_f64;
                for m in members {
                    l = l.max(m.speed_bound(space, constraint)?);
                }
                Ok(l)
            }
        }
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        match self {
            IntegrandKind::DistTo { a } | IntegrandKind::HalfSqDist { a } => space.validate_point(a),
            IntegrandKind::BusemannLinear { eta, s0 } => {
                space.validate_direction(eta)?;
                if !(*s0 > 0.0 && s0.is_finite()) {
                    return Err(Error::usage(format!("busemann_linear needs s0 > 0, got {s0}")));
                }
                Ok(())
            }
            IntegrandKind::FiniteMax { members } => {
                if members.is_empty() {
                    return Err(Error::usage("finite_max needs at least one member"));
                }
                members.iter().try_for_each(|m| m.validate(space))
            }
        }
    }
}

/// A weighted atom of a finite sample space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(flatten)]
    pub kind: IntegrandKind,
    pub w: f64,
}

/// Parametric sample spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ParametricFamily {
    /// `dist_to(a)` with `a` at distance `sigma |g|` from `center` along a
    /// uniformly random direction, `g` standard Gaussian in the dimension of
    /// the space. The `seed` fixes the evaluation sample used to estimate `F`.
    DistToGaussianTargets { seed: u64, sigma: f64, center: Point },
}

impl ParametricFamily {
    pub fn draw<R: Rng + ?Sized>(&self, space: &Space, rng: &mut R) -> Result<IntegrandKind> {
        match self {
            ParametricFamily::DistToGaussianTargets { sigma, center, .. } => {
                let xi = space.random_direction(center, rng)?;
                let g2: f64 = (0..space.dim())
                    .map(|_| rng.sample::<f64, _>(StandardNormal).powi(2))
                    .sum();
                let a = space.ray_point(center, &xi, sigma * g2.sqrt())?;
                Ok(IntegrandKind::DistTo { a })
            }
        }
    }

    fn evaluation_seed(&self) -> u64 {
        match self {
            ParametricFamily::DistToGaussianTargets { seed, .. } => *seed,
        }
    }

    /// Minimizer of the mean, known from the symmetry of the target law.
    pub fn symmetric_minimizer(&self) -> Option<&Point> {
        match self {
            ParametricFamily::DistToGaussianTargets { center, .. } => Some(center),
        }
    }
}

/// Serialized form of an objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveSpec {
    Atoms(Vec<Atom>),
    Parametric(ParametricFamily),
}

/// Resolved sample space `(E, mu)`.
#[derive(Debug, Clone)]
pub enum SampleSpace {
    Finite {
        atoms: Vec<Atom>,
        sampler: WeightedIndex<f64>,
    },
    Parametric(ParametricFamily),
}

impl SampleSpace {
    pub fn spec(&self) -> ObjectiveSpec {
        match self {
            SampleSpace::Finite { atoms, .. } => ObjectiveSpec::Atoms(atoms.clone()),
            SampleSpace::Parametric(p) => ObjectiveSpec::Parametric(p.clone()),
        }
    }
}

/// Monte Carlo or exact estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, stderr: 0.0 }
    }
}

/// Which atom was drawn at a step.
#[derive(Debug, Clone, PartialEq)]
pub enum SampledAtom {
    Index(usize),
    Drawn(IntegrandKind),
}

/// The integrand `f(e, x)` together with its law and the constants `L` and
/// the mean strong convexity modulus.
#[derive(Debug, Clone)]
pub struct StochasticObjective {
    sample_space: SampleSpace,
    lipschitz_l: f64,
    strong_convexity: f64,
}

impl StochasticObjective {
    /// Resolves a spec against a space and constraint. `L` is the largest
    /// per-atom speed bound over `C`; the strong convexity modulus is the
    /// weighted mean of the atoms' moduli.
    pub fn resolve(spec: &ObjectiveSpec, space: &Space, constraint: &ConvexSet) -> Result<Self> {
        match spec {
            ObjectiveSpec::Atoms(atoms) => {
                if atoms.is_empty() {
                    return Err(Error::usage("objective needs at least one atom"));
                }
                let mut total = 0.0;
                let mut l = 0.0_f64;
                let mut alpha = 0.0;
                for atom in atoms {
                    if !(atom.w > 0.0 && atom.w.is_finite()) {
                        return Err(Error::usage(format!("atom weight must be positive, got {}", atom.w)));
                    }
                    atom.kind.validate(space)?;
                    total += atom.w;
                    l = l.max(atom.kind.speed_bound(space, constraint)?);
                    alpha += atom.w * atom.kind.strong_convexity();
                }
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::usage(format!("atom weights sum to {total}, not 1")));
                }
                let sampler = WeightedIndex::new(atoms.iter().map(|a| a.w))
                    .map_err(|e| Error::usage(format!("atom weights: {e}")))?;
                Ok(StochasticObjective {
                    sample_space: SampleSpace::Finite {
                        atoms: atoms.clone(),
                        sampler,
                    },
                    lipschitz_l: l,
                    strong_convexity: alpha,
                })
            }
            ObjectiveSpec::Parametric(family) => {
                match family {
                    ParametricFamily::DistToGaussianTargets { sigma, center, .. } => {
                        space.validate_point(center)?;
                        if !(*sigma > 0.0 && sigma.is_finite()) {
                            return Err(Error::usage(format!("sigma must be positive, got {sigma}")));
                        }
                    }
                }
                Ok(StochasticObjective {
                    sample_space: SampleSpace::Parametric(family.clone()),
                    lipschitz_l: 1.0,
                    strong_convexity: 0.0,
                })
            }
        }
    }

    pub fn sample_space(&self) -> &SampleSpace {
        &self.sample_space
    }

    pub fn lipschitz_l(&self) -> f64 {
        self.lipschitz_l
    }

    pub fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }

    /// Atoms of a finite sample space.
    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.sample_space {
            SampleSpace::Finite { atoms, .. } => Some(atoms),
            SampleSpace::Parametric(_) => None,
        }
    }

    /// Number of atoms `m` for finite sample spaces.
    pub fn atom_count(&self) -> Option<usize> {
        self.atoms().map(<[Atom]>::len)
    }

    /// Draws `e_{n+1}` for replica `replica` of a run seeded with `seed`.
    pub fn sample(&self, space: &Space, seed: u64, replica: u64, n: u64) -> Result<SampledAtom> {
        self.sample_with(space, &mut rng::stream(seed, Purpose::Atom, replica, n))
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, space: &Space, rng: &mut R) -> Result<SampledAtom> {
        match &self.sample_space {
            SampleSpace::Finite { sampler, .. } => Ok(SampledAtom::Index(sampler.sample(rng))),
            SampleSpace::Parametric(family) => Ok(SampledAtom::Drawn(family.draw(space, rng)?)),
        }
    }

    pub fn kind_of<'a>(&'a self, atom: &'a SampledAtom) -> &'a IntegrandKind {
        match (atom, &self.sample_space) {
            (SampledAtom::Index(i), SampleSpace::Finite { atoms, .. }) => &atoms[*i].kind,
            (SampledAtom::Drawn(k), _) => k,
            (SampledAtom::Index(_), SampleSpace::Parametric(_)) => {
                unreachable!("indices are only produced by finite sample spaces")
            }
        }
    }

    /// `F(x)`: exact for finite sample spaces, otherwise a Monte Carlo
    /// estimate over the first `mc_samples` members of the fixed evaluation
    /// sample.
    pub fn mean_objective(&self, space: &Space, x: &Point, mc_samples: usize) -> Result<Estimate> {
        match &self.sample_space {
            SampleSpace::Finite { atoms, .. } => {
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.w * a.kind.eval(space, x)?;
                }
                Ok(Estimate::exact(acc))
            }
            SampleSpace::Parametric(family) => {
                if mc_samples < 2 {
                    return Err(Error::usage("parametric objectives need at least 2 evaluation samples"));
                }
                let seed = family.evaluation_seed();
                let mut mean = 0.0;
                let mut m2 = 0.0;
                for k in 0..mc_samples {
                    let mut rng = rng::stream(seed, Purpose::Evaluation, 0, k as u64);
                    let v = family.draw(space, &mut rng)?.eval(space, x)?;
                    let delta = v - mean;
                    mean += delta / (k + 1) as f64;
                    m2 += delta * (v - mean);
                }
                let var = m2 / (mc_samples - 1) as f64;
                Ok(Estimate {
                    value: mean,
                    stderr: (var / mc_samples as f64).sqrt(),
                })
            }
        }
    }
}

/// Source of Busemann subgradients. The exact oracle is the default; other
/// implementations exist to exercise the checks.
pub trait SubgradientOracle: Send + Sync {
    fn subgradient(&self, space: &Space, kind: &IntegrandKind, x: &Point) -> Result<ConeElement>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactOracle;

impl SubgradientOracle for ExactOracle {
    fn subgradient(&self, space: &Space, kind: &IntegrandKind, x: &Point) -> Result<ConeElement> {
        kind.busemann_subgradient(space, x)
    }
}

/// Faulty oracle that keeps the exact direction but reports the fixed speed
/// `speed` on every nonzero output.
#[derive(Debug, Clone, Copy)]
pub struct FixedSpeedOracle {
    pub speed: f64,
}

impl SubgradientOracle for FixedSpeedOracle {
    fn subgradient(&self, space: &Space, kind: &IntegrandKind, x: &Point) -> Result<ConeElement> {
        match kind.busemann_subgradient(space, x)? {
            ConeElement::Zero => Ok(ConeElement::Zero),
            ConeElement::Ray { direction, .. } => ConeElement::new(direction, self.speed),
        }
    }
}

/// Largest violation of the subgradient inequality over the probes:
/// `max_y (f(x) - <x, g>) - (f(y) - <y, g>)`.
pub fn subgradient_certificate(
    space: &Space,
    kind: &IntegrandKind,
    x: &Point,
    g: &ConeElement,
    probes: &[Point],
) -> Result<f64> {
    let at_x = kind.eval(space, x)? - space.pairing(x, g)?;
    let mut worst = f64::NEG_INFINITY;
    for y in probes {
        let at_y = kind.eval(space, y)? - space.pairing(y, g)?;
        worst = worst.max(at_x - at_y);
    }
    Ok(worst)
}

/// Probe lower bound on the Fenchel conjugate `sup_y <y, g> - f(y)`.
pub fn fenchel_conjugate(space: &Space, kind: &IntegrandKind, g: &ConeElement, probes: &[Point]) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::usage("fenchel_conjugate needs at least one probe"));
    }
    let mut best = f64::NEG_INFINITY;
    for y in probes {
        best = best.max(space.pairing(y, g)? - kind.eval(space, y)?);
    }
    Ok(best)
}

/// Radius of the window around the base point used for probes when the
/// constraint is unbounded.
pub const DEFAULT_PROBE_WINDOW: f64 = 10.0;

/// Random probe points of `C`: uniform-radius draws in a ball, or in a window
/// of radius `window` around the base point for unbounded sets.
pub fn probes<R: Rng + ?Sized>(
    space: &Space,
    constraint: &ConvexSet,
    count: usize,
    window: f64,
    rng: &mut R,
) -> Result<Vec<Point>> {
    let (center, radius) = match constraint {
        ConvexSet::Ball { center, radius } => (center.clone(), *radius),
        _ => (space.base().clone(), window),
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = space.sample_ball(&center, radius, rng)?;
        if constraint.contains(space, &p, 0.0)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Tolerance for deterministic inequalities in a given space.
pub fn tolerance_for(space: &Space) -> f64 {
    match space.kind() {
        SpaceKind::Hyperbolic { .. } => 1e-7,
        _ => 1e-9,
    }
}
