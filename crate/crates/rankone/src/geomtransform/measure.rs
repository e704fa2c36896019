//! Monte Carlo and quadrature checks of the pairing measure and of the Haar
//! factorizations attached to 𝒜.

use super::{distance_from_origin, map_a, map_g_inverse, uniform_boundary_point, BallSampler, DoubleSpherePoint};
use crate::boundary::{endpoint, q_transform, BoundaryFunction, BoundaryPoint, Sign, SphereRule};
use crate::cfunc::{cutoff, CFunction};
use crate::error::{Error, Result};
use crate::lie_core::{inv, Mat, NbarCoordinates, RankOneModel};
use crate::quad::gauss_legendre_on;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Sample count, batch count and seed of a Monte Carlo run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSpec {
    pub samples: usize,
    pub batches: usize,
    pub seed: u64,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec { samples: 1_000_000, batches: 20, seed: 1 }
    }
}

/// Mean and standard error from batch means.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: C64,
    pub sigma: f64,
}

impl McEstimate {
    pub fn relative_sigma(&self) -> f64 {
        self.sigma / self.mean.norm()
    }
}

/// A node of a product integration domain.
#[derive(Clone, Debug)]
pub enum Node {
    Boundary(BoundaryPoint),
    Coords(Vec<f64>),
    Base(Mat),
}

impl Node {
    pub fn boundary(&self) -> &BoundaryPoint {
        match self {
            Node::Boundary(b) => b,
            _ => panic!("expected a boundary node"),
        }
    }
    pub fn coords(&self) -> &[f64] {
        match self {
            Node::Coords(c) => c,
            _ => panic!("expected a coordinate node"),
        }
    }
    pub fn base(&self) -> &Mat {
        match self {
            Node::Base(h) => h,
            _ => panic!("expected a base-point node"),
        }
    }
}

/// One factor of a product domain, carrying its own measure.
#[derive(Clone, Debug)]
pub enum Factor {
    /// K/M with total mass vol(S^{n−1}).
    Sphere,
    /// Lebesgue measure on the box [−1, 1]^d.
    Cube(usize),
    /// Lebesgue measure on ℝ^d through c = tan(π(s − ½)) per coordinate.
    Line(usize),
    /// G/K restricted to a geodesic ball, in polar coordinates.
    Ball(BallSampler),
}

impl Factor {
    fn rule(&self, model: &RankOneModel, res: usize) -> Vec<(Node, f64)> {
        match self {
            Factor::Sphere => {
                let r = SphereRule::new(model, res);
                r.points.into_iter().map(Node::Boundary).zip(r.weights).collect()
            }
            Factor::Cube(d) => {
                let h = 2.0 / res as f64;
                let line: Vec<f64> = (0..res).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
                let mut out = vec![(Vec::new(), 1.0)];
                for _ in 0..*d {
                    out = out
                        .into_iter()
                        .flat_map(|(c, w)| {
                            line.iter().map(move |x| {
                                let mut c2: Vec<f64> = c.clone();
                                c2.push(*x);
                                (c2, w * h)
                            })
                        })
                        .collect();
                }
                out.into_iter().map(|(c, w)| (Node::Coords(c), w)).collect()
            }
            Factor::Line(d) => Factor::Cube(*d)
                .rule(model, res)
                .into_iter()
                .map(|(n, w)| {
                    let (c, j) = line_map(n.coords());
                    (Node::Coords(c), w * j)
                })
                .collect(),
            Factor::Ball(b) => {
                let (us, uw) = gauss_legendre_on(res, 0.0, b.radius);
                let dirs = SphereRule::new(model, res);
                let mut out = Vec::new();
                for (u, wu) in us.iter().zip(&uw) {
                    let a = model.exp_a(*u);
                    let rho = super::polar_density(model, *u);
                    for (p, wp) in dirs.points.iter().zip(&dirs.weights) {
                        out.push((Node::Base(p.k * a), wu * rho * wp));
                    }
                }
                out
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, model: &RankOneModel, rng: &mut R) -> (Node, f64) {
        match self {
            Factor::Sphere => (Node::Boundary(uniform_boundary_point(model, rng)), model.vol_sphere),
            Factor::Cube(d) => {
                let c = (0..*d).map(|_| rng.random_range(-1.0..1.0)).collect();
                (Node::Coords(c), 2f64.powi(*d as i32))
            }
            Factor::Line(d) => {
                let s: Vec<f64> = (0..*d).map(|_| rng.random_range(-1.0..1.0)).collect();
                let (c, j) = line_map(&s);
                (Node::Coords(c), j * 2f64.powi(*d as i32))
            }
            Factor::Ball(b) => {
                let (h, w) = b.sample_weighted(model, rng);
                (Node::Base(h), w)
            }
        }
    }
}

/// s ∈ (−1, 1)^d ↦ tan(πs/2) with Jacobian ∏ (π/2) sec²(πs/2).
fn line_map(s: &[f64]) -> (Vec<f64>, f64) {
    let mut j = 1.0;
    let c = s
        .iter()
        .map(|x| {
            let a = std::f64::consts::FRAC_PI_2 * x;
            let t = a.tan();
            j *= std::f64::consts::FRAC_PI_2 * (1.0 + t * t);
            t
        })
        .collect();
    (c, j)
}

/// How a family of integrals is evaluated.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum Integration {
    /// Tensor-product quadrature with the given resolution per factor.
    Quadrature(usize),
    MonteCarlo(McSpec),
}

/// Integrates the vector-valued `f` over the product of `factors`.
pub fn integrate<F>(model: &RankOneModel, factors: &[Factor], how: Integration, f: F) -> Vec<McEstimate>
where
    F: Fn(&[Node]) -> Vec<C64> + Sync,
{
    match how {
        Integration::Quadrature(res) => {
            quadrature(model, factors, res, &f).into_iter().map(|mean| McEstimate { mean, sigma: 0.0 }).collect()
        }
        Integration::MonteCarlo(spec) => monte_carlo(model, factors, &spec, &f),
    }
}

fn accumulate(acc: &mut Vec<C64>, vals: Vec<C64>, w: f64) {
    if acc.is_empty() {
        acc.resize(vals.len(), ZERO);
    }
    for (a, v) in acc.iter_mut().zip(vals) {
        *a += v * w;
    }
}

fn quadrature<F>(model: &RankOneModel, factors: &[Factor], res: usize, f: &F) -> Vec<C64>
where
    F: Fn(&[Node]) -> Vec<C64> + Sync,
{
    let rules: Vec<Vec<(Node, f64)>> = factors.iter().map(|fc| fc.rule(model, res)).collect();
    let partial: Vec<Vec<C64>> = rules[0]
        .par_iter()
        .map(|(n0, w0)| {
            let mut acc = Vec::new();
            let mut idx = vec![0usize; rules.len()];
            let mut nodes: Vec<Node> = vec![n0.clone()];
            nodes.extend(rules[1..].iter().map(|r| r[0].0.clone()));
            loop {
                let mut w = *w0;
                for (j, r) in rules.iter().enumerate().skip(1) {
                    nodes[j] = r[idx[j]].0.clone();
                    w *= r[idx[j]].1;
                }
                accumulate(&mut acc, f(&nodes), w);
                let mut j = rules.len() - 1;
                loop {
                    if j == 0 {
                        return acc;
                    }
                    idx[j] += 1;
                    if idx[j] < rules[j].len() {
                        break;
                    }
                    idx[j] = 0;
                    j -= 1;
                }
            }
        })
        .collect();
    let mut total = Vec::new();
    for p in partial {
        accumulate(&mut total, p, 1.0);
    }
    total
}

fn monte_carlo<F>(model: &RankOneModel, factors: &[Factor], spec: &McSpec, f: &F) -> Vec<McEstimate>
where
    F: Fn(&[Node]) -> Vec<C64> + Sync,
{
    let batches = spec.batches.max(2);
    let per = (spec.samples / batches).max(1);
    let means: Vec<Vec<C64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(b as u64);
            let mut acc = Vec::new();
            let mut nodes = Vec::with_capacity(factors.len());
            for _ in 0..per {
                nodes.clear();
                let mut w = 1.0;
                for fc in factors {
                    let (n, v) = fc.sample(model, &mut rng);
                    nodes.push(n);
                    w *= v;
                }
                accumulate(&mut acc, f(&nodes), w);
            }
            acc.iter().map(|a| a / per as f64).collect()
        })
        .collect();
    let m = means[0].len();
    let nb = batches as f64;
    (0..m)
        .map(|i| {
            let mean = means.iter().map(|v| v[i]).sum::<C64>() / nb;
            let var = means.iter().map(|v| (v[i] - mean).norm_sqr()).sum::<f64>() / (nb - 1.0);
            McEstimate { mean, sigma: (var / nb).sqrt() }
        })
        .collect()
}

/// C^∞ step from 0 on (−∞, 0] to 1 on [1, ∞).
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// C^∞ bump exp(1 − 1/(1 − s²)) supported in |s| < 1.
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Largest d(o, n̄K) over ⟨n̄⟩ ≤ `bracket`.
pub fn nbar_reach(model: &RankOneModel, bracket: f64) -> f64 {
    let mut best = 0.0f64;
    for i in 0..=64 {
        let t = i as f64 / 64.0;
        for sign in [1.0, -1.0] {
            let mut c = NbarCoordinates::zero(model);
            c.u1[0] = (t * bracket).sqrt();
            if model.m_2alpha > 0 {
                c.u2[0] = sign * (1.0 - t) * bracket;
            } else if t < 1.0 {
                continue;
            }
            best = best.max(distance_from_origin(model, &model.nbar_exp(&c)));
        }
    }
    best
}

/// Smallest B on a geometric grid such that `inside` fails for all sampled n̄ with ⟨n̄⟩ ≥ B.
fn bracket_bound<F: Fn(&NbarCoordinates) -> bool>(model: &RankOneModel, inside: F) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dirs: Vec<NbarCoordinates> = (0..96)
        .map(|_| {
            let t: f64 = rng.random();
            let mut c = NbarCoordinates::zero(model);
            let nrm: f64;
            {
                let v: Vec<f64> = (0..model.m_alpha).map(|_| rng.random_range(-1.0..1.0)).collect();
                nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                for (a, b) in c.u1.iter_mut().zip(&v) {
                    *a = b / nrm * t.sqrt();
                }
            }
            if model.m_2alpha > 0 {
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                c.u2[0] = s * (1.0 - t);
            } else {
                c.u1.iter_mut().for_each(|a| *a /= t.sqrt().max(1e-12));
            }
            c
        })
        .collect();
    let mut last_inside = 1e-2f64;
    let mut b = 1e-2f64;
    while b < 1e6 {
        if dirs.iter().any(|d| inside(&d.dilate(0.5 * b.ln()))) {
            last_inside = b;
        }
        b *= 1.1;
    }
    1.5 * last_inside
}

fn nbar_box(model: &RankOneModel, bracket: f64, unit: &[f64]) -> (NbarCoordinates, f64) {
    let r1 = bracket.sqrt();
    let c = NbarCoordinates {
        u1: unit[..model.m_alpha].iter().map(|x| x * r1).collect(),
        u2: unit[model.m_alpha..].iter().map(|x| x * bracket).collect(),
    };
    (c, r1.powi(model.m_alpha as i32) * bracket.powi(model.m_2alpha as i32))
}

fn n_element(model: &RankOneModel, c: &NbarCoordinates) -> Mat {
    let w = model.weyl_element();
    w * model.nbar_exp(c) * inv(&w)
}

/// Input of [`verify_pairing_measure`].
#[derive(Clone, Debug)]
pub struct PairingSetup {
    pub t: BoundaryFunction,
    pub w: BoundaryFunction,
    pub lambda_check: C64,
    /// Support radius of ψ₁ around o.
    pub radius: f64,
    /// ψ₂ = η(ε²⟨n̄⟩).
    pub eps: f64,
    /// Radial importance tilt of the Monte Carlo ball sampler.
    pub tilt: f64,
}

/// Both sides of the pairing identity together with the wrong-sign control.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PairingCheck {
    pub lhs: McEstimate,
    pub rhs: McEstimate,
    pub control: McEstimate,
    pub relative_error: f64,
    /// |lhs − rhs| in units of the combined σ.
    pub deviation_sigmas: f64,
    /// |lhs − control| in units of σ.
    pub control_sigmas: f64,
}

/// ψ₁(gM) = bump(d(o, gK)/R)·(1 + 0.3·x₁(gP)).
pub fn psi1(model: &RankOneModel, g: &Mat, radius: f64) -> f64 {
    let b = bump(distance_from_origin(model, g) / radius);
    if b == 0.0 {
        return 0.0;
    }
    b * (1.0 + 0.3 * endpoint(model, g, Sign::Plus).sphere_coords(model)[1])
}

/// Compares ∫ v(x,η₋) v*(x,η₊)(ψ₁ψ₂)∘𝒜 dx dη₋ dη₊ (Monte Carlo) with
/// ∫ v v* ψ₁ dgM · ∫ e^{−(2ρ̌+λ̌)H(n̄)} ψ₂ dn̄ (quadrature), v = Q_{λ,−}T, v* = Q_{λ,+}W.
pub fn verify_pairing_measure(
    model: &RankOneModel,
    setup: &PairingSetup,
    mc: &McSpec,
    rhs_how: Integration,
) -> Result<PairingCheck> {
    let lam = setup.lambda_check;
    let reach = nbar_reach(model, 2.0 / (setup.eps * setup.eps));
    let ball = BallSampler::tilted(model, setup.radius + reach, setup.tilt);
    let lhs =
        integrate(model, &[Factor::Ball(ball), Factor::Sphere, Factor::Sphere], Integration::MonteCarlo(*mc), |n| {
            let h = n[0].base();
            let (km, kp) = (n[1].boundary().k, n[2].boundary().k);
            let p = DoubleSpherePoint { h: *h, k_minus: km, k_plus: kp };
            let Ok(e) = map_a(model, &p) else { return vec![ZERO] };
            let Ok(c) = model.nbar_log(&e.nbar) else { return vec![ZERO] };
            let s2 = cutoff(setup.eps * setup.eps * c.angle_bracket());
            if s2 == 0.0 {
                return vec![ZERO];
            }
            let s1 = psi1(model, &e.g, setup.radius);
            if s1 == 0.0 {
                return vec![ZERO];
            }
            let v = q_transform(model, &setup.t, lam, Sign::Minus, &(h * km));
            let vs = q_transform(model, &setup.w, lam, Sign::Plus, &(h * kp));
            vec![v * vs * (s1 * s2)]
        })[0];
    let first =
        integrate(model, &[Factor::Ball(BallSampler::new(model, setup.radius)), Factor::Sphere], rhs_how, |n| {
            let g = n[0].base() * n[1].boundary().k;
            let v = q_transform(model, &setup.t, lam, Sign::Minus, &g);
            let vs = q_transform(model, &setup.w, lam, Sign::Plus, &g);
            vec![v * vs * psi1(model, &g, setup.radius)]
        })[0];
    let cf = CFunction::new(model)?;
    let second = cf.c_epsilon(lam, setup.eps)?.value;
    // e^{+(2ρ̌+λ̌)H(n̄)} in place of e^{−(2ρ̌+λ̌)H(n̄)}.
    let wrong = cf.c_epsilon(-4.0 * model.rho_check - lam, setup.eps)?.value;
    if lhs.sigma == 0.0 || !lhs.sigma.is_finite() {
        return Err(Error::InvalidArgument("Monte Carlo variance estimate degenerate".into()));
    }
    let rhs = McEstimate { mean: first.mean * second, sigma: first.sigma * second.norm() };
    let control = McEstimate { mean: first.mean * wrong, sigma: first.sigma * wrong.norm() };
    let sigmas = |o: &McEstimate| (lhs.mean - o.mean).norm() / lhs.sigma.hypot(o.sigma);
    Ok(PairingCheck {
        lhs,
        rhs,
        control,
        relative_error: (lhs.mean - rhs.mean).norm() / rhs.mean.norm(),
        deviation_sigmas: sigmas(&rhs),
        control_sigmas: sigmas(&control),
    })
}

/// The measure identities checked by [`verify_haar_factorizations`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HaarIdentity {
    /// d(gMA) against dk dn through g = kn.
    KnDecomposition,
    /// d(gMA) against dn dn̄ through g = n n̄.
    NNbarDecomposition,
    /// (ψ⁻¹)_*(d(gK) ⊗ d(gMA)) against dgM dn̄.
    PsiPushforward,
    /// dgM = e^{2ρ(H(g)+H(gw))} da db db' against geodesic polar coordinates.
    FlowFactorization,
}

/// Constants of one identity estimated per test function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationCheck {
    pub identity: HaarIdentity,
    /// Ratio reference / candidate for each test function.
    pub constants: Vec<f64>,
    /// max_j |c_j/c_0 − 1|.
    pub max_deviation: f64,
    /// Relative Monte Carlo error of the ratios (0 for quadrature).
    pub relative_sigma: f64,
}

/// Smooth test functions on G/MA ≅ pairs of distinct boundary points, vanishing near
/// the diagonal and for b₋ near P.
#[derive(Clone, Debug)]
pub struct PairTestFunctions {
    tilts: Vec<(Vec<f64>, Vec<f64>)>,
    pub gap: f64,
}

impl PairTestFunctions {
    pub fn new(model: &RankOneModel, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tilts = (0..count)
            .map(|_| {
                let a = (0..model.n).map(|_| rng.random_range(-0.3..0.3)).collect();
                let b = (0..model.n).map(|_| rng.random_range(-0.3..0.3)).collect();
                (a, b)
            })
            .collect();
        PairTestFunctions { tilts, gap: 0.3 }
    }

    pub fn len(&self) -> usize {
        self.tilts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tilts.is_empty()
    }

    fn window(&self, x: &[f64], y: &[f64]) -> f64 {
        let d: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        smooth_step((d - self.gap) / self.gap)
    }

    /// All test functions at (b₋, b₊).
    pub fn eval(&self, model: &RankOneModel, bm: &BoundaryPoint, bp: &BoundaryPoint) -> Vec<C64> {
        let xm = bm.sphere_coords(model);
        let xp = bp.sphere_coords(model);
        let mut pole = vec![0.0; model.n];
        pole[0] = 1.0;
        let s = self.window(&xm, &xp) * self.window(&xm, &pole);
        self.tilts
            .iter()
            .map(|(a, b)| {
                if s == 0.0 {
                    return ZERO;
                }
                let e: f64 = a.iter().zip(&xm).map(|(u, v)| u * v).sum::<f64>()
                    + b.iter().zip(&xp).map(|(u, v)| u * v).sum::<f64>();
                C64::new(s * e.exp(), 0.0)
            })
            .collect()
    }

    fn eval_g(&self, model: &RankOneModel, g: &Mat) -> Vec<C64> {
        self.eval(model, &endpoint(model, g, Sign::Minus), &endpoint(model, g, Sign::Plus))
    }
}

/// e^{2ρ̌(H(g)+H(gw))}, right-MA-invariant.
pub fn flow_weight(model: &RankOneModel, g: &Mat) -> f64 {
    let gw = g * model.weyl_element();
    (2.0 * model.rho_check * (model.h_kan(g) + model.h_kan(&gw))).exp()
}

/// The flow time t_c at which g·a_t is closest to o, where both horocycle brackets agree.
pub fn closest_time(model: &RankOneModel, g: &Mat) -> f64 {
    let gw = g * model.weyl_element();
    0.5 * (model.h_kan(&gw) - model.h_kan(g))
}

fn reference_pairs(model: &RankOneModel, fns: &PairTestFunctions, how: Integration) -> Vec<McEstimate> {
    integrate(model, &[Factor::Sphere, Factor::Sphere], how, |n| {
        let (bm, bp) = (n[0].boundary(), n[1].boundary());
        let Ok(g) = map_g_inverse(model, bm, bp) else { return vec![ZERO; fns.len()] };
        let vals = fns.eval(model, bm, bp);
        if vals.iter().all(|v| *v == ZERO) {
            return vals;
        }
        let wt = flow_weight(model, &g);
        vals.into_iter().map(|v| v * wt).collect()
    })
}

fn ratios(identity: HaarIdentity, reference: &[McEstimate], candidate: &[McEstimate]) -> FactorizationCheck {
    let constants: Vec<f64> = reference.iter().zip(candidate).map(|(r, c)| (r.mean / c.mean).re).collect();
    let max_deviation = constants.iter().map(|c| (c / constants[0] - 1.0).abs()).fold(0.0, f64::max);
    let relative_sigma =
        reference.iter().zip(candidate).map(|(r, c)| r.relative_sigma().hypot(c.relative_sigma())).fold(0.0, f64::max);
    FactorizationCheck { identity, constants, max_deviation, relative_sigma }
}

/// Quadrature is used for identities whose domains have dimension at most
/// `max_quadrature_dim`, Monte Carlo otherwise.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HaarPlan {
    pub quadrature: usize,
    /// Resolution of the low-dimensional fiber integrals of the ψ check, always by quadrature.
    pub fiber_quadrature: usize,
    pub max_quadrature_dim: usize,
    pub mc: McSpec,
}

impl HaarPlan {
    fn method(&self, dim: usize) -> Integration {
        if dim <= self.max_quadrature_dim {
            Integration::Quadrature(self.quadrature)
        } else {
            Integration::MonteCarlo(self.mc)
        }
    }
}

/// Estimates the constant of each Haar factorization per test function; the identities hold
/// iff the estimates agree.
pub fn verify_haar_factorizations(
    model: &RankOneModel,
    fns: &PairTestFunctions,
    plan: &HaarPlan,
) -> Result<Vec<FactorizationCheck>> {
    let s = model.n - 1;
    let dim = model.m_alpha + model.m_2alpha;
    let pair_dim = (2 * s).max(s + dim).max(2 * dim);
    let how = plan.method(pair_dim);
    let reference = reference_pairs(model, fns, how);
    let dist = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let base = BoundaryPoint::base(model).sphere_coords(model);
    // n·wP leaves the region b₋ far from P once ⟨n⟩ is large; the bound sets the scale of
    // the N and N̄ coordinates.
    let n_bound = bracket_bound(model, |c| {
        let b = endpoint(model, &n_element(model, c), Sign::Minus).sphere_coords(model);
        dist(&b, &base) > fns.gap
    });
    let kn = integrate(model, &[Factor::Sphere, Factor::Line(dim)], how, |n| {
        let (c, vol) = nbar_box(model, n_bound / 4.0, n[1].coords());
        let g = n[0].boundary().k * n_element(model, &c);
        fns.eval_g(model, &g).into_iter().map(|v| v * vol).collect()
    });

    let nn_how = match how {
        Integration::Quadrature(res) => Integration::Quadrature(4 * res),
        mc => mc,
    };
    let mut probe = NbarCoordinates::zero(model);
    probe.u1[0] = 100.0;
    let probe = model.nbar_exp(&probe);
    let far = endpoint(model, &probe, Sign::Plus).sphere_coords(model);
    let wp = endpoint(model, &model.identity(), Sign::Minus).sphere_coords(model);
    let d0 = dist(&far, &wp);
    let nn = integrate(model, &[Factor::Line(dim), Factor::Line(dim)], nn_how, |n| {
        let (c1, v1) = nbar_box(model, n_bound / 4.0, n[0].coords());
        let nm = n_element(model, &c1);
        // The N̄-support shrinks with the conformal factor of n at wP.
        let d1 = dist(
            &endpoint(model, &(nm * probe), Sign::Plus).sphere_coords(model),
            &endpoint(model, &nm, Sign::Minus).sphere_coords(model),
        );
        let stretch = (d1 / d0).powi(2).clamp(1e-6, 1e6);
        let (c2, v2) = nbar_box(model, stretch * n_bound / 4.0, n[1].coords());
        let g = nm * model.nbar_exp(&c2);
        fns.eval_g(model, &g).into_iter().map(|v| v * v1 * v2).collect()
    });

    let mut out = vec![
        ratios(HaarIdentity::KnDecomposition, &reference, &kn),
        ratios(HaarIdentity::NNbarDecomposition, &reference, &nn),
    ];
    let fiber = Integration::Quadrature(plan.fiber_quadrature);
    out.push(psi_pushforward(model, fns.len(), fiber, fiber)?);
    out.push(flow_factorization(model, fns, plan.method(2 * s + 1))?);
    Ok(out)
}

/// h(gK) = bump(d(o,gK)/R)·exp(0.2·Re (gg*)₀₁ + 0.1·j·Re (gg*)₁₁).
fn base_test(model: &RankOneModel, g: &Mat, radius: f64, j: usize) -> f64 {
    let b = bump(distance_from_origin(model, g) / radius);
    if b == 0.0 {
        return 0.0;
    }
    let p = g * g.adjoint();
    b * (0.2 * p[(0, 1)].re + 0.1 * j as f64 * p[(1, 1)].re).exp()
}

const BASE_RADIUS: f64 = 1.0;

/// For product test functions h(gK)k(gMA), the ψ-pushforward identity is equivalent to the
/// constancy of I_h(g) = ∫_A∫_N̄ h(g a n̄ K) da dn̄ over geodesics gMA, measured against ∫h dx.
fn psi_pushforward(
    model: &RankOneModel,
    m: usize,
    how: Integration,
    base_how: Integration,
) -> Result<FactorizationCheck> {
    let h_mass = integrate(model, &[Factor::Ball(BallSampler::new(model, BASE_RADIUS))], base_how, |n| {
        (0..m).map(|j| C64::new(base_test(model, n[0].base(), BASE_RADIUS, j), 0.0)).collect()
    });
    let dim = model.m_alpha + model.m_2alpha;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut reference = Vec::new();
    let mut candidate = Vec::new();
    for (i, d) in [0.0, 0.1, 0.2, 0.3].iter().enumerate() {
        let g = if i == 0 {
            model.identity()
        } else {
            model.random_k(&mut rng) * model.exp_a(*d) * model.random_k(&mut rng)
        };
        // |t| ≤ d(gK, x) ≤ r; n̄' is integrated over all of N̄ with scales set by the
        // axis reach at distance r.
        let r = BASE_RADIUS + d;
        let (s1, s2) = axis_scales(model, r);
        let vals = integrate(model, &[Factor::Cube(1), Factor::Line(dim)], how, |n| {
            let t = r * n[0].coords()[0];
            let v = n[1].coords();
            let c = NbarCoordinates {
                u1: v[..model.m_alpha].iter().map(|x| x * s1).collect(),
                u2: v[model.m_alpha..].iter().map(|x| x * s2).collect(),
            };
            let vol = s1.powi(model.m_alpha as i32) * s2.powi(model.m_2alpha as i32);
            let x = g * model.nbar_exp(&c) * model.exp_a(t);
            let wt = r * vol * (2.0 * model.rho_check * t).exp();
            (0..m).map(|j| C64::new(base_test(model, &x, BASE_RADIUS, j) * wt, 0.0)).collect()
        });
        reference.extend(h_mass.iter().copied());
        candidate.extend(vals);
    }
    Ok(ratios(HaarIdentity::PsiPushforward, &reference, &candidate))
}

/// Coordinate sizes |U₁|, |U₂| at which n̄ on the respective axis reaches distance r from o.
fn axis_scales(model: &RankOneModel, r: f64) -> (f64, f64) {
    let along = |second: bool| {
        let mut s = 1e-3;
        loop {
            let mut c = NbarCoordinates::zero(model);
            if second {
                c.u2[0] = s;
            } else {
                c.u1[0] = s;
            }
            if distance_from_origin(model, &model.nbar_exp(&c)) > r || s > 1e8 {
                return s;
            }
            s *= 1.05;
        }
    };
    let s1 = along(false);
    let s2 = if model.m_2alpha > 0 { along(true) } else { 1.0 };
    (s1, s2)
}

/// F_j(gM) = bump(d(o,gK)/R)·f_j(gwP, gP), compared between dx dk and the flow form.
fn flow_factorization(model: &RankOneModel, fns: &PairTestFunctions, how: Integration) -> Result<FactorizationCheck> {
    let m = fns.len();
    let polar = integrate(model, &[Factor::Ball(BallSampler::new(model, BASE_RADIUS)), Factor::Sphere], how, |n| {
        let g = n[0].base() * n[1].boundary().k;
        let b = bump(distance_from_origin(model, &g) / BASE_RADIUS);
        fns.eval_g(model, &g).into_iter().map(|v| v * b).collect()
    });
    let flow = integrate(model, &[Factor::Sphere, Factor::Sphere, Factor::Cube(1)], how, |n| {
        let (bm, bp) = (n[0].boundary(), n[1].boundary());
        let zero = vec![ZERO; m];
        let vals = fns.eval(model, bm, bp);
        if vals.iter().all(|v| *v == ZERO) {
            return zero;
        }
        let Ok(g) = map_g_inverse(model, bm, bp) else { return zero };
        let g = g * model.exp_a(closest_time(model, &g));
        let d = distance_from_origin(model, &g);
        if d >= BASE_RADIUS {
            return zero;
        }
        let span = BASE_RADIUS + d;
        let t = span * n[2].coords()[0];
        let b = bump(distance_from_origin(model, &(g * model.exp_a(t))) / BASE_RADIUS);
        let wt = flow_weight(model, &g) * span * b;
        vals.into_iter().map(|v| v * wt).collect()
    });
    Ok(ratios(HaarIdentity::FlowFactorization, &polar, &flow))
}
