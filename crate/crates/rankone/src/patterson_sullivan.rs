//! Weighted Radon transform and Patterson-Sullivan pairings at cover level.
//!
//! Test functions on G/M are supported in a ball around o. Pairings are computed
//! twice: through the geodesic flow on G/MA ≅ (∂𝐇ⁿ)²_Δ and directly on G/M.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{endpoint, q_transform, BoundaryFunction, Sign};
use crate::geomtransform::measure::{bump, closest_time, integrate, Factor, Integration, McEstimate};
use crate::geomtransform::{distance_from_origin, map_g_inverse, BallSampler};
use crate::lie_core::Mat;
use crate::quad::gauss_legendre_on;
use crate::{Error, RankOneModel, Result};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A function on G/M supported in {gM : d(o, gK) < support_radius}.
pub trait CompactFunction: Sync {
    fn eval(&self, model: &RankOneModel, g: &Mat) -> C64;
    fn support_radius(&self) -> f64;
}

/// f(gM) = s·bump(d(o,gK)/R)·exp(a·x(gP) + b·x(gwP)).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BumpFunction {
    pub radius: f64,
    pub scale: C64,
    pub tilt_plus: Vec<f64>,
    pub tilt_minus: Vec<f64>,
}

impl BumpFunction {
    pub fn zero(model: &RankOneModel) -> Self {
        BumpFunction { radius: 1.0, scale: ZERO, tilt_plus: vec![0.0; model.n], tilt_minus: vec![0.0; model.n] }
    }

    pub fn random<R: Rng + ?Sized>(model: &RankOneModel, radius: f64, rng: &mut R) -> Self {
        let mut tilt = || (0..model.n).map(|_| rng.random_range(-0.4..0.4)).collect::<Vec<f64>>();
        let (tilt_plus, tilt_minus) = (tilt(), tilt());
        BumpFunction { radius, scale: C64::new(1.0, 0.0), tilt_plus, tilt_minus }
    }
}

impl CompactFunction for BumpFunction {
    fn eval(&self, model: &RankOneModel, g: &Mat) -> C64 {
        let b = bump(distance_from_origin(model, g) / self.radius);
        if b == 0.0 || self.scale == ZERO {
            return ZERO;
        }
        let dot = |a: &[f64], x: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
        let xp = endpoint(model, g, Sign::Plus).sphere_coords(model);
        let xm = endpoint(model, g, Sign::Minus).sphere_coords(model);
        self.scale * b * (dot(&self.tilt_plus, &xp) + dot(&self.tilt_minus, &xm)).exp()
    }

    fn support_radius(&self) -> f64 {
        self.radius
    }
}

/// f∘R_w, the test function composed with the flip gM ↦ gwM.
pub struct Flipped<'a, F: CompactFunction>(pub &'a F);

impl<F: CompactFunction> CompactFunction for Flipped<'_, F> {
    fn eval(&self, model: &RankOneModel, g: &Mat) -> C64 {
        self.0.eval(model, &(g * model.weyl_element()))
    }
    fn support_radius(&self) -> f64 {
        self.0.support_radius()
    }
}

/// Parameters of ℛ_{μ,μ'}, in check units.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RadonSpec {
    pub mu: C64,
    pub mu_prime: C64,
    /// Bound on |t − t_c| around the point of the geodesic closest to o.
    pub a_truncation: f64,
    pub order: usize,
}

/// Normalization c of dgM = c·e^{2ρ̌(H(g)+H(gw))} dt db db'.
pub fn flow_constant(model: &RankOneModel) -> f64 {
    2f64.powf(-2.0 * model.rho_check)
}

/// Largest s ∈ [0, cap] with d(o, g·a_{t_c + dir·s}) < R, by bisection.
fn support_end(model: &RankOneModel, g: &Mat, dir: f64, radius: f64, cap: f64) -> f64 {
    let d = |s: f64| distance_from_origin(model, &(g * model.exp_a(dir * s)));
    if d(cap) < radius {
        return cap;
    }
    let (mut lo, mut hi) = (0.0, cap);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if d(mid) < radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// (ℛ_{μ,μ'}f)(g) = ∫ e^{(μ̌+ρ̌)H(ga_t) + (μ̌'+ρ̌)H(ga_t w)} f(ga_t) dt.
pub fn radon<F: CompactFunction>(model: &RankOneModel, f: &F, spec: &RadonSpec, g: &Mat) -> Result<C64> {
    let g = g * model.exp_a(closest_time(model, g));
    let radius = f.support_radius();
    if distance_from_origin(model, &g) >= radius {
        return Ok(ZERO);
    }
    let cap = spec.a_truncation;
    let lo = support_end(model, &g, -1.0, radius, cap);
    let hi = support_end(model, &g, 1.0, radius, cap);
    if (lo == cap && f.eval(model, &(g * model.exp_a(-cap))) != ZERO)
        || (hi == cap && f.eval(model, &(g * model.exp_a(cap))) != ZERO)
    {
        return Err(Error::SupportExceedsTruncation);
    }
    let (a, b) = (spec.mu + model.rho_check, spec.mu_prime + model.rho_check);
    let (h0, h1) = (model.h_kan(&g), model.h_kan(&(g * model.weyl_element())));
    let (ts, ws) = gauss_legendre_on(spec.order, -lo, hi);
    let mut sum = ZERO;
    for (t, w) in ts.iter().zip(&ws) {
        let v = f.eval(model, &(g * model.exp_a(*t)));
        if v != ZERO {
            sum += v * (a * (h0 + t) + b * (h1 - t)).exp() * *w;
        }
    }
    Ok(sum)
}

/// PS(f) = c∫ (ℛ_{μ,μ'}f)(g) T(gP) W̄(gwP) db db' over pairs of distinct boundary points.
pub fn ps_pairing_definition<F: CompactFunction>(
    model: &RankOneModel,
    t: &BoundaryFunction,
    w: &BoundaryFunction,
    spec: &RadonSpec,
    f: &F,
    how: Integration,
) -> Result<McEstimate> {
    let failure = std::sync::Mutex::new(None);
    let est = integrate(model, &[Factor::Sphere, Factor::Sphere], how, |n| {
        let (bm, bp) = (n[0].boundary(), n[1].boundary());
        let Ok(g) = map_g_inverse(model, bm, bp) else { return vec![ZERO] };
        match radon(model, f, spec, &g) {
            Ok(r) if r == ZERO => vec![ZERO],
            Ok(r) => vec![r * t.eval(bp) * w.eval(bm).conj()],
            Err(e) => {
                *failure.lock().unwrap() = Some(e);
                vec![ZERO]
            }
        }
    })[0];
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let c = flow_constant(model);
    Ok(McEstimate { mean: est.mean * c, sigma: est.sigma * c })
}

/// ∫ (Q_{μ−ρ,+}T)(Q_{μ'−ρ,−}W̄) f dgM over the support of f.
pub fn ps_pairing_product<F: CompactFunction>(
    model: &RankOneModel,
    t: &BoundaryFunction,
    w: &BoundaryFunction,
    mu: C64,
    mu_prime: C64,
    f: &F,
    how: Integration,
) -> McEstimate {
    let wbar = conjugate(w);
    let ball = BallSampler::new(model, f.support_radius());
    integrate(model, &[Factor::Ball(ball), Factor::Sphere], how, |n| {
        let g = n[0].base() * n[1].boundary().k;
        let v = f.eval(model, &g);
        if v == ZERO {
            return vec![ZERO];
        }
        let qp = q_transform(model, t, mu - model.rho_check, Sign::Plus, &g);
        let qm = q_transform(model, &wbar, mu_prime - model.rho_check, Sign::Minus, &g);
        vec![qp * qm * v]
    })[0]
}

fn conjugate(w: &BoundaryFunction) -> BoundaryFunction {
    let inner = w.clone();
    BoundaryFunction::new(&format!("conj({})", w.label), move |b| inner.eval(b).conj())
}

/// Both sides of the product formula for one data set.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProductFormulaCheck {
    pub definition: McEstimate,
    pub product: McEstimate,
    pub relative_error: f64,
    /// |definition − product| in units of the combined σ; infinite for exact disagreement under quadrature.
    pub deviation_sigmas: f64,
}

pub fn compare_product_formula<F: CompactFunction>(
    model: &RankOneModel,
    t: &BoundaryFunction,
    w: &BoundaryFunction,
    spec: &RadonSpec,
    f: &F,
    definition_how: Integration,
    product_how: Integration,
) -> Result<ProductFormulaCheck> {
    let definition = ps_pairing_definition(model, t, w, spec, f, definition_how)?;
    let product = ps_pairing_product(model, t, w, spec.mu, spec.mu_prime, f, product_how);
    let diff = (definition.mean - product.mean).norm();
    let sigma = definition.sigma.hypot(product.sigma);
    Ok(ProductFormulaCheck {
        definition,
        product,
        relative_error: diff / product.mean.norm().max(f64::MIN_POSITIVE),
        deviation_sigmas: if sigma > 0.0 {
            diff / sigma
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        },
    })
}
