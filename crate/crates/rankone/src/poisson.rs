//! Poisson transforms P_μ, their Laplace eigen-equation, the projection identity
//! P_μ = π₀*∘Q_{μ−ρ,±}, scattering scalars on K-types and the Jordan identities at μ = 0.
//!
//! Δ denotes the positive Laplacian −div grad, so that (Δ − ρ̌² + μ̌²)P_μT = 0.

use crate::boundary::{
    attracting_point, fiber_integrate, horocycle_bracket, principal_series, q_transform, BoundaryFunction,
    BoundaryPoint, Sign, SphereRule,
};
use crate::error::{Error, Result};
use crate::lie_core::{inv, Mat, ModelName, RankOneModel};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// A spectral parameter μ ∈ 𝔞*_ℂ stored as μ(H₀).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    pub mu: C64,
}

impl SpectralParameter {
    pub fn from_check(model: &RankOneModel, mu_check: C64) -> Self {
        SpectralParameter { mu: mu_check * model.alpha_norm }
    }
    pub fn mu_check(&self, model: &RankOneModel) -> C64 {
        self.mu / model.alpha_norm
    }
}

const POLAR_NODES: usize = 10;

/// Quadrature orders used by the Poisson routines.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PoissonOrders {
    /// Angular resolution of the polar rule where quadrature accuracy matters.
    pub boundary: usize,
    /// Resolution of the boundary rule in eigen-equation checks, where every quadrature
    /// node contributes an exact eigenfunction.
    pub eigen: usize,
    /// Resolution of the rule averaging over geodesic spheres.
    pub sphere: usize,
}

impl PoissonOrders {
    pub fn for_model(model: &RankOneModel) -> Self {
        match model.n {
            2 => PoissonOrders { boundary: 2, eigen: 24, sphere: 10 },
            3 => PoissonOrders { boundary: 16, eigen: 12, sphere: 8 },
            _ => PoissonOrders { boundary: 28, eigen: 8, sphere: 6 },
        }
    }
}

/// P_μT(gK) = ∫_{K/M} e^{(μ̌+ρ̌)⟨gK,kM⟩} T(kM) dkM over a fixed rule.
pub fn poisson(model: &RankOneModel, t: &BoundaryFunction, mu_check: C64, g: &Mat, rule: &SphereRule) -> C64 {
    let s = mu_check + model.rho_check;
    rule.integrate(|b| (s * horocycle_bracket(model, g, b)).exp() * t.eval(b))
}

/// Polar rule of angular resolution `order` centred at the attracting point of g.
pub fn peak_rule(model: &RankOneModel, g: &Mat, order: usize) -> SphereRule {
    SphereRule::polar(model, POLAR_NODES, order).rotated(model, &attracting_point(model, g).k)
}

/// P_μT at two rule orders; errors when they differ by more than `tol` relative.
pub fn poisson_checked(
    model: &RankOneModel,
    t: &BoundaryFunction,
    mu_check: C64,
    g: &Mat,
    order: usize,
    tol: f64,
) -> Result<C64> {
    let a = poisson(model, t, mu_check, g, &SphereRule::new(model, order));
    let b = poisson(model, t, mu_check, g, &SphereRule::new(model, order + order / 2 + 1));
    let err = (a - b).norm();
    if err > tol * b.norm().max(1e-300) {
        return Err(Error::Nonconvergent { error: err });
    }
    Ok(b)
}

/// Mean of F over the geodesic sphere of radius r about gK.
pub fn sphere_mean<F: Fn(&Mat) -> C64>(model: &RankOneModel, f: &F, g: &Mat, r: f64, rule: &SphereRule) -> C64 {
    let a = model.exp_a(r);
    let vol: f64 = rule.weights.iter().sum();
    rule.integrate(|b| f(&(g * b.k * a))) / vol
}

/// Positive Laplacian by geodesic-sphere averaging: −(2n/r²)(mean_r F − F).
pub fn laplacian<F: Fn(&Mat) -> C64>(model: &RankOneModel, f: &F, g: &Mat, r: f64, rule: &SphereRule) -> C64 {
    -(2.0 * model.n as f64 / (r * r)) * (sphere_mean(model, f, g, r, rule) - f(g))
}

/// |(Δ − ρ̌² + μ̌²)P_μT(x)| / |P_μT(x)| with step h.
pub fn laplace_residual(
    model: &RankOneModel,
    t: &BoundaryFunction,
    mu_check: C64,
    g: &Mat,
    h: f64,
    orders: PoissonOrders,
) -> f64 {
    let brule = SphereRule::new(model, orders.eigen);
    let srule = SphereRule::new(model, orders.sphere);
    let p = |x: &Mat| poisson(model, t, mu_check, x, &brule);
    let shift = mu_check * mu_check - model.rho_check * model.rho_check;
    let centre = p(g);
    (laplacian(model, &p, g, h, &srule) + shift * centre).norm() / centre.norm()
}

/// Residuals at successive steps and the observed convergence order between the last two.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    pub observed_order: f64,
}

impl ConvergenceStudy {
    pub fn from_residuals(steps: Vec<f64>, residuals: Vec<f64>) -> Self {
        let n = residuals.len();
        let observed_order = if n >= 2 {
            (residuals[n - 2] / residuals[n - 1]).ln() / (steps[n - 2] / steps[n - 1]).ln()
        } else {
            f64::NAN
        };
        ConvergenceStudy { steps, residuals, observed_order }
    }

    /// True when the order is within `slack` of `expected`, or the residual is already at `floor`.
    pub fn confirms(&self, expected: f64, slack: f64, floor: f64) -> bool {
        (self.observed_order - expected).abs() <= slack || self.residuals.last().is_some_and(|r| *r < floor)
    }
}

/// Laplace residuals at h ∈ {2h₀, h₀, h₀/2}.
pub fn laplace_convergence(
    model: &RankOneModel,
    t: &BoundaryFunction,
    mu_check: C64,
    g: &Mat,
    h0: f64,
    orders: PoissonOrders,
) -> ConvergenceStudy {
    let steps = vec![2.0 * h0, h0, 0.5 * h0];
    let res = steps.iter().map(|h| laplace_residual(model, t, mu_check, g, *h, orders)).collect();
    ConvergenceStudy::from_residuals(steps, res)
}

/// |π₀*Q_{μ−ρ,s}T(x) − P_μT(x)| for s = −, + (in that order).
///
/// Both sides use the polar rule with angular resolution `order`, centred where the integrand
/// concentrates: at the attracting point of g for P_μ and at its preimage for the fiber integral.
pub fn poisson_projection_residual(
    model: &RankOneModel,
    t: &BoundaryFunction,
    mu_check: C64,
    g: &Mat,
    order: usize,
) -> [f64; 2] {
    let base = SphereRule::polar(model, POLAR_NODES, order);
    let peak = attracting_point(model, g);
    let direct = poisson(model, t, mu_check, g, &base.rotated(model, &peak.k));
    let lam = mu_check - model.rho_check;
    let repelling = attracting_point(model, &inv(g));
    let w_inv = inv(&model.weyl_element());
    let f = |sign: Sign| {
        let k0 = match sign {
            Sign::Plus => repelling.k,
            Sign::Minus => repelling.k * w_inv,
        };
        fiber_integrate(g, &base.rotated(model, &k0), |h| q_transform(model, t, lam, sign, h))
    };
    [(f(Sign::Minus) - direct).norm(), (f(Sign::Plus) - direct).norm()]
}

/// Scalar by which S_μ acts on a K-type, with the relative least-squares residual.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScatteringFit {
    pub value: C64,
    pub fit_residual: f64,
}

fn scattering_samples(model: &RankOneModel) -> Vec<Mat> {
    let dirs: Vec<Vec<f64>> = match model.n {
        2 => vec![vec![1.0, 0.0], vec![0.6, 0.8], vec![-0.28, 0.96]],
        3 => vec![vec![1.0, 0.0, 0.0], vec![0.6, 0.0, 0.8], vec![0.0, -0.6, 0.8]],
        _ => vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.6, 0.0, 0.8, 0.0], vec![0.5, 0.5, 0.5, 0.5]],
    };
    let mut out = Vec::new();
    for d in dirs {
        let k = BoundaryPoint::from_sphere(model, &d).k;
        for j in 1..=10 {
            out.push(k * model.exp_a(0.2 * j as f64));
        }
    }
    out
}

/// s_ℓ(μ) with P_{−μ}Y_ℓ = s_ℓ(μ)P_μY_ℓ, fitted on a radial grid along three directions.
pub fn scattering_eigenvalue(model: &RankOneModel, mu_check: C64, ell: usize, order: usize) -> Result<ScatteringFit> {
    let y = BoundaryFunction::zonal(model, ell);
    let base = SphereRule::polar(model, POLAR_NODES, order);
    let mut num = C64::new(0.0, 0.0);
    let (mut aa, mut bb) = (0.0, 0.0);
    let mut pairs = Vec::new();
    for g in scattering_samples(model) {
        let rule = base.rotated(model, &attracting_point(model, &g).k);
        let a = poisson(model, &y, mu_check, &g, &rule);
        let b = poisson(model, &y, -mu_check, &g, &rule);
        num += a.conj() * b;
        aa += a.norm_sqr();
        bb += b.norm_sqr();
        pairs.push((a, b));
    }
    if aa < 1e-20 * bb {
        return Err(Error::IllConditioned { residual: (aa / bb).sqrt() });
    }
    let s = num / (aa + 1e-12 * bb);
    let res: f64 = pairs.iter().map(|(a, b)| (b - s * a).norm_sqr()).sum::<f64>();
    Ok(ScatteringFit { value: s, fit_residual: (res / aa.max(bb)).sqrt() })
}

/// The H2R scattering scalar on e^{imθ}: ∏_{j<|m|} (ρ̌ − μ̌ + j)/(ρ̌ + μ̌ + j).
pub fn scattering_h2r(mu_check: C64, m: i64) -> C64 {
    let mut s = C64::new(1.0, 0.0);
    for j in 0..m.unsigned_abs() {
        s *= (0.5 - mu_check + j as f64) / (0.5 + mu_check + j as f64);
    }
    s
}

/// Settings for the μ-derivative identities.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JordanSteps {
    pub h: f64,
    pub dmu_first: f64,
    pub dmu_second: f64,
}

impl Default for JordanSteps {
    fn default() -> Self {
        JordanSteps { h: 1e-2, dmu_first: 1e-4, dmu_second: 1e-2 }
    }
}

impl JordanSteps {
    pub fn scaled(&self, f: f64) -> Self {
        JordanSteps { h: self.h * f, dmu_first: self.dmu_first * f, dmu_second: self.dmu_second * f }
    }
}

/// |2μ̌P_μT₀ + (Δ − ρ̌² + μ̌²)∂_μP_μT₀| / |P_μT₀| at x.
pub fn jordan_residual_first(
    model: &RankOneModel,
    t0: &BoundaryFunction,
    mu_check: C64,
    g: &Mat,
    steps: JordanSteps,
    orders: PoissonOrders,
) -> f64 {
    let brule = SphereRule::new(model, orders.eigen);
    let srule = SphereRule::new(model, orders.sphere);
    let d = steps.dmu_first;
    let dp = |x: &Mat| {
        (poisson(model, t0, mu_check + d, x, &brule) - poisson(model, t0, mu_check - d, x, &brule)) / (2.0 * d)
    };
    let p = poisson(model, t0, mu_check, g, &brule);
    let shift = mu_check * mu_check - model.rho_check * model.rho_check;
    let lhs = 2.0 * mu_check * p + laplacian(model, &dp, g, steps.h, &srule) + shift * dp(g);
    lhs.norm() / p.norm()
}

/// |2P₀T₀ + (Δ − ρ̌²)∂²_μP_μT₀|₀| / |P₀T₀| at x.
pub fn jordan_residual_second(
    model: &RankOneModel,
    t0: &BoundaryFunction,
    g: &Mat,
    steps: JordanSteps,
    orders: PoissonOrders,
) -> f64 {
    let brule = SphereRule::new(model, orders.eigen);
    let srule = SphereRule::new(model, orders.sphere);
    let d = steps.dmu_second;
    let zero = C64::new(0.0, 0.0);
    let d2p = |x: &Mat| {
        (poisson(model, t0, C64::new(d, 0.0), x, &brule) - 2.0 * poisson(model, t0, zero, x, &brule)
            + poisson(model, t0, C64::new(-d, 0.0), x, &brule))
            / (d * d)
    };
    let p = poisson(model, t0, zero, g, &brule);
    let rho2 = model.rho_check * model.rho_check;
    let lhs = 2.0 * p + laplacian(model, &d2p, g, steps.h, &srule) - rho2 * d2p(g);
    lhs.norm() / p.norm()
}

/// First Jordan identity at doubled and default steps.
pub fn jordan_first_study(
    model: &RankOneModel,
    t0: &BoundaryFunction,
    mu_check: C64,
    g: &Mat,
    steps: JordanSteps,
    orders: PoissonOrders,
) -> ConvergenceStudy {
    let pair = [steps.scaled(2.0), steps];
    let res = pair.iter().map(|s| jordan_residual_first(model, t0, mu_check, g, *s, orders)).collect();
    ConvergenceStudy::from_residuals(pair.iter().map(|s| s.h).collect(), res)
}

/// Second Jordan identity at doubled and default steps.
pub fn jordan_second_study(
    model: &RankOneModel,
    t0: &BoundaryFunction,
    g: &Mat,
    steps: JordanSteps,
    orders: PoissonOrders,
) -> ConvergenceStudy {
    let pair = [steps.scaled(2.0), steps];
    let res = pair.iter().map(|s| jordan_residual_second(model, t0, g, *s, orders)).collect();
    ConvergenceStudy::from_residuals(pair.iter().map(|s| s.h).collect(), res)
}

/// Ex in units of α₀: {−m_α/2 − 1 − 2k} ∪ {−m_α/2 − m_2α − 2k} for k ≤ k_max, ascending.
pub fn exceptional_set(model: &RankOneModel, k_max: usize) -> Vec<f64> {
    let ma = model.m_alpha as f64 / 2.0;
    let m2 = model.m_2alpha as f64;
    let mut out = Vec::new();
    for k in 0..=k_max {
        out.push(-ma - 1.0 - 2.0 * k as f64);
        out.push(-ma - m2 - 2.0 * k as f64);
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Whether μ̌ lies within `tol` of Ex.
pub fn is_exceptional(model: &RankOneModel, mu_check: C64, tol: f64) -> bool {
    if mu_check.im.abs() > tol {
        return false;
    }
    let k = ((-mu_check.re).max(0.0) / 2.0).ceil() as usize + 1;
    exceptional_set(model, k).iter().any(|e| (mu_check.re - e).abs() <= tol)
}

/// A boundary function on S¹ given by Fourier coefficients c_m, m ∈ [−N, N].
#[derive(Clone, Debug)]
pub struct CircleSeries {
    pub coeffs: Vec<C64>,
}

impl CircleSeries {
    pub fn degree(&self) -> i64 {
        (self.coeffs.len() as i64 - 1) / 2
    }

    /// Coefficients of T from samples at 2N+1... via the discrete transform on `samples` points.
    pub fn from_function(model: &RankOneModel, t: &BoundaryFunction, degree: usize, samples: usize) -> Self {
        let vals: Vec<C64> = (0..samples)
            .map(|j| {
                let th = TAU * j as f64 / samples as f64;
                t.eval(&BoundaryPoint::from_sphere(model, &[th.cos(), th.sin()]))
            })
            .collect();
        let n = degree as i64;
        let coeffs = (-n..=n)
            .map(|m| {
                vals.iter()
                    .enumerate()
                    .map(|(j, v)| v * C64::from_polar(1.0, -(m as f64) * TAU * j as f64 / samples as f64))
                    .sum::<C64>()
                    / samples as f64
            })
            .collect();
        CircleSeries { coeffs }
    }

    pub fn eval_angle(&self, th: f64) -> C64 {
        let n = self.degree();
        self.coeffs.iter().enumerate().map(|(i, c)| c * C64::from_polar(1.0, (i as i64 - n) as f64 * th)).sum()
    }

    pub fn eval(&self, model: &RankOneModel, b: &BoundaryPoint) -> C64 {
        let x = b.sphere_coords(model);
        self.eval_angle(x[1].atan2(x[0]))
    }

    /// T₁ = −½(∂_μS_μ)|₀T₀, acting on e^{imθ} by Σ_{j<|m|} 1/(ρ̌ + j).
    pub fn jordan_partner(&self) -> CircleSeries {
        let n = self.degree();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let m = (i as i64 - n).unsigned_abs();
                c * (0..m).map(|j| 1.0 / (0.5 + j as f64)).sum::<f64>()
            })
            .collect();
        CircleSeries { coeffs }
    }
}

/// Pointwise residual of π₀(γ)T₁[T₀] − T₁[π₀(γ)T₀] − (∂_μπ_{−μ}(γ))|₀T₀ on H2R, with
/// T₁[T] = −½(∂_μS_μ)|₀T; for γ-invariant T₀ this is γ*T₁ = N_γ^ρ(T₁ + log N_γ·T₀).
pub fn jordan_boundary_residual(
    model: &RankOneModel,
    t0: &BoundaryFunction,
    gamma: &Mat,
    degree: usize,
    points: &[BoundaryPoint],
) -> Result<f64> {
    if model.name != ModelName::H2R {
        return Err(Error::InvalidArgument("the Fourier construction of T₁ needs H2R".into()));
    }
    let samples = 4 * degree + 1;
    let s0 = CircleSeries::from_function(model, t0, degree, samples);
    let t1 = s0.jordan_partner();
    let moved = principal_series(model, C64::new(0.0, 0.0), gamma, t0);
    let t1_moved = CircleSeries::from_function(model, &moved, degree, samples).jordan_partner();
    let gi = crate::lie_core::inv(gamma);
    let mut worst: f64 = 0.0;
    for b in points {
        let w = gi * b.v;
        let h = w.norm().ln() / model.eta();
        let b2 = BoundaryPoint::from_vector(model, &w);
        let factor = (-model.rho_check * h).exp();
        let lhs = factor * t1.eval(model, &b2) - t1_moved.eval(model, b);
        let rhs = h * factor * t0.eval(&b2);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exceptional_examples() {
        let h2r = RankOneModel::build(ModelName::H2R);
        assert_eq!(exceptional_set(&h2r, 1), vec![-3.5, -2.5, -1.5, -0.5]);
        let h2c = RankOneModel::build(ModelName::H2C);
        assert_eq!(exceptional_set(&h2c, 0), vec![-2.0, -2.0]);
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            assert!(!is_exceptional(&m, C64::new(m.rho_check, 0.0), 1e-9));
        }
        assert!(is_exceptional(&h2r, C64::new(-4.5, 0.0), 1e-9));
    }

    #[test]
    fn poisson_at_origin_is_mass() {
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let rule = SphereRule::new(&m, 8);
            let v = poisson(
                &m,
                &BoundaryFunction::constant(C64::new(1.0, 0.0)),
                C64::new(0.3, 0.2),
                &Mat::identity(),
                &rule,
            );
            assert!((v.re - m.vol_sphere).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn scattering_h2r_inverse_pair() {
        let mu = C64::new(0.3, 0.4);
        for m in 0..5 {
            assert!((scattering_h2r(mu, m) * scattering_h2r(-mu, m) - 1.0).norm() < 1e-14);
        }
    }
}
