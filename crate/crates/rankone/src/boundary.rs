//! The boundary K/M ≅ S^{n-1}: endpoint maps, horocycle bracket, the cocycles
//! Φ± and N_γ, the compact picture of the spherical principal series, and the
//! transforms Q_{λ,±}.
//!
//! A boundary point kM is stored through the complex line spanned by `k e₀`;
//! M is exactly the stabilizer of that line in K.

use crate::error::{Error, Result};
use crate::lie_core::{inv, Mat, ModelName, RankOneModel, Vec3, ONE, ZERO};
use crate::quad::gauss_legendre_on;
use num_complex::Complex64 as C64;
use std::f64::consts::{SQRT_2, TAU};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A point kM of K/M.
#[derive(Clone, Debug)]
pub struct BoundaryPoint {
    /// Unit vector spanning the line k·e₀, phase-normalized.
    pub v: Vec3,
    /// Coset representative in K.
    pub k: Mat,
}

fn canonical_phase(v: &Vec3) -> Vec3 {
    let nrm = v.norm();
    let mut best = 0;
    for i in 1..3 {
        if v[i].norm() > v[best].norm() + 1e-12 {
            best = i;
        }
    }
    let ph = v[best] / v[best].norm();
    v / (ph * nrm)
}

/// N̄ element whose first column is proportional to v (requires v₀ ≠ 0).
fn nbar_through(model: &RankOneModel, v: &Vec3) -> Mat {
    let a = v[1] / v[0];
    let mut n = Mat::identity();
    n[(1, 0)] = a;
    if model.matrix_dim == 3 {
        n[(2, 0)] = v[2] / v[0];
        n[(2, 1)] = -a.conj();
    }
    n
}

impl BoundaryPoint {
    /// Boundary point spanned by a nonzero vector; for H2C the vector must be isotropic.
    pub fn from_vector(model: &RankOneModel, v: &Vec3) -> BoundaryPoint {
        let v = canonical_phase(v);
        let last = model.matrix_dim - 1;
        let k = if v[0].norm() >= v[last].norm() {
            model.iwasawa_kan(&nbar_through(model, &v)).expect("unipotent").0
        } else {
            let w = model.weyl_element();
            let vp = w.adjoint() * v;
            let kp = model.iwasawa_kan(&nbar_through(model, &vp)).expect("unipotent").0;
            w * kp
        };
        BoundaryPoint { v, k }
    }

    pub fn from_k(_model: &RankOneModel, k: &Mat) -> BoundaryPoint {
        let v = canonical_phase(&k.column(0).into());
        BoundaryPoint { v, k: *k }
    }

    /// The base point eM.
    pub fn base(model: &RankOneModel) -> BoundaryPoint {
        BoundaryPoint::from_k(model, &Mat::identity())
    }

    /// Distance between the lines, invariant under the M-phase.
    pub fn distance(&self, other: &BoundaryPoint) -> f64 {
        let ip = other.v.dotc(&self.v);
        if ip.norm() == 0.0 {
            return SQRT_2;
        }
        let ph = ip / ip.norm();
        (self.v - other.v * ph).norm()
    }

    pub fn approx_eq(&self, other: &BoundaryPoint, tol: f64) -> bool {
        self.distance(other) < tol
    }

    /// γ·kM = k(γk)M.
    pub fn act(&self, model: &RankOneModel, gamma: &Mat) -> BoundaryPoint {
        BoundaryPoint::from_vector(model, &(gamma * self.v))
    }

    /// Coordinates on the round unit sphere S^{n-1} ⊂ ℝⁿ.
    pub fn sphere_coords(&self, model: &RankOneModel) -> Vec<f64> {
        sphere_coords(model, &self.v)
    }

    pub fn from_sphere(model: &RankOneModel, x: &[f64]) -> BoundaryPoint {
        BoundaryPoint::from_vector(model, &sphere_to_vector(model, x))
    }
}

/// K-equivariant identification of lines with the round sphere.
pub fn sphere_coords(model: &RankOneModel, v: &Vec3) -> Vec<f64> {
    let v = v / C64::new(v.norm(), 0.0);
    match model.name {
        ModelName::H2R => {
            let (a, b) = (v[0], v[1]);
            let z = a.conj() * b;
            vec![a.norm_sqr() - b.norm_sqr(), 2.0 * z.re]
        }
        ModelName::H3R => {
            let (a, b) = (v[0], v[1]);
            let z = a.conj() * b;
            vec![a.norm_sqr() - b.norm_sqr(), 2.0 * z.re, 2.0 * z.im]
        }
        ModelName::H2C => {
            let y1 = (v[0] + v[2]) / SQRT_2;
            let y2 = v[1];
            let y3 = (v[0] - v[2]) / SQRT_2;
            let a = y1 / y3;
            let b = y2 / y3;
            let s = (a.norm_sqr() + b.norm_sqr()).sqrt();
            vec![a.re / s, a.im / s, b.re / s, b.im / s]
        }
    }
}

pub fn sphere_to_vector(model: &RankOneModel, x: &[f64]) -> Vec3 {
    match model.name {
        ModelName::H2R => {
            let th = 0.5 * x[1].atan2(x[0]);
            Vec3::new(C64::new(th.cos(), 0.0), C64::new(th.sin(), 0.0), ZERO)
        }
        ModelName::H3R => {
            let nrm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            let (x0, x1, x2) = (x[0] / nrm, x[1] / nrm, x[2] / nrm);
            if x0 >= 0.0 {
                let a = ((1.0 + x0) / 2.0).sqrt();
                Vec3::new(C64::new(a, 0.0), C64::new(x1, x2) / (2.0 * a), ZERO)
            } else {
                let b = ((1.0 - x0) / 2.0).sqrt();
                Vec3::new(C64::new(x1, -x2) / (2.0 * b), C64::new(b, 0.0), ZERO)
            }
        }
        ModelName::H2C => {
            let y1 = C64::new(x[0], x[1]);
            let y2 = C64::new(x[2], x[3]);
            let v = Vec3::new((y1 + ONE) / SQRT_2, y2, (y1 - ONE) / SQRT_2);
            v / C64::new(v.norm(), 0.0)
        }
    }
}

/// B±(gM): B₊ = g·P, B₋ = g·w·P.
pub fn endpoint(model: &RankOneModel, g: &Mat, sign: Sign) -> BoundaryPoint {
    let v: Vec3 = match sign {
        Sign::Plus => g.column(0).into(),
        Sign::Minus => (g * model.weyl_element()).column(0).into(),
    };
    BoundaryPoint::from_vector(model, &v)
}

/// ⟨gK, kM⟩ = −H(g⁻¹k) in Ȟ₀-units.
pub fn horocycle_bracket(model: &RankOneModel, g: &Mat, b: &BoundaryPoint) -> f64 {
    -(inv(g) * b.v).norm().ln() / model.eta()
}

/// Φ±(gM) = exp⟨gK, B±(gM)⟩ (Ȟ₀-units).
pub fn phi(model: &RankOneModel, g: &Mat, sign: Sign) -> f64 {
    log_phi(model, g, sign).exp()
}

pub fn log_phi(model: &RankOneModel, g: &Mat, sign: Sign) -> f64 {
    match sign {
        Sign::Plus => model.h_kan(g),
        Sign::Minus => model.h_kan(&(g * model.weyl_element())),
    }
}

/// N_γ(kM) = exp(−⟨γ⁻¹K, kM⟩).
pub fn n_gamma(model: &RankOneModel, gamma: &Mat, b: &BoundaryPoint) -> f64 {
    (gamma * b.v).norm().powf(1.0 / model.eta())
}

type Evaluator = dyn Fn(&BoundaryPoint) -> C64 + Send + Sync;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Analytic,
    Smooth,
}

/// A smooth function on K/M.
#[derive(Clone)]
pub struct BoundaryFunction {
    eval: Arc<Evaluator>,
    pub smoothness: Smoothness,
    /// Highest spherical-harmonic degree present, when known.
    pub band_limit: Option<usize>,
    pub label: String,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundaryFunction({})", self.label)
    }
}

impl BoundaryFunction {
    pub fn new<F>(label: &str, f: F) -> Self
    where
        F: Fn(&BoundaryPoint) -> C64 + Send + Sync + 'static,
    {
        BoundaryFunction {
            eval: Arc::new(f),
            smoothness: Smoothness::Smooth,
            band_limit: None,
            label: label.to_string(),
        }
    }

    /// A function given in round-sphere coordinates.
    pub fn from_sphere<F>(model: &RankOneModel, label: &str, f: F) -> Self
    where
        F: Fn(&[f64]) -> C64 + Send + Sync + 'static,
    {
        let m = model.clone();
        BoundaryFunction::new(label, move |b| f(&b.sphere_coords(&m)))
    }

    pub fn constant(value: C64) -> Self {
        let mut t = BoundaryFunction::new("constant", move |_| value);
        t.smoothness = Smoothness::Analytic;
        t.band_limit = Some(0);
        t
    }

    /// Zonal K-type of degree ℓ around the base point.
    ///
    /// S¹: cos(ℓθ); S²: P_ℓ(x₀); S³: (x₀ + i x₁)^ℓ, the type (ℓ, 0) of U(2).
    pub fn zonal(model: &RankOneModel, ell: usize) -> Self {
        let name = model.name;
        let mut t = BoundaryFunction::from_sphere(model, &format!("zonal{ell}"), move |x| match name {
            ModelName::H2R => {
                let th = x[1].atan2(x[0]);
                C64::new((ell as f64 * th).cos(), 0.0)
            }
            ModelName::H3R => C64::new(legendre_p(ell, x[0]), 0.0),
            ModelName::H2C => C64::new(x[0], x[1]).powu(ell as u32),
        });
        t.smoothness = Smoothness::Analytic;
        t.band_limit = Some(ell);
        t
    }

    /// exp(a·x) + i(b·x)² for fixed vectors a, b.
    pub fn exp_linear(model: &RankOneModel, a: Vec<f64>, b: Vec<f64>) -> Self {
        let mut t = BoundaryFunction::from_sphere(model, "exp_linear", move |x| {
            let ax: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            let bx: f64 = b.iter().zip(x).map(|(p, q)| p * q).sum();
            C64::new(ax.exp(), bx * bx)
        });
        t.smoothness = Smoothness::Analytic;
        t
    }

    pub fn eval(&self, b: &BoundaryPoint) -> C64 {
        (self.eval)(b)
    }

    pub fn scale(&self, s: C64) -> Self {
        let me = self.clone();
        let mut t = BoundaryFunction::new(&format!("{s}*{}", self.label), move |b| s * me.eval(b));
        t.band_limit = self.band_limit;
        t
    }
}

/// Legendre polynomial P_ℓ.
pub fn legendre_p(ell: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if ell == 0 {
        return 1.0;
    }
    for k in 2..=ell {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// (π^cpt_μ(γ)T)(k'M) = e^{−(μ̌+ρ̌)H(γ⁻¹k')}·T(k(γ⁻¹k')M).
pub fn principal_series(model: &RankOneModel, mu_check: C64, gamma: &Mat, t: &BoundaryFunction) -> BoundaryFunction {
    let gi = inv(gamma);
    let m = model.clone();
    let t = t.clone();
    let rho = model.rho_check;
    BoundaryFunction::new(&format!("pi({})", t.label), move |b| {
        let w = gi * b.v;
        let h = w.norm().ln() / m.eta();
        let b2 = BoundaryPoint::from_vector(&m, &w);
        (-(mu_check + rho) * h).exp() * t.eval(&b2)
    })
}

/// (Q_{λ,±}T)(gM) = Φ±(gM)^{λ̌}·T(B±(gM)).
pub fn q_transform(model: &RankOneModel, t: &BoundaryFunction, lambda_check: C64, sign: Sign, g: &Mat) -> C64 {
    let b = endpoint(model, g, sign);
    (lambda_check * log_phi(model, g, sign)).exp() * t.eval(&b)
}

/// A quadrature rule for the measure dkM on K/M of total mass vol(S^{n−1}).
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub points: Vec<BoundaryPoint>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl SphereRule {
    /// Product rule with resolution parameter `order`.
    ///
    /// S¹: trapezoid with 2·order nodes. S²: Gauss-Legendre in cos θ times a
    /// trapezoid in φ. S³: Hopf coordinates (√(1−t)e^{iξ₁}, √t e^{iξ₂}) with
    /// measure ½dt dξ₁dξ₂, Gauss-Legendre in t.
    pub fn new(model: &RankOneModel, order: usize) -> SphereRule {
        let order = order.max(2);
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        let np = 2 * order;
        let hp = TAU / np as f64;
        match model.n {
            2 => {
                for j in 0..np {
                    let th = j as f64 * hp;
                    pts.push(vec![th.cos(), th.sin()]);
                    wts.push(hp);
                }
            }
            3 => {
                let (z, w) = gauss_legendre_on(order, -1.0, 1.0);
                for (zi, wi) in z.iter().zip(&w) {
                    let s = (1.0 - zi * zi).sqrt();
                    for j in 0..np {
                        let ph = j as f64 * hp;
                        pts.push(vec![*zi, s * ph.cos(), s * ph.sin()]);
                        wts.push(wi * hp);
                    }
                }
            }
            4 => {
                let (t, w) = gauss_legendre_on(order, 0.0, 1.0);
                for (ti, wi) in t.iter().zip(&w) {
                    let (c, s) = ((1.0 - ti).sqrt(), ti.sqrt());
                    for j1 in 0..np {
                        let x1 = j1 as f64 * hp;
                        for j2 in 0..np {
                            let x2 = j2 as f64 * hp;
                            pts.push(vec![c * x1.cos(), c * x1.sin(), s * x2.cos(), s * x2.sin()]);
                            wts.push(0.5 * wi * hp * hp);
                        }
                    }
                }
            }
            _ => unreachable!("rank-one models have n in 2..=4"),
        }
        let points = pts.iter().map(|x| BoundaryPoint::from_sphere(model, x)).collect();
        SphereRule { points, weights: wts, order }
    }

    /// Rule in geodesic polar coordinates about the base point, x = (cos θ, sin θ·ω), with
    /// Gauss-Legendre panels in θ refined towards θ = 0 and a product rule of resolution
    /// `order` on ω ∈ S^{n−2}.
    pub fn polar(model: &RankOneModel, nodes: usize, order: usize) -> SphereRule {
        const EDGES: [f64; 10] = [0.0, 0.004, 0.012, 0.03, 0.07, 0.15, 0.3, 0.6, 1.2, std::f64::consts::PI];
        let order = order.max(2);
        let np = 2 * order;
        let hp = TAU / np as f64;
        let omega: Vec<(Vec<f64>, f64)> = match model.n {
            2 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
            3 => (0..np)
                .map(|j| {
                    let ph = j as f64 * hp;
                    (vec![ph.cos(), ph.sin()], hp)
                })
                .collect(),
            _ => {
                let (z, w) = gauss_legendre_on(order, -1.0, 1.0);
                let mut out = Vec::new();
                for (zi, wi) in z.iter().zip(&w) {
                    let r = (1.0 - zi * zi).sqrt();
                    for j in 0..np {
                        let ph = j as f64 * hp;
                        out.push((vec![*zi, r * ph.cos(), r * ph.sin()], wi * hp));
                    }
                }
                out
            }
        };
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for e in EDGES.windows(2) {
            let (th, wt) = gauss_legendre_on(nodes, e[0], e[1]);
            for (t, w) in th.iter().zip(&wt) {
                let (c, sn) = (t.cos(), t.sin());
                let jac = w * sn.powi(model.n as i32 - 2);
                for (om, wo) in &omega {
                    let mut x = vec![c];
                    x.extend(om.iter().map(|o| sn * o));
                    points.push(BoundaryPoint::from_sphere(model, &x));
                    weights.push(jac * wo);
                }
            }
        }
        SphereRule { points, weights, order }
    }

    /// The rule pushed forward by k ∈ K, exact for the K-invariant measure.
    pub fn rotated(&self, model: &RankOneModel, k: &Mat) -> SphereRule {
        SphereRule {
            points: self.points.iter().map(|b| BoundaryPoint::from_k(model, &(k * b.k))).collect(),
            weights: self.weights.clone(),
            order: self.order,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: Fn(&BoundaryPoint) -> C64>(&self, f: F) -> C64 {
        self.points.iter().zip(&self.weights).map(|(b, w)| f(b) * *w).sum()
    }
}

/// The boundary point towards which g·b concentrates: the top eigenvector of g g*.
pub fn attracting_point(model: &RankOneModel, g: &Mat) -> BoundaryPoint {
    let eig = (g * g.adjoint()).symmetric_eigen();
    let d = model.matrix_dim;
    let mut best = 0;
    for i in 1..d {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    BoundaryPoint::from_vector(model, &eig.eigenvectors.column(best).into_owned())
}

/// π₀*F(gK) = ∫_{K/M} F(gkM) dkM; the integrand receives the group element g·k.
pub fn fiber_integrate<F: Fn(&Mat) -> C64>(g: &Mat, rule: &SphereRule, f: F) -> C64 {
    rule.integrate(|b| f(&(g * b.k)))
}

/// Fiber integral at two resolutions; errors when they disagree beyond `tol` (relative).
pub fn fiber_integrate_checked<F: Fn(&Mat) -> C64>(
    model: &RankOneModel,
    g: &Mat,
    order: usize,
    tol: f64,
    f: F,
) -> Result<C64> {
    let a = fiber_integrate(g, &SphereRule::new(model, order), &f);
    let b = fiber_integrate(g, &SphereRule::new(model, order + order / 2 + 1), &f);
    let err = (a - b).norm();
    if err > tol * b.norm().max(1e-300) {
        return Err(Error::Nonconvergent { error: err });
    }
    Ok(b)
}

/// vol(S^{n-1}) read off from the rule, for self-checks.
pub fn rule_volume(rule: &SphereRule) -> f64 {
    rule.weights.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::NbarCoordinates;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn models() -> Vec<RankOneModel> {
        ModelName::ALL.iter().map(|n| RankOneModel::build(*n)).collect()
    }

    #[test]
    fn representative_maps_base_vector_onto_line() {
        let mut r = ChaCha8Rng::seed_from_u64(3);
        for m in models() {
            for _ in 0..20 {
                let k = m.random_k(&mut r);
                let b = BoundaryPoint::from_k(&m, &k);
                let b2 = BoundaryPoint::from_vector(&m, &b.v);
                assert!(m.membership_residual(&b2.k) < 1e-10);
                assert!((b2.k * b2.k.adjoint() - Mat::identity()).norm() < 1e-10);
                let km = k.adjoint() * b2.k;
                // k⁻¹k' ∈ M: diagonal with unit entries.
                let off: f64 = (0..3)
                    .flat_map(|i| (0..3).map(move |j| (i, j)))
                    .filter(|(i, j)| i != j)
                    .map(|(i, j)| km[(i, j)].norm())
                    .sum();
                assert!(off < 1e-9, "{}", m.name);
            }
        }
    }

    #[test]
    fn sphere_coordinates_round_trip() {
        let mut r = ChaCha8Rng::seed_from_u64(4);
        for m in models() {
            for _ in 0..20 {
                let b = BoundaryPoint::from_k(&m, &m.random_k(&mut r));
                let x = b.sphere_coords(&m);
                let nrm: f64 = x.iter().map(|t| t * t).sum();
                assert!((nrm - 1.0).abs() < 1e-12);
                let b2 = BoundaryPoint::from_sphere(&m, &x);
                assert!(b.approx_eq(&b2, 1e-10));
            }
            let e = BoundaryPoint::base(&m).sphere_coords(&m);
            assert!((e[0] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sphere_coordinates_are_k_isometric() {
        // K acts on the sphere by isometries: inner products are preserved.
        let mut r = ChaCha8Rng::seed_from_u64(5);
        for m in models() {
            for _ in 0..10 {
                let k = m.random_k(&mut r);
                let b1 = BoundaryPoint::from_k(&m, &m.random_k(&mut r));
                let b2 = BoundaryPoint::from_k(&m, &m.random_k(&mut r));
                let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                let before = dot(&b1.sphere_coords(&m), &b2.sphere_coords(&m));
                let after = dot(&b1.act(&m, &k).sphere_coords(&m), &b2.act(&m, &k).sphere_coords(&m));
                assert!((before - after).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rule_volumes() {
        for m in models() {
            for order in [2, 5, 9] {
                let r = SphereRule::new(&m, order);
                assert!((rule_volume(&r) - m.vol_sphere).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_harmonics_integrate_to_zero() {
        for m in models() {
            let rule = SphereRule::new(&m, 6);
            for i in 0..m.n {
                let v = rule.integrate(|b| C64::new(b.sphere_coords(&m)[i], 0.0));
                assert!(v.norm() < 1e-12);
            }
            let v = rule.integrate(|b| C64::new(b.sphere_coords(&m)[0].powi(2), 0.0));
            assert!((v.re - m.vol_sphere / m.n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoint_at_identity() {
        for m in models() {
            let b = endpoint(&m, &Mat::identity(), Sign::Plus);
            assert!(b.approx_eq(&BoundaryPoint::base(&m), 1e-14));
            assert_eq!(horocycle_bracket(&m, &Mat::identity(), &b), 0.0);
        }
    }

    #[test]
    fn bracket_agrees_with_full_iwasawa() {
        let mut r = ChaCha8Rng::seed_from_u64(6);
        for m in models() {
            let g = m.random_group(&mut r);
            let b = BoundaryPoint::from_k(&m, &m.random_k(&mut r));
            let (_, u, _) = m.iwasawa_kan(&(inv(&g) * b.k)).unwrap();
            assert!((horocycle_bracket(&m, &g, &b) + u).abs() < 1e-10);
        }
    }

    #[test]
    fn n_gamma_matches_script_n() {
        // e^{α₀ H(n̄)} = 𝒩(n̄): the explicit formula against the Iwasawa projection.
        let mut r = ChaCha8Rng::seed_from_u64(8);
        for m in models() {
            for _ in 0..10 {
                let c = m.random_nbar_coords(&mut r, 2.0);
                let nb = m.nbar_exp(&c);
                let (_, u, _) = m.iwasawa_kan(&nb).unwrap();
                assert!((u.exp() - m.script_n(&c)).abs() < 1e-10 * m.script_n(&c));
            }
            let z = NbarCoordinates::zero(&m);
            assert_eq!(m.script_n(&z), 1.0);
        }
    }

    #[test]
    fn legendre_values() {
        assert!((legendre_p(3, 0.3) - 0.5 * (5.0 * 0.027 - 0.9)).abs() < 1e-15);
    }
}
