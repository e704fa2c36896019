//! The maps ℰ, 𝒢, ψ, Ω and the pairing diffeomorphism 𝒜 = ψ⁻¹∘𝒢⁻¹∘ℰ from the
//! double sphere bundle onto G ×_M N̄, together with the Jacobian of ν.

pub mod measure;

use crate::boundary::{endpoint, BoundaryPoint, Sign};
use crate::error::{Error, Result};
use crate::lie_core::{inv, Mat, NbarCoordinates, RankOneModel};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// (x, η₋, η₊) with x = hK and η± = h·k±·M.
#[derive(Clone, Debug)]
pub struct DoubleSpherePoint {
    pub h: Mat,
    pub k_minus: Mat,
    pub k_plus: Mat,
}

impl DoubleSpherePoint {
    pub fn eta_minus(&self) -> Mat {
        self.h * self.k_minus
    }
    pub fn eta_plus(&self) -> Mat {
        self.h * self.k_plus
    }

    /// True when η₋ + η₊ = 0 within `tol`.
    pub fn near_antidiagonal(&self, model: &RankOneModel, tol: f64) -> bool {
        let reversed = BoundaryPoint::from_k(model, &(self.k_plus * model.weyl_element()));
        reversed.approx_eq(&BoundaryPoint::from_k(model, &self.k_minus), tol)
    }

    /// Distance to another triple, comparing base points and both directions.
    pub fn distance(&self, model: &RankOneModel, o: &DoubleSpherePoint) -> f64 {
        let dx = base_point_distance(&self.h, &o.h);
        // Transport o's directions to the representative h.
        let t = inv(&self.h) * o.h;
        let km = BoundaryPoint::from_vector(model, &(t * o.k_minus.column(0)));
        let kp = BoundaryPoint::from_vector(model, &(t * o.k_plus.column(0)));
        dx + km.distance(&BoundaryPoint::from_k(model, &self.k_minus))
            + kp.distance(&BoundaryPoint::from_k(model, &self.k_plus))
    }
}

/// A class [g, n̄] in G ×_M N̄.
#[derive(Clone, Debug)]
pub struct EuPoint {
    pub g: Mat,
    pub nbar: Mat,
}

impl EuPoint {
    /// Distance respecting [gm, n̄] = [g, m n̄ m⁻¹]; infinite when gM differ.
    pub fn distance(&self, o: &EuPoint) -> f64 {
        let m = inv(&self.g) * o.g;
        let off = off_diagonal(&m);
        let unit: f64 = (0..3).map(|i| (m[(i, i)].norm() - 1.0).abs()).sum();
        let transported = inv(&m) * self.nbar * m;
        off + unit + (transported - o.nbar).norm()
    }
}

fn off_diagonal(m: &Mat) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                s += m[(i, j)].norm();
            }
        }
    }
    s
}

/// Distance of the cosets gMA and g'MA (zero iff g⁻¹g' is diagonal).
pub fn ma_coset_distance(g1: &Mat, g2: &Mat) -> f64 {
    let m = inv(g1) * g2;
    off_diagonal(&m) / (1.0 + m.norm())
}

/// Distance of gK and g'K through g g*.
pub fn base_point_distance(g1: &Mat, g2: &Mat) -> f64 {
    (g1 * g1.adjoint() - g2 * g2.adjoint()).norm()
}

/// Riemannian distance d(o, gK) in the Killing metric.
pub fn distance_from_origin(model: &RankOneModel, g: &Mat) -> f64 {
    let p = g * g.adjoint();
    let eig = p.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    0.5 * top.ln() / model.eta()
}

/// ℰ(x, η₋, η₊) = (x, B₋(η₋), B₊(η₊)).
pub fn map_e(model: &RankOneModel, p: &DoubleSpherePoint) -> (Mat, BoundaryPoint, BoundaryPoint) {
    (p.h, endpoint(model, &p.eta_minus(), Sign::Minus), endpoint(model, &p.eta_plus(), Sign::Plus))
}

/// 𝒢(gMA) = (gwP, gP).
pub fn map_g(model: &RankOneModel, g: &Mat) -> (BoundaryPoint, BoundaryPoint) {
    (endpoint(model, g, Sign::Minus), endpoint(model, g, Sign::Plus))
}

/// 𝒢⁻¹(g₁wP, g₂P) = g₁·n̄_{N̄P}(g₁⁻¹g₂)·MA.
pub fn map_g_inverse(model: &RankOneModel, b1: &BoundaryPoint, b2: &BoundaryPoint) -> Result<Mat> {
    if b1.approx_eq(b2, 1e-8) {
        return Err(Error::Diagonal);
    }
    let w = model.weyl_element();
    let g1 = b1.k * inv(&w);
    let nb = model.bruhat_nbar(&(inv(&g1) * b2.k)).map_err(|_| Error::Diagonal)?;
    Ok(g1 * nb)
}

/// ψ[g, n̄] = (g n̄ K, gMA).
pub fn map_psi(e: &EuPoint) -> (Mat, Mat) {
    (e.g * e.nbar, e.g)
}

/// ψ⁻¹(hK, gMA) = [g·a(g⁻¹h), n̄(g⁻¹h)] in the AN̄K decomposition.
pub fn map_psi_inverse(model: &RankOneModel, h: &Mat, g: &Mat) -> Result<EuPoint> {
    let (u, nbar, _) = model.decompose_ank(&(inv(g) * h))?;
    Ok(EuPoint { g: g * model.exp_a(u), nbar })
}

/// Ω(n̄) = n̄_{N̄P}(w n̄).
pub fn omega(model: &RankOneModel, nbar: &Mat) -> Result<Mat> {
    model.bruhat_nbar(&(model.weyl_element() * nbar)).map_err(|_| Error::IdentityInput)
}

/// Ω⁻¹(m̄) = n̄_{N̄P}(w⁻¹ m̄).
pub fn omega_inverse(model: &RankOneModel, mbar: &Mat) -> Result<Mat> {
    model.bruhat_nbar(&(inv(&model.weyl_element()) * mbar)).map_err(|_| Error::IdentityInput)
}

/// 𝒜 = ψ⁻¹∘𝒢⁻¹∘ℰ.
pub fn map_a(model: &RankOneModel, p: &DoubleSpherePoint) -> Result<EuPoint> {
    let (h, bm, bp) = map_e(model, p);
    let g = map_g_inverse(model, &bm, &bp).map_err(|_| Error::Antidiagonal)?;
    map_psi_inverse(model, &h, &g)
}

/// 𝒜⁻¹[g, n̄]: base point g n̄ K, with η₋ ending backwards at gwP and η₊ ending at gP.
pub fn map_a_inverse(model: &RankOneModel, e: &EuPoint) -> DoubleSpherePoint {
    let h = e.g * e.nbar;
    let hi = inv(&h);
    let (bm, bp) = map_g(model, &e.g);
    let kp = bm.act(model, &hi);
    let kplus = bp.act(model, &hi).k;
    let kminus = kp.k * inv(&model.weyl_element());
    DoubleSpherePoint { h, k_minus: kminus, k_plus: kplus }
}

/// 𝒜⁻¹[g, n̄] = (g n̄ K, k_{NAK}(g n̄)P, k_{NAK}(g n̄) w Ω⁻¹(n̄⁻¹) P), with the boundary
/// points read as directions at the base point n a K.
pub fn map_a_inverse_via_omega(model: &RankOneModel, e: &EuPoint) -> Result<DoubleSpherePoint> {
    let gn = e.g * e.nbar;
    let (n, u, k) = model.decompose_nak(&gn)?;
    let na = n * model.exp_a(u);
    let w = model.weyl_element();
    let far = k * w * omega_inverse(model, &inv(&e.nbar))?;
    let k_far = BoundaryPoint::from_vector(model, &far.column(0).into_owned()).k;
    Ok(DoubleSpherePoint { h: na, k_minus: k, k_plus: k_far })
}

/// ν(n̄) = n̄_{AN̄K}(w n̄ w⁻¹).
pub fn nu(model: &RankOneModel, nbar: &Mat) -> Result<Mat> {
    let w = model.weyl_element();
    Ok(model.decompose_ank(&(w * nbar * inv(&w)))?.1)
}

/// |det Dν| in N̄ coordinates by central differences with step h.
pub fn jacobian_nu(model: &RankOneModel, c: &NbarCoordinates, h: f64) -> Result<f64> {
    let x = c.flat();
    let d = x.len();
    let f = |y: &[f64]| -> Result<Vec<f64>> {
        let n = nu(model, &model.nbar_exp(&NbarCoordinates::from_flat(model, y)))?;
        Ok(model.nbar_log(&n)?.flat())
    };
    let mut jac = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (f(&xp)?, f(&xm)?);
        for i in 0..d {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac.determinant().abs())
}

/// A Haar-distributed point of K/M together with its K representative.
pub fn uniform_boundary_point<R: Rng + ?Sized>(model: &RankOneModel, rng: &mut R) -> BoundaryPoint {
    let mut x: Vec<f64> = (0..model.n).map(|_| StandardNormal.sample(rng)).collect();
    let s = x.iter().map(|t| t * t).sum::<f64>().sqrt();
    x.iter_mut().for_each(|t| *t /= s);
    BoundaryPoint::from_sphere(model, &x)
}

/// Radial density of the Riemannian volume in geodesic polar coordinates.
pub fn polar_density(model: &RankOneModel, r: f64) -> f64 {
    r.sinh().powi(model.m_alpha as i32) * (0.5 * (2.0 * r).sinh()).powi(model.m_2alpha as i32)
}

/// Volume-uniform sampler on the geodesic ball of radius `radius` about o.
#[derive(Clone, Debug)]
pub struct BallSampler {
    pub radius: f64,
    pub volume: f64,
    /// Radial sampling density ∝ polar_density(u)·e^{−tilt·u}.
    pub tilt: f64,
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl BallSampler {
    pub fn new(model: &RankOneModel, radius: f64) -> Self {
        Self::tilted(model, radius, 0.0)
    }

    pub fn tilted(model: &RankOneModel, radius: f64, tilt: f64) -> Self {
        let n = 4096;
        let dens = |u: f64| polar_density(model, u) * (-tilt * u).exp();
        let grid: Vec<f64> = (0..=n).map(|i| radius * i as f64 / n as f64).collect();
        let mut cdf = vec![0.0; n + 1];
        for i in 1..=n {
            // Simpson on each cell.
            let (a, b) = (grid[i - 1], grid[i]);
            let m = 0.5 * (a + b);
            cdf[i] = cdf[i - 1] + (b - a) / 6.0 * (dens(a) + 4.0 * dens(m) + dens(b));
        }
        let mut volume = 0.0;
        for i in 1..=n {
            let (a, b) = (grid[i - 1], grid[i]);
            let m = 0.5 * (a + b);
            volume +=
                (b - a) / 6.0 * (polar_density(model, a) + 4.0 * polar_density(model, m) + polar_density(model, b));
        }
        BallSampler { radius, volume: volume * model.vol_sphere, tilt, grid, cdf }
    }

    pub fn sample_radius<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let target = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        let i = self.cdf.partition_point(|c| *c < target).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        self.grid[i - 1] + t * (self.grid[i] - self.grid[i - 1])
    }

    /// h with hK uniformly distributed in the ball.
    pub fn sample<R: Rng + ?Sized>(&self, model: &RankOneModel, rng: &mut R) -> Mat {
        self.sample_weighted(model, rng).0
    }

    /// h drawn from the tilted density, with its importance weight relative to d(hK).
    pub fn sample_weighted<R: Rng + ?Sized>(&self, model: &RankOneModel, rng: &mut R) -> (Mat, f64) {
        let r = self.sample_radius(rng);
        let weight = self.cdf[self.cdf.len() - 1] * model.vol_sphere * (self.tilt * r).exp();
        (uniform_boundary_point(model, rng).k * model.exp_a(r), weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::ModelName;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn h2r_omega_closed_form() {
        // w n̄(x) = [[-x,-1],[1,0]] in the Bruhat cell for x ≠ 0, with N̄-part [[1,0],[-1/x,1]].
        let m = RankOneModel::build(ModelName::H2R);
        for x in [0.3, -2.0, 5.0] {
            let c = NbarCoordinates { u1: vec![2.0 * x], u2: vec![] };
            let om = omega(&m, &m.nbar_exp(&c)).unwrap();
            assert!((om[(1, 0)].re + 1.0 / x).abs() < 1e-12);
        }
        assert!(matches!(omega(&m, &Mat::identity()), Err(Error::IdentityInput)));
    }

    #[test]
    fn nu_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let n = m.nbar_exp(&m.random_nbar_coords(&mut rng, 1.0));
            let back = nu(&m, &nu(&m, &n).unwrap()).unwrap();
            assert!((back - n).norm() < 1e-10, "{name}");
        }
    }

    #[test]
    fn polar_density_near_origin() {
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let r: f64 = 1e-4;
            assert!((polar_density(&m, r) / r.powi(m.n as i32 - 1) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn distance_from_origin_of_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let k = m.random_k(&mut rng);
            let d = distance_from_origin(&m, &(k * m.exp_a(1.3) * m.random_k(&mut rng)));
            assert!((d - 1.3).abs() < 1e-10);
        }
    }

    #[test]
    fn ball_volume_small_radius() {
        let m = RankOneModel::build(ModelName::H3R);
        let s = BallSampler::new(&m, 0.01);
        let euclid = 4.0 / 3.0 * std::f64::consts::PI * 1e-6;
        assert!((s.volume / euclid - 1.0).abs() < 1e-4);
    }
}
