//! Matrix realizations of the rank-one groups SL(2,R), SL(2,C) and SU(2,1).
//!
//! Every model is stored in 3x3 complex matrices. The 2x2 models occupy the
//! upper-left block; group elements carry a 1 and Lie algebra elements a 0 in
//! the (2,2) slot.
//!
//! The Iwasawa data are fixed as follows: `A` is diagonal, `N` is upper
//! unipotent, `N̄` is lower unipotent and `K` is the unitary subgroup. The
//! hyperbolic base point corresponds to the reference vector `e₀`.
//! 𝔞-quantities are stored as the coefficient `u` of `Ȟ₀ = H₀/‖α₀‖`.

use crate::error::{Error, Result};
use crate::special::sphere_volume;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub type Mat = Matrix3<C64>;
pub type Vec3 = Vector3<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum ModelName {
    H2R,
    H3R,
    H2C,
}

impl ModelName {
    pub const ALL: [ModelName; 3] = [ModelName::H2R, ModelName::H3R, ModelName::H2C];
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelName::H2R => "H2R",
            ModelName::H3R => "H3R",
            ModelName::H2C => "H2C",
        };
        f.write_str(s)
    }
}

impl FromStr for ModelName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "H2R" => Ok(ModelName::H2R),
            "H3R" => Ok(ModelName::H3R),
            "H2C" => Ok(ModelName::H2C),
            _ => Err(Error::InvalidArgument(format!("unknown model {s}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grading {
    A,
    NPlusAlpha,
    NPlus2Alpha,
    NMinusAlpha,
    NMinus2Alpha,
    K,
    Generic,
}

/// A Lie algebra element with an optional root-space tag.
#[derive(Clone, Debug)]
pub struct LieAlgebraElement {
    pub mat: Mat,
    pub grading: Grading,
}

impl LieAlgebraElement {
    /// Residual of the bracket relation implied by the tag.
    pub fn grading_residual(&self, model: &RankOneModel) -> f64 {
        let h = model.h0_check();
        let br = h * self.mat - self.mat * h;
        let expect = match self.grading {
            Grading::A => Mat::zeros(),
            Grading::NPlusAlpha => self.mat,
            Grading::NPlus2Alpha => self.mat * C64::new(2.0, 0.0),
            Grading::NMinusAlpha => -self.mat,
            Grading::NMinus2Alpha => self.mat * C64::new(-2.0, 0.0),
            Grading::K => return (self.mat + self.mat.adjoint()).norm(),
            Grading::Generic => return 0.0,
        };
        (br - expect).norm()
    }
}

/// A point of N̄ in orthonormal root-space coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NbarCoordinates {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl NbarCoordinates {
    pub fn zero(model: &RankOneModel) -> Self {
        NbarCoordinates { u1: vec![0.0; model.m_alpha], u2: vec![0.0; model.m_2alpha] }
    }
    pub fn norm1_sq(&self) -> f64 {
        self.u1.iter().map(|x| x * x).sum()
    }
    pub fn norm2(&self) -> f64 {
        self.u2.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
    /// ⟨n̄⟩ = ‖U₁‖² + ‖U₂‖.
    pub fn angle_bracket(&self) -> f64 {
        self.norm1_sq() + self.norm2()
    }
    pub fn flat(&self) -> Vec<f64> {
        self.u1.iter().chain(self.u2.iter()).copied().collect()
    }
    pub fn from_flat(model: &RankOneModel, x: &[f64]) -> Self {
        NbarCoordinates {
            u1: x[..model.m_alpha].to_vec(),
            u2: x[model.m_alpha..model.m_alpha + model.m_2alpha].to_vec(),
        }
    }
    /// The anisotropic dilation (e^τ U₁, e^{2τ} U₂).
    pub fn dilate(&self, tau: f64) -> Self {
        let e1 = tau.exp();
        let e2 = (2.0 * tau).exp();
        NbarCoordinates { u1: self.u1.iter().map(|x| x * e1).collect(), u2: self.u2.iter().map(|x| x * e2).collect() }
    }
}

/// A group element in the defining representation, tagged with its model.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub mat: Mat,
    pub model: ModelName,
}

impl GroupElement {
    pub fn new(model: &RankOneModel, mat: Mat) -> Result<Self> {
        let r = model.membership_residual(&mat);
        if r > 1e-10 * (1.0 + mat.norm().powi(2)) {
            return Err(Error::InvalidArgument(format!("matrix is not in {} (residual {r:.3e})", model.name)));
        }
        Ok(GroupElement { mat, model: model.name })
    }
    pub fn inverse(&self) -> Self {
        GroupElement { mat: inv(&self.mat), model: self.model }
    }
}

impl std::ops::Mul for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.model, rhs.model);
        GroupElement { mat: self.mat * rhs.mat, model: self.model }
    }
}

/// Inverse of a group element (determinant one, so well conditioned in practice).
pub fn inv(g: &Mat) -> Mat {
    g.try_inverse().expect("group elements are invertible")
}

#[derive(Clone, Debug)]
pub struct RankOneModel {
    pub name: ModelName,
    pub n: usize,
    pub m_alpha: usize,
    pub m_2alpha: usize,
    pub alpha_norm: f64,
    pub rho_check: f64,
    pub vol_sphere: f64,
    pub matrix_dim: usize,
    pub field: Field,
    /// Constant c = (4 m_α + 16 m_2α)⁻¹ in the explicit formula for 𝒩.
    pub c_const: f64,
    /// B(X, Y) = killing_factor · Re tr(XY).
    pub killing_factor: f64,
    h0_check: Mat,
    eta: f64,
    nbar1: Vec<Mat>,
    nbar2: Vec<Mat>,
    weyl: Mat,
    form: Option<Mat>,
    basis: Vec<Mat>,
}

fn e(i: usize, j: usize) -> Mat {
    let mut m = Mat::zeros();
    m[(i, j)] = ONE;
    m
}

fn diag(a: C64, b: C64, c: C64) -> Mat {
    Mat::from_diagonal(&Vec3::new(a, b, c))
}

fn flatten(m: &Mat, d: usize) -> DVector<f64> {
    let mut v = DVector::zeros(2 * d * d);
    for i in 0..d {
        for j in 0..d {
            v[2 * (i * d + j)] = m[(i, j)].re;
            v[2 * (i * d + j) + 1] = m[(i, j)].im;
        }
    }
    v
}

/// Killing form assembled from the adjoint structure constants of a real basis.
pub fn killing_matrix(basis: &[Mat], d: usize) -> DMatrix<f64> {
    let dim = basis.len();
    let mut bm = DMatrix::zeros(2 * d * d, dim);
    for (j, b) in basis.iter().enumerate() {
        bm.set_column(j, &flatten(b, d));
    }
    let svd = bm.clone().svd(true, true);
    let ads: Vec<DMatrix<f64>> = basis
        .iter()
        .map(|x| {
            let mut ad = DMatrix::zeros(dim, dim);
            for (j, y) in basis.iter().enumerate() {
                let br = x * y - y * x;
                let coords = svd.solve(&flatten(&br, d), 1e-12).expect("svd solve");
                ad.set_column(j, &coords);
            }
            ad
        })
        .collect();
    DMatrix::from_fn(dim, dim, |i, j| (&ads[i] * &ads[j]).trace())
}

impl RankOneModel {
    /// Builds the model, computing ‖α₀‖ from the Killing form.
    pub fn build(name: ModelName) -> RankOneModel {
        let (d, field, a1, basis, n1, n2, weyl, form) = match name {
            ModelName::H2R => {
                let h = diag(ONE, -ONE, ZERO);
                let basis = vec![h, e(0, 1), e(1, 0)];
                let w = e(1, 0) - e(0, 1) + e(2, 2);
                (2, Field::Real, h, basis, vec![e(1, 0)], vec![], w, None)
            }
            ModelName::H3R => {
                let h = diag(ONE, -ONE, ZERO);
                let basis = vec![h, e(0, 1), e(1, 0), h * I, e(0, 1) * I, e(1, 0) * I];
                let w = e(1, 0) - e(0, 1) + e(2, 2);
                (2, Field::Complex, h, basis, vec![e(1, 0), e(1, 0) * I], vec![], w, None)
            }
            ModelName::H2C => {
                let h = diag(ONE, ZERO, -ONE);
                let mm = diag(I, I * -2.0, I);
                let nb = |x: C64| e(1, 0) * x - e(2, 1) * x.conj();
                let nb2 = e(2, 0) * I;
                let np = |x: C64| -(nb(x).adjoint());
                let np2 = -(nb2.adjoint());
                let basis = vec![h, mm, nb(ONE), nb(I), nb2, np(ONE), np(I), np2];
                let w = e(0, 2) - e(1, 1) + e(2, 0);
                let j = e(0, 2) + e(1, 1) + e(2, 0);
                (3, Field::Complex, h, basis, vec![nb(ONE), nb(I)], vec![nb2], w, Some(j))
            }
        };
        let kill = killing_matrix(&basis, d);
        let b_aa = kill[(0, 0)];
        let killing_factor = b_aa / (a1 * a1).trace().re;
        // α₀(A₁): eigenvalue of ad A₁ on the first negative root vector, with sign flipped.
        let y = &n1[0];
        let br = a1 * y - y * a1;
        let alpha_a1 = -(br[(1, 0)] / y[(1, 0)]).re;
        // B(H_α, A₁) = α₀(A₁) gives H_α = (α₀(A₁)/B(A₁,A₁)) A₁ and ‖α₀‖² = α₀(H_α).
        let alpha_norm = (alpha_a1 * alpha_a1 / b_aa).sqrt();
        let h0_check = a1 / C64::new(alpha_a1, 0.0);
        let inner = |x: &Mat, y: &Mat| killing_factor * (x * y.adjoint()).trace().re;
        let normalize = |v: Vec<Mat>| -> Vec<Mat> {
            let mut out: Vec<Mat> = Vec::new();
            for mut x in v {
                for q in &out {
                    x -= q * C64::new(inner(&x, q), 0.0);
                }
                let nrm = inner(&x, &x).sqrt();
                out.push(x / C64::new(nrm, 0.0));
            }
            out
        };
        let nbar1 = normalize(n1);
        let nbar2 = normalize(n2);
        let m_alpha = nbar1.len();
        let m_2alpha = nbar2.len();
        let n = m_alpha + m_2alpha + 1;
        RankOneModel {
            name,
            n,
            m_alpha,
            m_2alpha,
            alpha_norm,
            rho_check: m_alpha as f64 / 2.0 + m_2alpha as f64,
            vol_sphere: sphere_volume(n),
            matrix_dim: d,
            field,
            c_const: 1.0 / (4.0 * m_alpha as f64 + 16.0 * m_2alpha as f64),
            killing_factor,
            eta: h0_check[(0, 0)].re,
            h0_check,
            nbar1,
            nbar2,
            weyl,
            form,
            basis,
        }
    }

    pub fn h0_check(&self) -> Mat {
        self.h0_check
    }

    /// Ȟ₀ entry acting on the reference vector e₀.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Real basis of 𝔤 used for random sampling and the Killing form.
    pub fn algebra_basis(&self) -> &[Mat] {
        &self.basis
    }

    /// Orthonormal bases of 𝔤_{-α₀} and 𝔤_{-2α₀}.
    pub fn nbar_basis(&self) -> (&[Mat], &[Mat]) {
        (&self.nbar1, &self.nbar2)
    }

    pub fn hermitian_form(&self) -> Option<Mat> {
        self.form
    }

    /// ⟨X, Y⟩ = −B(X, θY) with θY = −Y*.
    pub fn inner(&self, x: &Mat, y: &Mat) -> f64 {
        self.killing_factor * (x * y.adjoint()).trace().re
    }

    pub fn killing(&self, x: &Mat, y: &Mat) -> f64 {
        self.killing_factor * (x * y).trace().re
    }

    pub fn identity(&self) -> Mat {
        Mat::identity()
    }

    /// exp(u Ȟ₀).
    pub fn exp_a(&self, u: f64) -> Mat {
        let d = self.h0_check.diagonal();
        diag(C64::new((u * d[0].re).exp(), 0.0), C64::new((u * d[1].re).exp(), 0.0), C64::new((u * d[2].re).exp(), 0.0))
    }

    pub fn weyl_element(&self) -> Mat {
        self.weyl
    }

    /// Deviation from membership in G: determinant and, for SU(2,1), the form.
    pub fn membership_residual(&self, g: &Mat) -> f64 {
        let mut r = (g.determinant() - ONE).norm();
        if self.matrix_dim == 2 {
            r += g[(2, 2)].sub(ONE).norm() + g[(0, 2)].norm() + g[(1, 2)].norm() + g[(2, 0)].norm() + g[(2, 1)].norm();
        }
        if self.field == Field::Real {
            r += g.iter().map(|z| z.im.abs()).sum::<f64>();
        }
        if let Some(j) = self.form {
            r += (g.adjoint() * j * g - j).norm();
        }
        r
    }

    fn qr(&self, g: &Mat) -> Result<(Mat, Mat)> {
        qr_block(g, self.matrix_dim)
    }

    /// g = k · exp(u Ȟ₀) · n.
    pub fn iwasawa_kan(&self, g: &Mat) -> Result<(Mat, f64, Mat)> {
        let (q, r) = self.qr(g)?;
        let u = r[(0, 0)].re.ln() / self.eta;
        let a_inv = self.exp_a(-u);
        Ok((q, u, a_inv * r))
    }

    /// u-coordinate of H(g), computed from the norm of g e₀.
    pub fn h_kan(&self, g: &Mat) -> f64 {
        g.column(0).norm().ln() / self.eta
    }

    /// g = exp(u Ȟ₀) · n̄ · k.
    pub fn decompose_ank(&self, g: &Mat) -> Result<(f64, Mat, Mat)> {
        let (q, r) = self.qr(&g.adjoint())?;
        let l = r.adjoint();
        let u = l[(0, 0)].re.ln() / self.eta;
        let nbar = self.exp_a(-u) * l;
        Ok((u, nbar, q.adjoint()))
    }

    /// g = n · exp(u Ȟ₀) · k.
    pub fn decompose_nak(&self, g: &Mat) -> Result<(Mat, f64, Mat)> {
        let gi = inv(g);
        let (k, u, n) = self.iwasawa_kan(&gi)?;
        Ok((inv(&n), -u, k.adjoint()))
    }

    /// n̄ ∈ N̄ with gP = n̄P.
    pub fn bruhat_nbar(&self, g: &Mat) -> Result<Mat> {
        let d = self.matrix_dim;
        let col = g.column(0).norm();
        let minor = g[(0, 0)].norm() / col;
        if minor < 1e-8 {
            return Err(Error::BruhatCell { minor });
        }
        // Doolittle LU without pivoting on the d×d block.
        let mut l = Mat::identity();
        let mut u = Mat::zeros();
        for i in 0..d {
            for k in i..d {
                let s: C64 = (0..i).map(|j| l[(i, j)] * u[(j, k)]).sum();
                u[(i, k)] = g[(i, k)] - s;
            }
            if u[(i, i)].norm() < 1e-14 * g.norm() {
                return Err(Error::BruhatCell { minor: u[(i, i)].norm() });
            }
            for k in i + 1..d {
                let s: C64 = (0..i).map(|j| l[(k, j)] * u[(j, i)]).sum();
                l[(k, i)] = (g[(k, i)] - s) / u[(i, i)];
            }
        }
        Ok(l)
    }

    /// Lie algebra element U₁ + U₂ of 𝔫̄.
    pub fn nbar_algebra(&self, c: &NbarCoordinates) -> Mat {
        let mut x = Mat::zeros();
        for (u, b) in c.u1.iter().zip(&self.nbar1) {
            x += b * C64::new(*u, 0.0);
        }
        for (u, b) in c.u2.iter().zip(&self.nbar2) {
            x += b * C64::new(*u, 0.0);
        }
        x
    }

    pub fn nbar_exp(&self, c: &NbarCoordinates) -> Mat {
        let x = self.nbar_algebra(c);
        Mat::identity() + x + x * x * C64::new(0.5, 0.0)
    }

    pub fn nbar_log(&self, g: &Mat) -> Result<NbarCoordinates> {
        let n = g - Mat::identity();
        let mut upper = 0.0;
        for i in 0..3 {
            for j in i..3 {
                upper += n[(i, j)].norm();
            }
        }
        let scale = 1.0 + g.norm();
        if upper > 1e-9 * scale {
            return Err(Error::NotInNbar { residual: upper });
        }
        let x = n - n * n * C64::new(0.5, 0.0);
        let c = NbarCoordinates {
            u1: self.nbar1.iter().map(|b| self.inner(&x, b)).collect(),
            u2: self.nbar2.iter().map(|b| self.inner(&x, b)).collect(),
        };
        let residual = (self.nbar_algebra(&c) - x).norm();
        if residual > 1e-9 * scale {
            return Err(Error::NotInNbar { residual });
        }
        Ok(c)
    }

    /// 𝒩(n̄) = [(1 + c‖U₁‖²)² + 4c‖U₂‖²]^{1/2}.
    pub fn script_n(&self, c: &NbarCoordinates) -> f64 {
        let a = 1.0 + self.c_const * c.norm1_sq();
        (a * a + 4.0 * self.c_const * c.norm2().powi(2)).sqrt()
    }

    /// 𝒬(n̄) = 2 + 2c‖U₁‖².
    pub fn script_q(&self, c: &NbarCoordinates) -> f64 {
        2.0 + 2.0 * self.c_const * c.norm1_sq()
    }

    pub fn angle_bracket(&self, c: &NbarCoordinates) -> f64 {
        c.angle_bracket()
    }

    /// exp of a Lie algebra element.
    pub fn exp(&self, x: &Mat) -> Mat {
        x.exp()
    }

    pub fn random_algebra<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Mat {
        let mut x = Mat::zeros();
        for b in &self.basis {
            let c: f64 = StandardNormal.sample(rng);
            x += b * C64::new(scale * c, 0.0);
        }
        x
    }

    /// exp of a Gaussian Lie algebra element with unit variance per basis coefficient.
    pub fn random_group<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat {
        self.random_algebra(rng, 1.0).exp()
    }

    pub fn random_group_scaled<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Mat {
        self.random_algebra(rng, scale).exp()
    }

    pub fn random_k<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat {
        let g = self.random_group(rng);
        self.iwasawa_kan(&g).expect("random elements decompose").0
    }

    pub fn random_m<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat {
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let z = C64::from_polar(1.0, phi);
        match self.name {
            ModelName::H2R => {
                if rng.random_bool(0.5) {
                    Mat::identity()
                } else {
                    diag(-ONE, -ONE, ONE)
                }
            }
            ModelName::H3R => diag(z, z.conj(), ONE),
            ModelName::H2C => diag(z, z.conj() * z.conj(), z),
        }
    }

    pub fn random_nbar_coords<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> NbarCoordinates {
        let mut g = || -> f64 {
            let z: f64 = StandardNormal.sample(&mut *rng);
            scale * z
        };
        NbarCoordinates { u1: (0..self.m_alpha).map(|_| g()).collect(), u2: (0..self.m_2alpha).map(|_| g()).collect() }
    }

    /// Distance from the lower unipotent form; zero for elements of N̄.
    pub fn is_nbar(&self, g: &Mat) -> bool {
        self.nbar_log(g).is_ok()
    }
}

trait SubOne {
    fn sub(self, o: C64) -> C64;
}
impl SubOne for C64 {
    fn sub(self, o: C64) -> C64 {
        self - o
    }
}

/// QR of the leading d×d block with positive real diagonal in R (Gram-Schmidt, reorthogonalized).
pub fn qr_block(g: &Mat, d: usize) -> Result<(Mat, Mat)> {
    let mut q = Mat::identity();
    let mut r = Mat::identity();
    let scale = g.norm();
    for j in 0..d {
        let mut v: Vec3 = g.column(j).into();
        for _ in 0..2 {
            for i in 0..j {
                let qi: Vec3 = q.column(i).into();
                let c = qi.dotc(&v);
                r[(i, j)] += c;
                v -= qi * c;
            }
        }
        let nrm = v.norm();
        if nrm <= 1e-300 || nrm < 1e-15 * scale {
            return Err(Error::SingularMatrix);
        }
        r[(j, j)] = C64::new(nrm, 0.0);
        q.set_column(j, &(v / C64::new(nrm, 0.0)));
    }
    if d == 2 {
        for (i, j) in [(0, 2), (1, 2), (2, 0), (2, 1)] {
            q[(i, j)] = ZERO;
            r[(i, j)] = ZERO;
        }
    }
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn killing_oracle_sl2r() {
        // Independent route: B(X,Y) = 4 tr(XY) on sl(2,R); α₀(diag(a,-a)) = 2a.
        // H_α = diag(1/4,-1/4) so ‖α₀‖² = α₀(H_α) = 1/2.
        let m = RankOneModel::build(ModelName::H2R);
        assert!((m.killing_factor - 4.0).abs() < 1e-12);
        assert!((m.alpha_norm - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn killing_factors_match_dual_coxeter_formulas() {
        // sl(2,C) as a real algebra: 2·Re(4 tr); su(2,1): 6 tr.
        let m = RankOneModel::build(ModelName::H3R);
        assert!((m.killing_factor - 8.0).abs() < 1e-11);
        assert!((m.alpha_norm - 0.5).abs() < 1e-12);
        let m = RankOneModel::build(ModelName::H2C);
        assert!((m.killing_factor - 6.0).abs() < 1e-11);
        assert!((m.alpha_norm - (1.0f64 / 12.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn killing_form_is_trace_form_on_whole_basis() {
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let kill = killing_matrix(m.algebra_basis(), m.matrix_dim);
            for (i, x) in m.algebra_basis().iter().enumerate() {
                for (j, y) in m.algebra_basis().iter().enumerate() {
                    assert!((kill[(i, j)] - m.killing(x, y)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn model_constants() {
        let m = RankOneModel::build(ModelName::H2R);
        assert_eq!((m.m_alpha, m.m_2alpha, m.n), (1, 0, 2));
        assert_eq!(m.rho_check, 0.5);
        assert_eq!(m.c_const, 0.25);
        let m = RankOneModel::build(ModelName::H2C);
        assert_eq!((m.m_alpha, m.m_2alpha, m.n), (2, 1, 4));
        assert_eq!(m.rho_check, 2.0);
        assert!((m.c_const - 1.0 / 24.0).abs() < 1e-16);
        let m = RankOneModel::build(ModelName::H3R);
        assert_eq!((m.m_alpha, m.m_2alpha, m.n), (2, 0, 3));
    }

    #[test]
    fn root_space_gradings() {
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let (b1, b2) = m.nbar_basis();
            for x in b1 {
                let el = LieAlgebraElement { mat: *x, grading: Grading::NMinusAlpha };
                assert!(el.grading_residual(&m) < 1e-12);
                let th = LieAlgebraElement { mat: -x.adjoint(), grading: Grading::NPlusAlpha };
                assert!(th.grading_residual(&m) < 1e-12);
                assert!((m.inner(x, x) - 1.0).abs() < 1e-12);
            }
            for x in b2 {
                let el = LieAlgebraElement { mat: *x, grading: Grading::NMinus2Alpha };
                assert!(el.grading_residual(&m) < 1e-12);
            }
            let a = LieAlgebraElement { mat: m.h0_check(), grading: Grading::A };
            assert!(a.grading_residual(&m) < 1e-14);
        }
    }

    #[test]
    fn identity_decompositions() {
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let (k, u, n) = m.iwasawa_kan(&Mat::identity()).unwrap();
            assert!((k - Mat::identity()).norm() < 1e-14 && u.abs() < 1e-14);
            assert!((n - Mat::identity()).norm() < 1e-14);
            let (u, nb, k) = m.decompose_ank(&Mat::identity()).unwrap();
            assert!(u.abs() < 1e-14 && (nb - Mat::identity()).norm() < 1e-14);
            assert!((k - Mat::identity()).norm() < 1e-14);
        }
    }

    #[test]
    fn kan_of_a_and_k() {
        let mut r = rng();
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            for t in [-2.0, 0.3, 1.7] {
                let (_, u, _) = m.iwasawa_kan(&m.exp_a(t)).unwrap();
                assert!((u - t).abs() < 1e-12);
            }
            let k = m.random_k(&mut r);
            assert!(m.iwasawa_kan(&k).unwrap().1.abs() < 1e-9);
        }
    }

    #[test]
    fn nbar_in_nbar_decomposes_trivially() {
        let mut r = rng();
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let c = m.random_nbar_coords(&mut r, 1.0);
            let nb = m.nbar_exp(&c);
            let (u, nb2, k) = m.decompose_ank(&nb).unwrap();
            assert!(u.abs() < 1e-12);
            assert!((nb2 - nb).norm() < 1e-12 && (k - Mat::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn h2r_nbar_exp_closed_form() {
        // Killing-unit vector of 𝔤_{-α} is E₁₀/2, so exp(t·Y) = [[1,0],[t/2,1]].
        let m = RankOneModel::build(ModelName::H2R);
        let g = m.nbar_exp(&NbarCoordinates { u1: vec![3.0], u2: vec![] });
        let want = Mat::identity() + e(1, 0) * C64::new(1.5, 0.0);
        assert!((g - want).norm() < 1e-15);
    }

    #[test]
    fn heisenberg_noncommutative() {
        let m = RankOneModel::build(ModelName::H2C);
        let a = NbarCoordinates { u1: vec![1.0, 0.0], u2: vec![0.0] };
        let b = NbarCoordinates { u1: vec![0.0, 1.0], u2: vec![0.0] };
        let sum = NbarCoordinates { u1: vec![1.0, 1.0], u2: vec![0.0] };
        let prod = m.nbar_exp(&a) * m.nbar_exp(&b);
        assert!((prod - m.nbar_exp(&sum)).norm() > 1e-3);
        assert!(m.is_nbar(&prod));
    }

    #[test]
    fn bruhat_examples() {
        let mut r = rng();
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let nb = m.nbar_exp(&m.random_nbar_coords(&mut r, 1.0));
            assert!((m.bruhat_nbar(&nb).unwrap() - nb).norm() < 1e-12);
            let p = m.random_m(&mut r) * m.exp_a(0.7) * m.decompose_nak(&m.random_group(&mut r)).unwrap().0;
            assert!((m.bruhat_nbar(&p).unwrap() - Mat::identity()).norm() < 1e-10);
            assert!(matches!(m.bruhat_nbar(&m.weyl_element()), Err(Error::BruhatCell { .. })));
        }
    }

    #[test]
    fn weyl_inverts_a() {
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let w = m.weyl_element();
            assert!(m.membership_residual(&w) < 1e-14);
            assert!((w * w.adjoint() - Mat::identity()).norm() < 1e-14);
            let t = 0.9;
            let lhs = w * m.exp_a(t) * inv(&w) * m.exp_a(t);
            assert!((lhs - Mat::identity()).norm() < 1e-12);
            let (b1, _) = m.nbar_basis();
            let y = w * b1[0] * inv(&w);
            let el = LieAlgebraElement { mat: y, grading: Grading::NPlusAlpha };
            assert!(el.grading_residual(&m) < 1e-12);
        }
    }

    #[test]
    fn nbar_log_rejects_non_nbar() {
        let m = RankOneModel::build(ModelName::H2C);
        assert!(matches!(m.nbar_log(&m.exp_a(0.5)), Err(Error::NotInNbar { .. })));
    }
}
