//! The Euler operator L on N̄ and the regularizing recursion for 𝒱_ℓ and β_ℓ.
//!
//! 𝒱_ℓ are polynomials in q = 𝒬/𝒩² and s = 1/𝒩² whose coefficients are
//! polynomials in λ̌. L acts on this algebra by the derivation
//! L q = 2q² − 2q − 4s, L s = −4s + 2qs.

use crate::geomtransform::omega;
use crate::lie_core::{NbarCoordinates, RankOneModel};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::fmt;

/// Polynomial in λ̌, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LambdaPoly(pub Vec<C64>);

impl LambdaPoly {
    pub fn constant(c: f64) -> Self {
        LambdaPoly(vec![C64::new(c, 0.0)]).trimmed()
    }

    /// a + b·λ̌.
    pub fn linear(a: f64, b: f64) -> Self {
        LambdaPoly(vec![C64::new(a, 0.0), C64::new(b, 0.0)]).trimmed()
    }

    pub fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.0.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    pub fn add(&self, o: &LambdaPoly) -> LambdaPoly {
        let n = self.0.len().max(o.0.len());
        let z = C64::new(0.0, 0.0);
        LambdaPoly((0..n).map(|i| *self.0.get(i).unwrap_or(&z) + *o.0.get(i).unwrap_or(&z)).collect()).trimmed()
    }

    pub fn mul(&self, o: &LambdaPoly) -> LambdaPoly {
        if self.is_zero() || o.is_zero() {
            return LambdaPoly::default();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LambdaPoly(out).trimmed()
    }

    pub fn scale(&self, s: f64) -> LambdaPoly {
        LambdaPoly(self.0.iter().map(|c| c * s).collect()).trimmed()
    }
}

/// Σ p_{a,b}(λ̌) q^a s^b.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct QSPolynomial {
    pub terms: BTreeMap<(u32, u32), LambdaPoly>,
}

impl QSPolynomial {
    pub fn one() -> Self {
        Self::monomial(0, 0, LambdaPoly::constant(1.0))
    }

    pub fn monomial(a: u32, b: u32, coef: LambdaPoly) -> Self {
        let mut p = QSPolynomial::default();
        p.add_term(a, b, &coef);
        p
    }

    pub fn add_term(&mut self, a: u32, b: u32, coef: &LambdaPoly) {
        let entry = self.terms.entry((a, b)).or_default();
        *entry = entry.add(coef);
        if entry.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn add(&self, o: &QSPolynomial) -> QSPolynomial {
        let mut out = self.clone();
        for ((a, b), c) in &o.terms {
            out.add_term(*a, *b, c);
        }
        out
    }

    pub fn mul_lambda(&self, p: &LambdaPoly) -> QSPolynomial {
        let mut out = QSPolynomial::default();
        for ((a, b), c) in &self.terms {
            out.add_term(*a, *b, &c.mul(p));
        }
        out
    }

    pub fn mul_q(&self) -> QSPolynomial {
        let mut out = QSPolynomial::default();
        for ((a, b), c) in &self.terms {
            out.add_term(a + 1, *b, c);
        }
        out
    }

    /// Smallest weighted degree a + 2b among the terms.
    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + 2 * b).min()
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + 2 * b).max()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient polynomials evaluated at λ̌.
    pub fn specialize(&self, lambda_check: C64) -> Vec<(u32, u32, C64)> {
        self.terms.iter().map(|((a, b), c)| (*a, *b, c.eval(lambda_check))).collect()
    }

    pub fn eval_qs(&self, q: f64, s: f64, lambda_check: C64) -> C64 {
        self.terms.iter().map(|((a, b), c)| c.eval(lambda_check) * q.powi(*a as i32) * s.powi(*b as i32)).sum()
    }
}

impl fmt::Display for QSPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for ((a, b), c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            f.write_str("(")?;
            let mut inner = true;
            for (k, z) in c.0.iter().enumerate() {
                if *z == C64::new(0.0, 0.0) {
                    continue;
                }
                if !inner {
                    f.write_str(" + ")?;
                }
                inner = false;
                let num = if z.im == 0.0 { format!("{}", z.re) } else { format!("({z})") };
                match k {
                    0 => write!(f, "{num}")?,
                    1 => write!(f, "{num}·λ")?,
                    _ => write!(f, "{num}·λ^{k}")?,
                }
            }
            f.write_str(")")?;
            match a {
                0 => {}
                1 => f.write_str("·q")?,
                _ => write!(f, "·q^{a}")?,
            }
            match b {
                0 => {}
                1 => f.write_str("·s")?,
                _ => write!(f, "·s^{b}")?,
            }
        }
        Ok(())
    }
}

/// β_ℓ(λ) = 2(ρ̌ + λ̌ + ℓ − 1).
pub fn beta(model: &RankOneModel, ell: u32, lambda_check: C64) -> C64 {
    2.0 * (model.rho_check + lambda_check + (ell as f64 - 1.0))
}

pub fn beta_poly(model: &RankOneModel, ell: u32) -> LambdaPoly {
    LambdaPoly::linear(2.0 * (model.rho_check + ell as f64 - 1.0), 2.0)
}

/// L applied to a polynomial in (q, s) via the derivation rules and Leibniz.
pub fn l_symbolic(p: &QSPolynomial) -> QSPolynomial {
    let mut out = QSPolynomial::default();
    for ((a, b), c) in &p.terms {
        let (a, b) = (*a, *b);
        if a > 0 {
            let af = a as f64;
            out.add_term(a + 1, b, &c.scale(2.0 * af));
            out.add_term(a, b, &c.scale(-2.0 * af));
            out.add_term(a - 1, b + 1, &c.scale(-4.0 * af));
        }
        if b > 0 {
            let bf = b as f64;
            out.add_term(a, b, &c.scale(-4.0 * bf));
            out.add_term(a + 1, b, &c.scale(2.0 * bf));
        }
    }
    out
}

/// Lf(n̄) = d/dτ|₀ f(e^τU₁, e^{2τ}U₂), by central differences.
pub fn l_numeric<F: Fn(&NbarCoordinates) -> f64>(f: F, c: &NbarCoordinates, h: f64) -> f64 {
    (f(&c.dilate(h)) - f(&c.dilate(-h))) / (2.0 * h)
}

/// Complex-valued variant of [`l_numeric`] with a fourth-order stencil.
pub fn l_numeric_c<F: Fn(&NbarCoordinates) -> C64>(f: F, c: &NbarCoordinates, h: f64) -> C64 {
    let d1 = f(&c.dilate(h)) - f(&c.dilate(-h));
    let d2 = f(&c.dilate(2.0 * h)) - f(&c.dilate(-2.0 * h));
    (d1 * 8.0 - d2) / (12.0 * h)
}

/// 𝒱_ℓ = [−L + (2ρ̌+λ̌)(2 − q) − 2ρ̌ − β_ℓ(λ)] 𝒱_{ℓ−1}.
pub fn v_next(model: &RankOneModel, v_prev: &QSPolynomial, ell: u32) -> QSPolynomial {
    let rho = model.rho_check;
    let p = LambdaPoly::linear(2.0 * rho, 1.0);
    let scalar = p.scale(2.0).add(&LambdaPoly::constant(-2.0 * rho)).add(&beta_poly(model, ell).scale(-1.0));
    let mut out = l_symbolic(v_prev).mul_lambda(&LambdaPoly::constant(-1.0));
    out = out.add(&v_prev.mul_lambda(&scalar));
    out = out.add(&v_prev.mul_q().mul_lambda(&p.scale(-1.0)));
    out
}

/// [𝒱₀, …, 𝒱_K].
pub fn v_sequence(model: &RankOneModel, k: u32) -> Vec<QSPolynomial> {
    let mut out = vec![QSPolynomial::one()];
    for ell in 1..=k {
        let next = v_next(model, &out[ell as usize - 1], ell);
        out.push(next);
    }
    out
}

/// q = 𝒬/𝒩², s = 1/𝒩² at an N̄ point.
pub fn qs_at(model: &RankOneModel, c: &NbarCoordinates) -> (f64, f64) {
    let n = model.script_n(c);
    (model.script_q(c) / (n * n), 1.0 / (n * n))
}

pub fn evaluate_qs(model: &RankOneModel, p: &QSPolynomial, c: &NbarCoordinates, lambda_check: C64) -> C64 {
    let (q, s) = qs_at(model, c);
    p.eval_qs(q, s, lambda_check)
}

/// Residual of (L* − β_ℓ)(𝒱_{ℓ−1}𝒩^{−(2ρ̌+λ̌)}) = 𝒱_ℓ𝒩^{−(2ρ̌+λ̌)}, relative to the weight,
/// with L* = −L − 2ρ̌ and L evaluated numerically.
pub fn recursion_residual(
    model: &RankOneModel,
    v_prev: &QSPolynomial,
    v: &QSPolynomial,
    ell: u32,
    lambda_check: C64,
    c: &NbarCoordinates,
) -> f64 {
    let p = 2.0 * model.rho_check + lambda_check;
    let f =
        |x: &NbarCoordinates| evaluate_qs(model, v_prev, x, lambda_check) * C64::new(model.script_n(x), 0.0).powc(-p);
    let lf = l_numeric_c(f, c, 1e-3);
    let lhs = -lf - (2.0 * model.rho_check + beta(model, ell, lambda_check)) * f(c);
    let rhs = evaluate_qs(model, v, c, lambda_check) * C64::new(model.script_n(c), 0.0).powc(-p);
    let scale = model.script_n(c).powf(-p.re) * (1.0 + rhs.norm() / model.script_n(c).powf(-p.re));
    (lhs - rhs).norm() / scale
}

/// 𝒩(Ω(n̄_Δ)) against 𝒩(n̄_Δ)/[c²‖V₁‖⁴ + 4c‖V₂‖²]^{1/2}; returns the relative mismatch.
pub fn antidiagonal_normalization_residual(model: &RankOneModel, c: &NbarCoordinates) -> crate::Result<f64> {
    let om = omega(model, &model.nbar_exp(c))?;
    let lhs = model.script_n(&model.nbar_log(&om)?);
    let cc = model.c_const;
    let denom = (cc * cc * c.norm1_sq().powi(2) + 4.0 * cc * c.norm2().powi(2)).sqrt();
    let rhs = model.script_n(c) / denom;
    Ok((lhs - rhs).abs() / rhs)
}

/// |𝒱_ℓ(Ω(n̄_Δ))| for n̄_Δ = δ-dilates of a fixed direction; used to read off the vanishing order.
pub fn antidiagonal_profile(
    model: &RankOneModel,
    v: &QSPolynomial,
    direction: &NbarCoordinates,
    lambda_check: C64,
    taus: &[f64],
) -> crate::Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for &tau in taus {
        let nd = direction.dilate(tau);
        let om = model.nbar_log(&omega(model, &model.nbar_exp(&nd))?)?;
        out.push((nd.angle_bracket(), evaluate_qs(model, v, &om, lambda_check).norm()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::ModelName;

    #[test]
    fn l_on_generators() {
        let q = QSPolynomial::monomial(1, 0, LambdaPoly::constant(1.0));
        let lq = l_symbolic(&q);
        assert_eq!(lq.terms.len(), 3);
        assert_eq!(lq.terms[&(2, 0)], LambdaPoly::constant(2.0));
        assert_eq!(lq.terms[&(1, 0)], LambdaPoly::constant(-2.0));
        assert_eq!(lq.terms[&(0, 1)], LambdaPoly::constant(-4.0));
        let s = QSPolynomial::monomial(0, 1, LambdaPoly::constant(1.0));
        let ls = l_symbolic(&s);
        assert_eq!(ls.terms[&(0, 1)], LambdaPoly::constant(-4.0));
        assert_eq!(ls.terms[&(1, 1)], LambdaPoly::constant(2.0));
        assert!(l_symbolic(&QSPolynomial::one()).is_zero());
    }

    #[test]
    fn v1_closed_form() {
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            let v = v_sequence(&m, 1);
            let want = QSPolynomial::monomial(1, 0, LambdaPoly::linear(-2.0 * m.rho_check, -1.0));
            assert_eq!(v[1], want);
        }
    }

    #[test]
    fn v1_vanishes_at_minus_two_rho() {
        let m = RankOneModel::build(ModelName::H2C);
        let v = v_sequence(&m, 1);
        let c = NbarCoordinates { u1: vec![0.3, -1.1], u2: vec![0.7] };
        assert_eq!(evaluate_qs(&m, &v[1], &c, C64::new(-4.0, 0.0)), C64::new(0.0, 0.0));
    }

    #[test]
    fn beta_values() {
        let m = RankOneModel::build(ModelName::H2R);
        assert_eq!(beta(&m, 1, C64::new(-0.5, 0.0)), C64::new(0.0, 0.0));
        assert_eq!(beta(&m, 3, C64::new(-2.5, 0.0)), C64::new(0.0, 0.0));
        assert_eq!(beta(&m, 1, C64::new(0.25, 1.0)), C64::new(1.5, 2.0));
    }

    #[test]
    fn weight_rises_by_one_per_step() {
        for name in ModelName::ALL {
            let m = RankOneModel::build(name);
            for (ell, v) in v_sequence(&m, 8).iter().enumerate() {
                assert!(v.min_weight().unwrap() >= ell as u32, "{name} ell={ell}: {v}");
                assert!(v.max_weight().unwrap() <= 2 * ell as u32);
            }
        }
    }

    #[test]
    fn display_is_readable() {
        let m = RankOneModel::build(ModelName::H2R);
        let v = v_sequence(&m, 1);
        assert_eq!(v[1].to_string(), "(-1 + -1·λ)·q");
    }
}
