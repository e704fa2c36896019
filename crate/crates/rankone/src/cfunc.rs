//! The Harish-Chandra c-function c(z) = ∫_N̄ e^{−(ρ+z)H(n̄)} dn̄: direct integration,
//! Gamma-function closed form, the truncations c_ε and the continuation through 𝒱_K.
//!
//! Integrals over N̄ use r₁ = ‖U₁‖ = ρ cos θ, r₂ = ‖U₂‖ = ρ² sin θ, in which
//! 𝒩 = ρ²(A + By + y²)^{1/2} and 𝒬 = ρ²(B + 2y) with y = ρ⁻².

use crate::error::{Error, Result};
use crate::lie_core::RankOneModel;
use crate::quad::{adaptive, QuadResult, Tolerance};
use crate::regularize::{beta, v_sequence, QSPolynomial};
use crate::special::{ln_gamma, nonpositive_integer, rgamma, sphere_volume};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Integral,
    ClosedForm,
    Continued,
    Truncated,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CFunctionResult {
    pub value: C64,
    pub method: Method,
    pub estimated_error: f64,
}

/// η(t): 1 on [0, 1], 0 on [2, ∞), a degree-7 smoothstep in between.
pub fn cutoff(t: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else if t >= 2.0 {
        0.0
    } else {
        let x = t - 1.0;
        let x4 = x * x * x * x;
        1.0 - x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x)
    }
}

type Terms = Vec<(u32, u32, C64)>;

/// Evaluator of c-function type integrals for one model.
#[derive(Clone, Debug)]
pub struct CFunction<'a> {
    pub model: &'a RankOneModel,
    pub kappa: f64,
    pub tol: Tolerance,
}

impl<'a> CFunction<'a> {
    pub fn new(model: &'a RankOneModel) -> Result<Self> {
        let tol = Tolerance { abs: 1e-14, rel: 1e-11, max_intervals: 4000 };
        let mut cf = CFunction { model, kappa: 1.0, tol };
        let p = C64::new(2.0 * model.rho_check, 0.0);
        let raw = cf.integrate(&vec![(0, 0, C64::new(1.0, 0.0))], p, None)?;
        cf.kappa = model.vol_sphere / raw.value.re;
        Ok(cf)
    }

    fn rho_split(&self) -> f64 {
        (1000.0 / self.model.c_const).sqrt()
    }

    /// ∫_{ℝ^{m_α}×ℝ^{m_2α}} 𝒩^{−p} Σ coef·q^a s^b · χ dU in Lebesgue measure, where χ is
    /// η(ε²⟨n̄⟩) when `eps` is given and 1 otherwise.
    fn integrate(&self, terms: &Terms, p: C64, eps: Option<f64>) -> Result<QuadResult> {
        let m = self.model;
        let s_alpha = sphere_volume(m.m_alpha);
        if m.m_2alpha == 0 {
            let r = self.radial(0.0, terms, p, eps)?;
            return Ok(QuadResult { value: r.value * s_alpha, error: r.error * s_alpha, converged: true });
        }
        let pref = s_alpha * sphere_volume(m.m_2alpha);
        let failure = RefCell::new(None);
        let res = adaptive(
            |th| {
                let (c, s) = (th.cos(), th.sin());
                let w = c.powi(m.m_alpha as i32 - 1) * s.powi(m.m_2alpha as i32 - 1) * (c * c + 2.0 * s * s);
                match self.radial(th, terms, p, eps) {
                    Ok(r) => r.value * w,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        C64::new(0.0, 0.0)
                    }
                }
            },
            0.0,
            FRAC_PI_2,
            Tolerance { rel: 1e-10, ..self.tol },
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        if !res.converged {
            return Err(Error::Nonconvergent { error: res.error });
        }
        Ok(QuadResult { value: res.value * pref, error: res.error * pref, converged: true })
    }

    /// Radial integral at fixed θ including the measure factor ρ^{2ρ̌−1}.
    fn radial(&self, theta: f64, terms: &Terms, p: C64, eps: Option<f64>) -> Result<QuadResult> {
        let m = self.model;
        let cc = m.c_const;
        let qdim = 2.0 * m.rho_check;
        let (ct, st) = (theta.cos(), theta.sin());
        let integrand = |r: f64| -> C64 {
            if r == 0.0 {
                return if qdim > 1.0 { C64::new(0.0, 0.0) } else { eval_terms(terms, 2.0, 1.0, p, 1.0) };
            }
            let r2 = r * r;
            let big_q = 2.0 + 2.0 * cc * r2 * ct * ct;
            let x = 1.0 + cc * r2 * ct * ct;
            let big_n = (x * x + 4.0 * cc * r2 * r2 * st * st).sqrt();
            let chi = match eps {
                Some(e) => cutoff(e * e * r2 * (ct * ct + st)),
                None => 1.0,
            };
            if chi == 0.0 {
                return C64::new(0.0, 0.0);
            }
            eval_terms(terms, big_q, big_n, p, r.powf(qdim - 1.0) * chi)
        };
        let mut total = C64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut run = |a: f64, b: f64, log: bool| -> Result<()> {
            let r = if log {
                adaptive(|s| integrand(s.exp()) * s.exp(), a.ln(), b.ln(), self.tol)
            } else {
                adaptive(integrand, a, b, self.tol)
            };
            if !r.converged {
                return Err(Error::Nonconvergent { error: r.error });
            }
            total += r.value;
            err += r.error;
            Ok(())
        };
        match eps {
            Some(e) => {
                let r1 = 1.0 / (e * (ct * ct + st).sqrt());
                let r2 = r1 * 2f64.sqrt();
                let mut cuts = vec![0.0];
                if r1 > 1.0 {
                    cuts.push(1.0);
                }
                cuts.push(r1);
                cuts.push(r2);
                for w in cuts.windows(2) {
                    run(w[0], w[1], w[0] >= 1.0)?;
                }
            }
            None => {
                let rs = self.rho_split();
                run(0.0, 1.0, false)?;
                run(1.0, rs, true)?;
                let a = cc * cc * ct.powi(4) + 4.0 * cc * st * st;
                let b = 2.0 * cc * ct * ct;
                for &(ta, tb, coef) in terms {
                    total += coef * tail(ta, tb, p, qdim, a, b, rs)?;
                }
            }
        }
        Ok(QuadResult { value: total, error: err, converged: true })
    }

    /// κ with dn̄ = κ·dU.
    pub fn haar_constant(&self) -> f64 {
        self.kappa
    }

    /// c(z) by quadrature of κ𝒩^{−(ρ̌+ž)}; requires Re ž > 10⁻³.
    pub fn c_integral(&self, z_check: C64) -> Result<CFunctionResult> {
        if z_check.re <= 1e-3 {
            return Err(Error::Divergent(format!("Re(z) = {} is not positive", z_check.re)));
        }
        let r = self.integrate(&vec![(0, 0, C64::new(1.0, 0.0))], self.model.rho_check + z_check, None)?;
        Ok(CFunctionResult {
            value: r.value * self.kappa,
            method: Method::Integral,
            estimated_error: r.error * self.kappa,
        })
    }

    /// c_ε(λ) = κ∫𝒩^{−(2ρ̌+λ̌)} η(ε²⟨n̄⟩) dU.
    pub fn c_epsilon(&self, lambda_check: C64, eps: f64) -> Result<CFunctionResult> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidArgument(format!("eps = {eps} not in (0, 1]")));
        }
        let p = 2.0 * self.model.rho_check + lambda_check;
        let r = self.integrate(&vec![(0, 0, C64::new(1.0, 0.0))], p, Some(eps))?;
        Ok(CFunctionResult {
            value: r.value * self.kappa,
            method: Method::Truncated,
            estimated_error: r.error * self.kappa,
        })
    }

    /// κ∫𝒩^{−(2ρ̌+λ̌)} 𝒱 χ dU, untruncated when `eps` is `None`.
    pub fn weighted_integral(&self, v: &QSPolynomial, lambda_check: C64, eps: Option<f64>) -> Result<QuadResult> {
        let p = 2.0 * self.model.rho_check + lambda_check;
        let r = self.integrate(&v.specialize(lambda_check), p, eps)?;
        Ok(QuadResult { value: r.value * self.kappa, error: r.error * self.kappa, converged: true })
    }

    /// c(λ+ρ) = (−1)^K h_K(λ) / ∏_{ℓ=1}^K β_ℓ(λ) with h_K = ∫𝒩^{−(2ρ̌+λ̌)}𝒱_K dn̄.
    pub fn c_continued(&self, lambda_check: C64, k: u32) -> Result<CFunctionResult> {
        let m = self.model;
        let mut prod = C64::new(1.0, 0.0);
        for ell in 1..=k {
            let b = beta(m, ell, lambda_check);
            if b.norm() < 1e-8 {
                return Err(Error::Pole { location: format!("{lambda_check}") });
            }
            prod *= b;
        }
        if (m.rho_check + lambda_check.re) + k as f64 <= 1e-3 {
            return Err(Error::Divergent(format!("K = {k} is below the integrability threshold")));
        }
        let v = v_sequence(m, k).pop().expect("non-empty");
        let h = self.weighted_integral(&v, lambda_check, None)?;
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(CFunctionResult {
            value: h.value * sign / prod,
            method: Method::Continued,
            estimated_error: h.error / prod.norm(),
        })
    }

    /// (ε∂_ε − β₁)c_ε by a five-point stencil in ln ε, and κ∫𝒱₁𝒩^{−(2ρ̌+λ̌)}χ_ε.
    pub fn epsilon_ode_sides(&self, lambda_check: C64, eps: f64, h: f64) -> Result<(C64, C64)> {
        let at = |t: f64| self.c_epsilon(lambda_check, eps * t.exp()).map(|r| r.value);
        let d = (at(-2.0 * h)? - 8.0 * at(-h)? + 8.0 * at(h)? - at(2.0 * h)?) / (12.0 * h);
        let lhs = d - beta(self.model, 1, lambda_check) * at(0.0)?;
        let v1 = v_sequence(self.model, 1).pop().expect("non-empty");
        let rhs = self.weighted_integral(&v1, lambda_check, Some(eps))?.value;
        Ok((lhs, rhs))
    }

    /// c(λ+ρ) ≈ −(ε∂_ε − β₁)c_ε / β₁ at small ε, the ε-ODE route for K = 1.
    pub fn c_via_epsilon_ode(&self, lambda_check: C64, eps: f64) -> Result<C64> {
        let (lhs, _) = self.epsilon_ode_sides(lambda_check, eps, 1e-2)?;
        Ok(-lhs / beta(self.model, 1, lambda_check))
    }
}

fn eval_terms(terms: &Terms, big_q: f64, big_n: f64, p: C64, weight: f64) -> C64 {
    let s = 1.0 / (big_n * big_n);
    let q = big_q * s;
    let mut acc = C64::new(0.0, 0.0);
    for &(a, b, coef) in terms {
        acc += coef * q.powi(a as i32) * s.powi(b as i32);
    }
    acc * (-p * big_n.ln()).exp() * weight
}

/// ∫_{ρ_S}^∞ 𝒬^a 𝒩^{−(2a+2b+p)} ρ^{Q−1} dρ from the expansion in y = ρ⁻².
fn tail(a: u32, b: u32, p: C64, qdim: f64, big_a: f64, big_b: f64, rs: f64) -> Result<C64> {
    let pp = p + 2.0 * (a + b) as f64;
    let gamma = -pp / 2.0;
    let e = C64::new(2.0 * a as f64 + qdim - 1.0, 0.0) - 2.0 * pp;
    const NT: usize = 14;
    // (A + By + y²)^γ
    let mut g = vec![C64::new(0.0, 0.0); NT];
    g[0] = (gamma * big_a.ln()).exp();
    for k in 0..NT - 1 {
        let kf = k as f64;
        let prev = if k > 0 { g[k - 1] } else { C64::new(0.0, 0.0) };
        g[k + 1] = ((gamma - kf) * big_b * g[k] + (2.0 * gamma - kf + 1.0) * prev) / ((kf + 1.0) * big_a);
    }
    // multiply by (B + 2y)^a
    for _ in 0..a {
        let mut h = vec![C64::new(0.0, 0.0); NT];
        for k in 0..NT {
            h[k] = big_b * g[k] + if k > 0 { 2.0 * g[k - 1] } else { C64::new(0.0, 0.0) };
        }
        g = h;
    }
    let lr = rs.ln();
    let mut acc = C64::new(0.0, 0.0);
    for (k, d) in g.iter().enumerate() {
        let ex = e - 2.0 * k as f64 + 1.0;
        if ex.re >= -1e-9 {
            return Err(Error::Divergent(format!("tail exponent {ex}")));
        }
        acc += -d * (ex * lr).exp() / ex;
    }
    Ok(acc)
}

/// c₀ 2^{−λ}Γ(λ) / [Γ(½(½m_α + 1 + λ)) Γ(½(½m_α + m_2α + λ))] at λ = ž.
pub fn c_closed_form(model: &RankOneModel, z_check: C64) -> Result<CFunctionResult> {
    let ma = model.m_alpha as f64;
    let m2 = model.m_2alpha as f64;
    let n = model.n as f64;
    let c0 = PI.powf(n / 2.0)
        * 2f64.powf(1.0 + ma / 2.0 + m2)
        * (ln_gamma(C64::new((ma + m2 + 1.0) / 2.0, 0.0)) - ln_gamma(C64::new(n / 2.0, 0.0))).exp().re;
    let eval = |l: C64| -> C64 {
        let g = (ln_gamma(l) - l * 2f64.ln()).exp();
        g * rgamma((0.5 * ma + 1.0 + l) / 2.0) * rgamma((0.5 * ma + m2 + l) / 2.0) * c0
    };
    if nonpositive_integer(z_check, 1e-8).is_some() {
        let l = C64::new(z_check.re.round(), 0.0);
        let cancelled = nonpositive_integer((0.5 * ma + 1.0 + l) / 2.0, 1e-12).is_some()
            || nonpositive_integer((0.5 * ma + m2 + l) / 2.0, 1e-12).is_some();
        if !cancelled {
            return Err(Error::Pole { location: format!("{z_check}") });
        }
        let d = C64::new(0.0, 1e-5);
        let v = 0.5 * (eval(z_check + d) + eval(z_check - d));
        return Ok(CFunctionResult { value: v, method: Method::ClosedForm, estimated_error: 1e-10 * v.norm() });
    }
    let v = eval(z_check);
    Ok(CFunctionResult { value: v, method: Method::ClosedForm, estimated_error: 1e-13 * v.norm() })
}

/// Smallest K with Re ž + K ≥ ½, where ž = ρ̌ + λ̌.
pub fn default_order(model: &RankOneModel, lambda_check: C64) -> u32 {
    let z = model.rho_check + lambda_check.re;
    (0.5 - z).ceil().max(1.0) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::ModelName;

    #[test]
    fn cutoff_profile() {
        assert_eq!(cutoff(0.5), 1.0);
        assert_eq!(cutoff(2.5), 0.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-14);
        let d = |t: f64| (cutoff(t + 1e-6) - cutoff(t - 1e-6)) / 2e-6;
        assert!(d(1.0).abs() < 1e-9 && d(2.0).abs() < 1e-9);
    }

    #[test]
    fn h2r_kappa_is_one() {
        let m = RankOneModel::build(ModelName::H2R);
        let cf = CFunction::new(&m).unwrap();
        assert!((cf.kappa - 1.0).abs() < 1e-10, "{}", cf.kappa);
    }

    #[test]
    fn h2r_closed_form_against_beta_integral() {
        // ∫(1 + u²/4)^{−(1/2+z)} du = 2√π Γ(z)/Γ(z + 1/2)
        let m = RankOneModel::build(ModelName::H2R);
        for z in [C64::new(0.7, 0.0), C64::new(1.3, -2.0)] {
            let exact = 2.0 * PI.sqrt() * (ln_gamma(z) - ln_gamma(z + 0.5)).exp();
            let cf = c_closed_form(&m, z).unwrap().value;
            assert!((cf - exact).norm() < 1e-12 * exact.norm());
        }
    }

    #[test]
    fn closed_form_poles() {
        let m = RankOneModel::build(ModelName::H2R);
        assert!(matches!(c_closed_form(&m, C64::new(-1.0, 0.0)), Err(Error::Pole { .. })));
        let h3 = RankOneModel::build(ModelName::H3R);
        // Γ(λ) at λ = −1 is cancelled by 1/Γ(½(1 + λ)).
        assert!(c_closed_form(&h3, C64::new(-1.0, 0.0)).is_ok());
    }

    #[test]
    fn default_order_threshold() {
        let m = RankOneModel::build(ModelName::H2C);
        assert_eq!(default_order(&m, C64::new(-2.0 - 1.8, 0.0)), 3);
        assert_eq!(default_order(&m, C64::new(-2.3, 0.0)), 1);
    }
}
