use num_complex::Complex64 as C64;
use rand::Rng;
use rankone::regularize::*;
use rankone::NbarCoordinates;

use super::{worst, Job};
use crate::report::CheckRecord;

const MAX_ELL: u32 = 5;
const DEGREE_ELL: u32 = 8;

pub fn jobs() -> Vec<Job> {
    vec![
        Job::new("regularization.recursion", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let vs = v_sequence(m, MAX_ELL);
            let mut per_ell = vec![Vec::new(); MAX_ELL as usize];
            for _ in 0..s.sampling.regularization_points {
                let c = m.random_nbar_coords(rng, 1.5);
                let lam = C64::new(rng.random_range(-1.0..2.0), rng.random_range(-3.0..3.0));
                for ell in 1..=MAX_ELL {
                    let r = recursion_residual(m, &vs[ell as usize - 1], &vs[ell as usize], ell, lam, &c);
                    per_ell[ell as usize - 1].push(r);
                }
            }
            per_ell
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    CheckRecord::below(
                        format!("regularization.recursion.ell{}", i + 1),
                        "(L* - beta_l)(V_{l-1} N^{-(2rho+lambda)}) = V_l N^{-(2rho+lambda)}",
                        worst(r),
                        s.tolerances.recursion,
                    )
                })
                .collect()
        }),
        Job::new("regularization.symbolic", |ctx, _| {
            let m = &ctx.model;
            let vs = v_sequence(m, DEGREE_ELL);
            // V₁ = −(2ρ̌+λ̌)q.
            let expected = QSPolynomial::monomial(1, 0, LambdaPoly::linear(-2.0 * m.rho_check, -1.0));
            let diff = vs[1].add(&expected.mul_lambda(&LambdaPoly::constant(-1.0)));
            let v1 = worst(diff.terms.values().flat_map(|p| p.0.iter().map(|c| c.norm())));
            let window = worst(vs.iter().enumerate().flat_map(|(ell, p)| {
                p.terms.keys().map(move |(a, b)| {
                    let w = (a + 2 * b) as f64;
                    (ell as f64 - w).max(w - 2.0 * ell as f64).max(0.0)
                })
            }));
            let roots = worst((1..=DEGREE_ELL).map(|ell| {
                let root = C64::new(-m.rho_check - (ell as f64 - 1.0), 0.0);
                beta(m, ell, root).norm() + beta_poly(m, ell).eval(root).norm()
            }));
            vec![
                CheckRecord::at_most("regularization.v1_symbolic", "V_1 = -(2rho + lambda) q", v1, 0.0),
                CheckRecord::at_most(
                    "regularization.weighted_degree",
                    "every term of V_l has weighted degree l <= a + 2b <= 2l",
                    window,
                    0.0,
                ),
                CheckRecord::at_most("regularization.beta_roots", "beta_l vanishes at -rho - (l - 1)", roots, 0.0),
            ]
        }),
        Job::new("regularization.euler", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let lam = C64::new(0.0, 0.0);
            let mut mono = Vec::new();
            let mut field = Vec::new();
            for a in 0..=4u32 {
                for b in 0..=(4 - a) {
                    let p = QSPolynomial::monomial(a, b, LambdaPoly::constant(1.0));
                    let lp = l_symbolic(&p);
                    for _ in 0..s.sampling.regularization_points / 5 {
                        let c = m.random_nbar_coords(rng, 1.5);
                        let num = l_numeric_c(|x: &NbarCoordinates| evaluate_qs(m, &p, x, lam), &c, 1e-3);
                        let sym = evaluate_qs(m, &lp, &c, lam);
                        mono.push((num - sym).norm() / (1.0 + sym.norm()));
                    }
                }
            }
            for _ in 0..s.sampling.regularization_points {
                let c = m.random_nbar_coords(rng, 1.5);
                let lb = l_numeric(|x: &NbarCoordinates| x.angle_bracket(), &c, 1e-5);
                field.push((lb - 2.0 * c.angle_bracket()).abs() / (1.0 + c.angle_bracket()));
                let (q, _) = qs_at(m, &c);
                let ln = l_numeric(|x: &NbarCoordinates| m.script_n(x), &c, 1e-5);
                field.push((ln / m.script_n(&c) + q - 2.0).abs());
            }
            vec![
                CheckRecord::below(
                    "regularization.l_symbolic",
                    "derivation rules for L on q and s",
                    worst(mono),
                    s.tolerances.symbolic_l,
                ),
                CheckRecord::below(
                    "regularization.euler_field",
                    "L<n> = 2<n> and LN/N = 2 - q",
                    worst(field),
                    s.tolerances.symbolic_l,
                ),
            ]
        }),
        Job::new("regularization.antidiagonal", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let res = worst((0..s.sampling.regularization_points).map(|_| {
                let c = m.random_nbar_coords(rng, 1.0);
                antidiagonal_normalization_residual(m, &c).unwrap_or(f64::NAN)
            }));
            vec![CheckRecord::below(
                "regularization.antidiagonal_normalization",
                "N(Omega(n)) in terms of N(n) near the antidiagonal",
                res,
                s.tolerances.symbolic_l,
            )]
        }),
    ]
}
