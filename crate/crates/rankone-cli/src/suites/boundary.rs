use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rankone::boundary::*;
use rankone::lie_core::{inv, Mat};
use rankone::RankOneModel;

use super::{worst, Job};
use crate::report::CheckRecord;

fn n_plus(m: &RankOneModel, rng: &mut ChaCha8Rng) -> Mat {
    let nb = m.nbar_algebra(&m.random_nbar_coords(rng, 1.0));
    (-nb.adjoint()).exp()
}

fn test_function(m: &RankOneModel) -> BoundaryFunction {
    let a: Vec<f64> = (0..m.n).map(|i| 0.3 + 0.2 * i as f64).collect();
    let b: Vec<f64> = (0..m.n).map(|i| 0.5 - 0.3 * i as f64).collect();
    BoundaryFunction::exp_linear(m, a, b)
}

fn random_point(m: &RankOneModel, rng: &mut ChaCha8Rng) -> BoundaryPoint {
    BoundaryPoint::from_k(m, &m.random_k(rng))
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(1.0)
}

pub fn jobs() -> Vec<Job> {
    vec![
        Job::new("boundary.endpoints", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let (mut flow, mut equi, mut horo) = (Vec::new(), Vec::new(), Vec::new());
            for _ in 0..s.sampling.random_points {
                let g = m.random_group(rng);
                let t: f64 = rng.random_range(-5.0..5.0);
                let mm = m.random_m(rng);
                let gamma = m.random_group(rng);
                for sign in Sign::BOTH {
                    let b = endpoint(m, &g, sign);
                    flow.push(b.distance(&endpoint(m, &(g * m.exp_a(t)), sign)));
                    flow.push(b.distance(&endpoint(m, &(g * mm), sign)));
                    equi.push(endpoint(m, &(gamma * g), sign).distance(&b.act(m, &gamma)));
                }
                let np = n_plus(m, rng);
                horo.push(endpoint(m, &g, Sign::Plus).distance(&endpoint(m, &(g * np), Sign::Plus)));
                let nm = m.nbar_exp(&m.random_nbar_coords(rng, 1.0));
                horo.push(endpoint(m, &g, Sign::Minus).distance(&endpoint(m, &(g * nm), Sign::Minus)));
            }
            let tol = s.tolerances.cocycle;
            vec![
                CheckRecord::below("boundary.endpoint.ma_invariance", "endpoints are MA-invariant", worst(flow), tol),
                CheckRecord::below("boundary.endpoint.equivariance", "B(gamma g) = gamma B(g)", worst(equi), tol),
                CheckRecord::below(
                    "boundary.endpoint.horospherical_invariance",
                    "B+ is N-invariant and B- is N-bar-invariant",
                    worst(horo),
                    tol,
                ),
            ]
        }),
        Job::new("boundary.horocycle", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let (mut coc, mut anti, mut onk) = (Vec::new(), Vec::new(), Vec::new());
            for _ in 0..s.sampling.random_points {
                let g = m.random_group(rng);
                let gamma = m.random_group(rng);
                let b = random_point(m, rng);
                let gb = b.act(m, &gamma);
                coc.push(
                    (horocycle_bracket(m, &(gamma * g), &gb)
                        - horocycle_bracket(m, &g, &b)
                        - horocycle_bracket(m, &gamma, &gb))
                    .abs(),
                );
                anti.push((horocycle_bracket(m, &gamma, &gb) + horocycle_bracket(m, &inv(&gamma), &b)).abs());
                onk.push(horocycle_bracket(m, &m.random_k(rng), &b).abs());
            }
            let tol = s.tolerances.cocycle;
            vec![
                CheckRecord::below("boundary.horocycle.cocycle", "horocycle bracket cocycle", worst(coc), tol),
                CheckRecord::below(
                    "boundary.horocycle.antisymmetry",
                    "<gamma o, gamma b> = -<gamma^-1 o, b>",
                    worst(anti),
                    tol,
                ),
                CheckRecord::below("boundary.horocycle.vanishes_on_k", "<kK, b> = 0", worst(onk), tol),
            ]
        }),
        Job::new("boundary.phi", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let (mut scale, mut coc, mut np_inv, mut ng_k) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for _ in 0..s.sampling.random_points {
                let g = m.random_group(rng);
                let gamma = m.random_group(rng);
                let t: f64 = rng.random_range(-3.0..3.0);
                for sign in Sign::BOTH {
                    let p = phi(m, &g, sign);
                    let e = (sign.as_f64() * t).exp();
                    scale.push((phi(m, &(g * m.exp_a(t)), sign) / p - e).abs() / e);
                    let lhs = phi(m, &(gamma * g), sign);
                    coc.push((lhs - n_gamma(m, &gamma, &endpoint(m, &g, sign)) * p).abs() / lhs);
                }
                let np = n_plus(m, rng);
                np_inv.push((phi(m, &(g * np), Sign::Plus) / phi(m, &g, Sign::Plus) - 1.0).abs());
                ng_k.push((n_gamma(m, &m.random_k(rng), &random_point(m, rng)) - 1.0).abs());
            }
            let tol = s.tolerances.cocycle;
            vec![
                CheckRecord::below("boundary.phi.flow_scaling", "Phi(g a_t) = e^{+-t} Phi(g)", worst(scale), tol),
                CheckRecord::below("boundary.phi.cocycle", "Phi(gamma g) = N_gamma(B(g)) Phi(g)", worst(coc), tol),
                CheckRecord::below("boundary.phi.n_invariance", "Phi+ is right N-invariant", worst(np_inv), tol),
                CheckRecord::below("boundary.n_gamma.trivial_on_k", "N_k = 1 for k in K", worst(ng_k), tol),
            ]
        }),
        Job::new("boundary.q_transform", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let t = test_function(m);
            let (mut inter, mut pull, mut flow) = (Vec::new(), Vec::new(), Vec::new());
            let cases = 5;
            let per = s.sampling.random_points.div_ceil(cases);
            for _ in 0..cases {
                let lambda = C64::new(rng.random_range(-1.5..1.5), rng.random_range(-2.0..2.0));
                let gamma = m.random_group(rng);
                let pt = principal_series(m, -(lambda + m.rho_check), &gamma, &t);
                for _ in 0..per {
                    let g = m.random_group(rng);
                    for sign in Sign::BOTH {
                        let lhs = q_transform(m, &t, lambda, sign, &(inv(&gamma) * g));
                        inter.push(rel(lhs, q_transform(m, &pt, lambda, sign, &g)));
                        let q0 = q_transform(m, &t, C64::new(0.0, 0.0), sign, &g);
                        pull.push((q0 - t.eval(&endpoint(m, &g, sign))).norm());
                        let q = q_transform(m, &t, lambda, sign, &g);
                        let want = (lambda * sign.as_f64() * 0.8).exp() * q;
                        flow.push(rel(want, q_transform(m, &t, lambda, sign, &(g * m.exp_a(0.8)))));
                    }
                }
            }
            let tol = s.tolerances.intertwining;
            vec![
                CheckRecord::below(
                    "boundary.q_transform.intertwining",
                    "Q(T) at gamma^-1 g equals Q(pi(gamma) T) at g",
                    worst(inter),
                    tol,
                ),
                CheckRecord::below(
                    "boundary.q_transform.pullback",
                    "Q at lambda = 0 is the endpoint pullback",
                    worst(pull),
                    tol,
                ),
                CheckRecord::below(
                    "boundary.q_transform.flow",
                    "Q(T)(g a_t) = e^{+-lambda t} Q(T)(g)",
                    worst(flow),
                    tol,
                ),
            ]
        }),
        Job::new("boundary.principal_series", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let t = test_function(m);
            let (mut law, mut minv) = (Vec::new(), Vec::new());
            let cases = 5;
            let per = s.sampling.random_points.div_ceil(cases);
            for _ in 0..cases {
                let mu = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-2.0..2.0));
                let (g1, g2) = (m.random_group(rng), m.random_group(rng));
                let lhs = principal_series(m, mu, &(g1 * g2), &t);
                let rhs = principal_series(m, mu, &g1, &principal_series(m, mu, &g2, &t));
                for _ in 0..per {
                    let b = random_point(m, rng);
                    law.push(rel(lhs.eval(&b), rhs.eval(&b)));
                    let k = m.random_k(rng);
                    let km = k * m.random_m(rng);
                    minv.push((t.eval(&BoundaryPoint::from_k(m, &k)) - t.eval(&BoundaryPoint::from_k(m, &km))).norm());
                }
            }
            let tol = s.tolerances.intertwining;
            vec![
                CheckRecord::below("boundary.principal_series.group_law", "pi(g1 g2) = pi(g1) pi(g2)", worst(law), tol),
                CheckRecord::below(
                    "boundary.functions.m_invariance",
                    "boundary functions are M-invariant",
                    worst(minv),
                    tol,
                ),
            ]
        }),
    ]
}
