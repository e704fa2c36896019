use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rankone::boundary::{q_transform, BoundaryFunction, Sign};
use rankone::geomtransform::measure::{
    verify_haar_factorizations, verify_pairing_measure, HaarIdentity, HaarPlan, Integration, McSpec, PairTestFunctions,
    PairingSetup,
};
use rankone::geomtransform::*;
use rankone::lie_core::inv;
use rankone::patterson_sullivan::flow_constant;
use rankone::{NbarCoordinates, RankOneModel};

use super::{worst, Ctx, Job};
use crate::config::Method;
use crate::report::CheckRecord;

pub const PAIRING_LAMBDAS: [(&str, C64); 3] =
    [("0", C64::new(0.0, 0.0)), ("0.3", C64::new(0.3, 0.0)), ("0.5i", C64::new(0.0, 0.5))];

fn random_eu(m: &RankOneModel, rng: &mut ChaCha8Rng) -> EuPoint {
    EuPoint { g: m.random_group_scaled(rng, 0.6), nbar: m.nbar_exp(&m.random_nbar_coords(rng, 0.8)) }
}

fn identity_name(i: HaarIdentity) -> &'static str {
    match i {
        HaarIdentity::KnDecomposition => "kn",
        HaarIdentity::NNbarDecomposition => "n_nbar",
        HaarIdentity::PsiPushforward => "psi_pushforward",
        HaarIdentity::FlowFactorization => "flow",
    }
}

pub fn jobs(_ctx: &Ctx) -> Vec<Job> {
    let mut jobs = vec![
        Job::new("geometry.nu", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let mut jac =
                vec![jacobian_nu(m, &NbarCoordinates::zero(m), 1e-4).map_or(f64::NAN, |j| (j.abs() - 1.0).abs())];
            let mut invol = Vec::new();
            for _ in 0..s.sampling.jacobian_points {
                let c = m.random_nbar_coords(rng, 1.0);
                jac.push(jacobian_nu(m, &c, 1e-4).map_or(f64::NAN, |j| (j.abs() - 1.0).abs()));
                let n = m.nbar_exp(&c);
                invol.push(nu(m, &n).and_then(|x| nu(m, &x)).map_or(f64::NAN, |b| (b - n).norm()));
            }
            vec![
                CheckRecord::below(
                    "geometry.nu.jacobian",
                    "nu preserves Haar measure on N-bar",
                    worst(jac),
                    s.tolerances.jacobian,
                ),
                CheckRecord::below(
                    "geometry.nu.involution",
                    "nu is an involution",
                    worst(invol),
                    s.tolerances.round_trip,
                ),
            ]
        }),
        Job::new("geometry.maps", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.round_trip;
            let count = s.sampling.random_points;
            let (mut g_rt, mut g_eq) = (Vec::new(), Vec::new());
            for _ in 0..count {
                let g = m.random_group_scaled(rng, 0.7);
                let (b1, b2) = map_g(m, &g);
                match map_g_inverse(m, &b1, &b2) {
                    Ok(back) => {
                        g_rt.push(ma_coset_distance(&g, &back));
                        let gamma = m.random_group_scaled(rng, 0.5);
                        g_eq.push(
                            map_g_inverse(m, &b1.act(m, &gamma), &b2.act(m, &gamma))
                                .map_or(f64::NAN, |moved| ma_coset_distance(&(gamma * back), &moved)),
                        );
                    }
                    Err(_) => g_rt.push(f64::NAN),
                }
            }
            let (mut p_rt, mut p_eq) = (Vec::new(), Vec::new());
            for _ in 0..count {
                let e = random_eu(m, rng);
                let (h, g) = map_psi(&e);
                match map_psi_inverse(m, &h, &g) {
                    Ok(back) => {
                        p_rt.push(back.distance(&e));
                        let gamma = m.random_group_scaled(rng, 0.5);
                        let expect = EuPoint { g: gamma * back.g, nbar: back.nbar };
                        p_eq.push(
                            map_psi_inverse(m, &(gamma * h), &(gamma * g)).map_or(f64::NAN, |x| x.distance(&expect)),
                        );
                    }
                    Err(_) => p_rt.push(f64::NAN),
                }
            }
            let (mut a_rt, mut a_om) = (Vec::new(), Vec::new());
            while a_rt.len() < count {
                let p = DoubleSpherePoint {
                    h: m.random_group_scaled(rng, 0.6),
                    k_minus: uniform_boundary_point(m, rng).k,
                    k_plus: uniform_boundary_point(m, rng).k,
                };
                if p.near_antidiagonal(m, 1e-2) {
                    continue;
                }
                a_rt.push(map_a(m, &p).map_or(f64::NAN, |e| p.distance(m, &map_a_inverse(m, &e))));
                let e = random_eu(m, rng);
                let geometric = map_a_inverse(m, &e);
                a_om.push(map_a_inverse_via_omega(m, &e).map_or(f64::NAN, |formula| {
                    let (x1, m1, p1) = map_e(m, &geometric);
                    let (x2, m2, p2) = map_e(m, &formula);
                    base_point_distance(&x1, &x2) + m1.distance(&m2) + p1.distance(&p2)
                }));
            }
            vec![
                CheckRecord::below(
                    "geometry.g.round_trip",
                    "G/MA is the space of distinct boundary pairs",
                    worst(g_rt),
                    tol,
                ),
                CheckRecord::below("geometry.g.equivariance", "boundary-pair map is G-equivariant", worst(g_eq), tol),
                CheckRecord::below(
                    "geometry.psi.round_trip",
                    "psi: G x N-bar to pairs of points of G/M",
                    worst(p_rt),
                    tol,
                ),
                CheckRecord::below("geometry.psi.equivariance", "psi is G-equivariant", worst(p_eq), tol),
                CheckRecord::below(
                    "geometry.a.round_trip",
                    "A is a diffeomorphism off the antidiagonal",
                    worst(a_rt),
                    tol,
                ),
                CheckRecord::below("geometry.a.omega_formula", "inverse of A through Omega", worst(a_om), tol),
            ]
        }),
        Job::new("geometry.resonant_legs", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let t = BoundaryFunction::exp_linear(m, vec![0.3; m.n], vec![0.2; m.n]);
            let w = BoundaryFunction::zonal(m, 2);
            let lam = C64::new(0.3, 0.7);
            let mut res = Vec::new();
            for _ in 0..s.sampling.random_points / 5 {
                let e = random_eu(m, rng);
                let p = map_a_inverse(m, &e);
                let v = q_transform(m, &t, lam, Sign::Minus, &p.eta_minus());
                let v0 = q_transform(m, &t, lam, Sign::Minus, &e.g);
                res.push((v - v0).norm() / (1.0 + v0.norm()));
                let vs = q_transform(m, &w, lam, Sign::Plus, &p.eta_plus());
                let weight = (-lam * m.h_kan(&inv(&e.nbar))).exp();
                let vs0 = weight * q_transform(m, &w, lam, Sign::Plus, &e.g);
                res.push((vs - vs0).norm() / (1.0 + vs0.norm()));
            }
            vec![CheckRecord::below(
                "geometry.resonant_legs",
                "pullback of the resonant and co-resonant legs under A",
                worst(res),
                s.tolerances.round_trip,
            )]
        }),
        Job::new("geometry.haar", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let h = &s.haar;
            let plan = HaarPlan {
                quadrature: h.quadrature,
                fiber_quadrature: h.fiber_quadrature,
                max_quadrature_dim: h.max_quadrature_dim,
                mc: McSpec { samples: h.samples, batches: h.batches, seed: rng.random() },
            };
            let fns = PairTestFunctions::new(m, h.test_functions, rng.random());
            let checks = match verify_haar_factorizations(m, &fns, &plan) {
                Ok(c) => c,
                Err(e) => return vec![CheckRecord::errored("geometry.haar", "", s.tolerances.haar, e)],
            };
            let mut out = Vec::new();
            for c in &checks {
                let name = identity_name(c.identity);
                let anchor = "Haar measure factorization";
                let tol = if c.identity == HaarIdentity::PsiPushforward {
                    s.tolerances.haar_pushforward
                } else {
                    s.tolerances.haar
                };
                out.push(if c.relative_sigma > 0.0 {
                    CheckRecord::below(
                        format!("geometry.haar.{name}.sigmas"),
                        anchor,
                        c.max_deviation / c.relative_sigma,
                        s.tolerances.haar_sigmas,
                    )
                    .with_note(format!("deviation {:.3e}, relative sigma {:.3e}", c.max_deviation, c.relative_sigma))
                } else {
                    CheckRecord::below(format!("geometry.haar.{name}"), anchor, c.max_deviation, tol)
                });
                if c.identity == HaarIdentity::FlowFactorization {
                    let expected = flow_constant(m);
                    let dev = (c.constants[0] / expected - 1.0).abs();
                    out.push(
                        CheckRecord::below(
                            "geometry.haar.flow_constant",
                            "dgM = 2^{-2rho} e^{2rho(H(g)+H(gw))} dt db db'",
                            dev,
                            tol.max(s.tolerances.haar_sigmas * c.relative_sigma),
                        )
                        .with_note(format!("constant {:.8}, expected {expected}", c.constants[0])),
                    );
                }
            }
            out
        }),
    ];
    for (label, lam) in PAIRING_LAMBDAS {
        jobs.push(Job::new(format!("geometry.pairing.{label}"), move |ctx, rng| pairing(ctx, rng, label, lam)));
    }
    jobs
}

fn pairing(ctx: &Ctx, rng: &mut ChaCha8Rng, label: &str, lam: C64) -> Vec<CheckRecord> {
    let (m, s) = (&ctx.model, &ctx.settings);
    let p = &s.pairing;
    let t = &s.tolerances;
    let setup = PairingSetup {
        t: BoundaryFunction::exp_linear(m, vec![0.3; m.n], vec![0.2; m.n]),
        w: BoundaryFunction::exp_linear(m, vec![-0.2; m.n], vec![0.1; m.n]),
        lambda_check: lam,
        radius: p.radius,
        eps: p.eps,
        tilt: p.tilt,
    };
    let mc = McSpec { samples: p.samples, batches: p.batches, seed: rng.random() };
    let rhs = match p.rhs_method {
        Method::Quadrature => Integration::Quadrature(p.rhs_order),
        Method::MonteCarlo => {
            Integration::MonteCarlo(McSpec { samples: p.rhs_samples, batches: p.batches, seed: rng.random() })
        }
    };
    let id = |k: &str| format!("geometry.pairing.lambda={label}.{k}");
    let anchor = "pairing change of variables through A";
    match verify_pairing_measure(m, &setup, &mc, rhs) {
        Ok(c) => {
            let note =
                format!("lhs {:.6e}, rhs {:.6e}, relative error {:.2e}", c.lhs.mean, c.rhs.mean, c.relative_error);
            vec![
                CheckRecord::below(id("deviation_sigmas"), anchor, c.deviation_sigmas, t.pairing_sigmas)
                    .with_note(note),
                CheckRecord::at_most(id("relative_sigma"), anchor, c.lhs.relative_sigma(), t.pairing_sigma_budget),
                CheckRecord::above(
                    id("control_sigmas"),
                    "wrong-sign exponent in the N-bar weight is rejected",
                    c.control_sigmas,
                    t.control_sigmas,
                ),
            ]
        }
        Err(e) => vec![CheckRecord::errored(id("deviation_sigmas"), anchor, t.pairing_sigmas, e)],
    }
}
