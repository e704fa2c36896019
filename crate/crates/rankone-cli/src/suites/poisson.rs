use num_complex::Complex64 as C64;
use rand::Rng;
use rankone::boundary::{principal_series, BoundaryFunction, BoundaryPoint, SphereRule};
use rankone::lie_core::inv;
use rankone::poisson::*;
use rankone::{ModelName, RankOneModel};

use super::{worst, Ctx, Job};
use crate::config::PoissonSettings;
use crate::report::CheckRecord;

fn orders(p: &PoissonSettings) -> PoissonOrders {
    PoissonOrders { boundary: p.boundary_order, eigen: p.eigen_order, sphere: p.sphere_order }
}

fn test_functions(m: &RankOneModel) -> Vec<(&'static str, BoundaryFunction)> {
    let n = m.n;
    let mut a = vec![0.0; n];
    a[0] = 0.7;
    a[n - 1] = -0.4;
    let mut b = vec![0.0; n];
    b[1] = 1.0;
    vec![
        ("constant", BoundaryFunction::constant(C64::new(1.0, 0.0))),
        ("zonal2", BoundaryFunction::zonal(m, 2)),
        ("exp_linear", BoundaryFunction::exp_linear(m, a, b)),
    ]
}

const LAPLACE_MU: [C64; 3] = [C64::new(0.0, 0.5), C64::new(0.8, 0.0), C64::new(0.2, 1.0)];

/// |observed − 2|, or 0 once the residual has reached round-off.
fn order_gap(study: &ConvergenceStudy) -> f64 {
    if study.residuals.last().is_some_and(|r| *r < 1e-12) {
        0.0
    } else {
        (study.observed_order - 2.0).abs()
    }
}

pub fn jobs(ctx: &Ctx) -> Vec<Job> {
    let mut jobs = Vec::new();
    for (idx, mu) in LAPLACE_MU.into_iter().enumerate() {
        jobs.push(Job::new(format!("poisson.projection.{idx}"), move |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let (label, t) = test_functions(m).swap_remove(idx);
            let mut res = Vec::new();
            for _ in 0..s.sampling.projection_points {
                let g = m.random_group_scaled(rng, 0.4);
                for mu in [C64::new(0.3, 0.5), C64::new(-m.rho_check, 0.0)] {
                    res.extend(poisson_projection_residual(m, &t, mu, &g, s.poisson.boundary_order));
                }
            }
            vec![CheckRecord::below(
                format!("poisson.projection.{label}"),
                "fiber integral of Q(T) at both signs equals the Poisson transform",
                worst(res),
                s.tolerances.projection,
            )]
        }));
        jobs.push(Job::new(format!("poisson.laplace.{idx}"), move |ctx, _| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let (label, t) = test_functions(m).swap_remove(idx);
            let study = laplace_convergence(m, &t, mu, &m.exp_a(0.3), s.poisson.laplace_step, orders(&s.poisson));
            let note = format!("mu = {mu}, residuals {:?}, order {:.3}", study.residuals, study.observed_order);
            vec![
                CheckRecord::below(
                    format!("poisson.laplace.{label}.residual"),
                    "Poisson transforms are Laplace eigenfunctions",
                    study.residuals[1],
                    s.tolerances.laplace,
                )
                .with_note(note),
                CheckRecord::below(
                    format!("poisson.laplace.{label}.order"),
                    "second-order convergence of the geodesic-sphere Laplacian",
                    order_gap(&study),
                    0.3,
                ),
            ]
        }));
    }
    jobs.push(Job::new("poisson.jordan_first", |ctx, _| {
        let (m, s) = (&ctx.model, &ctx.settings);
        let t0 = BoundaryFunction::constant(C64::new(1.0, 0.0));
        let p = &s.poisson;
        let steps = JordanSteps { h: p.jordan_step, dmu_first: p.dmu_first, dmu_second: p.dmu_second };
        let study = jordan_first_study(m, &t0, C64::new(0.4, 0.0), &m.exp_a(0.4), steps, orders(p));
        vec![
            CheckRecord::below(
                "poisson.jordan.first.residual",
                "first mu-derivative of the eigen-equation",
                study.residuals[1],
                s.tolerances.jordan_first,
            ),
            CheckRecord::below(
                "poisson.jordan.first.order",
                "step-halving convergence of the first Jordan identity",
                order_gap(&study),
                1.0,
            ),
        ]
    }));
    jobs.push(Job::new("poisson.jordan_second", |ctx, _| {
        let (m, s) = (&ctx.model, &ctx.settings);
        let t0 = BoundaryFunction::constant(C64::new(1.0, 0.0));
        let p = &s.poisson;
        let steps = JordanSteps { h: p.jordan_step, dmu_first: p.dmu_first, dmu_second: p.dmu_second };
        let study = jordan_second_study(m, &t0, &m.exp_a(0.4), steps, orders(p));
        vec![
            CheckRecord::below(
                "poisson.jordan.second.residual",
                "second mu-derivative at mu = 0",
                study.residuals[1],
                s.tolerances.jordan_second,
            ),
            CheckRecord::below(
                "poisson.jordan.second.order",
                "step-halving convergence of the second Jordan identity",
                order_gap(&study),
                1.0,
            ),
        ]
    }));
    jobs.push(Job::new("poisson.scattering", |ctx, _| {
        let (m, s) = (&ctx.model, &ctx.settings);
        let order = s.poisson.boundary_order;
        let mut out = Vec::new();
        for ell in 0..=2 {
            let near = scattering_eigenvalue(m, C64::new(1e-6, 0.0), ell, order);
            out.push(match near {
                Ok(f) => CheckRecord::below(
                    format!("poisson.scattering.identity.ell{ell}"),
                    "S_0 = Id on K-types",
                    (f.value - 1.0).norm(),
                    s.tolerances.scattering_identity,
                ),
                Err(e) => CheckRecord::errored(
                    format!("poisson.scattering.identity.ell{ell}"),
                    "S_0 = Id on K-types",
                    s.tolerances.scattering_identity,
                    e,
                ),
            });
            let fits: Vec<f64> = [C64::new(0.2, 0.0), C64::new(0.5, 0.0), C64::new(1.0, 0.3)]
                .iter()
                .map(|mu| scattering_eigenvalue(m, *mu, ell, order).map_or(f64::NAN, |f| f.fit_residual))
                .collect();
            out.push(CheckRecord::below(
                format!("poisson.scattering.scalar.ell{ell}"),
                "S_mu acts by a scalar on each K-type",
                worst(fits),
                s.tolerances.scattering_fit,
            ));
        }
        let mu = C64::new(0.4, 0.3);
        let inverse = match (scattering_eigenvalue(m, mu, 0, order), scattering_eigenvalue(m, -mu, 0, order)) {
            (Ok(a), Ok(b)) => (a.value * b.value - 1.0).norm(),
            _ => f64::NAN,
        };
        out.push(CheckRecord::below(
            "poisson.scattering.inverse_pair",
            "S_mu S_-mu = Id",
            inverse,
            s.tolerances.scattering_identity,
        ));
        out
    }));
    jobs.push(Job::new("poisson.intertwining", |ctx, rng| {
        let (m, s) = (&ctx.model, &ctx.settings);
        let rule = SphereRule::new(m, [64, 40, 48][m.n - 2]);
        let t = test_functions(m).swap_remove(2).1;
        let mut res = Vec::new();
        for _ in 0..s.sampling.projection_points {
            let mu = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-2.0..2.0));
            let gamma = m.random_group_scaled(rng, 0.3);
            let x = m.random_group_scaled(rng, 0.3);
            let moved = principal_series(m, -mu, &inv(&gamma), &t);
            let lhs = poisson(m, &t, mu, &(gamma * x), &rule);
            let rhs = poisson(m, &moved, mu, &x, &rule);
            res.push((lhs - rhs).norm() / lhs.norm().max(1.0));
        }
        vec![CheckRecord::below(
            "poisson.intertwining",
            "P_mu intertwines the principal series with left translation",
            worst(res),
            s.tolerances.projection,
        )]
    }));
    jobs.push(Job::new("poisson.k_invariance", |ctx, rng| {
        let (m, s) = (&ctx.model, &ctx.settings);
        let one = BoundaryFunction::constant(C64::new(1.0, 0.0));
        let order = s.poisson.boundary_order;
        let mut res = Vec::new();
        for _ in 0..s.sampling.projection_points {
            let mu = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-2.0..2.0));
            let g = m.random_group_scaled(rng, 0.4);
            let k = m.random_k(rng);
            let a = poisson(m, &one, mu, &g, &peak_rule(m, &g, order));
            let b = poisson(m, &one, mu, &(k * g), &peak_rule(m, &(k * g), order));
            res.push((a - b).norm() / a.norm().max(1.0));
        }
        vec![CheckRecord::below(
            "poisson.k_invariance",
            "transform of a constant is spherical",
            worst(res),
            s.tolerances.projection,
        )]
    }));
    if ctx.model.name == ModelName::H2R {
        jobs.push(Job::new("poisson.h2r_closed_forms", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let order = s.poisson.boundary_order;
            let mu = C64::new(0.3, 0.2);
            let closed = worst((0..=4).map(|ell| match scattering_eigenvalue(m, mu, ell, order) {
                Ok(f) => (f.value - scattering_h2r(mu, ell as i64)).norm(),
                Err(_) => f64::NAN,
            }));
            let t0 = BoundaryFunction::exp_linear(m, vec![0.5, -0.3], vec![0.2, 0.4]);
            let pts: Vec<BoundaryPoint> = (0..20)
                .map(|j| {
                    let th = 0.3 + j as f64 * 0.31;
                    BoundaryPoint::from_sphere(m, &[th.cos(), th.sin()])
                })
                .collect();
            let law = worst((0..5).map(|_| {
                let gamma = m.random_group_scaled(rng, 0.5);
                jordan_boundary_residual(m, &t0, &gamma, 100, &pts).unwrap_or(f64::NAN)
            }));
            vec![
                CheckRecord::below(
                    "poisson.scattering.h2r_closed_form",
                    "Gamma-ratio eigenvalues of S_mu on circle harmonics",
                    closed,
                    s.tolerances.scattering_fit,
                ),
                CheckRecord::below(
                    "poisson.jordan.h2r_boundary_law",
                    "transformation law of the Jordan partner under G",
                    law,
                    s.tolerances.jordan_boundary,
                ),
            ]
        }));
    }
    jobs
}
