use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rankone::cfunc::{c_closed_form, default_order, CFunction};
use rankone::ModelName;

use super::{worst, Job};
use crate::report::CheckRecord;

fn grid() -> Vec<C64> {
    let mut pts = Vec::new();
    for re in [0.1, 0.5, 1.0, 3.0] {
        for im in [-5.0, -2.0, 0.0, 1.0, 2.5, 5.0] {
            pts.push(C64::new(re, im));
        }
    }
    pts
}

const CONTINUATION_POINTS: [C64; 6] = [
    C64::new(-0.3, 0.5),
    C64::new(-0.7, 0.0),
    C64::new(-1.3, 1.0),
    C64::new(-1.5, -0.8),
    C64::new(-0.5, 2.0),
    C64::new(-1.8, 0.3),
];

pub fn jobs() -> Vec<Job> {
    vec![
        Job::new("cfunction.grid", |ctx, _| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.c_integral;
            let cf = match CFunction::new(m) {
                Ok(cf) => cf,
                Err(e) => return vec![CheckRecord::errored("cfunction.integral_vs_closed_form", "", tol, e)],
            };
            let errs = grid().into_iter().map(|z| match (cf.c_integral(z), c_closed_form(m, z)) {
                (Ok(a), Ok(b)) => (a.value - b.value).norm() / b.value.norm(),
                _ => f64::NAN,
            });
            vec![CheckRecord::below(
                "cfunction.integral_vs_closed_form",
                "N-bar integral against the Gamma-function formula",
                worst(errs),
                tol,
            )]
        }),
        Job::new("cfunction.normalization", |ctx, _| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let expected = match m.name {
                ModelName::H2R => 2.0 * PI,
                ModelName::H3R => 4.0 * PI,
                ModelName::H2C => 2.0 * PI * PI,
            };
            let res = CFunction::new(m)
                .and_then(|cf| cf.c_integral(C64::new(m.rho_check, 0.0)))
                .map_or(f64::NAN, |r| (r.value - expected).norm());
            vec![CheckRecord::below(
                "cfunction.normalization",
                "c(rho) equals the volume of the unit sphere",
                res,
                s.tolerances.normalization,
            )]
        }),
        Job::new("cfunction.continuation", |ctx, _| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.continuation;
            let cf = match CFunction::new(m) {
                Ok(cf) => cf,
                Err(e) => return vec![CheckRecord::errored("cfunction.continuation", "", tol, e)],
            };
            let (mut agree, mut kdep) = (Vec::new(), Vec::new());
            for z in CONTINUATION_POINTS {
                let lam = z - m.rho_check;
                let k = default_order(m, lam);
                match (c_closed_form(m, z), cf.c_continued(lam, k), cf.c_continued(lam, k + 1)) {
                    (Ok(exact), Ok(a), Ok(b)) => {
                        let scale = exact.value.norm().max(1.0);
                        agree.push((a.value - exact.value).norm() / scale);
                        agree.push((b.value - exact.value).norm() / scale);
                        kdep.push((a.value - b.value).norm() / scale);
                    }
                    _ => agree.push(f64::NAN),
                }
            }
            vec![
                CheckRecord::below(
                    "cfunction.continuation.closed_form",
                    "continuation through the regularizing recursion",
                    worst(agree),
                    tol,
                ),
                CheckRecord::below(
                    "cfunction.continuation.k_independence",
                    "continued value does not depend on the order K",
                    worst(kdep),
                    tol,
                ),
            ]
        }),
        Job::new("cfunction.epsilon", |ctx, _| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.c_integral;
            let lam = C64::new(0.3, -0.4);
            let res = CFunction::new(m).map_or(f64::NAN, |cf| {
                worst([0.5, 0.2].iter().map(|eps| match cf.epsilon_ode_sides(lam, *eps, 1e-2) {
                    Ok((lhs, rhs)) => (lhs - rhs).norm() / rhs.norm().max(1.0),
                    Err(_) => f64::NAN,
                }))
            });
            vec![CheckRecord::below(
                "cfunction.epsilon_ode",
                "(eps d/deps - beta_1) c_eps equals the V_1-weighted truncated integral",
                res,
                tol,
            )]
        }),
    ]
}
