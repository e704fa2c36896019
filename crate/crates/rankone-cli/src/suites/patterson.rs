use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rankone::boundary::BoundaryFunction;
use rankone::geomtransform::measure::{Integration, McSpec};
use rankone::patterson_sullivan::*;
use rankone::RankOneModel;

use super::{worst, Ctx, Job};
use crate::config::Method;
use crate::report::CheckRecord;

const PARAMETERS: [(C64, C64); 3] = [
    (C64::new(0.3, 0.0), C64::new(0.3, 0.0)),
    (C64::new(0.0, 0.5), C64::new(0.0, 0.5)),
    (C64::new(0.3, 0.0), C64::new(0.0, 0.5)),
];

fn random_tilts(m: &RankOneModel, rng: &mut ChaCha8Rng) -> BoundaryFunction {
    let a = (0..m.n).map(|_| rng.random_range(-0.4..0.4)).collect();
    let b = (0..m.n).map(|_| rng.random_range(-0.4..0.4)).collect();
    BoundaryFunction::exp_linear(m, a, b)
}

pub fn jobs(ctx: &Ctx) -> Vec<Job> {
    let mut jobs = vec![Job::new("patterson.radon", |ctx, rng| {
        let (m, s) = (&ctx.model, &ctx.settings);
        let p = &s.patterson;
        let f = BumpFunction::random(m, p.radius, rng);
        let spec = RadonSpec {
            mu: C64::new(0.3, 0.2),
            mu_prime: C64::new(-0.1, 0.5),
            a_truncation: p.truncation,
            order: p.radon_order,
        };
        let mut res = Vec::new();
        for _ in 0..s.sampling.projection_points {
            let g = m.random_group_scaled(rng, 0.3);
            match radon(m, &f, &spec, &g) {
                Ok(a) => {
                    for t in [-0.7, 0.4, 1.3] {
                        let b = radon(m, &f, &spec, &(g * m.exp_a(t))).unwrap_or(C64::new(f64::NAN, 0.0));
                        res.push((a - b).norm() / (1.0 + a.norm()));
                    }
                }
                Err(_) => res.push(f64::NAN),
            }
        }
        let zero = radon(m, &BumpFunction::zero(m), &spec, &m.identity()).map_or(f64::NAN, |v| v.norm());
        vec![
            CheckRecord::below(
                "patterson.radon.flow_invariance",
                "weighted Radon transform is constant along geodesics",
                worst(res),
                s.tolerances.round_trip,
            ),
            CheckRecord::at_most("patterson.radon.zero", "transform of the zero function", zero, 0.0),
        ]
    })];
    let sets = ctx.settings.patterson.data_sets;
    for set in 0..sets {
        jobs.push(Job::new(format!("patterson.product_formula.{set}"), move |ctx, rng| product_formula(ctx, rng, set)));
    }
    jobs
}

fn product_formula(ctx: &Ctx, rng: &mut ChaCha8Rng, set: usize) -> Vec<CheckRecord> {
    let (m, s) = (&ctx.model, &ctx.settings);
    let p = &s.patterson;
    let (mu, mu_prime) = PARAMETERS[set % PARAMETERS.len()];
    let (t, w) = (random_tilts(m, rng), random_tilts(m, rng));
    let f = BumpFunction::random(m, p.radius, rng);
    let spec = RadonSpec { mu, mu_prime, a_truncation: p.truncation, order: p.radon_order };
    let (def, prod) = match p.method {
        Method::Quadrature => (Integration::Quadrature(p.definition_order), Integration::Quadrature(p.product_order)),
        Method::MonteCarlo => {
            let mc = |seed| Integration::MonteCarlo(McSpec { samples: p.samples, batches: p.batches, seed });
            (mc(rng.random()), mc(rng.random()))
        }
    };
    let id = format!("patterson.product_formula.set{set}");
    let anchor = "Patterson-Sullivan pairing equals the product of resonant and co-resonant states";
    match compare_product_formula(m, &t, &w, &spec, &f, def, prod) {
        Ok(c) => {
            let note = format!(
                "mu = {mu}, mu' = {mu_prime}, definition {:.6e}, product {:.6e}",
                c.definition.mean, c.product.mean
            );
            match p.method {
                Method::Quadrature => {
                    vec![CheckRecord::below(
                        format!("{id}.relative_error"),
                        anchor,
                        c.relative_error,
                        s.tolerances.ps_relative,
                    )
                    .with_note(note)]
                }
                Method::MonteCarlo => {
                    vec![CheckRecord::below(
                        format!("{id}.deviation_sigmas"),
                        anchor,
                        c.deviation_sigmas,
                        s.tolerances.ps_sigmas,
                    )
                    .with_note(note)]
                }
            }
        }
        Err(e) => vec![CheckRecord::errored(id, anchor, s.tolerances.ps_relative, e)],
    }
}
