use rand::Rng;
use rankone::lie_core::{inv, Grading, LieAlgebraElement, Mat};
use rankone::{Error, RankOneModel};

use super::{worst, Job};
use crate::report::CheckRecord;

fn k_residual(m: &RankOneModel, k: &Mat) -> f64 {
    (k.adjoint() * k - Mat::identity()).norm() + m.membership_residual(k)
}

fn nbar_residual(m: &RankOneModel, x: &Mat) -> f64 {
    match m.nbar_log(x) {
        Ok(c) => (m.nbar_exp(&c) - x).norm(),
        Err(Error::NotInNbar { residual }) => residual,
        Err(_) => f64::INFINITY,
    }
}

fn n_residual(m: &RankOneModel, x: &Mat) -> f64 {
    let w = m.weyl_element();
    nbar_residual(m, &(inv(&w) * x * w))
}

pub fn jobs() -> Vec<Job> {
    vec![
        Job::new("decompositions.kan", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.decomposition;
            let mut rec = Vec::new();
            let mut fac = Vec::new();
            for _ in 0..s.sampling.random_points {
                let g = m.random_group(rng);
                match m.iwasawa_kan(&g) {
                    Ok((k, u, n)) => {
                        rec.push((k * m.exp_a(u) * n - g).norm() / g.norm());
                        fac.push(k_residual(m, &k) + n_residual(m, &n));
                    }
                    Err(_) => rec.push(f64::NAN),
                }
            }
            vec![
                CheckRecord::below("decompositions.kan.round_trip", "Iwasawa decomposition g = kan", worst(rec), tol),
                CheckRecord::below("decompositions.kan.factors", "Iwasawa factors lie in K and N", worst(fac), tol),
            ]
        }),
        Job::new("decompositions.ank", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.decomposition;
            let (mut rec, mut fac) = (Vec::new(), Vec::new());
            for _ in 0..s.sampling.random_points {
                let g = m.random_group(rng);
                match m.decompose_ank(&g) {
                    Ok((u, nb, k)) => {
                        rec.push((m.exp_a(u) * nb * k - g).norm() / g.norm());
                        fac.push(k_residual(m, &k) + nbar_residual(m, &nb));
                    }
                    Err(_) => rec.push(f64::NAN),
                }
            }
            vec![
                CheckRecord::below("decompositions.ank.round_trip", "decomposition g = a n-bar k", worst(rec), tol),
                CheckRecord::below("decompositions.ank.factors", "factors lie in N-bar and K", worst(fac), tol),
            ]
        }),
        Job::new("decompositions.nak", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.decomposition;
            let mut rec = Vec::new();
            for _ in 0..s.sampling.random_points {
                let g = m.random_group(rng);
                rec.push(match m.decompose_nak(&g) {
                    Ok((n, u, k)) => (n * m.exp_a(u) * k - g).norm() / g.norm() + n_residual(m, &n) + k_residual(m, &k),
                    Err(_) => f64::NAN,
                });
            }
            vec![CheckRecord::below("decompositions.nak.round_trip", "decomposition g = nak", worst(rec), tol)]
        }),
        Job::new("decompositions.h_map", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.decomposition;
            let mut on_k = Vec::new();
            let mut on_a = Vec::new();
            let mut left_k = Vec::new();
            for _ in 0..s.sampling.random_points {
                on_k.push(m.h_kan(&m.random_k(rng)).abs());
                let t: f64 = rng.random_range(-3.0..3.0);
                on_a.push((m.h_kan(&m.exp_a(t)) - t).abs());
                let g = m.random_group(rng);
                left_k.push((m.h_kan(&(m.random_k(rng) * g)) - m.h_kan(&g)).abs());
            }
            vec![
                CheckRecord::below("decompositions.h.vanishes_on_k", "H(k) = 0", worst(on_k), tol),
                CheckRecord::below("decompositions.h.identity_on_a", "H(exp tH0) = t", worst(on_a), tol),
                CheckRecord::below("decompositions.h.left_k_invariant", "H(kg) = H(g)", worst(left_k), tol),
            ]
        }),
        Job::new("decompositions.bruhat", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.decomposition;
            let mut res = Vec::new();
            for _ in 0..s.sampling.random_points {
                let g = m.random_group(rng);
                res.push(match m.bruhat_nbar(&g) {
                    // n̄⁻¹g ∈ MAN has trivial N̄-part.
                    Ok(nb) => match m.bruhat_nbar(&(inv(&nb) * g)) {
                        Ok(rest) => (rest - Mat::identity()).norm() + nbar_residual(m, &nb),
                        Err(_) => f64::NAN,
                    },
                    Err(_) => f64::NAN,
                });
            }
            let w_rejected = matches!(m.bruhat_nbar(&m.weyl_element()), Err(Error::BruhatCell { .. }));
            vec![
                CheckRecord::below(
                    "decompositions.bruhat.round_trip",
                    "open Bruhat cell coordinate gP = n-bar P",
                    worst(res),
                    tol,
                ),
                CheckRecord::at_most(
                    "decompositions.bruhat.weyl_excluded",
                    "wP lies outside the open cell",
                    if w_rejected { 0.0 } else { 1.0 },
                    0.0,
                ),
            ]
        }),
        Job::new("decompositions.nbar", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.decomposition;
            let mut res = Vec::new();
            for _ in 0..s.sampling.random_points {
                let c = m.random_nbar_coords(rng, 1.5);
                res.push(match m.nbar_log(&m.nbar_exp(&c)) {
                    Ok(back) => back.flat().iter().zip(c.flat()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
                    Err(_) => f64::NAN,
                });
            }
            let (b1, b2) = m.nbar_basis();
            let grading = worst(
                b1.iter()
                    .map(|x| LieAlgebraElement { mat: *x, grading: Grading::NMinusAlpha })
                    .chain(b2.iter().map(|x| LieAlgebraElement { mat: *x, grading: Grading::NMinus2Alpha }))
                    .map(|e| e.grading_residual(m)),
            );
            vec![
                CheckRecord::below("decompositions.nbar.log_exp", "N-bar exponential coordinates", worst(res), tol),
                CheckRecord::below(
                    "decompositions.nbar.grading",
                    "[H0, X] = -X and -2X on the N-bar root spaces",
                    grading,
                    tol,
                ),
            ]
        }),
        Job::new("decompositions.weyl", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let tol = s.tolerances.decomposition;
            let w = m.weyl_element();
            let mut res = vec![k_residual(m, &w)];
            for _ in 0..s.sampling.random_points {
                let t: f64 = rng.random_range(-3.0..3.0);
                res.push((w * m.exp_a(t) * inv(&w) * m.exp_a(t) - Mat::identity()).norm());
            }
            vec![CheckRecord::below("decompositions.weyl", "w in K with Ad(w) = -1 on a", worst(res), tol)]
        }),
        Job::new("decompositions.membership", |ctx, rng| {
            let (m, s) = (&ctx.model, &ctx.settings);
            let res = worst((0..s.sampling.random_points).map(|_| m.membership_residual(&m.random_group(rng))));
            vec![CheckRecord::below(
                "decompositions.membership",
                "sampled elements lie in G",
                res,
                s.tolerances.decomposition,
            )]
        }),
    ]
}
