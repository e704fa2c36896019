use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankone::boundary::{q_transform, BoundaryFunction, Sign};
use rankone::geomtransform::measure::{closest_time, Integration, McSpec};
use rankone::patterson_sullivan::*;
use rankone::{Error, ModelName, RankOneModel};

fn spec(mu: C64, mu_prime: C64) -> RadonSpec {
    RadonSpec { mu, mu_prime, a_truncation: 2.0, order: 32 }
}

fn random_tilts(model: &RankOneModel, rng: &mut ChaCha8Rng) -> BoundaryFunction {
    let a = (0..model.n).map(|_| rng.random_range(-0.4..0.4)).collect();
    let b = (0..model.n).map(|_| rng.random_range(-0.4..0.4)).collect();
    BoundaryFunction::exp_linear(model, a, b)
}

#[test]
fn radon_of_zero_vanishes() {
    let m = RankOneModel::build(ModelName::H2R);
    let f = BumpFunction::zero(&m);
    let v = radon(&m, &f, &spec(C64::new(0.3, 0.0), C64::new(0.0, 0.5)), &m.identity()).unwrap();
    assert_eq!(v, C64::new(0.0, 0.0));
}

#[test]
fn radon_is_invariant_along_the_geodesic() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        let f = BumpFunction::random(&m, 1.0, &mut rng);
        let sp = spec(C64::new(0.3, 0.2), C64::new(-0.1, 0.5));
        for _ in 0..10 {
            let g = m.random_group_scaled(&mut rng, 0.3);
            let a = radon(&m, &f, &sp, &g).unwrap();
            for s in [-0.7, 0.4, 1.3] {
                let b = radon(&m, &f, &sp, &(g * m.exp_a(s))).unwrap();
                assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()), "{name}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn radon_at_minus_rho_is_the_line_integral() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        let f = BumpFunction::random(&m, 1.0, &mut rng);
        let r = C64::new(-m.rho_check, 0.0);
        let sp = RadonSpec { mu: r, mu_prime: r, a_truncation: 2.0, order: 48 };
        for _ in 0..5 {
            let g = m.random_group_scaled(&mut rng, 0.2);
            let v = radon(&m, &f, &sp, &g).unwrap();
            // Composite Simpson over a window containing the support.
            let tc = closest_time(&m, &g);
            let n = 20_000;
            let h = 4.0 / n as f64;
            let mut s = C64::new(0.0, 0.0);
            for i in 0..=n {
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                s += f.eval(&m, &(g * m.exp_a(tc - 2.0 + i as f64 * h))) * w;
            }
            s *= h / 3.0;
            assert!((v - s).norm() < 1e-8 * (1.0 + s.norm()), "{name}: {v} vs {s}");
        }
    }
}

#[test]
fn radon_rejects_a_short_window() {
    let m = RankOneModel::build(ModelName::H3R);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let f = BumpFunction::random(&m, 1.0, &mut rng);
    let sp = RadonSpec { mu: C64::new(0.3, 0.0), mu_prime: C64::new(0.3, 0.0), a_truncation: 0.4, order: 16 };
    assert!(matches!(radon(&m, &f, &sp, &m.identity()), Err(Error::SupportExceedsTruncation)));
}

#[test]
fn pairings_of_zero_vanish() {
    let m = RankOneModel::build(ModelName::H2R);
    let one = BoundaryFunction::constant(C64::new(1.0, 0.0));
    let f = BumpFunction::zero(&m);
    let sp = spec(C64::new(0.3, 0.0), C64::new(0.3, 0.0));
    let d = ps_pairing_definition(&m, &one, &one, &sp, &f, Integration::Quadrature(16)).unwrap();
    let p = ps_pairing_product(&m, &one, &one, sp.mu, sp.mu_prime, &f, Integration::Quadrature(16));
    assert_eq!(d.mean, C64::new(0.0, 0.0));
    assert_eq!(p.mean, C64::new(0.0, 0.0));
}

#[test]
fn definition_is_symmetric_under_the_flip() {
    let m = RankOneModel::build(ModelName::H2R);
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let one = BoundaryFunction::constant(C64::new(1.0, 0.0));
    let f = BumpFunction::random(&m, 1.0, &mut rng);
    for mu in [C64::new(0.3, 0.0), C64::new(0.0, 0.5)] {
        let sp = spec(mu, mu);
        let a = ps_pairing_definition(&m, &one, &one, &sp, &f, Integration::Quadrature(64)).unwrap().mean;
        let b = ps_pairing_definition(&m, &one, &one, &sp, &Flipped(&f), Integration::Quadrature(64)).unwrap().mean;
        assert!((a - b).norm() < 1e-6 * a.norm(), "{a} vs {b}");
    }
}

#[test]
fn product_is_real_for_real_data() {
    let m = RankOneModel::build(ModelName::H3R);
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let t = BoundaryFunction::from_sphere(&m, "exp_x0", |x| C64::new(x[0].exp(), 0.0));
    let f = BumpFunction::random(&m, 1.0, &mut rng);
    let mu = C64::new(0.3, 0.0);
    let p = ps_pairing_product(&m, &t, &t, mu, mu, &f, Integration::Quadrature(12)).mean;
    assert!(p.im.abs() < 1e-8 * p.norm(), "{p}");
}

#[test]
fn product_formula_h2r_quadrature() {
    let m = RankOneModel::build(ModelName::H2R);
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let params = [
        (C64::new(0.3, 0.0), C64::new(0.3, 0.0)),
        (C64::new(0.0, 0.5), C64::new(0.0, 0.5)),
        (C64::new(0.3, 0.0), C64::new(0.0, 0.5)),
    ];
    for (mu, mu_prime) in params {
        let (t, w) = (random_tilts(&m, &mut rng), random_tilts(&m, &mut rng));
        let f = BumpFunction::random(&m, 1.0, &mut rng);
        let c = compare_product_formula(
            &m,
            &t,
            &w,
            &spec(mu, mu_prime),
            &f,
            Integration::Quadrature(64),
            Integration::Quadrature(32),
        )
        .unwrap();
        assert!(c.relative_error < 1e-5, "{mu}, {mu_prime}: {}", c.relative_error);
    }
}

#[test]
fn product_formula_h2c_monte_carlo() {
    let m = RankOneModel::build(ModelName::H2C);
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let (t, w) = (random_tilts(&m, &mut rng), random_tilts(&m, &mut rng));
    let f = BumpFunction::random(&m, 1.0, &mut rng);
    let mc = |seed| Integration::MonteCarlo(McSpec { samples: 50_000, batches: 20, seed });
    let c =
        compare_product_formula(&m, &t, &w, &spec(C64::new(0.3, 0.0), C64::new(0.0, 0.5)), &f, mc(1), mc(2)).unwrap();
    assert!(c.deviation_sigmas < 3.0, "{c:?}");
    assert!(c.product.relative_sigma() < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn prop_matched_legs_are_flow_invariant(seed in any::<u64>(), idx in 0usize..3, t in -2.0f64..2.0, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let m = RankOneModel::build(ModelName::ALL[idx]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tf, wf) = (random_tilts(&m, &mut rng), random_tilts(&m, &mut rng));
        let lam = C64::new(re, im) - m.rho_check;
        let g = m.random_group_scaled(&mut rng, 0.6);
        let leg = |g: &_| q_transform(&m, &tf, lam, Sign::Plus, g) * q_transform(&m, &wf, lam, Sign::Minus, g);
        let (a, b) = (leg(&g), leg(&(g * m.exp_a(t))));
        prop_assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()));
    }
}
