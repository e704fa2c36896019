use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankone::boundary::{principal_series, BoundaryFunction, SphereRule};
use rankone::lie_core::inv;
use rankone::poisson::*;
use rankone::{ModelName, RankOneModel};

fn model_strategy() -> impl Strategy<Value = RankOneModel> {
    (0usize..3).prop_map(|i| RankOneModel::build(ModelName::ALL[i]))
}

fn tilted(m: &RankOneModel) -> BoundaryFunction {
    let mut a = vec![0.0; m.n];
    a[0] = 0.5;
    a[m.n - 1] = -0.3;
    BoundaryFunction::exp_linear(m, a, vec![0.2; m.n])
}

#[test]
fn constant_at_the_origin_is_the_sphere_volume() {
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        let rule = SphereRule::new(&m, PoissonOrders::for_model(&m).sphere);
        let v = poisson(&m, &BoundaryFunction::constant(C64::new(1.0, 0.0)), C64::new(0.3, 0.7), &m.identity(), &rule);
        assert!((v - m.vol_sphere).norm() < 1e-12, "{name}: {v}");
    }
}

#[test]
fn h2r_poisson_at_rho_is_stable_under_refinement() {
    let m = RankOneModel::build(ModelName::H2R);
    let one = BoundaryFunction::constant(C64::new(1.0, 0.0));
    let v = poisson_checked(&m, &one, C64::new(m.rho_check, 0.0), &m.exp_a(1.0), 40, 1e-8);
    assert!(v.is_ok(), "{v:?}");
}

#[test]
fn exceptional_sets() {
    let m = RankOneModel::build(ModelName::H2R);
    let mut ex = exceptional_set(&m, 1);
    ex.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(ex, vec![-3.5, -2.5, -1.5, -0.5]);
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        assert!(!is_exceptional(&m, C64::new(m.rho_check, 0.0), 1e-9));
    }
}

#[test]
fn scattering_inverse_pair_on_constants() {
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        let order = PoissonOrders::for_model(&m).boundary;
        let mu = C64::new(0.4, 0.3);
        let a = scattering_eigenvalue(&m, mu, 0, order).unwrap().value;
        let b = scattering_eigenvalue(&m, -mu, 0, order).unwrap().value;
        assert!((a * b - 1.0).norm() < 1e-6, "{name}: {}", a * b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn prop_constant_transform_is_k_invariant(m in model_strategy(), seed in any::<u64>(), re in -1.0f64..1.0, im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = PoissonOrders::for_model(&m).boundary;
        let one = BoundaryFunction::constant(C64::new(1.0, 0.0));
        let mu = C64::new(re, im);
        let g = m.random_group_scaled(&mut rng, 0.4);
        let k = m.random_k(&mut rng);
        let a = poisson(&m, &one, mu, &g, &peak_rule(&m, &g, order));
        let b = poisson(&m, &one, mu, &(k * g), &peak_rule(&m, &(k * g), order));
        prop_assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn prop_poisson_intertwines(m in model_strategy(), seed in any::<u64>(), re in -1.0f64..1.0, im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rule = SphereRule::new(&m, if m.n == 4 { 40 } else { 24 });
        let t = tilted(&m);
        let mu = C64::new(re, im);
        let gamma = m.random_group_scaled(&mut rng, 0.3);
        let x = m.random_group_scaled(&mut rng, 0.3);
        let moved = principal_series(&m, -mu, &inv(&gamma), &t);
        let lhs = poisson(&m, &t, mu, &(gamma * x), &rule);
        let rhs = poisson(&m, &moved, mu, &x, &rule);
        prop_assert!((lhs - rhs).norm() < 1e-7 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn prop_laplace_residual_is_second_order(m in model_strategy(), re in 0.0f64..1.0, im in -1.0f64..1.0) {
        let orders = PoissonOrders::for_model(&m);
        let study = laplace_convergence(&m, &tilted(&m), C64::new(re, im), &m.exp_a(0.2), 1e-2, orders);
        prop_assert!(study.confirms(2.0, 0.3, 1e-12), "{study:?}");
    }
}
