use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankone::regularize::*;
use rankone::{ModelName, NbarCoordinates, RankOneModel};

fn monomial(a: u32, b: u32) -> QSPolynomial {
    QSPolynomial::monomial(a, b, LambdaPoly::constant(1.0))
}

#[test]
fn euler_field_on_basic_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        for _ in 0..50 {
            let c = m.random_nbar_coords(&mut rng, 1.5);
            let lb = l_numeric(|x: &NbarCoordinates| x.angle_bracket(), &c, 1e-5);
            assert!((lb - 2.0 * c.angle_bracket()).abs() < 1e-7 * (1.0 + c.angle_bracket()));
            assert!(l_numeric(|_: &NbarCoordinates| 3.0, &c, 1e-5).abs() < 1e-12);
            let n = m.script_n(&c);
            let (q, _) = qs_at(&m, &c);
            let ln = l_numeric(|x: &NbarCoordinates| m.script_n(x), &c, 1e-5);
            assert!((ln / n + q - 2.0).abs() < 1e-7, "{name}");
        }
    }
}

#[test]
fn symbolic_l_matches_numeric_on_monomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let lam = C64::new(0.0, 0.0);
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        for a in 0..=4 {
            for b in 0..=(4 - a) {
                let p = monomial(a, b);
                let lp = l_symbolic(&p);
                for _ in 0..50 {
                    let c = m.random_nbar_coords(&mut rng, 1.5);
                    let num = l_numeric_c(|x: &NbarCoordinates| evaluate_qs(&m, &p, x, lam), &c, 1e-3);
                    let sym = evaluate_qs(&m, &lp, &c, lam);
                    assert!((num - sym).norm() < 1e-6 * (1.0 + sym.norm()), "{name} q^{a}s^{b}: {num} vs {sym}");
                }
            }
        }
    }
}

#[test]
fn q_at_the_identity_is_two() {
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        let v = evaluate_qs(&m, &monomial(1, 0), &NbarCoordinates::zero(&m), C64::new(0.4, 0.0));
        assert!((v - 2.0).norm() < 1e-14);
        assert_eq!(
            evaluate_qs(&m, &QSPolynomial::one(), &NbarCoordinates::zero(&m), C64::new(0.4, 0.0)),
            C64::new(1.0, 0.0)
        );
    }
}

#[test]
fn recursion_holds_numerically() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        let vs = v_sequence(&m, 5);
        for _ in 0..50 {
            let c = m.random_nbar_coords(&mut rng, 1.5);
            let lam = C64::new(rng.random_range(-1.0..2.0), rng.random_range(-3.0..3.0));
            for ell in 1..=5u32 {
                let r = recursion_residual(&m, &vs[ell as usize - 1], &vs[ell as usize], ell, lam, &c);
                assert!(r < 1e-6, "{name} ell={ell} lambda={lam}: {r}");
            }
        }
    }
}

#[test]
fn beta_vanishes_only_on_the_shifted_line() {
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        for ell in 1..=6u32 {
            let root = C64::new(-m.rho_check - (ell as f64 - 1.0), 0.0);
            assert_eq!(beta(&m, ell, root), C64::new(0.0, 0.0));
            assert!(beta(&m, ell, root + C64::new(0.0, 1e-3)).norm() > 1e-3);
        }
    }
}

#[test]
fn antidiagonal_normalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        for _ in 0..20 {
            let c = m.random_nbar_coords(&mut rng, 1.0);
            assert!(antidiagonal_normalization_residual(&m, &c).unwrap() < 1e-9, "{name}");
        }
    }
}

#[test]
fn antidiagonal_vanishing_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for name in ModelName::ALL {
        let m = RankOneModel::build(name);
        let vs = v_sequence(&m, 3);
        let dir = m.random_nbar_coords(&mut rng, 1.0);
        let lam = C64::new(0.3, 0.4);
        for (ell, v) in vs.iter().enumerate().skip(1) {
            let prof = antidiagonal_profile(&m, v, &dir, lam, &[-6.0, -7.0]).unwrap();
            // |Ṽ_ℓ| ∝ ⟨n̄_Δ⟩^ℓ near the identity.
            let slope = (prof[0].1 / prof[1].1).ln() / (prof[0].0 / prof[1].0).ln();
            assert!((slope - ell as f64).abs() < 1e-2, "{name} ell={ell}: {slope}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_weighted_degree_window(idx in 0usize..3, k in 1u32..9) {
        let m = RankOneModel::build(ModelName::ALL[idx]);
        let v = v_sequence(&m, k);
        for (ell, p) in v.iter().enumerate() {
            for ((a, b), c) in &p.terms {
                prop_assert!(a + 2 * b >= ell as u32 && a + 2 * b <= 2 * ell as u32);
                prop_assert!(!c.is_zero());
            }
        }
    }

    #[test]
    fn prop_l_is_a_derivation(a1 in 0u32..3, b1 in 0u32..3, a2 in 0u32..3, b2 in 0u32..3, q in -3.0f64..3.0, s in 0.0f64..2.0) {
        let (p1, p2) = (monomial(a1, b1), monomial(a2, b2));
        let prod = monomial(a1 + a2, b1 + b2);
        let lam = C64::new(0.0, 0.0);
        let lhs = l_symbolic(&prod).eval_qs(q, s, lam);
        let rhs = l_symbolic(&p1).eval_qs(q, s, lam) * p2.eval_qs(q, s, lam) + p1.eval_qs(q, s, lam) * l_symbolic(&p2).eval_qs(q, s, lam);
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn prop_recursion_residual(seed in any::<u64>(), idx in 0usize..3, re in -1.0f64..2.0, im in -3.0f64..3.0) {
        let m = RankOneModel::build(ModelName::ALL[idx]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = m.random_nbar_coords(&mut rng, 1.5);
        let vs = v_sequence(&m, 3);
        for ell in 1..=3u32 {
            let r = recursion_residual(&m, &vs[ell as usize - 1], &vs[ell as usize], ell, C64::new(re, im), &c);
            prop_assert!(r < 1e-6);
        }
    }
}
