//! Complex Gamma function via the Lanczos approximation.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal-branch-agnostic log Gamma; only `exp` of the result is meaningful.
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // reflection
        let s = (C64::new(PI, 0.0) * z).sin();
        return C64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(C64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    C64::new(0.5 * (2.0 * PI).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: C64) -> C64 {
    ln_gamma(z).exp()
}

/// Reciprocal Gamma, entire; exactly zero at the non-positive integers.
pub fn rgamma(z: C64) -> C64 {
    if nonpositive_integer(z, 0.0).is_some() {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        let s = (C64::new(PI, 0.0) * z).sin();
        return s / PI * ln_gamma(C64::new(1.0, 0.0) - z).exp();
    }
    (-ln_gamma(z)).exp()
}

/// Returns `m` if `z` lies within `tol` of `-m` for a non-negative integer `m`.
pub fn nonpositive_integer(z: C64, tol: f64) -> Option<u64> {
    if z.re > tol {
        return None;
    }
    let m = (-z.re).round();
    if (z.re + m).abs() <= tol && z.im.abs() <= tol {
        Some(m as u64)
    } else {
        None
    }
}

/// Volume of the unit sphere S^{n-1} in R^n.
pub fn sphere_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(C64::new(h, 0.0)).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_at_half_integers() {
        assert!((gamma(C64::new(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(C64::new(5.0, 0.0)).re - 24.0).abs() < 1e-12);
        assert!((gamma(C64::new(-0.5, 0.0)).re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gamma_complex_matches_mpmath() {
        // mpmath.gamma(1.3+2.7j)
        let g = gamma(C64::new(1.3, 2.7));
        let want = C64::new(0.033_887_257_841_516_17, 0.072_931_753_396_800_56);
        assert!((g - want).norm() / want.norm() < 1e-12, "{g}");
    }

    #[test]
    fn rgamma_vanishes_at_poles() {
        assert_eq!(rgamma(C64::new(-3.0, 0.0)), C64::new(0.0, 0.0));
        let near = rgamma(C64::new(-3.0 + 1e-9, 0.0));
        assert!(near.norm() < 1e-8);
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_volume(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_volume(4) - 2.0 * PI * PI).abs() < 1e-12);
    }
}
