//! Single evaluations from the command line: `eval <expr> [model] [key=value …]`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use rankone::boundary::{BoundaryFunction, SphereRule};
use rankone::cfunc::{c_closed_form, default_order, CFunction};
use rankone::poisson::{scattering_eigenvalue, PoissonOrders};
use rankone::regularize::beta;
use rankone::{ModelName, RankOneModel};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(
        "unknown expression `{0}` (expected one of c, c_closed, c_continued, c_epsilon, poisson, beta, scattering)"
    )]
    UnknownExpr(String),
    #[error("malformed argument `{0}` (expected key=value)")]
    Malformed(String),
    #[error("unknown argument `{0}` for `{1}`")]
    UnknownArg(String, String),
    #[error("cannot parse `{key}` = `{value}`")]
    BadValue { key: String, value: String },
    #[error(transparent)]
    Compute(#[from] rankone::Error),
}

/// A computed value with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: C64,
    pub error: f64,
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.im == 0.0 {
            write!(f, "{:.15}  (error estimate {:.1e})", self.value.re, self.error)
        } else {
            write!(f, "{:.15} {:+.15}i  (error estimate {:.1e})", self.value.re, self.value.im, self.error)
        }
    }
}

struct Args {
    expr: String,
    model: RankOneModel,
    values: BTreeMap<String, String>,
}

impl Args {
    fn parse(expr: &str, args: &[String], allowed: &[&str]) -> Result<Args, EvalError> {
        let mut model = ModelName::H2R;
        let mut values = BTreeMap::new();
        for a in args {
            match a.split_once('=') {
                Some(("model", v)) => {
                    model = v.parse().map_err(|_| EvalError::BadValue { key: "model".into(), value: v.into() })?
                }
                Some((k, v)) => {
                    if !allowed.contains(&k) {
                        return Err(EvalError::UnknownArg(k.into(), expr.into()));
                    }
                    values.insert(k.to_string(), v.to_string());
                }
                None => match a.parse::<ModelName>() {
                    Ok(m) => model = m,
                    Err(_) => return Err(EvalError::Malformed(a.clone())),
                },
            }
        }
        Ok(Args { expr: expr.into(), model: RankOneModel::build(model), values })
    }

    fn complex(&self, key: &str, default: C64) -> Result<C64, EvalError> {
        match self.values.get(key) {
            Some(v) => parse_complex(v, self.model.rho_check)
                .ok_or_else(|| EvalError::BadValue { key: key.into(), value: v.clone() }),
            None => Ok(default),
        }
    }

    fn real(&self, key: &str, default: f64) -> Result<f64, EvalError> {
        let z = self.complex(key, C64::new(default, 0.0))?;
        if z.im != 0.0 {
            return Err(EvalError::BadValue { key: key.into(), value: self.values[key].clone() });
        }
        Ok(z.re)
    }

    fn int(&self, key: &str, default: u32) -> Result<u32, EvalError> {
        match self.values.get(key) {
            Some(v) => v.parse().map_err(|_| EvalError::BadValue { key: key.into(), value: v.clone() }),
            None => Ok(default),
        }
    }
}

/// Parses `1.5`, `-0.2+3i`, `2i`, and `rho`-relative forms such as `rho`, `-rho`, `rho+0.5i`.
pub fn parse_complex(s: &str, rho: f64) -> Option<C64> {
    let s = s.trim().replace(' ', "");
    let s = s.replace("rho", &rho.to_string());
    s.strip_prefix('+').unwrap_or(&s).parse::<C64>().ok()
}

pub fn evaluate(expr: &str, args: &[String]) -> Result<Evaluation, EvalError> {
    let allowed: &[&str] = match expr {
        "c" | "c_closed" => &["z"],
        "c_continued" => &["lambda", "k"],
        "c_epsilon" => &["lambda", "eps"],
        "poisson" => &["mu", "u", "ell", "order"],
        "beta" => &["ell", "lambda"],
        "scattering" => &["mu", "ell", "order"],
        _ => return Err(EvalError::UnknownExpr(expr.into())),
    };
    let a = Args::parse(expr, args, allowed)?;
    let m = &a.model;
    let rho = C64::new(m.rho_check, 0.0);
    match a.expr.as_str() {
        "c" => {
            let r = CFunction::new(m)?.c_integral(a.complex("z", rho)?)?;
            Ok(Evaluation { value: r.value, error: r.estimated_error })
        }
        "c_closed" => {
            let r = c_closed_form(m, a.complex("z", rho)?)?;
            Ok(Evaluation { value: r.value, error: r.estimated_error })
        }
        "c_continued" => {
            let lam = a.complex("lambda", C64::new(0.0, 0.0))?;
            let k = a.int("k", default_order(m, lam))?;
            let r = CFunction::new(m)?.c_continued(lam, k)?;
            Ok(Evaluation { value: r.value, error: r.estimated_error })
        }
        "c_epsilon" => {
            let r = CFunction::new(m)?.c_epsilon(a.complex("lambda", C64::new(0.0, 0.0))?, a.real("eps", 0.5)?)?;
            Ok(Evaluation { value: r.value, error: r.estimated_error })
        }
        "poisson" => {
            // P_μY_ℓ at exp(uȞ₀)·o, with the error taken from a refined rule.
            let mu = a.complex("mu", C64::new(0.0, 0.0))?;
            let g = m.exp_a(a.real("u", 0.5)?);
            let ell = a.int("ell", 0)? as usize;
            let order = a.int("order", PoissonOrders::for_model(m).eigen as u32)? as usize;
            let y =
                if ell == 0 { BoundaryFunction::constant(C64::new(1.0, 0.0)) } else { BoundaryFunction::zonal(m, ell) };
            let coarse = rankone::poisson::poisson(m, &y, mu, &g, &SphereRule::new(m, order));
            let fine = rankone::poisson::poisson(m, &y, mu, &g, &SphereRule::new(m, 2 * order));
            Ok(Evaluation { value: fine, error: (fine - coarse).norm() })
        }
        "beta" => {
            let ell = a.int("ell", 1)?;
            Ok(Evaluation { value: beta(m, ell, a.complex("lambda", C64::new(0.0, 0.0))?), error: 0.0 })
        }
        "scattering" => {
            let mu = a.complex("mu", C64::new(1e-6, 0.0))?;
            let ell = a.int("ell", 0)? as usize;
            let order = a.int("order", PoissonOrders::for_model(m).boundary as u32)? as usize;
            let fit = scattering_eigenvalue(m, mu, ell, order)?;
            Ok(Evaluation { value: fit.value, error: fit.fit_residual * fit.value.norm() })
        }
        _ => unreachable!("expression validated above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("rho", 0.5), Some(C64::new(0.5, 0.0)));
        assert_eq!(parse_complex("-rho", 2.0), Some(C64::new(-2.0, 0.0)));
        assert_eq!(parse_complex("0.3+0.5i", 1.0), Some(C64::new(0.3, 0.5)));
        assert_eq!(parse_complex("2i", 1.0), Some(C64::new(0.0, 2.0)));
        assert_eq!(parse_complex("-1.5", 1.0), Some(C64::new(-1.5, 0.0)));
        assert_eq!(parse_complex("x", 1.0), None);
    }

    #[test]
    fn normalization_value() {
        let e = evaluate("c", &["H2R".into(), "z=rho".into()]).unwrap();
        assert!((e.value.re - std::f64::consts::TAU).abs() < 1e-7);
    }

    #[test]
    fn beta_root() {
        let e = evaluate("beta", &["ell=1".into(), "lambda=-rho".into()]).unwrap();
        assert_eq!(e.value, C64::new(0.0, 0.0));
    }

    #[test]
    fn unknown_argument() {
        assert!(matches!(evaluate("beta", &["foo=1".into()]), Err(EvalError::UnknownArg(..))));
        assert!(matches!(evaluate("nope", &[]), Err(EvalError::UnknownExpr(_))));
    }
}
