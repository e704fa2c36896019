//! Run settings: per-model defaults overlaid with a TOML file.

use std::path::Path;

use rankone::ModelName;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub run: RunSettings,
    pub tolerances: Tolerances,
    pub sampling: Sampling,
    pub poisson: PoissonSettings,
    pub pairing: PairingSettings,
    pub haar: HaarSettings,
    pub patterson: PattersonSettings,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    pub model: ModelName,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub decomposition: f64,
    pub cocycle: f64,
    pub intertwining: f64,
    pub jordan_boundary: f64,
    pub c_integral: f64,
    pub normalization: f64,
    pub continuation: f64,
    pub symbolic_l: f64,
    pub recursion: f64,
    pub round_trip: f64,
    pub jacobian: f64,
    pub pairing_sigmas: f64,
    pub pairing_sigma_budget: f64,
    pub control_sigmas: f64,
    pub haar: f64,
    pub haar_pushforward: f64,
    pub haar_sigmas: f64,
    pub projection: f64,
    pub laplace: f64,
    pub jordan_first: f64,
    pub jordan_second: f64,
    pub scattering_identity: f64,
    pub scattering_fit: f64,
    pub ps_relative: f64,
    pub ps_sigmas: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub random_points: usize,
    pub regularization_points: usize,
    pub jacobian_points: usize,
    pub projection_points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonSettings {
    pub boundary_order: usize,
    pub eigen_order: usize,
    pub sphere_order: usize,
    pub laplace_step: f64,
    pub jordan_step: f64,
    pub dmu_first: f64,
    pub dmu_second: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingSettings {
    pub radius: f64,
    pub eps: f64,
    pub tilt: f64,
    pub samples: usize,
    pub batches: usize,
    pub rhs_method: Method,
    pub rhs_order: usize,
    pub rhs_samples: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaarSettings {
    pub quadrature: usize,
    pub fiber_quadrature: usize,
    pub max_quadrature_dim: usize,
    pub samples: usize,
    pub batches: usize,
    pub test_functions: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PattersonSettings {
    pub method: Method,
    pub data_sets: usize,
    pub radius: f64,
    pub truncation: f64,
    pub radon_order: usize,
    pub definition_order: usize,
    pub product_order: usize,
    pub samples: usize,
    pub batches: usize,
}

impl Settings {
    pub fn defaults(model: ModelName) -> Settings {
        let (h2r, h3r) = (model == ModelName::H2R, model == ModelName::H3R);
        let pick = |a: f64, b: f64, c: f64| {
            if h2r {
                a
            } else if h3r {
                b
            } else {
                c
            }
        };
        let picku = |a: usize, b: usize, c: usize| {
            if h2r {
                a
            } else if h3r {
                b
            } else {
                c
            }
        };
        Settings {
            run: RunSettings { model, seed: 1, workers: 1 },
            tolerances: Tolerances {
                decomposition: 1e-8,
                cocycle: 1e-8,
                intertwining: 1e-8,
                jordan_boundary: 1e-6,
                c_integral: 1e-6,
                normalization: 1e-7,
                continuation: 1e-4,
                symbolic_l: 1e-6,
                recursion: 1e-6,
                round_trip: 1e-7,
                jacobian: 1e-5,
                pairing_sigmas: 3.0,
                pairing_sigma_budget: 1e-2,
                control_sigmas: 10.0,
                haar: pick(1e-6, 1e-2, 1e-2),
                haar_pushforward: pick(1e-6, 1e-4, 1e-3),
                haar_sigmas: 3.0,
                projection: 1e-7,
                laplace: 1e-3,
                jordan_first: 1e-2,
                jordan_second: 5e-2,
                scattering_identity: 1e-4,
                scattering_fit: 1e-6,
                ps_relative: 1e-4,
                ps_sigmas: 3.0,
            },
            sampling: Sampling {
                random_points: 100,
                regularization_points: 50,
                jacobian_points: 100,
                projection_points: 10,
            },
            poisson: PoissonSettings {
                boundary_order: picku(2, 16, 28),
                eigen_order: picku(24, 12, 8),
                sphere_order: picku(10, 8, 6),
                laplace_step: 1e-2,
                jordan_step: 1e-2,
                dmu_first: 1e-4,
                dmu_second: 1e-2,
            },
            pairing: PairingSettings {
                radius: 1.0,
                eps: 0.5,
                tilt: pick(4.0, 5.0, 6.0),
                samples: 1_000_000,
                batches: 20,
                rhs_method: if h2r || h3r { Method::Quadrature } else { Method::MonteCarlo },
                rhs_order: picku(64, 16, 8),
                rhs_samples: 200_000,
            },
            haar: HaarSettings {
                quadrature: 128,
                fiber_quadrature: picku(128, 48, 32),
                max_quadrature_dim: picku(3, 0, 0),
                samples: 1_000_000,
                batches: 20,
                test_functions: 5,
            },
            patterson: PattersonSettings {
                method: if h2r { Method::Quadrature } else { Method::MonteCarlo },
                data_sets: 3,
                radius: 1.0,
                truncation: 2.0,
                radon_order: 32,
                definition_order: 64,
                product_order: 32,
                samples: 100_000,
                batches: 20,
            },
        }
    }

    /// Defaults for the model named by `model` (or the file, or H2R), overlaid with the file.
    pub fn load(path: Option<&Path>, model: Option<ModelName>) -> Result<Settings, ConfigError> {
        let user = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|source| ConfigError::Io { path: p.display().to_string(), source })?;
                text.parse::<toml::Table>().map_err(|e| ConfigError::Parse(e.to_string()))?
            }
            None => toml::Table::new(),
        };
        let file_model = match user.get("run").and_then(|r| r.get("model")) {
            Some(v) => {
                let s = v.as_str().ok_or_else(|| invalid("run.model", "expected a string"))?;
                Some(s.parse::<ModelName>().map_err(|e| invalid("run.model", &e.to_string()))?)
            }
            None => None,
        };
        let model = model.or(file_model).unwrap_or(ModelName::H2R);
        let defaults = Settings::defaults(model);
        let mut merged = toml::Table::try_from(&defaults).map_err(|e| ConfigError::Parse(e.to_string()))?;
        overlay(&mut merged, &user, "")?;
        let mut settings: Settings =
            merged.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        settings.run.model = model;
        settings.validate()?;
        Ok(settings)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.run.workers == 0 {
            return Err(invalid("run.workers", "must be at least 1"));
        }
        if !(self.pairing.eps > 0.0 && self.pairing.eps <= 1.0) {
            return Err(invalid("pairing.eps", "must lie in (0, 1]"));
        }
        if self.pairing.batches < 2 || self.haar.batches < 2 || self.patterson.batches < 2 {
            return Err(invalid("batches", "need at least 2 batches for an error estimate"));
        }
        Ok(())
    }
}

fn invalid(key: &str, message: &str) -> ConfigError {
    ConfigError::Invalid { key: key.into(), message: message.into() }
}

fn overlay(base: &mut toml::Table, user: &toml::Table, prefix: &str) -> Result<(), ConfigError> {
    for (k, v) in user {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        let Some(slot) = base.get_mut(k) else {
            return Err(ConfigError::UnknownKey(key));
        };
        match (slot, v) {
            (toml::Value::Table(b), toml::Value::Table(u)) => overlay(b, u, &key)?,
            (toml::Value::Table(_), _) => return Err(invalid(&key, "expected a table")),
            (slot @ toml::Value::Float(_), toml::Value::Integer(i)) => *slot = toml::Value::Float(*i as f64),
            (slot, v) => {
                if std::mem::discriminant(slot) != std::mem::discriminant(v) {
                    return Err(invalid(&key, &format!("expected {}", slot.type_str())));
                }
                *slot = v.clone();
            }
        }
    }
    Ok(())
}
