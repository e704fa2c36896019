//! Identity suites. Each suite is a list of independent jobs; a job draws from
//! its own random stream so results do not depend on scheduling.

use std::time::Instant;

use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankone::RankOneModel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::report::{CheckRecord, VerificationReport};

mod boundary;
mod cfunction;
mod decompositions;
mod geometry;
mod patterson;
mod poisson;
mod regularization;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Decompositions,
    Boundary,
    Poisson,
    Cfunction,
    Regularization,
    Geometry,
    Patterson,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Decompositions,
        Suite::Boundary,
        Suite::Poisson,
        Suite::Cfunction,
        Suite::Regularization,
        Suite::Geometry,
        Suite::Patterson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Decompositions => "decompositions",
            Suite::Boundary => "boundary",
            Suite::Poisson => "poisson",
            Suite::Cfunction => "cfunction",
            Suite::Regularization => "regularization",
            Suite::Geometry => "geometry",
            Suite::Patterson => "patterson",
            Suite::All => "all",
        }
    }

    pub fn jobs(self, ctx: &Ctx) -> Vec<Job> {
        match self {
            Suite::Decompositions => decompositions::jobs(),
            Suite::Boundary => boundary::jobs(),
            Suite::Poisson => poisson::jobs(ctx),
            Suite::Cfunction => cfunction::jobs(),
            Suite::Regularization => regularization::jobs(),
            Suite::Geometry => geometry::jobs(ctx),
            Suite::Patterson => patterson::jobs(ctx),
            Suite::All => Suite::EACH.iter().flat_map(|s| s.jobs(ctx)).collect(),
        }
    }
}

/// Model and settings shared by every job of a run.
pub struct Ctx {
    pub model: RankOneModel,
    pub settings: Settings,
}

type JobFn = Box<dyn Fn(&Ctx, &mut ChaCha8Rng) -> Vec<CheckRecord> + Send + Sync>;

pub struct Job {
    pub name: String,
    run: JobFn,
}

impl Job {
    pub fn new<F>(name: impl Into<String>, run: F) -> Job
    where
        F: Fn(&Ctx, &mut ChaCha8Rng) -> Vec<CheckRecord> + Send + Sync + 'static,
    {
        Job { name: name.into(), run: Box::new(run) }
    }

    fn execute(&self, ctx: &Ctx) -> Vec<CheckRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.settings.run.seed);
        rng.set_stream(stream_id(&self.name));
        let start = Instant::now();
        let mut records = (self.run)(ctx, &mut rng);
        let elapsed = start.elapsed();
        for r in &mut records {
            r.runtime = elapsed;
        }
        records
    }
}

/// FNV-1a of the job name, a stable stream selector.
fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn run_suite(suite: Suite, settings: &Settings) -> Result<VerificationReport, rayon::ThreadPoolBuildError> {
    let ctx = Ctx { model: RankOneModel::build(settings.run.model), settings: settings.clone() };
    let jobs = suite.jobs(&ctx);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(settings.run.workers).build()?;
    let records: Vec<CheckRecord> = pool.install(|| jobs.par_iter().flat_map_iter(|j| j.execute(&ctx)).collect());
    Ok(VerificationReport::new(suite.name(), settings.clone(), records))
}

/// Largest finite value, or NaN if any value is NaN.
pub(crate) fn worst<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(0.0, |acc: f64, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}
