//! End-to-end acceptance: runs every suite on every model with default settings
//! and reports one pass/fail line per criterion.

use std::time::{Duration, Instant};

use rankone::ModelName;
use rankone_cli::{run_suite, CheckRecord, Settings, Suite, VerificationReport};

struct Run {
    model: ModelName,
    report: VerificationReport,
    wall: Duration,
}

struct Criterion {
    number: u32,
    title: &'static str,
    problems: Vec<String>,
    checked: usize,
}

impl Criterion {
    fn new(number: u32, title: &'static str) -> Criterion {
        Criterion { number, title, problems: Vec::new(), checked: 0 }
    }

    /// Requires at least one record under `prefix` on each of `models`, all passing.
    fn records(&mut self, runs: &[Run], models: &[ModelName], prefix: &str) {
        for run in runs.iter().filter(|r| models.contains(&r.model)) {
            let hits: Vec<&CheckRecord> = run.report.records.iter().filter(|r| r.id.starts_with(prefix)).collect();
            if hits.is_empty() {
                self.problems.push(format!("{}: no records under {prefix}", run.model));
            }
            for r in hits {
                self.checked += 1;
                if !r.passed {
                    self.problems.push(format!("{}: {} = {:.3e} vs {:.1e}", run.model, r.id, r.residual, r.tolerance));
                }
            }
        }
    }

    /// Requires every job producing records under `prefix` to finish within `limit`.
    fn runtime(&mut self, runs: &[Run], models: &[ModelName], prefix: &str, limit: Duration) {
        for run in runs.iter().filter(|r| models.contains(&r.model)) {
            for r in run.report.records.iter().filter(|r| r.id.starts_with(prefix)) {
                self.checked += 1;
                if r.runtime >= limit {
                    self.problems.push(format!("{}: {} took {:.1?} (limit {limit:?})", run.model, r.id, r.runtime));
                }
            }
        }
    }

    fn passed(&self) -> bool {
        self.checked > 0 && self.problems.is_empty()
    }

    fn print(&self) {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {status}  {} ({} checks)", self.number, self.title, self.checked);
        for p in &self.problems {
            println!("              {p}");
        }
    }
}

fn main() {
    const ALL: [ModelName; 3] = [ModelName::H2R, ModelName::H3R, ModelName::H2C];
    const PAIRING: [ModelName; 2] = [ModelName::H2R, ModelName::H2C];
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());

    let runs: Vec<Run> = ALL
        .iter()
        .map(|&model| {
            let mut settings = Settings::load(None, Some(model)).expect("default settings");
            settings.run.workers = workers;
            let start = Instant::now();
            let report = run_suite(Suite::All, &settings).expect("thread pool");
            let wall = start.elapsed();
            println!("{model}: {} checks in {wall:.1?}", report.records.len());
            Run { model, report, wall }
        })
        .collect();

    let mut criteria = Vec::new();

    let mut c = Criterion::new(1, "c-function integral against closed form on the 24-point grid");
    c.records(&runs, &ALL, "cfunction.integral_vs_closed_form");
    c.runtime(&runs, &ALL, "cfunction.integral_vs_closed_form", Duration::from_secs(60));
    criteria.push(c);

    let mut c = Criterion::new(2, "normalization c(rho) = vol(K/M)");
    c.records(&runs, &ALL, "cfunction.normalization");
    criteria.push(c);

    let mut c = Criterion::new(3, "analytic continuation matches closed form, independent of K");
    c.records(&runs, &ALL, "cfunction.continuation");
    criteria.push(c);

    let mut c = Criterion::new(4, "regularization recursion, V_1 and weighted degree");
    c.records(&runs, &ALL, "regularization.recursion");
    c.records(&runs, &ALL, "regularization.v1_symbolic");
    c.records(&runs, &ALL, "regularization.weighted_degree");
    criteria.push(c);

    let mut c = Criterion::new(5, "Jacobian of nu against the closed form");
    c.records(&runs, &ALL, "geometry.nu.jacobian");
    criteria.push(c);

    let mut c = Criterion::new(6, "pairing identity by Monte Carlo, with control");
    c.records(&runs, &PAIRING, "geometry.pairing.");
    c.runtime(&runs, &PAIRING, "geometry.pairing.", Duration::from_secs(300));
    criteria.push(c);

    let mut c = Criterion::new(7, "fiber projection of Q(T) equals the Poisson transform");
    c.records(&runs, &ALL, "poisson.projection.");
    criteria.push(c);

    let mut c = Criterion::new(8, "Poisson transforms are Laplace eigenfunctions, second order");
    c.records(&runs, &ALL, "poisson.laplace.");
    criteria.push(c);

    let mut c = Criterion::new(9, "Jordan derivatives and S_0 = Id");
    c.records(&runs, &ALL, "poisson.jordan.");
    c.records(&runs, &ALL, "poisson.scattering.identity.");
    criteria.push(c);

    let mut c = Criterion::new(10, "Patterson-Sullivan product formula");
    c.records(&runs, &PAIRING, "patterson.product_formula.");
    criteria.push(c);

    let mut c = Criterion::new(11, "cocycles, decompositions and full-suite runtime");
    c.records(&runs, &ALL, "decompositions.");
    c.records(&runs, &ALL, "boundary.");
    for run in &runs {
        c.checked += 1;
        if run.wall >= Duration::from_secs(600) {
            c.problems.push(format!("{}: verify all took {:.1?} (limit 10 min)", run.model, run.wall));
        }
    }
    criteria.push(c);

    for c in &criteria {
        c.print();
    }
    for run in &runs {
        for r in run.report.records.iter().filter(|r| !r.passed) {
            println!("failed on {}: {} = {:.3e} vs {:.1e}", run.model, r.id, r.residual, r.tolerance);
        }
    }
    let failed: Vec<u32> = criteria.iter().filter(|c| !c.passed()).map(|c| c.number).collect();
    if !failed.is_empty() {
        eprintln!("criteria failed: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
