use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use twistlab::invariants::{
    direction_candidate, direction_invariant, locate_rectangles, n4_invariant, orbit_invariance_test,
    InvariantError,
};
use twistlab::origami::{n4_presentation, Origami, Surface};
use twistlab::quat::haar;
use twistlab::repvar::{sample_descent_with, sample_n4_with, DescentOptions, Representation};
use twistlab::rng::task_rng;
use twistlab::twist::TwistWord;
use twistlab::ProjDirection;

use super::{check_sampler, default_sampler, draw, Command, Run};
use crate::config::{ExperimentConfig, SamplerKind};
use crate::output::{num, record, Summary};
use crate::CliError;

pub const DRIFT_TOL: f64 = 1e-8;
pub const PAIR_TOL: f64 = 1e-8;
pub const DIRECTION_SPREAD: f64 = 0.1;
pub const N4_RESIDUAL_TOL: f64 = 1e-10;
pub const N4_PRODUCT_TOL: f64 = 1e-10;
pub const N4_SUCCESS: f64 = 0.99;
pub const RATIO_SPREAD: f64 = 0.5;
/// Fresh draws allowed per task when the invariant is undefined at the
/// starting point.
const REDRAWS: usize = 8;

/// Certifies the invariant attached to the surface: the direction
/// invariant on origamis with a one-square rectangle, the trace ratio on
/// `n4`.
pub fn certify(cfg: &ExperimentConfig) -> Result<(Run, String), CliError> {
    let (surface, name) = cfg.resolve_surface()?;
    match &surface {
        Surface::Origami(o) => {
            if locate_rectangles(o).is_empty() {
                let run = Run {
                    command: Command::Certify,
                    records: Vec::new(),
                    summary: Summary::new(&["surface", "certified"]),
                    text: None,
                    failure: Some(CliError::Certification(format!(
                        "{name} has no one-square rectangle, so no invariant to certify"
                    ))),
                };
                return Ok((run, name));
            }
            certify_direction(cfg, &surface, o, name)
        }
        Surface::HandCoded(p) if *p == n4_presentation() => certify_n4(cfg, name),
        Surface::HandCoded(_) => Err(CliError::Parse(format!("no certification for {name}"))),
    }
}

fn unit(d: &ProjDirection) -> [f64; 3] {
    let u = d.unit();
    [u.x, u.y, u.z]
}

#[derive(Serialize)]
struct OrbitRecord {
    kind: &'static str,
    task: usize,
    max_drift: Option<f64>,
    variance: Option<f64>,
    max_residual: Option<f64>,
    a_direction: Option<[f64; 3]>,
    error: Option<String>,
}

#[derive(Serialize)]
struct DirectionRecord {
    kind: &'static str,
    task: usize,
    a_direction: Option<[f64; 3]>,
    b_direction: Option<[f64; 3]>,
    distance: Option<f64>,
    error: Option<String>,
}

fn certifiable<R: Rng + ?Sized>(
    surface: &Surface,
    o: &Origami,
    sampler: SamplerKind,
    rng: &mut R,
) -> Result<Representation, String> {
    let mut last = String::new();
    for _ in 0..REDRAWS {
        match draw(surface, sampler, 1e-12, rng) {
            Ok((rep, _)) => match direction_invariant(&rep, o) {
                Ok(_) => return Ok(rep),
                Err(e) => last = e.to_string(),
            },
            Err(e) => last = e.to_string(),
        }
    }
    Err(last)
}

fn certify_direction(
    cfg: &ExperimentConfig,
    surface: &Surface,
    o: &Origami,
    name: String,
) -> Result<(Run, String), CliError> {
    let sampler = cfg.sampler.unwrap_or_else(|| default_sampler(surface));
    check_sampler(surface, sampler)?;
    let seed = cfg.seed();
    let seeds = cfg.seeds.unwrap_or(32);
    let steps = cfg.orbit_steps.or(cfg.steps).unwrap_or(1000);
    let samples = cfg.samples.unwrap_or(100);

    let orbits: Vec<OrbitRecord> = (0..seeds)
        .into_par_iter()
        .map(|task| {
            let mut rng = task_rng(seed, task as u64);
            let fail = |e: String| OrbitRecord {
                kind: "orbit",
                task,
                max_drift: None,
                variance: None,
                max_residual: None,
                a_direction: None,
                error: Some(e),
            };
            let rep = match certifiable(surface, o, sampler, &mut rng) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let word = TwistWord::random(o, steps, &mut rng);
            let start = direction_invariant(&rep, o).expect("checked by certifiable");
            match orbit_invariance_test(&rep, o, direction_candidate(o), &word) {
                Ok((report, _)) => OrbitRecord {
                    kind: "orbit",
                    task,
                    max_drift: Some(report.max_drift),
                    variance: Some(report.variance),
                    max_residual: Some(report.max_residual),
                    a_direction: Some(unit(&start.a_direction)),
                    error: None,
                },
                Err(e) => fail(e.to_string()),
            }
        })
        .collect();

    // independent samples for non-constancy, on a separate stream range
    let pairs: Vec<(DirectionRecord, Option<ProjDirection>)> = (0..samples)
        .into_par_iter()
        .map(|task| {
            let mut rng = task_rng(seed, (seeds + task) as u64);
            match certifiable(surface, o, sampler, &mut rng).and_then(|rep| {
                direction_invariant(&rep, o).map_err(|e: InvariantError| e.to_string())
            }) {
                Ok(pair) => (
                    DirectionRecord {
                        kind: "direction",
                        task,
                        a_direction: Some(unit(&pair.a_direction)),
                        b_direction: Some(unit(&pair.b_direction)),
                        distance: Some(pair.distance),
                        error: None,
                    },
                    Some(pair.a_direction),
                ),
                Err(e) => (
                    DirectionRecord {
                        kind: "direction",
                        task,
                        a_direction: None,
                        b_direction: None,
                        distance: None,
                        error: Some(e),
                    },
                    None,
                ),
            }
        })
        .collect();

    let dirs: Vec<ProjDirection> = pairs.iter().filter_map(|(_, d)| *d).collect();
    let mut spread: f64 = 0.0;
    for (k, u) in dirs.iter().enumerate() {
        for v in &dirs[k + 1..] {
            spread = spread.max(u.angle_to(v));
        }
    }
    let max_drift = orbits.iter().filter_map(|r| r.max_drift).fold(0.0, f64::max);
    let max_residual = orbits.iter().filter_map(|r| r.max_residual).fold(0.0, f64::max);
    let max_pair = pairs.iter().filter_map(|(r, _)| r.distance).fold(0.0, f64::max);

    let mut problems = Vec::new();
    for r in &orbits {
        if let Some(e) = &r.error {
            problems.push(format!("orbit task {}: {e}", r.task));
        } else if let Some(d) = r.max_drift.filter(|&d| d >= DRIFT_TOL) {
            problems.push(format!("orbit drift {d:e} >= {DRIFT_TOL:e} (task {})", r.task));
        }
    }
    for (r, _) in &pairs {
        if let Some(e) = &r.error {
            problems.push(format!("sample {}: {e}", r.task));
        }
    }
    if max_pair >= PAIR_TOL {
        problems.push(format!("line distance {max_pair:e} >= {PAIR_TOL:e}"));
    }
    if spread < DIRECTION_SPREAD && samples > 1 {
        problems.push(format!("direction spread {spread} < {DIRECTION_SPREAD} rad"));
    }

    let mut summary = Summary::new(&[
        "surface",
        "seeds",
        "orbit_steps",
        "max_drift",
        "max_residual",
        "samples",
        "max_line_distance",
        "direction_spread",
        "passed",
    ]);
    summary.push(vec![
        name.clone(),
        seeds.to_string(),
        steps.to_string(),
        num(max_drift),
        num(max_residual),
        samples.to_string(),
        num(max_pair),
        num(spread),
        problems.is_empty().to_string(),
    ]);
    let mut records: Vec<_> = orbits.iter().map(record).collect();
    records.extend(pairs.iter().map(|(r, _)| record(r)));
    let failure = (!problems.is_empty()).then(|| CliError::Certification(problems.join("; ")));
    Ok((
        Run { command: Command::Certify, records, summary, text: None, failure },
        name,
    ))
}

#[derive(Serialize)]
struct N4Record {
    kind: &'static str,
    task: usize,
    sampler: &'static str,
    ok: bool,
    residual: Option<f64>,
    product_residual: Option<f64>,
    ratio: Option<f64>,
    dual_ratio: Option<f64>,
    /// Whether `ρ(a₁), ρ(a₂)` are exactly the drawn inputs.
    witness: Option<bool>,
    error: Option<String>,
}

impl N4Record {
    fn new(task: usize, sampler: &'static str) -> Self {
        Self {
            kind: "n4",
            task,
            sampler,
            ok: false,
            residual: None,
            product_residual: None,
            ratio: None,
            dual_ratio: None,
            witness: None,
            error: None,
        }
    }

    fn fill(&mut self, rep: &Representation) {
        let p = n4_presentation();
        let res = rep.residual(&p).expect("n4 layout").max;
        self.residual = Some(res);
        self.ok = res < N4_RESIDUAL_TOL;
        match n4_invariant(rep) {
            Ok(r) => {
                self.product_residual = Some(r.product_residual);
                self.ratio = Some(r.ratio);
                self.dual_ratio = Some(r.dual_ratio);
            }
            Err(InvariantError::UndefinedRatio { product_residual }) => {
                self.product_residual = Some(product_residual);
            }
            Err(e) => self.error = Some(e.to_string()),
        }
    }
}

fn certify_n4(cfg: &ExperimentConfig, name: String) -> Result<(Run, String), CliError> {
    let seed = cfg.seed();
    let samples = cfg.samples.unwrap_or(1000);
    let descent_samples = cfg.seeds.unwrap_or((samples / 10).max(1));
    let generators = n4_presentation().generators().to_vec();

    let direct: Vec<N4Record> = (0..samples)
        .into_par_iter()
        .map(|task| {
            let mut rng = task_rng(seed, task as u64);
            let mut rec = N4Record::new(task, SamplerKind::N4.name());
            let (a1, a2) = (haar(&mut rng), haar(&mut rng));
            match sample_n4_with(a1, a2, &mut rng) {
                Ok(rep) => {
                    rec.fill(&rep);
                    rec.witness = Some(rep.get(generators[0]).ok() == Some(a1) && rep.get(generators[1]).ok() == Some(a2));
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect();
    let descent: Vec<N4Record> = (0..descent_samples)
        .into_par_iter()
        .map(|task| {
            let mut rng = task_rng(seed, (samples + task) as u64);
            let mut rec = N4Record::new(task, SamplerKind::Descent.name());
            match sample_descent_with(&n4_presentation(), &mut rng, &DescentOptions::default()) {
                Ok(r) => rec.fill(&r.representation),
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect();

    let successes = direct.iter().filter(|r| r.ok).count();
    let rate = if samples == 0 { 1.0 } else { successes as f64 / samples as f64 };
    let valid = || direct.iter().chain(&descent).filter(|r| r.ok);
    let max_product = valid().filter_map(|r| r.product_residual).map(f64::abs).fold(0.0, f64::max);
    let ratios: Vec<f64> = direct.iter().filter(|r| r.ok).filter_map(|r| r.ratio).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = if ratios.is_empty() { 0.0 } else { hi - lo };
    let witness = direct.iter().all(|r| r.witness != Some(false));

    let mut problems = Vec::new();
    if rate < N4_SUCCESS {
        problems.push(format!("n4 sampler success {rate} < {N4_SUCCESS} (residual < {N4_RESIDUAL_TOL:e})"));
    }
    if max_product >= N4_PRODUCT_TOL {
        problems.push(format!("product identity residual {max_product:e} >= {N4_PRODUCT_TOL:e}"));
    }
    if spread < RATIO_SPREAD {
        problems.push(format!("ratio spread {spread} < {RATIO_SPREAD}"));
    }
    if !witness {
        problems.push("surjectivity witness: returned (A1, A2) differ from the input".into());
    }

    let mut summary = Summary::new(&[
        "surface",
        "samples",
        "success_rate",
        "descent_samples",
        "descent_valid",
        "max_product_residual",
        "ratio_min",
        "ratio_max",
        "ratio_spread",
        "witness",
        "passed",
    ]);
    summary.push(vec![
        name.clone(),
        samples.to_string(),
        num(rate),
        descent_samples.to_string(),
        descent.iter().filter(|r| r.ok).count().to_string(),
        num(max_product),
        num(if ratios.is_empty() { f64::NAN } else { lo }),
        num(if ratios.is_empty() { f64::NAN } else { hi }),
        num(spread),
        witness.to_string(),
        problems.is_empty().to_string(),
    ]);
    let records = direct.iter().chain(&descent).map(record).collect();
    let failure = (!problems.is_empty()).then(|| CliError::Certification(problems.join("; ")));
    Ok((
        Run { command: Command::Certify, records, summary, text: None, failure },
        name,
    ))
}
