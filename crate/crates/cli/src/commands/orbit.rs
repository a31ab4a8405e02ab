use rayon::prelude::*;
use serde::Serialize;
use twistlab::rng::task_rng;
use twistlab::twist::{twist, TwistWord};

use super::{check_sampler, default_sampler, draw, require_origami, Command, Run};
use crate::config::ExperimentConfig;
use crate::output::{num, record, Summary};
use crate::probe::{check_probes, evaluate, parse_probes};
use crate::CliError;

#[derive(Serialize)]
struct StepRecord {
    kind: &'static str,
    task: usize,
    step: usize,
    generator: Option<String>,
    residual: f64,
    probes: Vec<f64>,
}

struct Task {
    steps: Vec<StepRecord>,
    error: Option<String>,
}

/// Follows random (or given) twist words from independent samples and
/// records the probes after every step. Exploratory: no contract.
pub fn orbit(cfg: &ExperimentConfig) -> Result<(Run, String), CliError> {
    let (surface, name) = cfg.resolve_surface()?;
    let o = require_origami(&surface, "orbit")?;
    let sampler = cfg.sampler.unwrap_or_else(|| default_sampler(&surface));
    check_sampler(&surface, sampler)?;
    let p = surface.presentation();
    let probes = match &cfg.probes {
        Some(p) => p.clone(),
        None => parse_probes("tr(a1);tr(b1)")?,
    };
    check_probes(&probes, &p)?;
    let fixed = match &cfg.word {
        Some(w) => {
            let w = TwistWord::parse(w).map_err(|e| CliError::Parse(e.to_string()))?;
            for g in w.generators() {
                o.cylinder(g.direction, g.cylinder).map_err(|e| CliError::Parse(e.to_string()))?;
            }
            Some(w)
        }
        None => None,
    };
    let steps = cfg.steps.unwrap_or(1000);
    let seeds = cfg.seeds.unwrap_or(1);
    let tol = cfg.tol.unwrap_or(1e-10);
    let seed = cfg.seed();

    let tasks: Vec<Task> = (0..seeds)
        .into_par_iter()
        .map(|task| {
            let mut rng = task_rng(seed, task as u64);
            let rep = match draw(&surface, sampler, tol * 1e-2, &mut rng) {
                Ok((rep, _)) => rep,
                Err(e) => return Task { steps: Vec::new(), error: Some(e.to_string()) },
            };
            let word = fixed.clone().unwrap_or_else(|| TwistWord::random(o, steps, &mut rng));
            let observe = |rep: &twistlab::repvar::Representation, step, generator| StepRecord {
                kind: "step",
                task,
                step,
                generator,
                residual: rep.residual(&p).expect("layout").max,
                probes: evaluate(&probes, rep).expect("probes checked"),
            };
            let mut out = vec![observe(&rep, 0, None)];
            let mut cur = rep;
            for (k, &g) in word.generators().iter().enumerate() {
                cur = match twist(&cur, o, g) {
                    Ok(r) => r,
                    Err(e) => return Task { steps: out, error: Some(e.to_string()) },
                };
                out.push(observe(&cur, k + 1, Some(g.to_string())));
            }
            Task { steps: out, error: None }
        })
        .collect();

    let mut summary = Summary::new(&[
        "task", "probe", "initial", "min", "max", "spread", "variance", "max_residual",
    ]);
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (task, t) in tasks.iter().enumerate() {
        records.extend(t.steps.iter().map(record));
        if let Some(e) = &t.error {
            errors.push(format!("task {task}: {e}"));
        }
        if t.steps.is_empty() {
            continue;
        }
        let max_residual = t.steps.iter().map(|s| s.residual).fold(0.0, f64::max);
        for (k, probe) in probes.iter().enumerate() {
            let vals: Vec<f64> = t.steps.iter().map(|s| s.probes[k]).collect();
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = twistlab::stats::mean(&vals);
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
            summary.push(vec![
                task.to_string(),
                probe.label(),
                num(vals[0]),
                num(lo),
                num(hi),
                num(hi - lo),
                num(var),
                num(max_residual),
            ]);
        }
    }
    let failure = (!errors.is_empty()).then(|| CliError::Convergence(errors.join("; ")));
    Ok((
        Run { command: Command::Orbit, records, summary, text: None, failure },
        name,
    ))
}
