use rayon::prelude::*;
use serde::Serialize;
use twistlab::rng::task_rng;

use super::{check_sampler, default_sampler, draw, images, Command, Run};
use crate::config::ExperimentConfig;
use crate::output::{num, record, Summary};
use crate::probe::{check_probes, evaluate, parse_probes};
use crate::CliError;

#[derive(Serialize)]
struct SampleRecord {
    kind: &'static str,
    task: usize,
    sampler: &'static str,
    ok: bool,
    residual: Option<f64>,
    iterations: Option<usize>,
    probes: Vec<f64>,
    images: Vec<[f64; 4]>,
    error: Option<String>,
}

pub fn sample(cfg: &ExperimentConfig) -> Result<(Run, String), CliError> {
    let (surface, name) = cfg.resolve_surface()?;
    let sampler = cfg.sampler.unwrap_or_else(|| default_sampler(&surface));
    check_sampler(&surface, sampler)?;
    let p = surface.presentation();
    let probes = match &cfg.probes {
        Some(p) => p.clone(),
        None => parse_probes("tr(a1);tr(b1)")?,
    };
    check_probes(&probes, &p)?;
    let n = cfg.samples.unwrap_or(100);
    let tol = cfg.tol.unwrap_or(1e-10);
    let seed = cfg.seed();

    let rows: Vec<SampleRecord> = (0..n)
        .into_par_iter()
        .map(|task| {
            let mut rng = task_rng(seed, task as u64);
            // descent gets a hundredfold margin below the acceptance tolerance
            match draw(&surface, sampler, tol * 1e-2, &mut rng) {
                Ok((rep, iterations)) => {
                    let residual = rep.residual(&p).expect("layout matches").max;
                    SampleRecord {
                        kind: "sample",
                        task,
                        sampler: sampler.name(),
                        ok: residual < tol,
                        residual: Some(residual),
                        iterations,
                        probes: evaluate(&probes, &rep).expect("probes checked"),
                        images: images(&rep),
                        error: None,
                    }
                }
                Err(e) => SampleRecord {
                    kind: "sample",
                    task,
                    sampler: sampler.name(),
                    ok: false,
                    residual: None,
                    iterations: None,
                    probes: Vec::new(),
                    images: Vec::new(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let successes = rows.iter().filter(|r| r.ok).count();
    let rate = if n == 0 { 1.0 } else { successes as f64 / n as f64 };
    let max_residual = rows.iter().filter_map(|r| r.residual).fold(0.0, f64::max);
    let mut header = vec!["surface", "sampler", "samples", "successes", "success_rate", "max_residual"];
    let labels: Vec<String> = probes.iter().map(|p| format!("mean {}", p.label())).collect();
    header.extend(labels.iter().map(|s| s.as_str()));
    let mut summary = Summary::new(&header);
    let mut row = vec![
        name.clone(),
        sampler.name().to_string(),
        n.to_string(),
        successes.to_string(),
        num(rate),
        num(max_residual),
    ];
    for k in 0..probes.len() {
        let vals: Vec<f64> = rows.iter().filter(|r| r.ok).map(|r| r.probes[k]).collect();
        row.push(num(twistlab::stats::mean(&vals)));
    }
    summary.push(row);

    let min = cfg.min_success.unwrap_or(0.95);
    let failure = (rate < min).then(|| {
        CliError::Convergence(format!(
            "success rate {rate} < {min} (residual < {tol:e}) with sampler {}",
            sampler.name()
        ))
    });
    Ok((
        Run {
            command: Command::Sample,
            records: rows.iter().map(record).collect(),
            summary,
            text: None,
            failure,
        },
        name,
    ))
}
