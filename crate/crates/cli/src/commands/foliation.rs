use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use twistlab::foliation::{angle_gap, example1_invariant, leaf_flow, BracketSpan, Side};
use twistlab::rng::task_rng;

use super::{Command, Run};
use crate::config::{ExperimentConfig, SystemKind};
use crate::output::{num, record, Summary};
use crate::CliError;

pub const INVARIANT_DRIFT: f64 = 1e-8;
pub const RANK_MATCH: f64 = 0.95;

#[derive(Serialize)]
struct LeafRecord {
    kind: &'static str,
    task: usize,
    step: usize,
    side: Side,
    time: f64,
    point: Vec<f64>,
    invariant: Option<f64>,
}

#[derive(Serialize)]
struct PointRecord {
    kind: &'static str,
    task: usize,
    point: Vec<f64>,
    invariant: Option<f64>,
    max_drift: Option<f64>,
    bracket_rank: Option<usize>,
    level_set_dimension: usize,
    error: Option<String>,
}

/// Example 1: alternate leaf flows and track the invariant. Example 2:
/// compare the bracket rank with the level-set dimension at random points.
pub fn foliation(cfg: &ExperimentConfig) -> Result<(Run, String), CliError> {
    let kind = cfg.system.unwrap_or(SystemKind::Example1);
    let sys = kind.system();
    let seed = cfg.seed();
    let points = cfg.points.or(cfg.samples).unwrap_or(100);
    let alternations = cfg.alternations.or(cfg.steps).unwrap_or(20);
    let leaf_time = cfg.leaf_time.unwrap_or(1.0);
    let name = kind.name().to_string();

    let tasks: Vec<(PointRecord, Vec<LeafRecord>)> = match kind {
        SystemKind::Example1 => (0..points)
            .into_par_iter()
            .map(|task| {
                let mut rng = task_rng(seed, task as u64);
                let mut leaves = Vec::new();
                let mut rec = PointRecord {
                    kind: "point",
                    task,
                    point: Vec::new(),
                    invariant: None,
                    max_drift: None,
                    bracket_rank: None,
                    level_set_dimension: 0,
                    error: None,
                };
                let mut s = match sys.random_point(&mut rng) {
                    Ok(s) => s,
                    Err(e) => {
                        rec.error = Some(e.to_string());
                        return (rec, leaves);
                    }
                };
                rec.point = s.coordinates();
                rec.level_set_dimension = sys.level_set_dimension(&s);
                let start = match example1_invariant(&s) {
                    Ok(v) => v,
                    Err(e) => {
                        rec.error = Some(e.to_string());
                        return (rec, leaves);
                    }
                };
                rec.invariant = Some(start);
                let mut drift: f64 = 0.0;
                let mut side = Side::A;
                for step in 0..alternations {
                    let t = rng.random_range(-leaf_time..leaf_time);
                    let next = leaf_flow(&sys, &s, side, t).and_then(|n| example1_invariant(&n).map(|v| (n, v)));
                    match next {
                        Ok((n, v)) => {
                            drift = drift.max(angle_gap(v, start));
                            leaves.push(LeafRecord {
                                kind: "leaf",
                                task,
                                step: step + 1,
                                side,
                                time: t,
                                point: n.coordinates(),
                                invariant: Some(v),
                            });
                            s = n;
                        }
                        Err(e) => {
                            rec.error = Some(format!("alternation {}: {e}", step + 1));
                            break;
                        }
                    }
                    side = side.other();
                }
                rec.max_drift = Some(drift);
                (rec, leaves)
            })
            .collect(),
        SystemKind::Example2 | SystemKind::Example2Projective => {
            let span = BracketSpan::new(&sys, 3);
            (0..points)
                .into_par_iter()
                .map(|task| {
                    let mut rng = task_rng(seed, task as u64);
                    let rec = match sys.random_point(&mut rng) {
                        Ok(s) => PointRecord {
                            kind: "point",
                            task,
                            point: s.coordinates(),
                            invariant: None,
                            max_drift: None,
                            bracket_rank: Some(span.rank(&s)),
                            level_set_dimension: sys.level_set_dimension(&s),
                            error: None,
                        },
                        Err(e) => PointRecord {
                            kind: "point",
                            task,
                            point: Vec::new(),
                            invariant: None,
                            max_drift: None,
                            bracket_rank: None,
                            level_set_dimension: 0,
                            error: Some(e.to_string()),
                        },
                    };
                    (rec, Vec::new())
                })
                .collect()
        }
    };

    let mut problems = Vec::new();
    let mut summary;
    match kind {
        SystemKind::Example1 => {
            let max_drift = tasks.iter().filter_map(|(r, _)| r.max_drift).fold(0.0, f64::max);
            let defined = tasks.iter().filter(|(r, _)| r.error.is_none()).count();
            for (r, _) in &tasks {
                if let Some(e) = &r.error {
                    problems.push(format!("point {}: {e}", r.task));
                }
            }
            if max_drift >= INVARIANT_DRIFT {
                problems.push(format!("invariant drift {max_drift:e} >= {INVARIANT_DRIFT:e}"));
            }
            summary = Summary::new(&["system", "points", "alternations", "completed", "max_drift", "passed"]);
            summary.push(vec![
                name.clone(),
                points.to_string(),
                alternations.to_string(),
                defined.to_string(),
                num(max_drift),
                problems.is_empty().to_string(),
            ]);
        }
        _ => {
            let matches = tasks
                .iter()
                .filter(|(r, _)| r.bracket_rank == Some(r.level_set_dimension))
                .count();
            let rate = if points == 0 { 1.0 } else { matches as f64 / points as f64 };
            if rate < RANK_MATCH {
                problems.push(format!("bracket rank matches the level-set dimension at {rate} < {RANK_MATCH} of points"));
            }
            summary = Summary::new(&["system", "points", "rank_matches", "match_rate", "passed"]);
            summary.push(vec![
                name.clone(),
                points.to_string(),
                matches.to_string(),
                num(rate),
                problems.is_empty().to_string(),
            ]);
        }
    }

    let mut records = Vec::new();
    for (r, leaves) in &tasks {
        records.push(record(r));
        records.extend(leaves.iter().map(record));
    }
    let failure = (!problems.is_empty()).then(|| CliError::Certification(problems.join("; ")));
    Ok((
        Run { command: Command::Foliation, records, summary, text: None, failure },
        name,
    ))
}
