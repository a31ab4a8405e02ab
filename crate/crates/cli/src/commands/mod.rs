mod certify;
mod foliation;
mod info;
mod orbit;
mod sample;

use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use serde_json::Value;
use twistlab::origami::{n4_presentation, Origami, Surface};
use twistlab::quat::haar;
use twistlab::repvar::{
    sample_descent_with, sample_n4_with, sample_propagate_with, DescentOptions, RepError, Representation,
};

use crate::config::{ExperimentConfig, SamplerKind};
use crate::output::{record, Summary};
use crate::CliError;

pub use certify::certify;
pub use foliation::foliation;
pub use info::{info, info_report, CylinderInfo, InfoReport};
pub use orbit::orbit;
pub use sample::sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Info,
    Sample,
    Orbit,
    Certify,
    Foliation,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Info => "info",
            Command::Sample => "sample",
            Command::Orbit => "orbit",
            Command::Certify => "certify",
            Command::Foliation => "foliation",
        }
    }
}

/// Output of one command. `failure` carries a convergence or certification
/// failure; the records are still worth writing in that case.
#[derive(Debug)]
pub struct Run {
    pub command: Command,
    pub records: Vec<Value>,
    pub summary: Summary,
    pub text: Option<String>,
    pub failure: Option<CliError>,
}

#[derive(Serialize)]
struct RunRecord<'a> {
    kind: &'static str,
    command: &'a str,
    experiment: &'a str,
    seed: u64,
    passed: bool,
    failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_clock_s: Option<f64>,
}

/// Runs `command`, appending a closing `run` record (with the wall-clock
/// time only when `cfg.timing` is set, to keep the default output
/// reproducible).
pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Run, CliError> {
    let start = Instant::now();
    let (mut run, experiment) = match command {
        Command::Info => info(cfg)?,
        Command::Sample => sample(cfg)?,
        Command::Orbit => orbit(cfg)?,
        Command::Certify => certify(cfg)?,
        Command::Foliation => foliation(cfg)?,
    };
    let elapsed = start.elapsed().as_secs_f64();
    let failure = run.failure.as_ref().map(|e| e.to_string());
    run.records.push(record(&RunRecord {
        kind: "run",
        command: command.name(),
        experiment: &experiment,
        seed: cfg.seed(),
        passed: run.failure.is_none(),
        failure,
        wall_clock_s: cfg.timing.then_some(elapsed),
    }));
    Ok(run)
}

pub(crate) fn default_sampler(surface: &Surface) -> SamplerKind {
    match surface {
        Surface::Origami(_) => SamplerKind::Propagate,
        Surface::HandCoded(_) => SamplerKind::N4,
    }
}

pub(crate) fn require_origami<'a>(surface: &'a Surface, what: &str) -> Result<&'a Origami, CliError> {
    surface
        .origami()
        .ok_or_else(|| CliError::Parse(format!("{what} needs an origami surface")))
}

pub(crate) fn check_sampler(surface: &Surface, sampler: SamplerKind) -> Result<(), CliError> {
    match sampler {
        SamplerKind::Descent => Ok(()),
        SamplerKind::Propagate => require_origami(surface, "the propagate sampler").map(|_| ()),
        SamplerKind::N4 => {
            if surface.presentation() == n4_presentation() {
                Ok(())
            } else {
                Err(CliError::Parse("the n4 sampler only applies to surface n4".into()))
            }
        }
    }
}

/// One draw from `sampler`, with the descent iteration count when relevant.
pub(crate) fn draw<R: Rng + ?Sized>(
    surface: &Surface,
    sampler: SamplerKind,
    tol: f64,
    rng: &mut R,
) -> Result<(Representation, Option<usize>), RepError> {
    match sampler {
        SamplerKind::Descent => {
            let opts = DescentOptions { tol, ..DescentOptions::default() };
            sample_descent_with(&surface.presentation(), rng, &opts)
                .map(|r| (r.representation, Some(r.iterations)))
        }
        SamplerKind::Propagate => {
            let o = surface.origami().expect("checked by check_sampler");
            sample_propagate_with(o, rng).map(|r| (r, None))
        }
        SamplerKind::N4 => {
            let (a1, a2) = (haar(rng), haar(rng));
            sample_n4_with(a1, a2, rng).map(|r| (r, None))
        }
    }
}

pub(crate) fn images(rep: &Representation) -> Vec<[f64; 4]> {
    rep.images().iter().map(|q| q.quaternion().to_array()).collect()
}
