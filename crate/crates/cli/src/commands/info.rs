use std::fmt::Write as _;

use serde::Serialize;
use twistlab::origami::{Direction, Multitwist, Surface};

use super::Run;
use crate::config::ExperimentConfig;
use crate::output::{record, Summary};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderInfo {
    pub direction: Direction,
    pub id: usize,
    /// One-indexed squares in cycle order.
    pub squares: Vec<usize>,
    pub circumference: usize,
    pub core_word: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoReport {
    pub kind: &'static str,
    pub surface: String,
    pub degree: Option<usize>,
    pub sigma: Option<String>,
    pub sigma_prime: Option<String>,
    pub genus: Option<i64>,
    pub euler_characteristic: Option<i64>,
    pub vertices: Option<usize>,
    /// Corner cycles (one-indexed squares), one per vertex.
    pub vertex_cycles: Vec<Vec<usize>>,
    pub cylinders: Vec<CylinderInfo>,
    pub multitwists: Vec<Multitwist>,
    pub generators: Vec<String>,
    pub relators: Vec<String>,
}

pub fn info_report(surface: &Surface, name: &str) -> InfoReport {
    let p = surface.presentation();
    let mut report = InfoReport {
        kind: "info",
        surface: name.to_string(),
        degree: None,
        sigma: None,
        sigma_prime: None,
        genus: None,
        euler_characteristic: None,
        vertices: None,
        vertex_cycles: Vec::new(),
        cylinders: Vec::new(),
        multitwists: Vec::new(),
        generators: p.generators().iter().map(|g| g.to_string()).collect(),
        relators: p.relators().iter().map(|r| r.to_string()).collect(),
    };
    if let Some(o) = surface.origami() {
        let t = o.topology();
        report.degree = Some(o.degree());
        report.sigma = Some(o.sigma().to_string());
        report.sigma_prime = Some(o.sigma_prime().to_string());
        report.genus = Some(t.genus);
        report.euler_characteristic = Some(t.euler_characteristic);
        report.vertices = Some(t.vertex_count);
        report.vertex_cycles = o
            .corner_permutation()
            .cycles()
            .into_iter()
            .map(|c| c.into_iter().map(|i| i + 1).collect())
            .collect();
        for dir in [Direction::Horizontal, Direction::Vertical] {
            for c in o.cylinders(dir) {
                let core = o.core_word(&c, c.cycle[0]).expect("basepoint on the cylinder");
                report.cylinders.push(CylinderInfo {
                    direction: dir,
                    id: c.id,
                    squares: c.cycle.iter().map(|i| i + 1).collect(),
                    circumference: c.circumference(),
                    core_word: core.to_string(),
                });
            }
            report.multitwists.push(o.multitwist(dir));
        }
    }
    report
}

fn matrix(m: &[[i64; 2]; 2]) -> String {
    format!("[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1])
}

fn render(r: &InfoReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "surface {}", r.surface);
    if let (Some(d), Some(g)) = (r.degree, r.genus) {
        let _ = writeln!(s, "squares {d}, genus {g}, euler characteristic {}", r.euler_characteristic.unwrap_or(0));
        let _ = writeln!(s, "sigma  {}", r.sigma.as_deref().unwrap_or(""));
        let _ = writeln!(s, "sigma' {}", r.sigma_prime.as_deref().unwrap_or(""));
        let _ = writeln!(s, "vertices {}: {:?}", r.vertex_cycles.len(), r.vertex_cycles);
        for c in &r.cylinders {
            let _ = writeln!(
                s,
                "{} cylinder {}: squares {:?}, circumference {}, core {}",
                c.direction, c.id, c.squares, c.circumference, c.core_word
            );
        }
        for m in &r.multitwists {
            let _ = writeln!(
                s,
                "{} multitwist {} (exponents {:?})",
                m.direction,
                matrix(&m.matrix),
                m.exponents
            );
        }
    }
    let _ = writeln!(s, "generators {}", r.generators.join(" "));
    for rel in &r.relators {
        let _ = writeln!(s, "relator {rel}");
    }
    s
}

pub fn info(cfg: &ExperimentConfig) -> Result<(Run, String), CliError> {
    let (surface, name) = cfg.resolve_surface()?;
    let report = info_report(&surface, &name);
    let mut summary = Summary::new(&["surface", "degree", "genus", "vertices", "direction", "cylinders", "matrix"]);
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    for m in &report.multitwists {
        summary.push(vec![
            name.clone(),
            opt(report.degree),
            report.genus.map(|g| g.to_string()).unwrap_or_default(),
            opt(report.vertices),
            m.direction.to_string(),
            m.exponents.len().to_string(),
            matrix(&m.matrix),
        ]);
    }
    let text = render(&report);
    Ok((
        Run {
            command: super::Command::Info,
            records: vec![record(&report)],
            summary,
            text: Some(text),
            failure: None,
        },
        name,
    ))
}
