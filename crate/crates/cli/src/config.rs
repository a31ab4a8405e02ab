//! Experiment configuration.
//!
//! Config files are UTF-8, one `key = value` per line; `#` starts a comment
//! and blank lines are ignored. Keys are the long flag names (`surface`,
//! `sigma-prime`, `orbit-steps`, ...). Flags given on the command line
//! override the file.

use std::path::PathBuf;

use twistlab::foliation::BilinearSystem;
use twistlab::origami::{registry, Origami, Surface};

use crate::probe::{parse_probes, Probe};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Descent,
    Propagate,
    N4,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Descent => "descent",
            SamplerKind::Propagate => "propagate",
            SamplerKind::N4 => "n4",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceSpec {
    Named(String),
    Permutations { sigma: String, sigma_prime: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Example1,
    Example2,
    Example2Projective,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Example1 => "example1",
            SystemKind::Example2 => "example2",
            SystemKind::Example2Projective => "example2-projective",
        }
    }

    pub fn system(self) -> BilinearSystem {
        match self {
            SystemKind::Example1 => BilinearSystem::example1(),
            SystemKind::Example2 => BilinearSystem::example2_reduced(),
            SystemKind::Example2Projective => BilinearSystem::example2_projective(),
        }
    }
}

/// Everything a command may read. Unset values fall back to per-command
/// defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub surface: Option<String>,
    pub sigma: Option<String>,
    pub sigma_prime: Option<String>,
    pub sampler: Option<SamplerKind>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub samples: Option<usize>,
    pub steps: Option<usize>,
    pub orbit_steps: Option<usize>,
    pub tol: Option<f64>,
    pub min_success: Option<f64>,
    pub probes: Option<Vec<Probe>>,
    pub word: Option<String>,
    pub system: Option<SystemKind>,
    pub points: Option<usize>,
    pub alternations: Option<usize>,
    pub leaf_time: Option<f64>,
    pub out: Option<PathBuf>,
    pub timing: bool,
    pub json: bool,
}

pub const KEYS: &[&str] = &[
    "surface",
    "sigma",
    "sigma-prime",
    "sampler",
    "seed",
    "seeds",
    "samples",
    "steps",
    "orbit-steps",
    "tol",
    "min-success",
    "probes",
    "word",
    "system",
    "points",
    "alternations",
    "leaf-time",
    "out",
    "timing",
    "json",
];

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Parse(format!("{key}: cannot parse '{value}'")))
}

fn positive(key: &str, value: &str) -> Result<f64, CliError> {
    let x: f64 = number(key, value)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(CliError::Parse(format!("{key} must be positive, got {value}")));
    }
    Ok(x)
}

fn flag(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Parse(format!("{key}: expected true or false, got '{value}'"))),
    }
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "surface" => self.surface = Some(value.to_string()),
            "sigma" => self.sigma = Some(value.to_string()),
            "sigma-prime" | "sigma_prime" => self.sigma_prime = Some(value.to_string()),
            "sampler" => {
                self.sampler = Some(match value {
                    "descent" => SamplerKind::Descent,
                    "propagate" => SamplerKind::Propagate,
                    "n4" => SamplerKind::N4,
                    _ => {
                        return Err(CliError::Parse(format!(
                            "sampler: expected descent, propagate or n4, got '{value}'"
                        )))
                    }
                })
            }
            "seed" => self.seed = Some(number(key, value)?),
            "seeds" => self.seeds = Some(number(key, value)?),
            "samples" => self.samples = Some(number(key, value)?),
            "steps" => self.steps = Some(number(key, value)?),
            "orbit-steps" | "orbit_steps" => self.orbit_steps = Some(number(key, value)?),
            "tol" => self.tol = Some(positive(key, value)?),
            "min-success" | "min_success" => {
                let x: f64 = number(key, value)?;
                if !(0.0..=1.0).contains(&x) {
                    return Err(CliError::Parse(format!("min-success must lie in [0, 1], got {value}")));
                }
                self.min_success = Some(x);
            }
            "probes" => self.probes = Some(parse_probes(value)?),
            "word" => self.word = Some(value.to_string()),
            "system" => {
                self.system = Some(match value {
                    "example1" => SystemKind::Example1,
                    "example2" => SystemKind::Example2,
                    "example2-projective" => SystemKind::Example2Projective,
                    _ => {
                        return Err(CliError::Parse(format!(
                            "system: expected example1, example2 or example2-projective, got '{value}'"
                        )))
                    }
                })
            }
            "points" => self.points = Some(number(key, value)?),
            "alternations" => self.alternations = Some(number(key, value)?),
            "leaf-time" | "leaf_time" => self.leaf_time = Some(positive(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "timing" => self.timing = flag(key, value)?,
            "json" => self.json = flag(key, value)?,
            _ => return Err(CliError::Parse(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        cfg.merge_text(text)?;
        Ok(cfg)
    }

    pub fn merge_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = match line.find('#') {
                Some(k) => &line[..k],
                None => line,
            };
            if line.trim().is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Parse(format!("config line {}: expected key = value", n + 1)));
            };
            self.set(key.trim(), value)
                .map_err(|e| CliError::Parse(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn surface_spec(&self) -> Result<SurfaceSpec, CliError> {
        match (&self.surface, &self.sigma, &self.sigma_prime) {
            (Some(name), None, None) => Ok(SurfaceSpec::Named(name.clone())),
            (None, Some(s), Some(sp)) => Ok(SurfaceSpec::Permutations {
                sigma: s.clone(),
                sigma_prime: sp.clone(),
            }),
            (None, None, None) => Err(CliError::Parse("no surface given".into())),
            (Some(_), _, _) => Err(CliError::Parse(
                "give either a surface name or both permutations, not both".into(),
            )),
            _ => Err(CliError::Parse("both sigma and sigma-prime are needed".into())),
        }
    }

    /// The surface and a short tag naming it.
    pub fn resolve_surface(&self) -> Result<(Surface, String), CliError> {
        match self.surface_spec()? {
            SurfaceSpec::Named(name) => {
                let s = registry(&name).map_err(|e| CliError::Parse(e.to_string()))?;
                Ok((s, name.to_ascii_lowercase()))
            }
            SurfaceSpec::Permutations { sigma, sigma_prime } => {
                let o = Origami::from_cycle_notation(&sigma, &sigma_prime)
                    .map_err(|e| CliError::Parse(e.to_string()))?;
                let tag = format!("{}|{}", o.sigma(), o.sigma_prime());
                Ok((Surface::Origami(o), tag))
            }
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_files() {
        let cfg = ExperimentConfig::from_text(
            "# experiment\nsurface = sprime\nseeds=4 # inline\n\nprobes = tr(a1); tr(b1 a2)\ntol = 1e-9\n",
        )
        .unwrap();
        assert_eq!(cfg.surface.as_deref(), Some("sprime"));
        assert_eq!(cfg.seeds, Some(4));
        assert_eq!(cfg.probes.as_ref().unwrap().len(), 2);
        assert_eq!(cfg.tol, Some(1e-9));
    }

    #[test]
    fn rejects_bad_values() {
        for text in ["tol = -1", "seeds = many", "colour = red", "surface sprime", "sampler = gibbs"] {
            let e = ExperimentConfig::from_text(text).unwrap_err();
            assert!(e.to_string().contains("config line 1"), "{e}");
        }
    }

    #[test]
    fn surface_resolution() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("sigma", "(1)").unwrap();
        cfg.set("sigma-prime", "(1)").unwrap();
        let (s, tag) = cfg.resolve_surface().unwrap();
        assert_eq!(s.origami().unwrap().topology().genus, 1);
        assert_eq!(tag, "(1)|(1)");
        cfg.set("surface", "fig1").unwrap();
        assert!(cfg.resolve_surface().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.set("surface", "klein").unwrap();
        assert!(cfg.resolve_surface().is_err());
    }
}
