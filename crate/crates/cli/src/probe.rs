//! Trace probes.
//!
//! ```text
//! probes := probe (';' probe)* ';'?
//! probe  := 'tr' '(' word ')'
//! ```
//!
//! `word` is a generator word as accepted by `GeneratorWord::parse`
//! (`a1 b2^-1`, `a1.b2^-1`, `1` for the identity). Whitespace is allowed
//! around every token. Each probe records `tr ρ(word)`.

use std::fmt;

use twistlab::origami::{GeneratorWord, SurfacePresentation};
use twistlab::repvar::{RepError, Representation};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub word: GeneratorWord,
}

impl Probe {
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tr({})", self.word)
    }
}

pub fn parse_probes(text: &str) -> Result<Vec<Probe>, CliError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(';') {
        let start = offset;
        offset += part.len() + 1;
        let trimmed = part.trim();
        if trimmed.is_empty() {
            if offset > text.len() && !out.is_empty() {
                // trailing separator
                continue;
            }
            return Err(CliError::Parse(format!("probe at byte {start}: empty probe")));
        }
        let lead = part.len() - part.trim_start().len();
        let at = start + lead;
        let Some(rest) = trimmed.strip_prefix("tr") else {
            return Err(CliError::Parse(format!("probe at byte {at}: expected 'tr('")));
        };
        let rest = rest.trim_start();
        let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
            return Err(CliError::Parse(format!(
                "probe at byte {at}: expected a word in parentheses"
            )));
        };
        let word = GeneratorWord::parse(inner.trim()).map_err(|e| {
            CliError::Parse(format!("probe at byte {at}: {e}"))
        })?;
        out.push(Probe { word });
    }
    Ok(out)
}

/// Checks that every probe only mentions generators of `p`.
pub fn check_probes(probes: &[Probe], p: &SurfacePresentation) -> Result<(), CliError> {
    for probe in probes {
        if let Some(g) = probe.word.generators().find(|&g| p.position(g).is_none()) {
            return Err(CliError::Parse(format!("probe {probe} uses unknown generator {g}")));
        }
    }
    Ok(())
}

pub fn evaluate(probes: &[Probe], rep: &Representation) -> Result<Vec<f64>, RepError> {
    probes
        .iter()
        .map(|p| rep.evaluate_word(&p.word).map(|q| q.trace()))
        .collect()
}
