//! Plain-text representation records.
//!
//! ```text
//! # twistlab representation
//! # source: origami sigma=(1 2 3 4) sigma'=(1 3 2 4)
//! a1 9.1276435867510951e-1 -2.3050218717350102e-1 1.2e-1 ...
//! ```
//!
//! One line per generator: its name and the coordinates `w x y z`, each in
//! scientific notation with 17 significant digits, which is enough for every
//! `f64` to read back bit for bit. Blank lines and other `#` lines are
//! ignored. Coordinates are accepted verbatim when their norm is within
//! `1e-12` of one.

use std::fmt::Write as _;

use super::{RepError, Representation};
use crate::origami::{GeneratorWord, GenKind};
use crate::{Quat, UnitQuat};

const HEADER: &str = "# twistlab representation";
const SOURCE: &str = "# source: ";

pub fn write_representation(rep: &Representation) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "{SOURCE}{}", rep.source()).unwrap();
    for (g, q) in rep.generators().iter().zip(rep.images()) {
        let q = q.quaternion();
        writeln!(out, "{g} {:.16e} {:.16e} {:.16e} {:.16e}", q.w, q.x, q.y, q.z).unwrap();
    }
    out
}

pub fn read_representation(text: &str) -> Result<Representation, RepError> {
    let mut source = String::new();
    let mut generators = Vec::new();
    let mut images = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let err = |msg: String| RepError::Parse { line: k + 1, msg };
        let line = line.trim();
        if let Some(s) = line.strip_prefix(SOURCE.trim_end()) {
            source = s.trim().to_string();
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        }
        let word = GeneratorWord::parse(fields[0]).map_err(|e| err(e.to_string()))?;
        let g = match word.letters() {
            [l] if !l.inverse => l.generator,
            _ => return Err(err(format!("'{}' is not a generator", fields[0]))),
        };
        debug_assert!(matches!(g.kind, GenKind::A | GenKind::B | GenKind::C));
        if generators.contains(&g) {
            return Err(err(format!("generator {g} listed twice")));
        }
        let mut c = [0.0; 4];
        for (slot, f) in c.iter_mut().zip(&fields[1..]) {
            *slot = f.parse().map_err(|_| err(format!("bad coordinate '{f}'")))?;
        }
        let q = UnitQuat::from_unit(Quat::from_array(c)).map_err(|e| err(e.to_string()))?;
        generators.push(g);
        images.push(q);
    }
    Representation::from_parts(generators, images, source)
}
