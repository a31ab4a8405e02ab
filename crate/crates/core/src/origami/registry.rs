//! Named example surfaces.
//!
//! * `fig1`: `σ = (1 2 3 4)`, `σ′ = (1 3 2 4)`, genus 2 with two vertices.
//! * `sprime`: `σ = (1)(2 3)`, `σ′ = (1 2 3)`, three squares and one vertex.
//!   Reconstructed from its square relations `a₁b₂ = b₁a₁` and
//!   `a₂a₃b₁ = b₂a₃a₂`; the labels may be a relabeling of the original figure.
//! * `l22`: `σ = (1 2)(3)`, `σ′ = (1 3)(2)`, the three-square L. A
//!   reconstruction with genus 2, two cylinders per direction and multitwists
//!   `[[1,2],[0,1]]`, `[[1,0],[2,1]]`; labels may differ from the figure.
//! * `n4`: hand-coded presentation of the genus-4 non-orientable surface with
//!   generators `a₁,a₂,b₁,b₂,c₁,c₂` and relations
//!   `a₁b₁ = b₂a₂`, `c₂⁻¹a₁c₁ = a₂`, `c₂⁻¹b₁c₁ = b₂`.
//! * `torus`: one square.

use super::{
    Generator, GeneratorWord, Letter, Origami, OrigamiError, PresentationSource, SurfacePresentation,
};

pub const SURFACE_NAMES: &[&str] = &["fig1", "sprime", "l22", "n4", "torus"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Surface {
    Origami(Origami),
    HandCoded(SurfacePresentation),
}

impl Surface {
    pub fn presentation(&self) -> SurfacePresentation {
        match self {
            Surface::Origami(o) => o.square_relators(),
            Surface::HandCoded(p) => p.clone(),
        }
    }

    pub fn origami(&self) -> Option<&Origami> {
        match self {
            Surface::Origami(o) => Some(o),
            Surface::HandCoded(_) => None,
        }
    }
}

pub fn registry(name: &str) -> Result<Surface, OrigamiError> {
    let origami = |s: &str, sp: &str| {
        Origami::from_cycle_notation(s, sp).map(Surface::Origami)
    };
    match name.to_ascii_lowercase().as_str() {
        "fig1" => origami("(1 2 3 4)", "(1 3 2 4)"),
        "sprime" => origami("(1)(2 3)", "(1 2 3)"),
        "l22" => origami("(1 2)(3)", "(1 3)(2)"),
        "torus" => origami("(1)", "(1)"),
        "n4" => Ok(Surface::HandCoded(n4_presentation())),
        other => Err(OrigamiError::UnknownName(other.to_string())),
    }
}

pub fn n4_presentation() -> SurfacePresentation {
    let (a1, a2, b1, b2, c1, c2) = (
        Generator::a(1),
        Generator::a(2),
        Generator::b(1),
        Generator::b(2),
        Generator::c(1),
        Generator::c(2),
    );
    let relators = vec![
        // a1 b1 = b2 a2
        GeneratorWord::new([Letter::new(a1), Letter::new(b1), Letter::inv(a2), Letter::inv(b2)]),
        // c2^-1 a1 c1 = a2
        GeneratorWord::new([Letter::inv(c2), Letter::new(a1), Letter::new(c1), Letter::inv(a2)]),
        // c2^-1 b1 c1 = b2
        GeneratorWord::new([Letter::inv(c2), Letter::new(b1), Letter::new(c1), Letter::inv(b2)]),
    ];
    SurfacePresentation::new(
        vec![a1, a2, b1, b2, c1, c2],
        relators,
        PresentationSource::HandCoded("n4".to_string()),
    )
    .expect("n4 relators use declared generators")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_origami_validates_with_expected_genus() {
        for (name, genus) in [("fig1", 2), ("sprime", 2), ("l22", 2), ("torus", 1)] {
            let o = registry(name).unwrap();
            let o = o.origami().unwrap();
            assert!(o.validate().is_ok());
            assert_eq!(o.topology().genus, genus, "{name}");
        }
    }

    #[test]
    fn n4_relators() {
        let p = registry("N4").unwrap().presentation();
        let text: Vec<String> = p.relators().iter().map(|r| r.to_string()).collect();
        assert_eq!(
            text,
            vec!["a1 b1 a2^-1 b2^-1", "c2^-1 a1 c1 a2^-1", "c2^-1 b1 c1 b2^-1"]
        );
        assert_eq!(p.generators().len(), 6);
    }

    #[test]
    fn unknown_names() {
        assert_eq!(registry("klein"), Err(OrigamiError::UnknownName("klein".into())));
    }
}
