//! Square-tiled surfaces (origamis) given by a pair of permutations.
//!
//! Square `i` has left edge `a_i` and bottom edge `b_i`. `σ(i)` is the square
//! to the right of `i` and `σ′(i)` the square above it, so the right edge of
//! square `i` is `a_{σ(i)}` and its top edge is `b_{σ′(i)}`. Reading the
//! boundary of square `i` gives the square relation
//! `a_i · b_{σ′(i)} = b_i · a_{σ(i)}`.

mod perm;
mod registry;
mod word;

pub use perm::{max_point, parse_cycles, PermError, Permutation};
pub use registry::{n4_presentation, registry, Surface, SURFACE_NAMES};
pub use word::{GenKind, Generator, GeneratorWord, Letter, WordParseError};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrigamiError {
    #[error("permutations generate an intransitive group; orbits {orbits:?}")]
    NotTransitive { orbits: Vec<Vec<usize>> },
    #[error("σ has degree {sigma} but σ′ has degree {sigma_prime}")]
    DegreeMismatch { sigma: usize, sigma_prime: usize },
    #[error("an origami needs at least one square")]
    Empty,
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("square {basepoint} is not on the cylinder")]
    BasepointOutsideCylinder { basepoint: usize },
    #[error("no {direction} cylinder with id {id}")]
    UnknownCylinder { direction: Direction, id: usize },
    #[error("unknown surface name '{0}'")]
    UnknownName(String),
    #[error("relator mentions generator {0} outside the presentation")]
    UnknownGenerator(Generator),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Horizontal => write!(f, "horizontal"),
            Direction::Vertical => write!(f, "vertical"),
        }
    }
}

/// A maximal cylinder: a cycle of `σ` (horizontal) or of `σ′` (vertical).
///
/// `cycle` holds zero-indexed squares starting at the smallest one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    pub direction: Direction,
    pub id: usize,
    pub cycle: Vec<usize>,
}

impl Cylinder {
    pub fn circumference(&self) -> usize {
        self.cycle.len()
    }

    pub fn contains(&self, square: usize) -> bool {
        self.cycle.contains(&square)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub vertex_count: usize,
    pub euler_characteristic: i64,
    pub genus: i64,
}

/// Affine multitwist in one direction: a parabolic in `SL(2, Z)` whose shear
/// is the lcm of the circumferences, acting on cylinder `j` as the
/// `shear / circumference(j)`-th power of its Dehn twist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multitwist {
    pub direction: Direction,
    pub shear: u64,
    pub matrix: [[i64; 2]; 2],
    pub exponents: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PresentationSource {
    Origami(String),
    HandCoded(String),
}

impl PresentationSource {
    pub fn tag(&self) -> &str {
        match self {
            PresentationSource::Origami(t) | PresentationSource::HandCoded(t) => t,
        }
    }
}

/// Generators and relators of a surface group, every relator `= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfacePresentation {
    generators: Vec<Generator>,
    relators: Vec<GeneratorWord>,
    source: PresentationSource,
}

impl SurfacePresentation {
    pub fn new(
        generators: Vec<Generator>,
        relators: Vec<GeneratorWord>,
        source: PresentationSource,
    ) -> Result<Self, OrigamiError> {
        for r in &relators {
            if let Some(g) = r.generators().find(|g| !generators.contains(g)) {
                return Err(OrigamiError::UnknownGenerator(g));
            }
        }
        Ok(Self { generators, relators, source })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relators(&self) -> &[GeneratorWord] {
        &self.relators
    }

    pub fn source(&self) -> &PresentationSource {
        &self.source
    }

    pub fn position(&self, g: Generator) -> Option<usize> {
        self.generators.iter().position(|&h| h == g)
    }
}

/// Connected origami on `d` squares.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Origami {
    sigma: Permutation,
    sigma_prime: Permutation,
}

impl Origami {
    /// Validates connectedness: `⟨σ, σ′⟩` must act transitively.
    pub fn new(sigma: Permutation, sigma_prime: Permutation) -> Result<Self, OrigamiError> {
        if sigma.degree() != sigma_prime.degree() {
            return Err(OrigamiError::DegreeMismatch {
                sigma: sigma.degree(),
                sigma_prime: sigma_prime.degree(),
            });
        }
        if sigma.degree() == 0 {
            return Err(OrigamiError::Empty);
        }
        let o = Self { sigma, sigma_prime };
        o.validate()?;
        Ok(o)
    }

    /// Parses both permutations in cycle notation; the degree is the largest
    /// point mentioned in either.
    pub fn from_cycle_notation(sigma: &str, sigma_prime: &str) -> Result<Self, OrigamiError> {
        let s = parse_cycles(sigma)?;
        let sp = parse_cycles(sigma_prime)?;
        let d = max_point(&s).max(max_point(&sp));
        Self::new(Permutation::from_cycles(d, &s)?, Permutation::from_cycles(d, &sp)?)
    }

    pub fn degree(&self) -> usize {
        self.sigma.degree()
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn sigma_prime(&self) -> &Permutation {
        &self.sigma_prime
    }

    /// Orbit flood-fill of `⟨σ, σ′⟩`.
    pub fn validate(&self) -> Result<(), OrigamiError> {
        let orbits = self.orbits();
        if orbits.len() == 1 {
            Ok(())
        } else {
            Err(OrigamiError::NotTransitive {
                orbits: orbits
                    .into_iter()
                    .map(|o| o.into_iter().map(|i| i + 1).collect())
                    .collect(),
            })
        }
    }

    fn orbits(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut orbits = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut orbit = BTreeSet::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(x) = stack.pop() {
                orbit.insert(x);
                for y in [self.sigma.apply(x), self.sigma_prime.apply(x)] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            orbits.push(orbit.into_iter().collect());
        }
        orbits
    }

    /// Commutator `σ′⁻¹ σ⁻¹ σ′ σ` whose cycles are the vertices (fixed points
    /// are regular vertices).
    pub fn corner_permutation(&self) -> Permutation {
        let s = &self.sigma;
        let sp = &self.sigma_prime;
        sp.inverse().compose(&s.inverse()).compose(sp).compose(s)
    }

    pub fn topology(&self) -> Topology {
        let d = self.degree() as i64;
        let v = self.corner_permutation().cycles().len();
        let chi = v as i64 - 2 * d + d;
        Topology {
            vertex_count: v,
            euler_characteristic: chi,
            genus: (2 - chi) / 2,
        }
    }

    fn permutation(&self, direction: Direction) -> &Permutation {
        match direction {
            Direction::Horizontal => &self.sigma,
            Direction::Vertical => &self.sigma_prime,
        }
    }

    /// Cylinders in canonical order (by smallest square), ids from 1.
    pub fn cylinders(&self, direction: Direction) -> Vec<Cylinder> {
        self.permutation(direction)
            .cycles()
            .into_iter()
            .enumerate()
            .map(|(k, cycle)| Cylinder { direction, id: k + 1, cycle })
            .collect()
    }

    pub fn cylinder(&self, direction: Direction, id: usize) -> Result<Cylinder, OrigamiError> {
        self.cylinders(direction)
            .into_iter()
            .find(|c| c.id == id)
            .ok_or(OrigamiError::UnknownCylinder { direction, id })
    }

    /// Core curve of `cyl` read from `basepoint` (zero-indexed square):
    /// `b_i b_{σ(i)} …` for horizontal cylinders, `a_i a_{σ′(i)} …` for
    /// vertical ones.
    pub fn core_word(&self, cyl: &Cylinder, basepoint: usize) -> Result<GeneratorWord, OrigamiError> {
        if !cyl.contains(basepoint) {
            return Err(OrigamiError::BasepointOutsideCylinder { basepoint: basepoint + 1 });
        }
        let p = self.permutation(cyl.direction);
        let mut gens = Vec::with_capacity(cyl.circumference());
        let mut i = basepoint;
        for _ in 0..cyl.circumference() {
            gens.push(match cyl.direction {
                Direction::Horizontal => Generator::b(i + 1),
                Direction::Vertical => Generator::a(i + 1),
            });
            i = p.apply(i);
        }
        Ok(GeneratorWord::positive(gens))
    }

    /// Generators `a_1..a_d, b_1..b_d` in this order.
    pub fn generators(&self) -> Vec<Generator> {
        let d = self.degree();
        (1..=d).map(Generator::a).chain((1..=d).map(Generator::b)).collect()
    }

    /// Relator of square `i` (zero-indexed): `a_i b_{σ′(i)} a_{σ(i)}⁻¹ b_i⁻¹`.
    pub fn square_relator(&self, i: usize) -> GeneratorWord {
        GeneratorWord::new([
            Letter::new(Generator::a(i + 1)),
            Letter::new(Generator::b(self.sigma_prime.apply(i) + 1)),
            Letter::inv(Generator::a(self.sigma.apply(i) + 1)),
            Letter::inv(Generator::b(i + 1)),
        ])
    }

    pub fn square_relators(&self) -> SurfacePresentation {
        let relators = (0..self.degree()).map(|i| self.square_relator(i)).collect();
        SurfacePresentation::new(
            self.generators(),
            relators,
            PresentationSource::Origami(self.tag()),
        )
        .expect("square relators only use a_i, b_i")
    }

    pub fn tag(&self) -> String {
        format!("origami sigma={} sigma'={}", self.sigma, self.sigma_prime)
    }

    pub fn multitwist(&self, direction: Direction) -> Multitwist {
        let circ: Vec<u64> = self
            .cylinders(direction)
            .iter()
            .map(|c| c.circumference() as u64)
            .collect();
        let shear = circ.iter().fold(1u64, |acc, &c| lcm(acc, c));
        let matrix = match direction {
            Direction::Horizontal => [[1, shear as i64], [0, 1]],
            Direction::Vertical => [[1, 0], [shear as i64, 1]],
        };
        Multitwist {
            direction,
            shear,
            matrix,
            exponents: circ.iter().map(|c| shear / c).collect(),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> Origami {
        Origami::from_cycle_notation("(1 2 3 4)", "(1 3 2 4)").unwrap()
    }

    fn sprime() -> Origami {
        Origami::from_cycle_notation("(1)(2 3)", "(1 2 3)").unwrap()
    }

    fn l22() -> Origami {
        Origami::from_cycle_notation("(1 2)(3)", "(1 3)(2)").unwrap()
    }

    #[test]
    fn validation() {
        assert!(Origami::from_cycle_notation("(1)", "(1)").is_ok());
        let err = Origami::from_cycle_notation("(1)(2)", "(1)(2)").unwrap_err();
        assert_eq!(err, OrigamiError::NotTransitive { orbits: vec![vec![1], vec![2]] });
        assert!(matches!(
            Origami::new(Permutation::identity(2), Permutation::identity(3)),
            Err(OrigamiError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn genus_of_named_examples() {
        let t = fig1().topology();
        assert_eq!((t.vertex_count, t.euler_characteristic, t.genus), (2, -2, 2));
        let t = sprime().topology();
        assert_eq!((t.vertex_count, t.genus), (1, 2));
        assert_eq!(l22().topology().genus, 2);
        let torus = Origami::from_cycle_notation("(1)", "(1)").unwrap().topology();
        assert_eq!((torus.vertex_count, torus.euler_characteristic, torus.genus), (1, 0, 1));
    }

    #[test]
    fn cylinder_decompositions() {
        let v = fig1().cylinders(Direction::Vertical);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].circumference(), 4);
        let h: Vec<usize> = sprime().cylinders(Direction::Horizontal).iter().map(|c| c.circumference()).collect();
        assert_eq!(h, vec![1, 2]);
        let v: Vec<usize> = sprime().cylinders(Direction::Vertical).iter().map(|c| c.circumference()).collect();
        assert_eq!(v, vec![3]);
    }

    #[test]
    fn core_words() {
        let o = fig1();
        let v = o.cylinders(Direction::Vertical).remove(0);
        assert_eq!(o.core_word(&v, 0).unwrap().to_string(), "a1 a3 a2 a4");
        let o = sprime();
        let v = o.cylinders(Direction::Vertical).remove(0);
        assert_eq!(o.core_word(&v, 0).unwrap().to_string(), "a1 a2 a3");
        let h = o.cylinders(Direction::Horizontal);
        assert_eq!(o.core_word(&h[0], 0).unwrap().to_string(), "b1");
        assert_eq!(
            o.core_word(&h[0], 1),
            Err(OrigamiError::BasepointOutsideCylinder { basepoint: 2 })
        );
    }

    #[test]
    fn square_relations() {
        let p = sprime().square_relators();
        assert_eq!(p.relators()[0].to_string(), "a1 b2 a1^-1 b1^-1");
        let torus = Origami::from_cycle_notation("(1)", "(1)").unwrap().square_relators();
        assert_eq!(torus.relators()[0].to_string(), "a1 b1 a1^-1 b1^-1");
        let p = fig1().square_relators();
        assert_eq!(p.relators().len(), 4);
        assert_eq!(p.generators().len(), 8);
        assert_eq!(p.relators()[0].to_string(), "a1 b3 a2^-1 b1^-1");
    }

    #[test]
    fn multitwist_matrices() {
        let m = fig1().multitwist(Direction::Vertical);
        assert_eq!(m.matrix, [[1, 0], [4, 1]]);
        assert_eq!(m.exponents, vec![1]);
        assert_eq!(fig1().multitwist(Direction::Horizontal).matrix, [[1, 4], [0, 1]]);
        assert_eq!(sprime().multitwist(Direction::Vertical).matrix, [[1, 0], [3, 1]]);
        assert_eq!(sprime().multitwist(Direction::Horizontal).matrix, [[1, 2], [0, 1]]);
        let h = sprime().multitwist(Direction::Horizontal);
        assert_eq!(h.exponents, vec![2, 1]);
        assert_eq!(l22().multitwist(Direction::Horizontal).matrix, [[1, 2], [0, 1]]);
        assert_eq!(l22().multitwist(Direction::Vertical).matrix, [[1, 0], [2, 1]]);
    }
}
