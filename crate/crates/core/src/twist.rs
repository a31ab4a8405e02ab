//! Dehn twists and Goldman flows in origami coordinates.
//!
//! For a vertical cylinder with `σ′`-cycle `i₀ → i₁ → …` the based core
//! holonomy is `V̂_i = A_i A_{σ′(i)} ⋯` and satisfies the shift identity
//! `V̂_{σ′(i)} = A_i⁻¹ V̂_i A_i`. The positive twist sends `B_i ↦ V̂_iⁿ B_i`
//! for `i` in the cycle; horizontally, `A_i ↦ Ĥ_iⁿ A_i` with
//! `Ĥ_i = B_i B_{σ(i)} ⋯`. Both keep every square relation verbatim.
//!
//! The flow replaces `V̂_iⁿ` by `ξ_{V̂_i}(t) = cos t + sin t · axis(V̂_i)`, so the
//! twist is the flow at `t = θ(V̂)`.
//!
//! Twist words are written `V1^2 H1^-1 V2`:
//!
//! ```text
//! word := ws* (gen (ws+ gen)*)? ws*
//! gen  := ('V' | 'H' | 'v' | 'h') int ('^' '-'? int)?
//! ```
//!
//! The integer is the cylinder id in canonical order (from 1). Words act
//! left to right: the leftmost generator is applied first.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::origami::{Cylinder, Direction, Origami, OrigamiError};
use crate::repvar::Representation;
use crate::UnitQuat;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwistError {
    #[error(transparent)]
    Origami(#[from] OrigamiError),
    #[error("{direction} cylinder {cylinder} has central core holonomy")]
    CentralHolonomy { direction: Direction, cylinder: usize },
    #[error("representation generators do not match the origami (expected a1..a{degree}, b1..b{degree})")]
    LayoutMismatch { degree: usize },
    #[error("twist word parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistGenerator {
    pub direction: Direction,
    pub cylinder: usize,
    pub exponent: i64,
}

impl TwistGenerator {
    pub fn new(direction: Direction, cylinder: usize, exponent: i64) -> Self {
        Self { direction, cylinder, exponent }
    }

    pub fn inverse(self) -> Self {
        Self { exponent: -self.exponent, ..self }
    }
}

impl fmt::Display for TwistGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::Horizontal => 'H',
            Direction::Vertical => 'V',
        };
        write!(f, "{d}{}", self.cylinder)?;
        if self.exponent != 1 {
            write!(f, "^{}", self.exponent)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TwistWord(pub Vec<TwistGenerator>);

impl TwistWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn generators(&self) -> &[TwistGenerator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The word undoing `self` under left-to-right application.
    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    /// `steps` generators drawn uniformly from all cylinders of both
    /// directions, with exponent `±1`.
    pub fn random<R: Rng + ?Sized>(o: &Origami, steps: usize, rng: &mut R) -> Self {
        let cylinders: Vec<Cylinder> = o
            .cylinders(Direction::Horizontal)
            .into_iter()
            .chain(o.cylinders(Direction::Vertical))
            .collect();
        Self(
            (0..steps)
                .map(|_| {
                    let c = &cylinders[rng.random_range(0..cylinders.len())];
                    let e = if rng.random::<bool>() { 1 } else { -1 };
                    TwistGenerator::new(c.direction, c.id, e)
                })
                .collect(),
        )
    }

    pub fn parse(text: &str) -> Result<Self, TwistError> {
        let err = |pos: usize, msg: &str| TwistError::Parse { pos, msg: msg.to_string() };
        let bytes = text.as_bytes();
        let mut pos = 0;
        let mut out = Vec::new();
        let digits = |pos: &mut usize| {
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            start
        };
        loop {
            let before = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos >= bytes.len() {
                break;
            }
            if !out.is_empty() && before == pos {
                return Err(err(pos, "expected whitespace between generators"));
            }
            let direction = match bytes[pos] {
                b'V' | b'v' => Direction::Vertical,
                b'H' | b'h' => Direction::Horizontal,
                _ => return Err(err(pos, "expected 'V' or 'H'")),
            };
            pos += 1;
            let start = digits(&mut pos);
            let cylinder: usize = text[start..pos]
                .parse()
                .map_err(|_| err(start, "expected cylinder id"))?;
            if cylinder == 0 {
                return Err(err(start, "cylinder ids start at 1"));
            }
            let mut exponent = 1i64;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                let neg = pos < bytes.len() && bytes[pos] == b'-';
                if neg {
                    pos += 1;
                }
                let start = digits(&mut pos);
                let e: i64 = text[start..pos]
                    .parse()
                    .map_err(|_| err(start, "expected exponent"))?;
                exponent = if neg { -e } else { e };
            }
            out.push(TwistGenerator::new(direction, cylinder, exponent));
        }
        Ok(Self(out))
    }
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

fn check_layout(rep: &Representation, o: &Origami) -> Result<(), TwistError> {
    if rep.generators() != o.generators().as_slice() {
        return Err(TwistError::LayoutMismatch { degree: o.degree() });
    }
    Ok(())
}

/// Based core holonomies `(square, Ĉ_square)` around the cylinder, in cycle
/// order, using the shift identity.
pub fn based_holonomies(rep: &Representation, o: &Origami, cyl: &Cylinder) -> Vec<(usize, UnitQuat)> {
    let d = o.degree();
    let images = rep.images();
    let edge = |i: usize| match cyl.direction {
        Direction::Vertical => images[i],
        Direction::Horizontal => images[d + i],
    };
    let first = cyl.cycle.iter().fold(UnitQuat::identity(), |acc, &i| acc * edge(i));
    let mut out = Vec::with_capacity(cyl.cycle.len());
    let mut h = first;
    for &i in &cyl.cycle {
        out.push((i, h));
        h = edge(i).inverse() * h * edge(i);
    }
    out
}

/// Index into the representation of the generator moved by a twist about
/// `cyl` at `square`.
fn moved(o: &Origami, cyl: &Cylinder, square: usize) -> usize {
    match cyl.direction {
        Direction::Vertical => o.degree() + square,
        Direction::Horizontal => square,
    }
}

pub fn twist(rep: &Representation, o: &Origami, g: TwistGenerator) -> Result<Representation, TwistError> {
    check_layout(rep, o)?;
    let cyl = o.cylinder(g.direction, g.cylinder)?;
    let mut out = rep.clone();
    if g.exponent == 0 {
        return Ok(out);
    }
    for (i, h) in based_holonomies(rep, o, &cyl) {
        let k = moved(o, &cyl, i);
        out.images_mut()[k] = h.pow(g.exponent) * rep.images()[k];
    }
    Ok(out)
}

/// `Ξ^t` about one cylinder. Undefined when its core holonomy is `±1`.
pub fn goldman_flow(
    rep: &Representation,
    o: &Origami,
    direction: Direction,
    cylinder: usize,
    t: f64,
) -> Result<Representation, TwistError> {
    check_layout(rep, o)?;
    let cyl = o.cylinder(direction, cylinder)?;
    let mut out = rep.clone();
    for (i, h) in based_holonomies(rep, o, &cyl) {
        let xi = h
            .one_param(t)
            .map_err(|_| TwistError::CentralHolonomy { direction, cylinder })?;
        let k = moved(o, &cyl, i);
        out.images_mut()[k] = xi * rep.images()[k];
    }
    Ok(out)
}

/// Motion along the fibre of the restriction to the complement of the
/// cylinder; only the generators crossing its core move.
pub fn fiber_move(
    rep: &Representation,
    o: &Origami,
    direction: Direction,
    cylinder: usize,
    t: f64,
) -> Result<Representation, TwistError> {
    goldman_flow(rep, o, direction, cylinder, t)
}

/// Applies `w` left to right.
pub fn apply_word(rep: &Representation, o: &Origami, w: &TwistWord) -> Result<Representation, TwistError> {
    let mut cur = rep.clone();
    for &g in w.generators() {
        cur = twist(&cur, o, g)?;
    }
    Ok(cur)
}
