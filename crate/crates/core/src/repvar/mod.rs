//! Points of the SU(2) representation variety in edge-generator coordinates.
//!
//! A [`Representation`] assigns a unit quaternion to every generator of a
//! [`SurfacePresentation`]; it lies on the variety when every relator
//! evaluates to `1`. For origamis the coordinates are `(A_1..A_d, B_1..B_d)`
//! and the relators are the square relations `A_i B_{σ′(i)} = B_i A_{σ(i)}`.

mod descent;
mod n4;
mod propagate;
mod serial;

pub use descent::{descend, sample_descent, sample_descent_with, DescentOptions, DescentReport};
pub use n4::{sample_n4, sample_n4_with};
pub use propagate::{sample_propagate, sample_propagate_with, vertical_trace_mismatch};
pub use serial::{read_representation, write_representation};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::origami::{Generator, GeneratorWord, SurfacePresentation};
use crate::quat::QuatError;
use crate::{Quat, UnitQuat};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("generator {0} has no image")]
    UnassignedGenerator(Generator),
    #[error("{expected} generators but {found} images")]
    LengthMismatch { expected: usize, found: usize },
    #[error("descent stalled at residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("vertical cylinder {cylinder}: trace equation cannot be repaired")]
    DegenerateCycle { cylinder: usize },
    #[error("no admissible B1 on the constraint sphere")]
    DegenerateSphere,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Quat(#[from] QuatError),
}

/// Assignment generator → unit quaternion.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    generators: Vec<Generator>,
    images: Vec<UnitQuat>,
    source: String,
}

impl Representation {
    pub fn new(
        presentation: &SurfacePresentation,
        images: Vec<UnitQuat>,
    ) -> Result<Self, RepError> {
        Self::from_parts(
            presentation.generators().to_vec(),
            images,
            presentation.source().tag().to_string(),
        )
    }

    pub fn from_parts(
        generators: Vec<Generator>,
        images: Vec<UnitQuat>,
        source: String,
    ) -> Result<Self, RepError> {
        if generators.len() != images.len() {
            return Err(RepError::LengthMismatch {
                expected: generators.len(),
                found: images.len(),
            });
        }
        Ok(Self { generators, images, source })
    }

    /// Every generator sent to `q`.
    pub fn constant(presentation: &SurfacePresentation, q: UnitQuat) -> Self {
        let n = presentation.generators().len();
        Self::new(presentation, vec![q; n]).expect("lengths agree")
    }

    pub fn trivial(presentation: &SurfacePresentation) -> Self {
        Self::constant(presentation, UnitQuat::identity())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn images(&self) -> &[UnitQuat] {
        &self.images
    }

    pub fn images_mut(&mut self) -> &mut [UnitQuat] {
        &mut self.images
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn position(&self, g: Generator) -> Option<usize> {
        self.generators.iter().position(|&h| h == g)
    }

    pub fn get(&self, g: Generator) -> Result<UnitQuat, RepError> {
        self.position(g)
            .map(|k| self.images[k])
            .ok_or(RepError::UnassignedGenerator(g))
    }

    pub fn set(&mut self, g: Generator, q: UnitQuat) -> Result<(), RepError> {
        let k = self.position(g).ok_or(RepError::UnassignedGenerator(g))?;
        self.images[k] = q;
        Ok(())
    }

    /// Product of the images along `w` (empty word ↦ 1).
    pub fn evaluate_word(&self, w: &GeneratorWord) -> Result<UnitQuat, RepError> {
        let mut acc = UnitQuat::identity();
        for l in w.letters() {
            let q = self.get(l.generator)?;
            acc = acc * if l.inverse { q.inverse() } else { q };
        }
        Ok(acc)
    }

    /// `max_r |ρ(r) − 1|` over the relators of `presentation`.
    pub fn residual(&self, presentation: &SurfacePresentation) -> Result<Residual, RepError> {
        let per_relator = presentation
            .relators()
            .iter()
            .map(|r| Ok(deviation_from_one(self.evaluate_word(r)?)))
            .collect::<Result<Vec<_>, RepError>>()?;
        let max = per_relator.iter().copied().fold(0.0, f64::max);
        Ok(Residual { per_relator, max })
    }

    /// Traces of the images of `words`.
    pub fn probe(&self, words: &[GeneratorWord]) -> Result<Vec<f64>, RepError> {
        words
            .iter()
            .map(|w| Ok(self.evaluate_word(w)?.trace()))
            .collect()
    }

    /// Every image replaced by `g·X·g⁻¹`.
    pub fn conjugated_by(&self, g: UnitQuat) -> Self {
        Self {
            images: self.images.iter().map(|&q| g.conjugate(q)).collect(),
            ..self.clone()
        }
    }

    /// Largest coordinate difference to `other` (same generator order).
    pub fn distance(&self, other: &Self) -> f64 {
        self.images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| a.distance(*b))
            .fold(0.0, f64::max)
    }
}

/// `|q − 1|` computed componentwise so tiny deviations keep full precision.
pub fn deviation_from_one(q: UnitQuat) -> f64 {
    let q = q.quaternion();
    ((q.w - 1.0).powi(2) + q.x * q.x + q.y * q.y + q.z * q.z).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub per_relator: Vec<f64>,
    pub max: f64,
}

/// Relator words as (generator position, inverted) pairs.
pub(crate) fn compile(presentation: &SurfacePresentation) -> Vec<Vec<(usize, bool)>> {
    presentation
        .relators()
        .iter()
        .map(|r| {
            r.letters()
                .iter()
                .map(|l| {
                    (
                        presentation.position(l.generator).expect("validated presentation"),
                        l.inverse,
                    )
                })
                .collect()
        })
        .collect()
}

/// 3×3 matrix of `v ↦ Im(q·v·q⁻¹)`.
fn adjoint(q: UnitQuat) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for c in 0..3 {
        let e = Quat::basis(c + 1);
        let r = q.quaternion() * e * q.inverse().quaternion();
        let r = [r.x, r.y, r.z];
        for row in 0..3 {
            m[row][c] = r[row];
        }
    }
    m
}

/// Derivative of the relator map at `rep`: rows are the imaginary parts of
/// `ρ(r)⁻¹ δρ(r)`, columns the right-trivialized tangent coordinates
/// `δg = g·v` of each generator.
pub fn relator_jacobian(rep: &Representation, presentation: &SurfacePresentation) -> DMatrix<f64> {
    let relators = compile(presentation);
    let n = rep.images.len();
    let mut jac = DMatrix::zeros(3 * relators.len(), 3 * n);
    for (r, word) in relators.iter().enumerate() {
        let letters: Vec<UnitQuat> = word
            .iter()
            .map(|&(g, inv)| if inv { rep.images[g].inverse() } else { rep.images[g] })
            .collect();
        // suffix[k] = x_k … x_L
        let mut suffix = vec![UnitQuat::identity(); letters.len() + 1];
        for k in (0..letters.len()).rev() {
            suffix[k] = letters[k] * suffix[k + 1];
        }
        for (k, &(g, inv)) in word.iter().enumerate() {
            // x = g:    W⁻¹δW = S_{k+1}⁻¹ v S_{k+1}
            // x = g⁻¹:  W⁻¹δW = −S_k⁻¹ v S_k
            let (s, sign) = if inv { (suffix[k], -1.0) } else { (suffix[k + 1], 1.0) };
            let block = adjoint(s.inverse());
            for i in 0..3 {
                for j in 0..3 {
                    jac[(3 * r + i, 3 * g + j)] += sign * block[i][j];
                }
            }
        }
    }
    jac
}

/// Numerical rank of the relator Jacobian and the implied local dimension
/// `3·(#generators) − rank` of the solution set.
pub fn local_dimension(rep: &Representation, presentation: &SurfacePresentation) -> (usize, usize) {
    let jac = relator_jacobian(rep, presentation);
    let sv = jac.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-8 * top.max(1.0)).count();
    (rank, jac.ncols() - rank)
}
