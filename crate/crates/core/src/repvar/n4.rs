//! Constructive sampler for the non-orientable genus-4 presentation.
//!
//! Given `A₁, A₂`, pick `B₁` on the great sphere
//! `{X : tr(X·A₁⁻¹) = tr(A₁·X·A₂⁻²)}` (equivalently `⟨X, A₁ − A₁⁻¹A₂²⟩ = 0`)
//! and set `B₂ = A₁B₁A₂⁻¹`. Then `⟨A₁, B₁⟩ = ⟨A₂, B₂⟩`, so some rotation
//! `Φ ∈ SO(4)` sends `A₁ ↦ A₂` and `B₁ ↦ B₂`; writing `Φ(X) = C₂⁻¹·X·C₁`
//! gives the remaining generators.

use std::f64::consts::TAU;

use nalgebra::{Matrix4, Vector4};
use rand::Rng;

use super::{RepError, Representation};
use crate::origami::n4_presentation;
use crate::quat::{haar, so4_factor};
use crate::rng::seeded;
use crate::{Iso4, Quat, UnitQuat};

const ATTEMPTS: usize = 8;
const RESIDUAL_TOL: f64 = 1e-10;

/// Representation of `n4` with `ρ(a₁) = a1`, `ρ(a₂) = a2` exactly.
pub fn sample_n4(a1: UnitQuat, a2: UnitQuat, seed: u64) -> Result<Representation, RepError> {
    sample_n4_with(a1, a2, &mut seeded(seed))
}

pub fn sample_n4_with<R: Rng + ?Sized>(
    a1: UnitQuat,
    a2: UnitQuat,
    rng: &mut R,
) -> Result<Representation, RepError> {
    let p = n4_presentation();
    for _ in 0..ATTEMPTS {
        let Some(b1) = sphere_point(a1, a2, rng) else {
            continue;
        };
        let b2 = a1 * b1 * a2.inverse();
        // ⟨A₁,B₁⟩ = ⟨A₂,B₂⟩ is what makes Φ exist
        if ((a1 * b1.inverse()).trace() - (a2 * b2.inverse()).trace()).abs() > 1e-10 {
            continue;
        }
        let Some(phi) = rotation_taking(a1, b1, a2, b2, rng.random_range(0.0..TAU)) else {
            continue;
        };
        let Ok((left, right)) = so4_factor(&phi) else {
            continue;
        };
        let (c1, c2) = (right, left.inverse());
        let rep = Representation::new(&p, vec![a1, a2, b1, b2, c1, c2])?;
        if rep.residual(&p)?.max < RESIDUAL_TOL {
            return Ok(rep);
        }
    }
    Err(RepError::DegenerateSphere)
}

/// Uniform point of `S³ ∩ n^⊥` with `n = A₁ − A₁⁻¹A₂²`; when `n` vanishes
/// the condition is empty and any Haar point qualifies.
fn sphere_point<R: Rng + ?Sized>(a1: UnitQuat, a2: UnitQuat, rng: &mut R) -> Option<UnitQuat> {
    let n = a1.quaternion() - (a1.inverse() * a2 * a2).quaternion();
    let g: UnitQuat = haar(rng);
    if n.norm() < 1e-12 {
        return Some(g);
    }
    let nhat = n.scale(1.0 / n.norm());
    let x = g.quaternion() - nhat.scale(g.quaternion().dot(nhat));
    if x.norm() < 1e-8 {
        return None;
    }
    UnitQuat::try_normalize(x).ok()
}

fn vec4(q: Quat) -> Vector4<f64> {
    Vector4::new(q.w, q.x, q.y, q.z)
}

/// Orthonormal frame starting with `u`, then the unit part of `v`
/// orthogonal to `u` (any choice if `v = ±u`), then two completing vectors.
fn frame(u: UnitQuat, v: UnitQuat) -> Matrix4<f64> {
    let mut cols: Vec<Vector4<f64>> = vec![vec4(u.quaternion())];
    let push = |w: Vector4<f64>, cols: &mut Vec<Vector4<f64>>| -> bool {
        let mut w = w;
        for c in cols.iter() {
            w -= c * c.dot(&w);
        }
        if w.norm() < 1e-8 {
            return false;
        }
        cols.push(w / w.norm());
        true
    };
    push(vec4(v.quaternion()), &mut cols);
    for k in 0..4 {
        if cols.len() == 4 {
            break;
        }
        let mut e = Vector4::zeros();
        e[k] = 1.0;
        // candidates with tiny residuals are skipped by `push`
        push(e, &mut cols);
    }
    Matrix4::from_columns(&cols)
}

/// A rotation of `R⁴` with `A₁ ↦ A₂`, `B₁ ↦ B₂`, turning the complementary
/// plane by `psi`.
fn rotation_taking(a1: UnitQuat, b1: UnitQuat, a2: UnitQuat, b2: UnitQuat, psi: f64) -> Option<Iso4> {
    let e = frame(a1, b1);
    let mut f = frame(a2, b2);
    let (c, s) = (psi.cos(), psi.sin());
    let (f3, f4) = (f.column(2).into_owned(), f.column(3).into_owned());
    f.set_column(2, &(f3 * c + f4 * s));
    f.set_column(3, &(f4 * c - f3 * s));
    let mut phi = f * e.transpose();
    if phi.determinant() < 0.0 {
        let f4 = f.column(3).into_owned();
        f.set_column(3, &(-f4));
        phi = f * e.transpose();
    }
    Iso4::from_matrix(phi).ok()
}
