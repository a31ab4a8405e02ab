//! Cycle propagation with trace repair.
//!
//! Along a vertical cylinder `i₀ → i₁ = σ′(i₀) → …` the square relations give
//! `B_{σ′(i)} = A_i⁻¹ B_i A_{σ(i)}`, so going once around forces
//! `B_{i₀} R B_{i₀}⁻¹ = L` with `L = A_{i₀} A_{i₁} ⋯` and
//! `R = A_{σ(i₀)} A_{σ(i₁)} ⋯`. This is solvable exactly when
//! `tr L = tr R`, and the solutions form a circle. Each trace equation is
//! linear in any single `A_j`, which is what the repair step uses.

use std::f64::consts::TAU;

use rand::Rng;

use super::{RepError, Representation};
use crate::origami::{Direction, Origami};
use crate::quat::{conj_solve, haar};
use crate::rng::seeded;
use crate::{Quat, UnitQuat};

const ATTEMPTS: usize = 8;
const SWEEPS: usize = 64;
const TRACE_TOL: f64 = 1e-14;
const MIN_GRADIENT: f64 = 1e-6;

pub fn sample_propagate(o: &Origami, seed: u64) -> Result<Representation, RepError> {
    sample_propagate_with(o, &mut seeded(seed))
}

pub fn sample_propagate_with<R: Rng + ?Sized>(
    o: &Origami,
    rng: &mut R,
) -> Result<Representation, RepError> {
    let mut last = RepError::DegenerateCycle { cylinder: 1 };
    for _ in 0..ATTEMPTS {
        let mut a: Vec<UnitQuat> = (0..o.degree()).map(|_| haar(rng)).collect();
        if let Err(e) = repair(o, &mut a) {
            last = e;
            continue;
        }
        match close_cycles(o, &a, rng) {
            Ok(b) => {
                let images = a.into_iter().chain(b).collect();
                return Representation::new(&o.square_relators(), images);
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// `|tr L − tr R|` for each vertical cylinder, read from the `A` coordinates
/// of `rep` (generator order `a_1..a_d, b_1..b_d`).
pub fn vertical_trace_mismatch(o: &Origami, rep: &Representation) -> Vec<f64> {
    let a = &rep.images()[..o.degree()];
    o.cylinders(Direction::Vertical)
        .iter()
        .map(|c| {
            let (l, r) = holonomy_pair(o, a, &c.cycle);
            (l.trace() - r.trace()).abs()
        })
        .collect()
}

fn holonomy_pair(o: &Origami, a: &[UnitQuat], cycle: &[usize]) -> (UnitQuat, UnitQuat) {
    let l = cycle.iter().fold(UnitQuat::identity(), |acc, &i| acc * a[i]);
    let r = cycle
        .iter()
        .fold(UnitQuat::identity(), |acc, &i| acc * a[o.sigma().apply(i)]);
    (l, r)
}

/// Coefficient `n` with `tr(P·X·Q) = 2⟨X, n⟩`, i.e. `n = conj(Q·P)`.
fn trace_coefficient(word: &[UnitQuat], k: usize) -> Quat {
    let p = word[..k].iter().fold(UnitQuat::identity(), |acc, &x| acc * x);
    let q = word[k + 1..].iter().fold(UnitQuat::identity(), |acc, &x| acc * x);
    (q * p).quaternion().conj()
}

/// Adjusts `A` until every vertical cylinder has `tr L = tr R`.
fn repair(o: &Origami, a: &mut [UnitQuat]) -> Result<(), RepError> {
    let cylinders = o.cylinders(Direction::Vertical);
    let sigma = o.sigma();
    let sigma_inv = sigma.inverse();
    let mut owner = vec![0; o.degree()];
    for (k, c) in cylinders.iter().enumerate() {
        for &i in &c.cycle {
            owner[i] = k;
        }
    }
    // Candidate indices per cylinder: those appearing in L or R, local ones
    // (appearing in both, so no other equation moves) first, then by index.
    let candidates: Vec<Vec<usize>> = cylinders
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut js: Vec<usize> = c
                .cycle
                .iter()
                .copied()
                .chain(c.cycle.iter().map(|&i| sigma.apply(i)))
                .collect();
            js.sort_unstable();
            js.dedup();
            js.sort_by_key(|&j| (owner[j] != k || owner[sigma_inv.apply(j)] != k, j));
            js
        })
        .collect();

    for _ in 0..SWEEPS {
        let mut clean = true;
        for (k, c) in cylinders.iter().enumerate() {
            let (l, r) = holonomy_pair(o, a, &c.cycle);
            if (l.trace() - r.trace()).abs() <= TRACE_TOL {
                continue;
            }
            clean = false;
            let lw: Vec<UnitQuat> = c.cycle.iter().map(|&i| a[i]).collect();
            let rw: Vec<UnitQuat> = c.cycle.iter().map(|&i| a[sigma.apply(i)]).collect();
            let mut repaired = false;
            for &j in &candidates[k] {
                // tr L − tr R = 2⟨A_j, n⟩ − 2h
                let mut n = Quat::zero();
                let mut h = 0.0;
                match c.cycle.iter().position(|&i| i == j) {
                    Some(pos) => n = n + trace_coefficient(&lw, pos),
                    None => h -= l.trace() / 2.0,
                }
                match c.cycle.iter().position(|&i| sigma.apply(i) == j) {
                    Some(pos) => n = n - trace_coefficient(&rw, pos),
                    None => h += r.trace() / 2.0,
                }
                if let Some(x) = project_to_slice(a[j].quaternion(), n, h) {
                    a[j] = x;
                    repaired = true;
                    break;
                }
            }
            if !repaired {
                return Err(RepError::DegenerateCycle { cylinder: c.id });
            }
        }
        if clean {
            return Ok(());
        }
    }
    let worst = cylinders
        .iter()
        .map(|c| {
            let (l, r) = holonomy_pair(o, a, &c.cycle);
            ((l.trace() - r.trace()).abs(), c.id)
        })
        .fold((0.0, 1), |acc, x| if x.0 > acc.0 { x } else { acc });
    if worst.0 <= TRACE_TOL {
        Ok(())
    } else {
        Err(RepError::DegenerateCycle { cylinder: worst.1 })
    }
}

/// Point of `S³ ∩ {⟨X, n⟩ = h}` nearest to `x`, if the slice is nonempty
/// and `n` is not too small.
fn project_to_slice(x: Quat, n: Quat, h: f64) -> Option<UnitQuat> {
    let nn = n.norm();
    if nn < MIN_GRADIENT {
        return None;
    }
    let nhat = n.scale(1.0 / nn);
    let c = h / nn;
    if c.abs() >= 1.0 - 1e-9 {
        return None;
    }
    let mut perp = x - nhat.scale(x.dot(nhat));
    if perp.norm() < 1e-12 {
        // x is parallel to n: any direction in the orthogonal complement
        let e = (0..4)
            .map(|k| {
                let b = Quat::basis(k);
                b - nhat.scale(b.dot(nhat))
            })
            .max_by(|u, v| u.norm().total_cmp(&v.norm()))
            .expect("four basis vectors");
        perp = e;
    }
    let perp = perp.scale(1.0 / perp.norm());
    let y = nhat.scale(c) + perp.scale((1.0 - c * c).sqrt());
    UnitQuat::try_normalize(y).ok()
}

/// Solves each cylinder's conjugacy equation at a random circle angle and
/// propagates `B` around the cycle.
fn close_cycles<R: Rng + ?Sized>(
    o: &Origami,
    a: &[UnitQuat],
    rng: &mut R,
) -> Result<Vec<UnitQuat>, RepError> {
    let mut b = vec![UnitQuat::identity(); o.degree()];
    for c in o.cylinders(Direction::Vertical) {
        let (l, r) = holonomy_pair(o, a, &c.cycle);
        let angle = rng.random_range(0.0..TAU);
        let b0 = conj_solve(r, l, angle)
            .map_err(|_| RepError::DegenerateCycle { cylinder: c.id })?;
        b[c.cycle[0]] = b0;
        for w in c.cycle.windows(2) {
            let i = w[0];
            b[w[1]] = a[i].inverse() * b[i] * a[o.sigma().apply(i)];
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::origami::registry;

    #[test]
    fn origamis_close_exactly() {
        for name in ["fig1", "sprime", "l22", "torus"] {
            let s = registry(name).unwrap();
            let o = s.origami().unwrap();
            let p = s.presentation();
            for seed in 0..20 {
                let rep = sample_propagate(o, seed).unwrap();
                let res = rep.residual(&p).unwrap().max;
                assert!(res < 1e-12, "{name} seed {seed}: {res:e}");
                assert!(vertical_trace_mismatch(o, &rep).iter().all(|&m| m < 1e-12));
            }
        }
    }

    #[test]
    fn torus_b_commutes_with_a() {
        let o = Origami::from_cycle_notation("(1)", "(1)").unwrap();
        let rep = sample_propagate(&o, 5).unwrap();
        let (a, b) = (rep.images()[0], rep.images()[1]);
        assert!((a * b).distance(b * a) < 1e-14);
        // B lies on the one-parameter subgroup through A
        let ax = a.axis().unwrap();
        let bx = b.imag();
        assert!(ax.cross(bx).norm() < 1e-12);
    }

    #[test]
    fn slice_projection() {
        let x = Quat::new(0.5, 0.5, 0.5, 0.5);
        let n = Quat::new(2.0, 0.0, 0.0, 0.0);
        let y = project_to_slice(x, n, 0.6).unwrap();
        assert!((y.quaternion().dot(n) - 0.6).abs() < 1e-15);
        assert!(project_to_slice(x, n, 2.5).is_none());
        assert!(project_to_slice(x, Quat::new(1e-9, 0.0, 0.0, 0.0), 0.0).is_none());
    }
}
