//! Riemannian gradient descent on `F(ρ) = Σ_r |ρ(r) − 1|²`.
//!
//! Perturbing a generator as `g ↦ g·exp(v)` changes `Re ρ(r)` by
//! `−v·Im(R)` for each occurrence of `g`, where `R` is the cyclic rotation of
//! the relator that ends at that letter (and `+v·Im(R′)` for `g⁻¹`, with `R′`
//! starting at it). Both rotations come from prefix and suffix products.

use rand::Rng;

use super::{compile, deviation_from_one, RepError, Representation};
use crate::origami::SurfacePresentation;
use crate::quat::haar;
use crate::rng::seeded;
use crate::{ImVec, UnitQuat};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    /// Target for the largest relator deviation.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentReport {
    pub representation: Representation,
    pub residual: f64,
    pub iterations: usize,
}

/// Deterministic per `seed`.
pub fn sample_descent(
    p: &SurfacePresentation,
    seed: u64,
    opts: &DescentOptions,
) -> Result<DescentReport, RepError> {
    sample_descent_with(p, &mut seeded(seed), opts)
}

pub fn sample_descent_with<R: Rng + ?Sized>(
    p: &SurfacePresentation,
    rng: &mut R,
    opts: &DescentOptions,
) -> Result<DescentReport, RepError> {
    let start: Vec<UnitQuat> = p.generators().iter().map(|_| haar(rng)).collect();
    descend(p, start, opts)
}

/// Runs the descent from the given starting images.
pub fn descend(
    p: &SurfacePresentation,
    start: Vec<UnitQuat>,
    opts: &DescentOptions,
) -> Result<DescentReport, RepError> {
    let relators = compile(p);
    let mut x = start;
    let mut grad = vec![ImVec::zero(); x.len()];
    let mut trial = x.clone();
    let mut scratch = Scratch::default();

    let mut f = objective(&relators, &x, &mut scratch);
    let mut eta = 0.25;
    let mut iterations = 0;
    let mut res = max_deviation(&relators, &x, &mut scratch);
    let mut prev_grad: Option<Vec<ImVec>> = None;
    let mut prev_eta = eta;
    while res >= opts.tol && iterations < opts.max_iter {
        iterations += 1;
        gradient(&relators, &x, &mut grad, &mut scratch);
        let g2: f64 = grad.iter().map(|g| g.dot(*g)).sum();
        if g2 == 0.0 {
            break;
        }
        // Barzilai–Borwein trial step (gradients compared in the trivialized
        // frame), then Armijo backtracking.
        if let Some(pg) = &prev_grad {
            let (mut ss, mut sy) = (0.0, 0.0);
            for (g, h) in grad.iter().zip(pg) {
                let s = h.scale(-prev_eta);
                let y = *g - *h;
                ss += s.dot(s);
                sy += s.dot(y);
            }
            eta = if sy > 0.0 { (ss / sy).clamp(1e-6, 16.0) } else { (2.0 * prev_eta).min(16.0) };
        }
        let mut accepted = false;
        while eta > 1e-18 {
            for ((t, &xi), gi) in trial.iter_mut().zip(&x).zip(&grad) {
                *t = xi * exp_step(*gi, -eta);
            }
            let ft = objective(&relators, &trial, &mut scratch);
            if ft <= f - 1e-4 * eta * g2 || (ft < f && ft < 1e-26) {
                accepted = true;
                f = ft;
                std::mem::swap(&mut x, &mut trial);
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
        prev_eta = eta;
        match &mut prev_grad {
            Some(pg) => pg.copy_from_slice(&grad),
            None => prev_grad = Some(grad.clone()),
        }
        res = max_deviation(&relators, &x, &mut scratch);
    }

    let representation = Representation::new(p, x)?;
    if res < 10.0 * opts.tol {
        Ok(DescentReport { representation, residual: res, iterations })
    } else {
        Err(RepError::NoConvergence { residual: res, iterations })
    }
}

/// `exp(s·v)` for imaginary `v`.
fn exp_step(v: ImVec, s: f64) -> UnitQuat {
    let n = v.norm();
    if n == 0.0 {
        return UnitQuat::identity();
    }
    UnitQuat::from_axis_angle(v, s * n)
}

#[derive(Default)]
struct Scratch {
    letters: Vec<UnitQuat>,
    prefix: Vec<UnitQuat>,
    suffix: Vec<UnitQuat>,
}

fn load(word: &[(usize, bool)], x: &[UnitQuat], s: &mut Scratch) {
    s.letters.clear();
    s.letters
        .extend(word.iter().map(|&(g, inv)| if inv { x[g].inverse() } else { x[g] }));
}

fn evaluate(word: &[(usize, bool)], x: &[UnitQuat], s: &mut Scratch) -> UnitQuat {
    load(word, x, s);
    s.letters.iter().fold(UnitQuat::identity(), |acc, &l| acc * l)
}

fn objective(relators: &[Vec<(usize, bool)>], x: &[UnitQuat], s: &mut Scratch) -> f64 {
    relators
        .iter()
        .map(|r| deviation_from_one(evaluate(r, x, s)).powi(2))
        .sum()
}

fn max_deviation(relators: &[Vec<(usize, bool)>], x: &[UnitQuat], s: &mut Scratch) -> f64 {
    relators
        .iter()
        .map(|r| deviation_from_one(evaluate(r, x, s)))
        .fold(0.0, f64::max)
}

/// Gradient of `F` in right-trivialized coordinates.
fn gradient(relators: &[Vec<(usize, bool)>], x: &[UnitQuat], grad: &mut [ImVec], s: &mut Scratch) {
    grad.iter_mut().for_each(|g| *g = ImVec::zero());
    for word in relators {
        load(word, x, s);
        let n = s.letters.len();
        // prefix[m] = x_0 … x_{m-1}, suffix[m] = x_m … x_{n-1}
        s.prefix.clear();
        s.prefix.push(UnitQuat::identity());
        for m in 0..n {
            let next = s.prefix[m] * s.letters[m];
            s.prefix.push(next);
        }
        s.suffix.clear();
        s.suffix.resize(n + 1, UnitQuat::identity());
        for m in (0..n).rev() {
            s.suffix[m] = s.letters[m] * s.suffix[m + 1];
        }
        for (k, &(g, inv)) in word.iter().enumerate() {
            // F_r = 2 − 2·Re(W); d Re(W) = −v·Im(R_{k+1}) for g, +v·Im(R_k) for g⁻¹,
            // with R_m = suffix[m]·prefix[m].
            let contribution = if inv {
                (s.suffix[k] * s.prefix[k]).imag().scale(-2.0)
            } else {
                (s.suffix[k + 1] * s.prefix[k + 1]).imag().scale(2.0)
            };
            grad[g] = grad[g] + contribution;
        }
    }
}
