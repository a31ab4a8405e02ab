//! Invariant functions of the twist action and their numerical checks.
//!
//! One-square lemma: if `A_I B_J = B_I A_J` with `tr A_I = tr A_J` and
//! `tr B_I = tr B_J`, then the purely imaginary differences `A_I − A_J` and
//! `B_I − B_J` span the same line. On an origami such rectangles come from
//! strips of squares; when both pairs of sides are conjugate in the surface
//! group, the traces agree on every representation and the common line is
//! fixed by twists in both directions.
//!
//! The strip at square `i` of length `k`:
//!
//! * horizontal: `A_I = a_i`, `A_J = a_{σᵏ(i)}`, `B_I = b_i b_{σ(i)} ⋯`,
//!   `B_J = b_{σ′(i)} b_{σ′σ(i)} ⋯`;
//! * vertical: `A_I = a_i a_{σ′(i)} ⋯`, `A_J = a_{σ(i)} a_{σσ′(i)} ⋯`,
//!   `B_I = b_i`, `B_J = b_{σ′ᵏ(i)}`.
//!
//! Side pairs are certified conjugate when they are cyclic rotations of each
//! other, or single letters joined by a square with a fixed point: `σ′(j) = j`
//! gives `a_{σ(j)} = b_j⁻¹ a_j b_j`, and `σ(j) = j` gives
//! `b_{σ′(j)} = a_j⁻¹ b_j a_j`.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::origami::{
    n4_presentation, registry, Direction, GenKind, Generator, GeneratorWord, Origami,
};
use crate::quat::haar;
use crate::repvar::{RepError, Representation};
use crate::twist::{twist, TwistError, TwistWord};
use crate::{ProjDirection, Quat, UnitQuat};

const RELATION_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-9;
const NORM_GUARD: f64 = 1e-6;
const RESIDUAL_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error("hypothesis violated: {guard} (value {value:e})")]
    HypothesisViolation { guard: &'static str, value: f64 },
    #[error("degenerate: {what} (norm {norm:e})")]
    Degenerate { what: &'static str, norm: f64 },
    #[error("ratio undefined near a trace zero; product residual {product_residual:e}")]
    UndefinedRatio { product_residual: f64 },
    #[error("no one-square rectangle with certified conjugate sides")]
    NoRectangle,
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Twist(#[from] TwistError),
}

/// Angle between `[aI − aJ]` and `[bI − bJ]`.
pub fn lemma_one_square_check(
    a_i: UnitQuat,
    a_j: UnitQuat,
    b_i: UnitQuat,
    b_j: UnitQuat,
) -> Result<f64, InvariantError> {
    let da = a_i.quaternion() - a_j.quaternion();
    let db = b_i.quaternion() - b_j.quaternion();
    if da.norm() < NORM_GUARD {
        return Err(InvariantError::Degenerate { what: "aI = aJ", norm: da.norm() });
    }
    if db.norm() < NORM_GUARD {
        return Err(InvariantError::Degenerate { what: "bI = bJ", norm: db.norm() });
    }
    let rel = (a_i * b_j).distance(b_i * a_j);
    if rel >= RELATION_TOL {
        return Err(InvariantError::HypothesisViolation { guard: "aI·bJ = bI·aJ", value: rel });
    }
    let ta = (a_i.trace() - a_j.trace()).abs();
    if ta >= TRACE_TOL {
        return Err(InvariantError::HypothesisViolation { guard: "tr aI = tr aJ", value: ta });
    }
    let tb = (b_i.trace() - b_j.trace()).abs();
    if tb >= TRACE_TOL {
        return Err(InvariantError::HypothesisViolation { guard: "tr bI = tr bJ", value: tb });
    }
    Ok(direction_of(da)?.angle_to(&direction_of(db)?))
}

fn direction_of(q: Quat) -> Result<ProjDirection, InvariantError> {
    ProjDirection::new(q.imag()).map_err(|_| InvariantError::Degenerate {
        what: "difference has no imaginary part",
        norm: q.norm(),
    })
}

/// Random tuple satisfying the lemma's hypotheses: `aJ = g·aI·g⁻¹`, `bJ` on
/// the sphere `{tr(aI·X·aJ⁻¹) = tr X}` and `bI = aI·bJ·aJ⁻¹`.
pub fn sample_rectangle<R: Rng + ?Sized>(rng: &mut R) -> [UnitQuat; 4] {
    loop {
        let a_i: UnitQuat = haar(rng);
        let g: UnitQuat = haar(rng);
        let a_j = g.conjugate(a_i);
        // tr(aI·X·aJ⁻¹) − tr X = 2⟨X, aI⁻¹aJ − 1⟩
        let n = (a_i.inverse() * a_j).quaternion() - Quat::one();
        if n.norm() < 1e-6 {
            continue;
        }
        let nhat = n.scale(1.0 / n.norm());
        let x: UnitQuat = haar(rng);
        let x = x.quaternion() - nhat.scale(x.quaternion().dot(nhat));
        let Ok(b_j) = UnitQuat::try_normalize(x) else {
            continue;
        };
        let b_i = a_i * b_j * a_j.inverse();
        return [a_i, a_j, b_i, b_j];
    }
}

/// A strip of squares whose boundary satisfies the lemma on every
/// representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaRectangle {
    pub direction: Direction,
    /// Zero-indexed starting square.
    pub start: usize,
    pub length: usize,
    pub a_i: GeneratorWord,
    pub a_j: GeneratorWord,
    pub b_i: GeneratorWord,
    pub b_j: GeneratorWord,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        self.0[rx] = ry;
    }
}

/// Classes of single generators certified conjugate by fixed-point squares;
/// index `i` is `a_{i+1}`, index `d + i` is `b_{i+1}`.
fn letter_classes(o: &Origami) -> UnionFind {
    let d = o.degree();
    let mut uf = UnionFind::new(2 * d);
    for j in 0..d {
        if o.sigma_prime().apply(j) == j {
            uf.union(j, o.sigma().apply(j));
        }
        if o.sigma().apply(j) == j {
            uf.union(d + j, d + o.sigma_prime().apply(j));
        }
    }
    uf
}

fn certified_conjugate(u: &GeneratorWord, v: &GeneratorWord, d: usize, uf: &mut UnionFind) -> bool {
    if u.is_rotation_of(v) {
        return true;
    }
    let slot = |w: &GeneratorWord| match w.letters() {
        [l] if !l.inverse => match l.generator.kind {
            GenKind::A => Some(l.generator.index - 1),
            GenKind::B => Some(d + l.generator.index - 1),
            GenKind::C => None,
        },
        _ => None,
    };
    match (slot(u), slot(v)) {
        (Some(x), Some(y)) => uf.find(x) == uf.find(y),
        _ => false,
    }
}

fn strip(o: &Origami, direction: Direction, start: usize, length: usize) -> LemmaRectangle {
    let (s, sp) = (o.sigma(), o.sigma_prime());
    let walk = |p: &crate::origami::Permutation, from: usize| {
        let mut i = from;
        (0..length)
            .map(|_| {
                let here = i;
                i = p.apply(i);
                here
            })
            .collect::<Vec<_>>()
    };
    let power = |p: &crate::origami::Permutation, from: usize| {
        (0..length).fold(from, |i, _| p.apply(i))
    };
    let a = |i: usize| Generator::a(i + 1);
    let b = |i: usize| Generator::b(i + 1);
    match direction {
        Direction::Horizontal => {
            let row = walk(s, start);
            LemmaRectangle {
                direction,
                start,
                length,
                a_i: GeneratorWord::positive([a(start)]),
                a_j: GeneratorWord::positive([a(power(s, start))]),
                b_i: GeneratorWord::positive(row.iter().map(|&i| b(i))),
                b_j: GeneratorWord::positive(row.iter().map(|&i| b(sp.apply(i)))),
            }
        }
        Direction::Vertical => {
            let column = walk(sp, start);
            LemmaRectangle {
                direction,
                start,
                length,
                a_i: GeneratorWord::positive(column.iter().map(|&i| a(i))),
                a_j: GeneratorWord::positive(column.iter().map(|&i| a(s.apply(i)))),
                b_i: GeneratorWord::positive([b(start)]),
                b_j: GeneratorWord::positive([b(power(sp, start))]),
            }
        }
    }
}

/// Every strip whose side pairs are certified conjugate and not literally
/// equal; vertical strips first, then by start square and length.
pub fn locate_rectangles(o: &Origami) -> Vec<LemmaRectangle> {
    let d = o.degree();
    let mut uf = letter_classes(o);
    let mut out = Vec::new();
    for direction in [Direction::Vertical, Direction::Horizontal] {
        let p = match direction {
            Direction::Vertical => o.sigma_prime(),
            Direction::Horizontal => o.sigma(),
        };
        for start in 0..d {
            let circumference = p.cycles().into_iter().find(|c| c.contains(&start)).map_or(1, |c| c.len());
            for length in 1..=circumference {
                let r = strip(o, direction, start, length);
                if r.a_i == r.a_j || r.b_i == r.b_j {
                    continue;
                }
                if certified_conjugate(&r.a_i, &r.a_j, d, &mut uf)
                    && certified_conjugate(&r.b_i, &r.b_j, d, &mut uf)
                {
                    out.push(r);
                }
            }
        }
    }
    out
}

/// The two lines `[A_I − A_J]` and `[B_I − B_J]` of a located rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionPair {
    pub rectangle: LemmaRectangle,
    pub a_direction: ProjDirection,
    pub b_direction: ProjDirection,
    /// Angle between the two lines.
    pub distance: f64,
    pub a_norm: f64,
    pub b_norm: f64,
}

/// Direction invariant of an origami representation, read off the first
/// located rectangle.
pub fn direction_invariant(rep: &Representation, o: &Origami) -> Result<DirectionPair, InvariantError> {
    let rect = locate_rectangles(o).into_iter().next().ok_or(InvariantError::NoRectangle)?;
    direction_pair(rep, o, rect)
}

fn direction_pair(
    rep: &Representation,
    o: &Origami,
    rect: LemmaRectangle,
) -> Result<DirectionPair, InvariantError> {
    let res = rep.residual(&o.square_relators())?.max;
    if res >= RESIDUAL_GUARD {
        return Err(InvariantError::HypothesisViolation { guard: "relator residual < 1e-9", value: res });
    }
    let ev = |w: &GeneratorWord| rep.evaluate_word(w);
    let da = ev(&rect.a_i)?.quaternion() - ev(&rect.a_j)?.quaternion();
    let db = ev(&rect.b_i)?.quaternion() - ev(&rect.b_j)?.quaternion();
    if da.norm() < NORM_GUARD {
        return Err(InvariantError::Degenerate { what: "A_I = A_J", norm: da.norm() });
    }
    if db.norm() < NORM_GUARD {
        return Err(InvariantError::Degenerate { what: "B_I = B_J", norm: db.norm() });
    }
    let a_direction = direction_of(da)?;
    let b_direction = direction_of(db)?;
    Ok(DirectionPair {
        distance: a_direction.angle_to(&b_direction),
        a_direction,
        b_direction,
        a_norm: da.norm(),
        b_norm: db.norm(),
        rectangle: rect,
    })
}

fn registry_origami(name: &str) -> Origami {
    registry(name)
        .ok()
        .and_then(|s| s.origami().cloned())
        .expect("registry origami")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SprimeReport {
    pub pair: DirectionPair,
    /// Largest `|⟨A₂A₃ − A₃A₂, X⟩|` over `X ∈ {1, A₂, A₃}`.
    pub orthogonality_defect: f64,
}

/// `[A₂A₃ − A₃A₂] = [B₁ − B₂]` on `sprime`.
pub fn sprime_invariant(rep: &Representation) -> Result<SprimeReport, InvariantError> {
    let o = registry_origami("sprime");
    let pair = direction_invariant(rep, &o)?;
    let a2 = rep.get(Generator::a(2))?;
    let a3 = rep.get(Generator::a(3))?;
    let comm = (a2 * a3).quaternion() - (a3 * a2).quaternion();
    let orthogonality_defect = [Quat::one(), a2.quaternion(), a3.quaternion()]
        .iter()
        .map(|x| comm.dot(*x).abs())
        .fold(0.0, f64::max);
    Ok(SprimeReport { pair, orthogonality_defect })
}

/// `[A₁ − A₂] = [B₁ − B₃]` on `l22` (the located rectangle is square 1).
pub fn l22_invariant(rep: &Representation) -> Result<DirectionPair, InvariantError> {
    direction_invariant(rep, &registry_origami("l22"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InvariantValue {
    Real(f64),
    Direction([f64; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub value: Option<InvariantValue>,
    pub defined: bool,
    pub diagnostics: Vec<(String, f64)>,
}

/// `tr(A₁)/tr(A₂)` on `n4`, together with the identities it rests on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct N4Report {
    /// `tr(A₁)tr(B₁) − tr(A₂)tr(B₂)`.
    pub product_residual: f64,
    /// `tr(A₁B₁) − tr(A₂B₂)`.
    pub product_trace_residual: f64,
    /// `tr(A₁B₁⁻¹) − tr(A₂B₂⁻¹)`.
    pub quotient_trace_residual: f64,
    pub ratio: f64,
    /// `tr(B₂)/tr(B₁)`, equal to `ratio` on the variety.
    pub dual_ratio: f64,
}

impl N4Report {
    pub fn to_report(&self) -> InvariantReport {
        InvariantReport {
            value: Some(InvariantValue::Real(self.ratio)),
            defined: true,
            diagnostics: vec![
                ("product_residual".into(), self.product_residual),
                ("product_trace_residual".into(), self.product_trace_residual),
                ("quotient_trace_residual".into(), self.quotient_trace_residual),
                ("dual_ratio".into(), self.dual_ratio),
            ],
        }
    }
}

pub fn n4_invariant(rep: &Representation) -> Result<N4Report, InvariantError> {
    let p = n4_presentation();
    let res = rep.residual(&p)?.max;
    if res >= RESIDUAL_GUARD {
        return Err(InvariantError::HypothesisViolation { guard: "relator residual < 1e-9", value: res });
    }
    let get = |g| rep.get(g);
    let (a1, a2) = (get(Generator::a(1))?, get(Generator::a(2))?);
    let (b1, b2) = (get(Generator::b(1))?, get(Generator::b(2))?);
    let product_residual = a1.trace() * b1.trace() - a2.trace() * b2.trace();
    let product_trace_residual = (a1 * b1).trace() - (a2 * b2).trace();
    let quotient_trace_residual = (a1 * b1.inverse()).trace() - (a2 * b2.inverse()).trace();
    if a2.trace().abs() < NORM_GUARD || b1.trace().abs() < NORM_GUARD {
        return Err(InvariantError::UndefinedRatio { product_residual });
    }
    Ok(N4Report {
        product_residual,
        product_trace_residual,
        quotient_trace_residual,
        ratio: a1.trace() / a2.trace(),
        dual_ratio: b2.trace() / b1.trace(),
    })
}

/// Value tracked along an orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    Real(f64),
    Direction(ProjDirection),
}

impl Observation {
    /// `|x − y|` for reals, the projective angle for directions.
    pub fn drift_from(&self, other: &Self) -> f64 {
        match (self, other) {
            (Observation::Real(x), Observation::Real(y)) => (x - y).abs(),
            (Observation::Direction(u), Observation::Direction(v)) => u.angle_to(v),
            _ => FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    /// Drift from the initial value after each step.
    pub drift: Vec<f64>,
    pub max_drift: f64,
    /// Variance of the drift series.
    pub variance: f64,
    pub max_residual: f64,
}

/// Follows `word` one generator at a time and records `candidate` after
/// every step.
pub fn orbit_invariance_test<F>(
    rep: &Representation,
    o: &Origami,
    candidate: F,
    word: &TwistWord,
) -> Result<(OrbitReport, Representation), InvariantError>
where
    F: Fn(&Representation) -> Result<Observation, InvariantError>,
{
    let p = o.square_relators();
    let start = candidate(rep)?;
    let mut cur = rep.clone();
    let mut drift = Vec::with_capacity(word.len());
    let mut max_residual = rep.residual(&p)?.max;
    for &g in word.generators() {
        cur = twist(&cur, o, g)?;
        max_residual = max_residual.max(cur.residual(&p)?.max);
        drift.push(candidate(&cur)?.drift_from(&start));
    }
    let n = drift.len().max(1) as f64;
    let mean = drift.iter().sum::<f64>() / n;
    let variance = drift.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok((
        OrbitReport {
            max_drift: drift.iter().copied().fold(0.0, f64::max),
            drift,
            variance,
            max_residual,
        },
        cur,
    ))
}

/// Candidate reading the `A`-side line of the first located rectangle.
pub fn direction_candidate(o: &Origami) -> impl Fn(&Representation) -> Result<Observation, InvariantError> + '_ {
    move |rep| Ok(Observation::Direction(direction_invariant(rep, o)?.a_direction))
}

/// Candidate reading `tr ρ(w)`.
pub fn trace_candidate(w: GeneratorWord) -> impl Fn(&Representation) -> Result<Observation, InvariantError> {
    move |rep| Ok(Observation::Real(rep.evaluate_word(&w)?.trace()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repvar::{sample_n4, sample_propagate};
    use crate::rng::seeded;

    #[test]
    fn constructive_rectangles_pass() {
        let mut rng = seeded(1);
        for _ in 0..200 {
            let [ai, aj, bi, bj] = sample_rectangle(&mut rng);
            assert!(lemma_one_square_check(ai, aj, bi, bj).unwrap() < 1e-8);
        }
    }

    #[test]
    fn guards() {
        let mut rng = seeded(2);
        let [ai, aj, bi, bj] = sample_rectangle(&mut rng);
        assert!(matches!(
            lemma_one_square_check(ai, ai, bi, bj),
            Err(InvariantError::Degenerate { what: "aI = aJ", .. })
        ));
        // scaling the angle of bI breaks tr bI = tr bJ but keeps a valid
        // rectangle once bJ is recomputed
        let bi2 = bi * bi;
        let bj2 = ai.inverse() * bi2 * aj;
        assert!(matches!(
            lemma_one_square_check(ai, aj, bi2, bj2),
            Err(InvariantError::HypothesisViolation { guard: "tr bI = tr bJ", .. })
        ));
        assert!(matches!(
            lemma_one_square_check(ai, aj, bi, bi.inverse()),
            Err(InvariantError::HypothesisViolation { guard: "aI·bJ = bI·aJ", .. })
        ));
    }

    #[test]
    fn located_rectangles() {
        let sprime = registry_origami("sprime");
        let r = locate_rectangles(&sprime);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].a_i.to_string(), "a2 a3");
        assert_eq!(r[0].a_j.to_string(), "a3 a2");
        assert_eq!(r[0].b_i.to_string(), "b2");
        assert_eq!(r[0].b_j.to_string(), "b1");

        let l22 = locate_rectangles(&registry_origami("l22"));
        assert_eq!(l22[0].direction, Direction::Vertical);
        assert_eq!(
            (l22[0].a_i.to_string(), l22[0].a_j.to_string(), l22[0].b_i.to_string(), l22[0].b_j.to_string()),
            ("a1".into(), "a2".into(), "b1".into(), "b3".into())
        );
        assert!(locate_rectangles(&registry_origami("fig1")).is_empty());
    }

    #[test]
    fn sprime_and_l22_on_samples() {
        for seed in 0..20 {
            let o = registry_origami("sprime");
            let rep = sample_propagate(&o, seed).unwrap();
            let r = sprime_invariant(&rep).unwrap();
            assert!(r.pair.distance < 1e-8);
            assert!(r.orthogonality_defect < 1e-10);

            let o = registry_origami("l22");
            let rep = sample_propagate(&o, seed).unwrap();
            assert!(l22_invariant(&rep).unwrap().distance < 1e-8);
        }
    }

    #[test]
    fn degenerate_samples() {
        let o = registry_origami("sprime");
        let triv = Representation::trivial(&o.square_relators());
        assert!(matches!(sprime_invariant(&triv), Err(InvariantError::Degenerate { .. })));
        let o = registry_origami("l22");
        let q = UnitQuat::new(0.3, 0.4, -0.5, 0.2);
        let central = Representation::constant(&o.square_relators(), q);
        assert!(matches!(l22_invariant(&central), Err(InvariantError::Degenerate { .. })));
    }

    #[test]
    fn n4_reports() {
        let p = n4_presentation();
        let r = n4_invariant(&Representation::trivial(&p)).unwrap();
        assert_eq!(r.product_residual, 0.0);
        assert_eq!(r.ratio, 1.0);
        let rep = sample_n4(UnitQuat::i(), UnitQuat::j(), 3).unwrap();
        match n4_invariant(&rep) {
            Err(InvariantError::UndefinedRatio { product_residual }) => {
                assert!(product_residual.abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_candidate_has_no_drift() {
        let o = registry_origami("fig1");
        let rep = sample_propagate(&o, 1).unwrap();
        let w = TwistWord::random(&o, 50, &mut seeded(3));
        let (report, _) = orbit_invariance_test(&rep, &o, |_| Ok(Observation::Real(1.0)), &w).unwrap();
        assert_eq!(report.max_drift, 0.0);
        assert!(report.max_residual < 1e-9);
    }
}
