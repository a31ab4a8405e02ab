//! Zero loci of bilinear maps `f_k(a, b) = aᵀ M_k b` on `Rⁿ × Rⁿ` and the
//! two foliations obtained by freezing one factor.
//!
//! On the A-leaf through `(a, b)` the point `a` is frozen and `b` moves in
//! `{x : aᵀ M_k x = ℓ_k}`, whose direction space is orthogonal to every
//! `w_k = M_kᵀ a`. The leaf fields are generalized cross products
//! `v_i = det[e_i | w_1 | … | w_m | e_S]`, one for each set `S` of fixed
//! basis columns completing the matrix, so they are polynomial and Lie
//! brackets can be taken exactly. The B-leaf is symmetric with `w_k = M_k b`.
//!
//! In projective mode both factors live on unit spheres (points of
//! `P^{n−1}` up to sign), the levels are zero, and the moving factor's own
//! position is added as a column, which keeps the fields tangent to the
//! sphere. For `n = 3` and `f = a·b` the A-field is `a × b`, so leaves are
//! great circles of period `2π`.
//!
//! Coordinates of a point are `(a_1..a_n, b_1..b_n)`.

pub mod poly;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use poly::{bracket, det, eval_field, Field, Poly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FoliationError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("projective systems need zero levels")]
    ProjectiveLevel,
    #[error("point is off the level set by {defect:e}")]
    NotOnLevelSet { defect: f64 },
    #[error("step size underflow at t = {t}")]
    StepFailure { t: f64 },
    #[error("degenerate: {0}")]
    Degenerate(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    /// `a` frozen, `b` moves.
    A,
    /// `b` frozen, `a` moves.
    B,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSystem {
    n: usize,
    forms: Vec<DMatrix<f64>>,
    levels: Vec<f64>,
    projective: bool,
}

impl BilinearSystem {
    pub fn new(
        n: usize,
        forms: Vec<DMatrix<f64>>,
        levels: Vec<f64>,
        projective: bool,
    ) -> Result<Self, FoliationError> {
        if forms.is_empty() {
            return Err(FoliationError::Dimension("no forms".into()));
        }
        if let Some(m) = forms.iter().find(|m| m.nrows() != n || m.ncols() != n) {
            return Err(FoliationError::Dimension(format!(
                "form is {}x{}, expected {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
        if levels.len() != forms.len() {
            return Err(FoliationError::Dimension(format!(
                "{} levels for {} forms",
                levels.len(),
                forms.len()
            )));
        }
        if projective && levels.iter().any(|&l| l != 0.0) {
            return Err(FoliationError::ProjectiveLevel);
        }
        Ok(Self { n, forms, levels, projective })
    }

    /// `a₁b₁ + a₂b₂ = 0` on `R² × R²`.
    pub fn example1() -> Self {
        Self::new(2, vec![DMatrix::identity(2, 2)], vec![0.0], false).expect("valid")
    }

    /// `a·b = 0` on `R³ × R³` in the chart `a₃ = b₃ = 1`, i.e.
    /// `a₁b₁ + a₂b₂ = −1` on `R² × R²`.
    pub fn example2_reduced() -> Self {
        Self::new(2, vec![DMatrix::identity(2, 2)], vec![-1.0], false).expect("valid")
    }

    /// `a·b = 0` on `S² × S²`.
    pub fn example2_projective() -> Self {
        Self::new(3, vec![DMatrix::identity(3, 3)], vec![0.0], true).expect("valid")
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn forms(&self) -> &[DMatrix<f64>] {
        &self.forms
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    pub fn values(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let (a, b) = (DVector::from_column_slice(a), DVector::from_column_slice(b));
        self.forms.iter().map(|m| a.dot(&(m * &b))).collect()
    }

    /// Largest deviation from the level set (including the unit spheres in
    /// projective mode). Each form's deviation is divided by
    /// `max(1, |a|·|b|·|M_k|)`, since alternating flows can grow the factors
    /// without bound.
    pub fn level_defect(&self, a: &[f64], b: &[f64]) -> f64 {
        let size = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ab = size(a) * size(b);
        let mut d = self
            .values(a, b)
            .iter()
            .zip(&self.levels)
            .zip(&self.forms)
            .map(|((v, l), m)| (v - l).abs() / (ab * m.norm()).max(1.0))
            .fold(0.0, f64::max);
        if self.projective {
            for x in [a, b] {
                d = d.max((x.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs());
            }
        }
        d
    }

    /// Polynomial leaf fields of `side` on `R^{2n}`.
    pub fn leaf_fields(&self, side: Side) -> Vec<Field> {
        let n = self.n;
        let vars = 2 * n;
        let (frozen, moving) = match side {
            Side::A => (0, n),
            Side::B => (n, 0),
        };
        // constraint columns in the moving factor's coordinates
        let mut columns: Vec<Vec<Poly>> = self
            .forms
            .iter()
            .map(|m| {
                (0..n)
                    .map(|i| {
                        let mut p = Poly::zero(vars);
                        for j in 0..n {
                            // A side: (Mᵀa)_i = Σ_j M_ji a_j; B side: (M b)_i = Σ_j M_ij b_j
                            let c = match side {
                                Side::A => m[(j, i)],
                                Side::B => m[(i, j)],
                            };
                            if c != 0.0 {
                                p = &p + &Poly::var(vars, frozen + j).scale(c);
                            }
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        if self.projective {
            columns.push((0..n).map(|i| Poly::var(vars, moving + i)).collect());
        }
        if columns.len() + 1 > n {
            return Vec::new();
        }
        let extra = n - 1 - columns.len();
        combinations(n, extra)
            .into_iter()
            .map(|set| {
                let mut field = vec![Poly::zero(vars); vars];
                for i in 0..n {
                    // rows are coordinates, columns [e_i | w_1 … | e_S]
                    let matrix: Vec<Vec<Poly>> = (0..n)
                        .map(|r| {
                            let mut row = vec![Poly::constant(vars, if r == i { 1.0 } else { 0.0 })];
                            row.extend(columns.iter().map(|c| c[r].clone()));
                            row.extend(
                                set.iter()
                                    .map(|&s| Poly::constant(vars, if r == s { 1.0 } else { 0.0 })),
                            );
                            row
                        })
                        .collect();
                    field[moving + i] = det(&matrix, vars);
                }
                field
            })
            .collect()
    }

    /// A random point of the level set: `a` Gaussian, `b` Gaussian and then
    /// projected onto the affine constraints (normalized in projective mode).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LeafState, FoliationError> {
        for _ in 0..16 {
            let mut a: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
            let b: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
            if self.projective {
                normalize(&mut a);
            }
            let state = LeafState { a, b, side: Side::A };
            let Ok(b) = self.project(&state, Side::A, DVector::from_vec(state.b.clone())) else {
                continue;
            };
            let state = LeafState { b: b.as_slice().to_vec(), ..state };
            if self.level_defect(&state.a, &state.b) < 1e-9 {
                return Ok(state);
            }
        }
        Err(FoliationError::Degenerate("could not reach the level set"))
    }

    /// Constraint rows for the moving factor of `side`.
    fn constraint_rows(&self, state: &LeafState, side: Side) -> DMatrix<f64> {
        let frozen = DVector::from_column_slice(match side {
            Side::A => &state.a,
            Side::B => &state.b,
        });
        let mut w = DMatrix::zeros(self.forms.len(), self.n);
        for (k, m) in self.forms.iter().enumerate() {
            let row = match side {
                Side::A => m.transpose() * &frozen,
                Side::B => m * &frozen,
            };
            w.set_row(k, &row.transpose());
        }
        w
    }

    /// Nearest point of the leaf's affine constraint set (normalized in
    /// projective mode).
    fn project(&self, state: &LeafState, side: Side, x: DVector<f64>) -> Result<DVector<f64>, FoliationError> {
        let w = self.constraint_rows(state, side);
        let levels = DVector::from_column_slice(&self.levels);
        let r = &w * &x - levels;
        let svd = (&w * w.transpose()).svd(true, true);
        let y = svd
            .solve(&r, 1e-14)
            .map_err(|_| FoliationError::Degenerate("constraint rows"))?;
        let mut x = x - w.transpose() * y;
        if self.projective {
            let n = x.norm();
            if n < 1e-12 {
                return Err(FoliationError::Degenerate("zero vector on a projective factor"));
            }
            x /= n;
        }
        Ok(x)
    }

    /// Dimension of the tangent space of the level set at the point,
    /// `2n − rank` of the constraint Jacobian.
    pub fn level_set_dimension(&self, state: &LeafState) -> usize {
        let n = self.n;
        let mut rows = Vec::new();
        let (a, b) = (DVector::from_column_slice(&state.a), DVector::from_column_slice(&state.b));
        for m in &self.forms {
            let mut g = DVector::zeros(2 * n);
            g.rows_mut(0, n).copy_from(&(m * &b));
            g.rows_mut(n, n).copy_from(&(m.transpose() * &a));
            rows.push(g);
        }
        if self.projective {
            let mut ga = DVector::zeros(2 * n);
            ga.rows_mut(0, n).copy_from(&a);
            let mut gb = DVector::zeros(2 * n);
            gb.rows_mut(n, n).copy_from(&b);
            rows.push(ga);
            rows.push(gb);
        }
        let jac = DMatrix::from_columns(&rows);
        2 * n - numerical_rank(jac)
    }
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn numerical_rank(m: DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

/// Point of `Rⁿ × Rⁿ` with the side that moved last.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafState {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub side: Side,
}

impl LeafState {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        Self { a, b, side: Side::A }
    }

    pub fn coordinates(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).copied().collect()
    }
}

const FLOW_TOL: f64 = 1e-10;
const MIN_STEP: f64 = 1e-12;
const MAX_STEPS: usize = 1_000_000;

/// Flows for time `t` along the first leaf field of `side`, by adaptive RK4
/// with step doubling and projection back onto the leaf after every step.
/// The frozen factor is copied unchanged.
pub fn leaf_flow(
    sys: &BilinearSystem,
    state: &LeafState,
    side: Side,
    t: f64,
) -> Result<LeafState, FoliationError> {
    if state.a.len() != sys.n || state.b.len() != sys.n {
        return Err(FoliationError::Dimension("state does not match the system".into()));
    }
    let defect = sys.level_defect(&state.a, &state.b);
    if defect > 1e-9 {
        return Err(FoliationError::NotOnLevelSet { defect });
    }
    let mut out = state.clone();
    out.side = side;
    if t == 0.0 {
        return Ok(out);
    }
    let Some(field) = sys.leaf_fields(side).into_iter().next() else {
        return Ok(out);
    };
    let n = sys.n;
    let moving = match side {
        Side::A => n,
        Side::B => 0,
    };
    let rhs = |x: &DVector<f64>| -> DVector<f64> {
        let mut point = out.coordinates();
        point[moving..moving + n].copy_from_slice(x.as_slice());
        let v = eval_field(&field, &point);
        DVector::from_column_slice(&v[moving..moving + n])
    };
    let rk4 = |x: &DVector<f64>, h: f64| -> DVector<f64> {
        let k1 = rhs(x);
        let k2 = rhs(&(x + &k1 * (h / 2.0)));
        let k3 = rhs(&(x + &k2 * (h / 2.0)));
        let k4 = rhs(&(x + &k3 * h));
        x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    };

    let mut x = DVector::from_column_slice(match side {
        Side::A => &state.b,
        Side::B => &state.a,
    });
    let dir = t.signum();
    let total = t.abs();
    let mut done = 0.0;
    let mut h = total.min(0.1);
    let mut steps = 0;
    while done < total {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(FoliationError::StepFailure { t: dir * done });
        }
        h = h.min(total - done);
        let full = rk4(&x, dir * h);
        let half = rk4(&rk4(&x, dir * h / 2.0), dir * h / 2.0);
        // relative to the size of the moving factor
        let err = (&full - &half).amax() / 15.0 / x.amax().max(1.0);
        if err <= FLOW_TOL * h || h <= MIN_STEP {
            if err > FLOW_TOL * h {
                return Err(FoliationError::StepFailure { t: dir * done });
            }
            let extrapolated = &half + (&half - full) / 15.0;
            x = sys.project(&out, side, extrapolated)?;
            done += h;
            let grow = if err == 0.0 { 2.0 } else { (0.9 * (FLOW_TOL * h / err).powf(0.25)).min(2.0) };
            h *= grow.max(0.2);
        } else {
            h *= (0.9 * (FLOW_TOL * h / err).powf(0.25)).clamp(0.1, 0.5);
        }
    }
    match side {
        Side::A => out.b = x.as_slice().to_vec(),
        Side::B => out.a = x.as_slice().to_vec(),
    }
    let defect = sys.level_defect(&out.a, &out.b);
    if defect > 1e-9 {
        return Err(FoliationError::NotOnLevelSet { defect });
    }
    Ok(out)
}

/// Projective point `[a₁ : a₂]` as an angle in `[0, π)`, checked against
/// the equal point `[−b₂ : b₁]`.
pub fn example1_invariant(state: &LeafState) -> Result<f64, FoliationError> {
    if state.a.len() != 2 || state.b.len() != 2 {
        return Err(FoliationError::Dimension("Example 1 lives on R² × R²".into()));
    }
    let norm = |x: &[f64]| x[0].hypot(x[1]);
    if norm(&state.a) < 1e-12 {
        return Err(FoliationError::Degenerate("a = 0"));
    }
    if norm(&state.b) < 1e-12 {
        return Err(FoliationError::Degenerate("b = 0"));
    }
    let from_a = projective_angle(state.a[0], state.a[1]);
    let from_b = projective_angle(-state.b[1], state.b[0]);
    let gap = angle_gap(from_a, from_b);
    if gap > 1e-10 {
        return Err(FoliationError::NotOnLevelSet { defect: gap });
    }
    Ok(from_a)
}

fn projective_angle(x: f64, y: f64) -> f64 {
    let t = y.atan2(x).rem_euclid(std::f64::consts::PI);
    if t >= std::f64::consts::PI {
        0.0
    } else {
        t
    }
}

/// Distance between two angles modulo `π`.
pub fn angle_gap(s: f64, t: f64) -> f64 {
    let d = (s - t).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

/// The leaf fields of both sides and their iterated brackets, as
/// polynomials, for repeated rank evaluations.
pub struct BracketSpan {
    fields: Vec<Field>,
}

impl BracketSpan {
    /// Brackets nested up to `depth` deep.
    pub fn new(sys: &BilinearSystem, depth: usize) -> Self {
        let base: Vec<Field> = sys
            .leaf_fields(Side::A)
            .into_iter()
            .chain(sys.leaf_fields(Side::B))
            .collect();
        let mut fields = base.clone();
        let mut layer = base.clone();
        for _ in 0..depth {
            let next: Vec<Field> = base
                .iter()
                .flat_map(|x| layer.iter().map(move |y| bracket(x, y)))
                .filter(|f| !f.iter().all(Poly::is_zero))
                .collect();
            fields.extend(next.iter().cloned());
            layer = next;
        }
        Self { fields }
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn rank(&self, state: &LeafState) -> usize {
        let point = state.coordinates();
        if self.fields.is_empty() {
            return 0;
        }
        let cols: Vec<DVector<f64>> = self
            .fields
            .iter()
            .map(|f| DVector::from_vec(eval_field(f, &point)))
            .collect();
        numerical_rank(DMatrix::from_columns(&cols))
    }
}

/// Rank of the span of the leaf fields and their brackets to depth 3.
pub fn bracket_rank(sys: &BilinearSystem, state: &LeafState) -> usize {
    BracketSpan::new(sys, 3).rank(state)
}
