//! Sparse multivariate polynomials with `f64` coefficients, enough to take
//! exact Lie brackets of polynomial vector fields.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    vars: usize,
    terms: BTreeMap<Vec<u8>, f64>,
}

impl Poly {
    pub fn zero(vars: usize) -> Self {
        Self { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: f64) -> Self {
        let mut p = Self::zero(vars);
        p.insert(vec![0; vars], c);
        p
    }

    /// The coordinate `x_k`.
    pub fn var(vars: usize, k: usize) -> Self {
        let mut e = vec![0; vars];
        e[k] = 1;
        let mut p = Self::zero(vars);
        p.insert(e, 1.0);
        p
    }

    fn insert(&mut self, e: Vec<u8>, c: f64) {
        if c == 0.0 {
            return;
        }
        let v = self.terms.get(&e).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, &c) in &self.terms {
            out.insert(e.clone(), c * s);
        }
        out
    }

    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, &c) in &self.terms {
            if e[k] > 0 {
                let mut f = e.clone();
                f[k] -= 1;
                out.insert(f, c * e[k] as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&p, &v)| v.powi(p as i32))
                    .product::<f64>()
            })
            .sum()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, &c) in &o.terms {
            out.insert(e.clone(), c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.vars);
        for (e, &c) in &self.terms {
            for (f, &d) in &o.terms {
                let g: Vec<u8> = e.iter().zip(f).map(|(x, y)| x + y).collect();
                out.insert(g, c * d);
            }
        }
        out
    }
}

/// Determinant by cofactor expansion along the first column.
pub fn det(m: &[Vec<Poly>], vars: usize) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::constant(vars, 1.0);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut out = Poly::zero(vars);
    for r in 0..n {
        if m[r][0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = (0..n)
            .filter(|&i| i != r)
            .map(|i| m[i][1..].to_vec())
            .collect();
        let term = &m[r][0] * &det(&minor, vars);
        out = if r % 2 == 0 { &out + &term } else { &out - &term };
    }
    out
}

/// Polynomial vector field on `R^vars`.
pub type Field = Vec<Poly>;

/// `[X, Y]_i = Σ_j X_j ∂_j Y_i − Y_j ∂_j X_i`.
pub fn bracket(x: &Field, y: &Field) -> Field {
    let vars = x.len();
    (0..vars)
        .map(|i| {
            let mut acc = Poly::zero(vars);
            for j in 0..vars {
                acc = &acc + &(&x[j] * &y[i].derivative(j));
                acc = &acc - &(&y[j] * &x[i].derivative(j));
            }
            acc
        })
        .collect()
}

pub fn eval_field(f: &Field, x: &[f64]) -> Vec<f64> {
    f.iter().map(|p| p.eval(x)).collect()
}
