//! Permutations of `{1..d}` in cycle notation.
//!
//! Grammar accepted by [`parse_cycles`]:
//!
//! ```text
//! perm  := ws* cycle* ws*
//! cycle := '(' ws* int (sep int)* ws* ')' ws*
//! sep   := ws+ | ws* ',' ws*
//! int   := [1-9][0-9]*
//! ```
//!
//! Points are one-indexed; fixed points may be omitted. Internally the
//! permutation is stored zero-indexed as an image table.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("point {point} repeated in cycle notation")]
    Repeated { point: usize },
    #[error("point {point} exceeds degree {degree}")]
    OutOfRange { point: usize, degree: usize },
    #[error("image table is not a bijection")]
    NotBijective,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Self { images: (0..d).collect() }
    }

    /// From a zero-indexed image table.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(PermError::NotBijective);
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    /// From one-indexed cycles on `{1..d}`.
    pub fn from_cycles(d: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..d).collect();
        let mut seen = vec![false; d];
        for cycle in cycles {
            for &p in cycle {
                if p == 0 || p > d {
                    return Err(PermError::OutOfRange { point: p, degree: d });
                }
                if seen[p - 1] {
                    return Err(PermError::Repeated { point: p });
                }
                seen[p - 1] = true;
            }
            for (k, &p) in cycle.iter().enumerate() {
                images[p - 1] = cycle[(k + 1) % cycle.len()] - 1;
            }
        }
        Ok(Self { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree());
        Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    /// Cycles (zero-indexed), each starting at its smallest point, sorted by
    /// that point. Fixed points are included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }
}

impl fmt::Display for Permutation {
    /// One-indexed cycle notation with fixed points shown.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in self.cycles() {
            write!(f, "(")?;
            for (k, p) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Parses one-indexed cycle notation such as `"(1 2 3)(4 5)"` or `"(1,3)(2)"`.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<usize>>, PermError> {
    let bytes = text.as_bytes();
    let err = |pos: usize, msg: &str| PermError::Parse { pos, msg: msg.to_string() };
    let mut pos = 0;
    let mut cycles = Vec::new();
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    skip_ws(&mut pos);
    while pos < bytes.len() {
        if bytes[pos] != b'(' {
            return Err(err(pos, "expected '('"));
        }
        pos += 1;
        let mut cycle = Vec::new();
        loop {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                return Err(err(pos, "unterminated cycle"));
            }
            match bytes[pos] {
                b')' => {
                    if cycle.is_empty() {
                        return Err(err(pos, "empty cycle"));
                    }
                    pos += 1;
                    break;
                }
                b',' => {
                    if cycle.is_empty() {
                        return Err(err(pos, "separator before first point"));
                    }
                    pos += 1;
                    skip_ws(&mut pos);
                    if pos < bytes.len() && !bytes[pos].is_ascii_digit() {
                        return Err(err(pos, "expected a point after ','"));
                    }
                }
                c if c.is_ascii_digit() => {
                    let start = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let n: usize = text[start..pos]
                        .parse()
                        .map_err(|_| err(start, "integer overflow"))?;
                    if n == 0 {
                        return Err(err(start, "points are one-indexed"));
                    }
                    cycle.push(n);
                }
                _ => return Err(err(pos, "unexpected character")),
            }
        }
        cycles.push(cycle);
        skip_ws(&mut pos);
    }
    if cycles.is_empty() {
        return Err(err(0, "no cycles"));
    }
    Ok(cycles)
}

/// Largest point mentioned in a list of cycles.
pub fn max_point(cycles: &[Vec<usize>]) -> usize {
    cycles.iter().flatten().copied().max().unwrap_or(0)
}
