//! Words in the edge generators `a_i`, `b_i` (and `c_i` for hand-coded
//! presentations).
//!
//! Text grammar:
//!
//! ```text
//! word   := '1' | letter (sep letter)*
//! letter := kind int ('^' '-'? int)?
//! kind   := 'a' | 'b' | 'c'
//! sep    := ws* ('.' | '*')? ws*
//! ```
//!
//! Indices are one-indexed. An exponent `^k` expands to `|k|` copies of the
//! letter (inverted when `k < 0`); the result is freely reduced.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("word parse error at byte {pos}: {msg}")]
pub struct WordParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenKind {
    A,
    B,
    C,
}

impl GenKind {
    fn symbol(self) -> char {
        match self {
            GenKind::A => 'a',
            GenKind::B => 'b',
            GenKind::C => 'c',
        }
    }
}

/// Edge generator, one-indexed as written (`a1` has `index == 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    pub kind: GenKind,
    pub index: usize,
}

impl Generator {
    pub fn a(index: usize) -> Self {
        Self { kind: GenKind::A, index }
    }

    pub fn b(index: usize) -> Self {
        Self { kind: GenKind::B, index }
    }

    pub fn c(index: usize) -> Self {
        Self { kind: GenKind::C, index }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.symbol(), self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: Generator) -> Self {
        Self { generator, inverse: false }
    }

    pub fn inv(generator: Generator) -> Self {
        Self { generator, inverse: true }
    }

    pub fn inverted(self) -> Self {
        Self { inverse: !self.inverse, ..self }
    }

    pub fn exponent(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// Freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GeneratorWord {
    letters: Vec<Letter>,
}

impl GeneratorWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut reduced: Vec<Letter> = Vec::new();
        for l in letters {
            if reduced.last() == Some(&l.inverted()) {
                reduced.pop();
            } else {
                reduced.push(l);
            }
        }
        Self { letters: reduced }
    }

    /// Positive word `g_1 g_2 … g_n`.
    pub fn positive(gens: impl IntoIterator<Item = Generator>) -> Self {
        Self::new(gens.into_iter().map(Letter::new))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self::new(self.letters.iter().chain(other.letters.iter()).copied())
    }

    /// Whether `other` is a cyclic rotation of `self` (letter for letter).
    pub fn is_rotation_of(&self, other: &Self) -> bool {
        let n = self.len();
        if n != other.len() {
            return false;
        }
        if n == 0 {
            return true;
        }
        (0..n).any(|s| (0..n).all(|k| self.letters[(k + s) % n] == other.letters[k]))
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.letters.iter().map(|l| l.generator)
    }

    pub fn parse(text: &str) -> Result<Self, WordParseError> {
        parse_word(text)
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l.generator)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

fn parse_word(text: &str) -> Result<GeneratorWord, WordParseError> {
    let bytes = text.as_bytes();
    let err = |pos: usize, msg: &str| WordParseError { pos, msg: msg.to_string() };
    let mut pos = 0;
    let ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let int = |pos: &mut usize| -> Option<usize> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        text[start..*pos].parse().ok()
    };
    ws(&mut pos);
    if text.trim() == "1" {
        return Ok(GeneratorWord::empty());
    }
    let mut letters = Vec::new();
    let mut first = true;
    while pos < bytes.len() {
        if !first {
            ws(&mut pos);
            if pos < bytes.len() && (bytes[pos] == b'.' || bytes[pos] == b'*') {
                pos += 1;
                ws(&mut pos);
            }
            if pos >= bytes.len() {
                return Err(err(pos, "dangling separator"));
            }
        }
        first = false;
        let kind = match bytes[pos] {
            b'a' => GenKind::A,
            b'b' => GenKind::B,
            b'c' => GenKind::C,
            _ => return Err(err(pos, "expected generator a, b or c")),
        };
        pos += 1;
        let at = pos;
        let index = int(&mut pos).ok_or_else(|| err(at, "expected generator index"))?;
        if index == 0 {
            return Err(err(at, "generator indices are one-indexed"));
        }
        let mut exponent: i64 = 1;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            let neg = pos < bytes.len() && bytes[pos] == b'-';
            if neg {
                pos += 1;
            }
            let at = pos;
            let e = int(&mut pos).ok_or_else(|| err(at, "expected exponent"))? as i64;
            exponent = if neg { -e } else { e };
        }
        let g = Generator { kind, index };
        let letter = if exponent < 0 { Letter::inv(g) } else { Letter::new(g) };
        for _ in 0..exponent.unsigned_abs() {
            letters.push(letter);
        }
        ws(&mut pos);
    }
    if letters.is_empty() && !text.trim().is_empty() {
        return Err(err(0, "empty word"));
    }
    Ok(GeneratorWord::new(letters))
}
