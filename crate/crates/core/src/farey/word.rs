//! Words over the inverse branches `L(x) = x/(x+1)` and `R(x) = 1/(x+1)`.
//!
//! A word lists letters in application order: `[w1, w2, ..., wk]` means
//! `w1` is applied first, so the composed map is `wk ∘ ... ∘ w1` and its
//! matrix is `M(wk) ... M(w1)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::FareyError;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    L,
    R,
}

impl Letter {
    pub fn apply<T: Real>(self, x: T) -> T {
        match self {
            Letter::L => x.clone() / (x + T::one()),
            Letter::R => T::one() / (x + T::one()),
        }
    }

    pub fn matrix(self) -> MoebiusMatrix {
        match self {
            Letter::L => MoebiusMatrix::from_i64(1, 0, 1, 1),
            Letter::R => MoebiusMatrix::from_i64(0, 1, 1, 1),
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'L' | 'l' => Some(Letter::L),
            'R' | 'r' => Some(Letter::R),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::L => 'L',
            Letter::R => 'R',
        }
    }
}

/// `x -> (a x + b) / (c x + d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MoebiusMatrix {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl MoebiusMatrix {
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        MoebiusMatrix {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    /// Matrix product `self * rhs`, i.e. the map `self ∘ rhs`.
    pub fn mul(&self, rhs: &MoebiusMatrix) -> MoebiusMatrix {
        MoebiusMatrix {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_nonnegative(&self) -> bool {
        let zero = BigInt::zero();
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .all(|e| **e >= zero)
    }

    /// Determinant is +1 or -1.
    pub fn is_unimodular(&self) -> bool {
        let det = self.det();
        det == BigInt::one() || det == -BigInt::one()
    }

    pub fn apply<T: Real>(&self, x: T) -> T {
        let num = T::from_bigint(&self.a) * x.clone() + T::from_bigint(&self.b);
        let den = T::from_bigint(&self.c) * x + T::from_bigint(&self.d);
        num / den
    }
}

impl fmt::Display for MoebiusMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FareyWord {
    letters: Vec<Letter>,
}

impl FareyWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self, FareyError> {
        if letters.is_empty() {
            return Err(FareyError::EmptyWord);
        }
        Ok(FareyWord { letters })
    }

    /// Parses letters `L`/`R`; commas and whitespace are ignored.
    pub fn parse(text: &str) -> Result<Self, FareyError> {
        let mut letters = Vec::new();
        for c in text.chars() {
            if c == ',' || c.is_whitespace() {
                continue;
            }
            letters.push(Letter::from_char(c).ok_or(FareyError::InvalidLetter(c))?);
        }
        Self::new(letters)
    }

    /// Word of length `k` whose bit `i` (from the most significant of `k`)
    /// selects `R` when set.
    pub(crate) fn from_bits(bits: u32, k: usize) -> Self {
        let letters = (0..k)
            .map(|i| {
                if bits >> (k - 1 - i) & 1 == 1 {
                    Letter::R
                } else {
                    Letter::L
                }
            })
            .collect();
        FareyWord { letters }
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

    /// The word rotated left by `shift`.
    pub fn rotated(&self, shift: usize) -> FareyWord {
        let mut letters = self.letters.clone();
        letters.rotate_left(shift % self.len());
        FareyWord { letters }
    }

    /// Lexicographically minimal rotation, `L < R`.
    pub fn canonical(&self) -> FareyWord {
        (0..self.len())
            .map(|s| self.rotated(s))
            .min()
            .expect("nonempty word")
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    pub fn is_rotation_of(&self, other: &FareyWord) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }

    /// All-`L` words fix only 0.
    pub fn is_degenerate(&self) -> bool {
        self.letters.iter().all(|&l| l == Letter::L)
    }

    /// Smallest `p` with the word equal to a power of its length-`p` prefix.
    pub fn primitive_period(&self) -> usize {
        let k = self.len();
        (1..=k)
            .find(|&p| k.is_multiple_of(p) && (p..k).all(|i| self.letters[i] == self.letters[i - p]))
            .unwrap_or(k)
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive_period() == self.len()
    }

    /// Applies the letters in order.
    pub fn apply<T: Real>(&self, x: T) -> T {
        self.letters.iter().fold(x, |acc, &l| l.apply(acc))
    }

    /// The value after each letter: `[w1(x), w2(w1(x)), ...]`.
    pub fn trajectory<T: Real>(&self, x: T) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len());
        let mut cur = x;
        for &l in &self.letters {
            cur = l.apply(cur);
            out.push(cur.clone());
        }
        out
    }
}

impl fmt::Display for FareyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl TryFrom<String> for FareyWord {
    type Error = FareyError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<FareyWord> for String {
    fn from(w: FareyWord) -> String {
        w.to_string()
    }
}

impl FromStr for FareyWord {
    type Err = FareyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Matrix of the composed map; the first letter is the rightmost factor.
pub fn word_matrix(word: &FareyWord) -> MoebiusMatrix {
    word.letters
        .iter()
        .fold(MoebiusMatrix::identity(), |acc, l| l.matrix().mul(&acc))
}
