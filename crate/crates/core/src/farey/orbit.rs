//! Exact periodic points of words and enumeration of their rotation classes.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::quadratic::QuadraticIrrational;
use super::word::{word_matrix, FareyWord};
use super::FareyError;
use crate::scalar::{Rational, Real};

pub const MAX_ENUMERATION_LENGTH: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPoint {
    pub word: FareyWord,
    pub value: QuadraticIrrational,
    pub primitive_period: usize,
    pub degenerate: bool,
}

/// The fixed point in `[0, 1]` of the word's composed map.
///
/// All-`L` words give 0 flagged degenerate. Every other word has a unique
/// positive root of `c x^2 + (d - a) x - b = 0`, which lies in `(0, 1)`.
pub fn periodic_point(word: &FareyWord) -> Result<PeriodicPoint, FareyError> {
    let primitive_period = word.primitive_period();
    if word.is_degenerate() {
        return Ok(PeriodicPoint {
            word: word.clone(),
            value: QuadraticIrrational::zero(),
            primitive_period,
            degenerate: true,
        });
    }
    let m = word_matrix(word);
    let diff = &m.a - &m.d;
    let disc = &diff * &diff + BigInt::from(4) * &m.b * &m.c;
    let two_c = BigInt::from(2) * &m.c;
    let value = QuadraticIrrational::new(
        Rational::new(diff, two_c.clone()),
        Rational::new(BigInt::from(1), two_c),
        &disc,
    )
    .map_err(|e| match e {
        FareyError::TooLarge(_) => FareyError::TooLarge(format!("discriminant of word {word}")),
        other => other,
    })?;
    debug_assert!(value > QuadraticIrrational::zero() && value < QuadraticIrrational::one());
    Ok(PeriodicPoint {
        word: word.clone(),
        value,
        primitive_period,
        degenerate: false,
    })
}

/// The distinct orbit values `x_0, x_1, ...` where `x_0` is the periodic
/// point and `x_{i+1}` applies the next letter. Its length is the primitive
/// period of the word.
pub fn orbit(word: &FareyWord) -> Result<Vec<QuadraticIrrational>, FareyError> {
    let point = periodic_point(word)?;
    if point.degenerate {
        return Ok(vec![point.value]);
    }
    let mut values = Vec::with_capacity(point.primitive_period);
    let mut cur = point.value;
    for &letter in &word.letters()[..point.primitive_period] {
        values.push(cur.clone());
        cur = letter.apply(cur);
    }
    Ok(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OrbitKind {
    Degenerate,
    Primitive,
    Power { primitive_period: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClass {
    /// Canonical representative of the rotation class.
    pub word: FareyWord,
    pub kind: OrbitKind,
    pub values: Vec<QuadraticIrrational>,
}

/// One entry per rotation class of words of length `k`, in lexicographic order
/// of canonical representatives. Degenerate and non-primitive classes are
/// kept and annotated.
pub fn enumerate_orbits(k: usize) -> Result<Vec<OrbitClass>, FareyError> {
    if k == 0 || k > MAX_ENUMERATION_LENGTH {
        return Err(FareyError::OutOfBounds(k));
    }
    let mut out = Vec::new();
    for bits in 0u32..(1u32 << k) {
        let word = FareyWord::from_bits(bits, k);
        if !word.is_canonical() {
            continue;
        }
        let period = word.primitive_period();
        let kind = if word.is_degenerate() {
            OrbitKind::Degenerate
        } else if period < k {
            OrbitKind::Power {
                primitive_period: period,
            }
        } else {
            OrbitKind::Primitive
        };
        let values = orbit(&word)?;
        out.push(OrbitClass { word, kind, values });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub max_k: usize,
    /// `(k, number of primitive classes of length k)`.
    pub primitive_counts: Vec<(usize, usize)>,
    pub total_values: usize,
    /// Pairs of words sharing an orbit value.
    pub collisions: Vec<(String, String, String)>,
}

impl UniquenessReport {
    pub fn all_distinct(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Checks that primitive orbit values are pairwise distinct over all lengths
/// `1..=max_k`, both within and across orbits.
pub fn uniqueness_report(max_k: usize) -> Result<UniquenessReport, FareyError> {
    let mut seen: HashMap<QuadraticIrrational, FareyWord> = HashMap::new();
    let mut primitive_counts = Vec::new();
    let mut collisions = Vec::new();
    let mut total_values = 0;
    for k in 1..=max_k {
        let mut count = 0;
        for class in enumerate_orbits(k)? {
            if class.kind != OrbitKind::Primitive {
                continue;
            }
            count += 1;
            for v in class.values {
                total_values += 1;
                if let Some(prev) = seen.get(&v) {
                    collisions.push((v.to_string(), prev.to_string(), class.word.to_string()));
                } else {
                    seen.insert(v, class.word.clone());
                }
            }
        }
        primitive_counts.push((k, count));
    }
    Ok(UniquenessReport {
        max_k,
        primitive_counts,
        total_values,
        collisions,
    })
}

/// Continued-fraction terms of `x` in `(0, 1]` by exact Gauss-map iteration.
/// Stops early when a remainder reaches 0.
pub fn cf_expansion<T: Real>(x: T, max_terms: usize) -> Result<Vec<BigInt>, FareyError> {
    if x <= T::zero() || x > T::one() {
        return Err(FareyError::Domain {
            op: "cf_expansion",
            value: x.to_f64(),
        });
    }
    let mut terms = Vec::new();
    let mut cur = x;
    while terms.len() < max_terms && !cur.is_zero() {
        let y = T::one() / cur;
        let n = y.floor_int();
        cur = y - T::from_bigint(&n);
        terms.push(n);
    }
    Ok(terms)
}

/// Terms as `u64` when they all fit.
pub fn cf_terms_u64(terms: &[BigInt]) -> Option<Vec<u64>> {
    terms.iter().map(|t| t.to_u64()).collect()
}
