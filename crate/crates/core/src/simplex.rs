//! Points of the probability simplex, mistake dichotomies and the lattices they form.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// Float-mode tolerance on the sum of a weight vector.
pub const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplexError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty vector")]
    Empty,
    #[error("weight {index} is not positive")]
    NonPositiveWeight { index: usize },
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: String },
    #[error("entry {index} is {value}, expected +1 or -1")]
    InvalidEntry { index: usize, value: i8 },
    #[error("dichotomy has no correctly classified point")]
    NoCorrectEntry,
    #[error("hypothesis pool is empty")]
    EmptyPool,
    #[error("index {index} out of bounds for length {len}")]
    IndexOutOfBounds { index: usize, len: usize },
    #[error("index {index} listed twice")]
    DuplicateIndex { index: usize },
    #[error("lattice needs at least 2 columns, found {found}")]
    InsufficientColumns { found: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// The AdaBoost state: a strictly positive distribution over the `n` data points.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<S> {
    components: Vec<S>,
}

impl<S: Scalar> WeightVector<S> {
    /// Validates positivity and normalization (exact in exact mode, within
    /// [`FLOAT_SUM_TOLERANCE`] in float mode).
    pub fn new(components: Vec<S>) -> Result<Self, SimplexError> {
        if components.is_empty() {
            return Err(SimplexError::Empty);
        }
        if let Some(index) = components.iter().position(|w| *w <= S::zero()) {
            return Err(SimplexError::NonPositiveWeight { index });
        }
        let sum = components.iter().cloned().fold(S::zero(), |acc, w| acc + w);
        if !sum.approx_eq(&S::one(), FLOAT_SUM_TOLERANCE) {
            return Err(SimplexError::NotNormalized { sum: sum.to_text() });
        }
        Ok(WeightVector { components })
    }

    pub fn uniform(n: usize) -> Result<Self, SimplexError> {
        if n == 0 {
            return Err(SimplexError::Empty);
        }
        let w = S::from_ratio(1, n as i64);
        Ok(WeightVector {
            components: vec![w; n],
        })
    }

    /// Skips validation; callers guarantee the simplex invariants.
    pub(crate) fn from_components_unchecked(components: Vec<S>) -> Self {
        WeightVector { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[S] {
        &self.components
    }

    pub fn get(&self, i: usize) -> Option<&S> {
        self.components.get(i)
    }

    pub fn sum(&self) -> S {
        self.components
            .iter()
            .cloned()
            .fold(S::zero(), |acc, w| acc + w)
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.components.iter().map(|w| w.to_f64()).collect()
    }

    /// Largest componentwise distance to `other`, in `f64`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.abs_diff(b).to_f64())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

/// Correct (+1) / incorrect (-1) record of one hypothesis over the data points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MistakeDichotomy {
    entries: Vec<i8>,
}

impl MistakeDichotomy {
    pub fn new(entries: Vec<i8>) -> Result<Self, SimplexError> {
        if entries.is_empty() {
            return Err(SimplexError::Empty);
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, &v)| v != 1 && v != -1)
        {
            return Err(SimplexError::InvalidEntry { index, value });
        }
        if !entries.contains(&1) {
            return Err(SimplexError::NoCorrectEntry);
        }
        Ok(MistakeDichotomy { entries })
    }

    /// Parses the `+-+` notation used by pool files.
    pub fn from_signs(text: &str) -> Result<Self, SimplexError> {
        let entries = text
            .trim()
            .chars()
            .enumerate()
            .map(|(index, c)| match c {
                '+' => Ok(1),
                '-' | '\u{2212}' => Ok(-1),
                _ => Err(SimplexError::Parse {
                    line: 0,
                    reason: format!("unexpected character `{c}` at column {}", index + 1),
                }),
            })
            .collect::<Result<Vec<i8>, _>>()?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_correct(&self, i: usize) -> bool {
        self.entries[i] == 1
    }

    /// Indices of misclassified points.
    pub fn misclassified(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == -1)
            .map(|(i, _)| i)
    }

    /// The dichotomy of the sign-flipped hypothesis; fails when every point is
    /// currently correct.
    pub fn negated(&self) -> Result<Self, SimplexError> {
        Self::new(self.entries.iter().map(|e| -e).collect())
    }
}

impl fmt::Display for MistakeDichotomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &e in &self.entries {
            f.write_str(if e == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolOrigin {
    /// A fixed matrix of dichotomies supplied up front.
    Synthetic,
    /// Dichotomies accumulated from a weak learner during a run.
    Learned,
}

/// The dichotomies available to the booster, pairwise distinct and of equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisPool {
    rows: Vec<MistakeDichotomy>,
    origin: PoolOrigin,
}

impl HypothesisPool {
    /// Checks lengths and drops repeated rows, keeping the first occurrence so
    /// row indices stay meaningful for tie-breaking.
    pub fn new(rows: Vec<MistakeDichotomy>, origin: PoolOrigin) -> Result<Self, SimplexError> {
        let first = rows.first().ok_or(SimplexError::EmptyPool)?;
        let n = first.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(SimplexError::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let mut sorted: Vec<&MistakeDichotomy> = rows.iter().collect();
        sorted.sort_unstable();
        sorted.dedup();
        let rows = if sorted.len() == rows.len() {
            rows
        } else {
            let mut seen = HashSet::with_capacity(rows.len());
            rows.into_iter()
                .filter(|r| seen.insert(r.clone()))
                .collect()
        };
        Ok(HypothesisPool { rows, origin })
    }

    /// Parses a pool file: one `+`/`-` row per line, `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, SimplexError> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = MistakeDichotomy::from_signs(line).map_err(|e| SimplexError::Parse {
                line: lineno + 1,
                reason: e.to_string(),
            })?;
            rows.push(row);
        }
        Self::new(rows, PoolOrigin::Synthetic)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }

    pub fn rows(&self) -> &[MistakeDichotomy] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> Option<&MistakeDichotomy> {
        self.rows.get(i)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of data points each row covers.
    pub fn n_points(&self) -> usize {
        self.rows[0].len()
    }

    pub fn origin(&self) -> PoolOrigin {
        self.origin
    }

    pub fn position(&self, eta: &MistakeDichotomy) -> Option<usize> {
        self.rows.iter().position(|r| r == eta)
    }
}

/// Iteration-ordered dichotomies chosen by a run, starting at `first_iteration`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MistakeLattice {
    first_iteration: usize,
    columns: Vec<MistakeDichotomy>,
}

impl MistakeLattice {
    pub fn new(
        first_iteration: usize,
        columns: Vec<MistakeDichotomy>,
    ) -> Result<Self, SimplexError> {
        if let Some(first) = columns.first() {
            let n = first.len();
            if let Some(bad) = columns.iter().find(|c| c.len() != n) {
                return Err(SimplexError::DimensionMismatch {
                    expected: n,
                    found: bad.len(),
                });
            }
        }
        Ok(MistakeLattice {
            first_iteration,
            columns,
        })
    }

    pub fn first_iteration(&self) -> usize {
        self.first_iteration
    }

    pub fn columns(&self) -> &[MistakeDichotomy] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

/// Outcome of the periodic learning condition check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum NablaStatus {
    Holds,
    /// Point `row` is misclassified at both `iteration` and `iteration + 1`.
    Violated {
        row: usize,
        iteration: usize,
    },
}

impl NablaStatus {
    pub fn holds(&self) -> bool {
        matches!(self, NablaStatus::Holds)
    }
}

/// Edge `sum_i eta_i w_i` of a dichotomy under `w`.
pub fn edge_dot<S: Scalar>(w: &WeightVector<S>, eta: &MistakeDichotomy) -> Result<S, SimplexError> {
    signed_sum(w, eta.entries())
}

pub(crate) fn signed_sum<S: Scalar>(w: &WeightVector<S>, signs: &[i8]) -> Result<S, SimplexError> {
    if w.len() != signs.len() {
        return Err(SimplexError::DimensionMismatch {
            expected: w.len(),
            found: signs.len(),
        });
    }
    let mut plus = S::zero();
    let mut minus = S::zero();
    for (wi, &s) in w.components().iter().zip(signs) {
        if s > 0 {
            plus = plus + wi.clone();
        } else {
            minus = minus + wi.clone();
        }
    }
    Ok(plus - minus)
}

/// Edge written through the misclassified set: `1 - 2 sum_{j in J} w_j`.
pub fn edge_from_misclassified<S: Scalar>(
    w: &WeightVector<S>,
    misclassified: &[usize],
) -> Result<S, SimplexError> {
    let mut seen = HashSet::with_capacity(misclassified.len());
    let mut mass = S::zero();
    for &j in misclassified {
        let wj = w.get(j).ok_or(SimplexError::IndexOutOfBounds {
            index: j,
            len: w.len(),
        })?;
        if !seen.insert(j) {
            return Err(SimplexError::DuplicateIndex { index: j });
        }
        mass = mass + wj.clone();
    }
    Ok(S::one() - (mass.clone() + mass))
}

/// Checks that no row holds -1 in two consecutive columns, reporting the
/// earliest violation (by iteration, then row).
pub fn check_nabla(lattice: &MistakeLattice) -> Result<NablaStatus, SimplexError> {
    if lattice.len() < 2 {
        return Err(SimplexError::InsufficientColumns {
            found: lattice.len(),
        });
    }
    for (t, pair) in lattice.columns.windows(2).enumerate() {
        let (cur, next) = (pair[0].entries(), pair[1].entries());
        if let Some(row) = cur.iter().zip(next).position(|(&a, &b)| a == -1 && b == -1) {
            return Ok(NablaStatus::Violated {
                row,
                iteration: lattice.first_iteration + t,
            });
        }
    }
    Ok(NablaStatus::Holds)
}
