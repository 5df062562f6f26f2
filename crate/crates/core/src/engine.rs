//! The Optimal AdaBoost map on the simplex.
//!
//! Iterations are numbered from 0: the run starts from the uniform vector
//! `w_0`, step `t` selects `eta_t` with edge `r_t = w_t . eta_t` and produces
//! `w_{t+1}` with the rational update `w_{i,t+1} = w_{i,t} / (1 + eta_{i,t} r_t)`.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::{Mode, ParseScalarError, Scalar};
use crate::simplex::{
    edge_dot, HypothesisPool, MistakeDichotomy, MistakeLattice, SimplexError, WeightVector,
};

/// Float-mode tolerance when checking that a supplied edge matches `w . eta`.
const EDGE_CONSISTENCY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error("no hypothesis has a positive edge (best edge {best_edge})")]
    WeakLearningFailure { best_edge: String },
    #[error("edge is 1: perfect classification, the weight update is undefined")]
    PerfectClassification,
    #[error("edge {edge} is not in (0, 1)")]
    InvalidEdge { edge: String },
    #[error("edge {given} does not match w . eta = {actual}")]
    InconsistentEdge { given: String, actual: String },
    #[error("alpha must be non-negative, got {0}")]
    NegativeAlpha(f64),
    #[error("invalid selection rule: {0}")]
    InvalidRule(String),
    #[error("iteration count must be at least 1")]
    ZeroIterations,
    #[error("trace is empty")]
    EmptyTrace,
    #[error(transparent)]
    Parse(#[from] ParseScalarError),
}

/// How a hypothesis is picked from the pool at each iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum SelectionRule<S> {
    /// Maximum edge, lowest row index among ties.
    Optimal,
    /// Row with the smallest edge strictly above the threshold (lowest index
    /// among ties), falling back to [`SelectionRule::Optimal`] when none
    /// qualifies.
    FirstAbove(S),
    /// Replays the listed rows, wrapping around when the run outlasts the list.
    FixedSequence(Vec<usize>),
}

impl<S: Scalar> SelectionRule<S> {
    pub fn validate(&self, pool: &HypothesisPool) -> Result<(), EngineError> {
        match self {
            SelectionRule::Optimal => Ok(()),
            SelectionRule::FirstAbove(theta) => {
                if *theta > S::zero() && *theta < S::one() {
                    Ok(())
                } else {
                    Err(EngineError::InvalidRule(format!(
                        "threshold {} not in (0, 1)",
                        theta.to_text()
                    )))
                }
            }
            SelectionRule::FixedSequence(rows) => {
                if rows.is_empty() {
                    return Err(EngineError::InvalidRule("empty fixed sequence".into()));
                }
                match rows.iter().find(|&&r| r >= pool.len()) {
                    Some(r) => Err(EngineError::InvalidRule(format!(
                        "row {r} out of bounds for a pool of {}",
                        pool.len()
                    ))),
                    None => Ok(()),
                }
            }
        }
    }

    /// Parses `optimal`, `first-above:THETA` or `fixed:I,J,K`.
    pub fn parse(text: &str) -> Result<Self, EngineError> {
        let text = text.trim();
        if text == "optimal" {
            return Ok(SelectionRule::Optimal);
        }
        if let Some(theta) = text.strip_prefix("first-above:") {
            return Ok(SelectionRule::FirstAbove(S::parse_text(theta)?));
        }
        if let Some(list) = text.strip_prefix("fixed:") {
            let rows = list
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EngineError::InvalidRule(format!("`{list}`: {e}")))?;
            return Ok(SelectionRule::FixedSequence(rows));
        }
        Err(EngineError::InvalidRule(format!(
            "`{text}` (expected optimal, first-above:THETA or fixed:I,J,...)"
        )))
    }
}

impl<S: Scalar> fmt::Display for SelectionRule<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionRule::Optimal => f.write_str("optimal"),
            SelectionRule::FirstAbove(theta) => write!(f, "first-above:{}", theta.to_text()),
            SelectionRule::FixedSequence(rows) => {
                f.write_str("fixed:")?;
                for (i, r) in rows.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{r}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection<S> {
    pub row: usize,
    pub eta: MistakeDichotomy,
    pub edge: S,
}

/// Picks the dichotomy for iteration `iteration` under `rule`.
pub fn select<S: Scalar>(
    w: &WeightVector<S>,
    pool: &HypothesisPool,
    rule: &SelectionRule<S>,
    iteration: usize,
) -> Result<Selection<S>, EngineError> {
    if pool.is_empty() {
        return Err(SimplexError::EmptyPool.into());
    }
    rule.validate(pool)?;
    let pick = |row: usize, edge: S| Selection {
        row,
        eta: pool.rows()[row].clone(),
        edge,
    };
    match rule {
        SelectionRule::FixedSequence(rows) => {
            let row = rows[iteration % rows.len()];
            let edge = edge_dot(w, &pool.rows()[row])?;
            if edge <= S::zero() {
                return Err(EngineError::WeakLearningFailure {
                    best_edge: edge.to_text(),
                });
            }
            Ok(pick(row, edge))
        }
        SelectionRule::FirstAbove(theta) => {
            let edges = pool
                .rows()
                .iter()
                .map(|eta| edge_dot(w, eta))
                .collect::<Result<Vec<S>, _>>()?;
            // The smallest edge above the threshold, lowest index among ties.
            let mut best: Option<usize> = None;
            for (row, e) in edges.iter().enumerate() {
                if e > theta && best.is_none_or(|b| *e < edges[b]) {
                    best = Some(row);
                }
            }
            if let Some(row) = best {
                let edge = edges[row].clone();
                return Ok(pick(row, edge));
            }
            optimal_from_edges(edges).map(|(row, edge)| pick(row, edge))
        }
        SelectionRule::Optimal => {
            let edges = pool
                .rows()
                .iter()
                .map(|eta| edge_dot(w, eta))
                .collect::<Result<Vec<S>, _>>()?;
            optimal_from_edges(edges).map(|(row, edge)| pick(row, edge))
        }
    }
}

fn optimal_from_edges<S: Scalar>(edges: Vec<S>) -> Result<(usize, S), EngineError> {
    let mut best: Option<(usize, S)> = None;
    for (row, edge) in edges.into_iter().enumerate() {
        match &best {
            Some((_, b)) if edge <= *b => {}
            _ => best = Some((row, edge)),
        }
    }
    let (row, edge) = best.expect("pool is nonempty");
    if edge <= S::zero() {
        return Err(EngineError::WeakLearningFailure {
            best_edge: edge.to_text(),
        });
    }
    Ok((row, edge))
}

fn check_edge_range<S: Scalar>(r: &S) -> Result<(), EngineError> {
    if *r >= S::one() {
        return Err(EngineError::PerfectClassification);
    }
    if *r <= S::zero() {
        return Err(EngineError::InvalidEdge { edge: r.to_text() });
    }
    Ok(())
}

/// Rational form of the AdaBoost weight update.
///
/// Correct points are scaled by `1/(1+r)`, mistakes by `1/(1-r)`. When
/// `r = w . eta` the result sums to 1 exactly; float results are renormalized
/// to absorb rounding. `r` must lie in `(0, 1)` and equal `w . eta`.
pub fn weight_update<S: Scalar>(
    w: &WeightVector<S>,
    eta: &MistakeDichotomy,
    r: &S,
) -> Result<WeightVector<S>, EngineError> {
    check_edge_range(r)?;
    let actual = edge_dot(w, eta)?;
    if !actual.approx_eq(r, EDGE_CONSISTENCY_TOLERANCE) {
        return Err(EngineError::InconsistentEdge {
            given: r.to_text(),
            actual: actual.to_text(),
        });
    }
    let up = S::one() + r.clone();
    let down = S::one() - r.clone();
    let mut next: Vec<S> = w
        .components()
        .iter()
        .zip(eta.entries())
        .map(|(wi, &e)| {
            if e > 0 {
                wi.clone() / up.clone()
            } else {
                wi.clone() / down.clone()
            }
        })
        .collect();
    if !S::is_exact() {
        let total = next.iter().cloned().fold(S::zero(), |a, b| a + b);
        for wi in &mut next {
            *wi = wi.clone() / total.clone();
        }
    }
    Ok(WeightVector::from_components_unchecked(next))
}

/// Exponential form `w_i e^{-eta_i alpha} / Z`, kept as an independent check
/// on [`weight_update`].
pub fn exponential_update(
    w: &WeightVector<f64>,
    eta: &MistakeDichotomy,
    alpha: f64,
) -> Result<WeightVector<f64>, EngineError> {
    if w.len() != eta.len() {
        return Err(SimplexError::DimensionMismatch {
            expected: w.len(),
            found: eta.len(),
        }
        .into());
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(EngineError::NegativeAlpha(alpha));
    }
    // Multiplying every factor by e^{-alpha} leaves the normalized result
    // unchanged and keeps the largest factor at 1.
    let correct = (-2.0 * alpha).exp();
    let scaled: Vec<f64> = w
        .components()
        .iter()
        .zip(eta.entries())
        .map(|(wi, &e)| if e > 0 { wi * correct } else { *wi })
        .collect();
    let z: f64 = scaled.iter().sum();
    Ok(WeightVector::from_components_unchecked(
        scaled.into_iter().map(|x| x / z).collect(),
    ))
}

/// Hypothesis coefficient `alpha = (1/2) ln((1+r)/(1-r))`.
pub fn alpha<S: Scalar>(r: &S) -> Result<f64, EngineError> {
    if *r <= S::zero() || *r >= S::one() {
        return Err(EngineError::InvalidEdge { edge: r.to_text() });
    }
    Ok(r.to_f64().atanh())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostStep<S> {
    pub iteration: usize,
    pub row: usize,
    pub eta: MistakeDichotomy,
    pub edge: S,
    pub alpha: f64,
    pub weights_after: WeightVector<S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaltReason {
    WeakLearningFailure,
    PerfectClassification,
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HaltReason::WeakLearningFailure => f.write_str("weak-learning failure"),
            HaltReason::PerfectClassification => f.write_str("perfect classification"),
        }
    }
}

/// Why and where a run stopped before its iteration budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halt {
    pub iteration: usize,
    pub reason: HaltReason,
    pub detail: String,
}

/// Complete record of a run: weights, dichotomies, edges and alphas per step.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostTrace<S> {
    pool: Arc<HypothesisPool>,
    rule: SelectionRule<S>,
    initial: WeightVector<S>,
    steps: Vec<BoostStep<S>>,
    halt: Option<Halt>,
}

impl<S: Scalar> BoostTrace<S> {
    /// Assembles a trace from parts, checking that every step's weights follow
    /// from the previous ones by [`weight_update`].
    pub fn from_parts(
        pool: Arc<HypothesisPool>,
        rule: SelectionRule<S>,
        initial: WeightVector<S>,
        steps: Vec<BoostStep<S>>,
        halt: Option<Halt>,
    ) -> Result<Self, EngineError> {
        let first = steps.first().map(|s| s.iteration).unwrap_or(0);
        let mut w = initial.clone();
        for (k, step) in steps.iter().enumerate() {
            if step.iteration != first + k {
                return Err(EngineError::InvalidRule(format!(
                    "step {k} has iteration {}, expected {}",
                    step.iteration,
                    first + k
                )));
            }
            if pool.row(step.row) != Some(&step.eta) {
                return Err(EngineError::InvalidRule(format!(
                    "step {} uses row {} which does not match the pool",
                    step.iteration, step.row
                )));
            }
            let expected = weight_update(&w, &step.eta, &step.edge)?;
            if !expected.approx_eq(&step.weights_after, EDGE_CONSISTENCY_TOLERANCE) {
                return Err(EngineError::InconsistentEdge {
                    given: format!("weights after step {}", step.iteration),
                    actual: "weight update of the previous weights".into(),
                });
            }
            w = step.weights_after.clone();
        }
        Ok(BoostTrace {
            pool,
            rule,
            initial,
            steps,
            halt,
        })
    }

    pub fn pool(&self) -> &HypothesisPool {
        &self.pool
    }

    pub fn shared_pool(&self) -> Arc<HypothesisPool> {
        Arc::clone(&self.pool)
    }

    pub fn rule(&self) -> &SelectionRule<S> {
        &self.rule
    }

    pub fn mode(&self) -> Mode {
        S::MODE
    }

    pub fn initial(&self) -> &WeightVector<S> {
        &self.initial
    }

    pub fn steps(&self) -> &[BoostStep<S>] {
        &self.steps
    }

    pub fn halt(&self) -> Option<&Halt> {
        self.halt.as_ref()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Iteration number of the first recorded step.
    pub fn first_iteration(&self) -> usize {
        self.steps.first().map(|s| s.iteration).unwrap_or(0)
    }

    /// Weights in force when step `k` (position in the trace) was taken.
    pub fn weights_at(&self, k: usize) -> &WeightVector<S> {
        if k == 0 {
            &self.initial
        } else {
            &self.steps[k - 1].weights_after
        }
    }

    pub fn edges(&self) -> Vec<S> {
        self.steps.iter().map(|s| s.edge.clone()).collect()
    }

    pub fn edges_f64(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.edge.to_f64()).collect()
    }

    /// Lattice of the dichotomies chosen at positions `range`.
    pub fn lattice(&self, range: Range<usize>) -> MistakeLattice {
        let first = self
            .steps
            .get(range.start)
            .map(|s| s.iteration)
            .unwrap_or(0);
        let columns = self.steps[range].iter().map(|s| s.eta.clone()).collect();
        MistakeLattice::new(first, columns).expect("trace dichotomies share one length")
    }

    /// Sub-trace of the steps at positions `range`, starting from the weights
    /// in force at `range.start`.
    pub fn window(&self, range: Range<usize>) -> BoostTrace<S> {
        BoostTrace {
            pool: Arc::clone(&self.pool),
            rule: self.rule.clone(),
            initial: self.weights_at(range.start).clone(),
            steps: self.steps[range].to_vec(),
            halt: None,
        }
    }
}

/// Builds one step from weights `w` and a selection.
pub fn take_step<S: Scalar>(
    iteration: usize,
    w: &WeightVector<S>,
    selection: Selection<S>,
) -> Result<BoostStep<S>, EngineError> {
    let weights_after = weight_update(w, &selection.eta, &selection.edge)?;
    Ok(BoostStep {
        iteration,
        row: selection.row,
        alpha: alpha(&selection.edge)?,
        eta: selection.eta,
        edge: selection.edge,
        weights_after,
    })
}

/// Runs Optimal AdaBoost (or the given rule) for `t_max` iterations from the uniform vector.
pub fn run<S: Scalar>(
    pool: Arc<HypothesisPool>,
    rule: SelectionRule<S>,
    t_max: usize,
) -> Result<BoostTrace<S>, EngineError> {
    let initial = WeightVector::uniform(pool.n_points())?;
    run_from(pool, rule, initial, 0, t_max)
}

/// Runs from arbitrary starting weights, numbering the first step `first_iteration`.
///
/// Weak-learning failure and perfect classification stop the run early and are
/// recorded in [`BoostTrace::halt`].
pub fn run_from<S: Scalar>(
    pool: Arc<HypothesisPool>,
    rule: SelectionRule<S>,
    initial: WeightVector<S>,
    first_iteration: usize,
    t_max: usize,
) -> Result<BoostTrace<S>, EngineError> {
    if t_max == 0 {
        return Err(EngineError::ZeroIterations);
    }
    if pool.n_points() != initial.len() {
        return Err(SimplexError::DimensionMismatch {
            expected: pool.n_points(),
            found: initial.len(),
        }
        .into());
    }
    rule.validate(&pool)?;
    let mut steps = Vec::with_capacity(t_max);
    let mut w = initial.clone();
    let mut halt = None;
    for t in first_iteration..first_iteration + t_max {
        let outcome = select(&w, &pool, &rule, t).and_then(|sel| take_step(t, &w, sel));
        match outcome {
            Ok(step) => {
                w = step.weights_after.clone();
                steps.push(step);
            }
            Err(e) => {
                let reason = match e {
                    EngineError::WeakLearningFailure { .. } => HaltReason::WeakLearningFailure,
                    EngineError::PerfectClassification => HaltReason::PerfectClassification,
                    other => return Err(other),
                };
                halt = Some(Halt {
                    iteration: t,
                    reason,
                    detail: e.to_string(),
                });
                break;
            }
        }
    }
    Ok(BoostTrace {
        pool,
        rule,
        initial,
        steps,
        halt,
    })
}

/// Labels of the combined classifier `sign(sum_t alpha_t h_t(x_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrongClassification {
    pub labels: Vec<i8>,
    /// Points whose score is exactly zero; their label is reported as +1.
    pub ties: Vec<bool>,
    pub scores: Vec<f64>,
}

/// Evaluates the combined classifier. `predictions[row][i]` is the output of
/// pool hypothesis `row` on point `i`.
pub fn strong_classify<S: Scalar>(
    trace: &BoostTrace<S>,
    predictions: &[Vec<i8>],
) -> Result<StrongClassification, EngineError> {
    let first = trace.steps.first().ok_or(EngineError::EmptyTrace)?;
    let n = predictions
        .get(first.row)
        .map(Vec::len)
        .ok_or(SimplexError::IndexOutOfBounds {
            index: first.row,
            len: predictions.len(),
        })?;
    let mut scores = vec![0.0f64; n];
    for step in &trace.steps {
        let h = predictions
            .get(step.row)
            .ok_or(SimplexError::IndexOutOfBounds {
                index: step.row,
                len: predictions.len(),
            })?;
        if h.len() != n {
            return Err(SimplexError::DimensionMismatch {
                expected: n,
                found: h.len(),
            }
            .into());
        }
        for (score, &hi) in scores.iter_mut().zip(h) {
            *score += step.alpha * f64::from(hi);
        }
    }
    let ties: Vec<bool> = scores.iter().map(|&s| s == 0.0).collect();
    let labels = scores
        .iter()
        .map(|&s| if s < 0.0 { -1 } else { 1 })
        .collect();
    Ok(StrongClassification {
        labels,
        ties,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::simplex::PoolOrigin;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn eta(s: &str) -> MistakeDichotomy {
        MistakeDichotomy::from_signs(s).unwrap()
    }

    fn e3() -> Arc<HypothesisPool> {
        Arc::new(HypothesisPool::parse("-++\n+-+\n++-\n").unwrap())
    }

    fn wq(parts: &[(i64, i64)]) -> WeightVector<Rational> {
        WeightVector::new(parts.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    #[test]
    fn select_examples() {
        let pool = e3();
        let uniform = WeightVector::<Rational>::uniform(3).unwrap();
        let s = select(&uniform, &pool, &SelectionRule::Optimal, 0).unwrap();
        assert_eq!((s.row, s.edge), (0, q(1, 3)));

        let w = wq(&[(1, 2), (1, 4), (1, 4)]);
        let s = select(&w, &pool, &SelectionRule::Optimal, 0).unwrap();
        assert_eq!((s.row, s.edge), (1, q(1, 2)));
        let s = select(&w, &pool, &SelectionRule::FirstAbove(q(2, 5)), 0).unwrap();
        assert_eq!((s.row, s.edge), (1, q(1, 2)));
    }

    #[test]
    fn first_above_falls_back_to_optimal() {
        let pool = e3();
        let uniform = WeightVector::<Rational>::uniform(3).unwrap();
        let s = select(&uniform, &pool, &SelectionRule::FirstAbove(q(9, 10)), 0).unwrap();
        assert_eq!((s.row, s.edge), (0, q(1, 3)));
    }

    #[test]
    fn select_reports_weak_learning_failure() {
        let pool = Arc::new(
            HypothesisPool::new(vec![eta("+--"), eta("-+-")], PoolOrigin::Synthetic).unwrap(),
        );
        let uniform = WeightVector::<Rational>::uniform(3).unwrap();
        assert!(matches!(
            select(&uniform, &pool, &SelectionRule::Optimal, 0),
            Err(EngineError::WeakLearningFailure { .. })
        ));
    }

    #[test]
    fn rule_validation_and_parsing() {
        let pool = e3();
        assert!(SelectionRule::FirstAbove(q(1, 1)).validate(&pool).is_err());
        assert!(SelectionRule::<Rational>::FixedSequence(vec![0, 3])
            .validate(&pool)
            .is_err());
        assert_eq!(
            SelectionRule::<Rational>::parse("first-above:0.4").unwrap(),
            SelectionRule::FirstAbove(q(2, 5))
        );
        assert_eq!(
            SelectionRule::<f64>::parse("fixed:0, 1,2").unwrap(),
            SelectionRule::FixedSequence(vec![0, 1, 2])
        );
        assert!(SelectionRule::<f64>::parse("best").is_err());
        let rule = SelectionRule::FirstAbove(q(2, 5));
        assert_eq!(rule.to_string(), "first-above:2/5");
        assert_eq!(
            SelectionRule::<Rational>::parse(&rule.to_string()).unwrap(),
            rule
        );
    }

    #[test]
    fn weight_update_examples() {
        let uniform = WeightVector::<Rational>::uniform(3).unwrap();
        let next = weight_update(&uniform, &eta("-++"), &q(1, 3)).unwrap();
        assert_eq!(next, wq(&[(1, 2), (1, 4), (1, 4)]));
        let next = weight_update(&next, &eta("+-+"), &q(1, 2)).unwrap();
        assert_eq!(next, wq(&[(1, 3), (1, 2), (1, 6)]));
    }

    #[test]
    fn weight_update_errors() {
        let uniform = WeightVector::<Rational>::uniform(3).unwrap();
        assert_eq!(
            weight_update(&uniform, &eta("+++"), &q(1, 1)),
            Err(EngineError::PerfectClassification)
        );
        assert!(matches!(
            weight_update(&uniform, &eta("--+"), &q(-1, 3)),
            Err(EngineError::InvalidEdge { .. })
        ));
        assert!(matches!(
            weight_update(&uniform, &eta("-++"), &q(1, 2)),
            Err(EngineError::InconsistentEdge { .. })
        ));
    }

    #[test]
    fn exponential_update_examples() {
        let uniform = WeightVector::<f64>::uniform(3).unwrap();
        let out = exponential_update(&uniform, &eta("-++"), 0.5 * 2f64.ln()).unwrap();
        for (a, b) in out.components().iter().zip([0.5, 0.25, 0.25]) {
            assert!((a - b).abs() < 1e-14);
        }
        let same = exponential_update(&uniform, &eta("-++"), 0.0).unwrap();
        assert_eq!(same.components(), uniform.components());

        let five = WeightVector::<f64>::uniform(5).unwrap();
        let out = exponential_update(&five, &eta("-+-+-"), 0.8).unwrap();
        let c = out.components();
        assert_eq!(c[0], c[2]);
        assert_eq!(c[2], c[4]);
        assert!(exponential_update(&five, &eta("-+-+-"), -0.1).is_err());
    }

    #[test]
    fn alpha_examples() {
        assert!((alpha(&q(1, 3)).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((alpha(&q(3, 5)).unwrap() - 2f64.ln()).abs() < 1e-15);
        let tiny = alpha(&1e-12f64).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-11);
        assert!(alpha(&0.0f64).is_err());
        assert!(alpha(&1.0f64).is_err());
    }

    #[test]
    fn exact_run_follows_fibonacci_ratios() {
        let trace = run::<Rational>(e3(), SelectionRule::Optimal, 6).unwrap();
        let expected = [q(1, 3), q(1, 2), q(2, 3), q(3, 5), q(5, 8), q(8, 13)];
        assert_eq!(trace.edges(), expected);
        let rows: Vec<usize> = trace.steps().iter().map(|s| s.row).collect();
        assert_eq!(rows, vec![0, 1, 2, 0, 1, 2]);
        assert_eq!(trace.weights_at(3), &wq(&[(1, 5), (3, 10), (1, 2)]));
        assert!(trace.halt().is_none());
    }

    #[test]
    fn run_rejects_zero_iterations() {
        assert_eq!(
            run::<f64>(e3(), SelectionRule::Optimal, 0).unwrap_err(),
            EngineError::ZeroIterations
        );
    }

    #[test]
    fn run_records_perfect_classification_halt() {
        let pool = Arc::new(
            HypothesisPool::new(vec![eta("-++"), eta("+++")], PoolOrigin::Synthetic).unwrap(),
        );
        let trace = run::<Rational>(pool, SelectionRule::Optimal, 10).unwrap();
        assert!(trace.is_empty());
        let halt = trace.halt().unwrap();
        assert_eq!(halt.reason, HaltReason::PerfectClassification);
        assert_eq!(halt.iteration, 0);
    }

    #[test]
    fn run_records_weak_learning_halt() {
        let pool = Arc::new(HypothesisPool::new(vec![eta("+--")], PoolOrigin::Synthetic).unwrap());
        let trace = run::<f64>(pool, SelectionRule::Optimal, 10).unwrap();
        assert_eq!(
            trace.halt().unwrap().reason,
            HaltReason::WeakLearningFailure
        );
    }

    #[test]
    fn fixed_sequence_wraps() {
        let trace = run::<Rational>(e3(), SelectionRule::FixedSequence(vec![0, 1, 2]), 7).unwrap();
        let rows: Vec<usize> = trace.steps().iter().map(|s| s.row).collect();
        assert_eq!(rows, vec![0, 1, 2, 0, 1, 2, 0]);
    }

    #[test]
    fn window_and_from_parts_round_trip() {
        let trace = run::<Rational>(e3(), SelectionRule::Optimal, 8).unwrap();
        let win = trace.window(3..7);
        assert_eq!(win.first_iteration(), 3);
        assert_eq!(win.initial(), trace.weights_at(3));
        let rebuilt = BoostTrace::from_parts(
            win.shared_pool(),
            win.rule().clone(),
            win.initial().clone(),
            win.steps().to_vec(),
            None,
        )
        .unwrap();
        assert_eq!(rebuilt, win);

        let mut bad = trace.steps().to_vec();
        bad[2].weights_after = bad[1].weights_after.clone();
        assert!(BoostTrace::from_parts(
            trace.shared_pool(),
            SelectionRule::Optimal,
            trace.initial().clone(),
            bad,
            None
        )
        .is_err());
    }

    #[test]
    fn strong_classifier_single_step_and_ties() {
        let pool = e3();
        let predictions: Vec<Vec<i8>> = pool.rows().iter().map(|r| r.entries().to_vec()).collect();
        let one = run::<Rational>(pool.clone(), SelectionRule::Optimal, 1).unwrap();
        let out = strong_classify(&one, &predictions).unwrap();
        assert_eq!(out.labels, vec![-1, 1, 1]);
        assert!(out.ties.iter().all(|t| !t));

        // From (1/4, 3/8, 3/8) both steps have edge 1/2, so equal alphas cancel
        // on the two points where the hypotheses disagree.
        let tie_pool = Arc::new(
            HypothesisPool::new(vec![eta("-++"), eta("+-+")], PoolOrigin::Synthetic).unwrap(),
        );
        let w0 = wq(&[(1, 4), (3, 8), (3, 8)]);
        let trace = run_from::<Rational>(
            tie_pool.clone(),
            SelectionRule::FixedSequence(vec![0, 1]),
            w0,
            0,
            2,
        )
        .unwrap();
        assert_eq!(trace.edges(), vec![q(1, 2), q(1, 2)]);
        let preds: Vec<Vec<i8>> = tie_pool
            .rows()
            .iter()
            .map(|r| r.entries().to_vec())
            .collect();
        let out = strong_classify(&trace, &preds).unwrap();
        assert_eq!(out.ties, vec![true, true, false]);
        assert_eq!(out.labels, vec![1, 1, 1]);
    }
}
