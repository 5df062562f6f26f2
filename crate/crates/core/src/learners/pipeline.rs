//! Boosting driven by trees trained on the current weights.

use std::collections::HashMap;
use std::sync::Arc;

use super::tree::{signs_of, train_tree_sorted, SortedFeatures, TreeBounds, TreeHypothesis};
use super::{Dataset, LearnerError};
use crate::engine::{
    take_step, BoostTrace, EngineError, Halt, HaltReason, Selection, SelectionRule,
};
use crate::scalar::Scalar;
use crate::simplex::{edge_dot, HypothesisPool, MistakeDichotomy, PoolOrigin, WeightVector};

/// A dataset run: the trace plus one tree per row of its learned pool.
#[derive(Debug, Clone)]
pub struct DatasetRun<S> {
    pub trace: BoostTrace<S>,
    /// `trees[r]` is the first tree whose dichotomy became pool row `r`.
    pub trees: Vec<TreeHypothesis>,
}

/// Boosts with a fresh tree per iteration, starting from uniform weights.
///
/// The pool of the returned trace holds the distinct dichotomies met so far,
/// in order of first appearance, and its rule is the fixed sequence of rows
/// actually used. A tree with edge `<= 0` halts the run as a weak-learning
/// failure, one with edge 1 as perfect classification.
pub fn run_on_dataset<S: Scalar>(
    ds: &Dataset,
    bounds: TreeBounds,
    t_max: usize,
) -> Result<DatasetRun<S>, LearnerError> {
    if t_max == 0 {
        return Err(EngineError::ZeroIterations.into());
    }
    let sorted = SortedFeatures::new(ds);
    let initial: WeightVector<S> = WeightVector::uniform(ds.len())?;
    let mut w = initial.clone();
    let mut index: HashMap<MistakeDichotomy, usize> = HashMap::new();
    let mut rows: Vec<MistakeDichotomy> = Vec::new();
    let mut trees = Vec::new();
    let mut steps = Vec::with_capacity(t_max);
    let mut sequence = Vec::with_capacity(t_max);
    let mut halt = None;
    for t in 0..t_max {
        let tree = train_tree_sorted(ds, &sorted, &w.to_f64_vec(), bounds)?;
        let signs = signs_of(&tree, ds);
        let eta = match MistakeDichotomy::new(signs) {
            Ok(eta) => eta,
            Err(_) => {
                halt = Some(Halt {
                    iteration: t,
                    reason: HaltReason::WeakLearningFailure,
                    detail: "the trained tree misclassifies every point".into(),
                });
                break;
            }
        };
        let edge = edge_dot(&w, &eta)?;
        if edge <= S::zero() || edge >= S::one() {
            let reason = if edge <= S::zero() {
                HaltReason::WeakLearningFailure
            } else {
                HaltReason::PerfectClassification
            };
            halt = Some(Halt {
                iteration: t,
                reason,
                detail: format!("edge {}", edge.to_text()),
            });
            break;
        }
        let row = *index.entry(eta.clone()).or_insert_with(|| {
            rows.push(eta.clone());
            trees.push(tree);
            rows.len() - 1
        });
        let step = take_step(t, &w, Selection { row, eta, edge })?;
        w = step.weights_after.clone();
        steps.push(step);
        sequence.push(row);
    }
    if rows.is_empty() {
        // Nothing was learned; keep the pool non-empty with the all-correct row.
        rows.push(MistakeDichotomy::new(vec![1; ds.len()])?);
        sequence.push(0);
    }
    let pool = Arc::new(HypothesisPool::new(rows, PoolOrigin::Learned)?);
    let trace = BoostTrace::from_parts(
        pool,
        SelectionRule::FixedSequence(sequence),
        initial,
        steps,
        halt,
    )?;
    Ok(DatasetRun { trace, trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::parse_csv;
    use crate::scalar::{Rational, Real};

    fn iris(positive: &str) -> Dataset {
        parse_csv(
            include_str!("../../data/iris.csv").as_bytes(),
            "iris",
            "species",
            positive,
        )
        .unwrap()
    }

    #[test]
    fn single_iteration() {
        let run = run_on_dataset::<f64>(&iris("versicolor"), TreeBounds::STUMP, 1).unwrap();
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.trace.pool().len(), 1);
        assert_eq!(run.trees.len(), 1);
        assert!(run.trace.steps()[0].edge > 0.0);
        assert_eq!(run.trace.pool().origin(), PoolOrigin::Learned);
    }

    #[test]
    fn separable_class_halts_on_perfect_tree() {
        let run = run_on_dataset::<f64>(&iris("setosa"), TreeBounds::STUMP, 10).unwrap();
        assert!(run.trace.is_empty());
        assert_eq!(
            run.trace.halt().unwrap().reason,
            HaltReason::PerfectClassification
        );
    }

    #[test]
    fn trees_reproduce_pool_rows() {
        let ds = iris("virginica");
        let run = run_on_dataset::<f64>(&ds, TreeBounds::new(2, 3).unwrap(), 60).unwrap();
        assert_eq!(run.trace.len(), 60);
        for (tree, row) in run.trees.iter().zip(run.trace.pool().rows()) {
            assert_eq!(signs_of(tree, &ds), row.entries());
        }
    }

    #[test]
    fn exact_and_float_agree_early() {
        let ds = iris("versicolor").sample(40, 3).unwrap();
        let a = run_on_dataset::<f64>(&ds, TreeBounds::STUMP, 12).unwrap();
        let b = run_on_dataset::<Rational>(&ds, TreeBounds::STUMP, 12).unwrap();
        assert_eq!(a.trace.len(), b.trace.len());
        for (x, y) in a.trace.steps().iter().zip(b.trace.steps()) {
            assert_eq!(x.eta, y.eta);
            assert!((x.edge - y.edge.to_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn versicolor_settles_on_golden_cycle() {
        let run = run_on_dataset::<f64>(&iris("versicolor"), TreeBounds::new(3, 4).unwrap(), 2000)
            .unwrap();
        // The weights settle near iteration 1184, after the default burn-in of 1000.
        let config = crate::cycle::CycleConfig {
            burn_in: Some(1500),
            ..Default::default()
        };
        let rep = crate::cycle::detect_cycle(&run.trace, &config).unwrap();
        assert!(rep.nabla.holds());
        assert!((rep.mean_edge - 0.62).abs() <= 0.02, "{}", rep.mean_edge);
    }

    #[test]
    fn zero_iterations_rejected() {
        assert!(run_on_dataset::<f64>(&iris("virginica"), TreeBounds::STUMP, 0).is_err());
    }
}
