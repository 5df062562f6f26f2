//! Matching edge cycles to Farey words, and comparing trace windows.

use std::ops::Range;

use serde::Serialize;

use super::CycleError;
use crate::engine::BoostTrace;
use crate::farey::{FareyWord, Letter};
use crate::scalar::Scalar;
use crate::simplex::check_nabla;

/// Classifies each cyclic step `v[i] -> v[i+1]` as `R` (`v[i+1] = 1/(1+v[i])`)
/// or `L` (`v[i+1] = v[i]/(1+v[i])`) within `tol`. Returns the word read
/// from `v[0]`, or `None` when some step fits neither branch.
pub fn match_farey(edge_values: &[f64], tol: f64) -> Option<FareyWord> {
    if edge_values.is_empty() {
        return None;
    }
    let k = edge_values.len();
    let mut letters = Vec::with_capacity(k);
    for i in 0..k {
        let (x, y) = (edge_values[i], edge_values[(i + 1) % k]);
        let dr = (y - Letter::R.apply(x)).abs();
        let dl = (y - Letter::L.apply(x)).abs();
        let letter = match (dr <= tol, dl <= tol) {
            (true, true) if dl < dr => Letter::L,
            (true, _) => Letter::R,
            (false, true) => Letter::L,
            (false, false) => return None,
        };
        letters.push(letter);
    }
    FareyWord::new(letters).ok()
}

/// Largest deviation between the cycle and the word replayed from its first value.
pub fn replay_deviation(word: &FareyWord, edge_values: &[f64]) -> f64 {
    let k = edge_values.len();
    let mut x = edge_values[0];
    let mut worst: f64 = 0.0;
    for (i, &letter) in word.letters().iter().enumerate() {
        x = letter.apply(x);
        worst = worst.max((x - edge_values[(i + 1) % k]).abs());
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    Weights,
    Dichotomy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Agreement {
    AgreeEverywhere,
    /// A counterexample: the traces agree at the anchor but not here.
    Disagreement {
        iteration: usize,
        component: Component,
        deviation: f64,
    },
}

fn position_of<S: Scalar>(trace: &BoostTrace<S>, iteration: usize) -> Option<usize> {
    let first = trace.first_iteration();
    (iteration >= first && iteration < first + trace.len()).then(|| iteration - first)
}

fn distinct_edges<S: Scalar>(trace: &BoostTrace<S>, range: Range<usize>, tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for s in &trace.steps()[range] {
        let e = s.edge.to_f64();
        if !out.iter().any(|v| (v - e).abs() <= tol) {
            out.push(e);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn compare_at<S: Scalar>(
    a: &BoostTrace<S>,
    pa: usize,
    b: &BoostTrace<S>,
    pb: usize,
    tol: f64,
) -> Option<(Component, f64)> {
    let dev = a.weights_at(pa).max_abs_diff(b.weights_at(pb));
    if dev > tol {
        return Some((Component::Weights, dev));
    }
    if a.steps()[pa].eta != b.steps()[pb].eta {
        return Some((Component::Dichotomy, 1.0));
    }
    None
}

/// Checks that two traces agreeing in weights and dichotomy at iteration `q`
/// agree at every iteration of `window`.
///
/// Both traces are indexed by iteration number. Preconditions (window inside
/// both traces, the periodic learning condition on both windows, identical
/// edge cycles, agreement at `q`) fail with an error; a disagreement found
/// after they hold is returned as [`Agreement::Disagreement`].
pub fn lattice_agreement<S: Scalar>(
    a: &BoostTrace<S>,
    b: &BoostTrace<S>,
    window: Range<usize>,
    q: usize,
    tol: f64,
) -> Result<Agreement, CycleError> {
    if window.is_empty() || !window.contains(&q) {
        return Err(CycleError::AnchorOutsideWindow {
            anchor: q,
            start: window.start,
            end: window.end,
        });
    }
    let span = |t: &BoostTrace<S>| -> Result<Range<usize>, CycleError> {
        match (position_of(t, window.start), position_of(t, window.end - 1)) {
            (Some(s), Some(e)) => Ok(s..e + 1),
            _ => Err(CycleError::WindowOutsideTrace {
                start: window.start,
                end: window.end,
            }),
        }
    };
    let ra = span(a)?;
    let rb = span(b)?;
    if ra.len() >= 2 {
        for (name, t, r) in [("first", a, &ra), ("second", b, &rb)] {
            let status = check_nabla(&t.lattice(r.clone()))?;
            if !status.holds() {
                return Err(CycleError::NablaViolated {
                    trace: name,
                    status,
                });
            }
        }
    }
    let ea = distinct_edges(a, ra.clone(), tol);
    let eb = distinct_edges(b, rb.clone(), tol);
    if ea.len() != eb.len() || ea.iter().zip(&eb).any(|(x, y)| (x - y).abs() > tol) {
        return Err(CycleError::EdgeCyclesDiffer);
    }
    let qa = q - window.start + ra.start;
    let qb = q - window.start + rb.start;
    if compare_at(a, qa, b, qb, tol).is_some() {
        return Err(CycleError::NoAnchorAgreement { iteration: q });
    }
    let offsets = (q + 1..window.end).chain((window.start..q).rev());
    for t in offsets {
        let (pa, pb) = (t - window.start + ra.start, t - window.start + rb.start);
        if let Some((component, deviation)) = compare_at(a, pa, b, pb, tol) {
            return Ok(Agreement::Disagreement {
                iteration: t,
                component,
                deviation,
            });
        }
    }
    Ok(Agreement::AgreeEverywhere)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::{detect_cycle, CycleConfig};
    use crate::engine::{run, run_from, SelectionRule};
    use crate::simplex::HypothesisPool;
    use std::sync::Arc;

    fn golden_pool() -> Arc<HypothesisPool> {
        Arc::new(HypothesisPool::parse("-++\n+-+\n++-\n").unwrap())
    }

    #[test]
    fn matches_known_cycles() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(match_farey(&[g], 1e-9).unwrap().to_string(), "R");
        let two = [2f64.sqrt() - 1.0, 0.5f64.sqrt()];
        let word = match_farey(&two, 1e-9).unwrap();
        assert_eq!(word.to_string(), "RL");
        assert!(replay_deviation(&word, &two) <= 2e-9);
        assert!(match_farey(&[0.3, 0.9], 1e-9).is_none());
        assert!(match_farey(&[], 1e-9).is_none());
    }

    #[test]
    fn phase_shifted_runs_agree() {
        let pool = golden_pool();
        let a = run::<f64>(Arc::clone(&pool), SelectionRule::Optimal, 200).unwrap();
        let report = detect_cycle(&a, &CycleConfig::default()).unwrap();
        let p = report.window.0;
        let k = report.period;
        // Restart from a later point of the same cycle, relabeled to iteration p.
        let start = a.weights_at(p + k).clone();
        let b = run_from(pool, SelectionRule::Optimal, start, p, 200 - p - k).unwrap();
        let out = lattice_agreement(&a, &b, p..200 - k, p + 5, 1e-9).unwrap();
        assert_eq!(out, Agreement::AgreeEverywhere);
        let itself = lattice_agreement(&a, &a, p..200, p + 7, 0.0).unwrap();
        assert_eq!(itself, Agreement::AgreeEverywhere);
    }

    #[test]
    fn preconditions_are_reported_separately() {
        let a = run::<f64>(golden_pool(), SelectionRule::Optimal, 200).unwrap();
        let b = run::<f64>(golden_pool(), SelectionRule::FirstAbove(0.4), 200).unwrap();
        assert!(matches!(
            lattice_agreement(&a, &b, 150..200, 160, 1e-9),
            Err(CycleError::EdgeCyclesDiffer)
        ));
        assert!(matches!(
            lattice_agreement(&a, &a, 150..250, 160, 1e-9),
            Err(CycleError::WindowOutsideTrace { .. })
        ));
        assert!(matches!(
            lattice_agreement(&a, &a, 150..200, 10, 1e-9),
            Err(CycleError::AnchorOutsideWindow { .. })
        ));
        // Same edge cycle but the window pairs different phases of it.
        let shifted = a.window(151..200);
        let err = lattice_agreement(&a, &a, 150..199, 160, 1e-9);
        assert!(err.is_ok());
        let relabeled = run_from(
            golden_pool(),
            SelectionRule::Optimal,
            shifted.initial().clone(),
            150,
            49,
        )
        .unwrap();
        assert!(matches!(
            lattice_agreement(&a, &relabeled, 150..199, 160, 1e-9),
            Err(CycleError::NoAnchorAgreement { iteration: 160 })
        ));
    }
}
