//! Limit-cycle detection on boosting traces.
//!
//! The state at trace position `k` is the weight vector in force at `k`
//! together with the edge chosen at `k`. A period `p` is accepted when every
//! state after the burn-in matches the state `p` positions later within
//! `tol`, and the tail spans at least `min_repeats` periods.

use std::collections::HashMap;

use serde::Serialize;

use super::decomposition::{contributions, partition};
use super::matching::match_farey;
use crate::engine::BoostTrace;
use crate::farey::FareyWord;
use crate::scalar::Scalar;
use crate::simplex::{check_nabla, NablaStatus};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MIN_REPEATS: usize = 3;
/// Grid used to hash states when looking for a candidate period.
pub const QUANTUM: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleConfig {
    pub tol: f64,
    pub min_repeats: usize,
    /// Positions skipped before looking for a cycle; half the trace when unset.
    pub burn_in: Option<usize>,
}

impl Default for CycleConfig {
    fn default() -> Self {
        CycleConfig {
            tol: DEFAULT_TOLERANCE,
            min_repeats: DEFAULT_MIN_REPEATS,
            burn_in: None,
        }
    }
}

impl CycleConfig {
    pub fn with_tol(tol: f64) -> Self {
        CycleConfig {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    /// Period of the full state (weights and edge).
    pub period: usize,
    /// Period of the edge sequence alone; divides `period`.
    pub edge_period: usize,
    /// First iteration from which the cycle holds.
    pub phase: usize,
    /// Edge values over one edge period, starting at a position congruent to `phase`.
    pub edge_values: Vec<f64>,
    /// Weight vectors over one full period, aligned like `edge_values`.
    pub weight_cycle: Vec<Vec<f64>>,
    /// Rows of the dichotomies chosen over one full period.
    pub rows: Vec<usize>,
    /// Periodic learning condition on the cycling window.
    pub nabla: NablaStatus,
    pub farey_word: Option<FareyWord>,
    /// Largest state deviation across one period over the cycling window.
    pub residual: f64,
    /// Edge values are pairwise distinct within one edge period.
    pub edges_distinct: bool,
    /// Every contribution share in one period has a rational reconstruction.
    /// `None` when the periodic learning condition fails on the window.
    pub beta_rational: Option<bool>,
    pub mean_edge: f64,
    pub tol: f64,
    /// Trace positions `[start, end)` of the cycling window.
    pub window: (usize, usize),
}

struct States {
    edges: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

impl States {
    fn of<S: Scalar>(trace: &BoostTrace<S>) -> Self {
        States {
            edges: trace.edges_f64(),
            weights: (0..trace.len())
                .map(|k| trace.weights_at(k).to_f64_vec())
                .collect(),
        }
    }

    fn deviation(&self, a: usize, b: usize) -> f64 {
        let edge = (self.edges[a] - self.edges[b]).abs();
        self.weights[a]
            .iter()
            .zip(&self.weights[b])
            .map(|(x, y)| (x - y).abs())
            .fold(edge, f64::max)
    }

    fn len(&self) -> usize {
        self.edges.len()
    }

    /// Whether `s_t ~ s_{t+p}` for every `t` in `[from, len - p)`.
    fn periodic_from(&self, p: usize, from: usize, tol: f64) -> bool {
        (from..self.len() - p)
            .rev()
            .all(|t| self.deviation(t, t + p) <= tol)
    }

    fn edges_periodic_from(&self, p: usize, from: usize, tol: f64) -> bool {
        (from..self.len() - p)
            .rev()
            .all(|t| (self.edges[t] - self.edges[t + p]).abs() <= tol)
    }

    fn key(&self, t: usize) -> Vec<i64> {
        std::iter::once(self.edges[t])
            .chain(self.weights[t].iter().copied())
            .map(|x| (x / QUANTUM).round() as i64)
            .collect()
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Divides out prime factors while the shorter period still verifies.
fn reduce_period(states: &States, mut p: usize, from: usize, tol: f64) -> usize {
    loop {
        let smaller = prime_factors(p)
            .into_iter()
            .map(|f| p / f)
            .find(|&q| states.periodic_from(q, from, tol));
        match smaller {
            Some(q) => p = q,
            None => return p,
        }
    }
}

fn find_period(states: &States, from: usize, max_p: usize, tol: f64) -> Option<usize> {
    // Fast path: the most recent earlier state in the same quantization cell.
    let n = states.len();
    let last = states.key(n - 1);
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    for t in (n - 1 - max_p.min(n - 1))..n - 1 {
        index.insert(states.key(t), t);
    }
    if let Some(&t) = index.get(&last) {
        let p = n - 1 - t;
        if p >= 1 && p <= max_p && states.periodic_from(p, from, tol) {
            return Some(reduce_period(states, p, from, tol));
        }
    }
    (1..=max_p).find(|&p| states.periodic_from(p, from, tol))
}

/// Smallest state period on the tail of `trace`, or `None` when the trace is
/// shorter than `3 * min_repeats` or no period up to `tail / min_repeats`
/// holds.
pub fn detect_cycle<S: Scalar>(trace: &BoostTrace<S>, config: &CycleConfig) -> Option<CycleReport> {
    let n = trace.len();
    let repeats = config.min_repeats.max(1);
    if n < 3 * repeats {
        return None;
    }
    let burn_in = config.burn_in.unwrap_or(n / 2).min(n - 1);
    let max_p = (n - burn_in) / repeats;
    if max_p == 0 {
        return None;
    }
    let states = States::of(trace);
    let tol = config.tol;
    let period = find_period(&states, burn_in, max_p, tol)?;

    // Earliest position from which the period holds.
    let mut phase_pos = n - period;
    while phase_pos > 0 && states.deviation(phase_pos - 1, phase_pos - 1 + period) <= tol {
        phase_pos -= 1;
    }

    // Measured after the burn-in: near the phase a shorter edge period can
    // still be settling while the full state already repeats within tol.
    let edge_from = phase_pos.max(burn_in);
    let edge_period = (1..=period)
        .filter(|q| period % q == 0)
        .find(|&q| states.edges_periodic_from(q, edge_from, tol))
        .unwrap_or(period);

    // Last full period, starting at a position congruent to the phase.
    let start = n - period - ((n - period - phase_pos) % period);
    let edge_values: Vec<f64> = states.edges[start..start + edge_period].to_vec();
    let weight_cycle = states.weights[start..start + period].to_vec();
    let rows = trace.steps()[start..start + period]
        .iter()
        .map(|s| s.row)
        .collect();
    let residual = (phase_pos..n - period)
        .map(|t| states.deviation(t, t + period))
        .fold(0.0, f64::max);
    let edges_distinct = edge_values
        .iter()
        .enumerate()
        .all(|(i, a)| edge_values[..i].iter().all(|b| (a - b).abs() > tol));
    let nabla = if n - phase_pos >= 2 {
        check_nabla(&trace.lattice(phase_pos..n)).unwrap_or(NablaStatus::Holds)
    } else {
        NablaStatus::Holds
    };
    let beta_rational = if nabla.holds() {
        beta_rational_over_period(trace, start, period)
    } else {
        None
    };
    let farey_word = match_farey(&edge_values, tol);
    let mean_edge = states.edges[phase_pos..].iter().sum::<f64>() / (n - phase_pos) as f64;
    let first = trace.first_iteration();
    Some(CycleReport {
        period,
        edge_period,
        phase: first + phase_pos,
        edge_values,
        weight_cycle,
        rows,
        nabla,
        farey_word,
        residual,
        edges_distinct,
        beta_rational,
        mean_edge,
        tol,
        window: (phase_pos, n),
    })
}

fn beta_rational_over_period<S: Scalar>(
    trace: &BoostTrace<S>,
    start: usize,
    period: usize,
) -> Option<bool> {
    let steps = trace.steps();
    let mut all = true;
    for k in start.max(1)..(start + period).min(steps.len()) {
        let part = partition(&steps[k - 1].eta, &steps[k].eta).ok()?;
        let c = contributions(trace.weights_at(k - 1), &steps[k - 1].edge, &part).ok()?;
        all &= c.all_rational();
    }
    Some(all)
}

/// Permutation `perm` minimizing `max_i |a[i] - b[perm[i]]|`, returned when
/// that maximum is within `tol`. Sorting both sides gives the optimal pairing.
pub fn align_permutation(a: &[f64], b: &[f64], tol: f64) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let mut ia: Vec<usize> = (0..a.len()).collect();
    let mut ib: Vec<usize> = (0..b.len()).collect();
    ia.sort_by(|&i, &j| a[i].total_cmp(&a[j]));
    ib.sort_by(|&i, &j| b[i].total_cmp(&b[j]));
    let mut perm = vec![0; a.len()];
    for (&i, &j) in ia.iter().zip(&ib) {
        if (a[i] - b[j]).abs() > tol {
            return None;
        }
        perm[i] = j;
    }
    Some(perm)
}

/// Whether `w` is within `tol` of a cyclic rotation of `target`.
pub fn is_cyclic_rotation(w: &[f64], target: &[f64], tol: f64) -> bool {
    let n = target.len();
    w.len() == n && (0..n).any(|s| (0..n).all(|i| (w[i] - target[(i + s) % n]).abs() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, SelectionRule};
    use crate::scalar::Rational;
    use crate::simplex::HypothesisPool;
    use std::sync::Arc;

    fn golden_pool() -> Arc<HypothesisPool> {
        Arc::new(HypothesisPool::parse("-++\n+-+\n++-\n").unwrap())
    }

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    #[test]
    fn golden_cycle() {
        let trace = run::<f64>(golden_pool(), SelectionRule::Optimal, 200).unwrap();
        let report = detect_cycle(&trace, &CycleConfig::default()).unwrap();
        assert_eq!(report.period, 3);
        assert_eq!(report.edge_period, 1);
        assert!((report.edge_values[0] - GOLDEN).abs() < 1e-9);
        assert!(report.nabla.holds());
        assert_eq!(report.farey_word.as_ref().unwrap().to_string(), "R");
        assert!(report.residual <= 1e-9);
        assert_eq!(report.beta_rational, Some(true));
        let target = [0.5, GOLDEN / 2.0, (1.0 - GOLDEN) / 2.0];
        for (i, w) in report.weight_cycle.iter().enumerate() {
            assert!(align_permutation(w, &target, 1e-9).is_some());
            let next = &report.weight_cycle[(i + 1) % 3];
            assert!(is_cyclic_rotation(next, w, 1e-9));
        }
    }

    #[test]
    fn two_cycle_under_first_above() {
        let rule = SelectionRule::FirstAbove(0.4);
        let trace = run::<f64>(golden_pool(), rule, 300).unwrap();
        let report = detect_cycle(&trace, &CycleConfig::default()).unwrap();
        assert_eq!(report.edge_period, 2);
        let mut v = report.edge_values.clone();
        v.sort_by(f64::total_cmp);
        assert!((v[0] - (2f64.sqrt() - 1.0)).abs() < 1e-9);
        assert!((v[1] - 0.5f64.sqrt()).abs() < 1e-9);
        let word = report.farey_word.unwrap();
        assert!(word.is_rotation_of(&FareyWord::parse("RL").unwrap()));
    }

    #[test]
    fn converging_trace_has_no_cycle_yet() {
        let trace = run::<f64>(golden_pool(), SelectionRule::Optimal, 12).unwrap();
        let config = CycleConfig {
            tol: 1e-15,
            ..CycleConfig::default()
        };
        assert!(detect_cycle(&trace, &config).is_none());
        let short = run::<f64>(golden_pool(), SelectionRule::Optimal, 5).unwrap();
        assert!(detect_cycle(&short, &CycleConfig::default()).is_none());
    }

    #[test]
    fn detection_is_idempotent_on_the_window() {
        let trace = run::<f64>(golden_pool(), SelectionRule::Optimal, 240).unwrap();
        let report = detect_cycle(&trace, &CycleConfig::default()).unwrap();
        let window = trace.window(report.window.0..report.window.1);
        let again = detect_cycle(&window, &CycleConfig::default()).unwrap();
        assert_eq!(again.period, report.period);
        assert_eq!(again.edge_period, report.edge_period);
        for (a, b) in again.edge_values.iter().zip(&report.edge_values) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn exact_trace_is_analyzed_in_float() {
        let trace = run::<Rational>(golden_pool(), SelectionRule::Optimal, 60).unwrap();
        let report = detect_cycle(&trace, &CycleConfig::default()).unwrap();
        assert_eq!((report.period, report.edge_period), (3, 1));
        assert!(report.phase <= 30);
    }

    #[test]
    fn helpers() {
        assert_eq!(prime_factors(12), vec![2, 3]);
        assert_eq!(prime_factors(1), Vec::<usize>::new());
        assert_eq!(
            align_permutation(&[0.3, 0.1], &[0.1, 0.3], 0.0),
            Some(vec![1, 0])
        );
        assert!(align_permutation(&[0.3, 0.1], &[0.1, 0.31], 1e-3).is_none());
        assert!(is_cyclic_rotation(&[2.0, 3.0, 1.0], &[1.0, 2.0, 3.0], 0.0));
        assert!(!is_cyclic_rotation(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0], 0.0));
    }
}
