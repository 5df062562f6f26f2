//! Splitting an edge by current and previous correctness.
//!
//! With `w` the weights before step `t-1` and `r` the edge at `t-1`, the
//! weights at `t` are `w/(1+r)` on points the previous hypothesis got right
//! and `w/(1-r)` on points it got wrong. Grouping points by (previous,
//! current) correctness gives
//!
//! ```text
//! r_t = sum_{I+} w/(1+r) + sum_{I-} w/(1-r) - sum_{J+} w/(1+r) - sum_{J-} w/(1-r)
//! ```

use serde::Serialize;

use super::CycleError;
use crate::engine::BoostTrace;
use crate::scalar::{Rational, Scalar};
use crate::simplex::{edge_dot, MistakeDichotomy, WeightVector};

/// Denominator cap for rational reconstruction of float shares.
pub const BETA_MAX_DENOMINATOR: u64 = 1_000_000;
/// Error allowed in rational reconstruction of float shares.
pub const BETA_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct IndexPartition {
    /// Correct now and at the previous step.
    pub i_plus: Vec<usize>,
    /// Correct now, wrong at the previous step.
    pub i_minus: Vec<usize>,
    /// Wrong now, correct at the previous step.
    pub j_plus: Vec<usize>,
    /// Wrong at both steps.
    pub j_minus: Vec<usize>,
}

impl IndexPartition {
    pub fn nabla_holds(&self) -> bool {
        self.j_minus.is_empty()
    }

    pub fn len(&self) -> usize {
        self.i_plus.len() + self.i_minus.len() + self.j_plus.len() + self.j_minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the partition's "now" side matches `eta_cur`.
    pub fn is_consistent_with(&self, eta_cur: &MistakeDichotomy) -> bool {
        self.len() == eta_cur.len()
            && self
                .i_plus
                .iter()
                .chain(&self.i_minus)
                .all(|&i| eta_cur.is_correct(i))
            && self
                .j_plus
                .iter()
                .chain(&self.j_minus)
                .all(|&i| !eta_cur.is_correct(i))
    }
}

pub fn partition(
    eta_prev: &MistakeDichotomy,
    eta_cur: &MistakeDichotomy,
) -> Result<IndexPartition, CycleError> {
    if eta_prev.len() != eta_cur.len() {
        return Err(CycleError::LengthMismatch {
            expected: eta_prev.len(),
            found: eta_cur.len(),
        });
    }
    let mut part = IndexPartition::default();
    for i in 0..eta_cur.len() {
        match (eta_prev.is_correct(i), eta_cur.is_correct(i)) {
            (true, true) => part.i_plus.push(i),
            (false, true) => part.i_minus.push(i),
            (true, false) => part.j_plus.push(i),
            (false, false) => part.j_minus.push(i),
        }
    }
    Ok(part)
}

fn check_edge<S: Scalar>(r_prev: &S) -> Result<(), CycleError> {
    if *r_prev <= S::zero() || *r_prev >= S::one() {
        return Err(CycleError::EdgeOutOfRange(r_prev.to_text()));
    }
    Ok(())
}

fn check_len<S: Scalar>(w: &WeightVector<S>, part: &IndexPartition) -> Result<(), CycleError> {
    if w.len() != part.len() {
        return Err(CycleError::LengthMismatch {
            expected: w.len(),
            found: part.len(),
        });
    }
    Ok(())
}

fn mass<S: Scalar>(w: &WeightVector<S>, idx: &[usize]) -> S {
    idx.iter()
        .fold(S::zero(), |acc, &i| acc + w.components()[i].clone())
}

/// The four-term form of the edge at `t`.
pub fn four_term_edge<S: Scalar>(
    w_prev: &WeightVector<S>,
    r_prev: &S,
    part: &IndexPartition,
    eta_cur: &MistakeDichotomy,
) -> Result<S, CycleError> {
    check_edge(r_prev)?;
    check_len(w_prev, part)?;
    if !part.is_consistent_with(eta_cur) {
        return Err(CycleError::InconsistentPartition);
    }
    let up = S::one() + r_prev.clone();
    let down = S::one() - r_prev.clone();
    Ok(
        mass(w_prev, &part.i_plus) / up.clone() + mass(w_prev, &part.i_minus) / down.clone()
            - mass(w_prev, &part.j_plus) / up
            - mass(w_prev, &part.j_minus) / down,
    )
}

/// `(1 + r_prev - 2 sum_{J+} w_prev) / (1 + r_prev)`: the edge update that
/// holds exactly when no point is wrong at both steps.
pub fn three_weight_edge<S: Scalar>(
    w_prev: &WeightVector<S>,
    r_prev: &S,
    part: &IndexPartition,
) -> Result<S, CycleError> {
    check_edge(r_prev)?;
    check_len(w_prev, part)?;
    let j = mass(w_prev, &part.j_plus);
    let up = S::one() + r_prev.clone();
    Ok((up.clone() - (j.clone() + j)) / up)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeWeightRow {
    pub iteration: usize,
    pub nabla_holds: bool,
    pub edge: String,
    pub eq5_value: String,
    pub eq5_matches: bool,
}

impl ThreeWeightRow {
    /// The biconditional: the closed form matches iff no point is wrong twice.
    pub fn consistent(&self) -> bool {
        self.nabla_holds == self.eq5_matches
    }
}

/// Compares the closed form against the true edge for one step.
pub fn check_step<S: Scalar>(
    iteration: usize,
    w_prev: &WeightVector<S>,
    eta_prev: &MistakeDichotomy,
    r_prev: &S,
    eta_cur: &MistakeDichotomy,
    tol: f64,
) -> Result<ThreeWeightRow, CycleError> {
    let part = partition(eta_prev, eta_cur)?;
    let three = three_weight_edge(w_prev, r_prev, &part)?;
    let w_cur = crate::engine::weight_update(w_prev, eta_prev, r_prev)?;
    let edge = edge_dot(&w_cur, eta_cur)?;
    Ok(ThreeWeightRow {
        iteration,
        nabla_holds: part.nabla_holds(),
        eq5_matches: three.approx_eq(&edge, tol),
        edge: edge.to_text(),
        eq5_value: three.to_text(),
    })
}

/// One row per consecutive pair of steps. `tol` is ignored in exact mode.
pub fn check_thm_3wgt<S: Scalar>(
    trace: &BoostTrace<S>,
    tol: f64,
) -> Result<Vec<ThreeWeightRow>, CycleError> {
    if trace.len() < 2 {
        return Err(CycleError::TraceTooShort {
            needed: 2,
            found: trace.len(),
        });
    }
    let steps = trace.steps();
    (1..steps.len())
        .map(|k| {
            let prev = &steps[k - 1];
            check_step(
                steps[k].iteration,
                trace.weights_at(k - 1),
                &prev.eta,
                &prev.edge,
                &steps[k].eta,
                tol,
            )
        })
        .collect()
}

/// Scaled subsums of the three-term form and the previous misclassified mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Subsums<S> {
    /// `sum_{I+} w/(1+r)`, equal to `r_t/2`.
    pub i_plus: S,
    /// `sum_{I-} w/(1-r)`, equal to `1/2`.
    pub i_minus: S,
    /// `sum_{J+} w/(1+r)`, equal to `(1-r_t)/2`.
    pub j_plus: S,
    /// `sum_{I-} w_prev`, equal to `(1-r_prev)/2`.
    pub i_minus_mass: S,
}

impl<S: Scalar> Subsums<S> {
    /// The resulting edge `r_t`.
    pub fn edge(&self) -> S {
        self.i_plus.clone() + self.i_minus.clone() - self.j_plus.clone()
    }

    /// Whether the subsums take the values `r_t/2`, `1/2`, `(1-r_t)/2` and
    /// the previous misclassified mass is `(1-r_prev)/2`.
    pub fn matches_expected(&self, r_prev: &S, tol: f64) -> bool {
        let two = S::from_int(2);
        let r = self.edge();
        self.i_plus.approx_eq(&(r.clone() / two.clone()), tol)
            && self.i_minus.approx_eq(&S::from_ratio(1, 2), tol)
            && self.j_plus.approx_eq(&((S::one() - r) / two.clone()), tol)
            && self
                .i_minus_mass
                .approx_eq(&((S::one() - r_prev.clone()) / two), tol)
    }
}

pub fn subsums<S: Scalar>(
    w_prev: &WeightVector<S>,
    r_prev: &S,
    part: &IndexPartition,
) -> Result<Subsums<S>, CycleError> {
    check_edge(r_prev)?;
    check_len(w_prev, part)?;
    if !part.nabla_holds() {
        return Err(CycleError::NablaRequired {
            rows: part.j_minus.clone(),
        });
    }
    if part.i_minus.is_empty() {
        return Err(CycleError::DegenerateGroup("I-"));
    }
    let up = S::one() + r_prev.clone();
    let down = S::one() - r_prev.clone();
    let i_minus_mass = mass(w_prev, &part.i_minus);
    Ok(Subsums {
        i_plus: mass(w_prev, &part.i_plus) / up.clone(),
        i_minus: i_minus_mass.clone() / down,
        j_plus: mass(w_prev, &part.j_plus) / up,
        i_minus_mass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Group {
    #[serde(rename = "I+")]
    IPlus,
    #[serde(rename = "I-")]
    IMinus,
    #[serde(rename = "J+")]
    JPlus,
}

impl Group {
    pub fn label(self) -> &'static str {
        match self {
            Group::IPlus => "I+",
            Group::IMinus => "I-",
            Group::JPlus => "J+",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contribution<S> {
    pub index: usize,
    pub group: Group,
    pub beta: S,
    /// Exact share; in float mode a reconstruction that may fail.
    pub rational: Option<Rational>,
}

/// Shares of each weight in its group's subsum.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionVector<S> {
    pub entries: Vec<Contribution<S>>,
}

impl<S: Scalar> ContributionVector<S> {
    pub fn group(&self, g: Group) -> impl Iterator<Item = &Contribution<S>> {
        self.entries.iter().filter(move |c| c.group == g)
    }

    pub fn group_sum(&self, g: Group) -> S {
        self.group(g).fold(S::zero(), |acc, c| acc + c.beta.clone())
    }

    /// Every share has a rational value.
    pub fn all_rational(&self) -> bool {
        self.entries.iter().all(|c| c.rational.is_some())
    }

    /// Indices whose share could not be reconstructed as a rational.
    pub fn irrational_indices(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|c| c.rational.is_none())
            .map(|c| c.index)
            .collect()
    }
}

pub fn contributions<S: Scalar>(
    w_prev: &WeightVector<S>,
    r_prev: &S,
    part: &IndexPartition,
) -> Result<ContributionVector<S>, CycleError> {
    let sub = subsums(w_prev, r_prev, part)?;
    let up = S::one() + r_prev.clone();
    let down = S::one() - r_prev.clone();
    let groups = [
        (Group::IPlus, &part.i_plus, &up, &sub.i_plus),
        (Group::IMinus, &part.i_minus, &down, &sub.i_minus),
        (Group::JPlus, &part.j_plus, &up, &sub.j_plus),
    ];
    let mut entries = Vec::with_capacity(part.len());
    for (group, idx, scale, total) in groups {
        if idx.is_empty() || total.is_zero() {
            return Err(CycleError::DegenerateGroup(group.label()));
        }
        for &i in idx {
            let beta = w_prev.components()[i].clone() / scale.clone() / total.clone();
            let rational = beta.rationalize(BETA_MAX_DENOMINATOR, BETA_TOLERANCE);
            entries.push(Contribution {
                index: i,
                group,
                beta,
                rational,
            });
        }
    }
    Ok(ContributionVector { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, SelectionRule};
    use crate::simplex::{HypothesisPool, PoolOrigin};
    use num_bigint::BigInt;
    use std::sync::Arc;

    fn d(s: &str) -> MistakeDichotomy {
        MistakeDichotomy::from_signs(s).unwrap()
    }

    fn q(n: i64, den: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(den))
    }

    fn wq(v: &[(i64, i64)]) -> WeightVector<Rational> {
        WeightVector::new(v.iter().map(|&(n, den)| q(n, den)).collect()).unwrap()
    }

    fn golden_pool() -> Arc<HypothesisPool> {
        Arc::new(HypothesisPool::parse("-++\n+-+\n++-\n").unwrap())
    }

    #[test]
    fn partition_examples() {
        let p = partition(&d("-++"), &d("+-+")).unwrap();
        assert_eq!(p.i_plus, vec![2]);
        assert_eq!(p.i_minus, vec![0]);
        assert_eq!(p.j_plus, vec![1]);
        assert!(p.j_minus.is_empty() && p.nabla_holds());

        let p = partition(&d("++-"), &d("++-")).unwrap();
        assert_eq!(p.j_minus, vec![2]);
        assert!(!p.nabla_holds());

        let p = partition(&d("+++"), &d("+-+")).unwrap();
        assert!(p.i_minus.is_empty() && p.j_minus.is_empty());
        assert!(partition(&d("++"), &d("+-+")).is_err());
    }

    #[test]
    fn four_term_examples() {
        let part = partition(&d("-++"), &d("+-+")).unwrap();
        let v =
            four_term_edge(&wq(&[(1, 5), (3, 10), (1, 2)]), &q(3, 5), &part, &d("+-+")).unwrap();
        assert_eq!(v, q(5, 8));
        let u = WeightVector::<Rational>::uniform(3).unwrap();
        assert_eq!(
            four_term_edge(&u, &q(1, 3), &part, &d("+-+")).unwrap(),
            q(1, 2)
        );

        // No current mistakes: the updated weights sum to 1.
        let all = partition(&d("-++"), &d("+++")).unwrap();
        assert_eq!(
            four_term_edge(&u, &q(1, 3), &all, &d("+++")).unwrap(),
            q(1, 1)
        );
        assert!(matches!(
            four_term_edge(&u, &q(1, 3), &all, &d("+-+")),
            Err(CycleError::InconsistentPartition)
        ));
        assert!(four_term_edge(&u, &q(1, 1), &part, &d("+-+")).is_err());
    }

    #[test]
    fn golden_trace_satisfies_closed_form() {
        let trace = run::<Rational>(golden_pool(), SelectionRule::Optimal, 20).unwrap();
        let rows = check_thm_3wgt(&trace, 0.0).unwrap();
        assert_eq!(rows.len(), 19);
        assert!(rows.iter().all(|r| r.nabla_holds && r.eq5_matches));
    }

    #[test]
    fn repeated_dichotomy_breaks_closed_form() {
        // A row followed by a row sharing one of its mistakes.
        let pool = Arc::new(HypothesisPool::parse("--++++\n-+++++\n+-+-++\n++++--\n").unwrap());
        let rule = SelectionRule::FixedSequence(vec![0, 1, 2, 3]);
        let trace = run::<Rational>(pool, rule, 12).unwrap();
        assert!(trace.len() >= 3, "{:?}", trace.halt());
        let rows = check_thm_3wgt(&trace, 0.0).unwrap();
        assert!(rows.iter().any(|r| !r.nabla_holds));
        for r in &rows {
            assert!(r.consistent(), "{r:?}");
            // Brute force: the closed form differs from the edge exactly when J- is nonempty.
            assert_eq!(r.eq5_value == r.edge, r.nabla_holds);
        }
    }

    #[test]
    fn all_correct_second_step_matches() {
        let w = WeightVector::<Rational>::uniform(3).unwrap();
        let row = check_step(1, &w, &d("-++"), &q(1, 3), &d("+++"), 0.0).unwrap();
        assert!(row.nabla_holds && row.eq5_matches);
        assert_eq!(row.eq5_value, "1");
    }

    #[test]
    fn subsum_values() {
        let part = partition(&d("-++"), &d("+-+")).unwrap();
        let s = subsums(&wq(&[(1, 5), (3, 10), (1, 2)]), &q(3, 5), &part).unwrap();
        assert_eq!(s.i_plus, q(5, 16));
        assert_eq!(s.i_minus, q(1, 2));
        assert_eq!(s.j_plus, q(3, 16));
        assert_eq!(s.i_minus_mass, q(1, 5));
        assert_eq!(s.edge(), q(5, 8));
        assert!(s.matches_expected(&q(3, 5), 0.0));

        let twice = partition(&d("++-"), &d("++-")).unwrap();
        let u = WeightVector::<Rational>::uniform(3).unwrap();
        assert!(matches!(
            subsums(&u, &q(1, 3), &twice),
            Err(CycleError::NablaRequired { .. })
        ));
        let none_wrong = partition(&d("+++"), &d("+-+")).unwrap();
        assert!(matches!(
            subsums(&u, &q(1, 3), &none_wrong),
            Err(CycleError::DegenerateGroup("I-"))
        ));
    }

    #[test]
    fn golden_float_subsums() {
        let trace = run::<f64>(golden_pool(), SelectionRule::Optimal, 200).unwrap();
        let k = 150;
        let steps = trace.steps();
        let part = partition(&steps[k - 1].eta, &steps[k].eta).unwrap();
        let s = subsums(trace.weights_at(k - 1), &steps[k - 1].edge, &part).unwrap();
        let r = (5f64.sqrt() - 1.0) / 2.0;
        assert!((s.i_plus - r / 2.0).abs() < 1e-9);
        assert!((s.i_minus - 0.5).abs() < 1e-9);
        assert!((s.j_plus - (1.0 - r) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn singleton_groups_have_unit_shares() {
        let part = partition(&d("-++"), &d("+-+")).unwrap();
        let c = contributions(&wq(&[(1, 5), (3, 10), (1, 2)]), &q(3, 5), &part).unwrap();
        assert!(c.entries.iter().all(|e| e.beta == q(1, 1)));
        assert!(c.all_rational());
    }

    #[test]
    fn duplicated_points_split_shares() {
        let pool = Arc::new(
            HypothesisPool::new(
                vec![d("--++++"), d("++--++"), d("++++--")],
                PoolOrigin::Synthetic,
            )
            .unwrap(),
        );
        let trace = run::<Rational>(pool, SelectionRule::Optimal, 10).unwrap();
        let steps = trace.steps();
        for k in 1..steps.len() {
            let part = partition(&steps[k - 1].eta, &steps[k].eta).unwrap();
            let c = contributions(trace.weights_at(k - 1), &steps[k - 1].edge, &part).unwrap();
            for g in [Group::IPlus, Group::IMinus, Group::JPlus] {
                assert_eq!(c.group_sum(g), q(1, 1));
                assert!(c.group(g).all(|e| e.beta == q(1, 2)));
            }
        }
    }

    #[test]
    fn float_shares_are_reconstructed() {
        let trace = run::<f64>(golden_pool(), SelectionRule::Optimal, 50).unwrap();
        let steps = trace.steps();
        let part = partition(&steps[40].eta, &steps[41].eta).unwrap();
        let c = contributions(trace.weights_at(40), &steps[40].edge, &part).unwrap();
        assert!(c.all_rational());
        assert!(c.irrational_indices().is_empty());
        for g in [Group::IPlus, Group::IMinus, Group::JPlus] {
            assert!((c.group_sum(g) - 1.0).abs() < 1e-12);
        }
    }
}
