//! Weighted greedy decision trees scored by weighted misclassification.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Dataset, LearnerError};
use crate::simplex::MistakeDichotomy;

/// Depth and leaf-count limits for a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeBounds {
    pub max_depth: usize,
    pub max_leaves: usize,
}

impl TreeBounds {
    pub const STUMP: TreeBounds = TreeBounds {
        max_depth: 1,
        max_leaves: 2,
    };

    pub fn new(max_depth: usize, max_leaves: usize) -> Result<Self, LearnerError> {
        if max_depth == 0 {
            return Err(LearnerError::InvalidBounds(
                "max depth must be at least 1".into(),
            ));
        }
        if max_leaves < 2 {
            return Err(LearnerError::InvalidBounds(
                "max leaves must be at least 2".into(),
            ));
        }
        Ok(TreeBounds {
            max_depth,
            max_leaves,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        label: i8,
    },
    /// Points with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn predict(&self, x: &[f64]) -> i8 {
        match self {
            Node::Leaf { label } => *label,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if x[*feature] <= *threshold {
                    left.predict(x)
                } else {
                    right.predict(x)
                }
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn leaves(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => left.leaves() + right.leaves(),
        }
    }

    fn flip(&mut self) {
        match self {
            Node::Leaf { label } => *label = -*label,
            Node::Split { left, right, .. } => {
                left.flip();
                right.flip();
            }
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        match self {
            Node::Leaf { label } => writeln!(f, "{pad}{}", if *label > 0 { "+1" } else { "-1" }),
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                writeln!(f, "{pad}x[{feature}] <= {threshold}")?;
                left.write(f, indent + 1)?;
                right.write(f, indent + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeHypothesis {
    root: Node,
}

impl TreeHypothesis {
    pub fn constant(label: i8) -> Self {
        TreeHypothesis {
            root: Node::Leaf { label },
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn predict(&self, x: &[f64]) -> i8 {
        self.root.predict(x)
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn n_leaves(&self) -> usize {
        self.root.leaves()
    }

    pub fn negated(&self) -> Self {
        let mut t = self.clone();
        t.root.flip();
        t
    }
}

impl fmt::Display for TreeHypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(f, 0)
    }
}

/// `y_i h(x_i)` for every row, without the at-least-one-correct requirement.
pub fn signs_of(h: &TreeHypothesis, ds: &Dataset) -> Vec<i8> {
    ds.features()
        .iter()
        .zip(ds.labels())
        .map(|(x, &y)| y * h.predict(x))
        .collect()
}

/// Mistake dichotomy of `h` on `ds`. A hypothesis wrong on every point has
/// no valid dichotomy and yields `NoCorrectEntry`.
pub fn dichotomy_of(h: &TreeHypothesis, ds: &Dataset) -> Result<MistakeDichotomy, LearnerError> {
    Ok(MistakeDichotomy::new(signs_of(h, ds))?)
}

/// Weighted edge `sum_i w_i y_i h(x_i)`.
pub fn weighted_edge(h: &TreeHypothesis, ds: &Dataset, w: &[f64]) -> f64 {
    signs_of(h, ds)
        .iter()
        .zip(w)
        .map(|(&s, &wi)| s as f64 * wi)
        .sum()
}

/// Per-feature row orders, sorted by value then row index. Computing this
/// once per dataset lets repeated training skip the sorts.
#[derive(Debug, Clone)]
pub struct SortedFeatures {
    orders: Vec<Vec<usize>>,
}

impl SortedFeatures {
    pub fn new(ds: &Dataset) -> Self {
        let orders = (0..ds.n_features())
            .map(|f| {
                let mut idx: Vec<usize> = (0..ds.len()).collect();
                idx.sort_by(|&a, &b| ds.row(a)[f].total_cmp(&ds.row(b)[f]).then(a.cmp(&b)));
                idx
            })
            .collect();
        SortedFeatures { orders }
    }
}

struct Leaf {
    path: Vec<bool>,
    depth: usize,
    members: Vec<bool>,
    error: f64,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    left_label: i8,
    right_label: i8,
    error: f64,
}

fn majority(pos: f64, neg: f64) -> (i8, f64) {
    if pos >= neg {
        (1, neg)
    } else {
        (-1, pos)
    }
}

fn best_split(ds: &Dataset, sorted: &SortedFeatures, w: &[f64], leaf: &Leaf) -> Option<Candidate> {
    let (mut tot_pos, mut tot_neg) = (0.0, 0.0);
    for i in (0..ds.len()).filter(|&i| leaf.members[i]) {
        if ds.labels()[i] > 0 {
            tot_pos += w[i];
        } else {
            tot_neg += w[i];
        }
    }
    let mut best: Option<Candidate> = None;
    for (f, order) in sorted.orders.iter().enumerate() {
        let (mut lp, mut ln) = (0.0, 0.0);
        let rows: Vec<usize> = order.iter().copied().filter(|&i| leaf.members[i]).collect();
        for k in 0..rows.len().saturating_sub(1) {
            let i = rows[k];
            if ds.labels()[i] > 0 {
                lp += w[i];
            } else {
                ln += w[i];
            }
            let (a, b) = (ds.row(i)[f], ds.row(rows[k + 1])[f]);
            if a == b {
                continue;
            }
            let (left_label, le) = majority(lp, ln);
            let (right_label, re) = majority(tot_pos - lp, tot_neg - ln);
            if left_label == right_label {
                continue;
            }
            let error = le + re;
            // Strict improvement keeps the lowest feature, then lowest threshold.
            if best.as_ref().is_none_or(|c| error < c.error) {
                best = Some(Candidate {
                    feature: f,
                    threshold: a + (b - a) / 2.0,
                    left_label,
                    right_label,
                    error,
                });
            }
        }
    }
    best
}

fn node_at<'a>(root: &'a mut Node, path: &[bool]) -> &'a mut Node {
    let mut node = root;
    for &go_right in path {
        node = match node {
            Node::Split { left, right, .. } => {
                if go_right {
                    right
                } else {
                    left
                }
            }
            Node::Leaf { .. } => unreachable!("paths only address existing nodes"),
        };
    }
    node
}

/// Trains a tree on weights `w` (one per row, non-negative).
///
/// Growth is best-first: the leaf split with the largest drop in weighted
/// error goes next, until the leaf budget is spent or no split lowers the
/// error. Thresholds are midpoints between consecutive distinct values. The
/// returned tree has non-negative edge on `w`.
pub fn train_tree(
    ds: &Dataset,
    w: &[f64],
    bounds: TreeBounds,
) -> Result<TreeHypothesis, LearnerError> {
    train_tree_sorted(ds, &SortedFeatures::new(ds), w, bounds)
}

/// [`train_tree`] with precomputed feature orders.
pub fn train_tree_sorted(
    ds: &Dataset,
    sorted: &SortedFeatures,
    w: &[f64],
    bounds: TreeBounds,
) -> Result<TreeHypothesis, LearnerError> {
    TreeBounds::new(bounds.max_depth, bounds.max_leaves)?;
    if w.len() != ds.len() {
        return Err(LearnerError::WeightLength {
            expected: ds.len(),
            found: w.len(),
        });
    }
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(LearnerError::Shape(
            "weights must be finite and non-negative".into(),
        ));
    }
    let total: f64 = w.iter().sum();
    let eps = 1e-12 * total;
    let (pos, neg) =
        ds.labels().iter().zip(w).fold(
            (0.0, 0.0),
            |(p, n), (&y, &wi)| if y > 0 { (p + wi, n) } else { (p, n + wi) },
        );
    let (label, error) = majority(pos, neg);
    let mut root = Node::Leaf { label };
    let mut leaves = vec![Leaf {
        path: Vec::new(),
        depth: 0,
        members: vec![true; ds.len()],
        error,
    }];
    let mut cache: Vec<Option<Option<Candidate>>> = vec![None];
    while leaves.len() < bounds.max_leaves {
        let mut pick: Option<(usize, f64)> = None;
        for (li, leaf) in leaves.iter().enumerate() {
            if leaf.depth >= bounds.max_depth || leaf.error <= eps {
                continue;
            }
            if cache[li].is_none() {
                cache[li] = Some(best_split(ds, sorted, w, leaf));
            }
            if let Some(Some(c)) = &cache[li] {
                let gain = leaf.error - c.error;
                if gain > eps && pick.is_none_or(|(_, g)| gain > g) {
                    pick = Some((li, gain));
                }
            }
        }
        let Some((li, _)) = pick else { break };
        let leaf = leaves.remove(li);
        let c = cache.remove(li).flatten().expect("picked leaf has a split");
        let mut left_members = vec![false; ds.len()];
        let mut right_members = vec![false; ds.len()];
        let (mut le, mut re) = (0.0, 0.0);
        for i in (0..ds.len()).filter(|&i| leaf.members[i]) {
            let goes_left = ds.row(i)[c.feature] <= c.threshold;
            let (members, err, lab) = if goes_left {
                (&mut left_members, &mut le, c.left_label)
            } else {
                (&mut right_members, &mut re, c.right_label)
            };
            members[i] = true;
            if ds.labels()[i] != lab {
                *err += w[i];
            }
        }
        *node_at(&mut root, &leaf.path) = Node::Split {
            feature: c.feature,
            threshold: c.threshold,
            left: Box::new(Node::Leaf {
                label: c.left_label,
            }),
            right: Box::new(Node::Leaf {
                label: c.right_label,
            }),
        };
        for (go_right, members, error) in [(false, left_members, le), (true, right_members, re)] {
            let mut path = leaf.path.clone();
            path.push(go_right);
            leaves.push(Leaf {
                path,
                depth: leaf.depth + 1,
                members,
                error,
            });
            cache.push(None);
        }
    }
    let tree = TreeHypothesis { root };
    if weighted_edge(&tree, ds, w) < 0.0 {
        Ok(tree.negated())
    } else {
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{parse_csv, Provenance};

    fn dataset(xs: Vec<Vec<f64>>, ys: Vec<i8>) -> Dataset {
        let m = xs[0].len();
        let prov = Provenance {
            source: "test".into(),
            label_column: "y".into(),
            positive_class: "+".into(),
            rows_read: ys.len(),
            rows_dropped: 0,
            sample_seed: None,
            sample_size: None,
            sample_rows: None,
        };
        Dataset::new((0..m).map(|i| format!("f{i}")).collect(), xs, ys, prov).unwrap()
    }

    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    #[test]
    fn separable_feature_gives_perfect_stump() {
        let ds = dataset(
            vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![-1, -1, 1, 1],
        );
        let h = train_tree(&ds, &uniform(4), TreeBounds::new(3, 4).unwrap()).unwrap();
        assert_eq!(h.depth(), 1);
        assert_eq!(h.n_leaves(), 2);
        assert_eq!(
            h.root(),
            &Node::Split {
                feature: 0,
                threshold: 2.5,
                left: Box::new(Node::Leaf { label: -1 }),
                right: Box::new(Node::Leaf { label: 1 }),
            }
        );
        assert_eq!(dichotomy_of(&h, &ds).unwrap().entries(), &[1, 1, 1, 1]);
        assert!(matches!(
            dichotomy_of(&h.negated(), &ds),
            Err(LearnerError::Simplex(_))
        ));
        assert_eq!(signs_of(&h.negated(), &ds), vec![-1; 4]);
    }

    #[test]
    fn constant_features_give_constant_tree() {
        let ds = dataset(vec![vec![1.0]; 3], vec![1, -1, -1]);
        let h = train_tree(&ds, &uniform(3), TreeBounds::STUMP).unwrap();
        assert_eq!(h, TreeHypothesis::constant(-1));
        let h = train_tree(&ds, &[0.5, 0.25, 0.25], TreeBounds::STUMP).unwrap();
        assert_eq!(h, TreeHypothesis::constant(1));
    }

    #[test]
    fn ties_prefer_lowest_feature_then_threshold() {
        // Both features separate the data identically.
        let ds = dataset(
            vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]],
            vec![-1, 1, 1],
        );
        let h = train_tree(&ds, &uniform(3), TreeBounds::STUMP).unwrap();
        assert!(matches!(h.root(), Node::Split { feature: 0, threshold, .. } if *threshold == 0.5));
        // Two equally good thresholds on one feature: the lower one wins.
        let ds = dataset(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![-1, 1, -1, 1],
        );
        let h = train_tree(&ds, &uniform(4), TreeBounds::STUMP).unwrap();
        assert!(matches!(h.root(), Node::Split { threshold, .. } if *threshold == 0.5));
    }

    fn best_stump_error(ds: &Dataset, w: &[f64]) -> f64 {
        // Brute force over every feature, every threshold and both label
        // assignments, including constant hypotheses.
        let mut best = f64::INFINITY;
        for f in 0..ds.n_features() {
            let mut values: Vec<f64> = ds.features().iter().map(|r| r[f]).collect();
            values.push(f64::NEG_INFINITY);
            for &t in &values {
                for sign in [1i8, -1] {
                    let err: f64 = (0..ds.len())
                        .filter(|&i| {
                            let p = if ds.row(i)[f] <= t { -sign } else { sign };
                            p != ds.labels()[i]
                        })
                        .map(|i| w[i])
                        .sum();
                    best = best.min(err);
                }
            }
        }
        best
    }

    #[test]
    fn concentrated_weight_point_is_classified() {
        let ds = parse_csv(
            include_str!("../../data/iris.csv").as_bytes(),
            "iris",
            "species",
            "versicolor",
        )
        .unwrap();
        for heavy in [0, 60, 77, 120, 149] {
            let mut w = vec![1e-4; ds.len()];
            w[heavy] = 1.0 - 1e-4 * (ds.len() - 1) as f64;
            let h = train_tree(&ds, &w, TreeBounds::STUMP).unwrap();
            let eta = signs_of(&h, &ds);
            assert_eq!(eta[heavy], 1, "point {heavy}");
            let err: f64 = eta
                .iter()
                .zip(&w)
                .filter(|(s, _)| **s < 0)
                .map(|(_, w)| w)
                .sum();
            assert!((err - best_stump_error(&ds, &w)).abs() < 1e-12);
        }
    }

    #[test]
    fn respects_bounds_and_beats_best_stump() {
        let ds = parse_csv(
            include_str!("../../data/iris.csv").as_bytes(),
            "iris",
            "species",
            "virginica",
        )
        .unwrap();
        let w = uniform(ds.len());
        let stump_err = best_stump_error(&ds, &w);
        for (d, l) in [(1, 2), (2, 3), (3, 4), (2, 8), (5, 3)] {
            let h = train_tree(&ds, &w, TreeBounds::new(d, l).unwrap()).unwrap();
            assert!(h.depth() <= d && h.n_leaves() <= l, "{d},{l}");
            let err: f64 = signs_of(&h, &ds)
                .iter()
                .zip(&w)
                .filter(|(s, _)| **s < 0)
                .map(|(_, w)| w)
                .sum();
            assert!(err <= stump_err + 1e-12);
            assert!(weighted_edge(&h, &ds, &w) >= 0.0);
        }
        let stump = train_tree(&ds, &w, TreeBounds::STUMP).unwrap();
        let err: f64 = signs_of(&stump, &ds)
            .iter()
            .zip(&w)
            .filter(|(s, _)| **s < 0)
            .map(|(_, w)| w)
            .sum();
        assert!((err - stump_err).abs() < 1e-12);
    }

    #[test]
    fn invalid_bounds() {
        assert!(TreeBounds::new(0, 4).is_err());
        assert!(TreeBounds::new(2, 1).is_err());
    }
}
