//! CART decision tree: Gini impurity for classes, squared error for values.
//!
//! Split thresholds sit halfway between consecutive distinct values and rows
//! with `x <= threshold` go left. Splits whose impurity decreases agree to
//! within a relative `GAIN_TIE` count as equally good; among those the one
//! with the widest gap between the two sides wins, the gap measured as a
//! fraction of the feature's range inside the node. Remaining ties go to the
//! lowest feature index, then the lowest threshold.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;

use super::{Dataset, Target};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEPTH: usize = 8;

/// Relative tolerance under which two impurity decreases are a tie.
pub const GAIN_TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features considered per node; `None` means all of them.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: DEFAULT_MAX_DEPTH,
            min_samples_split: 2,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    /// Class probabilities, or a single mean value.
    Leaf(Vec<f64>),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    /// Impurity decrease per feature, normalized to sum to one (all zero for
    /// a single-leaf tree).
    pub importances: Vec<f64>,
}

/// Sufficient statistics of a set of samples.
#[derive(Clone)]
enum Stats {
    Counts(Vec<f64>),
    Moments { n: f64, sum: f64, sum_sq: f64 },
}

impl Stats {
    fn empty(y: &Target) -> Self {
        match y {
            Target::Classes { n_classes, .. } => Stats::Counts(vec![0.0; *n_classes]),
            Target::Values(_) => Stats::Moments { n: 0.0, sum: 0.0, sum_sq: 0.0 },
        }
    }

    #[inline]
    fn add(&mut self, y: &Target, row: usize) {
        match (self, y) {
            (Stats::Counts(c), Target::Classes { labels, .. }) => c[labels[row]] += 1.0,
            (Stats::Moments { n, sum, sum_sq }, Target::Values(v)) => {
                *n += 1.0;
                *sum += v[row];
                *sum_sq += v[row] * v[row];
            }
            _ => unreachable!("stats kind follows the target"),
        }
    }

    /// Node size times node impurity.
    fn weighted_impurity(&self) -> f64 {
        match self {
            Stats::Counts(c) => {
                let n: f64 = c.iter().sum();
                if n == 0.0 {
                    return 0.0;
                }
                (n - c.iter().map(|k| k * k).sum::<f64>() / n).max(0.0)
            }
            Stats::Moments { n, sum, sum_sq } => {
                if *n == 0.0 {
                    return 0.0;
                }
                (sum_sq - sum * sum / n).max(0.0)
            }
        }
    }

    fn leaf(&self) -> Vec<f64> {
        match self {
            Stats::Counts(c) => {
                let n: f64 = c.iter().sum();
                c.iter().map(|k| k / n).collect()
            }
            Stats::Moments { n, sum, .. } => vec![sum / n],
        }
    }

    fn minus(&self, other: &Stats) -> Stats {
        match (self, other) {
            (Stats::Counts(a), Stats::Counts(b)) => Stats::Counts(a.iter().zip(b).map(|(x, y)| x - y).collect()),
            (Stats::Moments { n, sum, sum_sq }, Stats::Moments { n: n2, sum: s2, sum_sq: q2 }) => Stats::Moments {
                n: n - n2,
                sum: sum - s2,
                sum_sq: sum_sq - q2,
            },
            _ => unreachable!(),
        }
    }
}

struct Best {
    decrease: f64,
    /// Gap between the sides over the node's range of the feature.
    margin: f64,
    feature: usize,
    threshold: f64,
}

struct Builder<'a> {
    x: &'a Dataset,
    y: &'a Target,
    /// Data row of every sample; repeats allowed (bootstrap).
    rows: &'a [usize],
    params: TreeParams,
    rng: Option<&'a mut ChaCha8Rng>,
    /// Samples sorted by value, per feature, when every feature is scanned.
    order: Option<Vec<Vec<u32>>>,
    in_node: Vec<bool>,
    buf: Vec<(f64, usize)>,
    nodes: Vec<Node>,
    importances: Vec<f64>,
}

impl Builder<'_> {
    fn stats(&self, samples: &[usize]) -> Stats {
        let mut s = Stats::empty(self.y);
        for &i in samples {
            s.add(self.y, self.rows[i]);
        }
        s
    }

    /// Best split of the node over `self.buf`, which holds its samples
    /// sorted by the values of `feature`.
    fn scan(&self, feature: usize, parent: &Stats, parent_w: f64, best: &mut Option<Best>) {
        let buf = &self.buf;
        let span = buf[buf.len() - 1].0 - buf[0].0;
        let floor = 1e-12 * parent_w.max(1.0);
        let tie = GAIN_TIE * parent_w;
        let mut left = Stats::empty(self.y);
        for k in 0..buf.len() - 1 {
            left.add(self.y, self.rows[buf[k].1]);
            let (a, b) = (buf[k].0, buf[k + 1].0);
            if !(a < b) {
                continue;
            }
            let right = parent.minus(&left);
            let decrease = parent_w - left.weighted_impurity() - right.weighted_impurity();
            if decrease <= floor {
                continue;
            }
            let margin = (b - a) / span;
            let better = match best {
                None => true,
                Some(cur) => decrease > cur.decrease + tie || (decrease >= cur.decrease - tie && margin > cur.margin),
            };
            if better {
                let mid = 0.5 * (a + b);
                let threshold = if mid >= a && mid < b { mid } else { a };
                *best = Some(Best { decrease, margin, feature, threshold });
            }
        }
    }

    fn candidates(&mut self) -> Vec<usize> {
        let p = self.x.n_cols();
        match (self.params.max_features, self.rng.as_deref_mut()) {
            (Some(k), Some(rng)) if k < p => {
                let mut f = sample(rng, p, k).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..p).collect(),
        }
    }

    fn build(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let stats = self.stats(&samples);
        self.nodes.push(Node::Leaf(stats.leaf()));
        let parent_w = stats.weighted_impurity();
        if depth >= self.params.max_depth || samples.len() < self.params.min_samples_split || parent_w <= 1e-12 {
            return id;
        }

        let mut best: Option<Best> = None;
        let features = self.candidates();
        if let Some(order) = self.order.take() {
            for &s in &samples {
                self.in_node[s] = true;
            }
            for &f in &features {
                self.buf.clear();
                let col = self.x.column(f);
                for &s in &order[f] {
                    let s = s as usize;
                    if self.in_node[s] {
                        self.buf.push((col[self.rows[s]], s));
                    }
                }
                self.scan(f, &stats, parent_w, &mut best);
            }
            for &s in &samples {
                self.in_node[s] = false;
            }
            self.order = Some(order);
        } else {
            for &f in &features {
                let col = self.x.column(f);
                self.buf.clear();
                self.buf.extend(samples.iter().map(|&s| (col[self.rows[s]], s)));
                self.buf.sort_by(|a, b| a.0.total_cmp(&b.0));
                self.scan(f, &stats, parent_w, &mut best);
            }
        }

        let Some(best) = best else { return id };
        self.importances[best.feature] += best.decrease;
        let col = self.x.column(best.feature);
        let (l, r): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&s| col[self.rows[s]] <= best.threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }
}

impl Tree {
    /// Fits on every row of `x`.
    pub fn fit(x: &Dataset, y: &Target, params: &TreeParams, rng: Option<&mut ChaCha8Rng>) -> Result<Tree> {
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        Tree::fit_rows(x, y, &rows, params, rng)
    }

    /// Fits on the listed rows; a row may appear more than once.
    pub fn fit_rows(
        x: &Dataset,
        y: &Target,
        rows: &[usize],
        params: &TreeParams,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Result<Tree> {
        if rows.is_empty() {
            return Err(Error::TooShort("tree needs at least one row".into()));
        }
        if params.max_features.is_some() && rng.is_none() {
            return Err(Error::Config("feature subsampling needs a random source".into()));
        }
        let order = params.max_features.is_none().then(|| {
            (0..x.n_cols())
                .map(|f| {
                    let col = x.column(f);
                    let mut o: Vec<u32> = (0..rows.len() as u32).collect();
                    o.sort_by(|&a, &b| col[rows[a as usize]].total_cmp(&col[rows[b as usize]]));
                    o
                })
                .collect()
        });
        let mut b = Builder {
            x,
            y,
            rows,
            params: *params,
            rng,
            order,
            in_node: vec![false; rows.len()],
            buf: Vec::with_capacity(rows.len()),
            nodes: Vec::new(),
            importances: vec![0.0; x.n_cols()],
        };
        b.build((0..rows.len()).collect(), 0);
        let total: f64 = b.importances.iter().sum();
        let mut importances = b.importances;
        if total > 0.0 {
            importances.iter_mut().for_each(|v| *v /= total);
        }
        Ok(Tree {
            nodes: b.nodes,
            importances,
        })
    }

    /// Leaf reached by row `r` of `x`.
    pub fn leaf_value<'a>(&'a self, x: &Dataset, r: usize) -> &'a [f64] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if x.get(r, *feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn single_threshold_split() {
        let x = Dataset::from_rows(&[vec![1.0], vec![2.0], vec![3.0], vec![10.0]]).unwrap();
        let y = Target::Classes { labels: vec![0, 0, 1, 1], n_classes: 2 };
        let t = Tree::fit(&x, &y, &TreeParams::default(), None).unwrap();
        assert_eq!(t.depth(), 1);
        let probe = Dataset::from_rows(&[vec![2.51], vec![2.5]]).unwrap();
        assert_eq!(t.leaf_value(&probe, 0), &[0.0, 1.0]);
        assert_eq!(t.leaf_value(&probe, 1), &[1.0, 0.0]);
        assert_eq!(t.importances, vec![1.0]);
    }

    #[test]
    fn regression_fits_step() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, 0.0]).collect();
        let x = Dataset::from_rows(&rows).unwrap();
        let y = Target::Values((0..8).map(|i| if i < 3 { 1.0 } else { 4.0 }).collect());
        let t = Tree::fit(&x, &y, &TreeParams::default(), None).unwrap();
        assert_eq!(t.n_leaves(), 2);
        assert_eq!(t.leaf_value(&x, 0), &[1.0]);
        assert_eq!(t.leaf_value(&x, 7), &[4.0]);
        assert_eq!(t.importances, vec![1.0, 0.0]);
    }

    #[test]
    fn ties_go_to_lowest_feature() {
        let x = Dataset::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let y = Target::Values(vec![0.0, 1.0]);
        let t = Tree::fit(&x, &y, &TreeParams::default(), None).unwrap();
        assert_eq!(t.importances, vec![1.0, 0.0]);
    }

    #[test]
    fn equal_gain_prefers_wider_gap() {
        // both features split the classes perfectly; the second leaves a
        // wider gap relative to its range
        let x = Dataset::from_rows(&[vec![0.0, 0.0], vec![0.9, 0.1], vec![1.0, 0.9], vec![2.0, 1.0]]).unwrap();
        let y = Target::Classes { labels: vec![0, 0, 1, 1], n_classes: 2 };
        let t = Tree::fit(&x, &y, &TreeParams::default(), None).unwrap();
        assert_eq!(t.importances, vec![0.0, 1.0]);
        let probe = Dataset::from_rows(&[vec![0.0, 0.49], vec![0.0, 0.51]]).unwrap();
        assert_eq!(t.leaf_value(&probe, 0), &[1.0, 0.0]);
        assert_eq!(t.leaf_value(&probe, 1), &[0.0, 1.0]);
    }

    #[test]
    fn depth_limit_and_constant_target() {
        let rows: Vec<Vec<f64>> = (0..64).map(|i| vec![i as f64]).collect();
        let x = Dataset::from_rows(&rows).unwrap();
        let y = Target::Values((0..64).map(|i| ((i * 37) % 11) as f64).collect());
        let p = TreeParams { max_depth: 3, ..TreeParams::default() };
        assert!(Tree::fit(&x, &y, &p, None).unwrap().depth() <= 3);
        let flat = Target::Values(vec![2.0; 64]);
        let t = Tree::fit(&x, &flat, &TreeParams::default(), None).unwrap();
        assert_eq!(t.n_leaves(), 1);
        assert_eq!(t.importances, vec![0.0]);
    }

    #[test]
    fn sorted_and_gathered_scans_agree() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| (0..5).map(|f| ((i * (f + 3) * 7919) % 31) as f64).collect())
            .collect();
        let x = Dataset::from_rows(&rows).unwrap();
        let y = Target::Values((0..30).map(|i| ((i * 13) % 7) as f64).collect());
        let full = Tree::fit(&x, &y, &TreeParams::default(), None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = TreeParams { max_features: Some(5), ..TreeParams::default() };
        let gathered = Tree::fit(&x, &y, &p, Some(&mut rng)).unwrap();
        assert_eq!(full, gathered);
    }
}
