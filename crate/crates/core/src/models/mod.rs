//! Learners behind one interface, metrics, and the cross-validation harness.

pub mod forest;
pub mod harness;
pub mod knn;
pub mod linear;
pub mod metrics;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::FeatureTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classify,
    Regress,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LearnerKind {
    #[serde(rename = "dt")]
    DecisionTree,
    #[serde(rename = "rf")]
    RandomForest,
    #[serde(rename = "knn")]
    Knn,
    #[serde(rename = "logreg")]
    LogisticReg,
    #[serde(rename = "linreg")]
    LinearRegSgd,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 5] = [
        LearnerKind::DecisionTree,
        LearnerKind::RandomForest,
        LearnerKind::Knn,
        LearnerKind::LogisticReg,
        LearnerKind::LinearRegSgd,
    ];

    pub fn token(self) -> &'static str {
        match self {
            LearnerKind::DecisionTree => "dt",
            LearnerKind::RandomForest => "rf",
            LearnerKind::Knn => "knn",
            LearnerKind::LogisticReg => "logreg",
            LearnerKind::LinearRegSgd => "linreg",
        }
    }

    pub fn supports(self, task: Task) -> bool {
        !matches!(
            (self, task),
            (LearnerKind::LogisticReg, Task::Regress) | (LearnerKind::LinearRegSgd, Task::Classify)
        )
    }

    /// Whether fitted models expose per-feature importances.
    pub fn has_importances(self) -> bool {
        self != LearnerKind::Knn
    }
}

impl Task {
    pub fn token(self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Regress => "regress",
        }
    }
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "classify" => Ok(Task::Classify),
            "regress" => Ok(Task::Regress),
            _ => Err(Error::Config(format!("unknown task `{s}` (expected classify or regress)"))),
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.token().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown learner `{s}` (expected dt, rf, knn, logreg or linreg)")))
    }
}

/// Dense column-major design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Dataset {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = vec![0.0; n_rows * n_cols];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::Schema(format!("row {r} has {} values, expected {n_cols}", row.len())));
            }
            for (c, &v) in row.iter().enumerate() {
                data[c * n_rows + r] = v;
            }
        }
        Ok(Self { n_rows, n_cols, data })
    }

    pub fn from_table(table: &FeatureTable) -> Self {
        let n_rows = table.rows.len();
        let n_cols = table.names.len();
        let mut data = vec![0.0; n_rows * n_cols];
        for (r, row) in table.rows.iter().enumerate() {
            for (c, &v) in row.values.iter().enumerate() {
                data[c * n_rows + r] = v;
            }
        }
        Self { n_rows, n_cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn column(&self, c: usize) -> &[f64] {
        &self.data[c * self.n_rows..(c + 1) * self.n_rows]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[c * self.n_rows + r]
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        (0..self.n_cols).map(|c| self.get(r, c)).collect()
    }
}

/// Training targets.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Classes { labels: Vec<usize>, n_classes: usize },
    Values(Vec<f64>),
}

impl Target {
    pub fn len(&self) -> usize {
        match self {
            Target::Classes { labels, .. } => labels.len(),
            Target::Values(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn task(&self) -> Task {
        match self {
            Target::Classes { .. } => Task::Classify,
            Target::Values(_) => Task::Regress,
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Target::Classes { n_classes, .. } => *n_classes,
            Target::Values(_) => 0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Target::Classes { labels, n_classes } => {
                if let Some(&bad) = labels.iter().find(|&&l| l >= *n_classes) {
                    return Err(Error::Domain(format!("label {bad} outside 0..{n_classes}")));
                }
            }
            Target::Values(v) => {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Domain("non-finite regression target".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Fitted {
    Tree(tree::Tree),
    Forest(forest::Forest),
    Knn(knn::Knn),
    Logistic(linear::Logistic),
    Linear(linear::LinearSgd),
}

/// A learner of one kind for one task. `fit` must precede prediction.
#[derive(Debug, Clone)]
pub struct Learner {
    kind: LearnerKind,
    task: Task,
    seed: u64,
    n_features: usize,
    fitted: Option<Fitted>,
}

impl Learner {
    pub fn new(kind: LearnerKind, task: Task, seed: u64) -> Result<Self> {
        if !kind.supports(task) {
            return Err(Error::Config(format!("learner {kind} cannot be used for {task:?}")));
        }
        Ok(Self {
            kind,
            task,
            seed,
            n_features: 0,
            fitted: None,
        })
    }

    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    pub fn fit(&mut self, x: &Dataset, y: &Target) -> Result<()> {
        if y.task() != self.task {
            return Err(Error::Config(format!("{:?} learner given {:?} targets", self.task, y.task())));
        }
        if x.n_rows() != y.len() || x.n_rows() == 0 {
            return Err(Error::Schema(format!("{} rows but {} targets", x.n_rows(), y.len())));
        }
        if x.n_cols() == 0 {
            return Err(Error::Schema("no features to fit on".into()));
        }
        y.validate()?;
        let fitted = match self.kind {
            LearnerKind::DecisionTree => Fitted::Tree(tree::Tree::fit(x, y, &tree::TreeParams::default(), None)?),
            LearnerKind::RandomForest => Fitted::Forest(forest::Forest::fit(x, y, &forest::ForestParams::default(), self.seed)?),
            LearnerKind::Knn => Fitted::Knn(knn::Knn::fit(x, y, knn::DEFAULT_K)),
            LearnerKind::LogisticReg => Fitted::Logistic(linear::Logistic::fit(x, y)?),
            LearnerKind::LinearRegSgd => Fitted::Linear(linear::LinearSgd::fit(x, y, self.seed)?),
        };
        self.n_features = x.n_cols();
        self.fitted = Some(fitted);
        Ok(())
    }

    fn check(&self, x: &Dataset) -> Result<&Fitted> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        if x.n_cols() != self.n_features {
            return Err(Error::Schema(format!(
                "model fitted on {} features, got {}",
                self.n_features,
                x.n_cols()
            )));
        }
        Ok(f)
    }

    /// Class probabilities per row; each row sums to one.
    pub fn predict_proba(&self, x: &Dataset) -> Result<Vec<Vec<f64>>> {
        if self.task != Task::Classify {
            return Err(Error::Config("class probabilities need a classifier".into()));
        }
        Ok(match self.check(x)? {
            Fitted::Tree(t) => (0..x.n_rows()).map(|r| t.leaf_value(x, r).to_vec()).collect(),
            Fitted::Forest(f) => f.predict_raw(x),
            Fitted::Knn(k) => k.predict_raw(x),
            Fitted::Logistic(l) => l.predict_proba(x),
            Fitted::Linear(_) => unreachable!("rejected in Learner::new"),
        })
    }

    /// Regression values, or the most probable class index for classifiers
    /// (lowest index on ties).
    pub fn predict(&self, x: &Dataset) -> Result<Vec<f64>> {
        if self.task == Task::Classify {
            let proba = self.predict_proba(x)?;
            return Ok(proba.iter().map(|p| argmax(p) as f64).collect());
        }
        Ok(match self.check(x)? {
            Fitted::Tree(t) => (0..x.n_rows()).map(|r| t.leaf_value(x, r)[0]).collect(),
            Fitted::Forest(f) => f.predict_raw(x).into_iter().map(|v| v[0]).collect(),
            Fitted::Knn(k) => k.predict_raw(x).into_iter().map(|v| v[0]).collect(),
            Fitted::Linear(l) => l.predict(x),
            Fitted::Logistic(_) => unreachable!("rejected in Learner::new"),
        })
    }

    /// Per-feature importances: normalized impurity decrease for trees and
    /// forests, absolute coefficients for linear models.
    pub fn importances(&self) -> Result<Vec<f64>> {
        match self.fitted.as_ref().ok_or(Error::NotFitted)? {
            Fitted::Tree(t) => Ok(t.importances.clone()),
            Fitted::Forest(f) => Ok(f.importances.clone()),
            Fitted::Logistic(l) => Ok(l.weights.iter().map(|w| w.abs()).collect()),
            Fitted::Linear(l) => Ok(l.weights.iter().map(|w| w.abs()).collect()),
            Fitted::Knn(_) => Err(Error::Config("knn exposes no feature importances".into())),
        }
    }
}

pub(crate) fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = i;
        }
    }
    best
}
