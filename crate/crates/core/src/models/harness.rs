//! Subject-disjoint evaluation: stratified five-fold classification with
//! per-subject probability fusion, and leave-one-subject-out strength
//! regression. Normalization and feature selection are fitted inside each
//! fold on training rows only; test rows never reach either.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{classification_metrics, regression_metrics, ClassificationMetrics, RegressionMetrics};
use super::{Dataset, Learner, LearnerKind, Task};
use crate::error::{Error, Result};
use crate::recording::{Cohort, Routine};
use crate::selection::{select_features, task_target};
use crate::synth::{STRENGTH_MAX, STRENGTH_MIN};
use crate::table::{FeatureTable, ModalitySubset};
use crate::whole_features::ZScore;

pub const CLASSIFICATION_FOLDS: usize = 5;

/// Which walking tests feed a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Combo {
    #[serde(rename = "str")]
    Str,
    #[serde(rename = "rt")]
    Rt,
    #[serde(rename = "lt")]
    Lt,
    #[serde(rename = "rt+lt")]
    RtLt,
    #[serde(rename = "all")]
    All,
}

impl Combo {
    pub const ALL: [Combo; 5] = [Combo::Str, Combo::Rt, Combo::Lt, Combo::RtLt, Combo::All];

    pub fn token(self) -> &'static str {
        match self {
            Combo::Str => "str",
            Combo::Rt => "rt",
            Combo::Lt => "lt",
            Combo::RtLt => "rt+lt",
            Combo::All => "all",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Combo::Str => "Str",
            Combo::Rt => "RT",
            Combo::Lt => "LT",
            Combo::RtLt => "RT+LT",
            Combo::All => "All",
        }
    }

    pub fn routines(self) -> &'static [Routine] {
        match self {
            Combo::Str => &[Routine::Straight],
            Combo::Rt => &[Routine::RightTurning],
            Combo::Lt => &[Routine::LeftTurning],
            Combo::RtLt => &[Routine::RightTurning, Routine::LeftTurning],
            Combo::All => &Routine::ALL,
        }
    }
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Combo {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Combo::ALL
            .into_iter()
            .find(|c| c.token().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown combo `{s}` (expected str, rt, lt, rt+lt or all)")))
    }
}

/// Training/test split of one fold, as recorded in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub index: usize,
    pub train_subjects: Vec<String>,
    pub test_subjects: Vec<String>,
    pub train_rows: usize,
    pub selected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectPrediction {
    pub subject_id: String,
    pub cohort: Cohort,
    pub fold: usize,
    pub truth: Option<f64>,
    /// Patient probability of each test (classification) or clamped strength
    /// of each test (regression), in routine order.
    pub per_test: Vec<f64>,
    pub patient_score: Option<f64>,
    pub healthy_score: Option<f64>,
    pub predicted_cohort: Option<Cohort>,
    pub predicted_strength: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub combo: Combo,
    pub selector: Option<LearnerKind>,
    pub learner: LearnerKind,
    pub modality: ModalitySubset,
    pub seed: u64,
    pub n_subjects: usize,
    pub tests_per_subject: usize,
    pub n_samples: usize,
    pub excluded_subjects: Vec<String>,
    pub folds: Vec<FoldRecord>,
    pub predictions: Vec<SubjectPrediction>,
    pub classification: Option<ClassificationMetrics>,
    pub regression: Option<RegressionMetrics>,
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per subject for external plotting.
    pub fn write_predictions_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "subject_id",
            "cohort",
            "fold",
            "truth",
            "patient_score",
            "healthy_score",
            "predicted_cohort",
            "predicted_strength",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for p in &self.predictions {
            w.write_record([
                p.subject_id.clone(),
                p.cohort.token().to_string(),
                p.fold.to_string(),
                opt(p.truth),
                opt(p.patient_score),
                opt(p.healthy_score),
                p.predicted_cohort.map(|c| c.token().to_string()).unwrap_or_default(),
                opt(p.predicted_strength),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// How each fold picks its features.
#[derive(Debug, Clone)]
pub enum FeaturePlan {
    /// Embedded selection with the given selector on the fold's training rows.
    Select(LearnerKind),
    /// Fixed column indices.
    Fixed(Vec<usize>),
}

/// Rows of `table` for tests in `combo`, dropping subjects that miss any of
/// its routines. Returns the filtered table and the dropped subjects.
pub fn combo_rows(table: &FeatureTable, combo: Combo) -> (FeatureTable, Vec<String>) {
    let wanted = combo.routines();
    let mut have: BTreeMap<&str, BTreeSet<Routine>> = BTreeMap::new();
    for r in &table.rows {
        if wanted.contains(&r.routine) {
            have.entry(&r.subject_id).or_default().insert(r.routine);
        }
    }
    let mut excluded = Vec::new();
    for s in table.subjects() {
        if have.get(s.as_str()).is_none_or(|h| h.len() != wanted.len()) {
            log::warn!("subject {s} lacks a routine of combo {combo}; excluded");
            excluded.push(s);
        }
    }
    let filtered = table.filter_rows(|r| wanted.contains(&r.routine) && !excluded.contains(&r.subject_id));
    (filtered, excluded)
}

/// Deals shuffled subjects into `k` groups. With labels, each class is
/// shuffled and dealt in turn so every group mirrors the class balance.
pub fn deal_subjects(subjects: &[(String, usize)], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<String>> {
    let mut by_class: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (s, c) in subjects {
        by_class.entry(*c).or_default().push(s.clone());
    }
    let mut groups = vec![Vec::new(); k];
    let mut slot = 0;
    for (_, mut members) in by_class {
        members.sort();
        members.shuffle(rng);
        for m in members {
            groups[slot % k].push(m);
            slot += 1;
        }
    }
    groups.iter_mut().for_each(|g| g.sort());
    groups
}

/// Subject id with its stratification class (patients first).
pub fn subject_classes(table: &FeatureTable) -> Vec<(String, usize)> {
    let mut seen = BTreeMap::new();
    for r in &table.rows {
        seen.entry(r.subject_id.clone())
            .or_insert(usize::from(r.cohort == Cohort::Healthy));
    }
    seen.into_iter().collect()
}

fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn clamp_strength(x: f64) -> f64 {
    x.clamp(STRENGTH_MIN, STRENGTH_MAX)
}

/// Runs every fold: `test_groups[i]` holds the held-out subjects of fold i.
pub fn run_folds(
    table: &FeatureTable,
    test_groups: &[Vec<String>],
    task: Task,
    plan: &FeaturePlan,
    learner: LearnerKind,
    seed: u64,
) -> Result<(Vec<FoldRecord>, Vec<SubjectPrediction>)> {
    let mut folds = Vec::with_capacity(test_groups.len());
    let mut predictions = Vec::new();
    for (index, test_subjects) in test_groups.iter().enumerate() {
        let held: BTreeSet<&str> = test_subjects.iter().map(String::as_str).collect();
        let (train_idx, test_idx): (Vec<usize>, Vec<usize>) =
            (0..table.rows.len()).partition(|&i| !held.contains(table.rows[i].subject_id.as_str()));
        if train_idx.is_empty() || test_idx.is_empty() {
            return Err(Error::Degenerate(format!("fold {index} has an empty side")));
        }
        let fs = fold_seed(seed, index);
        let train = table.subset(&train_idx);
        let test = table.subset(&test_idx);

        let (train_x, test_x, selected) = match plan {
            FeaturePlan::Fixed(cols) => {
                let (train, test) = (train.select_columns(cols), test.select_columns(cols));
                let z = ZScore::fit(&train)?;
                let names = train.names.clone();
                (z.apply(&train)?, z.apply(&test)?, names)
            }
            FeaturePlan::Select(selector) => {
                let z = ZScore::fit(&train)?;
                let train_z = z.apply(&train)?;
                let sel = select_features(&train_z, task, *selector, fs)?;
                let train_x = train_z.select_named(&sel.selected)?;
                // the fitted transform is sliced to the selected columns
                let cols: Vec<usize> = sel
                    .selected
                    .iter()
                    .map(|n| train.feature_index(n).expect("selected from this table"))
                    .collect();
                let z_sel = ZScore {
                    means: cols.iter().map(|&c| z.means[c]).collect(),
                    sds: cols.iter().map(|&c| z.sds[c]).collect(),
                };
                let test_x = z_sel.apply(&test.select_columns(&cols))?;
                (train_x, test_x, sel.selected)
            }
        };

        let mut model = Learner::new(learner, task, fs)?;
        model.fit(&Dataset::from_table(&train_x), &task_target(&train_x, task)?)?;
        let xt = Dataset::from_table(&test_x);
        let per_row: Vec<f64> = match task {
            Task::Classify => model
                .predict_proba(&xt)?
                .into_iter()
                .map(|p| p[1])
                .collect(),
            Task::Regress => model.predict(&xt)?.into_iter().map(clamp_strength).collect(),
        };

        let mut train_subjects: Vec<String> = train.subjects();
        train_subjects.sort();
        folds.push(FoldRecord {
            index,
            train_subjects,
            test_subjects: test.subjects(),
            train_rows: train.rows.len(),
            selected,
        });

        for s in test.subjects() {
            let rows: Vec<usize> = (0..test.rows.len()).filter(|&i| test.rows[i].subject_id == s).collect();
            let first = &test.rows[rows[0]];
            let per_test: Vec<f64> = rows.iter().map(|&i| per_row[i]).collect();
            let mut pred = SubjectPrediction {
                subject_id: s.clone(),
                cohort: first.cohort,
                fold: index,
                truth: first.truth,
                per_test: per_test.clone(),
                patient_score: None,
                healthy_score: None,
                predicted_cohort: None,
                predicted_strength: None,
            };
            match task {
                Task::Classify => {
                    let patient: f64 = per_test.iter().sum();
                    let healthy: f64 = per_test.iter().map(|p| 1.0 - p).sum();
                    pred.patient_score = Some(patient);
                    pred.healthy_score = Some(healthy);
                    pred.predicted_cohort = Some(fuse_decision(patient, healthy));
                }
                Task::Regress => {
                    pred.predicted_strength = Some(per_test.iter().sum::<f64>() / per_test.len() as f64);
                }
            }
            predictions.push(pred);
        }
    }
    predictions.sort_by(|a, b| a.subject_id.cmp(&b.subject_id));
    Ok((folds, predictions))
}

/// Summed per-test probabilities decide; a tie counts as a patient.
pub fn fuse_decision(patient_score: f64, healthy_score: f64) -> Cohort {
    if patient_score >= healthy_score {
        Cohort::Patient
    } else {
        Cohort::Healthy
    }
}

fn metrics_for(task: Task, preds: &[SubjectPrediction]) -> Result<(Option<ClassificationMetrics>, Option<RegressionMetrics>)> {
    Ok(match task {
        Task::Classify => {
            let truth: Vec<bool> = preds.iter().map(|p| p.cohort == Cohort::Patient).collect();
            let guess: Vec<bool> = preds.iter().map(|p| p.predicted_cohort == Some(Cohort::Patient)).collect();
            (Some(classification_metrics(&truth, &guess)?), None)
        }
        Task::Regress => {
            let truth: Vec<f64> = preds.iter().map(|p| p.truth.unwrap_or(f64::NAN)).collect();
            let guess: Vec<f64> = preds.iter().map(|p| p.predicted_strength.unwrap_or(f64::NAN)).collect();
            (None, Some(regression_metrics(&guess, &truth)?))
        }
    })
}

/// Patient-versus-healthy classification over the tests in `combo`.
pub fn classify_subjects(
    table: &FeatureTable,
    combo: Combo,
    plan: &FeaturePlan,
    classifier: LearnerKind,
    seed: u64,
) -> Result<EvalReport> {
    let (rows, excluded) = combo_rows(table, combo);
    let subjects = subject_classes(&rows);
    if subjects.len() < CLASSIFICATION_FOLDS {
        return Err(Error::TooShort(format!(
            "{} subjects cannot fill {CLASSIFICATION_FOLDS} folds",
            subjects.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = deal_subjects(&subjects, CLASSIFICATION_FOLDS, &mut rng);
    let (folds, predictions) = run_folds(&rows, &groups, Task::Classify, plan, classifier, seed)?;
    let (classification, _) = metrics_for(Task::Classify, &predictions)?;
    Ok(EvalReport {
        task: Task::Classify,
        combo,
        selector: selector_of(plan),
        learner: classifier,
        modality: ModalitySubset::All,
        seed,
        n_subjects: subjects.len(),
        tests_per_subject: combo.routines().len(),
        n_samples: rows.rows.len(),
        excluded_subjects: excluded,
        folds,
        predictions,
        classification,
        regression: None,
    })
}

/// Leave-one-subject-out strength regression over patients.
pub fn regress_strength(
    table: &FeatureTable,
    combo: Combo,
    plan: &FeaturePlan,
    regressor: LearnerKind,
    seed: u64,
) -> Result<EvalReport> {
    let patients = table.filter_rows(|r| r.cohort == Cohort::Patient && r.truth.is_some());
    let (rows, excluded) = combo_rows(&patients, combo);
    let subjects = rows.subjects();
    if subjects.len() < 2 {
        return Err(Error::TooShort(format!(
            "leave-one-out regression needs at least 2 patients, got {}",
            subjects.len()
        )));
    }
    let groups: Vec<Vec<String>> = subjects.iter().map(|s| vec![s.clone()]).collect();
    let (folds, predictions) = run_folds(&rows, &groups, Task::Regress, plan, regressor, seed)?;
    let (_, regression) = metrics_for(Task::Regress, &predictions)?;
    Ok(EvalReport {
        task: Task::Regress,
        combo,
        selector: selector_of(plan),
        learner: regressor,
        modality: ModalitySubset::All,
        seed,
        n_subjects: subjects.len(),
        tests_per_subject: combo.routines().len(),
        n_samples: rows.rows.len(),
        excluded_subjects: excluded,
        folds,
        predictions,
        classification: None,
        regression,
    })
}

fn selector_of(plan: &FeaturePlan) -> Option<LearnerKind> {
    match plan {
        FeaturePlan::Select(k) => Some(*k),
        FeaturePlan::Fixed(_) => None,
    }
}

/// Reruns classification on each modality subset of the feature table.
pub fn modality_ablation(
    table: &FeatureTable,
    subsets: &[ModalitySubset],
    combo: Combo,
    selector: LearnerKind,
    classifier: LearnerKind,
    seed: u64,
) -> Result<Vec<EvalReport>> {
    subsets
        .iter()
        .map(|&m| {
            let sub = table.modality_subset(m)?;
            let mut report = classify_subjects(&sub, combo, &FeaturePlan::Select(selector), classifier, seed)?;
            report.modality = m;
            Ok(report)
        })
        .collect()
}
