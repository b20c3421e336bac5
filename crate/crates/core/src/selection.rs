//! Embedded feature selection and forward search.
//!
//! Importances come from fitting a selector on five leave-one-portion-out
//! subsets of the training subjects. Features are then taken in descending
//! mean importance, skipping any that correlate at |r| >= 0.9 with one
//! already chosen, up to ten.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::harness::{deal_subjects, run_folds, subject_classes, FeaturePlan, CLASSIFICATION_FOLDS};
use crate::models::metrics::{classification_metrics, regression_metrics};
use crate::models::{Dataset, Learner, LearnerKind, Target, Task};
use crate::recording::Cohort;
use crate::stats::pearson;
use crate::table::FeatureTable;

pub const SELECT_CAP: usize = 10;
pub const CORRELATION_LIMIT: f64 = 0.9;
pub const PORTIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub name: String,
    pub importance: f64,
}

/// Selection manifest: ranking plus the chosen features in pick order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selector: LearnerKind,
    pub task: Task,
    pub seed: u64,
    /// Features with non-zero mean importance, most important first.
    pub ranked: Vec<RankedFeature>,
    pub selected: Vec<String>,
    /// Forward-search ledger over the top of the ranking, when one was run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forward: Vec<ForwardStep>,
}

impl SelectionResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: SelectionResult = serde_json::from_str(text)?;
        if r.selected.len() > SELECT_CAP {
            return Err(Error::Schema(format!("manifest selects {} features, cap is {SELECT_CAP}", r.selected.len())));
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = r.selected.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::Schema(format!("feature `{dup}` selected twice")));
        }
        Ok(r)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|_| Error::MissingInput {
            path: path.to_path_buf(),
            hint: "run `smartgait select` first to write the selection manifest".into(),
        })?;
        SelectionResult::from_json(&text)
    }
}

/// Class labels (patient = 1) or strength targets for every row.
pub fn task_target(table: &FeatureTable, task: Task) -> Result<Target> {
    match task {
        Task::Classify => Ok(Target::Classes {
            labels: table
                .rows
                .iter()
                .map(|r| usize::from(r.cohort == Cohort::Patient))
                .collect(),
            n_classes: 2,
        }),
        Task::Regress => table
            .rows
            .iter()
            .map(|r| {
                r.truth
                    .ok_or_else(|| Error::Schema(format!("row of {} has no strength truth", r.subject_id)))
            })
            .collect::<Result<Vec<_>>>()
            .map(Target::Values),
    }
}

fn portions(table: &FeatureTable, task: Task, seed: u64) -> Result<Vec<Vec<String>>> {
    let subjects = match task {
        Task::Classify => subject_classes(table),
        Task::Regress => table.subjects().into_iter().map(|s| (s, 0)).collect(),
    };
    if subjects.len() < 2 {
        return Err(Error::TooShort(format!("selection needs 2 subjects, got {}", subjects.len())));
    }
    let k = PORTIONS.min(subjects.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..2 {
        let groups = deal_subjects(&subjects, k, &mut rng);
        let ok = task == Task::Regress
            || groups.iter().all(|held| {
                let classes: std::collections::BTreeSet<usize> = subjects
                    .iter()
                    .filter(|(s, _)| !held.contains(s))
                    .map(|&(_, c)| c)
                    .collect();
                classes.len() > 1
            });
        if ok {
            return Ok(groups);
        }
        log::debug!("portion draw {attempt} left a single class; reshuffling");
    }
    Err(Error::Degenerate("every portion split leaves a single class in training".into()))
}

/// Mean importance over five leave-one-portion-out fits, ranked
/// descending with ties broken by name. Zero-importance features are
/// dropped.
pub fn embedded_importance(
    table: &FeatureTable,
    task: Task,
    selector: LearnerKind,
    seed: u64,
) -> Result<Vec<RankedFeature>> {
    if !selector.has_importances() {
        return Err(Error::Config(format!("{selector} cannot rank features")));
    }
    let groups = portions(table, task, seed)?;
    let mut total = vec![0.0; table.n_features()];
    for (k, held) in groups.iter().enumerate() {
        let keep: Vec<usize> = (0..table.rows.len())
            .filter(|&i| !held.contains(&table.rows[i].subject_id))
            .collect();
        let part = table.subset(&keep);
        let mut model = Learner::new(selector, task, seed.wrapping_add(k as u64))?;
        model.fit(&Dataset::from_table(&part), &task_target(&part, task)?)?;
        for (t, v) in total.iter_mut().zip(model.importances()?) {
            *t += v;
        }
    }
    let n = groups.len() as f64;
    let mut ranked: Vec<RankedFeature> = total
        .into_iter()
        .enumerate()
        .filter(|&(_, v)| v > 0.0)
        .map(|(i, v)| RankedFeature {
            name: table.names[i].clone(),
            importance: v / n,
        })
        .collect();
    ranked.sort_by(|a, b| b.importance.total_cmp(&a.importance).then_with(|| a.name.cmp(&b.name)));
    Ok(ranked)
}

/// Greedy pick in rank order; a candidate joins only if |r| stays below the
/// limit against every feature already picked.
pub fn dedup_select(ranked: &[RankedFeature], table: &FeatureTable, cap: usize) -> Result<Vec<String>> {
    if ranked.is_empty() {
        return Err(Error::Degenerate("no feature received any importance".into()));
    }
    let mut chosen: Vec<(String, Vec<f64>)> = Vec::with_capacity(cap);
    for f in ranked {
        if chosen.len() >= cap {
            break;
        }
        let idx = table
            .feature_index(&f.name)
            .ok_or_else(|| Error::Schema(format!("ranked feature `{}` not in table", f.name)))?;
        let col = table.column(idx);
        if chosen.iter().all(|(_, c)| pearson(c, &col).abs() < CORRELATION_LIMIT) {
            chosen.push((f.name.clone(), col));
        }
    }
    Ok(chosen.into_iter().map(|(n, _)| n).collect())
}

pub fn select_features(table: &FeatureTable, task: Task, selector: LearnerKind, seed: u64) -> Result<SelectionResult> {
    let ranked = embedded_importance(table, task, selector, seed)?;
    let selected = dedup_select(&ranked, table, SELECT_CAP)?;
    Ok(SelectionResult {
        selector,
        task,
        seed,
        ranked,
        selected,
        forward: Vec::new(),
    })
}

/// One row of the forward-search ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardStep {
    pub size: usize,
    pub feature: String,
    pub mae: Option<f64>,
    pub rmse: Option<f64>,
    pub me: Option<f64>,
    pub f1: Option<f64>,
}

impl ForwardStep {
    fn better_than(&self, other: &ForwardStep) -> bool {
        match (self.mae, other.mae) {
            (Some(a), Some(b)) => a < b,
            _ => self.f1.unwrap_or(0.0) > other.f1.unwrap_or(0.0),
        }
    }
}

fn score(table: &FeatureTable, cols: &[usize], task: Task, learner: LearnerKind, seed: u64) -> Result<(Option<f64>, Option<f64>, Option<f64>, Option<f64>)> {
    let plan = FeaturePlan::Fixed(cols.to_vec());
    match task {
        Task::Regress => {
            let groups: Vec<Vec<String>> = table.subjects().into_iter().map(|s| vec![s]).collect();
            let (_, preds) = run_folds(table, &groups, task, &plan, learner, seed)?;
            let p: Vec<f64> = preds.iter().filter_map(|p| p.predicted_strength).collect();
            let t: Vec<f64> = preds.iter().filter_map(|p| p.truth).collect();
            let m = regression_metrics(&p, &t)?;
            Ok((Some(m.mae), Some(m.rmse), Some(m.me), None))
        }
        Task::Classify => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let groups = deal_subjects(&subject_classes(table), CLASSIFICATION_FOLDS, &mut rng);
            let (_, preds) = run_folds(table, &groups, task, &plan, learner, seed)?;
            let t: Vec<bool> = preds.iter().map(|p| p.cohort == Cohort::Patient).collect();
            let g: Vec<bool> = preds.iter().map(|p| p.predicted_cohort == Some(Cohort::Patient)).collect();
            Ok((None, None, None, Some(classification_metrics(&t, &g)?.f1)))
        }
    }
}

/// Grows a feature set one candidate at a time, each time adding the
/// candidate with the lowest leave-one-out MAE (regression) or the highest
/// five-fold F1 (classification). Ties keep the earlier candidate.
pub fn forward_search(
    table: &FeatureTable,
    candidates: &[String],
    task: Task,
    learner: LearnerKind,
    seed: u64,
    max_size: Option<usize>,
) -> Result<Vec<ForwardStep>> {
    if candidates.is_empty() {
        return Err(Error::Domain("forward search needs at least one candidate".into()));
    }
    let idx = candidates
        .iter()
        .map(|n| table.feature_index(n).ok_or_else(|| Error::Schema(format!("candidate `{n}` not in table"))))
        .collect::<Result<Vec<_>>>()?;
    let limit = max_size.unwrap_or(idx.len()).min(idx.len());
    let mut chosen: Vec<usize> = Vec::new();
    let mut ledger = Vec::with_capacity(limit);
    while ledger.len() < limit {
        let mut best: Option<(usize, ForwardStep)> = None;
        for (k, &c) in idx.iter().enumerate() {
            if chosen.contains(&c) {
                continue;
            }
            let mut cols = chosen.clone();
            cols.push(c);
            let (mae, rmse, me, f1) = score(table, &cols, task, learner, seed)?;
            let step = ForwardStep {
                size: cols.len(),
                feature: candidates[k].clone(),
                mae,
                rmse,
                me,
                f1,
            };
            if best.as_ref().is_none_or(|(_, b)| step.better_than(b)) {
                best = Some((c, step));
            }
        }
        let (c, step) = best.expect("an unused candidate remains");
        log::info!("forward search size {}: {}", step.size, step.feature);
        chosen.push(c);
        ledger.push(step);
    }
    Ok(ledger)
}

/// Table-style ledger: `feature,MAE,RMSE,ME` (or `feature,F1`).
pub fn write_forward_csv<W: std::io::Write>(ledger: &[ForwardStep], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let regression = ledger.first().is_some_and(|s| s.mae.is_some());
    if regression {
        w.write_record(["size", "feature", "MAE", "RMSE", "ME"])?;
    } else {
        w.write_record(["size", "feature", "F1"])?;
    }
    let f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for s in ledger {
        if regression {
            w.write_record([s.size.to_string(), s.feature.clone(), f(s.mae), f(s.rmse), f(s.me)])?;
        } else {
            w.write_record([s.size.to_string(), s.feature.clone(), f(s.f1)])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recording::Routine;
    use crate::table::FeatureRow;

    fn table(cols: Vec<(&str, Vec<f64>)>, labels: &[bool]) -> FeatureTable {
        let mut t = FeatureTable::new(cols.iter().map(|(n, _)| n.to_string()).collect());
        for (i, &p) in labels.iter().enumerate() {
            t.push(FeatureRow {
                subject_id: format!("S{i:02}"),
                routine: Routine::Straight,
                cohort: if p { Cohort::Patient } else { Cohort::Healthy },
                truth: p.then_some(3.0 + i as f64 * 0.05),
                values: cols.iter().map(|(_, c)| c[i]).collect(),
            })
            .unwrap();
        }
        t
    }

    fn noise(i: usize, k: usize) -> f64 {
        (((i * 2654435761 + k * 40503) % 1000) as f64) / 1000.0
    }

    #[test]
    fn label_copy_ranks_first() {
        let labels: Vec<bool> = (0..30).map(|i| i % 3 != 0).collect();
        let t = table(
            vec![
                ("N1", (0..30).map(|i| noise(i, 1)).collect()),
                ("A", labels.iter().map(|&p| f64::from(u8::from(p))).collect()),
                ("N2", (0..30).map(|i| noise(i, 2)).collect()),
            ],
            &labels,
        );
        let ranked = embedded_importance(&t, Task::Classify, LearnerKind::DecisionTree, 3).unwrap();
        assert_eq!(ranked[0].name, "A");
        let again = embedded_importance(&t, Task::Classify, LearnerKind::DecisionTree, 3).unwrap();
        assert_eq!(ranked, again);
    }

    #[test]
    fn duplicate_column_is_rejected() {
        let labels: Vec<bool> = (0..20).map(|i| i < 10).collect();
        let a: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let t = table(vec![("A", a.clone()), ("A2", a), ("B", (0..20).map(|i| noise(i, 5)).collect())], &labels);
        let ranked = vec![
            RankedFeature { name: "A".into(), importance: 0.5 },
            RankedFeature { name: "A2".into(), importance: 0.4 },
            RankedFeature { name: "B".into(), importance: 0.1 },
        ];
        assert_eq!(dedup_select(&ranked, &t, 10).unwrap(), vec!["A", "B"]);
        assert_eq!(dedup_select(&ranked, &t, 1).unwrap(), vec!["A"]);
        assert!(dedup_select(&[], &t, 10).is_err());
    }

    #[test]
    fn knn_cannot_select() {
        let labels: Vec<bool> = (0..10).map(|i| i < 5).collect();
        let t = table(vec![("A", (0..10).map(|i| i as f64).collect())], &labels);
        assert!(embedded_importance(&t, Task::Classify, LearnerKind::Knn, 0).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let r = SelectionResult {
            selector: LearnerKind::DecisionTree,
            task: Task::Regress,
            seed: 3,
            ranked: vec![RankedFeature { name: "A".into(), importance: 0.25 }],
            selected: vec!["A".into()],
            forward: vec![ForwardStep {
                size: 1,
                feature: "A".into(),
                mae: Some(0.2),
                rmse: Some(0.25),
                me: Some(0.5),
                f1: None,
            }],
        };
        assert_eq!(SelectionResult::from_json(&r.to_json().unwrap()).unwrap(), r);
        let dup = r.to_json().unwrap().replace("\"selected\": [\n    \"A\"", "\"selected\": [\n    \"A\", \"A\"");
        assert!(SelectionResult::from_json(&dup).is_err());
    }

    #[test]
    fn forward_search_single_candidate() {
        let labels = vec![true; 12];
        let t = table(vec![("A", (0..12).map(|i| i as f64).collect()), ("B", vec![0.0; 12])], &labels);
        let ledger = forward_search(&t, &["A".into()], Task::Regress, LearnerKind::DecisionTree, 0, None).unwrap();
        assert_eq!(ledger.len(), 1);
        assert_eq!(ledger[0].feature, "A");
        assert!(forward_search(&t, &[], Task::Regress, LearnerKind::DecisionTree, 0, None).is_err());
    }
}
