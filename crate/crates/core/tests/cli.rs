//! Runs the `smartgait` binary end to end on a small cohort.

use std::path::Path;
use std::process::{Command, Output};

use smartgait::models::harness::{Combo, EvalReport};
use smartgait::models::{LearnerKind, Task};
use smartgait::report::{eval_stem, selection_file};
use smartgait::selection::SelectionResult;
use smartgait::table::{FeatureTable, ModalitySubset};

fn smartgait(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smartgait")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = smartgait(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn report(dir: &Path, task: Task, learner: LearnerKind) -> EvalReport {
    let name = format!("{}.json", eval_stem(task, Combo::Rt, learner, ModalitySubset::All));
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn missing_inputs_fail_with_a_hint() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().to_str().unwrap();
    for (args, hint) in [
        (vec!["classify", "--input", w], "smartgait extract"),
        (vec!["extract", "--input", w, "--out", w], "smartgait synth"),
        (vec!["report", "--input", w], ""),
    ] {
        let out = smartgait(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("error:") && err.contains(hint), "{args:?}: {err}");
    }
    let out = smartgait(&["classify", "--input", w, "--combo", "sideways"]);
    assert!(!out.status.success());
}

#[test]
fn small_cohort_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().to_str().unwrap();
    let recs = dir.path().join("recordings");
    let recs = recs.to_str().unwrap();
    ok(&["synth", "--patients", "4", "--healthy", "4", "--seed", "3", "--duration", "12", "--out", recs]);
    let gaitrecs = std::fs::read_dir(recs)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "gaitrec"))
        .count();
    assert_eq!(gaitrecs, 24);

    ok(&["extract", "--input", recs, "--out", w, "--segmentation-dump"]);
    let table = FeatureTable::load(&dir.path().join("features.csv")).unwrap();
    assert_eq!(table.rows.len(), 24);
    assert!(dir.path().join("labels.csv").exists());
    assert!(dir.path().join("segmentation.csv").exists());

    let stdout = ok(&["classify", "--input", w, "--learner", "dt"]);
    assert!(!stdout.is_empty());
    let c = report(dir.path(), Task::Classify, LearnerKind::DecisionTree);
    assert_eq!(c.n_subjects, 8);
    assert_eq!(c.n_samples, 8);
    assert_eq!(c.predictions.len(), 8);
    assert_eq!(c.folds.len(), 5);

    ok(&["select", "--input", w, "--task", "regress"]);
    let sel = SelectionResult::load(&dir.path().join(selection_file(Task::Regress))).unwrap();
    assert!(!sel.selected.is_empty());
    ok(&["regress", "--input", w, "--use-selection"]);
    let r = report(dir.path(), Task::Regress, LearnerKind::RandomForest);
    assert_eq!(r.n_subjects, 4);
    assert!(r.folds.iter().all(|f| f.selected == sel.selected && f.test_subjects.len() == 1));
    let m = r.regression.unwrap();
    assert!(m.mae <= m.rmse && m.rmse <= m.me);

    ok(&["report", "--input", w]);
    let md = std::fs::read_to_string(dir.path().join("report.md")).unwrap();
    assert!(md.contains("| Combo | Selector | Classifier | N_sample |"), "{md}");
    assert!(md.contains("MAE"));
}
