//! Work-directory layout, plus the Markdown summary and plot-data CSVs
//! assembled from whatever run artifacts are present.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::models::harness::{Combo, EvalReport};
use crate::models::metrics::{regression_metrics, RegressionMetrics};
use crate::models::{LearnerKind, Task};
use crate::pipeline::read_labels_csv;
use crate::recording::SubjectLabel;
use crate::selection::{write_forward_csv, SelectionResult};
use crate::table::ModalitySubset;

pub const FEATURES_FILE: &str = "features.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const SEGMENTATION_FILE: &str = "segmentation.csv";
pub const REPORT_FILE: &str = "report.md";

pub fn task_token(task: Task) -> &'static str {
    task.token()
}

pub fn selection_file(task: Task) -> String {
    format!("selection_{}.json", task_token(task))
}

pub fn forward_file(task: Task) -> String {
    format!("forward_{}.csv", task_token(task))
}

/// Stem of an evaluation run; `.json` and `_predictions.csv` are appended.
pub fn eval_stem(task: Task, combo: Combo, learner: LearnerKind, modality: ModalitySubset) -> String {
    format!("{}_{}_{}_{}", task_token(task), combo.token(), learner.token(), modality.token())
}

pub fn ablation_file(combo: Combo, learner: LearnerKind) -> String {
    format!("ablation_{}_{}.json", combo.token(), learner.token())
}

/// Run artifacts found in a work directory.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub classify: Vec<EvalReport>,
    pub regress: Vec<EvalReport>,
    pub ablations: Vec<Vec<EvalReport>>,
    pub selections: Vec<SelectionResult>,
    pub labels: BTreeMap<String, SubjectLabel>,
}

impl Artifacts {
    pub fn is_empty(&self) -> bool {
        self.classify.is_empty() && self.regress.is_empty() && self.ablations.is_empty() && self.selections.is_empty()
    }

    /// Reads every known artifact in `dir`, in file-name order.
    pub fn load(dir: &Path) -> Result<Artifacts> {
        let entries = fs::read_dir(dir).map_err(|_| Error::MissingInput {
            path: dir.to_path_buf(),
            hint: "point --input at the work directory used by extract/classify/regress".into(),
        })?;
        let mut names: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().into_string().ok())
            .collect();
        names.sort();
        let mut a = Artifacts::default();
        for name in names {
            let path = dir.join(&name);
            let read = || fs::read_to_string(&path);
            if name == LABELS_FILE {
                a.labels = read_labels_csv(fs::File::open(&path)?)?;
            } else if !name.ends_with(".json") {
                continue;
            } else if name.starts_with("selection_") {
                a.selections.push(SelectionResult::from_json(&read()?)?);
            } else if name.starts_with("ablation_") {
                a.ablations.push(serde_json::from_str(&read()?)?);
            } else if name.starts_with("classify_") {
                a.classify.push(serde_json::from_str(&read()?)?);
            } else if name.starts_with("regress_") {
                a.regress.push(serde_json::from_str(&read()?)?);
            }
        }
        if a.is_empty() {
            return Err(Error::MissingInput {
                path: dir.to_path_buf(),
                hint: "no run artifacts found; run `smartgait classify`, `regress`, `ablate` or `select` first".into(),
            });
        }
        Ok(a)
    }
}

fn num(v: f64) -> String {
    format!("{v:.3}")
}

fn selector_token(r: &EvalReport) -> &'static str {
    r.selector.map_or("fixed", |s| s.token())
}

fn classification_table(out: &mut String, title: &str, reports: &[EvalReport], first: &str) {
    let _ = writeln!(out, "## {title}\n");
    let _ = writeln!(out, "| {first} | Selector | Classifier | N_sample | Accuracy | Precision | Recall | F1 |");
    let _ = writeln!(out, "|---|---|---|---|---|---|---|---|");
    for r in reports {
        let Some(m) = r.classification else { continue };
        let key = if first == "Modality" { r.modality.token().to_string() } else { r.combo.label().to_string() };
        let _ = writeln!(
            out,
            "| {key} | {} | {} | {} | {} | {} | {} | {} |",
            selector_token(r),
            r.learner.token(),
            r.n_samples,
            num(m.accuracy),
            num(m.precision),
            num(m.recall),
            num(m.f1)
        );
    }
    out.push('\n');
}

/// Per-subject strength rows for one regression run: predicted value and
/// both physicians' grades next to the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthPoint {
    pub subject_id: String,
    pub truth: f64,
    pub predicted: f64,
    pub physician_a: Option<f64>,
    pub physician_b: Option<f64>,
}

pub fn strength_points(report: &EvalReport, labels: &BTreeMap<String, SubjectLabel>) -> Vec<StrengthPoint> {
    report
        .predictions
        .iter()
        .filter_map(|p| {
            let label = labels.get(&p.subject_id);
            Some(StrengthPoint {
                subject_id: p.subject_id.clone(),
                truth: p.truth?,
                predicted: p.predicted_strength?,
                physician_a: label.and_then(|l| l.mrc_a).map(|g| g.numeric()),
                physician_b: label.and_then(|l| l.mrc_b).map(|g| g.numeric()),
            })
        })
        .collect()
}

/// Errors of each physician's grade against the averaged truth; `None`
/// when any grade is unknown.
pub fn physician_errors(points: &[StrengthPoint]) -> Option<(RegressionMetrics, RegressionMetrics)> {
    let truth: Vec<f64> = points.iter().map(|p| p.truth).collect();
    let a: Option<Vec<f64>> = points.iter().map(|p| p.physician_a).collect();
    let b: Option<Vec<f64>> = points.iter().map(|p| p.physician_b).collect();
    Some((regression_metrics(&a?, &truth).ok()?, regression_metrics(&b?, &truth).ok()?))
}

fn metrics_row(out: &mut String, who: &str, m: &RegressionMetrics) {
    let _ = writeln!(out, "| {who} | {} | {} | {} |", num(m.mae), num(m.rmse), num(m.me));
}

/// Builds the Markdown summary.
pub fn render_markdown(a: &Artifacts) -> String {
    let mut out = String::from("# SmartGait evaluation report\n\n");
    if !a.classify.is_empty() {
        classification_table(&mut out, "Patient versus healthy classification", &a.classify, "Combo");
    }
    for runs in &a.ablations {
        if let Some(r) = runs.first() {
            let title = format!("Sensing modality ablation ({}, {})", r.combo.label(), r.learner.token());
            classification_table(&mut out, &title, runs, "Modality");
        }
    }
    if !a.regress.is_empty() {
        out.push_str("## Muscle strength regression\n\n");
        out.push_str("| Combo | Selector | Regressor | N_sample | MAE | RMSE | ME |\n|---|---|---|---|---|---|---|\n");
        for r in &a.regress {
            let Some(m) = r.regression else { continue };
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} |",
                r.combo.label(),
                selector_token(r),
                r.learner.token(),
                r.n_samples,
                num(m.mae),
                num(m.rmse),
                num(m.me)
            );
        }
        out.push('\n');
        for r in &a.regress {
            let (Some(m), Some((pa, pb))) = (r.regression, physician_errors(&strength_points(r, &a.labels))) else {
                continue;
            };
            let _ = writeln!(out, "### Model versus physicians ({}, {})\n", r.combo.label(), r.learner.token());
            out.push_str("| Source | MAE | RMSE | ME |\n|---|---|---|---|\n");
            metrics_row(&mut out, "model", &m);
            metrics_row(&mut out, "physician A", &pa);
            metrics_row(&mut out, "physician B", &pb);
            out.push('\n');
        }
    }
    for s in &a.selections {
        let _ = writeln!(out, "## Selected features ({}, {} selector)\n", task_token(s.task), s.selector.token());
        out.push_str("| Rank | Feature | Importance |\n|---|---|---|\n");
        for (i, name) in s.selected.iter().enumerate() {
            let imp = s.ranked.iter().find(|r| &r.name == name).map_or(0.0, |r| r.importance);
            let _ = writeln!(out, "| {} | {name} | {} |", i + 1, num(imp));
        }
        out.push('\n');
        if s.forward.is_empty() {
            continue;
        }
        let _ = writeln!(out, "### Forward search ({})\n", task_token(s.task));
        if s.task == Task::Regress {
            out.push_str("| Size | Feature | MAE | RMSE | ME |\n|---|---|---|---|---|\n");
        } else {
            out.push_str("| Size | Feature | F1 |\n|---|---|---|\n");
        }
        for f in &s.forward {
            let cell = |v: Option<f64>| v.map(num).unwrap_or_default();
            if s.task == Task::Regress {
                let _ = writeln!(out, "| {} | {} | {} | {} | {} |", f.size, f.feature, cell(f.mae), cell(f.rmse), cell(f.me));
            } else {
                let _ = writeln!(out, "| {} | {} | {} |", f.size, f.feature, cell(f.f1));
            }
        }
        out.push('\n');
    }
    out
}

fn strength_csv(points: &[StrengthPoint]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["subject_id", "truth", "predicted", "physician_a", "physician_b"])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for p in points {
        w.write_record([
            p.subject_id.clone(),
            p.truth.to_string(),
            p.predicted.to_string(),
            opt(p.physician_a),
            opt(p.physician_b),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Writes `report.md`, one strength-comparison CSV per regression run and
/// one forward-search CSV per manifest that has a ledger. Returns the paths
/// written, in order.
pub fn write_report(a: &Artifacts, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    put(REPORT_FILE.into(), render_markdown(a).as_bytes())?;
    for r in &a.regress {
        let name = format!("plot_strength_{}_{}.csv", r.combo.token(), r.learner.token());
        put(name, &strength_csv(&strength_points(r, &a.labels))?)?;
    }
    for s in &a.selections {
        if !s.forward.is_empty() {
            let mut buf = Vec::new();
            write_forward_csv(&s.forward, &mut buf)?;
            put(format!("plot_forward_{}.csv", task_token(s.task)), &buf)?;
        }
    }
    Ok(written)
}
