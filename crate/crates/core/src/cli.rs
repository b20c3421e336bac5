//! Command-line surface. Stages talk through files in a work directory so
//! each one can be rerun on its own.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::models::harness::{classify_subjects, combo_rows, modality_ablation, regress_strength, Combo, EvalReport, FeaturePlan};
use crate::models::{LearnerKind, Task};
use crate::pipeline::{extract_paths, recording_paths, write_labels_csv, write_segments_csv};
use crate::recording::Cohort;
use crate::report::{self, Artifacts};
use crate::selection::{forward_search, select_features, write_forward_csv, SelectionResult};
use crate::synth::{write_cohort, StrengthMap, DEFAULT_DURATION_S};
use crate::table::{FeatureTable, ModalitySubset};
use crate::whole_features::zscore_fit_apply;

#[derive(Debug, Parser)]
#[command(name = "smartgait", version, about = "Smart-shoe gait features, patient screening and muscle strength estimation")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic cohort of recordings plus truth.json.
    Synth(SynthArgs),
    /// Turn a directory of recordings into features.csv and labels.csv.
    Extract(ExtractArgs),
    /// Rank and select features on the whole table, optionally with a forward search.
    Select(SelectArgs),
    /// Patient versus healthy classification, five subject-disjoint folds.
    Classify(EvalArgs),
    /// Leave-one-patient-out muscle strength regression.
    Regress(EvalArgs),
    /// Rerun classification on each sensing-modality subset.
    Ablate(EvalArgs),
    /// Markdown summary and plot CSVs from the artifacts in a work directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 23)]
    pub patients: usize,
    #[arg(long, default_value_t = 17)]
    pub healthy: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Seconds per recording.
    #[arg(long, default_value_t = DEFAULT_DURATION_S)]
    pub duration: f64,
    /// Directory for the recordings.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Directory of `.gaitrec` files.
    #[arg(long)]
    pub input: PathBuf,
    /// Work directory for the feature table.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write segmentation.csv with every detected gait cycle.
    #[arg(long)]
    pub segmentation_dump: bool,
}

/// Flags shared by every stage that reads the feature table.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Work directory holding features.csv.
    #[arg(long)]
    pub input: PathBuf,
    /// Where to write results; defaults to the input directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// str, rt, lt, rt+lt or all.
    #[arg(long, default_value = "rt")]
    pub combo: Combo,
    /// Learner whose importances drive feature selection.
    #[arg(long, default_value = "dt")]
    pub selector: LearnerKind,
    /// Model to evaluate; defaults to knn for classification and rf for regression.
    #[arg(long)]
    pub learner: Option<LearnerKind>,
    /// imu, pressure, imu+pressure or all.
    #[arg(long, default_value = "all")]
    pub modality: ModalitySubset,
}

impl RunArgs {
    fn out_dir(&self) -> &Path {
        self.out.as_deref().unwrap_or(&self.input)
    }

    fn learner_for(&self, task: Task) -> LearnerKind {
        self.learner.unwrap_or(match task {
            Task::Classify => LearnerKind::Knn,
            Task::Regress => LearnerKind::RandomForest,
        })
    }

    fn table(&self) -> Result<FeatureTable> {
        let t = FeatureTable::load(&self.input.join(report::FEATURES_FILE))?;
        if self.modality == ModalitySubset::All {
            Ok(t)
        } else {
            t.modality_subset(self.modality)
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// classify or regress.
    #[arg(long, default_value = "classify")]
    pub task: Task,
    /// Run a forward search over this many top-ranked features.
    #[arg(long, value_name = "N")]
    pub forward_search: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Use the features in the selection manifest from `select` instead of
    /// selecting inside every fold. That manifest saw every subject, so the
    /// scores come out optimistic.
    #[arg(long)]
    pub use_selection: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Work directory with run artifacts.
    #[arg(long)]
    pub input: PathBuf,
    /// Where to write the report; defaults to the input directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let manifest = write_cohort(&a.out, a.patients, a.healthy, StrengthMap::Linear, a.seed, a.duration)?;
    say(&format!(
        "wrote {} recordings for {} subjects to {}",
        manifest.recordings.len(),
        manifest.subjects.len(),
        a.out.display()
    ));
    Ok(())
}

fn cmd_extract(a: &ExtractArgs) -> Result<()> {
    let paths = recording_paths(&a.input)?;
    let x = extract_paths(&paths);
    if x.table.rows.is_empty() {
        return Err(Error::Degenerate(format!("all {} recordings were rejected", paths.len())));
    }
    fs::create_dir_all(&a.out)?;
    x.table.save(&a.out.join(report::FEATURES_FILE))?;
    let mut labels = Vec::new();
    write_labels_csv(&x.labels, &mut labels)?;
    write_file(&a.out.join(report::LABELS_FILE), &labels)?;
    if a.segmentation_dump {
        let mut seg = Vec::new();
        write_segments_csv(&x.segments, &mut seg)?;
        write_file(&a.out.join(report::SEGMENTATION_FILE), &seg)?;
    }
    say(&format!(
        "extracted {} tests ({} rejected), {} features each",
        x.table.rows.len(),
        x.rejected.len(),
        x.table.n_features()
    ));
    Ok(())
}

/// Rows the task works on: combo rows, and for regression only patients
/// with a strength truth.
fn task_rows(table: &FeatureTable, task: Task, combo: Combo) -> FeatureTable {
    let rows = match task {
        Task::Classify => table.clone(),
        Task::Regress => table.filter_rows(|r| r.cohort == Cohort::Patient && r.truth.is_some()),
    };
    combo_rows(&rows, combo).0
}

fn cmd_select(a: &SelectArgs) -> Result<()> {
    let run = &a.run;
    let rows = task_rows(&run.table()?, a.task, run.combo);
    if rows.rows.is_empty() {
        return Err(Error::Degenerate(format!("no rows for task {} and combo {}", a.task.token(), run.combo.token())));
    }
    let all: Vec<usize> = (0..rows.rows.len()).collect();
    let (normalized, _) = zscore_fit_apply(&rows, &all)?;
    let mut result = select_features(&normalized, a.task, run.selector, run.seed)?;
    let out = run.out_dir();
    if let Some(n) = a.forward_search {
        let candidates: Vec<String> = result.ranked.iter().take(n).map(|r| r.name.clone()).collect();
        result.forward = forward_search(&rows, &candidates, a.task, run.learner_for(a.task), run.seed, None)?;
        let mut buf = Vec::new();
        write_forward_csv(&result.forward, &mut buf)?;
        write_file(&out.join(report::forward_file(a.task)), &buf)?;
    }
    write_file(&out.join(report::selection_file(a.task)), result.to_json()?.as_bytes())?;
    say(&format!(
        "selected {} of {} ranked features: {}",
        result.selected.len(),
        result.ranked.len(),
        result.selected.join(", ")
    ));
    Ok(())
}

fn plan_for(e: &EvalArgs, table: &FeatureTable, task: Task) -> Result<FeaturePlan> {
    if !e.use_selection {
        return Ok(FeaturePlan::Select(e.run.selector));
    }
    let manifest = SelectionResult::load(&e.run.input.join(report::selection_file(task)))?;
    if manifest.task != task {
        return Err(Error::Schema(format!("selection manifest is for task {}", manifest.task.token())));
    }
    let cols = manifest
        .selected
        .iter()
        .map(|n| {
            table
                .feature_index(n)
                .ok_or_else(|| Error::Schema(format!("manifest feature `{n}` is not in the feature table")))
        })
        .collect::<Result<Vec<_>>>()?;
    if cols.is_empty() {
        return Err(Error::Schema("selection manifest lists no features".into()));
    }
    Ok(FeaturePlan::Fixed(cols))
}

fn write_eval(report: &EvalReport, out: &Path) -> Result<()> {
    let stem = report::eval_stem(report.task, report.combo, report.learner, report.modality);
    write_file(&out.join(format!("{stem}.json")), report.to_json()?.as_bytes())?;
    let mut csv = Vec::new();
    report.write_predictions_csv(&mut csv)?;
    write_file(&out.join(format!("{stem}_predictions.csv")), &csv)
}

fn cmd_eval(e: &EvalArgs, task: Task) -> Result<()> {
    let table = e.run.table()?;
    let plan = plan_for(e, &table, task)?;
    let learner = e.run.learner_for(task);
    let mut r = match task {
        Task::Classify => classify_subjects(&table, e.run.combo, &plan, learner, e.run.seed)?,
        Task::Regress => regress_strength(&table, e.run.combo, &plan, learner, e.run.seed)?,
    };
    r.modality = e.run.modality;
    write_eval(&r, e.run.out_dir())?;
    if let Some(m) = r.classification {
        say(&format!(
            "{} {}: {} samples, accuracy {:.3}, precision {:.3}, F1 {:.3}",
            r.combo.label(),
            learner,
            r.n_samples,
            m.accuracy,
            m.precision,
            m.f1
        ));
    }
    if let Some(m) = r.regression {
        say(&format!(
            "{} {}: {} samples, MAE {:.3}, RMSE {:.3}, ME {:.3}",
            r.combo.label(),
            learner,
            r.n_samples,
            m.mae,
            m.rmse,
            m.me
        ));
    }
    Ok(())
}

fn cmd_ablate(e: &EvalArgs) -> Result<()> {
    if e.use_selection {
        return Err(Error::Config("ablation always selects inside each fold; drop --use-selection".into()));
    }
    let table = FeatureTable::load(&e.run.input.join(report::FEATURES_FILE))?;
    let learner = e.run.learner_for(Task::Classify);
    let subsets = [ModalitySubset::Imu, ModalitySubset::Pressure, ModalitySubset::ImuPressure, ModalitySubset::All];
    let runs = modality_ablation(&table, &subsets, e.run.combo, e.run.selector, learner, e.run.seed)?;
    let json = serde_json::to_string_pretty(&runs)? + "\n";
    write_file(&e.run.out_dir().join(report::ablation_file(e.run.combo, learner)), json.as_bytes())?;
    for r in &runs {
        if let Some(m) = r.classification {
            say(&format!("{}: F1 {:.3}", r.modality.token(), m.f1));
        }
    }
    Ok(())
}

fn cmd_report(a: &ReportArgs) -> Result<()> {
    let artifacts = Artifacts::load(&a.input)?;
    let written = report::write_report(&artifacts, a.out.as_deref().unwrap_or(&a.input))?;
    for p in written {
        say(&format!("wrote {}", p.display()));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Select(a) => cmd_select(a),
        Command::Classify(e) => cmd_eval(e, Task::Classify),
        Command::Regress(e) => cmd_eval(e, Task::Regress),
        Command::Ablate(e) => cmd_ablate(e),
        Command::Report(a) => cmd_report(a),
    }
}
