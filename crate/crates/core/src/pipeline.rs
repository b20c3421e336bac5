//! End-to-end feature extraction: recording in, whole-feature row out.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame_features::{extract_stream, FrameFeatures, FRAME_FEATURE_COUNT, TOTAL_FORCE};
use crate::preprocess::process_stream;
use crate::recording::{parse_recording, MrcGrade, Routine, SubjectLabel, TestRecording};
use crate::segmentation::{label_phases, segment_foot, FootSegmentation, StepSpan};
use crate::step_features::{
    fusion_features, phase_durations, step_statistics_all, BilateralRow, BILATERAL_FEATURES,
};
use crate::table::{FeatureRow, FeatureTable};
use crate::whole_features::{feature_names, whole_vector, FootStepFeatures, TestStepFeatures};

/// Intermediate results of one test, kept for inspection and dumps.
#[derive(Debug, Clone)]
pub struct TestExtraction {
    pub left_force: Vec<f64>,
    pub right_force: Vec<f64>,
    pub left: FootSegmentation,
    pub right: FootSegmentation,
    pub values: Vec<f64>,
}

fn foot_steps(frames: &[FrameFeatures], steps: &[StepSpan]) -> Result<FootStepFeatures> {
    let mut out = FootStepFeatures::default();
    for (k, s) in steps.iter().enumerate() {
        out.durations.push(phase_durations(s, steps.get(k + 1))?);
        out.statistics.push(step_statistics_all(&frames[s.start_t..s.end_t])?);
    }
    Ok(out)
}

fn bilateral_rows(left: &[FrameFeatures], right: &[FrameFeatures], from: usize, to: usize) -> Vec<BilateralRow> {
    (from..to)
        .map(|t| {
            let mut row = [0.0; BILATERAL_FEATURES];
            row[..FRAME_FEATURE_COUNT].copy_from_slice(&left[t]);
            row[FRAME_FEATURE_COUNT..].copy_from_slice(&right[t]);
            row
        })
        .collect()
}

pub fn extract_test(rec: &TestRecording) -> Result<TestExtraction> {
    let rec = rec.repaired_and_synchronized()?;
    let left_ff = extract_stream(&process_stream(&rec.left)?)?;
    let right_ff = extract_stream(&process_stream(&rec.right)?)?;
    let force = |ff: &[FrameFeatures]| ff.iter().map(|r| r[TOTAL_FORCE]).collect::<Vec<_>>();
    let (left_force, right_force) = (force(&left_ff), force(&right_ff));

    let mut left = segment_foot(&left_force)?;
    let mut right = segment_foot(&right_force)?;
    let (ls, rs) = label_phases(&left.steps, &right.steps, &left.contact, &right.contact)?;
    left.steps = ls;
    right.steps = rs;

    // fusion values are taken over the left foot's gait cycles
    let fusion = left
        .steps
        .iter()
        .map(|s| fusion_features(&bilateral_rows(&left_ff, &right_ff, s.start_t, s.end_t)))
        .collect::<Result<Vec<_>>>()?;
    let steps = TestStepFeatures {
        left: foot_steps(&left_ff, &left.steps)?,
        right: foot_steps(&right_ff, &right.steps)?,
        fusion,
    };
    let values = whole_vector(&steps)?;
    Ok(TestExtraction {
        left_force,
        right_force,
        left,
        right,
        values,
    })
}

pub fn feature_row(rec: &TestRecording, values: Vec<f64>) -> FeatureRow {
    FeatureRow {
        subject_id: rec.subject_id.clone(),
        routine: rec.routine,
        cohort: rec.label.cohort,
        truth: rec.label.truth(),
        values,
    }
}

/// A test that could not be turned into a feature row.
#[derive(Debug)]
pub struct Rejected {
    pub source: String,
    pub error: Error,
}

/// One detected gait cycle, flattened for the segmentation dump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentRow {
    pub subject_id: String,
    pub routine: Routine,
    pub foot: char,
    pub step: usize,
    pub heel_strike: usize,
    pub toe_off: usize,
    pub next_strike: usize,
    pub threshold: f64,
}

/// Everything extraction produces for a set of tests.
#[derive(Debug)]
pub struct Extraction {
    /// Rows sorted by subject then routine.
    pub table: FeatureTable,
    /// Subject labels as read from the recordings.
    pub labels: BTreeMap<String, SubjectLabel>,
    pub segments: Vec<SegmentRow>,
    pub rejected: Vec<Rejected>,
}

type TestOutput = (FeatureRow, SubjectLabel, Vec<SegmentRow>);

fn process(rec: &TestRecording) -> Result<TestOutput> {
    let x = extract_test(rec)?;
    let mut segments = Vec::new();
    for (foot, seg) in [('L', &x.left), ('R', &x.right)] {
        segments.extend(seg.steps.iter().map(|s| SegmentRow {
            subject_id: rec.subject_id.clone(),
            routine: rec.routine,
            foot,
            step: s.k,
            heel_strike: s.start_t,
            toe_off: s.stance_end_t,
            next_strike: s.end_t,
            threshold: seg.threshold,
        }));
    }
    Ok((feature_row(rec, x.values), rec.label.clone(), segments))
}

fn assemble(results: Vec<(String, Result<TestOutput>)>) -> Extraction {
    let mut table = FeatureTable::new(feature_names().to_vec());
    let mut labels = BTreeMap::new();
    let mut segments = Vec::new();
    let mut rejected = Vec::new();
    for (source, r) in results {
        let pushed = r.and_then(|(row, label, segs)| {
            let id = row.subject_id.clone();
            table.push(row)?;
            labels.entry(id).or_insert(label);
            segments.extend(segs);
            Ok(())
        });
        if let Err(error) = pushed {
            log::warn!("rejecting test {source}: {error}");
            rejected.push(Rejected { source, error });
        }
    }
    table
        .rows
        .sort_by(|a, b| (&a.subject_id, a.routine).cmp(&(&b.subject_id, b.routine)));
    segments.sort_by(|a, b| (&a.subject_id, a.routine, a.foot, a.step).cmp(&(&b.subject_id, b.routine, b.foot, b.step)));
    Extraction {
        table,
        labels,
        segments,
        rejected,
    }
}

/// Extracts every recording. Failing tests are reported, not fatal.
pub fn extract_table(recs: &[TestRecording]) -> Extraction {
    let results = recs
        .par_iter()
        .map(|rec| (format!("{}/{}", rec.subject_id, rec.routine), process(rec)))
        .collect();
    assemble(results)
}

/// Extracts `n` recordings produced on demand by `make`, so only a few are
/// resident at once. `make` returns a label for messages and the recording.
pub fn extract_with<F>(n: usize, make: F) -> Extraction
where
    F: Fn(usize) -> (String, Result<TestRecording>) + Sync,
{
    let results = (0..n)
        .into_par_iter()
        .map(|i| {
            let (source, rec) = make(i);
            (source, rec.and_then(|rec| process(&rec)))
        })
        .collect();
    assemble(results)
}

/// Parses and extracts every file.
pub fn extract_paths(paths: &[PathBuf]) -> Extraction {
    extract_with(paths.len(), |i| (paths[i].display().to_string(), parse_recording(&paths[i])))
}

pub fn write_segments_csv<W: Write>(segments: &[SegmentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in segments {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

/// `subject_id,cohort,mrc_a,mrc_b`; grades are empty for healthy subjects.
pub fn write_labels_csv<W: Write>(labels: &BTreeMap<String, SubjectLabel>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["subject_id", "cohort", "mrc_a", "mrc_b"])?;
    let grade = |g: Option<MrcGrade>| g.map(|g| g.token().to_string()).unwrap_or_default();
    for (id, l) in labels {
        w.write_record([id.clone(), l.cohort.token().into(), grade(l.mrc_a), grade(l.mrc_b)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_labels_csv<R: Read>(input: R) -> Result<BTreeMap<String, SubjectLabel>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = BTreeMap::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |msg: String| Error::Parse { line: i + 2, msg };
        if rec.len() != 4 {
            return Err(bad(format!("expected 4 fields, got {}", rec.len())));
        }
        let grade = |s: &str| -> Result<Option<MrcGrade>> { if s.is_empty() { Ok(None) } else { s.parse().map(Some) } };
        let label = SubjectLabel {
            cohort: rec[1].parse().map_err(|e: Error| bad(e.to_string()))?,
            mrc_a: grade(&rec[2])?,
            mrc_b: grade(&rec[3])?,
        };
        out.insert(rec[0].to_string(), label);
    }
    Ok(out)
}

/// Recording files (`*.gaitrec`) in `dir`, sorted by name.
pub fn recording_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let missing = || Error::MissingInput {
        path: dir.to_path_buf(),
        hint: "run `smartgait synth` or point --input at a directory of .gaitrec files".into(),
    };
    let entries = std::fs::read_dir(dir).map_err(|_| missing())?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e?.path();
        if p.extension().is_some_and(|x| x == "gaitrec") {
            paths.push(p);
        }
    }
    if paths.is_empty() {
        return Err(missing());
    }
    paths.sort();
    Ok(paths)
}
