//! Gait-cycle segmentation on the total-force trace of each foot.
//!
//! A three-cluster 1-D k-means over the trace gives ascending centroids
//! `x1 <= x2 <= x3`; frames with force above `0.9 * x1 + 0.1 * x2` are in
//! contact. After debouncing, rising edges are heel strikes and falling
//! edges toe-offs. A step runs from one heel strike to the next.

use std::io::Write;

use crate::error::{Error, Result};

pub const KMEANS_MAX_ITER: usize = 100;
pub const KMEANS_TOL: f64 = 1e-9;
/// Shortest contact or air run kept by the debouncer (100 ms at 60 Hz).
pub const MIN_RUN_FRAMES: usize = 6;
pub const MIN_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepSpan {
    pub k: usize,
    /// Heel-strike frame.
    pub start_t: usize,
    /// Toe-off frame: first frame of swing.
    pub stance_end_t: usize,
    /// Next heel strike (exclusive end of this cycle).
    pub end_t: usize,
    /// Half-open `[start, end)` windows where both feet are in contact.
    pub double_support: Vec<(usize, usize)>,
}

impl StepSpan {
    pub fn cycle_frames(&self) -> usize {
        self.end_t - self.start_t
    }

    pub fn stance_frames(&self) -> usize {
        self.stance_end_t - self.start_t
    }

    pub fn swing_frames(&self) -> usize {
        self.end_t - self.stance_end_t
    }

    pub fn double_support_frames(&self) -> usize {
        self.double_support.iter().map(|(a, b)| b - a).sum()
    }
}

/// Lloyd's algorithm with three clusters, seeded at the min, median and max.
/// Returns the centroids in ascending order.
pub fn kmeans_1d(values: &[f64]) -> Result<[f64; 3]> {
    let mut sorted: Vec<f64> = values.to_vec();
    if sorted.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite value in k-means input".into()));
    }
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Degenerate(format!(
            "k-means with 3 clusters needs 3 distinct values, got {}",
            distinct.len()
        )));
    }

    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let mut median = sorted[sorted.len() / 2];
    if median == min || median == max {
        // heavy ties at one end would collapse two seeds
        median = distinct[distinct.len() / 2];
    }
    let mut c = [min, median, max];

    let mut assign = vec![0usize; sorted.len()];
    for _ in 0..KMEANS_MAX_ITER {
        for (a, &v) in assign.iter_mut().zip(&sorted) {
            let mut best = 0;
            for j in 1..3 {
                if (v - c[j]).abs() < (v - c[best]).abs() {
                    best = j;
                }
            }
            *a = best;
        }
        let mut sum = [0.0; 3];
        let mut count = [0usize; 3];
        for (&a, &v) in assign.iter().zip(&sorted) {
            sum[a] += v;
            count[a] += 1;
        }
        let mut shift: f64 = 0.0;
        for j in 0..3 {
            if count[j] > 0 {
                let next = sum[j] / count[j] as f64;
                shift = shift.max((next - c[j]).abs());
                c[j] = next;
            }
        }
        if shift < KMEANS_TOL {
            break;
        }
    }
    c.sort_by(f64::total_cmp);
    Ok(c)
}

pub fn threshold_from_centroids(c: &[f64; 3]) -> f64 {
    0.9 * c[0] + 0.1 * c[1]
}

pub fn contact_threshold(total_force: &[f64]) -> Result<f64> {
    Ok(threshold_from_centroids(&kmeans_1d(total_force)?))
}

/// Flips interior runs shorter than `min_run`, shortest first, until none
/// remain. The first and last runs are left alone.
pub fn debounce(raw: &[bool], min_run: usize) -> Vec<bool> {
    let mut runs: Vec<(bool, usize)> = Vec::new();
    for &v in raw {
        match runs.last_mut() {
            Some((state, len)) if *state == v => *len += 1,
            _ => runs.push((v, 1)),
        }
    }
    loop {
        if runs.len() < 3 {
            break;
        }
        let shortest = (1..runs.len() - 1)
            .filter(|&i| runs[i].1 < min_run)
            .min_by_key(|&i| (runs[i].1, i));
        let Some(i) = shortest else { break };
        // absorb into both neighbours, which share the opposite state
        let merged = runs[i - 1].1 + runs[i].1 + runs[i + 1].1;
        runs[i - 1].1 = merged;
        runs.drain(i..=i + 1);
    }
    runs.into_iter()
        .flat_map(|(s, n)| std::iter::repeat_n(s, n))
        .collect()
}

pub fn contact_flags(total_force: &[f64], threshold: f64) -> Vec<bool> {
    let raw: Vec<bool> = total_force.iter().map(|&f| f > threshold).collect();
    debounce(&raw, MIN_RUN_FRAMES)
}

/// Complete heel-strike to heel-strike cycles of a debounced contact trace.
/// Partial cycles at either end are dropped.
pub fn steps_from_contact(contact: &[bool]) -> Vec<StepSpan> {
    let rising: Vec<usize> = (1..contact.len())
        .filter(|&i| contact[i] && !contact[i - 1])
        .collect();
    let mut steps = Vec::new();
    for w in rising.windows(2) {
        let (start, end) = (w[0], w[1]);
        let Some(toe_off) = (start + 1..end).find(|&i| !contact[i]) else {
            continue;
        };
        steps.push(StepSpan {
            k: steps.len(),
            start_t: start,
            stance_end_t: toe_off,
            end_t: end,
            double_support: Vec::new(),
        });
    }
    steps
}

pub fn detect_steps(total_force: &[f64], threshold: f64) -> Result<Vec<StepSpan>> {
    let steps = steps_from_contact(&contact_flags(total_force, threshold));
    if steps.len() < MIN_STEPS {
        return Err(Error::TooShort(format!(
            "{} complete steps detected, need at least {MIN_STEPS}",
            steps.len()
        )));
    }
    Ok(steps)
}

/// Segmentation of one foot's stream.
#[derive(Debug, Clone)]
pub struct FootSegmentation {
    pub centroids: [f64; 3],
    pub threshold: f64,
    pub contact: Vec<bool>,
    pub steps: Vec<StepSpan>,
}

pub fn segment_foot(total_force: &[f64]) -> Result<FootSegmentation> {
    let centroids = kmeans_1d(total_force)?;
    let threshold = threshold_from_centroids(&centroids);
    let contact = contact_flags(total_force, threshold);
    let steps = steps_from_contact(&contact);
    if steps.len() < MIN_STEPS {
        return Err(Error::TooShort(format!(
            "{} complete steps detected, need at least {MIN_STEPS}",
            steps.len()
        )));
    }
    Ok(FootSegmentation {
        centroids,
        threshold,
        contact,
        steps,
    })
}

fn both_contact_windows(a: &[bool], b: &[bool], from: usize, to: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    for t in from..to {
        let both = a[t] && b[t];
        match (both, open) {
            (true, None) => open = Some(t),
            (false, Some(s)) => {
                out.push((s, t));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        out.push((s, to));
    }
    out
}

/// Attaches double-support windows to every step of both feet. Both contact
/// traces must share one time base.
pub fn label_phases(
    left_steps: &[StepSpan],
    right_steps: &[StepSpan],
    left_contact: &[bool],
    right_contact: &[bool],
) -> Result<(Vec<StepSpan>, Vec<StepSpan>)> {
    if left_contact.len() != right_contact.len() {
        return Err(Error::Sync(format!(
            "contact traces differ in length ({} vs {})",
            left_contact.len(),
            right_contact.len()
        )));
    }
    let n = left_contact.len();
    let label = |steps: &[StepSpan]| -> Result<Vec<StepSpan>> {
        steps
            .iter()
            .map(|s| {
                if s.end_t > n {
                    return Err(Error::Sync(format!(
                        "step ending at {} exceeds the {n}-frame time base",
                        s.end_t
                    )));
                }
                let mut s = s.clone();
                s.double_support = both_contact_windows(left_contact, right_contact, s.start_t, s.end_t);
                Ok(s)
            })
            .collect()
    };
    Ok((label(left_steps)?, label(right_steps)?))
}

/// Writes `t,total_force,contact,step_index` rows for plotting.
pub fn write_segmentation_csv<W: Write>(
    out: W,
    total_force: &[f64],
    contact: &[bool],
    steps: &[StepSpan],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "total_force", "contact", "step_index"])?;
    let mut step_of = vec![None; total_force.len()];
    for s in steps {
        for slot in &mut step_of[s.start_t..s.end_t.min(total_force.len())] {
            *slot = Some(s.k);
        }
    }
    for (t, (&f, &c)) in total_force.iter().zip(contact).enumerate() {
        let step = step_of[t].map(|k| k.to_string()).unwrap_or_default();
        w.write_record([t.to_string(), f.to_string(), (c as u8).to_string(), step])?;
    }
    w.flush()?;
    Ok(())
}
