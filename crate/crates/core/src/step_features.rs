//! Per-step features: phase durations, the twelve statistics of each frame
//! feature over the step, and dual-modality fusion values.
//!
//! Fusion features read one frame feature at the instant another reaches its
//! extremum within the step. With 40 features per foot there are 80
//! bilateral series and `2 * 80 * 79` ordered `(mode, i, j)` combinations.

use crate::error::{Error, Result};
use crate::frame_features::{FrameFeatures, FRAME_FEATURE_COUNT, FRAME_FEATURE_NAMES};
use crate::recording::{Foot, SAMPLE_RATE_HZ};
use crate::segmentation::StepSpan;
use crate::stats::{self, STAT_COUNT};

pub const SPD_COUNT: usize = 8;
pub const SPD_NAMES: [&str; SPD_COUNT] = [
    "GaitCycleTime",
    "GaitStanceTime",
    "GaitSwingTime",
    "GaitDoubleSupportTime",
    "GaitStanceRatio",
    "GaitSwingRatio",
    "GaitDoubleSupportPrevRatio",
    "GaitDoubleSupportNextRatio",
];

pub const BILATERAL_FEATURES: usize = 2 * FRAME_FEATURE_COUNT;
pub const FUSION_PAIRS: usize = BILATERAL_FEATURES * (BILATERAL_FEATURES - 1);
pub const FUSION_PER_STEP: usize = 2 * FUSION_PAIRS;

/// Left-foot features followed by right-foot features for one frame.
pub type BilateralRow = [f64; BILATERAL_FEATURES];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDurations {
    pub cycle: f64,
    pub stance: f64,
    pub swing: f64,
    pub double_support: f64,
    pub stance_ratio: f64,
    pub swing_ratio: f64,
    /// Double support over this step's stance.
    pub ds_prev_ratio: f64,
    /// Double support over the next step's stance; absent on the last step.
    pub ds_next_ratio: Option<f64>,
}

impl PhaseDurations {
    pub fn get(&self, index: usize) -> Option<f64> {
        match index {
            0 => Some(self.cycle),
            1 => Some(self.stance),
            2 => Some(self.swing),
            3 => Some(self.double_support),
            4 => Some(self.stance_ratio),
            5 => Some(self.swing_ratio),
            6 => Some(self.ds_prev_ratio),
            7 => self.ds_next_ratio,
            _ => None,
        }
    }
}

pub fn phase_durations(step: &StepSpan, next: Option<&StepSpan>) -> Result<PhaseDurations> {
    let secs = |frames: usize| frames as f64 / SAMPLE_RATE_HZ as f64;
    if step.stance_frames() == 0 {
        return Err(Error::Degenerate(format!("step {} has zero stance", step.k)));
    }
    let (cycle, stance, swing, ds) = (
        secs(step.cycle_frames()),
        secs(step.stance_frames()),
        secs(step.swing_frames()),
        secs(step.double_support_frames()),
    );
    let ds_next_ratio = match next {
        Some(n) if n.stance_frames() > 0 => Some(ds / secs(n.stance_frames())),
        Some(n) => return Err(Error::Degenerate(format!("step {} has zero stance", n.k))),
        None => None,
    };
    Ok(PhaseDurations {
        cycle,
        stance,
        swing,
        double_support: ds,
        stance_ratio: stance / cycle,
        swing_ratio: swing / cycle,
        ds_prev_ratio: ds / stance,
        ds_next_ratio,
    })
}

/// The twelve statistics of one frame feature over a step.
pub fn step_statistics(series: &[f64]) -> Result<[f64; STAT_COUNT]> {
    stats::series_statistics(series)
}

/// Statistics of all 40 frame features of one foot over `rows`.
pub fn step_statistics_all(rows: &[FrameFeatures]) -> Result<Vec<[f64; STAT_COUNT]>> {
    let mut series = vec![0.0; rows.len()];
    (0..FRAME_FEATURE_COUNT)
        .map(|f| {
            for (slot, r) in series.iter_mut().zip(rows) {
                *slot = r[f];
            }
            step_statistics(&series)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extremum {
    Max,
    Min,
}

impl Extremum {
    pub const BOTH: [Extremum; 2] = [Extremum::Max, Extremum::Min];

    pub fn tag(self) -> &'static str {
        match self {
            Extremum::Max => "MaxTime",
            Extremum::Min => "MinTime",
        }
    }
}

pub fn bilateral_name(index: usize) -> String {
    let foot = if index < FRAME_FEATURE_COUNT {
        Foot::Left
    } else {
        Foot::Right
    };
    format!(
        "{}{}",
        foot.letter(),
        FRAME_FEATURE_NAMES[index % FRAME_FEATURE_COUNT]
    )
}

/// `<Fi>_MaxTime_<Fj>` / `<Fi>_MinTime_<Fj>`.
pub fn fusion_name(mode: Extremum, i: usize, j: usize) -> String {
    format!("{}_{}_{}", bilateral_name(i), mode.tag(), bilateral_name(j))
}

/// Position of `(mode, i, j)` in the output of [`fusion_features`].
pub fn fusion_index(mode: Extremum, i: usize, j: usize) -> Result<usize> {
    if i == j {
        return Err(Error::Domain(format!("fusion pair needs i != j, got i = j = {i}")));
    }
    if i >= BILATERAL_FEATURES || j >= BILATERAL_FEATURES {
        return Err(Error::Domain(format!("fusion index out of range: ({i}, {j})")));
    }
    let base = match mode {
        Extremum::Max => 0,
        Extremum::Min => FUSION_PAIRS,
    };
    let jj = if j > i { j - 1 } else { j };
    Ok(base + i * (BILATERAL_FEATURES - 1) + jj)
}

/// `(mode, i, j)` for every output slot, in output order.
pub fn fusion_layout() -> impl Iterator<Item = (Extremum, usize, usize)> {
    Extremum::BOTH.into_iter().flat_map(|m| {
        (0..BILATERAL_FEATURES).flat_map(move |i| {
            (0..BILATERAL_FEATURES)
                .filter(move |&j| j != i)
                .map(move |j| (m, i, j))
        })
    })
}

/// First frame at which feature `i` is extreme.
fn extreme_frame(rows: &[BilateralRow], i: usize, mode: Extremum) -> usize {
    let mut best = 0;
    for (t, r) in rows.iter().enumerate().skip(1) {
        let better = match mode {
            Extremum::Max => r[i] > rows[best][i],
            Extremum::Min => r[i] < rows[best][i],
        };
        if better {
            best = t;
        }
    }
    best
}

pub fn fusion_value(rows: &[BilateralRow], mode: Extremum, i: usize, j: usize) -> Result<f64> {
    fusion_index(mode, i, j)?;
    if rows.is_empty() {
        return Err(Error::TooShort("empty step".into()));
    }
    Ok(rows[extreme_frame(rows, i, mode)][j])
}

/// All fusion values of one step, ordered as [`fusion_layout`].
pub fn fusion_features(rows: &[BilateralRow]) -> Result<Vec<f64>> {
    if rows.is_empty() {
        return Err(Error::TooShort("empty step".into()));
    }
    let mut out = Vec::with_capacity(FUSION_PER_STEP);
    for mode in Extremum::BOTH {
        for i in 0..BILATERAL_FEATURES {
            let at = &rows[extreme_frame(rows, i, mode)];
            out.extend(
                at.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &v)| v),
            );
        }
    }
    Ok(out)
}
