//! Whole-test features: the twelve statistics of every step feature across
//! the steps of a test, left/right symmetry coefficients, and z-score
//! normalization.
//!
//! Names follow the `<Frame>_<S1>_<S2>` pattern, e.g. `RImageHu5_Skewness_Min`
//! is the minimum over steps of the per-step skewness of the right foot's
//! fifth Hu moment, and `RForeGyroY_MaxTime_RForeAccX_Median` the median
//! over steps of a fusion value. Symmetry features drop the foot prefix and
//! append `_Symmetry`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::frame_features::{is_imu_feature, FRAME_FEATURE_COUNT, FRAME_FEATURE_NAMES};
use crate::recording::Foot;
use crate::step_features::{
    fusion_layout, fusion_name, PhaseDurations, FUSION_PER_STEP, SPD_COUNT, SPD_NAMES,
};
use crate::stats::{self, STAT_COUNT, STAT_NAMES};
use crate::table::FeatureTable;

pub const MIN_STEPS_PER_TEST: usize = 2;

/// Step features of one foot, one entry per step.
#[derive(Debug, Clone, Default)]
pub struct FootStepFeatures {
    pub durations: Vec<PhaseDurations>,
    /// `[step][frame_feature]` statistics.
    pub statistics: Vec<Vec<[f64; STAT_COUNT]>>,
}

/// Everything the whole-feature stage needs from one test.
#[derive(Debug, Clone, Default)]
pub struct TestStepFeatures {
    pub left: FootStepFeatures,
    pub right: FootStepFeatures,
    /// `[step][fusion slot]`, ordered as `fusion_layout()`.
    pub fusion: Vec<Vec<f64>>,
}

impl TestStepFeatures {
    fn foot(&self, foot: Foot) -> &FootStepFeatures {
        match foot {
            Foot::Left => &self.left,
            Foot::Right => &self.right,
        }
    }
}

pub fn whole_statistics(step_series: &[f64]) -> Result<[f64; STAT_COUNT]> {
    if step_series.len() < MIN_STEPS_PER_TEST {
        return Err(Error::TooShort(format!(
            "whole statistics need {MIN_STEPS_PER_TEST} steps, got {}",
            step_series.len()
        )));
    }
    stats::series_statistics(step_series)
}

/// `1 - min(|L|, |R|) / max(|L|, |R|)`; zero when both are zero.
pub fn symmetry(left: f64, right: f64) -> f64 {
    let (a, b) = (left.abs(), right.abs());
    let hi = a.max(b);
    if hi == 0.0 {
        0.0
    } else {
        1.0 - a.min(b) / hi
    }
}

const PER_FOOT: usize = SPD_COUNT * STAT_COUNT + FRAME_FEATURE_COUNT * STAT_COUNT * STAT_COUNT;
const FUSION_BLOCK: usize = FUSION_PER_STEP * STAT_COUNT;
pub const WHOLE_FEATURE_COUNT: usize = 2 * PER_FOOT + FUSION_BLOCK + PER_FOOT;

fn build_names() -> Vec<String> {
    let mut names = Vec::with_capacity(WHOLE_FEATURE_COUNT);
    let per_foot = |prefix: &str, suffix: &str, names: &mut Vec<String>| {
        for spd in SPD_NAMES {
            for s2 in STAT_NAMES {
                names.push(format!("{prefix}{spd}_{s2}{suffix}"));
            }
        }
        for f in FRAME_FEATURE_NAMES {
            for s1 in STAT_NAMES {
                for s2 in STAT_NAMES {
                    names.push(format!("{prefix}{f}_{s1}_{s2}{suffix}"));
                }
            }
        }
    };
    for foot in Foot::BOTH {
        per_foot(&foot.letter().to_string(), "", &mut names);
    }
    for (mode, i, j) in fusion_layout() {
        let base = fusion_name(mode, i, j);
        for s2 in STAT_NAMES {
            names.push(format!("{base}_{s2}"));
        }
    }
    per_foot("", "_Symmetry", &mut names);
    debug_assert_eq!(names.len(), WHOLE_FEATURE_COUNT);
    names
}

/// Whole-feature names in vector order. Identical for every test.
pub fn feature_names() -> &'static [String] {
    static NAMES: OnceLock<Vec<String>> = OnceLock::new();
    NAMES.get_or_init(build_names)
}

fn foot_block(f: &FootStepFeatures, out: &mut Vec<f64>) -> Result<()> {
    let mut series = Vec::with_capacity(f.durations.len());
    for k in 0..SPD_COUNT {
        series.clear();
        series.extend(f.durations.iter().filter_map(|d| d.get(k)));
        out.extend_from_slice(&whole_statistics(&series)?);
    }
    for feat in 0..FRAME_FEATURE_COUNT {
        for s1 in 0..STAT_COUNT {
            series.clear();
            series.extend(f.statistics.iter().map(|step| step[feat][s1]));
            out.extend_from_slice(&whole_statistics(&series)?);
        }
    }
    Ok(())
}

/// Assembles the whole-feature vector of a test, ordered as
/// [`feature_names`].
pub fn whole_vector(steps: &TestStepFeatures) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(WHOLE_FEATURE_COUNT);
    for foot in Foot::BOTH {
        foot_block(steps.foot(foot), &mut out)?;
    }

    if steps.fusion.len() < MIN_STEPS_PER_TEST {
        return Err(Error::TooShort(format!(
            "whole statistics need {MIN_STEPS_PER_TEST} steps, got {}",
            steps.fusion.len()
        )));
    }
    let mut series = vec![0.0; steps.fusion.len()];
    for slot in 0..FUSION_PER_STEP {
        for (v, step) in series.iter_mut().zip(&steps.fusion) {
            *v = step[slot];
        }
        out.extend_from_slice(&whole_statistics(&series)?);
    }

    for k in 0..PER_FOOT {
        out.push(symmetry(out[k], out[PER_FOOT + k]));
    }
    debug_assert_eq!(out.len(), WHOLE_FEATURE_COUNT);
    Ok(out)
}

/// Sensing modality a feature draws on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureOrigin {
    Imu,
    Pressure,
    /// A fusion feature pairing an IMU series with a pressure series.
    CrossModal,
}

fn frame_token_is_imu(token: &str) -> Option<bool> {
    let bare = token
        .strip_prefix('L')
        .or_else(|| token.strip_prefix('R'))
        .unwrap_or(token);
    if bare.starts_with("Fore") || bare.starts_with("Back") {
        Some(true)
    } else if bare.starts_with("Mat") || bare.starts_with("Image") || bare.starts_with("Gait") {
        Some(false)
    } else {
        None
    }
}

pub fn feature_origin(name: &str) -> Result<FeatureOrigin> {
    let bad = || Error::Schema(format!("cannot infer modality of feature `{name}`"));
    let parts: Vec<&str> = name.split('_').collect();
    let is_fusion = parts.len() >= 3 && (parts[1] == "MaxTime" || parts[1] == "MinTime");
    let first = frame_token_is_imu(parts[0]).ok_or_else(bad)?;
    if is_fusion {
        let second = frame_token_is_imu(parts[2]).ok_or_else(bad)?;
        return Ok(match (first, second) {
            (true, true) => FeatureOrigin::Imu,
            (false, false) => FeatureOrigin::Pressure,
            _ => FeatureOrigin::CrossModal,
        });
    }
    Ok(if first {
        FeatureOrigin::Imu
    } else {
        FeatureOrigin::Pressure
    })
}

/// Modality of frame feature `index` of one foot.
pub fn frame_feature_origin(index: usize) -> FeatureOrigin {
    if is_imu_feature(index) {
        FeatureOrigin::Imu
    } else {
        FeatureOrigin::Pressure
    }
}

/// Per-feature mean and population SD fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScore {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl ZScore {
    /// Fits on every row of `train`. Callers pass only training rows.
    pub fn fit(train: &FeatureTable) -> Result<Self> {
        if train.rows.is_empty() {
            return Err(Error::Domain("z-score fit needs at least one row".into()));
        }
        let n = train.rows.len() as f64;
        let p = train.names.len();
        let mut means = vec![0.0; p];
        for r in &train.rows {
            for (m, v) in means.iter_mut().zip(&r.values) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut sds = vec![0.0; p];
        for r in &train.rows {
            for ((s, v), m) in sds.iter_mut().zip(&r.values).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        sds.iter_mut().for_each(|s| *s = (*s / n).sqrt());
        // columns whose training values are all identical are constant even
        // if rounding left a tiny spread
        for (k, s) in sds.iter_mut().enumerate() {
            let first = train.rows[0].values[k];
            if train.rows.iter().all(|r| r.values[k] == first) {
                *s = 0.0;
            }
        }
        Ok(Self { means, sds })
    }

    pub fn is_constant(&self, feature: usize) -> bool {
        self.sds[feature] == 0.0
    }

    pub fn constant_features(&self) -> Vec<usize> {
        (0..self.sds.len()).filter(|&k| self.is_constant(k)).collect()
    }

    pub fn transform_value(&self, feature: usize, x: f64) -> f64 {
        if self.is_constant(feature) {
            0.0
        } else {
            (x - self.means[feature]) / self.sds[feature]
        }
    }

    pub fn apply(&self, table: &FeatureTable) -> Result<FeatureTable> {
        if table.names.len() != self.means.len() {
            return Err(Error::Schema(format!(
                "z-score fitted on {} features, table has {}",
                self.means.len(),
                table.names.len()
            )));
        }
        let mut out = table.clone();
        for r in &mut out.rows {
            for (k, v) in r.values.iter_mut().enumerate() {
                *v = self.transform_value(k, *v);
            }
        }
        out.normalized = true;
        Ok(out)
    }
}

/// Fits on the rows listed in `fit_rows` and normalizes every row.
pub fn zscore_fit_apply(table: &FeatureTable, fit_rows: &[usize]) -> Result<(FeatureTable, ZScore)> {
    let z = ZScore::fit(&table.subset(fit_rows))?;
    Ok((z.apply(table)?, z))
}
