//! Seeded synthetic gait generator with known ground truth.
//!
//! Each foot alternates stance and swing on a shared cadence. During stance a
//! Gaussian pressure blob rolls from heel to toe under an M-shaped force
//! envelope; during swing the insole reads only sensor noise. IMU channels
//! are harmonics locked to the gait phase. A hemiplegic side with asymmetry
//! `a` gets a shorter stance, lighter loading and weaker IMU swings.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recording::{
    Cohort, Foot, ImuReading, MrcGrade, Routine, ShoeSample, SubjectLabel, TestRecording,
    RAW_HEIGHT, RAW_PIXELS, RAW_WIDTH, SAMPLE_RATE_HZ,
};

pub const MIN_DURATION_S: f64 = 10.0;
pub const DEFAULT_DURATION_S: f64 = 15.0;
pub const STRENGTH_MIN: f64 = 2.67;
pub const STRENGTH_MAX: f64 = 4.67;
pub const PATIENT_ASYMMETRY: (f64, f64) = (0.2, 0.8);
pub const HEALTHY_ASYMMETRY: (f64, f64) = (0.0, 0.05);
/// Peak sensor count under the blob centre for a unit-amplitude subject.
pub const PEAK_COUNTS: f64 = 200.0;

const HEEL_ROW: f64 = 19.0;
const TOE_ROW: f64 = 5.0;
const BLOB_SIGMA_X: f64 = 3.0;
const BLOB_SIGMA_Y: f64 = 5.0;
const GRAVITY: f64 = 9.81;
const TURN_RATE: f64 = 0.6;

/// Walking parameters of one subject.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitProfile {
    /// Gait cycles per minute of each foot.
    pub cadence: f64,
    pub stance_ratio: f64,
    pub double_support_ratio: f64,
    /// 0 is symmetric.
    pub asymmetry: f64,
    pub hemiplegic_side: Foot,
    /// Sensor noise SD as a fraction of the peak signal.
    pub noise_sd: f64,
    /// Overall loading scale.
    pub amplitude: f64,
    /// Interior transmission gaps to inject per foot.
    pub dropouts: usize,
    pub seed: u64,
}

impl GaitProfile {
    pub fn new(cadence: f64, stance_ratio: f64, asymmetry: f64, hemiplegic_side: Foot, seed: u64) -> Self {
        Self {
            cadence,
            stance_ratio,
            double_support_ratio: (2.0 * stance_ratio - 1.0).max(0.0),
            asymmetry,
            hemiplegic_side,
            noise_sd: 0.02,
            amplitude: 1.0,
            dropouts: 0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.cadence > 0.0 && self.cadence <= 90.0) {
            return bad(format!("cadence {} outside (0, 90] cycles/min", self.cadence));
        }
        if !(self.stance_ratio > 0.0 && self.stance_ratio < 1.0) {
            return bad(format!("stance ratio {} outside (0, 1)", self.stance_ratio));
        }
        let ds = (2.0 * self.stance_ratio - 1.0).max(0.0);
        if !(self.double_support_ratio >= 0.0 && self.double_support_ratio < self.stance_ratio)
            || (self.double_support_ratio - ds).abs() > 1e-9
        {
            return bad(format!(
                "double support ratio {} inconsistent with stance ratio {} (expected {ds})",
                self.double_support_ratio, self.stance_ratio
            ));
        }
        if !(0.0..=1.0).contains(&self.asymmetry) {
            return bad(format!("asymmetry {} outside [0, 1]", self.asymmetry));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd < 0.5) || !(self.amplitude > 0.0) {
            return bad("noise and amplitude must be non-negative and positive".into());
        }
        Ok(())
    }
}

/// How strongly a routine expresses the subject's asymmetry. Turning toward
/// the weak side loads it hardest; straight walking is the least consistent.
fn routine_gain(routine: Routine, side: Foot, rng: &mut ChaCha8Rng) -> f64 {
    let toward_weak = matches!(
        (routine, side),
        (Routine::RightTurning, Foot::Right) | (Routine::LeftTurning, Foot::Left)
    );
    let (centre, jitter) = match routine {
        Routine::Straight => (0.6, 0.15),
        _ if toward_weak => (1.0, 0.03),
        _ => (0.85, 0.03),
    };
    let g: f64 = centre + jitter * Normal::new(0.0, 1.0).unwrap().sample(rng);
    g.clamp(0.2, 1.1)
}

/// True event frames of one foot, in absolute frame indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootTruth {
    pub strikes: Vec<u64>,
    pub toe_offs: Vec<u64>,
    pub stance_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingTruth {
    pub subject_id: String,
    pub routine: Routine,
    pub effective_asymmetry: f64,
    pub left: FootTruth,
    pub right: FootTruth,
}

/// Force envelope over a stance phase, `u` in `[0, 1)`: short ramps, two
/// humps and a mid-stance trough.
pub fn stance_envelope(u: f64) -> f64 {
    const KNOTS: [(f64, f64); 7] = [
        (0.0, 0.25),
        (0.1, 0.85),
        (0.2, 1.0),
        (0.5, 0.7),
        (0.8, 1.0),
        (0.9, 0.85),
        (1.0, 0.25),
    ];
    let u = u.clamp(0.0, 1.0);
    for w in KNOTS.windows(2) {
        let ((u0, v0), (u1, v1)) = (w[0], w[1]);
        if u <= u1 {
            return v0 + (v1 - v0) * (u - u0) / (u1 - u0);
        }
    }
    KNOTS[6].1
}

struct FootPlan {
    strikes: Vec<u64>,
    /// Stance frames of each strike.
    stance: Vec<u64>,
    load: f64,
    imu_gain: f64,
    stance_ratio: f64,
}

fn schedule(n_frames: u64, period: f64, phase: f64, stance_ratio: f64, rng: &mut ChaCha8Rng) -> (Vec<u64>, Vec<u64>) {
    let jitter = Normal::new(0.0_f64, 0.3).unwrap();
    let mut strikes = Vec::new();
    let mut k = 0.0;
    loop {
        let t: f64 = phase + k * period + jitter.sample(rng).clamp(-0.9_f64, 0.9);
        let t = t.round().max(0.0) as u64;
        if t >= n_frames {
            break;
        }
        if strikes.last().is_none_or(|&prev| t > prev) {
            strikes.push(t);
        }
        k += 1.0;
    }
    let stance = strikes
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let cycle = strikes.get(i + 1).map_or(period, |&n| (n - s) as f64);
            (stance_ratio * cycle).round().max(1.0) as u64
        })
        .collect();
    (strikes, stance)
}

/// Stance index and phase `u` of frame `t`, if the foot is loaded.
fn stance_at(plan: &FootPlan, t: u64) -> Option<(usize, f64)> {
    let k = plan.strikes.partition_point(|&s| s <= t).checked_sub(1)?;
    let since = t - plan.strikes[k];
    (since < plan.stance[k]).then(|| (k, since as f64 / plan.stance[k] as f64))
}

fn imu_at(phase: f64, gain: f64, hind: bool, turn: f64, noise: &Normal<f64>, rng: &mut ChaCha8Rng) -> ImuReading {
    let tau = std::f64::consts::TAU;
    let p = tau * phase;
    let lag = if hind { 0.4 } else { 0.0 };
    let scale = if hind { 0.7 } else { 1.0 };
    let g = gain * scale;
    let acc = [
        g * (3.0 * (p - lag).sin() + 1.2 * (2.0 * p + 0.3).sin()),
        g * (1.5 * (p + 0.8).cos() + 0.5 * (3.0 * p).sin()),
        GRAVITY + g * (2.0 * (2.0 * p - lag).cos() + 0.8 * (p + 1.1).sin()),
    ];
    let gyro = [
        g * (0.8 * (p + 0.2).sin() + 0.3 * (2.0 * p).cos()),
        g * (2.5 * (p - lag).cos() + 0.9 * (2.0 * p + 0.5).sin()),
        turn + g * (0.4 * (p + 1.4).sin()),
    ];
    let mut v = [acc[0], acc[1], acc[2], gyro[0], gyro[1], gyro[2]];
    for x in &mut v {
        *x += noise.sample(rng);
    }
    ImuReading::from_array(v)
}

/// Generates one test of `duration_s` seconds for the subject described by
/// `profile`. The truth lists every simulated strike and toe-off.
pub fn generate_recording(
    profile: &GaitProfile,
    subject_id: &str,
    label: SubjectLabel,
    routine: Routine,
    duration_s: f64,
) -> Result<(TestRecording, RecordingTruth)> {
    profile.validate()?;
    if !(duration_s >= MIN_DURATION_S) {
        return Err(Error::Config(format!("duration {duration_s} s is below {MIN_DURATION_S} s")));
    }
    let routine_index = Routine::ALL.iter().position(|&r| r == routine).unwrap_or(0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed ^ (0xA076_1D64_78BD_642F_u64.wrapping_mul(routine_index + 1)));
    let a = profile.asymmetry * routine_gain(routine, profile.hemiplegic_side, &mut rng);

    let fs = SAMPLE_RATE_HZ as f64;
    let n_frames = (duration_s * fs).round() as u64;
    let period = 60.0 * fs / profile.cadence;
    let left_phase = rng.random_range(0.0..period);
    let right_phase = (left_phase + period / 2.0) % period;

    let mut plans = Vec::with_capacity(2);
    for (foot, phase) in [(Foot::Left, left_phase), (Foot::Right, right_phase)] {
        let weak = foot == profile.hemiplegic_side;
        let stance_ratio = if weak {
            profile.stance_ratio * (1.0 - 0.25 * a)
        } else {
            profile.stance_ratio
        };
        let (strikes, stance) = schedule(n_frames, period, phase, stance_ratio, &mut rng);
        plans.push(FootPlan {
            strikes,
            stance,
            load: profile.amplitude * if weak { 1.0 - 0.5 * a } else { 1.0 },
            imu_gain: profile.amplitude * if weak { 1.0 - 0.4 * a } else { 1.0 },
            stance_ratio,
        });
    }

    let turn = match routine {
        Routine::Straight => 0.0,
        Routine::RightTurning => -TURN_RATE,
        Routine::LeftTurning => TURN_RATE,
    };
    let sensor_noise = Normal::new(0.0, profile.noise_sd * PEAK_COUNTS * profile.amplitude).unwrap();
    let imu_noise = Normal::new(0.0, profile.noise_sd * 3.0).unwrap();
    let right_offset = rng.random_range(0..3u64);

    let mut streams: Vec<Vec<ShoeSample>> = Vec::with_capacity(2);
    for (f, plan) in plans.iter().enumerate() {
        let first = if f == 1 { right_offset } else { 0 };
        let mut stream = Vec::with_capacity(n_frames as usize);
        for t in first..n_frames {
            let mut pressure = vec![0.0; RAW_PIXELS];
            if let Some((_, u)) = stance_at(plan, t) {
                let amp = PEAK_COUNTS * plan.load * stance_envelope(u);
                let cy = HEEL_ROW + (TOE_ROW - HEEL_ROW) * u;
                let cx = (RAW_WIDTH as f64 - 1.0) / 2.0;
                for y in 0..RAW_HEIGHT {
                    let dy = (y as f64 - cy) / BLOB_SIGMA_Y;
                    for x in 0..RAW_WIDTH {
                        let dx = (x as f64 - cx) / BLOB_SIGMA_X;
                        pressure[y * RAW_WIDTH + x] = amp * (-0.5 * (dx * dx + dy * dy)).exp();
                    }
                }
            }
            for p in &mut pressure {
                *p = (*p + sensor_noise.sample(&mut rng)).max(0.0).round();
            }
            // gait phase within the current cycle, 0 at heel strike
            let k = plan.strikes.partition_point(|&s| s <= t);
            let phase = match k {
                0 => 1.0 - (plan.strikes.first().map_or(0, |&s| s) - t) as f64 / period,
                _ => (t - plan.strikes[k - 1]) as f64 / period,
            };
            stream.push(ShoeSample {
                t_index: t,
                pressure,
                fore_imu: imu_at(phase, plan.imu_gain, false, turn, &imu_noise, &mut rng),
                hind_imu: imu_at(phase, plan.imu_gain, true, turn, &imu_noise, &mut rng),
            });
        }
        // interior dropouts of 1..=4 frames, kept away from the ends
        for _ in 0..profile.dropouts {
            let len = stream.len();
            if len < 40 {
                break;
            }
            let at = rng.random_range(10..len - 15);
            let n = rng.random_range(1..=4usize);
            stream.drain(at..at + n);
        }
        streams.push(stream);
    }

    let truth_of = |plan: &FootPlan| FootTruth {
        strikes: plan.strikes.clone(),
        toe_offs: plan
            .strikes
            .iter()
            .zip(&plan.stance)
            .map(|(&s, &d)| s + d)
            .collect(),
        stance_ratio: plan.stance_ratio,
    };
    let truth = RecordingTruth {
        subject_id: subject_id.to_string(),
        routine,
        effective_asymmetry: a,
        left: truth_of(&plans[0]),
        right: truth_of(&plans[1]),
    };
    let right = streams.pop().unwrap_or_default();
    let left = streams.pop().unwrap_or_default();
    let rec = TestRecording {
        subject_id: subject_id.to_string(),
        routine,
        left,
        right,
        sample_rate: SAMPLE_RATE_HZ,
        label,
    };
    Ok((rec, truth))
}

/// Monotone map from asymmetry to MRC-scale strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StrengthMap {
    /// 0.2 maps to 4.67 and 0.8 to 2.67, clamped to that range.
    Linear,
}

impl StrengthMap {
    pub fn strength(self, asymmetry: f64) -> f64 {
        match self {
            StrengthMap::Linear => {
                let (lo, hi) = PATIENT_ASYMMETRY;
                let s = STRENGTH_MAX - (asymmetry - lo) / (hi - lo) * (STRENGTH_MAX - STRENGTH_MIN);
                s.clamp(STRENGTH_MIN, STRENGTH_MAX)
            }
        }
    }
}

/// Two physicians' grades bracketing a latent strength: one rounds up from
/// slightly above, the other from slightly below.
pub fn physician_grades(strength: f64) -> (MrcGrade, MrcGrade) {
    (
        MrcGrade::nearest(strength + 1.0 / 12.0),
        MrcGrade::nearest(strength - 1.0 / 12.0),
    )
}

/// One simulated subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectPlan {
    pub subject_id: String,
    pub cohort: Cohort,
    pub profile: GaitProfile,
    /// Latent strength from the strength map; patients only.
    pub strength: Option<f64>,
    pub mrc_a: Option<String>,
    pub mrc_b: Option<String>,
    /// Mean of the two grades, the regression target.
    pub truth: Option<f64>,
}

impl SubjectPlan {
    pub fn label(&self) -> Result<SubjectLabel> {
        match (self.cohort, &self.mrc_a, &self.mrc_b) {
            (Cohort::Patient, Some(a), Some(b)) => Ok(SubjectLabel::patient(a.parse()?, b.parse()?)),
            (Cohort::Healthy, _, _) => Ok(SubjectLabel::healthy()),
            _ => Err(Error::Config(format!("patient {} lacks grades", self.subject_id))),
        }
    }

    pub fn recording(&self, routine: Routine, duration_s: f64) -> Result<(TestRecording, RecordingTruth)> {
        generate_recording(&self.profile, &self.subject_id, self.label()?, routine, duration_s)
    }
}

/// Draws subject parameters for a cohort. Deterministic in `seed`.
pub fn cohort_plan(n_patients: usize, n_healthy: usize, strength_map: StrengthMap, seed: u64) -> Result<Vec<SubjectPlan>> {
    if n_patients < 2 {
        return Err(Error::Config(format!(
            "need at least 2 patients for strength regression, got {n_patients}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plans = Vec::with_capacity(n_patients + n_healthy);
    let groups = [(Cohort::Patient, n_patients, 'P'), (Cohort::Healthy, n_healthy, 'H')];
    for (cohort, n, tag) in groups {
        for i in 0..n {
            let (lo, hi) = match cohort {
                Cohort::Patient => PATIENT_ASYMMETRY,
                Cohort::Healthy => HEALTHY_ASYMMETRY,
            };
            let asymmetry = rng.random_range(lo..=hi);
            let side = if rng.random_bool(18.0 / 23.0) { Foot::Right } else { Foot::Left };
            let mut profile = GaitProfile::new(
                rng.random_range(40.0..55.0),
                rng.random_range(0.58..0.64),
                asymmetry,
                side,
                rng.random(),
            );
            profile.amplitude = rng.random_range(0.8..1.2);
            profile.dropouts = rng.random_range(0..=2);
            let (strength, grades) = match cohort {
                Cohort::Patient => {
                    let s = strength_map.strength(asymmetry);
                    (Some(s), Some(physician_grades(s)))
                }
                Cohort::Healthy => (None, None),
            };
            plans.push(SubjectPlan {
                subject_id: format!("{tag}{:02}", i + 1),
                cohort,
                profile,
                strength,
                mrc_a: grades.map(|g| g.0.token().to_string()),
                mrc_b: grades.map(|g| g.1.token().to_string()),
                truth: grades.map(|(a, b)| (a.numeric() + b.numeric()) / 2.0),
            });
        }
    }
    Ok(plans)
}

/// A generated cohort held in memory.
#[derive(Debug, Clone)]
pub struct SyntheticCohort {
    pub subjects: Vec<SubjectPlan>,
    pub recordings: Vec<TestRecording>,
    pub truths: Vec<RecordingTruth>,
}

/// Every subject walks all three routines. Memory grows with cohort size;
/// [`write_cohort`] streams to disk instead.
pub fn generate_cohort(
    n_patients: usize,
    n_healthy: usize,
    strength_map: StrengthMap,
    seed: u64,
    duration_s: f64,
) -> Result<SyntheticCohort> {
    let subjects = cohort_plan(n_patients, n_healthy, strength_map, seed)?;
    let mut recordings = Vec::new();
    let mut truths = Vec::new();
    for s in &subjects {
        for routine in Routine::ALL {
            let (r, t) = s.recording(routine, duration_s)?;
            recordings.push(r);
            truths.push(t);
        }
    }
    Ok(SyntheticCohort {
        subjects,
        recordings,
        truths,
    })
}

/// Contents of `truth.json`, for tests and reports only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthManifest {
    pub seed: u64,
    pub duration_s: f64,
    pub strength_map: StrengthMap,
    pub subjects: Vec<SubjectPlan>,
    pub recordings: Vec<RecordingTruth>,
}

pub fn recording_file_name(subject_id: &str, routine: Routine) -> String {
    format!("{subject_id}_{}.gaitrec", routine.token())
}

/// Writes every recording plus `truth.json` into `dir`.
pub fn write_cohort(
    dir: &Path,
    n_patients: usize,
    n_healthy: usize,
    strength_map: StrengthMap,
    seed: u64,
    duration_s: f64,
) -> Result<TruthManifest> {
    std::fs::create_dir_all(dir)?;
    let subjects = cohort_plan(n_patients, n_healthy, strength_map, seed)?;
    let mut recordings = Vec::new();
    for s in &subjects {
        for routine in Routine::ALL {
            let (rec, truth) = s.recording(routine, duration_s)?;
            rec.write_to(&dir.join(recording_file_name(&s.subject_id, routine)))?;
            recordings.push(truth);
        }
    }
    let manifest = TruthManifest {
        seed,
        duration_s,
        strength_map,
        subjects,
        recordings,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(dir.join("truth.json"), json + "\n")?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(a: f64, seed: u64) -> GaitProfile {
        GaitProfile::new(48.0, 0.6, a, Foot::Right, seed)
    }

    #[test]
    fn strength_map_endpoints() {
        assert!((StrengthMap::Linear.strength(0.2) - 4.67).abs() < 1e-12);
        assert!((StrengthMap::Linear.strength(0.8) - 2.67).abs() < 1e-12);
        assert!((StrengthMap::Linear.strength(0.5) - 3.67).abs() < 1e-12);
    }

    #[test]
    fn grades_bracket_strength() {
        for k in 0..=200 {
            let s = STRENGTH_MIN + 2.0 * k as f64 / 200.0;
            let (a, b) = physician_grades(s);
            let truth = (a.numeric() + b.numeric()) / 2.0;
            assert!((truth - s).abs() <= 1.0 / 12.0 + 0.01, "{s} -> {truth}");
        }
    }

    #[test]
    fn envelope_shape() {
        assert_eq!(stance_envelope(0.2), 1.0);
        assert_eq!(stance_envelope(0.8), 1.0);
        assert!((stance_envelope(0.5) - 0.7).abs() < 1e-12);
        assert!(stance_envelope(0.0) > 0.2);
    }

    #[test]
    fn rejects_bad_profiles() {
        let mut p = profile(0.0, 1);
        p.double_support_ratio = 0.5;
        assert!(p.validate().is_err());
        let p = GaitProfile::new(48.0, 1.2, 0.0, Foot::Left, 1);
        assert!(p.validate().is_err());
        let short = generate_recording(&profile(0.0, 1), "X", SubjectLabel::healthy(), Routine::Straight, 5.0);
        assert!(short.is_err());
        assert!(cohort_plan(1, 5, StrengthMap::Linear, 0).is_err());
    }

    #[test]
    fn strike_count_matches_schedule() {
        for seed in 0..20 {
            let p = profile(0.3, seed);
            let (_, t) = generate_recording(&p, "X", SubjectLabel::healthy(), Routine::Straight, 15.0).unwrap();
            let expected = (15.0 * p.cadence / 60.0_f64).floor() as i64;
            for foot in [&t.left, &t.right] {
                let n = foot.strikes.len() as i64;
                assert!((n - expected).abs() <= 1, "{n} vs {expected}");
            }
        }
    }

    #[test]
    fn weak_side_has_shorter_stance() {
        let mut p = profile(0.5, 9);
        p.noise_sd = 0.0;
        let (_, t) = generate_recording(&p, "X", SubjectLabel::healthy(), Routine::RightTurning, 15.0).unwrap();
        assert!(t.right.stance_ratio < t.left.stance_ratio);
        let mean_stance = |f: &FootTruth| {
            let d: Vec<f64> = f.strikes.iter().zip(&f.toe_offs).map(|(s, o)| (o - s) as f64).collect();
            d.iter().sum::<f64>() / d.len() as f64
        };
        assert!(mean_stance(&t.right) < mean_stance(&t.left));
    }

    #[test]
    fn deterministic_and_writable() {
        let a = generate_cohort(2, 1, StrengthMap::Linear, 42, 10.0).unwrap();
        let b = generate_cohort(2, 1, StrengthMap::Linear, 42, 10.0).unwrap();
        assert_eq!(a.recordings, b.recordings);
        assert_eq!(a.recordings.len(), 9);
        let text = a.recordings[0].to_canonical_string().unwrap();
        let back: TestRecording = text.parse().unwrap();
        assert_eq!(back, a.recordings[0]);
        assert_eq!(a.subjects[0].truth, b.subjects[0].truth);
        assert!(a.subjects[2].truth.is_none());
    }

    #[test]
    fn cohort_sizes() {
        let plans = cohort_plan(23, 17, StrengthMap::Linear, 7).unwrap();
        assert_eq!(plans.len() * Routine::ALL.len(), 120);
        for p in &plans {
            let t = p.truth.unwrap_or(STRENGTH_MIN);
            assert!((STRENGTH_MIN..=STRENGTH_MAX).contains(&t));
            match p.cohort {
                Cohort::Patient => assert!((0.2..=0.8).contains(&p.profile.asymmetry)),
                Cohort::Healthy => assert!(p.profile.asymmetry <= 0.05),
            }
        }
    }
}
