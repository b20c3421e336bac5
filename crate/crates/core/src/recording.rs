//! Recording data model and the line-oriented `gaitrec` text format.
//!
//! A recording file starts with a header line
//!
//! ```text
//! #gaitrec v1 subject=<id> routine=<straight|rt|lt> cohort=<patient|healthy> [mrc_a=<g> mrc_b=<g>]
//! ```
//!
//! followed by one line per (foot, frame):
//!
//! ```text
//! L t=<int> p=<400 comma-separated ints> fore=<6 floats> hind=<6 floats>
//! ```
//!
//! Pressure values are row-major over the 16-column by 25-row insole grid.
//! IMU triples are `acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z`. Frame indices
//! missing from the 60 Hz grid denote transmission loss and are filled by
//! [`repair_gaps`].

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RAW_WIDTH: usize = 16;
pub const RAW_HEIGHT: usize = 25;
pub const RAW_PIXELS: usize = RAW_WIDTH * RAW_HEIGHT;
pub const SAMPLE_RATE_HZ: u32 = 60;
/// Longest run of lost frames that [`repair_gaps`] will interpolate across.
pub const MAX_REPAIR_GAP: u64 = 30;

const MAGIC: &str = "#gaitrec";
const VERSION: &str = "v1";

/// One 6-axis IMU reading: acceleration in g, angular velocity in deg/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImuReading {
    pub acc: [f64; 3],
    pub gyro: [f64; 3],
}

impl ImuReading {
    pub fn new(acc: [f64; 3], gyro: [f64; 3]) -> Self {
        Self { acc, gyro }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.acc[0],
            self.acc[1],
            self.acc[2],
            self.gyro[0],
            self.gyro[1],
            self.gyro[2],
        ]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            acc: [v[0], v[1], v[2]],
            gyro: [v[3], v[4], v[5]],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    fn lerp(&self, other: &Self, i: u64, m: u64) -> Self {
        let a = self.to_array();
        let b = other.to_array();
        let mut out = [0.0; 6];
        for k in 0..6 {
            out[k] = lerp(a[k], b[k], i, m);
        }
        Self::from_array(out)
    }
}

/// One frame of one shoe.
#[derive(Debug, Clone, PartialEq)]
pub struct ShoeSample {
    pub t_index: u64,
    /// Row-major 16x25 sensor counts.
    pub pressure: Vec<f64>,
    pub fore_imu: ImuReading,
    pub hind_imu: ImuReading,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Foot {
    Left,
    Right,
}

impl Foot {
    pub const BOTH: [Foot; 2] = [Foot::Left, Foot::Right];

    pub fn letter(self) -> char {
        match self {
            Foot::Left => 'L',
            Foot::Right => 'R',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Routine {
    #[serde(rename = "straight")]
    Straight,
    #[serde(rename = "rt")]
    RightTurning,
    #[serde(rename = "lt")]
    LeftTurning,
}

impl Routine {
    pub const ALL: [Routine; 3] = [
        Routine::Straight,
        Routine::RightTurning,
        Routine::LeftTurning,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Routine::Straight => "straight",
            Routine::RightTurning => "rt",
            Routine::LeftTurning => "lt",
        }
    }
}

impl fmt::Display for Routine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Routine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "straight" => Ok(Routine::Straight),
            "rt" => Ok(Routine::RightTurning),
            "lt" => Ok(Routine::LeftTurning),
            other => Err(Error::Domain(format!("unknown routine `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cohort {
    Patient,
    Healthy,
}

impl Cohort {
    pub fn token(self) -> &'static str {
        match self {
            Cohort::Patient => "patient",
            Cohort::Healthy => "healthy",
        }
    }
}

impl fmt::Display for Cohort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Cohort {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "patient" => Ok(Cohort::Patient),
            "healthy" => Ok(Cohort::Healthy),
            other => Err(Error::Domain(format!("unknown cohort `{other}`"))),
        }
    }
}

/// MRC muscle-strength sub-grade as scored by a physician.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MrcGrade {
    ThreeMinus,
    Three,
    ThreePlus,
    FourMinus,
    Four,
    FourPlus,
    FiveMinus,
}

impl MrcGrade {
    pub const ALL: [MrcGrade; 7] = [
        MrcGrade::ThreeMinus,
        MrcGrade::Three,
        MrcGrade::ThreePlus,
        MrcGrade::FourMinus,
        MrcGrade::Four,
        MrcGrade::FourPlus,
        MrcGrade::FiveMinus,
    ];

    pub fn token(self) -> &'static str {
        match self {
            MrcGrade::ThreeMinus => "3-",
            MrcGrade::Three => "3",
            MrcGrade::ThreePlus => "3+",
            MrcGrade::FourMinus => "4-",
            MrcGrade::Four => "4",
            MrcGrade::FourPlus => "4+",
            MrcGrade::FiveMinus => "5-",
        }
    }

    pub fn numeric(self) -> f64 {
        match self {
            MrcGrade::ThreeMinus => 2.67,
            MrcGrade::Three => 3.00,
            MrcGrade::ThreePlus => 3.33,
            MrcGrade::FourMinus => 3.67,
            MrcGrade::Four => 4.00,
            MrcGrade::FourPlus => 4.33,
            MrcGrade::FiveMinus => 4.67,
        }
    }

    /// Grade whose numeric value is closest to `x`; ties go to the lower grade.
    pub fn nearest(x: f64) -> MrcGrade {
        let mut best = MrcGrade::ThreeMinus;
        for g in MrcGrade::ALL {
            if (g.numeric() - x).abs() < (best.numeric() - x).abs() {
                best = g;
            }
        }
        best
    }
}

impl fmt::Display for MrcGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for MrcGrade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MrcGrade::ALL
            .into_iter()
            .find(|g| g.token() == s)
            .ok_or_else(|| Error::UnknownGrade(s.to_string()))
    }
}

/// Maps an MRC grade token to its numeric strength.
pub fn mrc_numeric(grade: &str) -> Result<f64> {
    grade.parse::<MrcGrade>().map(MrcGrade::numeric)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubjectLabel {
    pub cohort: Cohort,
    pub mrc_a: Option<MrcGrade>,
    pub mrc_b: Option<MrcGrade>,
}

impl SubjectLabel {
    pub fn healthy() -> Self {
        Self {
            cohort: Cohort::Healthy,
            mrc_a: None,
            mrc_b: None,
        }
    }

    pub fn patient(mrc_a: MrcGrade, mrc_b: MrcGrade) -> Self {
        Self {
            cohort: Cohort::Patient,
            mrc_a: Some(mrc_a),
            mrc_b: Some(mrc_b),
        }
    }

    /// Ground-truth strength: the mean of the two physicians' numeric grades.
    pub fn truth(&self) -> Option<f64> {
        match (self.cohort, self.mrc_a, self.mrc_b) {
            (Cohort::Patient, Some(a), Some(b)) => Some((a.numeric() + b.numeric()) / 2.0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestRecording {
    pub subject_id: String,
    pub routine: Routine,
    pub left: Vec<ShoeSample>,
    pub right: Vec<ShoeSample>,
    pub sample_rate: u32,
    pub label: SubjectLabel,
}

impl TestRecording {
    pub fn stream(&self, foot: Foot) -> &[ShoeSample] {
        match foot {
            Foot::Left => &self.left,
            Foot::Right => &self.right,
        }
    }

    /// Fills transmission gaps in both streams and trims them to their common
    /// frame window.
    pub fn repaired_and_synchronized(&self) -> Result<TestRecording> {
        let left = repair_gaps(&self.left)?;
        let right = repair_gaps(&self.right)?;
        let (left, right) = synchronize(left, right)?;
        Ok(TestRecording {
            subject_id: self.subject_id.clone(),
            routine: self.routine,
            left,
            right,
            sample_rate: self.sample_rate,
            label: self.label,
        })
    }

    pub fn to_canonical_string(&self) -> Result<String> {
        let mut out = String::new();
        write!(
            out,
            "{MAGIC} {VERSION} subject={} routine={} cohort={}",
            self.subject_id,
            self.routine.token(),
            self.label.cohort.token()
        )
        .unwrap();
        if let (Some(a), Some(b)) = (self.label.mrc_a, self.label.mrc_b) {
            write!(out, " mrc_a={a} mrc_b={b}").unwrap();
        }
        out.push('\n');

        let (mut li, mut ri) = (0, 0);
        while li < self.left.len() || ri < self.right.len() {
            let take_left = match (self.left.get(li), self.right.get(ri)) {
                (Some(l), Some(r)) => l.t_index <= r.t_index,
                (Some(_), None) => true,
                _ => false,
            };
            if take_left {
                write_sample(&mut out, Foot::Left, &self.left[li])?;
                li += 1;
            } else {
                write_sample(&mut out, Foot::Right, &self.right[ri])?;
                ri += 1;
            }
        }
        Ok(out)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_canonical_string()?)?;
        Ok(())
    }
}

impl FromStr for TestRecording {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_recording_str(s)
    }
}

fn write_sample(out: &mut String, foot: Foot, s: &ShoeSample) -> Result<()> {
    if s.pressure.len() != RAW_PIXELS {
        return Err(Error::Dimension {
            expected: format!("{RAW_PIXELS} pressure values"),
            got: s.pressure.len().to_string(),
        });
    }
    write!(out, "{} t={} p=", foot.letter(), s.t_index).unwrap();
    for (k, &v) in s.pressure.iter().enumerate() {
        if !(v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64) {
            return Err(Error::Domain(format!(
                "pressure value {v} at t={} is not a non-negative integer count",
                s.t_index
            )));
        }
        if k > 0 {
            out.push(',');
        }
        write!(out, "{}", v as u32).unwrap();
    }
    for (key, imu) in [("fore", &s.fore_imu), ("hind", &s.hind_imu)] {
        if !imu.is_finite() {
            return Err(Error::Domain(format!("non-finite IMU value at t={}", s.t_index)));
        }
        write!(out, " {key}=").unwrap();
        for (k, v) in imu.to_array().iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
    }
    out.push('\n');
    Ok(())
}

pub fn parse_recording(path: &Path) -> Result<TestRecording> {
    let text = std::fs::read_to_string(path)?;
    parse_recording_str(&text)
}

pub fn parse_recording_str(text: &str) -> Result<TestRecording> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let (subject_id, routine, label) = parse_header(header)?;

    let mut left: Vec<ShoeSample> = Vec::new();
    let mut right: Vec<ShoeSample> = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (foot, sample) = parse_sample_line(lineno, line)?;
        let stream = match foot {
            Foot::Left => &mut left,
            Foot::Right => &mut right,
        };
        if let Some(prev) = stream.last() {
            if sample.t_index <= prev.t_index {
                return Err(perr(
                    lineno,
                    format!(
                        "t={} does not increase after t={} for foot {}",
                        sample.t_index,
                        prev.t_index,
                        foot.letter()
                    ),
                ));
            }
        }
        stream.push(sample);
    }

    Ok(TestRecording {
        subject_id,
        routine,
        left,
        right,
        sample_rate: SAMPLE_RATE_HZ,
        label,
    })
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: &str) -> Result<(String, Routine, SubjectLabel)> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(MAGIC) {
        return Err(perr(1, format!("header must start with `{MAGIC}`")));
    }
    match tokens.next() {
        Some(VERSION) => {}
        other => {
            return Err(perr(
                1,
                format!("unsupported format version {:?}", other.unwrap_or("")),
            ))
        }
    }

    let (mut subject, mut routine, mut cohort, mut mrc_a, mut mrc_b) = (None, None, None, None, None);
    for tok in tokens {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| perr(1, format!("malformed header field `{tok}`")))?;
        let bad = |e: Error| perr(1, e.to_string());
        match key {
            "subject" => {
                if value.is_empty() {
                    return Err(perr(1, "empty subject id"));
                }
                subject = Some(value.to_string());
            }
            "routine" => routine = Some(value.parse::<Routine>().map_err(bad)?),
            "cohort" => cohort = Some(value.parse::<Cohort>().map_err(bad)?),
            "mrc_a" => mrc_a = Some(value.parse::<MrcGrade>().map_err(bad)?),
            "mrc_b" => mrc_b = Some(value.parse::<MrcGrade>().map_err(bad)?),
            _ => {}
        }
    }

    let subject = subject.ok_or_else(|| perr(1, "missing `subject=`"))?;
    let routine = routine.ok_or_else(|| perr(1, "missing `routine=`"))?;
    let cohort = cohort.ok_or_else(|| perr(1, "missing `cohort=`"))?;
    let label = match (cohort, mrc_a, mrc_b) {
        (Cohort::Patient, Some(a), Some(b)) => SubjectLabel::patient(a, b),
        (Cohort::Patient, _, _) => {
            return Err(perr(1, "patient header requires both mrc_a and mrc_b"))
        }
        (Cohort::Healthy, None, None) => SubjectLabel::healthy(),
        (Cohort::Healthy, _, _) => {
            return Err(perr(1, "healthy header must not carry MRC grades"))
        }
    };
    Ok((subject, routine, label))
}

fn parse_sample_line(lineno: usize, line: &str) -> Result<(Foot, ShoeSample)> {
    let mut tokens = line.split_whitespace();
    let foot = match tokens.next() {
        Some("L") => Foot::Left,
        Some("R") => Foot::Right,
        Some(other) => return Err(perr(lineno, format!("unknown foot `{other}`"))),
        None => return Err(perr(lineno, "empty line")),
    };

    let (mut t, mut p, mut fore, mut hind) = (None, None, None, None);
    for tok in tokens {
        let Some((key, value)) = tok.split_once('=') else {
            // unknown trailing tokens are ignored
            continue;
        };
        match key {
            "t" => {
                let v = value
                    .parse::<u64>()
                    .map_err(|_| perr(lineno, format!("bad frame index `{value}`")))?;
                t = Some(v);
            }
            "p" => p = Some(parse_pressure(lineno, value)?),
            "fore" => fore = Some(parse_imu(lineno, value)?),
            "hind" => hind = Some(parse_imu(lineno, value)?),
            _ => {}
        }
    }

    let missing = |k: &str| perr(lineno, format!("missing `{k}=` field"));
    Ok((
        foot,
        ShoeSample {
            t_index: t.ok_or_else(|| missing("t"))?,
            pressure: p.ok_or_else(|| missing("p"))?,
            fore_imu: fore.ok_or_else(|| missing("fore"))?,
            hind_imu: hind.ok_or_else(|| missing("hind"))?,
        },
    ))
}

fn parse_pressure(lineno: usize, value: &str) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(RAW_PIXELS);
    for field in value.split(',') {
        let v = field
            .parse::<u32>()
            .map_err(|_| perr(lineno, format!("bad pressure count `{field}`")))?;
        out.push(v as f64);
    }
    if out.len() != RAW_PIXELS {
        return Err(perr(
            lineno,
            format!(
                "pressure matrix must have {RAW_PIXELS} values ({RAW_WIDTH}x{RAW_HEIGHT}), got {}",
                out.len()
            ),
        ));
    }
    Ok(out)
}

fn parse_imu(lineno: usize, value: &str) -> Result<ImuReading> {
    let mut out = [0.0; 6];
    let mut n = 0;
    for field in value.split(',') {
        if n == 6 {
            return Err(perr(lineno, "IMU reading must have 6 values"));
        }
        let v = field
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| perr(lineno, format!("bad IMU value `{field}`")))?;
        out[n] = v;
        n += 1;
    }
    if n != 6 {
        return Err(perr(lineno, format!("IMU reading must have 6 values, got {n}")));
    }
    Ok(ImuReading::from_array(out))
}

/// Value `i/m` of the way from `a` to `b`. Weighted form, so a ramp whose
/// values are representable comes back exactly.
#[inline]
fn lerp(a: f64, b: f64, i: u64, m: u64) -> f64 {
    ((m - i) as f64 * a + i as f64 * b) / m as f64
}

/// Fills every missing frame between the first and last sample of a stream by
/// linear interpolation between the bracketing samples.
pub fn repair_gaps(stream: &[ShoeSample]) -> Result<Vec<ShoeSample>> {
    let (Some(first), Some(last)) = (stream.first(), stream.last()) else {
        return Err(Error::TooShort("empty stream".into()));
    };
    repair_gaps_within(stream, first.t_index, last.t_index)
}

/// Like [`repair_gaps`], but the stream must cover the whole `[first, last]`
/// window; missing frames at either end cannot be interpolated.
pub fn repair_gaps_within(stream: &[ShoeSample], first: u64, last: u64) -> Result<Vec<ShoeSample>> {
    let head = stream.first().ok_or(Error::BoundaryGap { t: first })?;
    if head.t_index > first {
        return Err(Error::BoundaryGap { t: first });
    }
    let tail = stream.last().unwrap();
    if tail.t_index < last {
        return Err(Error::BoundaryGap { t: last });
    }

    let mut out = Vec::with_capacity((last - first + 1) as usize);
    for (k, s) in stream.iter().enumerate() {
        if let Some(prev) = k.checked_sub(1).map(|j| &stream[j]) {
            if s.t_index <= prev.t_index {
                return Err(Error::Domain(format!(
                    "stream not strictly increasing at t={}",
                    s.t_index
                )));
            }
            let missing = s.t_index - prev.t_index - 1;
            if missing > MAX_REPAIR_GAP {
                return Err(Error::GapTooLong {
                    after: prev.t_index,
                    missing,
                    max: MAX_REPAIR_GAP,
                });
            }
            for i in 1..=missing {
                let t = prev.t_index + i;
                if t < first || t > last {
                    continue;
                }
                let m = missing + 1;
                out.push(ShoeSample {
                    t_index: t,
                    pressure: prev
                        .pressure
                        .iter()
                        .zip(&s.pressure)
                        .map(|(&a, &b)| lerp(a, b, i, m))
                        .collect(),
                    fore_imu: prev.fore_imu.lerp(&s.fore_imu, i, m),
                    hind_imu: prev.hind_imu.lerp(&s.hind_imu, i, m),
                });
            }
        }
        if s.t_index >= first && s.t_index <= last {
            out.push(s.clone());
        }
    }
    Ok(out)
}

/// Trims both streams to their overlapping frame window.
pub fn synchronize(
    left: Vec<ShoeSample>,
    right: Vec<ShoeSample>,
) -> Result<(Vec<ShoeSample>, Vec<ShoeSample>)> {
    let span = |s: &[ShoeSample]| s.first().zip(s.last()).map(|(a, b)| (a.t_index, b.t_index));
    let (Some((l0, l1)), Some((r0, r1))) = (span(&left), span(&right)) else {
        return Err(Error::Sync("a foot stream is empty".into()));
    };
    let (start, end) = (l0.max(r0), l1.min(r1));
    if start > end {
        return Err(Error::Sync(format!(
            "streams do not overlap (left {l0}..={l1}, right {r0}..={r1})"
        )));
    }
    let keep = |s: Vec<ShoeSample>| -> Vec<ShoeSample> {
        s.into_iter()
            .filter(|x| x.t_index >= start && x.t_index <= end)
            .collect()
    };
    Ok((keep(left), keep(right)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: u64, p: f64, imu: f64) -> ShoeSample {
        ShoeSample {
            t_index: t,
            pressure: vec![p; RAW_PIXELS],
            fore_imu: ImuReading::from_array([imu; 6]),
            hind_imu: ImuReading::from_array([-imu; 6]),
        }
    }

    fn two_frame_recording() -> TestRecording {
        let mut s0 = sample(0, 3.0, 0.25);
        s0.pressure[17] = 12.0;
        let s1 = sample(1, 4.0, -1.5e-7);
        TestRecording {
            subject_id: "P01".into(),
            routine: Routine::RightTurning,
            left: vec![s0.clone(), s1.clone()],
            right: vec![s0, s1],
            sample_rate: SAMPLE_RATE_HZ,
            label: SubjectLabel::patient(MrcGrade::FourMinus, MrcGrade::Four),
        }
    }

    #[test]
    fn mrc_mapping() {
        assert_eq!(mrc_numeric("3-").unwrap(), 2.67);
        assert_eq!(mrc_numeric("4").unwrap(), 4.00);
        assert_eq!(mrc_numeric("5-").unwrap(), 4.67);
        assert!(matches!(mrc_numeric("5"), Err(Error::UnknownGrade(_))));
        assert!(matches!(mrc_numeric("2+"), Err(Error::UnknownGrade(_))));
    }

    #[test]
    fn truth_lies_between_grades() {
        for a in MrcGrade::ALL {
            for b in MrcGrade::ALL {
                let t = SubjectLabel::patient(a, b).truth().unwrap();
                let (lo, hi) = (a.numeric().min(b.numeric()), a.numeric().max(b.numeric()));
                assert!(lo <= t && t <= hi);
            }
        }
        assert_eq!(SubjectLabel::healthy().truth(), None);
    }

    #[test]
    fn minimal_file_round_trips() {
        let rec = two_frame_recording();
        let text = rec.to_canonical_string().unwrap();
        let parsed = parse_recording_str(&text).unwrap();
        assert_eq!(parsed.left.len(), 2);
        assert_eq!(parsed.right.len(), 2);
        assert_eq!(parsed, rec);
        assert_eq!(parsed.to_canonical_string().unwrap(), text);
    }

    #[test]
    fn short_pressure_row_is_a_dimension_error() {
        let text = two_frame_recording().to_canonical_string().unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        // drop the last pressure value on line 3
        let l = &lines[2];
        let p_start = l.find(" p=").unwrap() + 3;
        let p_end = l[p_start..].find(' ').unwrap() + p_start;
        let mut vals: Vec<&str> = l[p_start..p_end].split(',').collect();
        vals.pop();
        lines[2] = format!("{}{}{}", &l[..p_start], vals.join(","), &l[p_end..]);
        let err = parse_recording_str(&lines.join("\n")).unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("400"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_monotone_frames_rejected() {
        let text = "#gaitrec v1 subject=H1 routine=straight cohort=healthy\n";
        let p = vec!["0"; RAW_PIXELS].join(",");
        let imu = "0,0,1,0,0,0";
        let body = format!(
            "L t=5 p={p} fore={imu} hind={imu}\nL t=5 p={p} fore={imu} hind={imu}\n"
        );
        let err = parse_recording_str(&format!("{text}{body}")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            parse_recording_str("#gaitrec v2 subject=a routine=rt cohort=healthy"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_recording_str("#gaitrec v1 subject=a routine=rt cohort=patient").is_err());
        assert!(parse_recording_str(
            "#gaitrec v1 subject=a routine=rt cohort=healthy mrc_a=4 mrc_b=4"
        )
        .is_err());
        let ok = parse_recording_str(
            "#gaitrec v1 subject=a routine=lt cohort=patient mrc_a=3+ mrc_b=4- site=x",
        )
        .unwrap();
        assert_eq!(ok.routine, Routine::LeftTurning);
        assert!((ok.label.truth().unwrap() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn unknown_trailing_fields_ignored() {
        let rec = two_frame_recording();
        let text = rec.to_canonical_string().unwrap();
        let extended: String = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                if i == 0 {
                    format!("{l}\n")
                } else {
                    format!("{l} rssi=-40 flags\n")
                }
            })
            .collect();
        assert_eq!(parse_recording_str(&extended).unwrap(), rec);
    }

    #[test]
    fn repair_linear_endpoints() {
        let stream = vec![sample(0, 0.0, 0.0), sample(5, 10.0, 5.0)];
        let out = repair_gaps(&stream).unwrap();
        assert_eq!(out.len(), 6);
        let got: Vec<f64> = out.iter().map(|s| s.pressure[0]).collect();
        assert_eq!(got, vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(out[2].fore_imu.acc[1], 2.0);
        assert_eq!(out[2].hind_imu.gyro[2], -2.0);
    }

    #[test]
    fn repair_without_gaps_is_identity() {
        let stream: Vec<_> = (3..9).map(|t| sample(t, t as f64, 0.5 * t as f64)).collect();
        assert_eq!(repair_gaps(&stream).unwrap(), stream);
    }

    #[test]
    fn long_gap_aborts() {
        let ok = vec![sample(0, 0.0, 0.0), sample(31, 1.0, 0.0)];
        assert_eq!(repair_gaps(&ok).unwrap().len(), 32);
        let too_long = vec![sample(0, 0.0, 0.0), sample(32, 1.0, 0.0)];
        assert!(matches!(
            repair_gaps(&too_long),
            Err(Error::GapTooLong { missing: 31, .. })
        ));
    }

    #[test]
    fn boundary_gap_detected() {
        let stream = vec![sample(2, 0.0, 0.0), sample(4, 1.0, 0.0)];
        assert!(matches!(
            repair_gaps_within(&stream, 0, 4),
            Err(Error::BoundaryGap { t: 0 })
        ));
        assert!(matches!(
            repair_gaps_within(&stream, 2, 6),
            Err(Error::BoundaryGap { t: 6 })
        ));
        assert_eq!(repair_gaps_within(&stream, 2, 4).unwrap().len(), 3);
    }

    #[test]
    fn synchronize_trims_to_overlap() {
        let left: Vec<_> = (0..10).map(|t| sample(t, 0.0, 0.0)).collect();
        let right: Vec<_> = (3..14).map(|t| sample(t, 0.0, 0.0)).collect();
        let (l, r) = synchronize(left, right).unwrap();
        assert_eq!(l.first().unwrap().t_index, 3);
        assert_eq!(r.last().unwrap().t_index, 9);
        assert_eq!(l.len(), r.len());

        let a: Vec<_> = (0..3).map(|t| sample(t, 0.0, 0.0)).collect();
        let b: Vec<_> = (5..8).map(|t| sample(t, 0.0, 0.0)).collect();
        assert!(matches!(synchronize(a, b), Err(Error::Sync(_))));
    }
}
