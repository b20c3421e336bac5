//! Brute-force reference implementations for the integration tests.
//!
//! These are written from the definitions, not from the library code: sorted
//! copies instead of selection, raw moments instead of central sums, linear
//! scans instead of running extrema, names parsed back into positions.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use smartgait::frame_features::FRAME_FEATURE_NAMES;
use smartgait::preprocess::{Grid, ProcessedFrame, IMAGE_HEIGHT, IMAGE_WIDTH};
use smartgait::recording::ImuReading;
use smartgait::segmentation::StepSpan;
use smartgait::step_features::PhaseDurations;
use smartgait::whole_features::TestStepFeatures;

pub const STATS: [&str; 12] = [
    "Max", "Min", "Range", "Median", "Mean", "SD", "CV", "Entropy", "Peaks", "Valleys", "Skewness",
    "Kurtosis",
];

/// `a` and `b` agree to `rel` relative to the larger of `|a|`, `|b|` and
/// `scale`.
pub fn close(a: f64, b: f64, rel: f64, scale: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs()).max(scale)
}

pub fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

pub fn o_mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in v {
        s += x;
    }
    s / v.len() as f64
}

pub fn o_sd(v: &[f64]) -> f64 {
    let m = o_mean(v);
    let mut s = 0.0;
    for x in v {
        s += (x - m) * (x - m);
    }
    (s / v.len() as f64).sqrt()
}

pub fn o_median(v: &[f64]) -> f64 {
    let s = sorted(v);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Entropy in bits of `bins` equal-width bins spanning the data.
pub fn o_entropy(v: &[f64], bins: usize) -> f64 {
    let s = sorted(v);
    let (lo, hi) = (s[0], s[s.len() - 1]);
    if hi == lo {
        return 0.0;
    }
    let mut counts = vec![0.0f64; bins];
    for &x in v {
        let k = ((x - lo) / (hi - lo) * bins as f64).floor() as usize;
        counts[k.min(bins - 1)] += 1.0;
    }
    let n = v.len() as f64;
    counts.iter().filter(|&&c| c > 0.0).map(|&c| (c / n) * (n / c).log2()).sum()
}

/// Strict interior maxima whose drop to the higher of the two flanking
/// minima (each taken up to the nearest higher sample) is at least `min_prom`.
pub fn o_peaks(v: &[f64], min_prom: f64) -> usize {
    let n = v.len();
    let mut count = 0;
    for i in 1..n.saturating_sub(1) {
        if !(v[i] > v[i - 1] && v[i] > v[i + 1]) {
            continue;
        }
        let l = (0..i).rev().find(|&k| v[k] > v[i]).map_or(0, |k| k + 1);
        let r = (i + 1..n).find(|&k| v[k] > v[i]).unwrap_or(n);
        let lmin = sorted(&v[l..i])[0];
        let rmin = sorted(&v[i + 1..r])[0];
        if v[i] - lmin.max(rmin) >= min_prom {
            count += 1;
        }
    }
    count
}

/// The twelve descriptive statistics, plus a magnitude for each to scale
/// the comparison tolerance.
pub fn o_stats(v: &[f64]) -> ([f64; 12], [f64; 12]) {
    let s = sorted(v);
    let (min, max) = (s[0], s[s.len() - 1]);
    let med = o_median(v);
    let mag = s.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == min {
        return ([max, min, 0.0, med, max, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], [mag; 12]);
    }
    let range = max - min;
    let mu = o_mean(v);
    let sd = o_sd(v);
    let cv = if mu == 0.0 { 0.0 } else { sd / mu };
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    let n = v.len() as f64;
    let m2 = v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n;
    let m3 = v.iter().map(|x| (x - mu).powi(3)).sum::<f64>() / n;
    let m4 = v.iter().map(|x| (x - mu).powi(4)).sum::<f64>() / n;
    let (skew, kurt) = if m2 > 0.0 { (m3 / m2.powf(1.5), m4 / (m2 * m2)) } else { (0.0, 0.0) };
    let out = [
        max,
        min,
        range,
        med,
        mu,
        sd,
        cv,
        o_entropy(v, 16),
        o_peaks(v, 0.05 * range) as f64,
        o_peaks(&neg, 0.05 * range) as f64,
        skew,
        kurt,
    ];
    // mean and moments lose digits to cancellation in proportion to how far
    // the data sit from zero relative to their spread
    let cond = mag / sd;
    let cv_scale = if mu == 0.0 { 0.0 } else { mag / mu.abs() * cond };
    let scales = [mag, mag, mag, mag, mag, mag, cv_scale, 1.0, 1.0, 1.0, cond.powi(3), cond.powi(4)];
    (out, scales)
}

pub fn o_symmetry(l: f64, r: f64) -> f64 {
    let (a, b) = (l.abs(), r.abs());
    if a == 0.0 && b == 0.0 {
        0.0
    } else if a <= b {
        1.0 - a / b
    } else {
        1.0 - b / a
    }
}

/// Hu invariants from raw moments of the mass-normalized image, with the
/// summed magnitude of each invariant's terms.
pub fn o_hu(width: usize, pixels: &[f64]) -> ([f64; 7], [f64; 7]) {
    let raw = |p: i32, q: i32| -> f64 {
        let mut s = 0.0;
        for (k, &v) in pixels.iter().enumerate() {
            let (x, y) = ((k % width) as f64, (k / width) as f64);
            s += x.powi(p) * y.powi(q) * v;
        }
        s
    };
    let m00 = raw(0, 0);
    if m00 <= 0.0 {
        return ([0.0; 7], [0.0; 7]);
    }
    let (xb, yb) = (raw(1, 0) / m00, raw(0, 1) / m00);
    let e = |p: i32, q: i32| raw(p, q) / m00;
    let n20 = e(2, 0) - xb * xb;
    let n02 = e(0, 2) - yb * yb;
    let n11 = e(1, 1) - xb * yb;
    let n30 = e(3, 0) - 3.0 * xb * e(2, 0) + 2.0 * xb.powi(3);
    let n03 = e(0, 3) - 3.0 * yb * e(0, 2) + 2.0 * yb.powi(3);
    let n21 = e(2, 1) - 2.0 * xb * e(1, 1) - yb * e(2, 0) + 2.0 * xb * xb * yb;
    let n12 = e(1, 2) - 2.0 * yb * e(1, 1) - xb * e(0, 2) + 2.0 * yb * yb * xb;

    let h1 = n20 + n02;
    let h2 = (n20 - n02).powi(2) + 4.0 * n11.powi(2);
    let h3 = (n30 - 3.0 * n12).powi(2) + (3.0 * n21 - n03).powi(2);
    let h4 = (n30 + n12).powi(2) + (n21 + n03).powi(2);
    let t5a = (n30 - 3.0 * n12) * (n30 + n12) * ((n30 + n12).powi(2) - 3.0 * (n21 + n03).powi(2));
    let t5b = (3.0 * n21 - n03) * (n21 + n03) * (3.0 * (n30 + n12).powi(2) - (n21 + n03).powi(2));
    let t6a = (n20 - n02) * ((n30 + n12).powi(2) - (n21 + n03).powi(2));
    let t6b = 4.0 * n11 * (n30 + n12) * (n21 + n03);
    let t7a = (3.0 * n21 - n03) * (n30 + n12) * ((n30 + n12).powi(2) - 3.0 * (n21 + n03).powi(2));
    let t7b = (n30 - 3.0 * n12) * (n21 + n03) * (3.0 * (n30 + n12).powi(2) - (n21 + n03).powi(2));
    // third-order terms inherit the cancellation of the raw-moment route
    let third = h4 + h3 + 1e-12 * (xb.abs() + yb.abs()).powi(3);
    (
        [h1, h2, h3, h4, t5a + t5b, t6a + t6b, t7a - t7b],
        [
            n20.abs() + n02.abs(),
            h2,
            third,
            third,
            t5a.abs() + t5b.abs() + third.powi(2),
            t6a.abs() + t6b.abs() + third * h1,
            t7a.abs() + t7b.abs() + third.powi(2),
        ],
    )
}

/// All forty frame features of a stream, from the definitions.
pub fn o_frame_features(frames: &[ProcessedFrame]) -> Vec<Vec<f64>> {
    let all: Vec<f64> = frames.iter().flat_map(|f| f.pressure.data().iter().copied()).collect();
    let delta = 0.7 * o_mean(&all) + 0.3 * sorted(&all)[0];
    let mut out: Vec<Vec<f64>> = Vec::new();
    for f in frames {
        let px = f.pressure.data();
        let (mut total, mut area, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for y in 1..=IMAGE_HEIGHT {
            for x in 1..=IMAGE_WIDTH {
                let p = px[(y - 1) * IMAGE_WIDTH + (x - 1)];
                total += p;
                if p > delta {
                    area += 1.0;
                }
                sx += x as f64 * p;
                sy += y as f64 * p;
            }
        }
        let prev = out.last().map(|r| (r[3], r[4]));
        let (avg, cx, cy) = if area > 0.0 && total > 0.0 {
            (total / area, sx / total, sy / total)
        } else {
            let (cx, cy) = prev.unwrap_or((16.5, 50.5));
            (0.0, cx, cy)
        };
        let (dx, dy) = prev.map_or((0.0, 0.0), |(px, py)| (cx - px, cy - py));
        let dir = if dy != 0.0 {
            (dx / dy).atan()
        } else if dx > 0.0 {
            std::f64::consts::FRAC_PI_2
        } else if dx < 0.0 {
            -std::f64::consts::FRAC_PI_2
        } else {
            0.0
        };
        let mut row = vec![total, area, avg, cx, cy, dx, dy, dx.hypot(dy), dir];

        let s = sorted(px);
        let (lo, hi) = (s[0], s[s.len() - 1]);
        let med = o_median(px);
        let sd = o_sd(px);
        row.extend([hi, lo, hi - lo, med, o_mean(px), sd, if med == 0.0 { 0.0 } else { sd / med }]);
        row.push(o_entropy(px, 64));
        row.extend(o_hu(IMAGE_WIDTH, px).0);

        for imu in [f.fore_imu, f.hind_imu] {
            row.extend(imu.acc);
            row.push(imu.acc[0].hypot(imu.acc[1]).hypot(imu.acc[2]));
            row.extend(imu.gyro);
            row.push(imu.gyro[0].hypot(imu.gyro[1]).hypot(imu.gyro[2]));
        }
        out.push(row);
    }
    out
}

/// Seconds and ratios of one gait cycle.
pub fn o_durations(step: &StepSpan, next: Option<&StepSpan>) -> [Option<f64>; 8] {
    let s = |a: usize, b: usize| (b - a) as f64 / 60.0;
    let cycle = s(step.start_t, step.end_t);
    let stance = s(step.start_t, step.stance_end_t);
    let swing = s(step.stance_end_t, step.end_t);
    let ds: f64 = step.double_support.iter().map(|&(a, b)| s(a, b)).sum();
    [
        Some(cycle),
        Some(stance),
        Some(swing),
        Some(ds),
        Some(stance / cycle),
        Some(swing / cycle),
        Some(ds / stance),
        next.map(|n| ds / s(n.start_t, n.stance_end_t)),
    ]
}

/// Fusion value: feature `j` at the first frame where feature `i` attains
/// its maximum (`max == true`) or minimum over the step.
pub fn o_fusion(rows: &[Vec<f64>], max: bool, i: usize, j: usize) -> f64 {
    let col: Vec<f64> = rows.iter().map(|r| r[i]).collect();
    let s = sorted(&col);
    let target = if max { s[s.len() - 1] } else { s[0] };
    let t = col.iter().position(|&v| v == target).unwrap();
    rows[t][j]
}

fn spd_value(d: &PhaseDurations, name: &str) -> Option<f64> {
    match name {
        "GaitCycleTime" => Some(d.cycle),
        "GaitStanceTime" => Some(d.stance),
        "GaitSwingTime" => Some(d.swing),
        "GaitDoubleSupportTime" => Some(d.double_support),
        "GaitStanceRatio" => Some(d.stance_ratio),
        "GaitSwingRatio" => Some(d.swing_ratio),
        "GaitDoubleSupportPrevRatio" => Some(d.ds_prev_ratio),
        "GaitDoubleSupportNextRatio" => d.ds_next_ratio,
        other => panic!("unknown duration feature {other}"),
    }
}

fn bilateral(name: &str) -> usize {
    let (foot, frame) = name.split_at(1);
    let k = FRAME_FEATURE_NAMES.iter().position(|&f| f == frame).unwrap();
    k + if foot == "R" { 40 } else { 0 }
}

/// Whole-test value of the named feature, found by parsing the name, with
/// the magnitude that scales its comparison tolerance.
pub fn o_whole_value(name: &str, steps: &TestStepFeatures) -> (f64, f64) {
    if let Some(base) = name.strip_suffix("_Symmetry") {
        let (l, sl) = o_whole_value(&format!("L{base}"), steps);
        let (r, sr) = o_whole_value(&format!("R{base}"), steps);
        // a ratio inherits the relative error of both sides
        let rel = |v: f64, s: f64| if v == 0.0 { 1.0 } else { s / v.abs() };
        return (o_symmetry(l, r), rel(l, sl).max(rel(r, sr)).max(1.0));
    }
    let (rest, s2) = name.rsplit_once('_').unwrap();
    let s2 = STATS.iter().position(|&s| s == s2).unwrap();
    let series: Vec<f64> = if let Some((fi, fj)) = rest.split_once("_MaxTime_") {
        let slot = fusion_slot(true, bilateral(fi), bilateral(fj));
        steps.fusion.iter().map(|s| s[slot]).collect()
    } else if let Some((fi, fj)) = rest.split_once("_MinTime_") {
        let slot = fusion_slot(false, bilateral(fi), bilateral(fj));
        steps.fusion.iter().map(|s| s[slot]).collect()
    } else {
        let (foot, body) = rest.split_at(1);
        let f = if foot == "L" { &steps.left } else { &steps.right };
        if body.starts_with("Gait") {
            f.durations.iter().filter_map(|d| spd_value(d, body)).collect()
        } else {
            let (frame, s1) = body.rsplit_once('_').unwrap();
            let k = FRAME_FEATURE_NAMES.iter().position(|&n| n == frame).unwrap();
            let s1 = STATS.iter().position(|&s| s == s1).unwrap();
            f.statistics.iter().map(|st| st[k][s1]).collect()
        }
    };
    let (v, scale) = o_stats(&series);
    (v[s2], scale[s2])
}

/// Position of a fusion value within one step's block: maxima first, then
/// minima, each ordered by `i` then by `j != i`.
pub fn fusion_slot(max: bool, i: usize, j: usize) -> usize {
    let base = if max { 0 } else { 80 * 79 };
    base + i * 79 + if j > i { j - 1 } else { j }
}

/// Random value, integral with probability one half so that ties, plateaus
/// and repeated extrema are common.
pub fn value(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        v.round()
    } else {
        v
    }
}

pub fn random_frame(rng: &mut ChaCha8Rng, t: u64) -> ProcessedFrame {
    let zero_frac = rng.random_range(0.0..0.9);
    let blank = rng.random_bool(0.1);
    let data = (0..IMAGE_WIDTH * IMAGE_HEIGHT)
        .map(|_| if blank || rng.random_bool(zero_frac) { 0.0 } else { value(rng, 0.0, 200.0) })
        .collect();
    let mut imu = || ImuReading::from_array(std::array::from_fn(|_| rng.random_range(-300.0..300.0)));
    ProcessedFrame {
        t_index: t,
        pressure: Grid::new(IMAGE_WIDTH, IMAGE_HEIGHT, data).unwrap(),
        fore_imu: imu(),
        hind_imu: imu(),
    }
}
