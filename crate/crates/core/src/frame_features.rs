//! The 40 per-frame features of one foot: biomechanical (1-9), image (10-24)
//! and IMU (25-40).
//!
//! Pixel coordinates are 1-based: `x` in `[1, 32]` across the insole, `y` in
//! `[1, 100]` along it.

use crate::error::{Error, Result};
use crate::preprocess::{ProcessedFrame, IMAGE_HEIGHT, IMAGE_PIXELS, IMAGE_WIDTH};
use crate::recording::ImuReading;
use crate::stats;

pub const FRAME_FEATURE_COUNT: usize = 40;
pub const IMAGE_ENTROPY_BINS: usize = 64;

pub type FrameFeatures = [f64; FRAME_FEATURE_COUNT];

/// Names without the foot prefix; index `k` holds feature `Fdes_{k+1}`.
pub const FRAME_FEATURE_NAMES: [&str; FRAME_FEATURE_COUNT] = [
    "MatForce",
    "MatArea",
    "MatPressure",
    "MatCentreX",
    "MatCentreY",
    "MatCentreSpeedX",
    "MatCentreSpeedY",
    "MatCentreSpeed",
    "MatCentreDirection",
    "ImageMax",
    "ImageMin",
    "ImageRange",
    "ImageMedian",
    "ImageMean",
    "ImageSD",
    "ImageCV",
    "ImageEntropy",
    "ImageHu1",
    "ImageHu2",
    "ImageHu3",
    "ImageHu4",
    "ImageHu5",
    "ImageHu6",
    "ImageHu7",
    "ForeAccX",
    "ForeAccY",
    "ForeAccZ",
    "ForeAccXyz",
    "ForeGyroX",
    "ForeGyroY",
    "ForeGyroZ",
    "ForeGyroXyz",
    "BackAccX",
    "BackAccY",
    "BackAccZ",
    "BackAccXyz",
    "BackGyroX",
    "BackGyroY",
    "BackGyroZ",
    "BackGyroXyz",
];

/// Index of the first IMU-derived feature.
pub const FIRST_IMU_FEATURE: usize = 24;
pub const TOTAL_FORCE: usize = 0;

pub fn is_imu_feature(index: usize) -> bool {
    index >= FIRST_IMU_FEATURE
}

/// Geometric centre of the image under 1-based indexing.
pub const IMAGE_CENTRE: (f64, f64) = (
    (IMAGE_WIDTH as f64 + 1.0) / 2.0,
    (IMAGE_HEIGHT as f64 + 1.0) / 2.0,
);

/// Contact threshold for the area feature: `0.7 * mean + 0.3 * min` over
/// every pixel of every frame of one foot in one test.
pub fn area_threshold(frames: &[ProcessedFrame]) -> Result<f64> {
    if frames.is_empty() {
        return Err(Error::TooShort("area threshold needs at least one frame".into()));
    }
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    for f in frames {
        for &v in f.pressure.data() {
            sum += v;
            min = min.min(v);
        }
    }
    let mean = sum / (frames.len() * IMAGE_PIXELS) as f64;
    Ok(0.7 * mean + 0.3 * min)
}

/// Features 1-9. `prev` is the previous frame's feature row in the same
/// stream; without it the centroid motion features are zero.
pub fn biomech_features(frame: &ProcessedFrame, prev: Option<&FrameFeatures>, delta: f64) -> [f64; 9] {
    let img = &frame.pressure;
    let mut total = 0.0;
    let mut area = 0usize;
    let (mut sx, mut sy) = (0.0, 0.0);
    for y in 0..IMAGE_HEIGHT {
        let mut row_sum = 0.0;
        for x in 0..IMAGE_WIDTH {
            let p = img.get(x, y);
            if p > delta {
                area += 1;
            }
            row_sum += p;
            sx += (x + 1) as f64 * p;
        }
        total += row_sum;
        sy += (y + 1) as f64 * row_sum;
    }

    let prev_centre = prev.map(|r| (r[3], r[4]));
    let (avg, cx, cy) = if area == 0 || total <= 0.0 {
        // no contact: hold the last centroid
        let (cx, cy) = prev_centre.unwrap_or(IMAGE_CENTRE);
        (0.0, cx, cy)
    } else {
        (total / area as f64, sx / total, sy / total)
    };

    let (dx, dy) = match prev_centre {
        Some((px, py)) => (cx - px, cy - py),
        None => (0.0, 0.0),
    };
    let speed = (dx * dx + dy * dy).sqrt();
    let direction = if dy != 0.0 { (dx / dy).atan() } else { dx.atan2(0.0) };

    [total, area as f64, avg, cx, cy, dx, dy, speed, direction]
}

/// Hu's seven invariants of the image taken as a unit-mass distribution.
/// All zero for an empty image.
pub fn hu_moments(width: usize, height: usize, pixels: &[f64]) -> [f64; 7] {
    let mass: f64 = pixels.iter().sum();
    if !(mass > 0.0) {
        return [0.0; 7];
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for y in 0..height {
        for x in 0..width {
            let p = pixels[y * width + x];
            cx += x as f64 * p;
            cy += y as f64 * p;
        }
    }
    cx /= mass;
    cy /= mass;

    let (mut m11, mut m20, mut m02, mut m30, mut m03, mut m21, mut m12) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for y in 0..height {
        let dy = y as f64 - cy;
        for x in 0..width {
            let p = pixels[y * width + x] / mass;
            if p == 0.0 {
                continue;
            }
            let dx = x as f64 - cx;
            let (dx2, dy2) = (dx * dx, dy * dy);
            m11 += dx * dy * p;
            m20 += dx2 * p;
            m02 += dy2 * p;
            m30 += dx2 * dx * p;
            m03 += dy2 * dy * p;
            m21 += dx2 * dy * p;
            m12 += dx * dy2 * p;
        }
    }
    // unit mass: normalized central moments equal the central moments
    hu_from_normalized(m20, m02, m11, m30, m03, m21, m12)
}

pub(crate) fn hu_from_normalized(
    n20: f64,
    n02: f64,
    n11: f64,
    n30: f64,
    n03: f64,
    n21: f64,
    n12: f64,
) -> [f64; 7] {
    let a = n30 + n12;
    let b = n21 + n03;
    let c = n30 - 3.0 * n12;
    let d = 3.0 * n21 - n03;
    [
        n20 + n02,
        (n20 - n02).powi(2) + 4.0 * n11 * n11,
        c * c + d * d,
        a * a + b * b,
        c * a * (a * a - 3.0 * b * b) + d * b * (3.0 * a * a - b * b),
        (n20 - n02) * (a * a - b * b) + 4.0 * n11 * a * b,
        d * a * (a * a - 3.0 * b * b) - c * b * (3.0 * a * a - b * b),
    ]
}

/// Features 10-24.
pub fn image_features(frame: &ProcessedFrame) -> [f64; 15] {
    let px = frame.pressure.data();
    let n = px.len() as f64;
    let max = px.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = px.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = px.iter().sum::<f64>() / n;
    let sd = stats::population_sd(px, mean);
    let median = stats::median(px);
    let cv = if median == 0.0 { 0.0 } else { sd / median };
    let entropy = stats::histogram_entropy(px, IMAGE_ENTROPY_BINS, min, max);
    let hu = hu_moments(frame.pressure.width(), frame.pressure.height(), px);

    let mut out = [0.0; 15];
    out[..8].copy_from_slice(&[max, min, max - min, median, mean, sd, cv, entropy]);
    out[8..].copy_from_slice(&hu);
    out
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn imu_block(r: &ImuReading) -> [f64; 8] {
    [
        r.acc[0],
        r.acc[1],
        r.acc[2],
        norm3(r.acc),
        r.gyro[0],
        r.gyro[1],
        r.gyro[2],
        norm3(r.gyro),
    ]
}

/// Features 25-40: forefoot then hindfoot, each acc xyz + magnitude and gyro
/// xyz + magnitude.
pub fn imu_features(frame: &ProcessedFrame) -> [f64; 16] {
    let mut out = [0.0; 16];
    out[..8].copy_from_slice(&imu_block(&frame.fore_imu));
    out[8..].copy_from_slice(&imu_block(&frame.hind_imu));
    out
}

/// All 40 features for every frame of one foot's processed stream.
pub fn extract_stream(frames: &[ProcessedFrame]) -> Result<Vec<FrameFeatures>> {
    let delta = area_threshold(frames)?;
    let mut rows: Vec<FrameFeatures> = Vec::with_capacity(frames.len());
    for frame in frames {
        let bio = biomech_features(frame, rows.last(), delta);
        let mut row = [0.0; FRAME_FEATURE_COUNT];
        row[..9].copy_from_slice(&bio);
        row[9..24].copy_from_slice(&image_features(frame));
        row[24..].copy_from_slice(&imu_features(frame));
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::Grid;

    fn frame(data: Vec<f64>) -> ProcessedFrame {
        ProcessedFrame {
            t_index: 0,
            pressure: Grid::new(IMAGE_WIDTH, IMAGE_HEIGHT, data).unwrap(),
            fore_imu: ImuReading::default(),
            hind_imu: ImuReading::default(),
        }
    }

    fn blob(cx: f64, cy: f64, amp: f64) -> Vec<f64> {
        let mut v = vec![0.0; IMAGE_PIXELS];
        for y in 0..IMAGE_HEIGHT {
            for x in 0..IMAGE_WIDTH {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                let r2 = dx * dx / 9.0 + dy * dy / 36.0 + 0.3 * dx * dy / 18.0;
                if r2 < 9.0 {
                    v[y * IMAGE_WIDTH + x] = amp * (-r2 / 2.0).exp() * (1.0 + 0.2 * dx.max(0.0));
                }
            }
        }
        v
    }

    #[test]
    fn threshold_examples() {
        let f = frame(vec![5.0; IMAGE_PIXELS]);
        assert_eq!(area_threshold(&[f.clone(), f]).unwrap(), 5.0);
        let a = frame(vec![0.0; IMAGE_PIXELS]);
        let b = frame(vec![10.0; IMAGE_PIXELS]);
        assert!((area_threshold(&[a, b]).unwrap() - 3.5).abs() < 1e-12);
        assert!(area_threshold(&[]).is_err());
    }

    #[test]
    fn uniform_image_biomech() {
        let f = frame(vec![2.0; IMAGE_PIXELS]);
        let b = biomech_features(&f, None, 1.0);
        assert_eq!(b[0], 6400.0);
        assert_eq!(b[1], 3200.0);
        assert_eq!(b[2], 2.0);
        assert!((b[3] - 16.5).abs() < 1e-12);
        assert!((b[4] - 50.5).abs() < 1e-12);
        assert_eq!(&b[5..], &[0.0; 4]);
    }

    #[test]
    fn motion_and_no_contact() {
        let f = frame(blob(10.0, 30.0, 5.0));
        let first = biomech_features(&f, None, 0.5);
        let mut row = [0.0; FRAME_FEATURE_COUNT];
        row[..9].copy_from_slice(&first);
        let same = biomech_features(&f, Some(&row), 0.5);
        assert_eq!(&same[5..8], &[0.0, 0.0, 0.0]);

        let g = frame(blob(12.0, 40.0, 5.0));
        let moved = biomech_features(&g, Some(&row), 0.5);
        assert!(moved[5] > 0.0 && moved[6] > 0.0);
        assert!((moved[7].powi(2) - (moved[5].powi(2) + moved[6].powi(2))).abs() < 1e-9);
        assert!((moved[8] - (moved[5] / moved[6]).atan()).abs() < 1e-15);

        // swing frame: below threshold everywhere, centroid carried forward
        let air = frame(vec![0.1; IMAGE_PIXELS]);
        let held = biomech_features(&air, Some(&row), 0.5);
        assert_eq!(held[1], 0.0);
        assert_eq!(held[2], 0.0);
        assert_eq!((held[3], held[4]), (row[3], row[4]));
        assert_eq!(held[8], 0.0);
    }

    #[test]
    fn direction_with_zero_vertical_motion() {
        let mut prev = [0.0; FRAME_FEATURE_COUNT];
        let f = frame(blob(12.0, 30.0, 5.0));
        let b = biomech_features(&f, None, 0.0);
        prev[3] = b[3] - 1.0;
        prev[4] = b[4];
        let m = biomech_features(&f, Some(&prev), 0.0);
        assert!((m[8] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn constant_image_features() {
        let f = frame(vec![3.0; IMAGE_PIXELS]);
        let im = image_features(&f);
        assert_eq!(im[2], 0.0);
        assert!(im[5].abs() < 1e-12);
        assert_eq!(im[7], 0.0);
        let zero = image_features(&frame(vec![0.0; IMAGE_PIXELS]));
        assert_eq!(zero, [0.0; 15]);
    }

    #[test]
    fn hu_translation_and_scale_invariance() {
        let a = image_features(&frame(blob(12.0, 40.0, 5.0)));
        let b = image_features(&frame(blob(17.0, 61.0, 5.0)));
        let c = image_features(&frame(blob(12.0, 40.0, 37.5)));
        for k in 8..15 {
            let tol = 1e-6 * a[k].abs().max(1e-300);
            assert!((a[k] - b[k]).abs() <= tol, "hu{} {} vs {}", k - 7, a[k], b[k]);
            assert!((a[k] - c[k]).abs() <= tol, "hu{} {} vs {}", k - 7, a[k], c[k]);
        }
    }

    #[test]
    fn imu_magnitudes() {
        let mut f = frame(vec![0.0; IMAGE_PIXELS]);
        assert_eq!(imu_features(&f), [0.0; 16]);
        f.fore_imu = ImuReading::new([3.0, 4.0, 0.0], [0.0, 0.0, -2.0]);
        f.hind_imu = ImuReading::new([1.0, 2.0, 2.0], [6.0, 0.0, 8.0]);
        let v = imu_features(&f);
        assert_eq!(v[3], 5.0);
        assert_eq!(v[7], 2.0);
        assert_eq!(v[11], 3.0);
        assert_eq!(v[15], 10.0);
    }

    #[test]
    fn names_match_table_convention() {
        assert_eq!(FRAME_FEATURE_NAMES[29], "ForeGyroY");
        assert_eq!(FRAME_FEATURE_NAMES[9], "ImageMax");
        assert_eq!(FRAME_FEATURE_NAMES[7], "MatCentreSpeed");
        assert_eq!(FRAME_FEATURE_NAMES[21], "ImageHu5");
    }
}
