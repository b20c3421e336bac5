//! The twelve descriptive statistics applied to a series, both within a step
//! (over frames) and within a test (over steps).

use crate::error::{Error, Result};

pub const STAT_COUNT: usize = 12;

/// Name suffixes, in output order.
pub const STAT_NAMES: [&str; STAT_COUNT] = [
    "Max", "Min", "Range", "Median", "Mean", "SD", "CV", "Entropy", "Peaks", "Valleys",
    "Skewness", "Kurtosis",
];

pub const SERIES_ENTROPY_BINS: usize = 16;
/// Minimum peak prominence as a fraction of the series range.
pub const PEAK_PROMINENCE_FRACTION: f64 = 0.05;

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation around `mean`.
pub fn population_sd(values: &[f64], mean: f64) -> f64 {
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Median; the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut buf = values.to_vec();
    median_in_place(&mut buf)
}

pub fn median_in_place(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    let mid = n / 2;
    let (lower, m, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *m;
    if n % 2 == 1 {
        upper
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (below + upper) / 2.0
    }
}

/// Shannon entropy in bits of an equal-width histogram over `[min, max]`.
pub fn histogram_entropy(values: &[f64], bins: usize, min: f64, max: f64) -> f64 {
    let range = max - min;
    if !(range > 0.0) || values.is_empty() {
        return 0.0;
    }
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - min) / range) * bins as f64).floor() as isize;
        counts[idx.clamp(0, bins as isize - 1) as usize] += 1;
    }
    let n = values.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Counts strict local maxima whose topographic prominence is at least
/// `min_prominence`. Endpoints never count.
pub fn count_peaks(values: &[f64], min_prominence: f64) -> usize {
    let n = values.len();
    if n < 3 {
        return 0;
    }
    (1..n - 1)
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .filter(|&i| prominence(values, i) >= min_prominence)
        .count()
}

fn prominence(values: &[f64], i: usize) -> f64 {
    let peak = values[i];
    let mut left_min = peak;
    for &v in values[..i].iter().rev() {
        if v > peak {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = peak;
    for &v in &values[i + 1..] {
        if v > peak {
            break;
        }
        right_min = right_min.min(v);
    }
    peak - left_min.max(right_min)
}

/// The twelve statistics of a series: max, min, range, median, mean, SD, CV,
/// entropy, peak count, valley count, skewness, kurtosis.
pub fn series_statistics(series: &[f64]) -> Result<[f64; STAT_COUNT]> {
    if series.len() < 2 {
        return Err(Error::TooShort(format!(
            "statistics need at least 2 values, got {}",
            series.len()
        )));
    }
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let range = max - min;
    let med = median(series);

    if range == 0.0 {
        // constant: every spread-dependent statistic is zero
        let cv = 0.0;
        return Ok([max, min, 0.0, med, max, 0.0, cv, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    let n = series.len() as f64;
    let mu = mean(series);
    let sd = population_sd(series, mu);
    let cv = if mu == 0.0 { 0.0 } else { sd / mu };
    let entropy = histogram_entropy(series, SERIES_ENTROPY_BINS, min, max);
    let min_prom = PEAK_PROMINENCE_FRACTION * range;
    let peaks = count_peaks(series, min_prom) as f64;
    let negated: Vec<f64> = series.iter().map(|v| -v).collect();
    let valleys = count_peaks(&negated, min_prom) as f64;

    let (mut m3, mut m4) = (0.0, 0.0);
    for &v in series {
        let d = v - mu;
        let d2 = d * d;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (skew, kurt) = if sd > 0.0 {
        (m3 / (n * sd.powi(3)), m4 / (n * sd.powi(4)))
    } else {
        (0.0, 0.0)
    };

    Ok([
        max, min, range, med, mu, sd, cv, entropy, peaks, valleys, skew, kurt,
    ])
}

/// Sample Pearson correlation; 0 when either side has no spread.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n < 2 {
        return 0.0;
    }
    let (a, b) = (&a[..n], &b[..n]);
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for k in 0..n {
        let (da, db) = (a[k] - ma, b[k] - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series() {
        let s = series_statistics(&[4.0; 7]).unwrap();
        assert_eq!(s[2], 0.0); // range
        assert_eq!(s[5], 0.0); // SD
        assert_eq!(s[10], 0.0);
        assert_eq!(s[11], 0.0);
        assert_eq!(s[8], 0.0);
        assert_eq!(s[4], 4.0);
    }

    #[test]
    fn symmetric_ramp() {
        let s = series_statistics(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(s[4], 3.0);
        assert_eq!(s[3], 3.0);
        assert!(s[10].abs() < 1e-15);
        assert!((s[5] - 2f64.sqrt()).abs() < 1e-15);
        // kurtosis of a discrete uniform over 5 points: 1.7
        assert!((s[11] - 1.7).abs() < 1e-12);
    }

    #[test]
    fn too_short() {
        assert!(series_statistics(&[1.0]).is_err());
        assert!(series_statistics(&[]).is_err());
        let s = series_statistics(&[2.0, 4.0]).unwrap();
        assert_eq!(s[4], 3.0);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn peak_prominence_filter() {
        // two big peaks with a bump of prominence 0.02 between them
        let s = [0.0, 10.0, 0.0, 1.0, 1.02, 1.0, 10.0, 0.0];
        assert_eq!(count_peaks(&s, 0.5), 2);
        assert_eq!(count_peaks(&s, 0.01), 3);
        // plateaus are not strict maxima
        assert_eq!(count_peaks(&[0.0, 1.0, 1.0, 0.0], 0.0), 0);
        let sst = series_statistics(&s).unwrap();
        assert_eq!(sst[8], 2.0);
        assert_eq!(sst[9], 1.0); // the dip at index 2
    }

    #[test]
    fn entropy_bounds() {
        let uniform: Vec<f64> = (0..64).map(|i| i as f64).collect();
        let e = histogram_entropy(&uniform, 64, 0.0, 63.0);
        // each value lands in its own bin
        assert!((e - 6.0).abs() < 1e-12, "{e}");
        assert_eq!(histogram_entropy(&[2.0; 10], 64, 2.0, 2.0), 0.0);
    }

    #[test]
    fn pearson_basics() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&a, &[2.0, 4.0, 6.0, 8.0]) - 1.0).abs() < 1e-15);
        assert!((pearson(&a, &[8.0, 6.0, 4.0, 2.0]) + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&a, &[1.0; 4]), 0.0);
    }
}
