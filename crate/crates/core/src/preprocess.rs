//! Pressure image pipeline: align-corners bilinear upsampling from the 16x25
//! sensor grid to 32x100, then a 5x5 Gaussian (sigma 1.0) with edge
//! replication. IMU readings pass through untouched.

use crate::error::{Error, Result};
use crate::recording::{ImuReading, ShoeSample, RAW_HEIGHT, RAW_WIDTH};

pub const IMAGE_WIDTH: usize = 32;
pub const IMAGE_HEIGHT: usize = 100;
pub const IMAGE_PIXELS: usize = IMAGE_WIDTH * IMAGE_HEIGHT;

pub const GAUSSIAN_SIZE: usize = 5;
pub const GAUSSIAN_SIGMA: f64 = 1.0;

/// Row-major image; `x` indexes columns, `y` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Dimension {
                expected: format!("{width}x{height} = {} values", width * height),
                got: data.len().to_string(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    fn expect_shape(&self, width: usize, height: usize) -> Result<()> {
        if self.width != width || self.height != height {
            return Err(Error::Dimension {
                expected: format!("{width}x{height}"),
                got: format!("{}x{}", self.width, self.height),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedFrame {
    pub t_index: u64,
    /// 32x100 smoothed pressure image.
    pub pressure: Grid,
    pub fore_imu: ImuReading,
    pub hind_imu: ImuReading,
}

/// Maps output index `o` of `n_out` samples onto the input axis of `n_in`
/// samples with corners aligned. Returns the lower index and the fraction.
#[inline]
fn source_coord(o: usize, n_out: usize, n_in: usize) -> (usize, f64) {
    let pos = o as f64 * (n_in - 1) as f64 / (n_out - 1) as f64;
    let i0 = (pos.floor() as usize).min(n_in - 2);
    (i0, pos - i0 as f64)
}

pub fn upsample_bilinear(raw: &Grid) -> Result<Grid> {
    raw.expect_shape(RAW_WIDTH, RAW_HEIGHT)?;
    if raw.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite pressure value".into()));
    }
    let xs: Vec<(usize, f64)> = (0..IMAGE_WIDTH)
        .map(|o| source_coord(o, IMAGE_WIDTH, RAW_WIDTH))
        .collect();
    let mut out = Vec::with_capacity(IMAGE_PIXELS);
    for oy in 0..IMAGE_HEIGHT {
        let (y0, fy) = source_coord(oy, IMAGE_HEIGHT, RAW_HEIGHT);
        for &(x0, fx) in &xs {
            let top = raw.get(x0, y0) * (1.0 - fx) + raw.get(x0 + 1, y0) * fx;
            let bottom = raw.get(x0, y0 + 1) * (1.0 - fx) + raw.get(x0 + 1, y0 + 1) * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    Grid::new(IMAGE_WIDTH, IMAGE_HEIGHT, out)
}

/// Normalized 5x5 Gaussian kernel, row-major.
pub fn gaussian_kernel() -> [f64; GAUSSIAN_SIZE * GAUSSIAN_SIZE] {
    let r = (GAUSSIAN_SIZE / 2) as i32;
    let mut k = [0.0; GAUSSIAN_SIZE * GAUSSIAN_SIZE];
    let mut sum = 0.0;
    for dy in -r..=r {
        for dx in -r..=r {
            let w = (-((dx * dx + dy * dy) as f64) / (2.0 * GAUSSIAN_SIGMA * GAUSSIAN_SIGMA)).exp();
            k[((dy + r) as usize) * GAUSSIAN_SIZE + (dx + r) as usize] = w;
            sum += w;
        }
    }
    k.iter_mut().for_each(|w| *w /= sum);
    k
}

pub fn gaussian_smooth(img: &Grid) -> Result<Grid> {
    img.expect_shape(IMAGE_WIDTH, IMAGE_HEIGHT)?;
    let kernel = gaussian_kernel();
    let r = (GAUSSIAN_SIZE / 2) as isize;
    let (w, h) = (img.width as isize, img.height as isize);
    let mut out = vec![0.0; IMAGE_PIXELS];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in -r..=r {
                let sy = (y + dy).clamp(0, h - 1) as usize;
                let row = &img.data[sy * img.width..(sy + 1) * img.width];
                let krow = &kernel[((dy + r) as usize) * GAUSSIAN_SIZE..];
                for dx in -r..=r {
                    let sx = (x + dx).clamp(0, w - 1) as usize;
                    acc += krow[(dx + r) as usize] * row[sx];
                }
            }
            out[(y * w + x) as usize] = acc;
        }
    }
    Grid::new(IMAGE_WIDTH, IMAGE_HEIGHT, out)
}

pub fn process_sample(sample: &ShoeSample) -> Result<ProcessedFrame> {
    let raw = Grid::new(RAW_WIDTH, RAW_HEIGHT, sample.pressure.clone())?;
    let pressure = gaussian_smooth(&upsample_bilinear(&raw)?)?;
    Ok(ProcessedFrame {
        t_index: sample.t_index,
        pressure,
        fore_imu: sample.fore_imu,
        hind_imu: sample.hind_imu,
    })
}

pub fn process_stream(stream: &[ShoeSample]) -> Result<Vec<ProcessedFrame>> {
    stream.iter().map(process_sample).collect()
}
