//! Grayscale images, histograms and the image transforms used by the pipelines.
//!
//! Every rounding from a real value back to a gray level is round-half-up,
//! and every neighborhood or padding operation replicates the border.

mod pgm;
mod synth;

pub use pgm::{read_pgm, write_pgm};
pub use synth::{add_noise, add_salt_pepper, synth_bimodal, synth_scene};

use crate::entropy::{JointProbabilityTable, ProbabilityVector};
use crate::error::{Error, Result};

pub const LEVELS: usize = 256;

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::BadDimensions);
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Pixel at `(x, y)` with coordinates clamped into the image.
    pub fn get_clamped(&self, x: i64, y: i64) -> u8 {
        let x = x.clamp(0, self.width as i64 - 1) as usize;
        let y = y.clamp(0, self.height as i64 - 1) as usize;
        self.get(x, y)
    }

    pub fn map(&self, f: impl Fn(u8) -> u8) -> GrayImage {
        GrayImage { width: self.width, height: self.height, pixels: self.pixels.iter().map(|&v| f(v)).collect() }
    }

    pub(crate) fn ensure_same_dims(&self, other: &GrayImage) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch { left: self.dims(), right: other.dims() });
        }
        Ok(())
    }
}

/// `floor(v + 0.5)` clamped to the gray range.
pub fn round_gray(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Round-half-up of `sum / n` for nonnegative integers.
pub(crate) fn rounded_mean(sum: u64, n: u64) -> u64 {
    (2 * sum + n) / (2 * n)
}

/// Gray-level counts of an image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; LEVELS],
    total: u64,
}

impl Histogram {
    pub fn from_counts(counts: [u64; LEVELS]) -> Result<Self> {
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidWeights);
        }
        Ok(Histogram { counts, total })
    }

    pub fn counts(&self) -> &[u64; LEVELS] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn to_probability(&self) -> ProbabilityVector {
        ProbabilityVector::from_counts(&self.counts).expect("histogram total is positive")
    }
}

pub fn histogram(img: &GrayImage) -> Histogram {
    let mut counts = [0u64; LEVELS];
    for &v in img.pixels() {
        counts[v as usize] += 1;
    }
    Histogram { counts, total: img.len() as u64 }
}

/// 256x256 count table over pairs of gray values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointHistogram {
    counts: Vec<u64>,
    total: u64,
}

impl JointHistogram {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.len() != LEVELS * LEVELS {
            return Err(Error::InvalidParameter(format!(
                "joint histogram needs {} cells, got {}",
                LEVELS * LEVELS,
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidWeights);
        }
        Ok(JointHistogram { counts, total })
    }

    pub fn get(&self, first: u8, second: u8) -> u64 {
        self.counts[first as usize * LEVELS + second as usize]
    }

    /// Row-major counts, first coordinate major.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Marginal over the second coordinate.
    pub fn first_marginal(&self) -> [u64; LEVELS] {
        let mut out = [0u64; LEVELS];
        for (acc, row) in out.iter_mut().zip(self.counts.chunks(LEVELS)) {
            *acc = row.iter().sum();
        }
        out
    }

    pub fn second_marginal(&self) -> [u64; LEVELS] {
        let mut out = [0u64; LEVELS];
        for row in self.counts.chunks(LEVELS) {
            for (acc, c) in out.iter_mut().zip(row) {
                *acc += c;
            }
        }
        out
    }

    pub fn to_probability_table(&self) -> JointProbabilityTable {
        JointProbabilityTable::from_counts(LEVELS, LEVELS, &self.counts).expect("joint total is positive")
    }
}

/// Pairs each pixel's gray value with the rounded mean of its
/// `window x window` neighborhood.
pub fn gray_localmean_histogram(img: &GrayImage, window: usize) -> Result<JointHistogram> {
    let means = local_mean(img, window)?;
    let mut counts = vec![0u64; LEVELS * LEVELS];
    for (&g, &m) in img.pixels().iter().zip(means.pixels()) {
        counts[g as usize * LEVELS + m as usize] += 1;
    }
    JointHistogram::from_counts(counts)
}

/// Rounded neighborhood mean with border replication.
pub fn local_mean(img: &GrayImage, window: usize) -> Result<GrayImage> {
    let (w, h) = img.dims();
    if window < 3 || window.is_multiple_of(2) || window > w.min(h) {
        return Err(Error::BadWindow { window });
    }
    let r = (window / 2) as i64;
    // clamped neighborhoods are separable: sum rows first, then columns
    let mut row_sums = vec![0u64; w * h];
    for y in 0..h {
        for x in 0..w {
            row_sums[y * w + x] = (-r..=r).map(|i| img.get_clamped(x as i64 + i, y as i64) as u64).sum();
        }
    }
    let n = (window * window) as u64;
    GrayImage::from_fn(w, h, |x, y| {
        let sum: u64 = (-r..=r)
            .map(|j| row_sums[(y as i64 + j).clamp(0, h as i64 - 1) as usize * w + x])
            .sum();
        rounded_mean(sum, n) as u8
    })
}

pub fn joint_histogram(a: &GrayImage, b: &GrayImage) -> Result<JointHistogram> {
    a.ensure_same_dims(b)?;
    let mut counts = vec![0u64; LEVELS * LEVELS];
    for (&u, &v) in a.pixels().iter().zip(b.pixels()) {
        counts[u as usize * LEVELS + v as usize] += 1;
    }
    JointHistogram::from_counts(counts)
}

/// Block-mean downsampling by an integer factor.
///
/// Dimensions that do not divide evenly are padded by replicating the last
/// row and column; the output is `ceil(width / factor) x ceil(height / factor)`.
pub fn degrade(img: &GrayImage, factor: usize) -> Result<GrayImage> {
    if factor == 0 {
        return Err(Error::InvalidParameter("degradation factor must be at least 1".into()));
    }
    let out_w = img.width().div_ceil(factor);
    let out_h = img.height().div_ceil(factor);
    let n = (factor * factor) as u64;
    GrayImage::from_fn(out_w, out_h, |bx, by| {
        let mut sum = 0u64;
        for j in 0..factor {
            for i in 0..factor {
                sum += img.get_clamped((bx * factor + i) as i64, (by * factor + j) as i64) as u64;
            }
        }
        rounded_mean(sum, n) as u8
    })
}

/// Translates content by `(dx, dy)`; pixels with no source take `fill`.
pub fn shift_image(img: &GrayImage, dx: i64, dy: i64, fill: u8) -> Result<GrayImage> {
    let (w, h) = (img.width() as i64, img.height() as i64);
    if dx.abs() >= w || dy.abs() >= h {
        return Err(Error::ExcessiveShift { dx, dy });
    }
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let sx = x as i64 - dx;
        let sy = y as i64 - dy;
        if (0..w).contains(&sx) && (0..h).contains(&sy) {
            img.get(sx as usize, sy as usize)
        } else {
            fill
        }
    })
}
