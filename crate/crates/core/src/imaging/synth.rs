//! Seeded synthetic fixtures.
//!
//! All generators draw from `ChaCha8Rng::seed_from_u64(seed)` and take
//! Gaussian deviates from `rand_distr::StandardNormal`, consuming one deviate
//! per pixel in row-major order. Equal seeds give byte-identical images.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{round_gray, GrayImage};
use crate::error::{Error, Result};

/// Two vertical regions: the left `split` fraction of columns is drawn from
/// `N(mu1, sigma^2)`, the rest from `N(mu2, sigma^2)`.
///
/// Returns the image and its ground-truth mask (255 on the `mu2` region).
pub fn synth_bimodal(
    width: usize,
    height: usize,
    mu1: f64,
    mu2: f64,
    sigma: f64,
    split: f64,
    seed: u64,
) -> Result<(GrayImage, GrayImage)> {
    if !(0.0..=255.0).contains(&mu1) || !(0.0..=255.0).contains(&mu2) || mu1 >= mu2 {
        return Err(Error::InvalidParameter(format!("need 0 <= mu1 < mu2 <= 255, got {mu1} and {mu2}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::NonPositiveSigma(sigma));
    }
    if !(split > 0.0 && split < 1.0) {
        return Err(Error::InvalidParameter(format!("split must lie in (0, 1), got {split}")));
    }
    let boundary = (split * width as f64 + 0.5).floor() as usize;
    if boundary == 0 || boundary >= width {
        return Err(Error::InvalidParameter(format!("split {split} leaves a region empty at width {width}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let img = GrayImage::from_fn(width, height, |x, _| {
        let z: f64 = rng.sample(StandardNormal);
        let mu = if x < boundary { mu1 } else { mu2 };
        round_gray(mu + sigma * z)
    })?;
    let mask = GrayImage::from_fn(width, height, |x, _| if x < boundary { 0 } else { 255 })?;
    Ok((img, mask))
}

/// Piecewise-constant texture of overlapping rectangles with dark or bright
/// levels; used as a registration master.
pub fn synth_scene(width: usize, height: usize, seed: u64) -> Result<GrayImage> {
    if width < 8 || height < 8 {
        return Err(Error::InvalidParameter("scene needs at least 8x8 pixels".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = vec![level(&mut rng); width * height];
    let count = (width * height / 256).max(24);
    let (min_w, max_w) = ((width / 16).max(2), (width / 3).max(3));
    let (min_h, max_h) = ((height / 16).max(2), (height / 3).max(3));
    for _ in 0..count {
        let rw = rng.random_range(min_w..=max_w);
        let rh = rng.random_range(min_h..=max_h);
        let x0 = rng.random_range(0..width);
        let y0 = rng.random_range(0..height);
        let v = level(&mut rng);
        for y in y0..(y0 + rh).min(height) {
            pixels[y * width + x0..y * width + (x0 + rw).min(width)].fill(v);
        }
    }
    GrayImage::new(width, height, pixels)
}

fn level(rng: &mut ChaCha8Rng) -> u8 {
    if rng.random_bool(0.5) {
        rng.random_range(10..=70)
    } else {
        rng.random_range(185..=245)
    }
}

/// Adds `N(0, sigma^2)` noise per pixel, rounding and clamping back to gray.
pub fn add_noise(img: &GrayImage, sigma: f64, seed: u64) -> Result<GrayImage> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = img
        .pixels()
        .iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            round_gray(v as f64 + sigma * z)
        })
        .collect();
    GrayImage::new(img.width(), img.height(), pixels)
}

/// Sets a `fraction` of pixels, chosen independently, to 0 or 255 with
/// equal odds.
pub fn add_salt_pepper(img: &GrayImage, fraction: f64, seed: u64) -> Result<GrayImage> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!("noise fraction must lie in [0, 1], got {fraction}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = img
        .pixels()
        .iter()
        .map(|&v| {
            let hit = rng.random_bool(fraction);
            let salt = rng.random_bool(0.5);
            match (hit, salt) {
                (false, _) => v,
                (true, true) => 255,
                (true, false) => 0,
            }
        })
        .collect();
    GrayImage::new(img.width(), img.height(), pixels)
}
