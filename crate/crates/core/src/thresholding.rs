//! Maximum-entropy bi-level thresholding.
//!
//! A candidate cut `t` splits the gray levels into a background class
//! `[0, t]` and a foreground class `[t + 1, 255]`. Each class histogram is
//! renormalized and scored with the chosen entropy; the class scores are
//! summed for Shannon (Kapur) and Renyi (Sahoo), and combined
//! pseudo-additively for Tsallis. The 2D variant cuts the joint
//! (gray, local mean) histogram at `(t, s)` and scores only the two diagonal
//! blocks.

use rayon::prelude::*;

use crate::entropy::{EntropySpec, Family};
use crate::error::{Error, Result};
use crate::imaging::{local_mean, GrayImage, Histogram, JointHistogram, LEVELS};

/// Criterion values within this relative distance of the maximum count as
/// ties; the smallest cut among them wins.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Number of candidate cuts, `t = 0..=254`.
pub const CANDIDATES: usize = LEVELS - 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub threshold: u8,
    /// Criterion at `threshold`.
    pub objective: f64,
    /// Criterion per cut `t`; `None` where a class would be empty.
    pub objective_curve: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold2dResult {
    /// Gray-value cut.
    pub threshold: u8,
    /// Local-mean cut.
    pub mean_threshold: u8,
    pub objective: f64,
}

/// Combines background and foreground class entropies into the criterion.
pub fn combine(spec: EntropySpec, background: f64, foreground: f64) -> f64 {
    match (spec.family(), spec.order()) {
        (Family::Tsallis, Some(q)) => background + foreground + (1.0 - q) * background * foreground,
        _ => background + foreground,
    }
}

/// Mass and order-dependent moment of one class, enough to evaluate its
/// renormalized entropy without revisiting the bins.
#[derive(Debug, Clone, Copy, Default)]
struct ClassSums {
    mass: f64,
    /// `sum p ln p` for Shannon, `sum p^order` otherwise.
    moment: f64,
}

impl ClassSums {
    fn add(self, other: ClassSums) -> ClassSums {
        ClassSums { mass: self.mass + other.mass, moment: self.moment + other.moment }
    }

    fn entropy(self, spec: EntropySpec) -> f64 {
        let ClassSums { mass, moment } = self;
        match (spec.family(), spec.order()) {
            (Family::Renyi, Some(a)) => (moment.ln() - a * mass.ln()) / (1.0 - a),
            (Family::Tsallis, Some(q)) => (1.0 - moment / mass.powf(q)) / (q - 1.0),
            _ => mass.ln() - moment / mass,
        }
    }
}

fn bin_sums(p: f64, spec: EntropySpec) -> ClassSums {
    if p <= 0.0 {
        return ClassSums::default();
    }
    let moment = match spec.order() {
        None => p * p.ln(),
        Some(order) => p.powf(order),
    };
    ClassSums { mass: p, moment }
}

/// Index of the smallest candidate whose value is within the tie tolerance
/// of the maximum. Independent of evaluation order.
fn select<I: Copy + Ord>(candidates: &[(I, f64)]) -> Option<(I, f64)> {
    let best = candidates.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return None;
    }
    let floor = best - TIE_TOLERANCE * best.abs().max(1.0);
    candidates.iter().filter(|c| c.1 >= floor).min_by_key(|c| c.0).copied()
}

pub fn entropic_threshold(h: &Histogram, spec: EntropySpec) -> Result<ThresholdResult> {
    let total = h.total() as f64;
    let bins: Vec<ClassSums> = h.counts().iter().map(|&c| bin_sums(c as f64 / total, spec)).collect();

    let mut below = vec![ClassSums::default(); LEVELS];
    let mut acc = ClassSums::default();
    for (g, b) in bins.iter().enumerate() {
        acc = acc.add(*b);
        below[g] = acc;
    }
    let mut above = vec![ClassSums::default(); LEVELS + 1];
    for g in (0..LEVELS).rev() {
        above[g] = above[g + 1].add(bins[g]);
    }

    let objective_curve: Vec<Option<f64>> = (0..CANDIDATES)
        .map(|t| {
            let (bg, fg) = (below[t], above[t + 1]);
            (bg.mass > 0.0 && fg.mass > 0.0).then(|| combine(spec, bg.entropy(spec), fg.entropy(spec)))
        })
        .collect();
    let candidates: Vec<(usize, f64)> =
        objective_curve.iter().enumerate().filter_map(|(t, v)| v.map(|v| (t, v))).collect();
    let (t, objective) = select(&candidates).ok_or(Error::DegenerateHistogram)?;
    Ok(ThresholdResult { threshold: t as u8, objective, objective_curve })
}

/// Exhaustive search over `(t, s)` cuts of a (gray, local mean) histogram.
pub fn entropic_threshold_2d(j: &JointHistogram, spec: EntropySpec) -> Result<Threshold2dResult> {
    let total = j.total() as f64;
    let cell = |g: usize, m: usize| bin_sums(j.counts()[g * LEVELS + m] as f64 / total, spec);

    // below[t][s]: block [0..=t] x [0..=s]; above[t][s]: block [t..] x [s..]
    let mut below = vec![ClassSums::default(); LEVELS * LEVELS];
    for g in 0..LEVELS {
        let mut row = ClassSums::default();
        for m in 0..LEVELS {
            row = row.add(cell(g, m));
            let prev = if g > 0 { below[(g - 1) * LEVELS + m] } else { ClassSums::default() };
            below[g * LEVELS + m] = prev.add(row);
        }
    }
    let mut above = vec![ClassSums::default(); LEVELS * LEVELS];
    for g in (0..LEVELS).rev() {
        let mut row = ClassSums::default();
        for m in (0..LEVELS).rev() {
            row = row.add(cell(g, m));
            let prev = if g + 1 < LEVELS { above[(g + 1) * LEVELS + m] } else { ClassSums::default() };
            above[g * LEVELS + m] = prev.add(row);
        }
    }

    let candidates: Vec<((usize, usize), f64)> = (0..CANDIDATES)
        .into_par_iter()
        .flat_map_iter(|t| {
            let below = &below;
            let above = &above;
            (0..CANDIDATES).filter_map(move |s| {
                let bg = below[t * LEVELS + s];
                let fg = above[(t + 1) * LEVELS + s + 1];
                (bg.mass > 0.0 && fg.mass > 0.0)
                    .then(|| ((t, s), combine(spec, bg.entropy(spec), fg.entropy(spec))))
            })
        })
        .collect();
    let ((t, s), objective) = select(&candidates).ok_or(Error::DegenerateHistogram)?;
    Ok(Threshold2dResult { threshold: t as u8, mean_threshold: s as u8, objective })
}

/// Binarizes: 255 where `pixel > t`, else 0.
pub fn apply_threshold(img: &GrayImage, t: u8) -> GrayImage {
    img.map(|v| if v > t { 255 } else { 0 })
}

/// 255 where `pixel > t` and the rounded `window` neighborhood mean `> s`.
pub fn apply_threshold_2d(img: &GrayImage, t: u8, s: u8, window: usize) -> Result<GrayImage> {
    let means = local_mean(img, window)?;
    let pixels = img
        .pixels()
        .iter()
        .zip(means.pixels())
        .map(|(&v, &m)| if v > t && m > s { 255 } else { 0 })
        .collect();
    GrayImage::new(img.width(), img.height(), pixels)
}
