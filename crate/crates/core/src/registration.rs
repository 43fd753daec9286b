//! Rigid registration by maximizing mutual information.
//!
//! `TransformParams` describe the map from master coordinates to slave
//! coordinates: a master pixel `p` corresponds to the slave pixel at
//! `R(theta) (p - c) + c + (dx, dy)`, where `c` is the image center. If the
//! slave is the master content moved by `(dx, dy)`, those are the parameters
//! the search recovers.

use std::time::Instant;

use rayon::prelude::*;

use crate::entropy::{mutual_information, EntropySpec, JointProbabilityTable};
use crate::error::{Error, Result};
use crate::imaging::GrayImage;

/// Fewest overlapping pixels for which a score is defined.
pub const MIN_OVERLAP: usize = 64;

pub const ALLOWED_BINS: [usize; 5] = [16, 32, 64, 128, 256];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransformParams {
    pub dx: f64,
    pub dy: f64,
    /// Radians, about the image center.
    pub theta: f64,
}

impl TransformParams {
    pub const IDENTITY: TransformParams = TransformParams { dx: 0.0, dy: 0.0, theta: 0.0 };

    pub fn translation(dx: f64, dy: f64) -> Self {
        TransformParams { dx, dy, theta: 0.0 }
    }

    pub fn apply(&self, (x, y): (f64, f64), (cx, cy): (f64, f64)) -> (f64, f64) {
        if self.theta == 0.0 {
            return (x + self.dx, y + self.dy);
        }
        let (sin, cos) = self.theta.sin_cos();
        let (u, v) = (x - cx, y - cy);
        (cos * u - sin * v + cx + self.dx, sin * u + cos * v + cy + self.dy)
    }

    pub fn inverse(&self) -> Self {
        let (sin, cos) = (-self.theta).sin_cos();
        TransformParams {
            dx: -(cos * self.dx - sin * self.dy),
            dy: -(sin * self.dx + cos * self.dy),
            theta: -self.theta,
        }
    }

    /// `|dx| < width`, `|dy| < height`, `theta` in `(-pi, pi]`.
    pub fn is_valid_for(&self, width: usize, height: usize) -> bool {
        use std::f64::consts::PI;
        self.dx.abs() < width as f64 && self.dy.abs() < height as f64 && self.theta > -PI && self.theta <= PI
    }
}

pub fn image_center(width: usize, height: usize) -> (f64, f64) {
    ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0)
}

fn nearest(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

/// Moves image content by `params` with nearest-neighbor inverse mapping.
///
/// For `theta == 0` and integer offsets this equals [`crate::imaging::shift_image`].
pub fn warp(img: &GrayImage, params: &TransformParams, fill: u8) -> GrayImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let center = image_center(img.width(), img.height());
    let inverse = params.inverse();
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let (sx, sy) = if params.theta == 0.0 {
            (x as f64 - params.dx, y as f64 - params.dy)
        } else {
            inverse.apply((x as f64, y as f64), center)
        };
        let (sx, sy) = (nearest(sx), nearest(sy));
        if (0..w).contains(&sx) && (0..h).contains(&sy) {
            img.get(sx as usize, sy as usize)
        } else {
            fill
        }
    })
    .expect("warp preserves dimensions")
}

/// Calls `visit(master_value, slave_value)` for every master pixel whose
/// mapped position falls inside the slave. Returns the overlap size.
fn for_each_overlap(
    master: &GrayImage,
    slave: &GrayImage,
    params: &TransformParams,
    mut visit: impl FnMut(u8, u8),
) -> usize {
    let (sw, sh) = (slave.width() as i64, slave.height() as i64);
    let center = image_center(master.width(), master.height());
    let mut overlap = 0;
    for y in 0..master.height() {
        for x in 0..master.width() {
            let (qx, qy) = params.apply((x as f64, y as f64), center);
            let (qx, qy) = (nearest(qx), nearest(qy));
            if (0..sw).contains(&qx) && (0..sh).contains(&qy) {
                visit(master.get(x, y), slave.get(qx as usize, qy as usize));
                overlap += 1;
            }
        }
    }
    overlap
}

fn check_bins(bins: usize) -> Result<()> {
    if ALLOWED_BINS.contains(&bins) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("bins must be one of {ALLOWED_BINS:?}, got {bins}")))
    }
}

/// Mutual information between the master and the slave resampled into the
/// master frame, over the overlap only, with gray values quantized to `bins`.
pub fn mi_score(
    master: &GrayImage,
    slave: &GrayImage,
    params: &TransformParams,
    spec: EntropySpec,
    bins: usize,
) -> Result<f64> {
    check_bins(bins)?;
    let shift = (256 / bins).trailing_zeros();
    let mut counts = vec![0u64; bins * bins];
    let overlap = for_each_overlap(master, slave, params, |a, b| {
        counts[((a >> shift) as usize) * bins + (b >> shift) as usize] += 1;
    });
    if overlap < MIN_OVERLAP {
        return Err(Error::EmptyOverlap(overlap));
    }
    let table = JointProbabilityTable::from_counts(bins, bins, &counts)?;
    Ok(mutual_information(&table, spec))
}

/// Absolute Pearson correlation over the overlap, clamped to `[0, 1]`;
/// zero when either side is constant.
pub fn nccc(master: &GrayImage, slave: &GrayImage, params: &TransformParams) -> Result<f64> {
    let (mut n, mut sa, mut sb, mut saa, mut sbb, mut sab) = (0i128, 0i128, 0i128, 0i128, 0i128, 0i128);
    for_each_overlap(master, slave, params, |a, b| {
        let (a, b) = (a as i128, b as i128);
        n += 1;
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
    });
    if (n as usize) < MIN_OVERLAP {
        return Err(Error::EmptyOverlap(n as usize));
    }
    Ok(pearson_from_sums(n, sa, sb, saa, sbb, sab).abs().min(1.0))
}

/// Pearson correlation from exact integer moments; 0 on zero variance.
pub(crate) fn pearson_from_sums(n: i128, sa: i128, sb: i128, saa: i128, sbb: i128, sab: i128) -> f64 {
    let cov = n * sab - sa * sb;
    let va = n * saa - sa * sa;
    let vb = n * sbb - sb * sb;
    if va == 0 || vb == 0 {
        return 0.0;
    }
    cov as f64 / ((va as f64) * (vb as f64)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Integer translations in `[-window, window]` are tried on both axes.
    pub window: i64,
    /// Rotation angles (radians) tried at every translation.
    pub rotations: Vec<f64>,
    pub bins: usize,
    /// Hill-climb at 0.5 px then 0.25 px after the grid.
    pub refine: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { window: 16, rotations: vec![0.0], bins: 64, refine: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegistrationResult {
    pub params: TransformParams,
    pub mi: f64,
    pub nccc: f64,
    /// Number of `mi_score` evaluations, grid and refinement combined.
    pub evaluations: usize,
    pub wall_time: f64,
}

pub const REFINEMENT_STEPS: [f64; 2] = [0.5, 0.25];

pub fn register(
    master: &GrayImage,
    slave: &GrayImage,
    spec: EntropySpec,
    search: &SearchConfig,
) -> Result<RegistrationResult> {
    let start = Instant::now();
    check_bins(search.bins)?;
    if search.window < 0 || search.rotations.is_empty() {
        return Err(Error::InvalidParameter("search window must be >= 0 with at least one rotation".into()));
    }
    let mut rotations = search.rotations.clone();
    rotations.sort_by(f64::total_cmp);
    rotations.dedup();

    let w = search.window;
    let turns = rotations.len();
    let grid: Vec<(i64, i64, usize)> = (-w..=w)
        .flat_map(|dx| (-w..=w).flat_map(move |dy| (0..turns).map(move |r| (dx, dy, r))))
        .collect();
    let scores: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&(dx, dy, r)| {
            let params = TransformParams { dx: dx as f64, dy: dy as f64, theta: rotations[r] };
            match mi_score(master, slave, &params, spec, search.bins) {
                Ok(v) => Ok(Some(v)),
                Err(Error::EmptyOverlap(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut evaluations = grid.len();

    // grid is already in lexicographic order, so the first maximum wins ties
    let mut best: Option<(usize, f64)> = None;
    for (i, score) in scores.iter().enumerate() {
        if let Some(v) = *score {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    let (index, mut mi) = best.ok_or(Error::EmptyOverlap(0))?;
    let (dx, dy, r) = grid[index];
    let mut params = TransformParams { dx: dx as f64, dy: dy as f64, theta: rotations[r] };

    if search.refine {
        let limit = w as f64;
        for step in REFINEMENT_STEPS {
            loop {
                let neighbors = [(-step, 0.0), (step, 0.0), (0.0, -step), (0.0, step)];
                let mut moved = None;
                for (ox, oy) in neighbors {
                    let cand = TransformParams { dx: params.dx + ox, dy: params.dy + oy, ..params };
                    if cand.dx.abs() > limit || cand.dy.abs() > limit {
                        continue;
                    }
                    evaluations += 1;
                    match mi_score(master, slave, &cand, spec, search.bins) {
                        Ok(v) if v > moved.map_or(mi, |(_, m)| m) => moved = Some((cand, v)),
                        Ok(_) | Err(Error::EmptyOverlap(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
                match moved {
                    Some((cand, v)) => {
                        params = cand;
                        mi = v;
                    }
                    None => break,
                }
            }
        }
    }

    let nccc = nccc(master, slave, &params)?;
    Ok(RegistrationResult { params, mi, nccc, evaluations, wall_time: start.elapsed().as_secs_f64() })
}

/// Root mean square of the displacement between two transforms at the
/// given control points, in pixels.
pub fn rmse_control_points(
    estimated: &TransformParams,
    truth: &TransformParams,
    points: &[(f64, f64)],
    center: (f64, f64),
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyPoints);
    }
    let sum: f64 = points
        .iter()
        .map(|&p| {
            let (ax, ay) = estimated.apply(p, center);
            let (bx, by) = truth.apply(p, center);
            (ax - bx).powi(2) + (ay - by).powi(2)
        })
        .sum();
    Ok((sum / points.len() as f64).sqrt())
}

/// Corners, edge midpoints and center of a `width x height` image.
pub fn default_control_points(width: usize, height: usize) -> Vec<(f64, f64)> {
    let (xm, ym) = ((width - 1) as f64, (height - 1) as f64);
    let mut points = Vec::with_capacity(9);
    for y in [0.0, ym / 2.0, ym] {
        for x in [0.0, xm / 2.0, xm] {
            points.push((x, y));
        }
    }
    points
}
