//! Entropy-based clustering driven by a cluster evaluation function (CEF).
//!
//! For the Renyi family the CEF is the sum over cluster pairs of the cross
//! information potential, the Parzen kernel term of Renyi's quadratic
//! entropy; the Renyi order does not enter. For Shannon and Tsallis, which
//! have no kernel estimator, the CEF is a histogram plug-in of the
//! conditional entropy of feature 0 given the label minus its marginal
//! entropy. Tsallis weights each cluster by its share raised to `q`, the
//! weighting under which `S_q(X, L) = S_q(L) + S_q(X | L)` holds. Lower is
//! better in both cases.

use rayon::prelude::*;

use crate::entropy::parzen::{check_sigma, squared_distance};
use crate::entropy::{entropy_of_counts, gaussian_kernel, EntropySpec, Family};
use crate::error::{Error, Result};
use crate::imaging::GrayImage;

/// Points of equal dimension, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    dim: usize,
    data: Vec<f64>,
    source: Option<(usize, usize)>,
}

impl FeatureSet {
    pub fn new<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptySamples)?.as_ref().len();
        if dim == 0 || points.iter().any(|p| p.as_ref().len() != dim) {
            return Err(Error::RaggedSamples);
        }
        let data: Vec<f64> = points.iter().flat_map(|p| p.as_ref().iter().copied()).collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("feature components must be finite".into()));
        }
        Ok(FeatureSet { dim, data, source: None })
    }

    /// Intensity scaled to `[0, 1]`, optionally followed by `x` and `y`
    /// scaled to `[0, 1]`.
    pub fn from_image(img: &GrayImage, with_coords: bool) -> Self {
        let (w, h) = img.dims();
        let scale = |v: usize, n: usize| if n > 1 { v as f64 / (n - 1) as f64 } else { 0.0 };
        let dim = if with_coords { 3 } else { 1 };
        let mut data = Vec::with_capacity(img.len() * dim);
        for y in 0..h {
            for x in 0..w {
                data.push(img.get(x, y) as f64 / 255.0);
                if with_coords {
                    data.push(scale(x, w));
                    data.push(scale(y, h));
                }
            }
        }
        FeatureSet { dim, data, source: Some((w, h)) }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Image dimensions when built by [`FeatureSet::from_image`].
    pub fn source_dims(&self) -> Option<(usize, usize)> {
        self.source
    }

    /// Diagonal of the bounding box.
    pub fn diameter(&self) -> f64 {
        (0..self.dim)
            .map(|d| {
                let (lo, hi) = self
                    .data
                    .iter()
                    .skip(d)
                    .step_by(self.dim)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
                (hi - lo).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// One tenth of the diameter; 1.0 if all points coincide.
    pub fn default_sigma(&self) -> f64 {
        let d = self.diameter();
        if d > 0.0 {
            0.1 * d
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<usize>,
    k: usize,
}

impl Labeling {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewClusters(k));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::BadLabeling(format!("cluster id {bad} outside [0, {k})")));
        }
        Ok(Labeling { labels, k })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

pub fn cef(points: &FeatureSet, labels: &Labeling, sigma: f64, spec: EntropySpec) -> Result<f64> {
    check_sigma(sigma)?;
    if labels.labels().len() != points.len() {
        return Err(Error::BadLabeling(format!(
            "{} labels for {} points",
            labels.labels().len(),
            points.len()
        )));
    }
    Ok(match spec.family() {
        Family::Renyi => {
            let k = labels.k();
            let sums = cluster_kernel_sums(points, labels.labels(), k, sigma);
            let mut pair = vec![0.0; k * k];
            for (i, &l) in labels.labels().iter().enumerate() {
                for c in 0..k {
                    pair[l * k + c] += sums[i * k + c];
                }
            }
            cross_potential(&pair, &labels.sizes())
        }
        _ => {
            let bins = PluginBins::new(points, ClusterOptions::default().plugin_bins);
            PluginState::new(&bins, labels.labels(), labels.k(), spec).value()
        }
    })
}

/// `sum_{m<n} T[m][n] / (N_m N_n)`, skipping empty clusters.
fn cross_potential(pair: &[f64], sizes: &[usize]) -> f64 {
    let k = sizes.len();
    let mut total = 0.0;
    for m in 0..k {
        for n in m + 1..k {
            if sizes[m] > 0 && sizes[n] > 0 {
                total += pair[m * k + n] / (sizes[m] as f64 * sizes[n] as f64);
            }
        }
    }
    total
}

/// Row-major `N x k` table of `sum_{j in c} G(x_i - x_j; 2 sigma^2 I)`.
fn cluster_kernel_sums(points: &FeatureSet, labels: &[usize], k: usize, sigma: f64) -> Vec<f64> {
    let variance = 2.0 * sigma * sigma;
    let dim = points.dim();
    (0..points.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let xi = points.point(i);
            let mut row = vec![0.0; k];
            for (j, &l) in labels.iter().enumerate() {
                row[l] += gaussian_kernel(squared_distance(xi, points.point(j)), variance, dim);
            }
            row
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOptions {
    pub max_sweeps: usize,
    /// Histogram bins over feature 0 for the plug-in CEF.
    pub plugin_bins: usize,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions { max_sweeps: 50, plugin_bins: 64 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOutcome {
    pub labeling: Labeling,
    /// Sweeps performed, including the final one that made no move.
    pub sweeps: usize,
    /// `false` when `max_sweeps` was reached while points were still moving.
    pub converged: bool,
    /// CEF of the initial labeling followed by the CEF after each sweep.
    pub cef_trace: Vec<f64>,
}

/// Relative decrease a move must achieve to be accepted.
const MOVE_TOLERANCE: f64 = 1e-12;

pub fn cluster(
    points: &FeatureSet,
    k: usize,
    sigma: f64,
    spec: EntropySpec,
    opts: &ClusterOptions,
) -> Result<ClusterOutcome> {
    check_sigma(sigma)?;
    if k < 2 {
        return Err(Error::TooFewClusters(k));
    }
    if points.len() < k {
        return Err(Error::BadLabeling(format!("{} points cannot fill {k} clusters", points.len())));
    }
    if opts.plugin_bins == 0 {
        return Err(Error::InvalidParameter("plugin_bins must be positive".into()));
    }
    let mut labels = initial_labels(points, k, sigma);
    let bins = PluginBins::new(points, opts.plugin_bins);
    let mut state: Box<dyn Objective> = match spec.family() {
        Family::Renyi => Box::new(KernelState::new(points, &labels, k, sigma)),
        _ => Box::new(PluginState::new(&bins, &labels, k, spec)),
    };
    let mut sizes = vec![0usize; k];
    for &l in &labels {
        sizes[l] += 1;
    }

    let mut cef_trace = vec![state.value()];
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut moved = false;
        for p in 0..labels.len() {
            let from = labels[p];
            if sizes[from] == 1 {
                continue;
            }
            let current = state.value();
            let mut best: Option<(usize, f64)> = None;
            for to in (0..k).filter(|&c| c != from) {
                let v = state.value_after_move(p, from, to, &sizes);
                if best.is_none_or(|(_, b)| v < b) {
                    best = Some((to, v));
                }
            }
            if let Some((to, v)) = best {
                if v < current - MOVE_TOLERANCE * current.abs().max(1.0) {
                    state.apply_move(p, from, to, &sizes);
                    labels[p] = to;
                    sizes[from] -= 1;
                    sizes[to] += 1;
                    moved = true;
                }
            }
        }
        cef_trace.push(state.value());
        if !moved {
            converged = true;
            break;
        }
    }
    Ok(ClusterOutcome { labeling: Labeling { labels, k }, sweeps, converged, cef_trace })
}

/// Farthest-first seeding from the densest point, then nearest-seed
/// assignment. Ties go to the smallest index.
fn initial_labels(points: &FeatureSet, k: usize, sigma: f64) -> Vec<usize> {
    let n = points.len();
    let variance = 2.0 * sigma * sigma;
    let density: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = points.point(i);
            (0..n).map(|j| gaussian_kernel(squared_distance(xi, points.point(j)), variance, points.dim())).sum()
        })
        .collect();
    let mut first = 0;
    for (i, &d) in density.iter().enumerate() {
        if d > density[first] {
            first = i;
        }
    }
    let mut seeds = vec![first];
    let mut nearest: Vec<f64> = (0..n).map(|i| squared_distance(points.point(i), points.point(first))).collect();
    while seeds.len() < k {
        let mut pick: Option<usize> = None;
        for i in (0..n).filter(|i| !seeds.contains(i)) {
            if pick.is_none_or(|p| nearest[i] > nearest[p]) {
                pick = Some(i);
            }
        }
        let s = pick.expect("n >= k leaves a candidate");
        seeds.push(s);
        for i in 0..n {
            nearest[i] = nearest[i].min(squared_distance(points.point(i), points.point(s)));
        }
    }
    let mut labels: Vec<usize> = (0..n)
        .map(|i| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, &s) in seeds.iter().enumerate() {
                let d = squared_distance(points.point(i), points.point(s));
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            best
        })
        .collect();
    for (c, &s) in seeds.iter().enumerate() {
        labels[s] = c;
    }
    labels
}

trait Objective {
    fn value(&self) -> f64;
    fn value_after_move(&self, p: usize, from: usize, to: usize, sizes: &[usize]) -> f64;
    fn apply_move(&mut self, p: usize, from: usize, to: usize, sizes: &[usize]);
}

/// Incrementally maintained cross-potential CEF.
struct KernelState<'a> {
    points: &'a FeatureSet,
    k: usize,
    variance: f64,
    self_kernel: f64,
    /// `N x k` per-point cluster kernel sums.
    sums: Vec<f64>,
    /// `k x k` within/between kernel totals.
    pair: Vec<f64>,
    sizes: Vec<usize>,
    value: f64,
}

impl<'a> KernelState<'a> {
    fn new(points: &'a FeatureSet, labels: &[usize], k: usize, sigma: f64) -> Self {
        let sums = cluster_kernel_sums(points, labels, k, sigma);
        let mut pair = vec![0.0; k * k];
        let mut sizes = vec![0; k];
        for (i, &l) in labels.iter().enumerate() {
            sizes[l] += 1;
            for c in 0..k {
                pair[l * k + c] += sums[i * k + c];
            }
        }
        let variance = 2.0 * sigma * sigma;
        let value = cross_potential(&pair, &sizes);
        KernelState { points, k, variance, self_kernel: gaussian_kernel(0.0, variance, points.dim()), sums, pair, sizes, value }
    }

    fn moved_pair(&self, p: usize, from: usize, to: usize) -> Vec<f64> {
        let k = self.k;
        let g0 = self.self_kernel;
        let row = &self.sums[p * k..(p + 1) * k];
        let mut pair = self.pair.clone();
        for c in (0..k).filter(|&c| c != from) {
            pair[from * k + c] -= row[c];
            pair[c * k + from] = pair[from * k + c];
        }
        pair[from * k + from] -= 2.0 * row[from] - g0;
        let detached = |c: usize| if c == from { row[c] - g0 } else { row[c] };
        for c in (0..k).filter(|&c| c != to) {
            pair[to * k + c] += detached(c);
            pair[c * k + to] = pair[to * k + c];
        }
        pair[to * k + to] += 2.0 * detached(to) + g0;
        pair
    }
}

impl Objective for KernelState<'_> {
    fn value(&self) -> f64 {
        self.value
    }

    fn value_after_move(&self, p: usize, from: usize, to: usize, _sizes: &[usize]) -> f64 {
        let mut sizes = self.sizes.clone();
        sizes[from] -= 1;
        sizes[to] += 1;
        cross_potential(&self.moved_pair(p, from, to), &sizes)
    }

    fn apply_move(&mut self, p: usize, from: usize, to: usize, _sizes: &[usize]) {
        self.pair = self.moved_pair(p, from, to);
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
        let k = self.k;
        let xp = self.points.point(p);
        for i in 0..self.points.len() {
            let g = gaussian_kernel(squared_distance(self.points.point(i), xp), self.variance, self.points.dim());
            self.sums[i * k + from] -= g;
            self.sums[i * k + to] += g;
        }
        self.value = cross_potential(&self.pair, &self.sizes);
    }
}

/// Bin index of each point's first feature over the set's range.
struct PluginBins {
    bin_of: Vec<usize>,
    bins: usize,
}

impl PluginBins {
    fn new(points: &FeatureSet, bins: usize) -> Self {
        let first = (0..points.len()).map(|i| points.point(i)[0]);
        let (lo, hi) = first.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let bin_of = first
            .map(|v| if hi > lo { (((v - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1) } else { 0 })
            .collect();
        PluginBins { bin_of, bins }
    }
}

/// `sum_m w_m H(cluster m) - H(all)` over binned feature 0, with
/// `w_m = N_m / N`, or `(N_m / N)^q` for Tsallis.
struct PluginState<'a> {
    bins: &'a [usize],
    nbins: usize,
    spec: EntropySpec,
    n: f64,
    counts: Vec<u64>,
    within: Vec<f64>,
    marginal: f64,
    value: f64,
}

impl<'a> PluginState<'a> {
    fn new(bins: &'a PluginBins, labels: &[usize], k: usize, spec: EntropySpec) -> Self {
        let nbins = bins.bins;
        let mut counts = vec![0u64; k * nbins];
        let mut all = vec![0u64; nbins];
        for (&b, &l) in bins.bin_of.iter().zip(labels) {
            counts[l * nbins + b] += 1;
            all[b] += 1;
        }
        let within = (0..k).map(|c| entropy_of_counts(&counts[c * nbins..(c + 1) * nbins], spec)).collect();
        let mut state = PluginState {
            bins: &bins.bin_of,
            nbins,
            spec,
            n: labels.len() as f64,
            counts,
            within,
            marginal: entropy_of_counts(&all, spec),
            value: 0.0,
        };
        state.value = state.combine(&state.within, &Self::sizes_of(&state.counts, nbins));
        state
    }

    fn sizes_of(counts: &[u64], nbins: usize) -> Vec<u64> {
        counts.chunks(nbins).map(|c| c.iter().sum()).collect()
    }

    fn combine(&self, within: &[f64], sizes: &[u64]) -> f64 {
        let weight = |s: u64| match (self.spec.family(), self.spec.order()) {
            (Family::Tsallis, Some(q)) => (s as f64 / self.n).powf(q),
            _ => s as f64 / self.n,
        };
        within.iter().zip(sizes).map(|(h, &s)| weight(s) * h).sum::<f64>() - self.marginal
    }

    fn cluster_entropy_with(&self, c: usize, bin: usize, delta: i64) -> f64 {
        let mut hist = self.counts[c * self.nbins..(c + 1) * self.nbins].to_vec();
        hist[bin] = (hist[bin] as i64 + delta) as u64;
        entropy_of_counts(&hist, self.spec)
    }
}

impl Objective for PluginState<'_> {
    fn value(&self) -> f64 {
        self.value
    }

    fn value_after_move(&self, p: usize, from: usize, to: usize, sizes: &[usize]) -> f64 {
        let b = self.bins[p];
        let mut within = self.within.clone();
        within[from] = self.cluster_entropy_with(from, b, -1);
        within[to] = self.cluster_entropy_with(to, b, 1);
        let mut sizes: Vec<u64> = sizes.iter().map(|&s| s as u64).collect();
        sizes[from] -= 1;
        sizes[to] += 1;
        self.combine(&within, &sizes)
    }

    fn apply_move(&mut self, p: usize, from: usize, to: usize, _sizes: &[usize]) {
        let b = self.bins[p];
        self.within[from] = self.cluster_entropy_with(from, b, -1);
        self.within[to] = self.cluster_entropy_with(to, b, 1);
        self.counts[from * self.nbins + b] -= 1;
        self.counts[to * self.nbins + b] += 1;
        self.value = self.combine(&self.within, &Self::sizes_of(&self.counts, self.nbins));
    }
}

/// Maps cluster `m` to gray `round(255 m / (k - 1))`.
pub fn labels_to_image(labels: &Labeling, dims: (usize, usize)) -> Result<GrayImage> {
    let (w, h) = dims;
    if labels.labels().len() != w * h {
        return Err(Error::DimensionMismatch { left: (labels.labels().len(), 1), right: dims });
    }
    let span = (labels.k() - 1) as u64;
    let pixels = labels.labels().iter().map(|&m| ((510 * m as u64 + span) / (2 * span)) as u8).collect();
    GrayImage::new(w, h, pixels)
}

/// Inverse of [`labels_to_image`]: each gray value goes to the nearest level.
pub fn image_to_labels(img: &GrayImage, k: usize) -> Result<Labeling> {
    if k < 2 {
        return Err(Error::TooFewClusters(k));
    }
    let span = (k - 1) as f64;
    let labels = img.pixels().iter().map(|&v| ((v as f64 * span / 255.0) + 0.5).floor() as usize).collect();
    Labeling::new(labels, k)
}
