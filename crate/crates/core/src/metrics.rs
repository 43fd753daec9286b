//! Accuracy measures for the three pipelines.

use std::fmt;

use crate::error::{Error, Result};
use crate::imaging::GrayImage;
use crate::registration::pearson_from_sums;

/// Label agreement counts; rows are reference labels, columns predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    k: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn from_counts(k: usize, counts: Vec<u64>) -> Result<Self> {
        if k < 2 || counts.len() != k * k {
            return Err(Error::InvalidParameter(format!("confusion matrix needs k >= 2 and k*k cells, got k={k}")));
        }
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::InvalidParameter("confusion matrix is empty".into()));
        }
        Ok(ConfusionMatrix { k, counts })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, reference: usize, predicted: usize) -> u64 {
        self.counts[reference * self.k + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.k).map(|i| self.get(i, i)).sum()
    }

    pub fn row_total(&self, r: usize) -> u64 {
        self.counts[r * self.k..(r + 1) * self.k].iter().sum()
    }

    pub fn col_total(&self, c: usize) -> u64 {
        (0..self.k).map(|r| self.get(r, c)).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.k).all(|r| (0..self.k).all(|c| r == c || self.get(r, c) == 0))
    }
}

/// Builds the matrix, optionally renaming predicted labels first so that
/// each predicted id maps to the reference id it agrees with most.
///
/// The renaming is greedy: the largest remaining cell fixes one pair, ties
/// broken by smallest `(reference, predicted)`.
pub fn confusion(reference: &[usize], predicted: &[usize], auto_map: bool) -> Result<ConfusionMatrix> {
    if reference.len() != predicted.len() {
        return Err(Error::LengthMismatch(reference.len(), predicted.len()));
    }
    if reference.is_empty() {
        return Err(Error::InvalidParameter("no labels to compare".into()));
    }
    let k = reference.iter().chain(predicted).copied().max().unwrap_or(0).max(1) + 1;
    let mut raw = vec![0u64; k * k];
    for (&r, &p) in reference.iter().zip(predicted) {
        raw[r * k + p] += 1;
    }
    if !auto_map {
        return ConfusionMatrix::from_counts(k, raw);
    }
    let mut mapping = vec![usize::MAX; k];
    let mut row_used = vec![false; k];
    for _ in 0..k {
        let mut best: Option<(u64, usize, usize)> = None;
        for r in (0..k).filter(|&r| !row_used[r]) {
            for p in (0..k).filter(|&p| mapping[p] == usize::MAX) {
                let c = raw[r * k + p];
                if best.is_none_or(|(b, _, _)| c > b) {
                    best = Some((c, r, p));
                }
            }
        }
        let (_, r, p) = best.expect("square assignment leaves a free pair");
        mapping[p] = r;
        row_used[r] = true;
    }
    let mut counts = vec![0u64; k * k];
    for (&r, &p) in reference.iter().zip(predicted) {
        counts[r * k + mapping[p]] += 1;
    }
    ConfusionMatrix::from_counts(k, counts)
}

/// Trace over total.
pub fn overall_accuracy(cm: &ConfusionMatrix) -> f64 {
    cm.trace() as f64 / cm.total() as f64
}

/// Cohen's kappa; 0 when chance agreement is already 1.
pub fn kappa(cm: &ConfusionMatrix) -> f64 {
    let total = cm.total() as f64;
    let observed = overall_accuracy(cm);
    let chance = (0..cm.k()).map(|i| cm.row_total(i) as f64 * cm.col_total(i) as f64).sum::<f64>() / (total * total);
    if chance >= 1.0 {
        return 0.0;
    }
    (observed - chance) / (1.0 - chance)
}

fn pearson_images(a: &GrayImage, b: &GrayImage) -> f64 {
    let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0i128, 0i128, 0i128, 0i128, 0i128);
    for (&x, &y) in a.pixels().iter().zip(b.pixels()) {
        let (x, y) = (x as i128, y as i128);
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
        sab += x * y;
    }
    pearson_from_sums(a.len() as i128, sa, sb, saa, sbb, sab)
}

/// Absolute Pearson correlation between an image and its binarization.
pub fn threshold_correlation(original: &GrayImage, binarized: &GrayImage) -> Result<f64> {
    original.ensure_same_dims(binarized)?;
    let mut seen = [false; 256];
    for &v in binarized.pixels() {
        seen[v as usize] = true;
    }
    if seen.iter().filter(|&&s| s).count() > 2 {
        return Err(Error::InvalidParameter("binarized image has more than two levels".into()));
    }
    Ok(pearson_images(original, binarized).abs().min(1.0))
}

/// The three components of [`average_score`], each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreParts {
    /// One minus the misclassified fraction against the mask.
    pub classification: f64,
    /// One minus the relative foreground area error, floored at 0.
    pub area: f64,
    /// One minus within-class over total variance of the original.
    pub uniformity: f64,
}

impl ScoreParts {
    pub fn mean(&self) -> f64 {
        (self.classification + self.area + self.uniformity) / 3.0
    }
}

pub fn score_parts(original: &GrayImage, binarized: &GrayImage, mask: &GrayImage) -> Result<ScoreParts> {
    original.ensure_same_dims(binarized)?;
    original.ensure_same_dims(mask)?;
    let n = original.len() as f64;
    let true_area = mask.pixels().iter().filter(|&&m| m > 0).count();
    if true_area == 0 {
        return Err(Error::EmptyForeground);
    }
    let predicted_area = binarized.pixels().iter().filter(|&&b| b > 0).count();
    let wrong = mask.pixels().iter().zip(binarized.pixels()).filter(|(&m, &b)| (m > 0) != (b > 0)).count();

    // class-wise moments under the predicted partition
    let mut stats = [(0f64, 0f64, 0f64); 2];
    for (&v, &b) in original.pixels().iter().zip(binarized.pixels()) {
        let s = &mut stats[(b > 0) as usize];
        let v = v as f64;
        s.0 += 1.0;
        s.1 += v;
        s.2 += v * v;
    }
    let scatter = |(n, s, ss): (f64, f64, f64)| if n > 0.0 { ss - s * s / n } else { 0.0 };
    let within = scatter(stats[0]) + scatter(stats[1]);
    let all = (stats[0].0 + stats[1].0, stats[0].1 + stats[1].1, stats[0].2 + stats[1].2);
    let total = scatter(all);
    let uniformity = if total > 0.0 { (1.0 - within / total).clamp(0.0, 1.0) } else { 1.0 };

    let area_error = (predicted_area as f64 - true_area as f64).abs() / true_area as f64;
    Ok(ScoreParts { classification: 1.0 - wrong as f64 / n, area: 1.0 - area_error.min(1.0), uniformity })
}

/// Mean of the classification, area and uniformity scores; in `[0, 1]`.
pub fn average_score(original: &GrayImage, binarized: &GrayImage, mask: &GrayImage) -> Result<f64> {
    Ok(score_parts(original, binarized, mask)?.mean())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeCategory {
    Low,
    Medium,
    High,
}

impl fmt::Display for TimeCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeCategory::Low => "Low",
            TimeCategory::Medium => "Medium",
            TimeCategory::High => "High",
        })
    }
}

/// Low below 30 s, High above 60 s, Medium in between (inclusive).
pub fn categorize_time(seconds: f64) -> Result<TimeCategory> {
    if seconds.is_nan() || seconds < 0.0 {
        return Err(Error::NegativeTime(seconds));
    }
    Ok(if seconds < 30.0 {
        TimeCategory::Low
    } else if seconds <= 60.0 {
        TimeCategory::Medium
    } else {
        TimeCategory::High
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thresholding::apply_threshold;
    use approx::assert_abs_diff_eq;

    #[test]
    fn confusion_examples() {
        let cm = confusion(&[0, 1, 2, 1], &[0, 1, 2, 1], false).unwrap();
        assert!(cm.is_diagonal());
        let cm = confusion(&[0, 0, 1, 1, 1], &[1, 1, 0, 0, 0], true).unwrap();
        assert!(cm.is_diagonal());
        assert_eq!(cm.trace(), 5);
        let cm = confusion(&[0, 0, 1, 1], &[0, 1, 0, 1], false).unwrap();
        assert_eq!(cm.counts, vec![1, 1, 1, 1]);
        assert_eq!(confusion(&[0, 1], &[0], false), Err(Error::LengthMismatch(2, 1)));
    }

    #[test]
    fn accuracy_and_kappa_arithmetic() {
        let cm = ConfusionMatrix::from_counts(2, vec![45, 5, 10, 40]).unwrap();
        assert_abs_diff_eq!(overall_accuracy(&cm), 0.85, epsilon = 1e-15);
        assert_abs_diff_eq!(kappa(&cm), 0.70, epsilon = 1e-12);
        let diag = ConfusionMatrix::from_counts(2, vec![30, 0, 0, 30]).unwrap();
        assert_eq!((overall_accuracy(&diag), kappa(&diag)), (1.0, 1.0));
        let off = ConfusionMatrix::from_counts(2, vec![0, 7, 3, 0]).unwrap();
        assert_eq!(overall_accuracy(&off), 0.0);
    }

    #[test]
    fn kappa_of_independent_matrix_is_zero() {
        // outer product of marginals (0.3, 0.7) x (0.4, 0.6) over 100
        let cm = ConfusionMatrix::from_counts(2, vec![12, 18, 28, 42]).unwrap();
        assert_abs_diff_eq!(kappa(&cm), 0.0, epsilon = 1e-9);
        let single = ConfusionMatrix::from_counts(2, vec![9, 0, 0, 0]).unwrap();
        assert_eq!(kappa(&single), 0.0);
    }

    #[test]
    fn correlation_examples() {
        let bin = GrayImage::new(4, 1, vec![0, 255, 255, 0]).unwrap();
        assert_eq!(threshold_correlation(&bin, &bin).unwrap(), 1.0);
        let flat = GrayImage::filled(4, 1, 0).unwrap();
        assert_eq!(threshold_correlation(&bin, &flat).unwrap(), 0.0);
        let two = GrayImage::from_fn(8, 4, |x, _| if x < 3 { 40 } else { 170 }).unwrap();
        assert_abs_diff_eq!(threshold_correlation(&two, &apply_threshold(&two, 100)).unwrap(), 1.0, epsilon = 1e-15);
        let three = GrayImage::new(3, 1, vec![0, 1, 2]).unwrap();
        assert!(threshold_correlation(&two.clone(), &GrayImage::filled(8, 4, 0).unwrap()).is_ok());
        assert!(threshold_correlation(&three, &three).is_err());
    }

    #[test]
    fn average_score_examples() {
        let img = GrayImage::from_fn(10, 4, |x, _| if x < 6 { 50 } else { 200 }).unwrap();
        let mask = GrayImage::from_fn(10, 4, |x, _| if x < 6 { 0 } else { 255 }).unwrap();
        assert_eq!(average_score(&img, &mask, &mask).unwrap(), 1.0);

        let none = GrayImage::filled(10, 4, 0).unwrap();
        let parts = score_parts(&img, &none, &mask).unwrap();
        assert_abs_diff_eq!(parts.classification, 0.6, epsilon = 1e-15);
        assert_eq!(parts.area, 0.0);
        assert!(parts.mean() < 1.0);
        assert_eq!(average_score(&img, &mask, &none), Err(Error::EmptyForeground));
    }

    #[test]
    fn time_categories() {
        assert_eq!(categorize_time(5.0).unwrap(), TimeCategory::Low);
        assert_eq!(categorize_time(45.0).unwrap(), TimeCategory::Medium);
        assert_eq!(categorize_time(300.0).unwrap(), TimeCategory::High);
        assert_eq!(categorize_time(30.0).unwrap(), TimeCategory::Medium);
        assert_eq!(categorize_time(60.0).unwrap(), TimeCategory::Medium);
        assert_eq!(categorize_time(29.999).unwrap(), TimeCategory::Low);
        assert!(categorize_time(-0.1).is_err());
        assert!(categorize_time(f64::NAN).is_err());
    }
}
