//! Parzen-window estimate of Renyi's quadratic entropy.
//!
//! With Gaussian windows of width `sigma`, the integral of the squared density
//! estimate collapses to a double sum of Gaussians of variance `2 sigma^2`
//! evaluated at the pairwise sample differences (the information potential).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Isotropic Gaussian density with covariance `variance * I` in `dim` dimensions,
/// evaluated at a point with squared norm `sq_norm`.
pub fn gaussian_kernel(sq_norm: f64, variance: f64, dim: usize) -> f64 {
    (2.0 * PI * variance).powf(-(dim as f64) / 2.0) * (-sq_norm / (2.0 * variance)).exp()
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveSigma(sigma))
    }
}

fn sample_dim<S: AsRef<[f64]>>(samples: &[S]) -> Result<usize> {
    let first = samples.first().ok_or(Error::EmptySamples)?.as_ref().len();
    if first == 0 || samples.iter().any(|s| s.as_ref().len() != first) {
        return Err(Error::RaggedSamples);
    }
    Ok(first)
}

/// `(1/N^2) sum_i sum_j G(x_i - x_j; 2 sigma^2 I)`.
pub fn information_potential<S: AsRef<[f64]>>(samples: &[S], sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let dim = sample_dim(samples)?;
    let variance = 2.0 * sigma * sigma;
    let n = samples.len();
    let self_term = gaussian_kernel(0.0, variance, dim);
    let mut cross = 0.0;
    for i in 0..n {
        let xi = samples[i].as_ref();
        let row: f64 = samples[i + 1..]
            .iter()
            .map(|xj| gaussian_kernel(squared_distance(xi, xj.as_ref()), variance, dim))
            .sum();
        cross += row;
    }
    let n = n as f64;
    Ok((n * self_term + 2.0 * cross) / (n * n))
}

/// `-ln` of the information potential.
pub fn renyi_quadratic_entropy<S: AsRef<[f64]>>(samples: &[S], sigma: f64) -> Result<f64> {
    Ok(-information_potential(samples, sigma)?.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_sample_is_kernel_peak() {
        for sigma in [0.1, 1.0, 7.5] {
            let v = information_potential(&[[3.0, -1.0]], sigma).unwrap();
            assert_eq!(v, gaussian_kernel(0.0, 2.0 * sigma * sigma, 2));
            assert_abs_diff_eq!(v, 1.0 / (4.0 * PI * sigma * sigma), epsilon = 1e-12);
        }
    }

    #[test]
    fn identical_pair_in_one_dimension() {
        let v = information_potential(&[[0.4], [0.4]], 1.0).unwrap();
        assert_abs_diff_eq!(v, 1.0 / (2.0 * PI.sqrt()), epsilon = 1e-14);
    }

    #[test]
    fn potential_decreases_with_distance_towards_self_terms() {
        let peak = gaussian_kernel(0.0, 2.0, 1);
        let mut prev = f64::INFINITY;
        for d in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 40.0] {
            let v = information_potential(&[[0.0], [d]], 1.0).unwrap();
            assert!(v < prev || d == 0.0);
            prev = v;
        }
        assert_abs_diff_eq!(prev, 0.25 * 2.0 * peak, epsilon = 1e-15);
    }

    #[test]
    fn quadratic_entropy_single_sample() {
        let h = renyi_quadratic_entropy(&[[0.0]], 1.0).unwrap();
        assert_abs_diff_eq!(h, (2.0 * PI.sqrt()).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(h, 1.2655, epsilon = 1e-4);
    }

    #[test]
    fn spreading_raises_entropy_and_translation_does_not() {
        let tight = [[0.0, 0.0], [0.5, 0.1], [0.2, 0.4]];
        let wide: Vec<[f64; 2]> = tight.iter().map(|p| [p[0] * 3.0, p[1] * 3.0]).collect();
        let shifted: Vec<[f64; 2]> = tight.iter().map(|p| [p[0] + 11.0, p[1] - 4.0]).collect();
        let h = renyi_quadratic_entropy(&tight, 0.3).unwrap();
        assert!(renyi_quadratic_entropy(&wide, 0.3).unwrap() > h);
        assert_abs_diff_eq!(renyi_quadratic_entropy(&shifted, 0.3).unwrap(), h, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let empty: [[f64; 1]; 0] = [];
        assert_eq!(information_potential(&empty, 1.0), Err(Error::EmptySamples));
        assert_eq!(information_potential(&[[1.0]], 0.0), Err(Error::NonPositiveSigma(0.0)));
        assert_eq!(information_potential(&[[1.0]], -2.0), Err(Error::NonPositiveSigma(-2.0)));
        let ragged: Vec<Vec<f64>> = vec![vec![1.0], vec![1.0, 2.0]];
        assert_eq!(information_potential(&ragged, 1.0), Err(Error::RaggedSamples));
    }
}
