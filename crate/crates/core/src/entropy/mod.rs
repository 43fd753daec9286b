//! Discrete entropy functionals for the Shannon, Renyi and Tsallis families.
//!
//! All logarithms are natural, so Shannon and Renyi values are in nats and
//! Tsallis values are dimensionless. Zero-probability bins contribute nothing
//! (`0 ln 0 = 0`, `0^a = 0` for `a > 0`).

pub(crate) mod parzen;

pub use parzen::{gaussian_kernel, information_potential, renyi_quadratic_entropy};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Half-width of the excluded band around order 1 for Renyi and Tsallis.
pub const ORDER_GUARD: f64 = 1e-6;

/// Tolerance on the total mass of a probability vector or table.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Shannon,
    Renyi,
    Tsallis,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Shannon => "shannon",
            Family::Renyi => "renyi",
            Family::Tsallis => "tsallis",
        })
    }
}

/// An entropy family together with its order parameter.
///
/// The order is Renyi's alpha or Tsallis' q; Shannon carries no order.
/// Construction validates the order, so every `EntropySpec` in circulation
/// can be evaluated without further checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySpec {
    family: Family,
    order: f64,
}

impl EntropySpec {
    pub const fn shannon() -> Self {
        EntropySpec { family: Family::Shannon, order: 1.0 }
    }

    pub fn renyi(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || (alpha - 1.0).abs() <= ORDER_GUARD {
            return Err(Error::InvalidOrder { family: Family::Renyi, order: alpha });
        }
        Ok(EntropySpec { family: Family::Renyi, order: alpha })
    }

    pub fn tsallis(q: f64) -> Result<Self> {
        if !q.is_finite() || (q - 1.0).abs() <= ORDER_GUARD {
            return Err(Error::InvalidOrder { family: Family::Tsallis, order: q });
        }
        Ok(EntropySpec { family: Family::Tsallis, order: q })
    }

    pub fn new(family: Family, order: f64) -> Result<Self> {
        match family {
            Family::Shannon => Ok(Self::shannon()),
            Family::Renyi => Self::renyi(order),
            Family::Tsallis => Self::tsallis(order),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Order parameter, `None` for Shannon.
    pub fn order(&self) -> Option<f64> {
        match self.family {
            Family::Shannon => None,
            _ => Some(self.order),
        }
    }
}

/// Formats as `shannon`, `renyi:<alpha>` or `tsallis:<q>`.
impl fmt::Display for EntropySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order() {
            None => write!(f, "{}", self.family),
            Some(order) => write!(f, "{}:{}", self.family, order),
        }
    }
}

impl FromStr for EntropySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, order) = match s.split_once(':') {
            Some((name, order)) => (name.trim(), Some(order.trim())),
            None => (s, None),
        };
        let parse_order = |default: f64| -> Result<f64> {
            match order {
                None => Ok(default),
                Some(text) => text
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad entropy order '{text}'"))),
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "shannon" if order.is_none() => Ok(Self::shannon()),
            "renyi" => Self::renyi(parse_order(2.0)?),
            "tsallis" => Self::tsallis(parse_order(2.0)?),
            _ => Err(Error::InvalidParameter(format!("unknown entropy family '{s}'"))),
        }
    }
}

/// A finite discrete distribution; elements are nonnegative and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    /// Normalizes nonnegative weights (typically histogram counts).
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total = checked_total(weights)?;
        Ok(ProbabilityVector { probs: weights.iter().map(|w| w / total).collect() })
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidWeights);
        }
        let total = total as f64;
        Ok(ProbabilityVector { probs: counts.iter().map(|&c| c as f64 / total).collect() })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(&vec![1.0; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

fn checked_total(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidWeights);
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::InvalidWeights);
    }
    Ok(total)
}

/// A 2D joint distribution stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointProbabilityTable {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointProbabilityTable {
    pub fn from_weights(rows: usize, cols: usize, weights: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyTable);
        }
        if weights.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "table of {rows}x{cols} needs {} weights, got {}",
                rows * cols,
                weights.len()
            )));
        }
        let total = checked_total(weights)?;
        Ok(JointProbabilityTable { rows, cols, probs: weights.iter().map(|w| w / total).collect() })
    }

    pub fn from_counts(rows: usize, cols: usize, counts: &[u64]) -> Result<Self> {
        let weights: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        Self::from_weights(rows, cols, &weights)
    }

    /// Table of an independent pair: `p[r][c] = a[r] * b[c]`.
    pub fn outer(a: &ProbabilityVector, b: &ProbabilityVector) -> Self {
        let probs = a
            .probs()
            .iter()
            .flat_map(|&x| b.probs().iter().map(move |&y| x * y))
            .collect();
        JointProbabilityTable { rows: a.len(), cols: b.len(), probs }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.probs[row * self.cols + col]
    }

    /// Flattened row-major probabilities.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn row_marginal(&self) -> ProbabilityVector {
        let probs = self.probs.chunks(self.cols).map(|row| row.iter().sum()).collect();
        ProbabilityVector { probs }
    }

    pub fn col_marginal(&self) -> ProbabilityVector {
        let mut probs = vec![0.0; self.cols];
        for row in self.probs.chunks(self.cols) {
            for (acc, p) in probs.iter_mut().zip(row) {
                *acc += p;
            }
        }
        ProbabilityVector { probs }
    }

    /// Views the flattened table as a single distribution.
    pub fn flattened(&self) -> ProbabilityVector {
        ProbabilityVector { probs: self.probs.clone() }
    }
}

/// `-sum p ln p`, in nats.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    shannon_of(p.probs())
}

/// `ln(sum p^alpha) / (1 - alpha)`, in nats.
pub fn renyi_entropy(p: &ProbabilityVector, alpha: f64) -> Result<f64> {
    let spec = EntropySpec::renyi(alpha)?;
    Ok(entropy(p, spec))
}

/// `(1 - sum p^q) / (q - 1)`.
pub fn tsallis_entropy(p: &ProbabilityVector, q: f64) -> Result<f64> {
    let spec = EntropySpec::tsallis(q)?;
    Ok(entropy(p, spec))
}

pub fn entropy(p: &ProbabilityVector, spec: EntropySpec) -> f64 {
    entropy_of(p.probs(), spec)
}

pub fn joint_entropy(j: &JointProbabilityTable, spec: EntropySpec) -> f64 {
    entropy_of(j.probs(), spec)
}

/// `H(rows) + H(cols) - H(joint)` under the same functional for every family.
///
/// For Shannon this is the classical mutual information. For Renyi and
/// Tsallis it is the additive combination, not the pseudo-additive one.
pub fn mutual_information(j: &JointProbabilityTable, spec: EntropySpec) -> f64 {
    entropy(&j.row_marginal(), spec) + entropy(&j.col_marginal(), spec) - joint_entropy(j, spec)
}

/// Evaluates a functional on a slice already known to sum to one.
pub(crate) fn entropy_of(probs: &[f64], spec: EntropySpec) -> f64 {
    match spec.family {
        Family::Shannon => shannon_of(probs),
        Family::Renyi => power_sum(probs, spec.order).ln() / (1.0 - spec.order),
        Family::Tsallis => (1.0 - power_sum(probs, spec.order)) / (spec.order - 1.0),
    }
}

/// Entropy of the distribution obtained by normalizing integer counts.
pub(crate) fn entropy_of_counts(counts: &[u64], spec: EntropySpec) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let nonzero = counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 / total);
    match spec.family {
        Family::Shannon => -nonzero.map(|p| p * p.ln()).sum::<f64>(),
        Family::Renyi => nonzero.map(|p| p.powf(spec.order)).sum::<f64>().ln() / (1.0 - spec.order),
        Family::Tsallis => (1.0 - nonzero.map(|p| p.powf(spec.order)).sum::<f64>()) / (spec.order - 1.0),
    }
}

fn shannon_of(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

fn power_sum(probs: &[f64], order: f64) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| p.powf(order)).sum()
}
