//! Shannon, Renyi and Tsallis entropies applied to grayscale image analysis.
//!
//! The [`entropy`] module holds the functionals. Each analysis takes an
//! [`EntropySpec`] so the three families can be swapped freely:
//!
//! - [`thresholding`]: maximum-entropy bi-level cuts, 1D and 2D;
//! - [`registration`]: translation/rotation search maximizing mutual information;
//! - [`clustering`]: coordinate descent on a cluster evaluation function.
//!
//! [`imaging`] provides the image type, PGM I/O, histograms and seeded
//! fixtures; [`metrics`] scores the results.

pub mod clustering;
pub mod entropy;
pub mod error;
pub mod imaging;
pub mod metrics;
pub mod registration;
pub mod thresholding;

pub use entropy::{EntropySpec, Family, JointProbabilityTable, ProbabilityVector};
pub use error::{Error, Result};
pub use imaging::{GrayImage, Histogram, JointHistogram};
pub use metrics::{ConfusionMatrix, TimeCategory};
pub use registration::{RegistrationResult, SearchConfig, TransformParams};
pub use thresholding::{Threshold2dResult, ThresholdResult};
pub use clustering::{FeatureSet, Labeling};
