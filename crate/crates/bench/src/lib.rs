//! Fixed inputs shared by the criterion benches.

use gentropy::imaging::{add_noise, shift_image, synth_bimodal, synth_scene, GrayImage};
use gentropy::{EntropySpec, FeatureSet, ProbabilityVector};

pub fn families() -> [EntropySpec; 3] {
    [EntropySpec::shannon(), EntropySpec::renyi(2.0).unwrap(), EntropySpec::tsallis(2.0).unwrap()]
}

/// Smooth, strictly positive distribution over `n` outcomes.
pub fn distribution(n: usize) -> ProbabilityVector {
    let w: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.37).sin().abs()).collect();
    ProbabilityVector::from_weights(&w).unwrap()
}

pub fn bimodal(side: usize) -> GrayImage {
    synth_bimodal(side, side, 64.0, 192.0, 15.0, 0.5, 1).unwrap().0
}

/// Master and a slave moved by (5, -3) with noise 10.
pub fn shift_pair(side: usize) -> (GrayImage, GrayImage) {
    let master = synth_scene(side, side, 1).unwrap();
    let slave = add_noise(&shift_image(&master, 5, -3, 0).unwrap(), 10.0, 2).unwrap();
    (master, slave)
}

/// Gray-level features of a half-dark, half-bright noisy image.
pub fn two_level_features(side: usize) -> FeatureSet {
    let pixels = (0..side * side).map(|i| if i % side < side / 2 { 60 } else { 190 }).collect();
    let img = add_noise(&GrayImage::new(side, side, pixels).unwrap(), 12.0, 3).unwrap();
    FeatureSet::from_image(&img, false)
}
