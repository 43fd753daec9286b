use approx::assert_abs_diff_eq;
use gentropy::imaging::{histogram, synth_bimodal, GrayImage};
use gentropy::metrics::{
    average_score, categorize_time, confusion, kappa, overall_accuracy, score_parts, threshold_correlation,
};
use gentropy::thresholding::{apply_threshold, entropic_threshold};
use gentropy::{ConfusionMatrix, EntropySpec, TimeCategory};
use proptest::prelude::*;

fn labels(n: usize, k: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (prop::collection::vec(0..k, n), prop::collection::vec(0..k, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kappa_ignores_consistent_relabeling((r, p) in labels(60, 3), perm in Just([2usize, 0, 1])) {
        let base = confusion(&r, &p, false);
        prop_assume!(base.is_ok());
        let rr: Vec<usize> = r.iter().map(|&l| perm[l]).collect();
        let pp: Vec<usize> = p.iter().map(|&l| perm[l]).collect();
        let a = kappa(&base.unwrap());
        let b = kappa(&confusion(&rr, &pp, false).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn kappa_is_one_exactly_for_diagonal_tables(counts in prop::collection::vec(0u64..50, 9)) {
        prop_assume!(counts.iter().sum::<u64>() > 0);
        let cm = ConfusionMatrix::from_counts(3, counts).unwrap();
        let k = kappa(&cm);
        prop_assert!(k <= 1.0 + 1e-12);
        // an all-one-class table has expected agreement 1 and kappa 0 by convention
        let single_class = (0..3).filter(|&c| cm.row_total(c) > 0 || cm.col_total(c) > 0).count() == 1;
        if !single_class {
            prop_assert_eq!(k == 1.0, cm.is_diagonal());
        }
        prop_assert!((0.0..=1.0).contains(&overall_accuracy(&cm)));
    }

    #[test]
    fn correlation_survives_affine_gray_maps(px in prop::collection::vec(0u8..=100, 64), t in 10u8..90) {
        let img = GrayImage::new(8, 8, px).unwrap();
        let bin = apply_threshold(&img, t);
        prop_assume!(bin.pixels().contains(&0) && bin.pixels().contains(&255));
        let base = threshold_correlation(&img, &bin).unwrap();
        let stretched = img.map(|v| 2 * v + 20);
        let inverted = img.map(|v| 255 - v);
        prop_assert!((threshold_correlation(&stretched, &bin).unwrap() - base).abs() < 1e-12);
        prop_assert!((threshold_correlation(&inverted, &bin).unwrap() - base).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&base));
    }

    #[test]
    fn average_score_is_a_unit_interval_mean(
        px in prop::collection::vec(any::<u8>(), 100),
        bin in prop::collection::vec(any::<bool>(), 100),
        mask in prop::collection::vec(any::<bool>(), 100),
    ) {
        prop_assume!(mask.iter().any(|&m| m));
        let to_img = |v: &[bool]| GrayImage::new(10, 10, v.iter().map(|&b| if b { 255 } else { 0 }).collect()).unwrap();
        let img = GrayImage::new(10, 10, px).unwrap();
        let parts = score_parts(&img, &to_img(&bin), &to_img(&mask)).unwrap();
        for v in [parts.classification, parts.area, parts.uniformity, parts.mean()] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn hand_checked_two_class_table() {
    let cm = ConfusionMatrix::from_counts(2, vec![45, 5, 10, 40]).unwrap();
    assert_abs_diff_eq!(overall_accuracy(&cm), 0.85, epsilon = 1e-12);
    // p_o = 0.85, p_e = 0.5 * 0.55 + 0.5 * 0.45 = 0.5
    assert_abs_diff_eq!(kappa(&cm), 0.70, epsilon = 1e-12);
}

#[test]
fn time_bands() {
    let got: Vec<TimeCategory> = [5.0, 45.0, 300.0].iter().map(|&s| categorize_time(s).unwrap()).collect();
    assert_eq!(got, [TimeCategory::Low, TimeCategory::Medium, TimeCategory::High]);
    assert_eq!(categorize_time(30.0).unwrap(), TimeCategory::Medium);
    assert_eq!(categorize_time(60.0).unwrap(), TimeCategory::Medium);
    assert!(categorize_time(-1.0).is_err());
}

#[test]
fn tsallis_scores_at_least_shannon_on_bimodal_fixtures() {
    for seed in 0..10 {
        let (img, mask) = synth_bimodal(128, 128, 64.0, 192.0, 15.0, 0.5, seed).unwrap();
        let h = histogram(&img);
        let score = |spec| {
            let t = entropic_threshold(&h, spec).unwrap().threshold;
            average_score(&img, &apply_threshold(&img, t), &mask).unwrap()
        };
        let (s, t) = (score(EntropySpec::shannon()), score(EntropySpec::tsallis(2.0).unwrap()));
        assert!(t >= s, "seed {seed}: tsallis {t} < shannon {s}");
    }
}
