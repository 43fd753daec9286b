use approx::assert_abs_diff_eq;
use gentropy::entropy::{
    entropy, information_potential, joint_entropy, mutual_information, renyi_entropy, shannon_entropy,
    tsallis_entropy,
};
use gentropy::{EntropySpec, JointProbabilityTable, ProbabilityVector};
use proptest::prelude::*;

fn weights(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 1..=max_len).prop_filter("positive mass", |w| w.iter().sum::<f64>() > 1e-6)
}

fn table() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
        prop::collection::vec(0.0f64..1.0, r * c)
            .prop_filter("positive mass", |w| w.iter().sum::<f64>() > 1e-6)
            .prop_map(move |w| (r, c, w))
    })
}

// Direct-summation oracles, written from the definitions.
fn shannon_oracle(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

fn renyi_oracle(p: &[f64], a: f64) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(a)).sum::<f64>().ln() / (1.0 - a)
}

fn tsallis_oracle(p: &[f64], q: f64) -> f64 {
    (1.0 - p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(q)).sum::<f64>()) / (q - 1.0)
}

const ORDERS: [f64; 3] = [0.5, 2.0, 3.0];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_direct_summation(w in weights(64)) {
        let p = ProbabilityVector::from_weights(&w).unwrap();
        prop_assert!((shannon_entropy(&p) - shannon_oracle(p.probs())).abs() < 1e-12);
        for a in ORDERS {
            prop_assert!((renyi_entropy(&p, a).unwrap() - renyi_oracle(p.probs(), a)).abs() < 1e-10);
            prop_assert!((tsallis_entropy(&p, a).unwrap() - tsallis_oracle(p.probs(), a)).abs() < 1e-10);
        }
    }

    #[test]
    fn orders_near_one_recover_shannon(w in weights(64)) {
        let p = ProbabilityVector::from_weights(&w).unwrap();
        let h = shannon_entropy(&p);
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            prop_assert!((renyi_entropy(&p, a).unwrap() - h).abs() < 1e-3);
            prop_assert!((tsallis_entropy(&p, a).unwrap() - h).abs() < 1e-3);
        }
    }

    #[test]
    fn independent_products_compose(a in weights(12), b in weights(12)) {
        let pa = ProbabilityVector::from_weights(&a).unwrap();
        let pb = ProbabilityVector::from_weights(&b).unwrap();
        let j = JointProbabilityTable::outer(&pa, &pb);
        let s = EntropySpec::shannon();
        prop_assert!((joint_entropy(&j, s) - entropy(&pa, s) - entropy(&pb, s)).abs() < 1e-9);
        for o in ORDERS {
            let r = EntropySpec::renyi(o).unwrap();
            prop_assert!((joint_entropy(&j, r) - entropy(&pa, r) - entropy(&pb, r)).abs() < 1e-9);
            let t = EntropySpec::tsallis(o).unwrap();
            let (sa, sb) = (entropy(&pa, t), entropy(&pb, t));
            prop_assert!((joint_entropy(&j, t) - (sa + sb + (1.0 - o) * sa * sb)).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_is_maximal(w in weights(32)) {
        let p = ProbabilityVector::from_weights(&w).unwrap();
        let u = ProbabilityVector::uniform(p.len()).unwrap();
        for spec in all_specs() {
            prop_assert!(entropy(&p, spec) <= entropy(&u, spec) + 1e-12, "{}", spec);
        }
    }

    #[test]
    fn permutation_invariant(w in weights(32), seed in any::<u64>()) {
        let p = ProbabilityVector::from_weights(&w).unwrap();
        let mut shuffled = w.clone();
        // deterministic Fisher-Yates driven by a splitmix sequence
        let mut state = seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            let j = ((z ^ (z >> 31)) % (i as u64 + 1)) as usize;
            shuffled.swap(i, j);
        }
        let q = ProbabilityVector::from_weights(&shuffled).unwrap();
        for spec in all_specs() {
            prop_assert!((entropy(&p, spec) - entropy(&q, spec)).abs() < 1e-12);
        }
    }

    #[test]
    fn shannon_information_is_nonnegative((r, c, w) in table()) {
        let j = JointProbabilityTable::from_weights(r, c, &w).unwrap();
        prop_assert!(mutual_information(&j, EntropySpec::shannon()) >= -1e-12);
    }

    #[test]
    fn information_is_symmetric((r, c, w) in table()) {
        let j = JointProbabilityTable::from_weights(r, c, &w).unwrap();
        let mut tw = vec![0.0; r * c];
        for i in 0..r {
            for k in 0..c {
                tw[k * r + i] = w[i * c + k];
            }
        }
        let t = JointProbabilityTable::from_weights(c, r, &tw).unwrap();
        for spec in all_specs() {
            prop_assert!((mutual_information(&j, spec) - mutual_information(&t, spec)).abs() < 1e-10);
        }
    }

    #[test]
    fn potential_is_translation_invariant(
        pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 1..24),
        shift in prop::collection::vec(-50.0f64..50.0, 2),
        sigma in 0.1f64..3.0,
    ) {
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[0] + shift[0], p[1] + shift[1]]).collect();
        let a = information_potential(&pts, sigma).unwrap();
        let b = information_potential(&moved, sigma).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-300));
        let mut reversed = pts.clone();
        reversed.reverse();
        prop_assert!((information_potential(&reversed, sigma).unwrap() - a).abs() <= 1e-12 * a);
    }
}

fn all_specs() -> Vec<EntropySpec> {
    let mut out = vec![EntropySpec::shannon()];
    for o in ORDERS {
        out.push(EntropySpec::renyi(o).unwrap());
        out.push(EntropySpec::tsallis(o).unwrap());
    }
    out
}

#[test]
fn worked_values() {
    let p = ProbabilityVector::from_weights(&[0.5, 0.25, 0.25]).unwrap();
    assert_abs_diff_eq!(renyi_entropy(&p, 2.0).unwrap(), -(0.375f64).ln(), epsilon = 1e-12);
    let half = ProbabilityVector::from_weights(&[0.5, 0.5]).unwrap();
    assert_abs_diff_eq!(tsallis_entropy(&half, 3.0).unwrap(), 0.375, epsilon = 1e-12);
    let diag = JointProbabilityTable::from_weights(4, 4, &{
        let mut w = vec![0.0; 16];
        for i in 0..4 {
            w[i * 5] = 0.25;
        }
        w
    })
    .unwrap();
    assert_abs_diff_eq!(mutual_information(&diag, EntropySpec::renyi(2.0).unwrap()), 4f64.ln(), epsilon = 1e-12);
}
