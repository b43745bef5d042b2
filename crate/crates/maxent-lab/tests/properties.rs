//! Randomized invariants over the exact discrete machinery.

use maxent_lab::discrete_prob::{
    binned_mi_labels, entropy, induce_triple, mutual_information, FeatureMap, JointTable,
};
use proptest::prelude::*;

/// Normalized probability vector of the given length.
fn dist(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-6..1.0f64, len).prop_map(|mut v| {
        let s: f64 = v.iter().sum();
        for p in &mut v {
            *p /= s;
        }
        v
    })
}

fn joint(nx: usize, ny: usize) -> impl Strategy<Value = JointTable> {
    dist(nx * ny).prop_map(move |p| JointTable::new(vec![nx, ny], p).unwrap())
}

fn feature_map(nx: usize, nf: usize) -> impl Strategy<Value = FeatureMap> {
    prop::collection::vec(prop::bool::ANY, nx * nf).prop_map(move |bits| {
        FeatureMap::new(nx, nf, bits.into_iter().map(f64::from).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_bounds_and_permutation_invariance(p in dist(6), perm in Just([3usize, 0, 5, 1, 4, 2])) {
        let h = entropy(&p).unwrap();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (p.len() as f64).ln() + 1e-9);
        let shuffled: Vec<f64> = perm.iter().map(|&i| p[i]).collect();
        prop_assert!((entropy(&shuffled).unwrap() - h).abs() <= 1e-12);
    }

    #[test]
    fn mi_nonnegative_and_bounded_by_marginal_entropies(j in joint(5, 4)) {
        let mi = mutual_information(&j).unwrap();
        prop_assert!(mi >= 0.0);
        let ha = entropy(&j.marginal(0)).unwrap();
        let hb = entropy(&j.marginal(1)).unwrap();
        prop_assert!(mi <= ha.min(hb) + 1e-9);
    }

    #[test]
    fn mi_invariant_under_variable_swap(j in joint(4, 4)) {
        let dims = j.dims().to_vec();
        let mut swapped = vec![0.0; dims[0] * dims[1]];
        for a in 0..dims[0] {
            for b in 0..dims[1] {
                swapped[b * dims[0] + a] = j.get2(a, b);
            }
        }
        let jt = JointTable::new(vec![dims[1], dims[0]], swapped).unwrap();
        prop_assert!((mutual_information(&jt).unwrap() - mutual_information(&j).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn induced_triple_preserves_the_joint((j, f) in (joint(8, 3), feature_map(8, 3))) {
        let triple = induce_triple(&j, &f).unwrap();
        // Marginalizing T back out recovers P(X, Y) exactly.
        let back = triple.marginalize_out(1).unwrap();
        for a in 0..8 {
            for b in 0..3 {
                prop_assert!((back.get2(a, b) - j.get2(a, b)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn data_processing_on_induced_triples((j, f) in (joint(8, 3), feature_map(8, 2))) {
        let triple = induce_triple(&j, &f).unwrap();
        let i_ty = mutual_information(&triple.marginalize_out(0).unwrap()).unwrap();
        let i_xy = mutual_information(&j).unwrap();
        prop_assert!(i_ty <= i_xy + 1e-9);
    }

    #[test]
    fn binned_mi_with_labels_bounded(
        cols in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 2), 40),
        labels in prop::collection::vec(0usize..3, 40),
        bins in 2usize..12,
    ) {
        let mi = binned_mi_labels(&cols, &labels, bins).unwrap();
        prop_assert!(mi >= 0.0);
        prop_assert!(mi <= 3.0f64.ln() + 1e-9);
    }
}
