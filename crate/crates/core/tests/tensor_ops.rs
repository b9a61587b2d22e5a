mod common;

use common::{all_indices, random_tensor};
use mwpam_core::{dissim, mode_slice, replace, subtensor, IndexSet, Tensor};
use proptest::prelude::*;

#[test]
fn subtensor_matches_direct_indexing() {
    let t = random_tensor(&[3, 3], 11);
    let s = subtensor(&t, &[IndexSet::new(0, vec![0, 2]), IndexSet::new(1, vec![1])]).unwrap();
    assert_eq!(s.dims(), &[2, 1]);
    assert_eq!(s.values(), &[t.get(&[0, 1]).unwrap(), t.get(&[2, 1]).unwrap()]);
}

#[test]
fn mode_slice_matches_subtensor_composition() {
    let t = random_tensor(&[4, 4, 4], 12);
    for mode in 0..3 {
        for i in 0..4 {
            let sets: Vec<IndexSet> = (0..3)
                .map(|m| if m == mode { IndexSet::single(m, i) } else { IndexSet::full(m, 4) })
                .collect();
            assert_eq!(mode_slice(&t, mode, i).unwrap(), subtensor(&t, &sets).unwrap());
            // and against per-entry lookup
            let s = mode_slice(&t, mode, i).unwrap();
            for ix in all_indices(s.dims()) {
                let mut src = ix.clone();
                src[mode] = i;
                assert_eq!(s.get(&ix), t.get(&src));
            }
        }
    }
}

#[test]
fn dissim_matches_elementwise_oracle() {
    let a = random_tensor(&[3, 4, 2], 13);
    let b = random_tensor(&[3, 4, 2], 14);
    let mut acc = 0.0;
    for ix in all_indices(a.dims()) {
        acc += (a.get(&ix).unwrap() - b.get(&ix).unwrap()).powi(2);
    }
    assert!((dissim(&a, &b).unwrap() - acc.sqrt()).abs() < 1e-12);
    // repeated calls are bit-identical
    assert_eq!(dissim(&a, &b).unwrap().to_bits(), dissim(&a, &b).unwrap().to_bits());
}

fn tensor_strategy(dims: Vec<usize>) -> impl Strategy<Value = Tensor> {
    let n: usize = dims.iter().product();
    prop::collection::vec(-10.0f64..10.0, n).prop_map(move |v| Tensor::new(dims.clone(), v).unwrap())
}

proptest! {
    #[test]
    fn dissim_is_a_metric(
        a in tensor_strategy(vec![2, 3, 2]),
        b in tensor_strategy(vec![2, 3, 2]),
        c in tensor_strategy(vec![2, 3, 2]),
    ) {
        let ab = dissim(&a, &b).unwrap();
        prop_assert_eq!(ab, dissim(&b, &a).unwrap());
        prop_assert_eq!(dissim(&a, &a).unwrap(), 0.0);
        prop_assert!(dissim(&a, &c).unwrap() <= ab + dissim(&b, &c).unwrap() + 1e-9);
    }

    #[test]
    fn narrowing_is_idempotent(
        t in tensor_strategy(vec![4, 3, 3]),
        rows in prop::sample::subsequence(vec![0usize, 1, 2, 3], 1..=4),
        cols in prop::sample::subsequence(vec![0usize, 1, 2], 1..=3),
    ) {
        let s = subtensor(&t, &[IndexSet::new(0, rows), IndexSet::new(1, cols), IndexSet::full(2, 3)]).unwrap();
        let full: Vec<IndexSet> = s.dims().iter().enumerate().map(|(m, &d)| IndexSet::full(m, d)).collect();
        prop_assert_eq!(subtensor(&s, &full).unwrap(), s);
    }

    #[test]
    fn replace_is_idempotent_for_fresh_target(v in prop::collection::vec(0usize..6, 0..12), a in 0usize..6) {
        let b = 100;
        let once = replace(&v, a, b);
        prop_assert_eq!(once.len(), v.len());
        prop_assert_eq!(replace(&once, a, b), once.clone());
        prop_assert!(!once.contains(&a));
    }
}
