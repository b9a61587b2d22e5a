#![allow(dead_code)]

use mwpam_core::Tensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_tensor(dims: &[usize], seed: u64) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dims.iter().product();
    Tensor::new(dims.to_vec(), (0..n).map(|_| rng.random::<f64>()).collect()).unwrap()
}

/// Every multi-index of `dims` in row-major order.
pub fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..d).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

/// Random valid medoids/memberships for the given counts.
pub fn random_clustering(dims: &[usize], counts: &[usize], seed: u64) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut medoids = Vec::new();
    let mut memberships = Vec::new();
    for (&d, &c) in dims.iter().zip(counts) {
        let mut idx: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            idx.swap(i, rng.random_range(0..=i));
        }
        let meds: Vec<usize> = idx[..c].to_vec();
        let memb: Vec<usize> = (0..d)
            .map(|i| meds.iter().position(|&r| r == i).unwrap_or_else(|| rng.random_range(0..c)))
            .collect();
        medoids.push(meds);
        memberships.push(memb);
    }
    (medoids, memberships)
}

/// Medoid-tensor objective by per-entry lookup.
pub fn oracle_objective(y: &Tensor, medoids: &[Vec<usize>], memberships: &[Vec<usize>]) -> f64 {
    let mut acc = 0.0;
    for ix in all_indices(y.dims()) {
        let src: Vec<usize> = ix
            .iter()
            .enumerate()
            .map(|(m, &i)| medoids[m][memberships[m][i]])
            .collect();
        let d = y.get(&ix).unwrap() - y.get(&src).unwrap();
        acc += d * d;
    }
    acc.sqrt()
}

/// Memberships of `mode` for candidate medoids, by explicit per-index
/// distance comparison against medoid-smoothed slices.
pub fn oracle_membership(
    y: &Tensor,
    mode: usize,
    cand: &[usize],
    medoids: &[Vec<usize>],
    memberships: &[Vec<usize>],
) -> Vec<usize> {
    let dims = y.dims();
    let mut other = dims.to_vec();
    other[mode] = 1;
    let coords = all_indices(&other);
    (0..dims[mode])
        .map(|l| {
            if let Some(p) = cand.iter().position(|&r| r == l) {
                return p;
            }
            let mut best = (0, f64::INFINITY);
            for (h, &r) in cand.iter().enumerate() {
                let mut acc = 0.0;
                for c in &coords {
                    let mut raw = c.clone();
                    raw[mode] = l;
                    let mut smooth: Vec<usize> = c
                        .iter()
                        .enumerate()
                        .map(|(m, &i)| if m == mode { 0 } else { medoids[m][memberships[m][i]] })
                        .collect();
                    smooth[mode] = r;
                    let d = y.get(&raw).unwrap() - y.get(&smooth).unwrap();
                    acc += d * d;
                }
                if acc < best.1 {
                    best = (h, acc);
                }
            }
            best.0
        })
        .collect()
}

/// Best single exchange by independent computation: (objective, mode, out, in).
pub fn oracle_best_swap(
    y: &Tensor,
    medoids: &[Vec<usize>],
    memberships: &[Vec<usize>],
) -> Option<(f64, usize, usize, usize)> {
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for mode in 0..y.order() {
        for &out in &medoids[mode] {
            for inn in (0..y.dims()[mode]).filter(|j| !medoids[mode].contains(j)) {
                let cand: Vec<usize> = medoids[mode].iter().map(|&r| if r == out { inn } else { r }).collect();
                let memb = oracle_membership(y, mode, &cand, medoids, memberships);
                let mut meds2 = medoids.to_vec();
                let mut memb2 = memberships.to_vec();
                meds2[mode] = cand;
                memb2[mode] = memb;
                let d = oracle_objective(y, &meds2, &memb2);
                if best.map_or(true, |b| d < b.0) {
                    best = Some((d, mode, out, inn));
                }
            }
        }
    }
    best
}
