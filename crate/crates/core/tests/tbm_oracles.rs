mod common;

use common::{all_indices, random_clustering, random_tensor};
use mwpam_core::pam::ClusterSpec;
use mwpam_core::synth::{auto_block_means, generate, MembershipLayout, SyntheticSpec};
use mwpam_core::tbm::{nearest_to_centroid, reassign_mode, refine, tbm_fit_detailed, TbmConfig};
use mwpam_core::{centroid_tensor, Tensor};

/// Block means by explicit accumulation, indexed by block label vector.
fn oracle_block_mean(y: &Tensor, memb: &[Vec<usize>], block: &[usize]) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for ix in all_indices(y.dims()) {
        if ix.iter().enumerate().all(|(m, &i)| memb[m][i] == block[m]) {
            s += y.get(&ix).unwrap();
            n += 1;
        }
    }
    if n == 0 { 0.0 } else { s / n as f64 }
}

fn oracle_reassign(y: &Tensor, memb: &[Vec<usize>], counts: &[usize], mode: usize) -> Vec<usize> {
    let mut other = y.dims().to_vec();
    other[mode] = 1;
    let coords = all_indices(&other);
    (0..y.dims()[mode])
        .map(|l| {
            let mut best = (0, f64::INFINITY);
            for h in 0..counts[mode] {
                let mut acc = 0.0;
                for c in &coords {
                    let mut raw = c.clone();
                    raw[mode] = l;
                    let block: Vec<usize> = c
                        .iter()
                        .enumerate()
                        .map(|(m, &i)| if m == mode { h } else { memb[m][i] })
                        .collect();
                    acc += (y.get(&raw).unwrap() - oracle_block_mean(y, memb, &block)).powi(2);
                }
                if acc < best.1 {
                    best = (h, acc);
                }
            }
            best.0
        })
        .collect()
}

fn sse(y: &Tensor, memb: &[Vec<usize>]) -> f64 {
    let c = centroid_tensor(y, memb).unwrap();
    y.values().iter().zip(c.values()).map(|(a, b)| (a - b).powi(2)).sum()
}

#[test]
fn reassignment_matches_oracle_and_never_increases_sse() {
    for seed in 0..5 {
        let y = random_tensor(&[4, 4, 4], 800 + seed);
        let counts = [2, 2, 2];
        let (_, memb) = random_clustering(y.dims(), &counts, seed);
        for mode in 0..3 {
            let (labels, repairs) = reassign_mode(&y, &memb, &counts, mode).unwrap();
            let oracle = oracle_reassign(&y, &memb, &counts, mode);
            if repairs.is_empty() {
                assert_eq!(labels, oracle, "seed {seed} mode {mode}");
                let mut next = memb.clone();
                next[mode] = labels;
                assert!(sse(&y, &next) <= sse(&y, &memb) + 1e-12);
            }
        }
    }
}

#[test]
fn refinement_history_is_monotone_without_repairs() {
    for seed in 0..8 {
        let y = random_tensor(&[6, 5, 4], 900 + seed);
        let c = ClusterSpec::new(vec![3, 2, 2]).unwrap();
        let out = tbm_fit_detailed(&y, &c, &TbmConfig { seed, ..TbmConfig::default() }).unwrap();
        out.clustering.check(y.dims()).unwrap();
        if out.clustering.repairs.is_empty() {
            for w in out.block_sse.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "seed {seed}: {:?}", out.block_sse);
            }
        }
    }
}

#[test]
fn planted_labels_are_a_fixed_point() {
    let spec = SyntheticSpec {
        dims: vec![6, 6, 6],
        clusters: ClusterSpec::new(vec![2, 3, 2]).unwrap(),
        block_means: auto_block_means(&[2, 3, 2], 1.0).unwrap(),
        noise_sigma: 0.0,
        seed: 5,
        layout: MembershipLayout::Random,
    };
    let p = generate(&spec).unwrap();
    let out = refine(&p.tensor, &spec.clusters, p.labels.clone(), &TbmConfig::default()).unwrap();
    assert_eq!(out.clustering.memberships, p.labels);
    assert_eq!(out.passes, 1);
    assert!(out.converged);
    assert_eq!(out.clustering.objective, 0.0);
}

#[test]
fn nearest_to_centroid_matches_brute_force() {
    for seed in 0..5 {
        let y = random_tensor(&[5, 4, 3], 1000 + seed);
        let (_, memb) = random_clustering(y.dims(), &[2, 2, 2], 7 + seed);
        let meds = nearest_to_centroid(&y, &memb).unwrap();
        for mode in 0..3 {
            let mut other = y.dims().to_vec();
            other[mode] = 1;
            let coords = all_indices(&other);
            for (cluster, &got) in meds[mode].iter().enumerate() {
                let members: Vec<usize> = (0..y.dims()[mode]).filter(|&i| memb[mode][i] == cluster).collect();
                let value = |i: usize, c: &Vec<usize>| {
                    let mut ix = c.clone();
                    ix[mode] = i;
                    y.get(&ix).unwrap()
                };
                let dist = |i: usize| -> f64 {
                    coords
                        .iter()
                        .map(|c| {
                            let mean = members.iter().map(|&j| value(j, c)).sum::<f64>() / members.len() as f64;
                            (value(i, c) - mean).powi(2)
                        })
                        .sum()
                };
                let best = members
                    .iter()
                    .copied()
                    .min_by(|&a, &b| dist(a).partial_cmp(&dist(b)).unwrap())
                    .unwrap();
                assert_eq!(got, best);
            }
        }
    }
}
