//! Planted-block test data and brute-force oracles.
//!
//! Generated tensors use ChaCha8 seeded with the spec's `seed` and
//! `rand_distr`'s normal sampler over `libm`, so the same spec produces the
//! same bits on every platform.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::pam::{objective, score_swap, ClusterSpec, Clustering, SwapCandidate};
use crate::tensor::{gathered_sq_error, Tensor};
use crate::{Error, Result};

/// How planted labels are laid out along each mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipLayout {
    /// Contiguous runs of (nearly) equal size: index `i` gets `i * c / d`.
    Balanced,
    /// The balanced labels, shuffled.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub dims: Vec<usize>,
    pub clusters: ClusterSpec,
    /// Mean of every block; shape equals the cluster counts.
    pub block_means: Tensor,
    pub noise_sigma: f64,
    pub seed: u64,
    pub layout: MembershipLayout,
}

/// A generated tensor with the labels it was planted with.
#[derive(Debug, Clone, PartialEq)]
pub struct Planted {
    pub tensor: Tensor,
    pub labels: Vec<Vec<usize>>,
}

/// Block means `spacing * rank`, where `rank` is the block's row-major
/// position among all blocks. Any two blocks differ by at least `spacing`,
/// so within each mode the clusters have pairwise distinct means.
pub fn auto_block_means(counts: &[usize], spacing: f64) -> Result<Tensor> {
    let n: usize = counts.iter().product();
    Tensor::new(counts.to_vec(), (0..n).map(|r| r as f64 * spacing).collect())
}

pub fn balanced_labels(dim: usize, clusters: usize) -> Vec<usize> {
    (0..dim).map(|i| i * clusters / dim).collect()
}

pub fn generate(spec: &SyntheticSpec) -> Result<Planted> {
    let invalid = |msg| Err(Error::InvalidSyntheticSpec(msg));
    if let Err(e) = spec.clusters.check(&spec.dims) {
        return invalid(format!("{e}"));
    }
    if spec.block_means.dims() != spec.clusters.counts() {
        return invalid(format!(
            "block means have dims {:?}, cluster counts are {:?}",
            spec.block_means.dims(),
            spec.clusters.counts()
        ));
    }
    if !(spec.noise_sigma.is_finite() && spec.noise_sigma >= 0.0) {
        return invalid(format!("noise sigma {} must be finite and >= 0", spec.noise_sigma));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let labels: Vec<Vec<usize>> = spec
        .dims
        .iter()
        .zip(spec.clusters.counts())
        .map(|(&d, &c)| {
            let mut l = balanced_labels(d, c);
            if spec.layout == MembershipLayout::Random {
                l.shuffle(&mut rng);
            }
            l
        })
        .collect();

    let noise = if spec.noise_sigma > 0.0 {
        Some(Normal::new(0.0, spec.noise_sigma).expect("sigma checked above"))
    } else {
        None
    };
    let mut block = vec![0usize; spec.dims.len()];
    let tensor = Tensor::from_fn(spec.dims.clone(), |ix| {
        for (m, &i) in ix.iter().enumerate() {
            block[m] = labels[m][i];
        }
        let mean = spec.block_means.get(&block).expect("labels below counts");
        match &noise {
            Some(n) => mean + n.sample(&mut rng),
            None => mean,
        }
    })
    .map_err(|e| Error::InvalidSyntheticSpec(format!("{e}")))?;
    Ok(Planted { tensor, labels })
}

/// Default cap on configurations visited by [`exhaustive_global_optimum`].
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalOptimum {
    pub clustering: Clustering,
    pub objective: f64,
    /// Number of (medoids, memberships) configurations visited.
    pub configurations: u128,
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Configurations [`exhaustive_global_optimum`] visits: for every mode, each
/// medoid subset times every labelling of the non-medoid indices. Saturates
/// at `u128::MAX`.
pub fn enumeration_size(dims: &[usize], counts: &[usize]) -> u128 {
    dims.iter().zip(counts).fold(1u128, |acc, (&d, &c)| {
        let free = u32::try_from(d - c).unwrap_or(u32::MAX);
        let labellings = (c as u128).checked_pow(free).unwrap_or(u128::MAX);
        acc.saturating_mul(binomial(d, c)).saturating_mul(labellings)
    })
}

/// Every k-subset of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..k).rev().find(|&p| cur[p] < n - k + p) else {
            return out;
        };
        cur[pos] += 1;
        for p in pos + 1..k {
            cur[p] = cur[p - 1] + 1;
        }
    }
}

/// Every valid (medoids, memberships) pair of one mode: medoids label
/// themselves, the remaining indices take any label.
fn mode_configurations(d: usize, c: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for medoids in combinations(d, c) {
        let free: Vec<usize> = (0..d).filter(|i| !medoids.contains(i)).collect();
        let mut memb = vec![0usize; d];
        for (j, &r) in medoids.iter().enumerate() {
            memb[r] = j;
        }
        loop {
            out.push((medoids.clone(), memb.clone()));
            let mut advanced = false;
            for &i in free.iter().rev() {
                memb[i] += 1;
                if memb[i] < c {
                    advanced = true;
                    break;
                }
                memb[i] = 0;
            }
            if !advanced {
                break;
            }
        }
    }
    out
}

/// Minimum objective over every clustering with the given counts, by brute
/// force over medoid subsets and all memberships that keep each medoid in
/// its own cluster. Ties keep the first configuration in enumeration order.
pub fn exhaustive_global_optimum(y: &Tensor, c: &ClusterSpec, budget: u128) -> Result<GlobalOptimum> {
    c.check(y.dims())?;
    let required = enumeration_size(y.dims(), c.counts());
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let per_mode: Vec<Vec<(Vec<usize>, Vec<usize>)>> = y
        .dims()
        .iter()
        .zip(c.counts())
        .map(|(&d, &k)| mode_configurations(d, k))
        .collect();
    let maps: Vec<Vec<Vec<usize>>> = per_mode
        .iter()
        .map(|configs| {
            configs
                .iter()
                .map(|(r, m)| m.iter().map(|&l| r[l]).collect())
                .collect()
        })
        .collect();

    let k = y.order();
    let mut pos = vec![0usize; k];
    let mut best_pos = pos.clone();
    let mut best = f64::INFINITY;
    let mut visited: u128 = 0;
    loop {
        let lists: Vec<&[usize]> = (0..k).map(|m| maps[m][pos[m]].as_slice()).collect();
        let sq = gathered_sq_error(y, &lists);
        visited += 1;
        if sq < best {
            best = sq;
            best_pos.clone_from(&pos);
        }
        let mut m = k;
        loop {
            if m == 0 {
                let (medoids, memberships) = (0..k)
                    .map(|m| per_mode[m][best_pos[m]].clone())
                    .unzip();
                let clustering = Clustering::from_parts(y, medoids, memberships)?;
                return Ok(GlobalOptimum {
                    objective: clustering.objective,
                    clustering,
                    configurations: visited,
                });
            }
            m -= 1;
            pos[m] += 1;
            if pos[m] < per_mode[m].len() {
                break;
            }
            pos[m] = 0;
        }
    }
}

/// Result of scanning every single medoid exchange of a clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCheck {
    pub is_local_optimum: bool,
    /// Objective of the checked clustering, recomputed from the data.
    pub objective: f64,
    pub candidates: usize,
    /// Exchanges that strictly lower the objective.
    pub violations: usize,
    /// The most improving exchange, if any (first in scan order on ties).
    pub best_violation: Option<SwapCandidate>,
}

/// Scores every (mode, medoid, non-medoid) exchange of `cl` with the
/// reference scoring path ([`score_swap`]) and reports whether any of them
/// strictly lowers the objective.
pub fn verify_local_optimum(y: &Tensor, c: &ClusterSpec, cl: &Clustering) -> Result<LocalCheck> {
    c.check(y.dims())?;
    cl.check(y.dims())?;
    if cl.counts() != c.counts() {
        return Err(Error::InvalidClustering(format!(
            "clustering has counts {:?}, expected {:?}",
            cl.counts(),
            c.counts()
        )));
    }
    let current = objective(y, cl);
    let mut pairs = Vec::new();
    for (mode, meds) in cl.medoids.iter().enumerate() {
        let mut outs = meds.clone();
        outs.sort_unstable();
        for &out in &outs {
            for inn in (0..y.dims()[mode]).filter(|j| !meds.contains(j)) {
                pairs.push((mode, out, inn));
            }
        }
    }

    #[cfg(feature = "parallel")]
    let iter = pairs.par_iter();
    #[cfg(not(feature = "parallel"))]
    let iter = pairs.iter();
    let scored = iter
        .map(|&(mode, out, inn)| score_swap(y, cl, mode, out, inn))
        .collect::<Result<Vec<_>>>()?;

    let mut violations = 0;
    let mut best_violation: Option<SwapCandidate> = None;
    for cand in scored {
        if cand.objective < current {
            violations += 1;
            if best_violation.as_ref().map_or(true, |b| cand.objective < b.objective) {
                best_violation = Some(cand);
            }
        }
    }
    Ok(LocalCheck {
        is_local_optimum: violations == 0,
        objective: current,
        candidates: pairs.len(),
        violations,
        best_violation,
    })
}
