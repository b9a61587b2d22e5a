//! Tensor block model baseline.
//!
//! Memberships start from an independent k-means per mode on the flattened
//! mode slices, then are refined block-coordinate-wise: each index of a mode
//! moves to the cluster whose slice of the block-mean tensor is nearest to its
//! raw slice. Medoids are chosen afterwards as the member nearest to each
//! cluster's mean slice.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pam::{ClusterSpec, Clustering, Repair};
use crate::report::{block_means, centroid_tensor};
use crate::tensor::{gather_tensor, slices_along, sq_dist, Tensor};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TbmConfig {
    /// Cap on refinement passes over all modes.
    pub max_iters: usize,
    pub seed: u64,
    /// k-means runs per mode; the one with the lowest within-cluster sum of
    /// squares is kept.
    pub kmeans_restarts: usize,
    /// Lloyd iteration cap per k-means run.
    pub lloyd_iters: usize,
}

impl Default for TbmConfig {
    fn default() -> Self {
        Self {
            max_iters: 50,
            seed: 0,
            kmeans_restarts: 10,
            lloyd_iters: 100,
        }
    }
}

impl TbmConfig {
    fn check(&self) -> Result<()> {
        if self.max_iters == 0 || self.kmeans_restarts == 0 || self.lloyd_iters == 0 {
            return Err(Error::InvalidClusterSpec(
                "max_iters, kmeans_restarts and lloyd_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TbmOutcome {
    pub clustering: Clustering,
    /// Refinement passes run.
    pub passes: usize,
    /// True when the last pass changed no membership.
    pub converged: bool,
    /// `||y - centroid||^2` after initialization and after every mode update.
    pub block_sse: Vec<f64>,
}

/// Fits the baseline and returns its clustering; see [`tbm_fit_detailed`].
pub fn tbm_fit(y: &Tensor, c: &ClusterSpec, cfg: &TbmConfig) -> Result<Clustering> {
    Ok(tbm_fit_detailed(y, c, cfg)?.clustering)
}

pub fn tbm_fit_detailed(y: &Tensor, c: &ClusterSpec, cfg: &TbmConfig) -> Result<TbmOutcome> {
    let init = kmeans_memberships(y, c, cfg)?;
    refine(y, c, init, cfg)
}

/// Per-mode k-means (k-means++ seeding, best of `kmeans_restarts`) on the
/// flattened mode slices. A single seeded ChaCha8 stream is consumed mode by
/// mode.
pub fn kmeans_memberships(y: &Tensor, c: &ClusterSpec, cfg: &TbmConfig) -> Result<Vec<Vec<usize>>> {
    c.check(y.dims())?;
    cfg.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok((0..y.order())
        .map(|mode| {
            let points = slices_along(y, mode);
            kmeans(&points, c.counts()[mode], cfg, &mut rng)
        })
        .collect())
}

fn nearest_center(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (h, center) in centers.iter().enumerate() {
        let d = sq_dist(point, center);
        if d < best.1 {
            best = (h, d);
        }
    }
    best
}

fn mean_points(points: &[Vec<f64>], labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut sizes = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
        sizes[l] += 1;
    }
    for (s, &n) in sums.iter_mut().zip(&sizes) {
        if n > 0 {
            s.iter_mut().for_each(|v| *v /= n as f64);
        }
    }
    sums
}

/// Moves, for each empty cluster in turn, the index farthest from its own
/// centre (among clusters with more than one member) into it.
fn repair_empty(labels: &mut [usize], k: usize, dist_to_own: &[f64]) -> Vec<Move> {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    let mut moves = Vec::new();
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut pick = None;
        let mut far = f64::NEG_INFINITY;
        for (i, &l) in labels.iter().enumerate() {
            if sizes[l] > 1 && dist_to_own[i] > far {
                far = dist_to_own[i];
                pick = Some(i);
            }
        }
        let i = pick.expect("k <= n leaves a cluster with two members");
        let from = labels[i];
        sizes[from] -= 1;
        sizes[empty] += 1;
        labels[i] = empty;
        moves.push((i, from, empty));
    }
    moves
}

fn kmeans_pp(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    pick = Some(i);
                    if acc > target {
                        break;
                    }
                }
            }
            pick.expect("positive total weight")
        } else {
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        };
        chosen.push(next);
        for (w, p) in d2.iter_mut().zip(points) {
            *w = w.min(sq_dist(p, &points[next]));
        }
    }
    chosen.iter().map(|&i| points[i].clone()).collect()
}

fn kmeans(points: &[Vec<f64>], k: usize, cfg: &TbmConfig, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = points.len();
    if k == n {
        return (0..n).collect();
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..cfg.kmeans_restarts {
        let mut centers = kmeans_pp(points, k, rng);
        let mut labels: Vec<usize> = points.iter().map(|p| nearest_center(p, &centers).0).collect();
        for _ in 0..cfg.lloyd_iters {
            let dist: Vec<f64> = points
                .iter()
                .zip(&labels)
                .map(|(p, &l)| sq_dist(p, &centers[l]))
                .collect();
            repair_empty(&mut labels, k, &dist);
            centers = mean_points(points, &labels, k);
            let next: Vec<usize> = points.iter().map(|p| nearest_center(p, &centers).0).collect();
            if next == labels {
                break;
            }
            labels = next;
        }
        let dist: Vec<f64> = points
            .iter()
            .zip(&labels)
            .map(|(p, &l)| sq_dist(p, &centers[l]))
            .collect();
        if !repair_empty(&mut labels, k, &dist).is_empty() {
            centers = mean_points(points, &labels, k);
        }
        let wcss: f64 = points
            .iter()
            .zip(&labels)
            .map(|(p, &l)| sq_dist(p, &centers[l]))
            .sum();
        if best.as_ref().map_or(true, |(b, _)| wcss < *b) {
            best = Some((wcss, labels));
        }
    }
    best.expect("at least one restart").1
}

/// A label change made by empty-cluster repair: `(index, from, to)`.
pub type Move = (usize, usize, usize);

/// One block-coordinate update of `mode`: every index moves to the cluster
/// whose block-mean slice is nearest (ties to the smaller label), then empty
/// clusters are repaired. Returns the new labels and the repairs made as
/// `(index, from, to)`.
pub fn reassign_mode(
    y: &Tensor,
    memberships: &[Vec<usize>],
    counts: &[usize],
    mode: usize,
) -> Result<(Vec<usize>, Vec<Move>)> {
    let means = block_means(y, memberships, counts)?;
    let all: Vec<usize> = (0..counts[mode]).collect();
    let lists: Vec<&[usize]> = memberships
        .iter()
        .enumerate()
        .map(|(m, memb)| if m == mode { all.as_slice() } else { memb.as_slice() })
        .collect();
    let smoothed = slices_along(&gather_tensor(&means, &lists), mode);
    let raw = slices_along(y, mode);
    let mut labels = Vec::with_capacity(raw.len());
    let mut dist = Vec::with_capacity(raw.len());
    for slice in &raw {
        let (h, d) = nearest_center(slice, &smoothed);
        labels.push(h);
        dist.push(d);
    }
    let repairs = repair_empty(&mut labels, counts[mode], &dist);
    Ok((labels, repairs))
}

fn block_sse(y: &Tensor, memberships: &[Vec<usize>]) -> Result<f64> {
    let centroid = centroid_tensor(y, memberships)?;
    Ok(sq_dist(y.values(), centroid.values()))
}

/// Block-coordinate refinement from the given memberships, followed by
/// medoid extraction with [`nearest_to_centroid`]. Modes with one cluster
/// per index are left untouched.
pub fn refine(
    y: &Tensor,
    c: &ClusterSpec,
    mut memberships: Vec<Vec<usize>>,
    cfg: &TbmConfig,
) -> Result<TbmOutcome> {
    c.check(y.dims())?;
    cfg.check()?;
    let counts = c.counts();
    for (m, memb) in memberships.iter().enumerate() {
        if memb.len() != y.dims()[m] || memb.iter().any(|&l| l >= counts[m]) {
            return Err(Error::InvalidClustering(alloc::format!(
                "initial memberships of mode {m} do not fit the cluster spec"
            )));
        }
    }
    let mut repairs = Vec::new();
    let mut history = vec![block_sse(y, &memberships)?];
    let mut passes = 0;
    let mut converged = false;
    while passes < cfg.max_iters {
        let mut changed = false;
        for mode in 0..y.order() {
            if counts[mode] == y.dims()[mode] {
                continue;
            }
            let (labels, moved) = reassign_mode(y, &memberships, counts, mode)?;
            repairs.extend(moved.into_iter().map(|(index, from, to)| Repair {
                pass: passes,
                mode,
                index,
                from,
                to,
            }));
            if labels != memberships[mode] {
                changed = true;
                memberships[mode] = labels;
            }
            history.push(block_sse(y, &memberships)?);
        }
        passes += 1;
        if !changed {
            converged = true;
            break;
        }
    }
    let medoids = nearest_to_centroid(y, &memberships)?;
    let mut clustering = Clustering::from_parts(y, medoids, memberships)?;
    clustering.repairs = repairs;
    Ok(TbmOutcome {
        clustering,
        passes,
        converged,
        block_sse: history,
    })
}

/// Per mode and cluster, the member whose raw slice is nearest to the
/// cluster's mean slice; ties go to the smallest index.
pub fn nearest_to_centroid(y: &Tensor, memberships: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    if memberships.len() != y.order() {
        return Err(Error::LengthMismatch {
            left: memberships.len(),
            right: y.order(),
        });
    }
    memberships
        .iter()
        .enumerate()
        .map(|(mode, labels)| {
            if labels.len() != y.dims()[mode] {
                return Err(Error::ShapeMismatch {
                    expected: y.dims().to_vec(),
                    found: memberships.iter().map(Vec::len).collect(),
                });
            }
            let k = labels.iter().max().map_or(0, |&l| l + 1);
            let points = slices_along(y, mode);
            let centers = mean_points(&points, labels, k);
            let mut best = vec![(usize::MAX, f64::INFINITY); k];
            for (i, (p, &l)) in points.iter().zip(labels).enumerate() {
                let d = sq_dist(p, &centers[l]);
                if best[l].0 == usize::MAX || d < best[l].1 {
                    best[l] = (i, d);
                }
            }
            best.iter()
                .enumerate()
                .map(|(cluster, &(i, _))| {
                    if i == usize::MAX {
                        Err(Error::EmptyCluster { mode, cluster })
                    } else {
                        Ok(i)
                    }
                })
                .collect()
        })
        .collect()
}
