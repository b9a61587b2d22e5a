//! Multiway partitioning around medoids.
//!
//! Every mode k of the data tensor gets `c_k` medoids (indices of that mode)
//! and a membership vector mapping each index to one of them. The medoid
//! tensor copies, for each entry, the data value at the medoid coordinates of
//! the entry's block; the objective `D` is the Frobenius distance between the
//! data and the medoid tensor.
//!
//! [`build`] picks medoids greedily per mode on raw slice distances, then
//! [`swap`] runs the medoid/non-medoid exchange search until a full pass over
//! the modes brings no strict improvement.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::tensor::{
    dissim, gather, gather_tensor, gathered_sq_error, mode_slice, replace, slices_along,
    split_at_mode, sq_dist, Tensor,
};
use crate::{Error, Result};

/// Number of clusters per mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSpec {
    counts: Vec<usize>,
}

impl ClusterSpec {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidClusterSpec("no cluster counts given".into()));
        }
        if let Some(m) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidClusterSpec(format!("mode {m} asks for 0 clusters")));
        }
        Ok(Self { counts })
    }

    /// One cluster per index in every mode.
    pub fn identity(dims: &[usize]) -> Result<Self> {
        Self::new(dims.to_vec())
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Checks `1 <= c_k <= d_k` for every mode of a tensor with `dims`.
    pub fn check(&self, dims: &[usize]) -> Result<()> {
        if self.counts.len() != dims.len() {
            return Err(Error::InvalidClusterSpec(format!(
                "{} cluster counts for a tensor of order {}",
                self.counts.len(),
                dims.len()
            )));
        }
        for (m, (&c, &d)) in self.counts.iter().zip(dims).enumerate() {
            if c > d {
                return Err(Error::InvalidClusterSpec(format!(
                    "mode {m} asks for {c} clusters but has only {d} indices"
                )));
            }
        }
        Ok(())
    }
}

/// One accepted swap: in `mode`, medoid `swapped_out` was replaced by
/// `swapped_in`, bringing the objective to `objective`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapStep {
    pub pass: usize,
    pub mode: usize,
    pub swapped_out: usize,
    pub swapped_in: usize,
    pub objective: f64,
}

/// An empty-cluster repair: `index` moved from cluster `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Repair {
    pub pass: usize,
    pub mode: usize,
    pub index: usize,
    pub from: usize,
    pub to: usize,
}

/// Medoids and memberships for every mode, with the objective they reach.
///
/// `medoids[k][j]` is the medoid index of cluster `j` in mode `k`;
/// `memberships[k][i]` is the cluster of index `i` in mode `k`. A valid
/// clustering has `memberships[k][medoids[k][j]] == j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub medoids: Vec<Vec<usize>>,
    pub memberships: Vec<Vec<usize>>,
    pub objective: f64,
    pub trace: Vec<SwapStep>,
    pub repairs: Vec<Repair>,
}

impl Clustering {
    /// Validates the parts against `y` and computes the objective.
    pub fn from_parts(
        y: &Tensor,
        medoids: Vec<Vec<usize>>,
        memberships: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut cl = Self {
            medoids,
            memberships,
            objective: 0.0,
            trace: Vec::new(),
            repairs: Vec::new(),
        };
        cl.check(y.dims())?;
        cl.objective = objective(y, &cl);
        Ok(cl)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.medoids.iter().map(Vec::len).collect()
    }

    /// Checks shape consistency with `dims` plus the medoid invariants:
    /// distinct in-range medoids, in-range labels, and every medoid labelled
    /// with its own cluster.
    pub fn check(&self, dims: &[usize]) -> Result<()> {
        self.check_shape(dims)?;
        for (m, (meds, memb)) in self.medoids.iter().zip(&self.memberships).enumerate() {
            check_medoids(m, meds, dims[m])?;
            if let Some(i) = memb.iter().position(|&l| l >= meds.len()) {
                return Err(Error::InvalidClustering(format!(
                    "mode {m}: index {i} has label {} but there are {} clusters",
                    memb[i],
                    meds.len()
                )));
            }
            for (j, &r) in meds.iter().enumerate() {
                if memb[r] != j {
                    return Err(Error::InvalidClustering(format!(
                        "mode {m}: medoid {r} of cluster {j} is labelled {}",
                        memb[r]
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_shape(&self, dims: &[usize]) -> Result<()> {
        let memb_dims: Vec<usize> = self.memberships.iter().map(Vec::len).collect();
        if memb_dims != dims || self.medoids.len() != dims.len() {
            return Err(Error::ShapeMismatch {
                expected: dims.to_vec(),
                found: memb_dims,
            });
        }
        Ok(())
    }

    /// `r[m[i]]` for every index `i` of `mode`: the coordinate each index is
    /// replaced by in the medoid tensor.
    pub fn medoid_map(&self, mode: usize) -> Vec<usize> {
        let r = &self.medoids[mode];
        self.memberships[mode].iter().map(|&l| r[l]).collect()
    }

    fn medoid_maps(&self) -> Vec<Vec<usize>> {
        (0..self.medoids.len()).map(|m| self.medoid_map(m)).collect()
    }
}

fn check_medoids(mode: usize, medoids: &[usize], dim: usize) -> Result<()> {
    let invalid = |reason| Err(Error::InvalidMedoids { mode, reason });
    if medoids.is_empty() {
        return invalid("no medoids".into());
    }
    let mut seen = vec![false; dim];
    for &r in medoids {
        if r >= dim {
            return invalid(format!("medoid {r} out of range for size {dim}"));
        }
        if seen[r] {
            return invalid(format!("duplicate medoid {r}"));
        }
        seen[r] = true;
    }
    Ok(())
}

/// The medoid tensor: entry `(i_1..i_K)` is `y[r1[m1[i_1]], ..., rK[mK[i_K]]]`.
pub fn medoid_tensor(y: &Tensor, cl: &Clustering) -> Result<Tensor> {
    cl.check_shape(y.dims())?;
    check_labels(y.dims(), cl)?;
    let maps = cl.medoid_maps();
    let lists: Vec<&[usize]> = maps.iter().map(Vec::as_slice).collect();
    Ok(gather_tensor(y, &lists))
}

fn check_labels(dims: &[usize], cl: &Clustering) -> Result<()> {
    for (m, (meds, memb)) in cl.medoids.iter().zip(&cl.memberships).enumerate() {
        if memb.iter().any(|&l| l >= meds.len()) || meds.iter().any(|&r| r >= dims[m]) {
            return Err(Error::InvalidClustering(format!("mode {m}: label or medoid out of range")));
        }
    }
    Ok(())
}

/// `dissim(y, medoid_tensor(y, cl))` without materializing the medoid tensor.
/// `cl` must already be consistent with `y`.
pub(crate) fn objective(y: &Tensor, cl: &Clustering) -> f64 {
    let maps = cl.medoid_maps();
    let lists: Vec<&[usize]> = maps.iter().map(Vec::as_slice).collect();
    libm::sqrt(gathered_sq_error(y, &lists))
}

/// Greedy initialization, independently per mode.
///
/// The first medoid minimizes the summed distance to all slices of its mode;
/// each further medoid is the non-medoid that minimizes the summed distance of
/// every slice to its nearest medoid once added. Each index then joins the
/// medoid with the nearest raw slice (medoids always join their own cluster).
/// Ties go to the smallest index.
pub fn build(y: &Tensor, c: &ClusterSpec) -> Result<Clustering> {
    c.check(y.dims())?;
    let mut medoids = Vec::with_capacity(y.order());
    let mut memberships = Vec::with_capacity(y.order());
    for (mode, &count) in c.counts().iter().enumerate() {
        let d = y.dims()[mode];
        let dist = raw_slice_distances(y, mode);
        let meds = greedy_medoids(&dist, d, count);
        memberships.push(nearest_medoid(&dist, d, &meds));
        medoids.push(meds);
    }
    Clustering::from_parts(y, medoids, memberships)
}

/// Pairwise distances between the raw mode slices, `d x d` row-major.
pub(crate) fn raw_slice_distances(y: &Tensor, mode: usize) -> Vec<f64> {
    let slices = slices_along(y, mode);
    let d = slices.len();
    let mut dist = vec![0.0; d * d];
    for i in 0..d {
        for j in i + 1..d {
            let v = libm::sqrt(sq_dist(&slices[i], &slices[j]));
            dist[i * d + j] = v;
            dist[j * d + i] = v;
        }
    }
    dist
}

fn greedy_medoids(dist: &[f64], d: usize, count: usize) -> Vec<usize> {
    let mut first = 0;
    let mut best = f64::INFINITY;
    for i in 0..d {
        let total: f64 = dist[i * d..(i + 1) * d].iter().sum();
        if total < best {
            best = total;
            first = i;
        }
    }
    let mut medoids = vec![first];
    let mut is_medoid = vec![false; d];
    is_medoid[first] = true;
    // distance of every slice to its nearest chosen medoid
    let mut nearest: Vec<f64> = (0..d).map(|l| dist[l * d + first]).collect();
    while medoids.len() < count {
        let mut pick = usize::MAX;
        let mut best = f64::INFINITY;
        for j in (0..d).filter(|&j| !is_medoid[j]) {
            let mut total = 0.0;
            for l in 0..d {
                total += nearest[l].min(dist[l * d + j]);
            }
            if total < best || pick == usize::MAX {
                best = total;
                pick = j;
            }
        }
        medoids.push(pick);
        is_medoid[pick] = true;
        for l in 0..d {
            nearest[l] = nearest[l].min(dist[l * d + pick]);
        }
    }
    medoids
}

fn nearest_medoid(dist: &[f64], d: usize, medoids: &[usize]) -> Vec<usize> {
    (0..d)
        .map(|i| {
            if let Some(j) = medoids.iter().position(|&r| r == i) {
                return j;
            }
            argmin(medoids.iter().map(|&r| dist[i * d + r]))
        })
        .collect()
}

/// Index of the smallest value; the first one on ties.
fn argmin<I: Iterator<Item = f64>>(values: I) -> usize {
    let mut best = 0;
    let mut best_v = f64::INFINITY;
    for (h, v) in values.enumerate() {
        if v < best_v {
            best_v = v;
            best = h;
        }
    }
    best
}

/// The medoid-smoothed slice of `mode` at `index`: the slice of `y` at
/// `index` whose other-mode coordinates are replaced by their medoids under
/// `state`.
pub fn smoothed_slice(y: &Tensor, mode: usize, index: usize, state: &Clustering) -> Result<Tensor> {
    state.check_shape(y.dims())?;
    check_labels(y.dims(), state)?;
    if mode >= y.order() || index >= y.dims()[mode] {
        return Err(Error::InvalidIndexSet {
            mode,
            reason: format!("index {index} out of range"),
        });
    }
    let maps = state.medoid_maps();
    let single = [index];
    let lists: Vec<&[usize]> = maps
        .iter()
        .enumerate()
        .map(|(m, map)| if m == mode { &single[..] } else { map.as_slice() })
        .collect();
    Ok(gather_tensor(y, &lists))
}

/// Memberships of `mode` for the candidate medoid vector.
///
/// A candidate medoid takes its own position as label. Every other index
/// joins the candidate whose medoid-smoothed slice (other modes taken from
/// `state`) is nearest to the index's raw slice; ties go to the smaller label.
///
/// This is the straightforward per-slice computation, kept as the reference
/// for the cached path used inside [`swap`].
pub fn assign_membership(
    y: &Tensor,
    mode: usize,
    candidate_medoids: &[usize],
    state: &Clustering,
) -> Result<Vec<usize>> {
    state.check_shape(y.dims())?;
    if mode >= y.order() {
        return Err(Error::InvalidMedoids {
            mode,
            reason: format!("tensor has only {} modes", y.order()),
        });
    }
    check_medoids(mode, candidate_medoids, y.dims()[mode])?;
    let smoothed = candidate_medoids
        .iter()
        .map(|&r| smoothed_slice(y, mode, r, state))
        .collect::<Result<Vec<_>>>()?;
    (0..y.dims()[mode])
        .map(|l| {
            if let Some(pos) = candidate_medoids.iter().position(|&r| r == l) {
                return Ok(pos);
            }
            let raw = mode_slice(y, mode, l)?;
            let dists = smoothed
                .iter()
                .map(|s| dissim(&raw, s))
                .collect::<Result<Vec<_>>>()?;
            Ok(argmin(dists.into_iter()))
        })
        .collect()
}

/// A scored medoid exchange in one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapCandidate {
    pub mode: usize,
    pub swapped_out: usize,
    pub swapped_in: usize,
    pub objective: f64,
    pub medoids: Vec<usize>,
    pub memberships: Vec<usize>,
}

/// Scores replacing medoid `out` by non-medoid `inn` in `mode`, using the
/// reference path: [`replace`], [`assign_membership`], then
/// `dissim(y, medoid_tensor(..))`. Other modes are left as in `state`.
pub fn score_swap(
    y: &Tensor,
    state: &Clustering,
    mode: usize,
    out: usize,
    inn: usize,
) -> Result<SwapCandidate> {
    state.check(y.dims())?;
    let current = &state.medoids[mode];
    if !current.contains(&out) {
        return Err(Error::InvalidMedoids {
            mode,
            reason: format!("{out} is not a medoid"),
        });
    }
    if current.contains(&inn) || inn >= y.dims()[mode] {
        return Err(Error::InvalidMedoids {
            mode,
            reason: format!("{inn} is not a non-medoid index"),
        });
    }
    let medoids = replace(current, out, inn);
    let memberships = assign_membership(y, mode, &medoids, state)?;
    let mut candidate = state.clone();
    candidate.medoids[mode] = medoids.clone();
    candidate.memberships[mode] = memberships.clone();
    let objective = dissim(y, &medoid_tensor(y, &candidate)?)?;
    Ok(SwapCandidate {
        mode,
        swapped_out: out,
        swapped_in: inn,
        objective,
        medoids,
        memberships,
    })
}

/// Cached state for scoring every exchange of one mode.
///
/// `smoothed` holds, in the layout of `y`, the medoid-smoothed slice of every
/// index of the mode; `dist[l * d + h]` is the distance from raw slice `l` to
/// smoothed slice `h`. Both are accumulated in the same order as the
/// reference path, so memberships and objectives agree with it exactly.
struct ModeScan<'a> {
    y: &'a Tensor,
    outer: usize,
    dim: usize,
    inner: usize,
    smoothed: Vec<f64>,
    dist: Vec<f64>,
}

impl<'a> ModeScan<'a> {
    fn new(y: &'a Tensor, state: &Clustering, mode: usize) -> Self {
        let (outer, dim, inner) = split_at_mode(y.dims(), mode);
        let all: Vec<usize> = (0..dim).collect();
        let maps = state.medoid_maps();
        let lists: Vec<&[usize]> = maps
            .iter()
            .enumerate()
            .map(|(m, map)| if m == mode { all.as_slice() } else { map.as_slice() })
            .collect();
        let smoothed = gather(y, &lists);

        let slice_of = |values: &[f64], l: usize| -> Vec<f64> {
            let mut s = Vec::with_capacity(outer * inner);
            for o in 0..outer {
                let start = (o * dim + l) * inner;
                s.extend_from_slice(&values[start..start + inner]);
            }
            s
        };
        let raw = slices_along(y, mode);
        let smooth: Vec<Vec<f64>> = (0..dim).map(|h| slice_of(&smoothed, h)).collect();
        let mut dist = vec![0.0; dim * dim];
        for l in 0..dim {
            for h in 0..dim {
                dist[l * dim + h] = libm::sqrt(sq_dist(&raw[l], &smooth[h]));
            }
        }
        Self { y, outer, dim, inner, smoothed, dist }
    }

    fn memberships(&self, medoids: &[usize]) -> Vec<usize> {
        let d = self.dim;
        (0..d)
            .map(|l| {
                if let Some(pos) = medoids.iter().position(|&r| r == l) {
                    return pos;
                }
                argmin(medoids.iter().map(|&r| self.dist[l * d + r]))
            })
            .collect()
    }

    /// Objective when this mode uses `medoids`/`memberships`; row-major
    /// accumulation identical to `dissim(y, medoid_tensor(..))`.
    fn objective(&self, medoids: &[usize], memberships: &[usize]) -> f64 {
        let (d, inner) = (self.dim, self.inner);
        let values = self.y.values();
        let mut acc = 0.0;
        for o in 0..self.outer {
            for (i, &label) in memberships.iter().enumerate() {
                let src = (o * d + i) * inner;
                let dst = (o * d + medoids[label]) * inner;
                for (a, b) in values[src..src + inner].iter().zip(&self.smoothed[dst..dst + inner]) {
                    let diff = a - b;
                    acc += diff * diff;
                }
            }
        }
        libm::sqrt(acc)
    }

    fn score(&self, mode: usize, current: &[usize], out: usize, inn: usize) -> SwapCandidate {
        let medoids = replace(current, out, inn);
        let memberships = self.memberships(&medoids);
        let objective = self.objective(&medoids, &memberships);
        SwapCandidate {
            mode,
            swapped_out: out,
            swapped_in: inn,
            objective,
            medoids,
            memberships,
        }
    }

    /// Best exchange, lexicographically smallest `(out, inn)` on ties.
    fn best(&self, mode: usize, current: &[usize]) -> Option<SwapCandidate> {
        let mut outs = current.to_vec();
        outs.sort_unstable();
        let pairs: Vec<(usize, usize)> = outs
            .iter()
            .flat_map(|&i| {
                (0..self.dim)
                    .filter(|j| !current.contains(j))
                    .map(move |j| (i, j))
            })
            .collect();

        #[cfg(feature = "parallel")]
        let scored: Vec<SwapCandidate> = pairs
            .par_iter()
            .map(|&(i, j)| self.score(mode, current, i, j))
            .collect();
        #[cfg(not(feature = "parallel"))]
        let scored: Vec<SwapCandidate> = pairs
            .iter()
            .map(|&(i, j)| self.score(mode, current, i, j))
            .collect();

        scored.into_iter().reduce(|best, c| {
            if c.objective < best.objective {
                c
            } else {
                best
            }
        })
    }
}

/// Swap-based local search from `init`.
///
/// Each pass visits the modes in order. For a mode, every (medoid,
/// non-medoid) exchange is scored with memberships recomputed for that mode
/// only; the best one is adopted if it strictly lowers the objective. The
/// search stops after a pass without any adopted exchange, at which point no
/// single exchange in any mode improves the objective.
pub fn swap(y: &Tensor, c: &ClusterSpec, init: &Clustering) -> Result<Clustering> {
    c.check(y.dims())?;
    init.check(y.dims())?;
    if init.counts() != c.counts() {
        return Err(Error::InvalidClustering(format!(
            "initial clustering has counts {:?}, expected {:?}",
            init.counts(),
            c.counts()
        )));
    }
    let mut cl = init.clone();
    cl.objective = objective(y, &cl);
    let mut pass = 0;
    loop {
        let mut improved = false;
        for mode in 0..y.order() {
            if c.counts()[mode] == y.dims()[mode] {
                continue;
            }
            let scan = ModeScan::new(y, &cl, mode);
            let Some(best) = scan.best(mode, &cl.medoids[mode]) else {
                continue;
            };
            if best.objective < cl.objective {
                cl.objective = best.objective;
                cl.medoids[mode] = best.medoids;
                cl.memberships[mode] = best.memberships;
                cl.trace.push(SwapStep {
                    pass,
                    mode,
                    swapped_out: best.swapped_out,
                    swapped_in: best.swapped_in,
                    objective: best.objective,
                });
                improved = true;
            }
        }
        pass += 1;
        if !improved {
            return Ok(cl);
        }
    }
}

/// [`build`] followed by [`swap`].
pub fn fit(y: &Tensor, c: &ClusterSpec) -> Result<Clustering> {
    let init = build(y, c)?;
    swap(y, c, &init)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_tensor;

    #[test]
    fn cluster_spec_validation() {
        assert!(ClusterSpec::new(vec![]).is_err());
        assert!(ClusterSpec::new(vec![2, 0]).is_err());
        let c = ClusterSpec::new(vec![2, 5]).unwrap();
        assert!(c.check(&[3, 5]).is_ok());
        assert!(matches!(c.check(&[3, 4]), Err(Error::InvalidClusterSpec(_))));
        assert!(c.check(&[3, 5, 2]).is_err());
    }

    #[test]
    fn build_rejects_too_many_clusters() {
        let y = random_tensor(&[3, 3], 1);
        let c = ClusterSpec::new(vec![4, 1]).unwrap();
        assert!(matches!(build(&y, &c), Err(Error::InvalidClusterSpec(_))));
    }

    #[test]
    fn build_identity_clustering() {
        let y = random_tensor(&[3, 4, 2], 2);
        let cl = build(&y, &ClusterSpec::identity(y.dims()).unwrap()).unwrap();
        for (m, &d) in y.dims().iter().enumerate() {
            let mut meds = cl.medoids[m].clone();
            meds.sort_unstable();
            assert_eq!(meds, (0..d).collect::<Vec<_>>());
        }
        assert_eq!(cl.objective, 0.0);
    }

    #[test]
    fn build_identical_slices_ties_to_zero() {
        // every mode-0 slice identical
        let y = Tensor::from_fn(vec![4, 3], |ix| ix[1] as f64).unwrap();
        let cl = build(&y, &ClusterSpec::new(vec![1, 1]).unwrap()).unwrap();
        assert_eq!(cl.medoids[0], vec![0]);
        assert_eq!(cl.memberships[0], vec![0; 4]);
        // duplicated slices still keep medoids in their own clusters
        let cl = build(&y, &ClusterSpec::new(vec![3, 1]).unwrap()).unwrap();
        cl.check(y.dims()).unwrap();
    }

    #[test]
    fn medoid_tensor_examples() {
        let y = random_tensor(&[3, 2, 2], 3);
        let id = build(&y, &ClusterSpec::identity(y.dims()).unwrap()).unwrap();
        assert_eq!(medoid_tensor(&y, &id).unwrap(), y);

        let m = Tensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let cl = Clustering::from_parts(&m, vec![vec![0], vec![0]], vec![vec![0, 0], vec![0, 0]])
            .unwrap();
        assert_eq!(medoid_tensor(&m, &cl).unwrap().values(), &[1.0; 4]);

        let bad = Clustering { memberships: vec![vec![0; 3], vec![0, 0]], ..cl };
        assert!(matches!(medoid_tensor(&m, &bad), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn from_parts_rejects_broken_invariants() {
        let y = random_tensor(&[3, 2], 4);
        // medoid 2 of cluster 1 labelled 0
        let r = Clustering::from_parts(&y, vec![vec![0, 2], vec![0]], vec![vec![0, 0, 0], vec![0, 0]]);
        assert!(matches!(r, Err(Error::InvalidClustering(_))));
        let r = Clustering::from_parts(&y, vec![vec![0, 0], vec![0]], vec![vec![0, 1, 0], vec![0, 0]]);
        assert!(matches!(r, Err(Error::InvalidMedoids { .. })));
        let r = Clustering::from_parts(&y, vec![vec![0], vec![0]], vec![vec![0, 0, 1], vec![0, 0]]);
        assert!(matches!(r, Err(Error::InvalidClustering(_))));
    }

    #[test]
    fn assign_membership_keeps_medoids_in_place() {
        let y = random_tensor(&[5, 3, 3], 5);
        let state = build(&y, &ClusterSpec::new(vec![2, 2, 2]).unwrap()).unwrap();
        let m = assign_membership(&y, 0, &[4, 1], &state).unwrap();
        assert_eq!(m[4], 0);
        assert_eq!(m[1], 1);
        assert!(matches!(
            assign_membership(&y, 0, &[1, 1], &state),
            Err(Error::InvalidMedoids { .. })
        ));
        assert!(assign_membership(&y, 0, &[5], &state).is_err());
    }

    #[test]
    fn assign_membership_identical_medoid_slices() {
        // mode-0 slices 0 and 1 identical, so their smoothed slices are too
        let y = Tensor::from_fn(vec![4, 3], |ix| if ix[0] < 2 { ix[1] as f64 } else { 10.0 + ix[0] as f64 })
            .unwrap();
        let state = Clustering::from_parts(&y, vec![vec![0, 1], vec![0, 1, 2]], vec![vec![0, 1, 0, 0], vec![0, 1, 2]])
            .unwrap();
        let m = assign_membership(&y, 0, &[0, 1], &state).unwrap();
        assert_eq!(m, vec![0, 1, 0, 0]);
    }

    #[test]
    fn cached_scan_matches_reference_bitwise() {
        for seed in 0..4 {
            let y = random_tensor(&[4, 5, 3], 100 + seed);
            let state = build(&y, &ClusterSpec::new(vec![2, 2, 2]).unwrap()).unwrap();
            for mode in 0..3 {
                let scan = ModeScan::new(&y, &state, mode);
                let current = &state.medoids[mode];
                for &out in current {
                    for inn in (0..y.dims()[mode]).filter(|j| !current.contains(j)) {
                        let fast = scan.score(mode, current, out, inn);
                        let reference = score_swap(&y, &state, mode, out, inn).unwrap();
                        assert_eq!(fast.memberships, reference.memberships);
                        assert_eq!(fast.objective.to_bits(), reference.objective.to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn objective_matches_materialized_medoid_tensor() {
        let y = random_tensor(&[4, 3, 5], 9);
        let cl = build(&y, &ClusterSpec::new(vec![2, 2, 3]).unwrap()).unwrap();
        let direct = dissim(&y, &medoid_tensor(&y, &cl).unwrap()).unwrap();
        assert_eq!(cl.objective.to_bits(), direct.to_bits());
    }

    #[test]
    fn swap_from_identity_is_noop() {
        let y = random_tensor(&[3, 3, 2], 6);
        let c = ClusterSpec::identity(y.dims()).unwrap();
        let init = build(&y, &c).unwrap();
        let out = swap(&y, &c, &init).unwrap();
        assert_eq!(out, init);
        assert!(out.trace.is_empty());
    }

    #[test]
    fn swap_rejects_mismatched_init() {
        let y = random_tensor(&[4, 4], 7);
        let init = build(&y, &ClusterSpec::new(vec![2, 2]).unwrap()).unwrap();
        let c = ClusterSpec::new(vec![3, 2]).unwrap();
        assert!(matches!(swap(&y, &c, &init), Err(Error::InvalidClustering(_))));
    }

    #[test]
    fn fit_trace_strictly_decreasing() {
        for seed in 0..5 {
            let y = random_tensor(&[6, 5, 4], 200 + seed);
            let c = ClusterSpec::new(vec![3, 2, 2]).unwrap();
            let init = build(&y, &c).unwrap();
            let cl = fit(&y, &c).unwrap();
            cl.check(y.dims()).unwrap();
            assert!(cl.objective <= init.objective);
            let mut prev = init.objective;
            for step in &cl.trace {
                assert!(step.objective < prev);
                prev = step.objective;
            }
            assert_eq!(prev, cl.objective);
        }
    }

    #[test]
    fn order_one_tensor() {
        let y = Tensor::new(vec![6], vec![0.0, 0.1, 5.0, 5.2, 9.0, 9.1]).unwrap();
        let cl = fit(&y, &ClusterSpec::new(vec![3]).unwrap()).unwrap();
        let m = &cl.memberships[0];
        assert_eq!(m[0], m[1]);
        assert_eq!(m[2], m[3]);
        assert_eq!(m[4], m[5]);
        assert_ne!(m[0], m[2]);
        assert_ne!(m[2], m[4]);
    }
}
