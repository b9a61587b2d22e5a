//! Reconstruction metrics and block summaries.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::pam::{medoid_tensor, Clustering};
use crate::tensor::{dissim, gather_tensor, Tensor};
use crate::{Error, Result};

/// One block (a cluster from every mode) of a fitted clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSummary {
    /// Internal cluster label per mode.
    pub block_labels: Vec<usize>,
    /// Mean of the data over the block.
    pub centroid_score: f64,
    /// Data value at the block's medoid coordinates.
    pub medoid_score: f64,
    /// Cluster size per mode.
    pub member_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rmse_m: f64,
    pub rmse_c: f64,
    pub objective: f64,
    /// Every block, sorted by ascending centroid score.
    pub blocks: Vec<BlockSummary>,
    /// Per mode, the internal labels sorted by ascending cluster mean.
    pub cluster_order: Vec<Vec<usize>>,
}

fn check_memberships(dims: &[usize], memberships: &[Vec<usize>]) -> Result<()> {
    let found: Vec<usize> = memberships.iter().map(Vec::len).collect();
    if found != dims {
        return Err(Error::ShapeMismatch {
            expected: dims.to_vec(),
            found,
        });
    }
    Ok(())
}

fn label_counts(memberships: &[Vec<usize>]) -> Vec<usize> {
    memberships
        .iter()
        .map(|m| m.iter().max().map_or(0, |&l| l + 1))
        .collect()
}

/// Visits every entry of `y` with its row-major multi-index.
fn for_each_entry<F: FnMut(&[usize], f64)>(y: &Tensor, mut f: F) {
    let dims = y.dims();
    let mut index = vec![0usize; dims.len()];
    for &v in y.values() {
        f(&index, v);
        for m in (0..dims.len()).rev() {
            index[m] += 1;
            if index[m] < dims[m] {
                break;
            }
            index[m] = 0;
        }
    }
}

/// Block-wise means as a tensor of shape `counts`. Blocks without entries
/// hold 0.
pub fn block_means(y: &Tensor, memberships: &[Vec<usize>], counts: &[usize]) -> Result<Tensor> {
    check_memberships(y.dims(), memberships)?;
    if counts.len() != y.order() {
        return Err(Error::LengthMismatch {
            left: counts.len(),
            right: y.order(),
        });
    }
    for (m, (memb, &c)) in memberships.iter().zip(counts).enumerate() {
        if let Some(&l) = memb.iter().find(|&&l| l >= c) {
            return Err(Error::InvalidClustering(format!(
                "mode {m}: label {l} but only {c} clusters"
            )));
        }
    }
    let n_blocks: usize = counts.iter().product();
    let mut sums = vec![0.0; n_blocks];
    let mut sizes = vec![0usize; n_blocks];
    for_each_entry(y, |index, v| {
        let mut b = 0;
        for (m, &i) in index.iter().enumerate() {
            b = b * counts[m] + memberships[m][i];
        }
        sums[b] += v;
        sizes[b] += 1;
    });
    let means = sums
        .iter()
        .zip(&sizes)
        .map(|(&s, &n)| if n == 0 { 0.0 } else { s / n as f64 })
        .collect();
    Tensor::new(counts.to_vec(), means)
}

/// The centroid tensor: every entry replaced by the mean of its block.
pub fn centroid_tensor(y: &Tensor, memberships: &[Vec<usize>]) -> Result<Tensor> {
    let counts = label_counts(memberships);
    let means = block_means(y, memberships, &counts)?;
    let lists: Vec<&[usize]> = memberships.iter().map(Vec::as_slice).collect();
    Ok(gather_tensor(&means, &lists))
}

/// Root mean squared difference, `dissim(y, yhat) / sqrt(len)`.
pub fn rmse(y: &Tensor, yhat: &Tensor) -> Result<f64> {
    Ok(dissim(y, yhat)? / libm::sqrt(y.len() as f64))
}

/// Mean of `y` over all entries whose `mode` label is each cluster (other
/// modes unrestricted).
pub fn cluster_means(y: &Tensor, memberships: &[Vec<usize>], mode: usize) -> Result<Vec<f64>> {
    check_memberships(y.dims(), memberships)?;
    let count = label_counts(memberships)[mode];
    let mut sums = vec![0.0; count];
    let mut sizes = vec![0usize; count];
    for_each_entry(y, |index, v| {
        let l = memberships[mode][index[mode]];
        sums[l] += v;
        sizes[l] += 1;
    });
    Ok(sums
        .iter()
        .zip(&sizes)
        .map(|(&s, &n)| if n == 0 { 0.0 } else { s / n as f64 })
        .collect())
}

/// Labels of `mode` sorted by ascending cluster mean; equal means keep the
/// smaller label first.
pub fn cluster_order(y: &Tensor, memberships: &[Vec<usize>], mode: usize) -> Result<Vec<usize>> {
    let means = cluster_means(y, memberships, mode)?;
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| means[a].total_cmp(&means[b]));
    Ok(order)
}

/// RMSE against the medoid and centroid tensors plus per-block summaries.
pub fn evaluate(y: &Tensor, cl: &Clustering) -> Result<EvalReport> {
    cl.check(y.dims())?;
    let medoid = medoid_tensor(y, cl)?;
    let objective = dissim(y, &medoid)?;
    let counts = cl.counts();
    let means = block_means(y, &cl.memberships, &counts)?;
    let lists: Vec<&[usize]> = cl.memberships.iter().map(Vec::as_slice).collect();
    let centroid = gather_tensor(&means, &lists);
    let scale = libm::sqrt(y.len() as f64);

    let sizes: Vec<Vec<usize>> = cl
        .memberships
        .iter()
        .zip(&counts)
        .map(|(memb, &c)| {
            let mut s = vec![0usize; c];
            for &l in memb {
                s[l] += 1;
            }
            s
        })
        .collect();

    let mut blocks = Vec::with_capacity(means.len());
    let mut labels = vec![0usize; counts.len()];
    for &centroid_score in means.values() {
        let medoid_index: Vec<usize> = labels
            .iter()
            .enumerate()
            .map(|(m, &l)| cl.medoids[m][l])
            .collect();
        blocks.push(BlockSummary {
            block_labels: labels.clone(),
            centroid_score,
            medoid_score: y.get(&medoid_index).expect("medoids are in range"),
            member_counts: labels.iter().enumerate().map(|(m, &l)| sizes[m][l]).collect(),
        });
        for m in (0..counts.len()).rev() {
            labels[m] += 1;
            if labels[m] < counts[m] {
                break;
            }
            labels[m] = 0;
        }
    }
    blocks.sort_by(|a, b| a.centroid_score.total_cmp(&b.centroid_score));

    let cluster_order = (0..y.order())
        .map(|m| cluster_order(y, &cl.memberships, m))
        .collect::<Result<Vec<_>>>()?;

    Ok(EvalReport {
        rmse_m: objective / scale,
        rmse_c: dissim(y, &centroid)? / scale,
        objective,
        blocks,
        cluster_order,
    })
}

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index between two labelings of the same items.
///
/// Returns 1.0 when both partitions are trivially identical in a way that
/// leaves no room for chance (e.g. fewer than two items, or both put every
/// item in one cluster).
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut joint: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut rows: BTreeMap<usize, u64> = BTreeMap::new();
    let mut cols: BTreeMap<usize, u64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = joint.values().map(|&n| pairs(n)).sum();
    let sum_a: f64 = rows.values().map(|&n| pairs(n)).sum();
    let sum_b: f64 = cols.values().map(|&n| pairs(n)).sum();
    let total = pairs(a.len() as u64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}
