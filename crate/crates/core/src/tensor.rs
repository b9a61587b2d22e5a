//! Dense tensor storage and the slicing/distance primitives the clustering
//! algorithms are built on.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense order-K tensor of finite `f64` values in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    values: Vec<f64>,
}

impl Tensor {
    /// Builds a tensor, checking that `dims` is non-empty with every entry at
    /// least 1, that the value count matches, and that every value is finite.
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let len = checked_len(&dims)?;
        if values.len() != len {
            return Err(Error::InvalidTensor(format!(
                "dims {dims:?} require {len} values, found {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidTensor(format!(
                "non-finite value {} at flat position {pos}",
                values[pos]
            )));
        }
        Ok(Self { dims, values })
    }

    pub fn filled(dims: Vec<usize>, value: f64) -> Result<Self> {
        let len = checked_len(&dims)?;
        Self::new(dims, vec![value; len])
    }

    /// Builds a tensor by evaluating `f` at every multi-index in row-major order.
    pub fn from_fn<F>(dims: Vec<usize>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> f64,
    {
        let len = checked_len(&dims)?;
        let mut values = Vec::with_capacity(len);
        let mut index = vec![0usize; dims.len()];
        for _ in 0..len {
            values.push(f(&index));
            for m in (0..dims.len()).rev() {
                index[m] += 1;
                if index[m] < dims[m] {
                    break;
                }
                index[m] = 0;
            }
        }
        Self::new(dims, values)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Number of modes K.
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.dims)
    }

    pub fn get(&self, index: &[usize]) -> Option<f64> {
        if index.len() != self.dims.len() {
            return None;
        }
        let mut offset = 0;
        for (&i, &d) in index.iter().zip(&self.dims) {
            if i >= d {
                return None;
            }
            offset = offset * d + i;
        }
        Some(self.values[offset])
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.values.len() as f64
    }
}

fn checked_len(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::InvalidTensor("a tensor needs at least one mode".into()));
    }
    if let Some(m) = dims.iter().position(|&d| d == 0) {
        return Err(Error::InvalidTensor(format!("mode {m} has size 0")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidTensor(format!("dims {dims:?} overflow usize")))
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for m in (0..dims.len().saturating_sub(1)).rev() {
        strides[m] = strides[m + 1] * dims[m + 1];
    }
    strides
}

/// Splits a row-major layout around `mode` into (outer, dim, inner) extents.
pub(crate) fn split_at_mode(dims: &[usize], mode: usize) -> (usize, usize, usize) {
    let outer = dims[..mode].iter().product();
    let inner = dims[mode + 1..].iter().product();
    (outer, dims[mode], inner)
}

/// Ordered list of distinct indices along one mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    pub mode: usize,
    pub indices: Vec<usize>,
}

impl IndexSet {
    pub fn new(mode: usize, indices: Vec<usize>) -> Self {
        Self { mode, indices }
    }

    pub fn full(mode: usize, dim: usize) -> Self {
        Self::new(mode, (0..dim).collect())
    }

    pub fn single(mode: usize, index: usize) -> Self {
        Self::new(mode, vec![index])
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn check(&self, dim: usize) -> Result<()> {
        let invalid = |reason| Err(Error::InvalidIndexSet { mode: self.mode, reason });
        if self.indices.is_empty() {
            return invalid("empty index set".into());
        }
        let mut seen = vec![false; dim];
        for &i in &self.indices {
            if i >= dim {
                return invalid(format!("index {i} out of range for size {dim}"));
            }
            if seen[i] {
                return invalid(format!("duplicate index {i}"));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// Extracts the sub-tensor `t[I_1, ..., I_K]`, one index set per mode, in
/// the order the sets list their indices.
pub fn subtensor(t: &Tensor, sets: &[IndexSet]) -> Result<Tensor> {
    if sets.len() != t.order() {
        return Err(Error::InvalidIndexSet {
            mode: sets.len().min(t.order()),
            reason: format!("expected {} index sets, found {}", t.order(), sets.len()),
        });
    }
    for (m, set) in sets.iter().enumerate() {
        if set.mode != m {
            return Err(Error::InvalidIndexSet {
                mode: m,
                reason: format!("set in position {m} is labelled mode {}", set.mode),
            });
        }
        set.check(t.dims[m])?;
    }
    let lists: Vec<&[usize]> = sets.iter().map(|s| s.indices.as_slice()).collect();
    let dims = sets.iter().map(IndexSet::len).collect();
    Ok(Tensor { dims, values: gather(t, &lists) })
}

/// The order-`mode` slice at `index`: all modes full except `mode`, which is
/// narrowed to `{index}` and kept as a size-1 axis.
pub fn mode_slice(t: &Tensor, mode: usize, index: usize) -> Result<Tensor> {
    if mode >= t.order() {
        return Err(Error::InvalidIndexSet {
            mode,
            reason: format!("tensor has only {} modes", t.order()),
        });
    }
    let sets: Vec<IndexSet> = (0..t.order())
        .map(|m| {
            if m == mode {
                IndexSet::single(m, index)
            } else {
                IndexSet::full(m, t.dims[m])
            }
        })
        .collect();
    subtensor(t, &sets)
}

/// Frobenius distance `||a - b||`.
pub fn dissim(a: &Tensor, b: &Tensor) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::ShapeMismatch {
            expected: a.dims.clone(),
            found: b.dims.clone(),
        });
    }
    Ok(libm::sqrt(sq_dist(&a.values, &b.values)))
}

/// Copy of `v` with every occurrence of `from` replaced by `to`.
pub fn replace<T: PartialEq + Copy>(v: &[T], from: T, to: T) -> Vec<T> {
    v.iter().map(|&x| if x == from { to } else { x }).collect()
}

/// Sum of squared differences, accumulated front to back.
///
/// Every distance in the crate goes through this loop (or replicates its
/// order exactly) so that cached and reference computations agree bit for bit.
#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Visits the flat offsets of `t[lists[0], ..., lists[K-1]]` in row-major
/// order of the output. Lists may repeat indices; they are not range-checked.
pub(crate) fn for_each_gathered<F: FnMut(usize)>(dims: &[usize], lists: &[&[usize]], mut f: F) {
    let k = dims.len();
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let strides = strides(dims);
    let offsets: Vec<Vec<usize>> = lists
        .iter()
        .zip(&strides)
        .map(|(l, &s)| l.iter().map(|&i| i * s).collect())
        .collect();
    let last = &offsets[k - 1];
    let mut pos = vec![0usize; k - 1];
    let mut base: usize = offsets[..k - 1].iter().map(|o| o[0]).sum();
    loop {
        for &o in last {
            f(base + o);
        }
        let mut m = k - 1;
        loop {
            if m == 0 {
                return;
            }
            m -= 1;
            let om = &offsets[m];
            base -= om[pos[m]];
            pos[m] += 1;
            if pos[m] < om.len() {
                base += om[pos[m]];
                break;
            }
            pos[m] = 0;
            base += om[0];
        }
    }
}

pub(crate) fn gather(t: &Tensor, lists: &[&[usize]]) -> Vec<f64> {
    let len = lists.iter().map(|l| l.len()).product();
    let mut out = Vec::with_capacity(len);
    for_each_gathered(&t.dims, lists, |o| out.push(t.values[o]));
    out
}

/// Same as `sq_dist(t.values, gather(t, lists))` without materializing the
/// gathered tensor. Each list must have the length of its mode.
pub(crate) fn gathered_sq_error(t: &Tensor, lists: &[&[usize]]) -> f64 {
    let mut acc = 0.0;
    let mut flat = 0;
    for_each_gathered(&t.dims, lists, |o| {
        let d = t.values[flat] - t.values[o];
        acc += d * d;
        flat += 1;
    });
    acc
}

/// The mode-`mode` slices of `t`, each flattened in row-major order.
pub(crate) fn slices_along(t: &Tensor, mode: usize) -> Vec<Vec<f64>> {
    let (outer, dim, inner) = split_at_mode(&t.dims, mode);
    (0..dim)
        .map(|l| {
            let mut s = Vec::with_capacity(outer * inner);
            for o in 0..outer {
                let start = (o * dim + l) * inner;
                s.extend_from_slice(&t.values[start..start + inner]);
            }
            s
        })
        .collect()
}

/// Tensor with the given dims filled from `t[lists...]`.
pub(crate) fn gather_tensor(t: &Tensor, lists: &[&[usize]]) -> Tensor {
    Tensor {
        dims: lists.iter().map(|l| l.len()).collect(),
        values: gather(t, lists),
    }
}
