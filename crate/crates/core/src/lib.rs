//! Medoid-based multiway clustering of dense tensors.
//!
//! Given an order-K tensor and a number of clusters per mode, [`pam::fit`]
//! estimates a block structure in which every cluster of every mode is
//! represented by one of its own indices (the medoid). The fit is a greedy
//! initialization ([`pam::build`]) followed by a swap-based local search
//! ([`pam::swap`]) over the Frobenius distance between the data tensor and
//! its medoid tensor.
//!
//! Also included:
//!
//! - [`tbm`]: a mean-based tensor block model baseline (k-means per mode
//!   followed by block-coordinate refinement);
//! - [`report`]: centroid tensors, RMSE, block summaries and the adjusted
//!   Rand index;
//! - [`synth`]: planted-block tensor generation and brute-force oracles for
//!   small inputs.
//!
//! All indices are 0-based. Tensors are stored row-major (last mode varies
//! fastest).
//!
//! The crate is `no_std` (it needs `alloc`). The `parallel` feature pulls in
//! `std` and evaluates swap candidates with rayon; results do not depend on
//! the number of threads.
#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

mod error;
pub mod pam;
pub mod report;
pub mod synth;
pub mod tbm;
pub mod tensor;

pub use error::{Error, Result};
pub use pam::{build, fit, medoid_tensor, swap, ClusterSpec, Clustering, SwapStep};
pub use report::{adjusted_rand_index, centroid_tensor, evaluate, rmse, BlockSummary, EvalReport};
pub use tbm::{tbm_fit, TbmConfig};
pub use tensor::{dissim, mode_slice, replace, subtensor, IndexSet, Tensor};

#[cfg(test)]
pub(crate) mod testutil {
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::Tensor;

    pub fn random_tensor(dims: &[usize], seed: u64) -> Tensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = dims.iter().product();
        let values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        Tensor::new(dims.to_vec(), values).unwrap()
    }
}
