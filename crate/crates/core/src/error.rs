use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("invalid index set for mode {mode}: {reason}")]
    InvalidIndexSet { mode: usize, reason: String },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: Vec<usize>, found: Vec<usize> },

    #[error("invalid cluster spec: {0}")]
    InvalidClusterSpec(String),

    #[error("invalid medoids for mode {mode}: {reason}")]
    InvalidMedoids { mode: usize, reason: String },

    #[error("invalid clustering: {0}")]
    InvalidClustering(String),

    #[error("cluster {cluster} of mode {mode} is empty")]
    EmptyCluster { mode: usize, cluster: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("enumeration needs {required} configurations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("invalid synthetic spec: {0}")]
    InvalidSyntheticSpec(String),
}
