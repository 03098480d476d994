//! Error type shared across the simulator.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error)]
pub enum LinkSimError {
    #[error("cce index exceeds CORESET capacity: cce {cce}, capacity {capacity}")]
    CceOutOfRange { cce: u32, capacity: u32 },

    #[error(
        "pdcch exceeds CORESET capacity: first_cce {first_cce} + aggregation level \
         {aggregation_level} > capacity {capacity}"
    )]
    PdcchCapacity {
        first_cce: u32,
        aggregation_level: u32,
        capacity: u32,
    },

    #[error("invalid REG bundle size {0}; allowed sizes are 2, 3, 6")]
    InvalidRegbSize(u32),

    #[error("invalid aggregation level {0}; allowed levels are 1, 2, 4, 8")]
    InvalidAggregationLevel(u32),

    #[error("unsupported CORESET duration of {0} symbols; bundle placement is defined for 1 symbol")]
    UnsupportedCoresetDuration(u32),

    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid OFDM numerology: {0}")]
    InvalidNumerology(String),

    #[error("pdp file {path}: {reason}")]
    PdpFormat { path: PathBuf, reason: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("noise variance must be non-negative, got {0}")]
    NegativeNoiseVariance(f64),

    #[error("interference profile: {0}")]
    InterferenceProfile(String),

    #[error("noise variance not homogeneous within REG bundle at position {0}")]
    HeterogeneousBundleNoise(u32),

    #[error("ill-conditioned MMSE system")]
    IllConditionedMmse,

    #[error("eigendecomposition did not converge")]
    EigenNoConvergence,

    #[error("no noise subspace; use genie variance")]
    NoNoiseSubspace,

    #[error("mrc input SNR must be non-negative, got {0}")]
    NegativeSnr(f64),

    #[error("empty SNR grid")]
    EmptySnrGrid,

    #[error("SNR grid dimensions do not match values: {0}")]
    SnrGridShape(String),

    #[error("eesm lambda must be positive, got {0}")]
    NonPositiveLambda(f64),

    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("worker pool: {0}")]
    WorkerPool(String),
}

impl LinkSimError {
    /// Single-message configuration error.
    pub fn config(msg: impl Into<String>) -> Self {
        LinkSimError::Config(vec![msg.into()])
    }
}

pub type Result<T> = std::result::Result<T, LinkSimError>;
