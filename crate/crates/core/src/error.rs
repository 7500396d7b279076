use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rank {r} out of range for ambient dimension {d} (need 1 <= r < d)")]
    RankOutOfRange { r: usize, d: usize },

    #[error("outlier count {k} out of range for {n} rows")]
    OutlierCountOutOfRange { k: usize, n: usize },

    #[error("row index {index} out of range for {n} rows")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("outlier indices must be strictly increasing")]
    UnsortedIndices,

    #[error("input contains a non-finite value")]
    NonFinite,

    #[error("matrix has no rows or no columns")]
    Empty,

    #[error("basis is not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("basis columns are linearly dependent")]
    RankDeficient,

    #[error("planar solver requires d = 2 and r = 1, got d = {d}, r = {r}")]
    NotPlanar { d: usize, r: usize },

    #[error("enumeration of {subsets} subsets exceeds the budget of {budget}; use a sampled method")]
    BudgetExceeded { subsets: u128, budget: u128 },

    #[error("alpha gap undefined: farthest inlier distance {d1:e} is numerically zero")]
    DegenerateGap { d1: f64 },

    #[error("Grassmannian volume of Gr({r}, {d}) is not representable as a finite nonzero f64")]
    VolumeOutOfRange { r: usize, d: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("CSV line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
