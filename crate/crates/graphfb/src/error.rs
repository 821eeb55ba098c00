use thiserror::Error;

/// Errors produced by graph construction, spectral decomposition, sampling,
/// filter design, and the experiment protocols.
#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("negative weight {weight} on edge ({u}, {v})")]
    NegativeWeight { u: usize, v: usize, weight: f64 },

    #[error("vertex index {index} out of range for graph of size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("vertex {0} has zero degree; normalized Laplacian is undefined")]
    IsolatedVertex(usize),

    #[error("no connected graph after {attempts} attempts")]
    ConnectivityFailure { attempts: usize },

    #[error("eigendecomposition failed: {0}")]
    EigensolverFailure(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length {0} is odd; spectral sampling needs an even length")]
    OddLength(usize),

    #[error("length mismatch: {values} values for {slots} slots")]
    LengthMismatch { values: usize, slots: usize },

    #[error("decomposition depth {levels} too large for length {n}")]
    DepthTooLarge { levels: usize, n: usize },

    #[error("graph is not bipartite")]
    NotBipartite,

    #[error("bipartition halves differ: |L| = {0}, |H| = {1}")]
    UnequalHalves(usize, usize),

    #[error("complement block is numerically singular (cond ≈ {cond:.3e})")]
    SingularComplementBlock { cond: f64 },

    #[error("spectral index range [{lo}, {hi}] outside spectrum of length {n}")]
    RangeOutOfSpectrum { lo: usize, hi: usize, n: usize },

    #[error("component {0} has no spectral content (sup norm is zero)")]
    EmptyCluster(usize),

    #[error("reference signal is zero; SNR is undefined")]
    ZeroReference,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag for each error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SelfLoop(_) => "self_loop",
            Error::NegativeWeight { .. } => "negative_weight",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::DuplicateEdge(_, _) => "duplicate_edge",
            Error::IsolatedVertex(_) => "isolated_vertex",
            Error::ConnectivityFailure { .. } => "connectivity_failure",
            Error::EigensolverFailure(_) => "eigensolver_failure",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::OddLength(_) => "odd_length",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::DepthTooLarge { .. } => "depth_too_large",
            Error::NotBipartite => "not_bipartite",
            Error::UnequalHalves(_, _) => "unequal_halves",
            Error::SingularComplementBlock { .. } => "singular_complement_block",
            Error::RangeOutOfSpectrum { .. } => "range_out_of_spectrum",
            Error::EmptyCluster(_) => "empty_cluster",
            Error::ZeroReference => "zero_reference",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
