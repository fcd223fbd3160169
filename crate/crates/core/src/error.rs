use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("two-photon coupling g2 = {g2} is at or beyond the spectral collapse point 0.5")]
    SpectralCollapse { g2: f64 },

    #[error("truncation n_tr = {n_tr} is too small (minimum {min})")]
    TruncationTooSmall { n_tr: usize, min: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("symmetric eigensolver did not converge for a {dim}x{dim} matrix")]
    EigenNonConvergence { dim: usize },

    #[error("no convergence up to n_tr = {n_tr}; last relative change {last_delta:e}")]
    NonConvergence { n_tr: usize, last_delta: f64 },

    #[error("Hermite polynomial H_{k} overflowed")]
    HermiteOverflow { k: usize },

    #[error("overlap entry ({m}, {n}) has imaginary residue {residue:e}")]
    FormulaInconsistency { m: usize, n: usize, residue: f64 },

    #[error("overlap entry ({m}, {n}) lost precision to cancellation (error bound {bound:e})")]
    PrecisionLoss { m: usize, n: usize, bound: f64 },

    #[error("Fock truncation leaks {deficit:e} of the norm")]
    TruncationLeakage { deficit: f64 },

    #[error("cubic has (nearly) coincident roots, discriminant {gamma:e}")]
    DegenerateRoots { gamma: f64 },

    #[error("cubic root residual {residual:e} exceeds tolerance")]
    CubicResidual { residual: f64 },

    #[error("RWA eigenstate for n = {n} is degenerate (residual {residual:e})")]
    DegenerateState { n: usize, residual: f64 },

    #[error("initial-state expansion incomplete: cumulative probability {cumulative}")]
    ExpansionIncomplete { cumulative: f64 },

    #[error("time grid is not uniform")]
    NonUniformGrid,

    #[error("time grid is not ascending")]
    NonAscendingGrid,

    #[error("series too short for spectral analysis ({len} < {min})")]
    SeriesTooShort { len: usize, min: usize },

    #[error("initial state is not normalized (norm {norm})")]
    Unnormalized { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
