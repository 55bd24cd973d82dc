use thiserror::Error;

/// Errors surfaced by state, operator, and certificate construction.
#[derive(Error, Debug)]
pub enum Error {
    #[error("site index {site} out of range for {num_qubits} qubits")]
    SiteOutOfRange { site: usize, num_qubits: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("vector of length {len} is not a power-of-two qubit register")]
    NotAQubitRegister { len: usize },

    #[error("state norm {norm} deviates from 1 beyond tolerance")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian (max asymmetry {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("density matrix trace {trace} deviates from 1 beyond tolerance")]
    TraceNotOne { trace: f64 },

    #[error("density matrix has eigenvalue {eigenvalue:.3e} below -1e-9")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("subsystem mask must be strictly increasing and non-empty")]
    InvalidMask,

    #[error("operator must be traceless for this check")]
    NotTraceless,

    #[error("{requested} qubits exceeds the dense-matrix ceiling of {max}")]
    TooManyQubits { requested: usize, max: usize },

    #[error("eigendecomposition failed: {0}")]
    Linalg(String),

    #[error("numerical consistency check failed: {0}")]
    Numerical(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("need at least {required} samples, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    #[error("bond term resampling exhausted after {attempts} attempts")]
    ResamplingExhausted { attempts: usize },

    #[error("spectrum failed the non-degenerate-gap check (worst collision {worst_collision:.3e} <= tol {tol:.3e})")]
    DegenerateGaps { worst_collision: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
