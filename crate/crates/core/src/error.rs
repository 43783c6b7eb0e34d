use thiserror::Error;

pub type Result<T> = std::result::Result<T, SzegoError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SzegoError {
    #[error("coefficient sequence must be non-empty")]
    EmptySequence,

    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },

    #[error("sobolev index must be a nonnegative real, got {0}")]
    NegativeSobolev(f64),

    #[error("polynomial B must satisfy B(0) = 1, got {0}")]
    BNotNormalized(String),

    #[error("B has a root of modulus {modulus:.3e} inside the closed disc (tolerance {tol:.1e})")]
    RootInsideDisc { modulus: f64, tol: f64 },

    #[error("A and B share a root near {root} (distance {distance:.3e})")]
    CommonFactor { root: String, distance: f64 },

    #[error("degree pattern violated for d = {d}: deg A = {deg_a}, deg B = {deg_b}")]
    DegreePattern { d: usize, deg_a: usize, deg_b: usize },

    #[error("rank index d must be positive")]
    ZeroRank,

    #[error("coefficients are not within {tol:.1e} of V({d}): relative residual {residual:.3e}")]
    NotInVd { d: usize, tol: f64, residual: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: relative defect {defect:.3e}")]
    NotHermitian { defect: f64 },

    #[error("matrix declared PSD has eigenvalue {value:.3e}")]
    NotPositive { value: f64 },

    #[error("eigensolver failed to converge")]
    EigenConvergence,

    #[error("linear system is singular or ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("no clear spectral gap between eigenvalues {above:.6e} and {below:.6e}")]
    NoSpectralGap { above: f64, below: f64 },

    #[error("|z| = {modulus} is too close to the unit circle")]
    PointTooClose { modulus: f64 },

    #[error("hierarchy parameters must be positive and pairwise distinct: {0}")]
    InvalidParameters(String),

    #[error("angle assignment: {0}")]
    InvalidAngles(String),

    #[error("eigenvalue {value:.6e} does not belong to any cluster of the joint spectrum")]
    UnmatchedEigenvalue { value: f64 },

    #[error("integration produced a non-finite state after t = {last_good_t}")]
    Blowup { last_good_t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation inadequate: tail mass {tail:.3e} at {modes} modes, need at least {required} modes")]
    Truncation { tail: f64, modes: usize, required: usize },
}
