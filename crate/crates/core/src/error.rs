use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("{what} is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { what: &'static str, deviation: f64 },

    #[error("{what} is not skew-Hermitian (deviation {deviation:.3e})")]
    NotSkewHermitian { what: &'static str, deviation: f64 },

    #[error("{what} is not unitary (deviation {deviation:.3e})")]
    NotUnitary { what: &'static str, deviation: f64 },

    #[error("{what} is not traceless (trace magnitude {deviation:.3e})")]
    NotTraceless { what: &'static str, deviation: f64 },

    #[error("observable is zero after the traceless shift")]
    ZeroObservable,

    #[error("observable is a scalar matrix; permutation tomography needs at least two distinct diagonal values")]
    ScalarObservable,

    #[error("observable must be diagonal for permutation designs (off-diagonal magnitude {deviation:.3e})")]
    NotDiagonal { deviation: f64 },

    #[error("Kraus operators are not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("density matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {found}, expected {expected}")]
    WrongTrace { expected: f64, found: f64 },

    #[error("seed set is empty or numerically zero")]
    ZeroSeeds,

    #[error("control count {found} does not match generator count {expected}")]
    ControlCount { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("closure did not saturate within {sweeps} sweeps")]
    ClosureDiverged { sweeps: usize },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("linear system is singular (rank {rank} < {needed})")]
    Singular { rank: usize, needed: usize },

    #[error("{0} values exceed the enumeration cap of 7; use the greedy design instead")]
    TooLarge(usize),

    #[error("sensitivity matrix has rank {rank} < {needed}; {} unobserved parameter direction(s)", directions.len())]
    Unobserved {
        rank: usize,
        needed: usize,
        directions: Vec<Vec<f64>>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
