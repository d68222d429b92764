use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |h_ij - conj(h_ji)| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix is not unitary: ||U^dag U - I||_F = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("survival probability {probability:e} below extinction threshold at step {step}")]
    Extinct { step: usize, probability: f64 },

    #[error("predicted survival probability {probability:e} below extinction threshold")]
    ExtinctLimit { probability: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}
