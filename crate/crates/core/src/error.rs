use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Quantum numbers outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A density matrix or tensor set failed one of its structural checks.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("root finding failed for rank {rank}: {message}")]
    RootFinding { rank: usize, message: String },

    /// A root had no antipodal partner; the input tensor breaks the conjugation symmetry.
    #[error("rank {rank}: root at (theta={theta:.6}, phi={phi:.6}) has no antipode within {tolerance:e} rad (closest {closest:e})")]
    UnpairedRoot {
        rank: usize,
        theta: f64,
        phi: f64,
        tolerance: f64,
        closest: f64,
    },

    #[error("rank {rank}: decomposition inconsistent: {message}")]
    Inconsistent { rank: usize, message: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Validation(_) | Error::Domain(_) => 2,
            Error::RootFinding { .. } | Error::UnpairedRoot { .. } | Error::Inconsistent { .. } => 3,
            Error::Io(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
