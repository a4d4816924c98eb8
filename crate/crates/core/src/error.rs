use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("degree mismatch: form degree {form}, patch dimension {patch}")]
    Degree { form: usize, patch: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular configuration: {0}")]
    Singular(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("admissibility failure: |<psi; zeta - z>| = {0:e}")]
    Admissibility(f64),
    #[error("rank deficient: rank {rank} < {required}")]
    RankDeficient { rank: usize, required: usize },
    #[error("series did not converge: certificate {certificate:e} > tolerance {tol:e}")]
    Divergence { certificate: f64, tol: f64 },
    #[error("no separation: {0}")]
    NoSeparation(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
