use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mismatched truncation orders: {0} vs {1}")]
    MismatchedOrder(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("internal cross-check mismatch: {0}")]
    CrossCheck(String),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("nonzero imaginary residue where a real value was required: {0}")]
    ImaginaryResidue(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
