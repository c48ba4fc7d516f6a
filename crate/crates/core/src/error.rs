use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("beamforming direction has zero norm")]
    ZeroDirection,
    #[error("estimated channel has zero norm")]
    ZeroChannel,
    #[error("dirty paper coding requires perfect CSI (sigma_e = {sigma_e})")]
    DpcUnavailable { sigma_e: f64 },
    #[error("numerical integration did not converge: {context}")]
    NonConvergence { context: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("covariance is not positive semidefinite (min eigenvalue {min_eig:e})")]
    CovNotPsd { min_eig: f64 },
    #[error("argument out of domain: {0}")]
    DomainError(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
