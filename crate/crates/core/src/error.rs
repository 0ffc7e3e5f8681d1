use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("impossible sample: category {category} has probability zero")]
    ImpossibleSample { category: usize },

    #[error("length mismatch: {left} samples vs {right} parameter vectors")]
    LengthMismatch { left: usize, right: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("boundary parameter: {0}")]
    BoundaryParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("type census too large: {types} types exceeds limit {limit}")]
    CensusTooLarge { types: u128, limit: u128 },

    #[error("vacuous code: codeword length {m} is not below n*log2(K) = {limit}")]
    VacuousCode { m: usize, limit: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    /// True for errors caused by a request that is well formed but cannot be
    /// carried out (census too large, vacuous code, violated preconditions).
    pub fn is_feasibility(&self) -> bool {
        matches!(
            self,
            Error::CensusTooLarge { .. }
                | Error::VacuousCode { .. }
                | Error::Precondition(_)
                | Error::BoundaryParameter(_)
                | Error::Domain(_)
                | Error::Infeasible(_)
                | Error::ImpossibleSample { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
