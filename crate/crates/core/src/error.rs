use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("-{0} is not an odd fundamental discriminant (need D odd, squarefree, D = 3 mod 4)")]
    NotFundamental(i64),
    #[error("pole of the zeta function at s = 1")]
    PoleAtOne,
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("local invariants multiply to {0}, but a space of signature (n-1,1) needs -1")]
    InvalidInvariantProduct(i32),
    #[error("invariant given at {0}, which does not divide D")]
    UnknownPrime(u64),
    #[error("prime {0} is not split in the quadratic field")]
    NotSplit(u64),
    #[error("dimension {0} is too small for this operation (need n >= {1})")]
    DimensionTooSmall(u32, u32),
    #[error("Fourier inversion did not give an integer (residual {0})")]
    NonIntegral(String),
    #[error("quadrature failed: {0}")]
    QuadratureFail(String),
    #[error("dimension out of scope: {0}")]
    DimensionOutOfScope(String),
    #[error("coefficient prime {0} is not = 1 mod D")]
    BadPrime(u64),
    #[error("beta_{0} = -1 makes the vertical coefficient singular")]
    BetaPole(u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::PrecisionLoss(_) | Error::QuadratureFail(_) | Error::NonIntegral(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
