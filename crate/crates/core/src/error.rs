use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: i128, m: u64 },

    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("character exponent {k} out of range for modulus {p}")]
    BadExponent { p: u64, k: u64 },

    #[error("character must be primitive (nonprincipal)")]
    PrincipalCharacter,

    #[error("the zero polynomial has no Newton polygon")]
    ZeroPolynomial,

    #[error("no integer r in (Q/2, Q) carries mass: normalization undefined at Q = {0}")]
    DegenerateNormalization(f64),

    #[error("quadrature did not converge on [{lo}, {hi}]: estimated error {error:e} after {intervals} intervals")]
    QuadratureNoConvergence {
        lo: f64,
        hi: f64,
        error: f64,
        intervals: usize,
    },

    #[error("size condition violated: {0}")]
    SizeCondition(String),

    #[error("tolerance violated at step {step}: residual {residual:e} > {tolerance:e}")]
    Tolerance {
        step: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
