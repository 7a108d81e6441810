use thiserror::Error;

/// Field signature required by an operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Real,
    Imaginary,
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Signature::Real => f.write_str("a real"),
            Signature::Imaginary => f.write_str("an imaginary"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("d = {0} is not square-free")]
    NotSquareFree(i64),
    #[error("d = {0} does not define a quadratic field")]
    DegenerateField(i64),
    #[error("elements live in different fields (d = {left} and d = {right})")]
    ContextMismatch { left: i64, right: i64 },
    #[error("the zero element is not allowed here")]
    ZeroElement,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("operation requires {expected} quadratic field, got d = {d}")]
    WrongSignature { d: i64, expected: Signature },
    #[error("pi(alpha) = +-1 is rational; its minimal polynomial has degree one")]
    RationalImage,
    #[error("sample is empty")]
    EmptySample,
    #[error("{r} is not an admissible divisor of the modulus base {base}")]
    BadDivisor { r: u64, base: u64 },
    #[error("precision of {0} bits is below the 32-bit minimum")]
    PrecisionTooLow(u32),
    #[error("bound {0} is too large")]
    BoundTooLarge(u64),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
