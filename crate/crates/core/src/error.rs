use thiserror::Error;

/// Errors raised while building or analysing twisted group algebra data.
///
/// Generator and entry indices are 1-based in messages, matching the
/// usual `e_{ij}` grid numbering.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("modulus {p}^{n} exceeds 2^31")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },

    #[error("group shape has no blocks")]
    EmptyShape,
    #[error("block {0} has multiplicity 0")]
    ZeroMultiplicity(usize),
    #[error("exponents are not strictly decreasing at block {0}")]
    ExponentsNotStrictlyDecreasing(usize),
    #[error("enumeration of {size} elements exceeds the cap of {cap}")]
    TooLargeToEnumerate { size: u128, cap: u64 },
    #[error("cocycle table over a group of order {order} exceeds the cap of {cap}")]
    TooLargeToValidate { order: u64, cap: u64 },

    #[error("expected a {expected}x{expected} matrix, found {found}")]
    WrongDimensions { expected: usize, found: String },
    #[error("diagonal entry ({0},{0}) is nonzero")]
    NonzeroDiagonal(usize),
    #[error("entries ({0},{1}) and ({1},{0}) are not negatives of each other")]
    NotAntisymmetric(usize, usize),

    #[error("cocycle identity fails at triple ({0}, {1}, {2}) (element indices)")]
    NotACocycle(usize, usize, usize),
    #[error("commutator exponent of generators {0} and {1} has the wrong order")]
    PairingOrderViolation(usize, usize),

    #[error("prime {0} appears in more than one component")]
    DuplicatePrime(u64),
    #[error("center methods disagree: {0}")]
    MethodsDisagree(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
