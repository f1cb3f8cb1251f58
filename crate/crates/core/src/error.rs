use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension n = {0} is below 2")]
    DimensionTooSmall(u32),

    #[error("radius R = {0} must be positive and finite")]
    NonpositiveRadius(f64),

    #[error("eta = {eta} is below e_{depth} * R = {threshold}")]
    EtaBelowThreshold { eta: f64, depth: u32, threshold: f64 },

    #[error("log-refinement depth {0} overflows double precision (max 4)")]
    DepthOverflow(u32),

    #[error("iterated logarithm left its domain: {0}")]
    DomainError(String),

    #[error("bad support ({a}, {b}): {reason}")]
    BadSupport { a: f64, b: f64, reason: &'static str },

    #[error("bump exponent p = {0} is below 3, profile would not be C^2")]
    SmoothnessTooLow(u32),

    #[error("profile is identically zero")]
    ZeroProfile,

    #[error("exponent {0} is not an integer")]
    NonIntegerExponent(f64),

    #[error("profile is not polynomial in r, exact oracle does not apply")]
    NonPolynomialProfile,

    #[error("quadrature missed tolerance: value {value}, error estimate {abs_err} after {subdivisions} panels")]
    ToleranceNotMet { value: f64, abs_err: f64, subdivisions: usize },

    #[error("minimum over j not certified up to j = {scanned_up_to} (best {value} at j = {argmin_j})")]
    TailNotCertified { value: f64, argmin_j: u32, scanned_up_to: u32 },

    #[error("Rayleigh quotient denominator vanishes")]
    ZeroDenominator,

    #[error("mode expansion is empty")]
    EmptyExpansion,

    #[error("mode j = {0} appears twice in the expansion")]
    DuplicateMode(u32),

    #[error("mode eigenvalue does not belong to dimension {0}")]
    ModeDimensionMismatch(u32),

    #[error("relative tolerance {0} outside [1e-13, 1e-3]")]
    BadTolerance(f64),

    #[error("optimizer budget exhausted after {0} evaluations")]
    BudgetExhausted(usize),

    #[error("invalid configuration: {0}")]
    Config(String),
}
