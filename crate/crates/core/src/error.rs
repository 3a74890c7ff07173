use alloc::string::String;

/// Errors produced by the quadrature library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("order {n} exceeds the configured cap {cap}")]
    OrderTooLarge { n: usize, cap: usize },
    #[error("interval must satisfy a < b (got a = {a}, b = {b})")]
    InvalidInterval { a: String, b: String },
    #[error("Beta function arguments must be positive (got p = {p}, q = {q})")]
    InvalidBetaArgs { p: usize, q: usize },
    #[error("jet carries derivatives up to order {have}, rule needs order {need}")]
    JetTooShort { have: usize, need: usize },
    #[error("jet length mismatch: expected {expected}, got {got}")]
    JetLength { expected: usize, got: usize },
    #[error("requested jet order {0} exceeds the maximum supported order")]
    JetOrderTooLarge(usize),
    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: &'static str },
    #[error("tolerance must be positive and finite")]
    InvalidTolerance,
    #[error("root isolation failed: {0}")]
    RootIsolation(String),
    #[error("reference integration did not converge (value {value:e}, error estimate {err_estimate:e})")]
    OracleUnconverged { value: f64, err_estimate: f64 },
    #[error("need at least {need} derivative samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("partition must have at least two strictly increasing nodes")]
    InvalidPartition,
    #[error("operation requires order {expected}, kernel has order {got}")]
    OrderMismatch { expected: usize, got: usize },
    #[error("kernel antiderivative level {level} is not available for order {n}")]
    InvalidKernelLevel { level: usize, n: usize },
    #[error("inconsistent rule: {0}")]
    InconsistentRule(&'static str),
    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),
}
