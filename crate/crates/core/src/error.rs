use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("base q = {0} must satisfy 0 < q < 1")]
    InvalidBase(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parameter out of regime: {0}")]
    ParameterOutOfRegime(String),
    #[error("{what} did not converge within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },
    #[error("non-terminating series diverges: |z| = {z_abs} >= 1")]
    DivergentSeries { z_abs: f64 },
    #[error("denominator vanishes at index {index}")]
    PoleInDenominator { index: usize },
    #[error("adaptive quadrature reached depth {depth} with residual {residual:e}")]
    NoConvergence { depth: u32, residual: f64 },
    #[error("lattice terms stopped decaying near index {index}")]
    NoDecay { index: usize },
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is singular (|det| = {det:e})")]
    Singular { det: f64 },
    #[error("recurrence block A_{index} is singular")]
    SingularBlock { index: usize },
    #[error("coefficient sequence too short: need index {needed}, have {available}")]
    SequenceTooShort { needed: usize, available: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("argument is not on the unit circle (|x| = {0})")]
    NotOnUnitCircle(f64),
    #[error("value expected real has imaginary part {imag:e} (|value| = {modulus:e})")]
    NotReal { imag: f64, modulus: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
