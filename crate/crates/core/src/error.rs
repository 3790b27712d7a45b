use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("Hermite-Gaussian order {order} exceeds the supported maximum {max}")]
    HermiteOrderTooLarge { order: usize, max: usize },

    #[error("invalid angular momentum indices: two_j = {two_j}, two_m = {two_m}")]
    InvalidAngularIndex { two_j: i64, two_m: i64 },

    #[error("dense rotation oracle supports two_j <= {max}, got {two_j}")]
    OracleDimension { two_j: u32, max: u32 },

    #[error("cutoff {given} is too small, at least {required} is required")]
    CutoffTooSmall { given: usize, required: usize },

    #[error("number state |{n}> does not fit below cutoff {cutoff}")]
    NumberAboveCutoff { n: usize, cutoff: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("density matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("density matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("density matrix has eigenvalue {eigenvalue:e} below the tolerance")]
    NotPositive { eigenvalue: f64 },

    #[error("mixture weight {weight} is negative")]
    NegativeWeight { weight: f64 },

    #[error("mixture weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },

    #[error("empty mixture")]
    EmptyMixture,

    #[error("cannot truncate a state of cutoff {cutoff} at {requested}")]
    TruncationAboveCutoff { requested: usize, cutoff: usize },

    #[error("retained trace {trace:e} below cutoff is too small to renormalize")]
    VanishingTrace { trace: f64 },

    #[error("local oscillator amplitude must be positive and finite, got {0}")]
    InvalidAmplitude(f64),

    #[error("count window is empty")]
    EmptyWindow,

    #[error("x = m / sqrt(j) is undefined for two_j = 0")]
    UndefinedQuadrature,

    #[error("series order {0} must be even and at most {max}", max = crate::povm::MAX_SERIES_ORDER)]
    InvalidSeriesOrder(u32),

    #[error("brute-force grid cap {cap} is not supported: {reason}")]
    BruteForceCap { cap: usize, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
