use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("duplicate key in input: {0}")]
    DuplicateKey(String),

    #[error("character has no angle for prime {0}")]
    MissingPrimeAngle(u64),

    #[error("Frostman shift denominator vanishes (|1 - conj(xi) f| = {0:e})")]
    DegenerateDenominator(f64),

    #[error("evaluation point hits a pole of the Blaschke product at {re} + {im}i")]
    PoleHit { re: f64, im: f64 },

    #[error("quadrature did not converge (achieved {achieved:e}, wanted {wanted:e})")]
    QuadratureNonconvergence { achieved: f64, wanted: f64 },

    #[error("series is supported on {0} primes; at most 4 are allowed for torus quadrature")]
    TooManyPrimes(usize),

    #[error("|f| vanishes at a quadrature node near {re} + {im}i")]
    ZeroOnLine { re: f64, im: f64 },

    #[error("argument of p must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("integrand is singular at {re} + {im}i (|f| = 0 with p < 2)")]
    SingularPoint { re: f64, im: f64 },

    #[error("suspected zero on the rectangle boundary near {re} + {im}i")]
    BoundaryZeroSuspected { re: f64, im: f64 },

    #[error("zero isolation exceeded maximum depth {0}")]
    DepthExceeded(u32),

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("exponentiation exceeds the coefficient budget: {0}")]
    TruncationOverflow(String),

    #[error("frequency tie on the half-space order at ({0}, {1})")]
    FrequencyTie(i32, i32),

    #[error("flow leaves the cover before T = {0}")]
    InsufficientCover(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input error at \"{pointer}\": {message}")]
    Input { pointer: String, message: String },
}

pub type Result<T> = std::result::Result<T, LabError>;
