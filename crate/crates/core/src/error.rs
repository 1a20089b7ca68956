use std::path::PathBuf;

/// Errors raised by the library and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty set")]
    EmptySet,
    #[error("invalid interval ({lo}, {hi}): need finite lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid period {0}: need a finite period > 0")]
    InvalidPeriod(f64),
    #[error("invalid window length {0}: need a > 0")]
    InvalidWindow(f64),
    #[error("thickness of a non-periodic set needs an explicit window domain")]
    NeedsDomain,
    #[error("set period {set} is incompatible with torus period {torus}")]
    IncompatiblePeriod { set: f64, torus: f64 },
    #[error("invalid gamma {0}: need 0 < gamma <= 1")]
    InvalidGamma(f64),
    #[error("invalid exponent {0}: need p >= 1 or inf")]
    InvalidExponent(f64),
    #[error("band {index} contains no lattice frequency 2*pi*m/L")]
    EmptyBand { index: usize },
    #[error("invalid band specification: {0}")]
    InvalidBand(String),
    #[error("bands {0} and {1} overlap")]
    BandOverlap(usize, usize),
    #[error("the zero function has no norm ratio")]
    ZeroFunction,
    #[error("duplicate frequency index {0}")]
    DuplicateFrequency(i64),
    #[error("matrix size {n} exceeds the dense-solver limit {max}")]
    SizeLimit { n: usize, max: usize },
    #[error("invalid growth bound M = {0}: need M >= 1")]
    InvalidM(f64),
    #[error("invalid Taylor degree {0}: need m >= 1")]
    InvalidDegree(usize),
    #[error("invalid constants: {0}")]
    InvalidConstants(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bandwidth {0} is below 4*pi, the power [b/4pi] would vanish")]
    BandTooSmall(f64),
    #[error("|f|^p is not integrable on the line for m*p = {0}")]
    NonIntegrable(f64),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
