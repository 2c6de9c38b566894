use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the crate, from bad construction
/// parameters to degenerate geometry during recovery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("requested {requested} columns but only {available} polynomials of degree < {degree} exist over Z_{p}")]
    TooManyColumns {
        p: u64,
        degree: usize,
        requested: usize,
        available: u128,
    },

    #[error("cannot pad to {requested} rows: pattern already has {rows}")]
    PadBelowRows { requested: usize, rows: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("reference points of rows {rows:?} are collinear for column {column}")]
    CollinearTriple { column: usize, rows: [usize; 3] },

    #[error("no usable non-collinear row triple for column {column}")]
    NoNoncollinearTriple { column: usize },

    #[error("no circle-intersection candidates for column {column}")]
    EmptyCandidates { column: usize },

    #[error("column {column} has degenerate centered references (nearly collinear)")]
    DegenerateColumn { column: usize },

    #[error("column {column} is not part of the estimated support")]
    NotInSupport { column: usize },

    #[error("column {column} keeps {kept} isolated rows; at least {needed} are needed")]
    TooFewIsolatedRows {
        column: usize,
        kept: usize,
        needed: usize,
    },

    #[error("t = {t} lies outside the admissible range [0, {t_max}] for rho = {rho}")]
    OutsideAdmissibleRange { t: f64, t_max: f64, rho: f64 },

    #[error("relative error is undefined for a zero reference signal")]
    ZeroReference,

    #[error("empty sweep: {0}")]
    EmptySweep(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}
