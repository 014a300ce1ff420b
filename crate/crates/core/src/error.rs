use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("transition matrix is malformed: {0}")]
    Malformed(String),
    #[error("alphabet has {0} symbols, at least 2 are required")]
    RejectAlphabetTooSmall(usize),
    #[error("symbol {symbol} has an empty {side}")]
    RejectDeadSymbol { symbol: usize, side: &'static str },
    #[error("transition matrix is not primitive (no positive power up to {bound})")]
    RejectNotPrimitive { bound: usize },
    #[error("word {0} is not admissible")]
    NotAdmissible(String),
    #[error("word of length {len} is shorter than the potential depth {depth}")]
    WordTooShort { len: usize, depth: usize },
    #[error("operands live on different shift spaces")]
    MismatchedSft,
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("roof must be strictly positive, minimum is {0}")]
    NotPositive(f64),
    #[error("polynomial degree {0} exceeds the cap of {1}")]
    DegreeTooHigh(usize, usize),
    #[error("power iteration did not converge in {0} iterations")]
    NoConvergence(usize),
    #[error("enumeration of {0} periodic points exceeds the limit")]
    TooLarge(u128),
    #[error("could not bracket a root (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    BracketFailure { f_lo: f64, f_hi: f64 },
    #[error("potential is not in L: sup = {sup}, pressure = {pressure}, min = {min}")]
    NotInL { sup: f64, pressure: f64, min: f64 },
    #[error("P(-phi) = {0}, expected 0")]
    NotZeroPressure(f64),
    #[error("integral of the shifted observable is not positive (min {0})")]
    DegenerateDelta(f64),
    #[error("only {achieved} of {requested} separated witnesses found")]
    CannotSeparate { achieved: usize, requested: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: {source}")]
    Validation { line: usize, source: Box<Error> },
}

impl Error {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            _ => 1,
        }
    }
}
