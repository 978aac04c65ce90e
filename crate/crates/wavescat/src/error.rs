//! One error type for the whole crate, with an exit-code mapping for the CLI.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("singular matrix: pivot magnitude {magnitude:.3e} at elimination step {step} is below {threshold:.3e}")]
    SingularMatrix {
        step: usize,
        magnitude: f64,
        threshold: f64,
    },

    #[error("matrix is not symmetric: |A[{i}][{j}] - A[{j}][{i}]| = {defect:.3e} exceeds the relative tolerance")]
    NotSymmetric { i: usize, j: usize, defect: f64 },

    #[error("fit needs at least 3 points, got {got}")]
    InsufficientData { got: usize },

    #[error("log-log fit needs strictly positive coordinates, got ({x:.6e}, {y:.6e})")]
    NonPositive { x: f64, y: f64 },

    #[error(
        "k^2 is within {eps:.1e} of the channel threshold sigma^2 = {sigma_sq} (gap {gap:.3e})"
    )]
    ThresholdError { sigma_sq: f64, gap: f64, eps: f64 },

    #[error("Im k = {im_k:.3e} < 0 lies off the physical sheet")]
    NonPhysicalSheet { im_k: f64 },

    #[error("truncation retains no {what}")]
    EmptyTruncation { what: &'static str },

    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: String,
        right: String,
    },

    #[error("k^2 = {k_sq} is within {tol:.1e} of the retained interior eigenvalue tau^2 = {tau_sq}; the diagonal resolvent path refuses to continue")]
    DiagonalResonance { k_sq: f64, tau_sq: f64, tol: f64 },

    #[error("the {r}x{r} low-rank core is singular")]
    CoreSingular { r: usize },

    #[error("k = {k} is within 1e-10 of an integer, where the 1d closed forms are singular")]
    IntegerK { k: f64 },

    #[error("|1 + i*beta| = {magnitude:.3e} is too close to the closed-form pole")]
    BetaPole { magnitude: f64 },

    #[error("first-order rate bracket violated: control {control} gives control*error = {product:.6e}, median {median:.6e}")]
    RateBracket {
        control: f64,
        product: f64,
        median: f64,
    },

    #[error("open channel {index} (sigma^2 = {sigma_sq}) was cut by the channel cutoff {cutoff}")]
    OpenChannelsTruncated {
        index: usize,
        sigma_sq: f64,
        cutoff: f64,
    },

    #[error("channel cutoff {cutoff} does not exceed k^2 = {k_sq}")]
    LambdaBelowThreshold { cutoff: f64, k_sq: f64 },

    #[error("entry ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    IndexError {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("config line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    #[error("config line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },

    #[error("config value {key} = {value} is out of range: {why}")]
    RangeError {
        key: String,
        value: String,
        why: String,
    },

    #[error("missing required config key '{key}'")]
    MissingKey { key: &'static str },

    #[error("config error: {0}")]
    ConfigError(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// CLI exit code: 2 for configuration problems, 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ParseError { .. }
            | Error::UnknownKey { .. }
            | Error::RangeError { .. }
            | Error::MissingKey { .. }
            | Error::ConfigError(_)
            | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
