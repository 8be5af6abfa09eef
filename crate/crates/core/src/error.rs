use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell index {index} is outside 1..={len}")]
    CellIndex { index: usize, len: usize },

    #[error("density evaluation failed at t = {t}")]
    Numeric { t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol {0:?} is not in the layout")]
    UnknownSymbol(char),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: String, reason: String },

    #[error("fast-scan mode requires t_fast")]
    MissingFastParams,

    #[error(
        "the analytic fast-scan chain does not model false positives (lambda = {lambda}/s); \
         use the Monte Carlo engine instead"
    )]
    FastFalsePositives { lambda: f64 },

    #[error("distribution is not normalized (total mass {0})")]
    Unnormalized(f64),

    #[error("mean number of scans is zero")]
    ZeroMean,

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("session has finished")]
    SessionFinished,

    #[error("no word has been completed yet")]
    NoCompletedWord,

    #[error("click at {t_ms} ms precedes the previous click at {last_ms} ms")]
    ClickOutOfOrder { t_ms: f64, last_ms: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
