use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("block length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("block length k={0} outside supported range 1..={max}", max = crate::bitspace::MAX_K)]
    InvalidBlockLength(usize),

    #[error("symbol {symbol} outside alphabet of size {radix}")]
    SymbolOutOfRange { symbol: u64, radix: u8 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("invalid source model: {0}")]
    InvalidSourceModel(String),

    #[error("invalid channel capacities: {0}")]
    InvalidCaps(String),

    #[error("{0}")]
    OutOfRange(String),

    #[error("{0}")]
    Refused(String),

    #[error("empty image set for encoder {0}")]
    EmptyImage(usize),

    #[error("not a partition of A^k: {0}")]
    NotAPartition(String),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("unsupported model: {0}")]
    Unsupported(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("network error: {0}")]
    Network(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable identifier for machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::InvalidBlockLength(_) => "invalid_block_length",
            Error::SymbolOutOfRange { .. } => "symbol_out_of_range",
            Error::AlphabetMismatch(_) => "alphabet_mismatch",
            Error::Parse { .. } => "parse",
            Error::InvalidSourceModel(_) => "invalid_source_model",
            Error::InvalidCaps(_) => "invalid_caps",
            Error::OutOfRange(_) => "out_of_range",
            Error::Refused(_) => "refused",
            Error::EmptyImage(_) => "empty_image",
            Error::NotAPartition(_) => "not_a_partition",
            Error::InvalidColoring(_) => "invalid_coloring",
            Error::Unsupported(_) => "unsupported",
            Error::InvalidCode(_) => "invalid_code",
            Error::Network(_) => "network",
        }
    }
}
