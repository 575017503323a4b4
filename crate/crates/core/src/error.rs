use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("EmptyInput: no labels")]
    EmptyInput,

    #[error("MissingLabel: empty label at row {row}")]
    MissingLabel { row: usize },

    #[error("IoError: {path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("ParseError: row {row}: {message}: {content:?}")]
    Parse {
        row: usize,
        content: String,
        message: String,
    },

    #[error("LengthMismatch: {first} vs {second} items")]
    LengthMismatch { first: usize, second: usize },

    #[error("Overflow: {n} items exceeds the exact-arithmetic limit")]
    Overflow { n: u64 },

    #[error("AllocationRefused: dense table of {cells} cells exceeds cap {cap}")]
    AllocationRefused { cells: u128, cap: u128 },

    #[error("TooFewItems: need at least {required} items, got {n}")]
    TooFewItems { n: u64, required: u64 },

    #[error("DegenerateNormalization: normalized ARI denominator is zero")]
    DegenerateNormalization,

    #[error("InvalidDistribution: {0}")]
    InvalidDistribution(String),

    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),

    #[error("CapExceeded: {n} items exceeds enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
}

impl Error {
    /// Short variant name, used as the error marker in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::MissingLabel { .. } => "MissingLabel",
            Error::Io { .. } => "IoError",
            Error::Parse { .. } => "ParseError",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::Overflow { .. } => "Overflow",
            Error::AllocationRefused { .. } => "AllocationRefused",
            Error::TooFewItems { .. } => "TooFewItems",
            Error::DegenerateNormalization => "DegenerateNormalization",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::CapExceeded { .. } => "CapExceeded",
        }
    }
}
