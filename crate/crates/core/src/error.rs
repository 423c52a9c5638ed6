use thiserror::Error;

/// Errors produced by the chainlab engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set size {0} outside supported range 1..=24")]
    GroundSize(u32),

    #[error("element {element} outside ground set [{n}]")]
    ElementOutOfRange { element: u32, n: u32 },

    #[error("bitmask {bits:#x} has bits above position {n}")]
    BitsOutOfRange { bits: u32, n: u32 },

    #[error("families over different ground sets ({left} and {right})")]
    GroundMismatch { left: u32, right: u32 },

    #[error("sets do not form a strictly increasing chain (position {0})")]
    NotAChain(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("contract violated: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
