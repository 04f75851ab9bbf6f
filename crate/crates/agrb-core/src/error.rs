//! Error type shared across the codec and analysis modules.

use core::fmt;

/// Errors reported by frame construction, stream parsing, and decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Frame or image dimensions violate a constructor precondition.
    BadDimensions {
        width: usize,
        height: usize,
        reason: &'static str,
    },
    /// Sample buffer length does not match width * height (* channels).
    BadBufferLength { expected: usize, found: usize },
    /// Stream does not start with the expected magic bytes.
    BadMagic,
    /// Stream version is not supported by this implementation.
    UnsupportedVersion(u8),
    /// Stream payload is shorter than its header claims.
    TruncatedStream { expected: usize, found: usize },
    /// Bit-level corruption detected while decoding (runaway unary run,
    /// reads past the declared payload, trailing garbage).
    CorruptStream(&'static str),
    /// A quantization table identifier or shift value is out of range.
    BadQuantTable(&'static str),
    /// A controller or energy-model parameter violates its invariant.
    BadParameter(&'static str),
    /// An input collection that must be non-empty was empty.
    EmptyInput(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BadDimensions {
                width,
                height,
                reason,
            } => write!(f, "bad dimensions {width}x{height}: {reason}"),
            Error::BadBufferLength { expected, found } => {
                write!(f, "buffer length {found}, expected {expected}")
            }
            Error::BadMagic => write!(f, "bad magic bytes"),
            Error::UnsupportedVersion(v) => write!(f, "unsupported stream version {v}"),
            Error::TruncatedStream { expected, found } => {
                write!(
                    f,
                    "truncated stream: expected {expected} bytes, found {found}"
                )
            }
            Error::CorruptStream(what) => write!(f, "corrupt stream: {what}"),
            Error::BadQuantTable(what) => write!(f, "bad quantization table: {what}"),
            Error::BadParameter(what) => write!(f, "bad parameter: {what}"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
