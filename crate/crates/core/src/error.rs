//! Crate error type.

use thiserror::Error;

/// Errors produced by parameter generation, protocol execution, genome
/// handling and file I/O.
///
/// The coarse classes map onto the CLI exit codes: protocol errors (phase
/// violations, malformed or mismatched messages), validation errors
/// (elements or ciphertexts failing algebraic checks), and I/O errors.
#[derive(Debug, Error)]
pub enum Error {
    /// Prime or parameter search exhausted its attempt budget.
    #[error("parameter generation failed: {0}")]
    ParamGen(String),

    /// A received value failed an algebraic validity check.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A message arrived out of order or was replayed within a session.
    #[error("phase violation: expected phase {expected}, got {got}")]
    PhaseViolation { expected: u8, got: u8 },

    /// Message kind does not match the running protocol.
    #[error("protocol kind mismatch: expected {expected:#04x}, got {got:#04x}")]
    KindMismatch { expected: u8, got: u8 },

    /// Session id in a message does not match the session state.
    #[error("session id mismatch")]
    SessionMismatch,

    /// A message arrived for a session that already ran to completion.
    #[error("session already completed")]
    SessionDone,

    /// Payload does not parse into the expected lists.
    #[error("malformed payload: {0}")]
    MalformedPayload(String),

    /// Request/response list lengths disagree.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A set-protocol input was empty.
    #[error("empty input set")]
    EmptySet,

    /// The two parties' common inputs disagree.
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    /// Plaintext does not fit the exponent message space.
    #[error("value {0} outside the message space")]
    MessageSpace(u64),

    /// A marker probe matched more than one fragment.
    #[error("marker {marker} is ambiguous: found in {fragments} fragments")]
    MarkerAmbiguous { marker: u16, fragments: usize },

    /// A symbol outside the A/C/G/T/- alphabet.
    #[error("invalid genome symbol {0:#04x}")]
    InvalidSymbol(u8),

    /// Position or index outside the genome bounds.
    #[error("position {position} out of bounds for length {len}")]
    OutOfBounds { position: u64, len: u64 },

    /// Count or threshold outside its allowed range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// File does not start with the expected magic bytes.
    #[error("bad file magic: expected {expected}, found {found}")]
    BadMagic { expected: String, found: String },

    /// File format version not understood.
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that indicate a misbehaving or out-of-sync peer,
    /// as opposed to bad local inputs.
    pub fn is_protocol(&self) -> bool {
        matches!(
            self,
            Error::PhaseViolation { .. }
                | Error::KindMismatch { .. }
                | Error::SessionMismatch
                | Error::SessionDone
                | Error::MalformedPayload(_)
                | Error::LengthMismatch { .. }
                | Error::ConfigMismatch(_)
        )
    }

    /// True for algebraic validation failures on received material.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_))
    }
}
