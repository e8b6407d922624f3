use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sequence `{name}` produced a non-finite value {value} at index {index}")]
    NonFinite { name: String, index: u64, value: f64 },

    #[error("index 0 is not a valid sequence index (indices start at 1)")]
    IndexZero,

    #[error("sequence `{name}` has {len} terms; index {index} is out of range")]
    OutOfRange { name: String, index: u64, len: u64 },

    #[error("index map is not strictly increasing at position {position}")]
    NonIncreasingMap { position: u64 },

    #[error("index map overflowed at position {position}")]
    IndexOverflow { position: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid lacunary scheme: {0}")]
    Scheme(String),

    #[error("lacunary scheme ends at {last} but the horizon is {horizon}")]
    SchemeTooShort { last: u64, horizon: u64 },

    #[error("integer overflow while building {0}")]
    Range(String),

    #[error("cannot decide boundedness of `{0}`: no bound metadata declared")]
    Undecidable(String),

    #[error("no witness exists: {0}")]
    NoWitness(String),

    #[error("refusing to extract a subsequence: {0}")]
    Refused(String),

    #[error("sequence `{sequence}` leaves the domain of `{function}` at index {index} (value {value})")]
    Domain {
        function: String,
        sequence: String,
        index: u64,
        value: f64,
    },

    #[error("empty domain")]
    EmptyDomain,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unknown catalogue entry `{0}`")]
    UnknownSequence(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}
