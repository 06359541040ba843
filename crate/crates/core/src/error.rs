use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample rate mismatch: {left_hz} Hz vs {right_hz} Hz")]
    RateMismatch { left_hz: f64, right_hz: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("index {index} out of range (0..{len})")]
    IndexOutOfRange { index: usize, len: usize },

    /// The free-running DFB is too far from every comb line to lock.
    #[error(
        "no comb line within locking range: nearest line {nearest_line} is {detuning_hz} Hz away, half-range {half_range_hz} Hz"
    )]
    NoLineInLockingRange {
        nearest_line: usize,
        detuning_hz: f64,
        half_range_hz: f64,
    },

    #[error("no spectral peak: peak-to-median ratio {ratio_db:.2} dB below {threshold_db} dB")]
    NoSpectralPeak { ratio_db: f64, threshold_db: f64 },

    #[error("ambiguous rotation: best two candidates differ by {margin_db:.2} dB")]
    AmbiguousRotation { margin_db: f64 },

    #[error("record too short: {have} samples, need at least {need}")]
    RecordTooShort { have: usize, need: usize },

    #[error("empty band: no estimate bins between {lo_hz} Hz and {hi_hz} Hz")]
    EmptyBand { lo_hz: f64, hi_hz: f64 },

    #[error("config parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    ConfigParse { line: Option<usize>, message: String },

    #[error("constraint violated for `{key}`: requires {invariant}")]
    Constraint { key: String, invariant: String },

    #[error("malformed waveform file: {0}")]
    Waveform(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
