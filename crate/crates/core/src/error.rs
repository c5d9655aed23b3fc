use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be a probability in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("{name} out of range: {message}")]
    OutOfRange { name: &'static str, message: String },

    #[error("multiplicity index {index} is outside 1..={sessions}")]
    IndexOutOfRange { index: usize, sessions: usize },

    #[error("exact enumeration supports 1 <= N <= {max}, got N = {n}")]
    UnsupportedPopulation { n: u32, max: u32 },

    #[error("inconsistent tallies: {0}")]
    InconsistentTallies(String),

    #[error("{estimator} needs {required} sessions, got {sessions}")]
    SessionCount { estimator: &'static str, required: &'static str, sessions: usize },

    #[error("malformed history CSV at line {line}: {message}")]
    HistoryCsv { line: usize, message: String },
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
