use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown lattice `{name}`; valid names: {valid}")]
    UnknownPreset { name: String, valid: String },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("ancilla strategy `{strategy}` does not fit this graph: {reason}")]
    IncompatibleStrategy { strategy: &'static str, reason: String },

    #[error("{what} on {qubits} qubits exceeds the limit of {limit}")]
    Capacity {
        what: &'static str,
        qubits: usize,
        limit: usize,
    },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("numerical integrity check failed: {0}")]
    Numerical(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("region `{0}` is empty or unknown")]
    Region(String),

    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("fit rejected: {0}")]
    Fit(String),

    #[error("verification failed: {0}")]
    CheckFailed(String),

    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Stable short tag used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownPreset { .. } => "unknown_preset",
            Error::InvalidLattice(_) => "invalid_lattice",
            Error::IncompatibleStrategy { .. } => "incompatible_strategy",
            Error::Capacity { .. } => "capacity",
            Error::InvalidCircuit(_) => "invalid_circuit",
            Error::Numerical(_) => "numerical",
            Error::Precondition(_) => "precondition",
            Error::Region(_) => "region",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::Fit(_) => "fit",
            Error::CheckFailed(_) => "check_failed",
            Error::Config { .. } => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
