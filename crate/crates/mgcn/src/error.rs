use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A document that does not match its schema; `at` is the JSON path of the offending value.
    #[error("{file}: schema violation at {at}: {message}")]
    Schema {
        file: String,
        at: String,
        message: String,
    },

    #[error("{file}: unsupported {what} version {found} (supported: {supported})")]
    UnsupportedVersion {
        file: String,
        what: &'static str,
        found: u64,
        supported: u64,
    },

    #[error("{0}")]
    Csv(#[from] csv::Error),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] mgcn_core::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for geometric failures of the computation itself (cut locus,
    /// non-convergence) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Core(e) if e.is_numerical())
    }

    /// Process exit code: 2 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            2
        } else {
            1
        }
    }
}
