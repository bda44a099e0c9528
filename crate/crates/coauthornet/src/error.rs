//! Crate-wide error type and the exit-code contract used by the CLI.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("graph construction: {0}")]
    Graph(String),

    #[error("node id {id} out of bounds (graph has {n} nodes)")]
    NodeBounds { id: u32, n: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("corpus contains no usable records")]
    EmptyCorpus,

    #[error("table schema error: {0}")]
    Schema(String),

    #[error("format error in {path} at byte offset {offset}: {msg}")]
    Format {
        path: PathBuf,
        offset: u64,
        msg: String,
    },

    #[error("journal metrics unavailable: {0}")]
    MetricsUnavailable(String),

    #[error("training diverged in block '{block}' at epoch {epoch}")]
    Divergence { block: String, epoch: usize },

    #[error("negative sampling exhausted after {attempts} attempts ({needed} samples needed)")]
    SamplingExhausted { attempts: usize, needed: usize },

    #[error(
        "AUC-ROC undefined for single-class input (accuracy {accuracy:.4}, f1 {f1:.4} still computed)"
    )]
    AucUndefined { accuracy: f64, f1: f64 },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("unknown author '{query}'{}", closest_suffix(.closest))]
    UnknownAuthor { query: String, closest: Vec<String> },

    #[error("gradient verification failed: {0} block(s) above tolerance")]
    VerificationFailed(usize),

    #[error("output directory is locked by another command ({lock})")]
    Locked { lock: PathBuf },
}

fn closest_suffix(closest: &[String]) -> String {
    if closest.is_empty() {
        String::new()
    } else {
        format!("; closest matches: {}", closest.join(", "))
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable process exit code for this error.
    ///
    /// 1 internal, 2 I/O or configuration, 3 lookup failure, 4 verification
    /// failure. Success is 0 and is not represented here.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Config(_)
            | Error::Parse { .. }
            | Error::Schema(_)
            | Error::Format { .. }
            | Error::EmptyCorpus
            | Error::MetricsUnavailable(_)
            | Error::Locked { .. } => 2,
            Error::UnknownAuthor { .. } => 3,
            Error::VerificationFailed(_) => 4,
            _ => 1,
        }
    }
}
