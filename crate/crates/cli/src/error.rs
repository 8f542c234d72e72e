use std::path::Path;

use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config { path: Option<String>, message: String },
    Io { path: String, message: String },
    Library(qgibbs::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl AsRef<Path>, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config { .. } => "config",
            CliError::Io { .. } => "io",
            CliError::Library(e) => match e {
                qgibbs::Error::Parse { .. } => "parse",
                qgibbs::Error::Gap { .. } => "gap",
                qgibbs::Error::Data(_) => "data",
                qgibbs::Error::Domain(_) => "domain",
                qgibbs::Error::InsufficientData { .. } => "insufficient_data",
                qgibbs::Error::Alignment(_) => "alignment",
                qgibbs::Error::Degenerate(_) => "degenerate",
                qgibbs::Error::Coverage { .. } => "coverage",
                qgibbs::Error::Config(_) => "config",
                qgibbs::Error::Io { .. } => "io",
                qgibbs::Error::Csv(_) => "csv",
            },
        }
    }

    fn path(&self) -> Option<&str> {
        match self {
            CliError::Config { path, .. } => path.as_deref(),
            CliError::Io { path, .. } => Some(path),
            CliError::Library(qgibbs::Error::Io { path, .. }) => Some(path),
            _ => None,
        }
    }

    /// The object printed on stderr.
    pub fn to_json(&self) -> Value {
        let mut err = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        if let Some(p) = self.path() {
            err["path"] = json!(p);
        }
        json!({ "error": err })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Config { path: Some(p), message } => write!(f, "invalid config {p}: {message}"),
            CliError::Config { path: None, message } => write!(f, "invalid config: {message}"),
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qgibbs::Error> for CliError {
    fn from(e: qgibbs::Error) -> Self {
        CliError::Library(e)
    }
}
