use std::fmt;
use std::path::{Path, PathBuf};

/// Failure of a command, reported on stderr as JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub path: Option<PathBuf>,
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: kind.to_string(),
            message: message.into(),
            path: None,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError {
            kind: "io".into(),
            message: format!("{}: {err}", path.display()),
            path: Some(path.to_path_buf()),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("usage", message)
    }

    pub fn exit_code(&self) -> i32 {
        if self.kind == "usage" {
            2
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut e = serde_json::json!({ "kind": self.kind, "message": self.message });
        if let Some(p) = &self.path {
            e["path"] = serde_json::Value::String(p.display().to_string());
        }
        serde_json::json!({ "error": e }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ferrogate::Error> for CliError {
    fn from(e: ferrogate::Error) -> Self {
        CliError::new(e.kind(), e.to_string())
    }
}
