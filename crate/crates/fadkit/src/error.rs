use std::path::PathBuf;

use fadkit_core::ErrorClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] fadkit_core::Error),
    #[error("clip {clip_id}: {source}")]
    Clip {
        clip_id: String,
        source: fadkit_core::Error,
    },
    #[error("set {set_id}: {source}")]
    Set {
        set_id: String,
        source: fadkit_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        source: fadkit_core::Error,
    },
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("{0}")]
    Data(String),
    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Core(e)
            | Error::Clip { source: e, .. }
            | Error::Set { source: e, .. }
            | Error::File { source: e, .. } => e.class(),
            Error::Config(_) => ErrorClass::Config,
            _ => ErrorClass::Data,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Config => 2,
            ErrorClass::Data => 3,
            ErrorClass::Numerical => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    pub(crate) fn in_file(path: &std::path::Path) -> impl FnOnce(fadkit_core::Error) -> Error + '_ {
        move |source| Error::File {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn in_clip(clip_id: &str) -> impl FnOnce(fadkit_core::Error) -> Error + '_ {
        move |source| Error::Clip {
            clip_id: clip_id.to_string(),
            source,
        }
    }

    pub(crate) fn in_set(set_id: &str) -> impl FnOnce(fadkit_core::Error) -> Error + '_ {
        move |source| Error::Set {
            set_id: set_id.to_string(),
            source,
        }
    }
}
