use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("input file {path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("posterior became degenerate at steps {0:?}")]
    Degenerate(Vec<usize>),
    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] distimation::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => 1,
            CliError::Input { .. } => 2,
            CliError::Degenerate(_) | CliError::Core(distimation::Error::DegeneratePosterior) => 3,
            CliError::Core(_) => 1,
        }
    }

    pub(crate) fn input(path: &std::path::Path, message: impl ToString) -> Self {
        CliError::Input {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
