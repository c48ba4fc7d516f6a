use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}, field `{field}`: {msg}")]
    Field { line: usize, field: String, msg: String },
    #[error("field `{field}`: {msg}")]
    Missing { field: String, msg: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] isac_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("validation failed: {0} criteria did not pass")]
    Validation(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(isac_core::Error::NonConvergence { .. }) => 2,
            CliError::Validation(_) => 3,
            _ => 1,
        }
    }
}
