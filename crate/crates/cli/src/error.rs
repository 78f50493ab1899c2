use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Model(#[from] tunnelwell::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 success, 2 geometry, 3 config, 4 resonance regime.
    pub fn exit_code(&self) -> i32 {
        use tunnelwell::Error as E;
        match self {
            CliError::Config(_) => 3,
            CliError::Io { .. } => 1,
            CliError::Model(e) => match e {
                E::ResonanceRegime { .. } => 4,
                E::Parse(_)
                | E::InvalidParameter { .. }
                | E::InvalidGrid(_)
                | E::InvalidSchedule(_)
                | E::InvalidTwoLevel(_)
                | E::EmptyInput(_) => 3,
                _ => 2,
            },
        }
    }
}
