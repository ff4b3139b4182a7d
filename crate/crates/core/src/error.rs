use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("unknown environment id `{0}`")]
    UnknownEnv(String),
    #[error("unknown config key `{key}` for {env}")]
    UnknownConfigKey { env: String, key: String },
    #[error("invalid value for `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },
    #[error("config belongs to {config} but environment is {env}")]
    ConfigMismatch { env: String, config: String },
    #[error("malformed config document: {0}")]
    ConfigFormat(#[from] serde_json::Error),
    #[error("episode is finished; reset before stepping")]
    EpisodeFinished,
    #[error("wrong action type: {env} expects {expected} actions")]
    WrongActionType { env: String, expected: &'static str },
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("path generation failed after {0} attempts")]
    PathGeneration(usize),
}

pub type Result<T, E = EngineError> = std::result::Result<T, E>;
