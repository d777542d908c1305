use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),

    #[error("empty graph: {0}")]
    EmptyGraph(String),

    #[error("modularity is undefined on a graph without edges")]
    UndefinedModularity,

    #[error("training diverged at step {step}: {what}")]
    Divergence { step: u64, what: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("missing artifact {}: produce it with `{producer}` first", path.display())]
    MissingArtifact {
        path: PathBuf,
        producer: &'static str,
    },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Wrap this error with the name of the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, looking through stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code: 2 config, 3 data, 4 numeric divergence.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config(_) | Error::InvalidParameter(_) => 2,
            Error::Divergence { .. } => 4,
            _ => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_look_through_stages() {
        let e = Error::Divergence {
            step: 3,
            what: "nan".into(),
        }
        .in_stage("embed");
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_string().contains("embed"));
        assert_eq!(Error::Config("x".into()).exit_code(), 2);
        assert_eq!(Error::EmptyGraph("x".into()).in_stage("graph").exit_code(), 3);
    }

    #[test]
    fn stage_wrapping_is_not_nested() {
        let e = Error::UndefinedModularity.in_stage("louvain").in_stage("run");
        match e {
            Error::Stage { stage, .. } => assert_eq!(stage, "louvain"),
            _ => panic!(),
        }
    }
}
