//! JSON documents, the verification driver behind the `omnidual` binary, and report rendering.

mod document;
pub mod oracle;
mod run;

pub use document::{
    fnv, load, pointer, ComposeTask, DocumentBuilder, InstanceDocument, LeafTaskSpec,
    NormalFormTask, PullbackTask, RawChart, RawDocument, RawForm, RawInstance, RawMorphism,
    RawStructure, SamplePolicy, FORMAT_VERSION,
};
pub use run::{run, Command, Entry, Report, ReportFormat, RunOptions, STRICT_MIN_SAMPLES};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("unresolved reference '{key}' at {path}")]
    UnresolvedReference { path: String, key: String },
    #[error("invariant violated at {path}: {witness}")]
    InvariantViolation { path: String, witness: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// Input errors exit with 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
