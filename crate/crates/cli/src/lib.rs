//! Document formats, subcommands and the randomized verification driver
//! behind the `blaschke` binary.

pub mod commands;
pub mod document;
pub mod sampling;
pub mod verify;

pub use commands::{cmd_forward, cmd_invert, CommandError, InvertOptions};
pub use document::{
    ConfigOverrides, Diagnostics, DocumentError, Mode, ProblemDocument, ResultDocument,
};
pub use sampling::{sample_metric, write_csv};
pub use verify::{cmd_verify, SuiteSummary, VerifySummary};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// Verification failures and I/O errors.
    pub const FAILURE: i32 = 1;
    pub const INVALID_INPUT: i32 = 2;
    pub const INDECISIVE: i32 = 3;
    pub const NOT_CONVERGED: i32 = 4;
}
