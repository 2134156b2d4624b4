use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("density validation failed ({invariant}): {detail}")]
    Validation {
        invariant: &'static str,
        detail: String,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate branch: probability {0:e} is too small to condition on")]
    DegenerateBranch(f64),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error(
        "bracket [{lo}, {hi}] does not enclose a sign change (f(lo) = {f_lo}, f(hi) = {f_hi})"
    )]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("occupation of mode `{mode}` would exceed the cutoff {cutoff}")]
    Truncation { mode: String, cutoff: u8 },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
