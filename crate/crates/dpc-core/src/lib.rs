//! Dirty-paper coding experimentation toolkit.
//!
//! A transmitter that knows the channel's additive interference ahead of time
//! can pre-cancel it without spending extra power. This crate implements the
//! classical precoding schemes built on that idea (Tomlinson-Harashima and
//! modulo-lattice precoding), a small trainable neural encoder/decoder pair
//! that learns the same trick from samples, and a deterministic Monte Carlo
//! harness for comparing symbol error rates across schemes.
//!
//! Modules:
//! - [`math`]: scalar utilities (Q-function, decibels, finite differences).
//! - [`rng`]: counter-based random streams, reproducible per sample index.
//! - [`lattice`]: 1-D and 2-D lattices, nearest-point quantization, dithers.
//! - [`constellation`]: message constellations (BPSK, QPSK, lattice-derived).
//! - [`channel`]: the interference channel Y = X + S + N.
//! - [`classical`]: Tomlinson-Harashima and modulo-lattice precoding.
//! - [`neural`]: MLP encoder/decoder, training loop, checkpoints.
//! - [`eval`]: SER estimation, sweeps, baselines, decision-region export.
//! - [`cli`]: command-line driver over the above.

pub mod channel;
pub mod classical;
pub mod cli;
pub mod constellation;
pub mod eval;
pub mod lattice;
pub mod math;
pub mod neural;
pub mod rng;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A function argument violated its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A run configuration could not be parsed or validated.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Training produced a non-finite loss.
    #[error("training diverged: non-finite loss at epoch {epoch}, step {step} (lambda {lambda})")]
    Diverged { epoch: usize, step: usize, lambda: f64 },
    /// A checkpoint file was malformed or inconsistent.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    /// An underlying I/O operation failed.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this error: 2 for configuration or argument
    /// problems, 3 for divergence, 4 for I/O and checkpoint problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) => 2,
            Error::Diverged { .. } => 3,
            Error::Checkpoint(_) | Error::Io(_) => 4,
        }
    }
}
