//! Desk-scale link simulator for cooperative relaying over Rayleigh block fading
//! with two-state Markov-Gaussian (bursty impulsive) noise.
//!
//! The library is organized bottom-up:
//!
//! * [`noise`] : the two-state Markov-Gaussian noise process,
//! * [`link`] : distance-dependent Rayleigh fading and the channel equation,
//! * [`modem`] : Gray PSK mapping and soft bit demapping,
//! * [`detector`] : symbol-by-symbol MAP detection over the noise-state trellis
//!   plus the memoryless, AWGN, and genie-aided baselines,
//! * [`oracle`] : an exhaustive state-enumeration reference for the trellis detector,
//! * [`analytic`] : closed-form and quadrature error-rate predictions,
//! * [`relaying`] : direct, simple-relaying, and selection decode-and-forward frames,
//! * [`harness`] : Monte Carlo experiment runner, CSV output, figure recipes.
//!
//! All randomness flows through counter-derived ChaCha streams
//! ([`streams`]), so every experiment is reproducible bit-for-bit for a given
//! master seed regardless of worker count.

pub mod analytic;
pub mod detector;
pub mod harness;
pub mod link;
pub mod math;
pub mod modem;
pub mod noise;
pub mod oracle;
pub mod relaying;
pub mod streams;

use thiserror::Error;

/// Errors surfaced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Paired sequences disagree in length.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    /// An input contains NaN or infinity where a finite value is required.
    #[error("non-finite input: {0}")]
    NonFinite(String),
    /// An experiment description cannot be run as written.
    #[error("config error: {0}")]
    Config(String),
    /// A Monte Carlo frame panicked; the stream coordinates allow replay.
    #[error("frame panic in scheme `{scheme}` at {snr_db} dB (frame {frame}, master seed {seed}): {message}")]
    FramePanic {
        scheme: String,
        snr_db: f64,
        frame: u64,
        seed: u64,
        message: String,
    },
    /// Output could not be written.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
