//! Link-level simulator for adaptive MIMO transmission.
//!
//! A transmitter with `nt` antennas adapts to an `nr x nt` flat Rayleigh
//! channel using feedback derived from the channel's singular value
//! decomposition. The crate models four adaptation strategies and their
//! multi-dimensional generalizations:
//!
//! * equal power over all antennas (no feedback),
//! * water-filling over all spatial subchannels (full channel knowledge),
//! * eigen-beamforming on the strongest subchannel (one vector fed back),
//! * beam-nulling, which feeds back the weakest right singular vector and
//!   transmits in its orthogonal complement.
//!
//! On top of the adapted effective channels it provides linear MMSE, exhaustive
//! ML and matched-filter detection, PSK/QAM modems with analytic BER kernels,
//! linear dispersion and orthogonal space-time codes, and deterministic Monte
//! Carlo drivers for ergodic capacity and bit error rate curves.
//!
//! All randomness is derived from a single master seed with counter-based
//! per-trial substreams, so every result is reproducible bit-for-bit for a
//! given seed, independent of the number of worker threads.

pub mod channel;
pub mod detection;
pub mod linalg;
pub mod modem;
pub mod rng;
pub mod schemes;
pub mod sim;
pub mod stcode;

/// Crate-wide error type. `InvalidInput` covers contract violations by the
/// caller (dimensions, parameter ranges, incompatible configurations);
/// `Numerical` covers runtime numerical failures (non-convergence, loss of
/// positive definiteness).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::Numerical(msg.into())
}
