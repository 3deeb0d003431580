//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes of the simulator. Variants group by remedy: `InvalidConfig`
/// means fix the inputs, `Domain` means the call itself was out of range,
/// `Diverged` means the integration blew up, and the remaining variants are
/// analysis failures on otherwise valid data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value violates a documented invariant.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The state norm crossed the divergence guard during integration.
    #[error("integration diverged at t = {t_s:.3e} s (state norm exceeded 1e12 x input scale)")]
    Diverged { t_s: f64 },

    /// A fit could not be formed from the given samples.
    #[error("fit error: {0}")]
    Fit(String),

    /// A curve lacks the geometric feature an operation requires.
    #[error("shape error: {0}")]
    Shape(String),

    /// A reference quantity needed for normalization vanished.
    #[error("normalization error: {0}")]
    Normalization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
