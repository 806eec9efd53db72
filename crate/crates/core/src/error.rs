use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NavError {
    /// |cos L| fell below the curvature-matrix guard.
    #[error("polar singularity: latitude {lat_rad} rad (|cos L| < {threshold:e})")]
    PolarSingularity { lat_rad: f64, threshold: f64 },

    #[error("non-finite navigation state at epoch {epoch} (t = {t_s} s)")]
    NonFinite { epoch: usize, t_s: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("time {t_s} s outside scenario span [0, {duration_s}] s")]
    TimeOutOfRange { t_s: f64, duration_s: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configurations do not share a scenario")]
    MixedScenarios,

    /// Raised when a step fails inside a run; carries the epoch it failed at.
    #[error("run aborted at epoch {epoch} (t = {t_s} s): {source}")]
    RunAborted {
        epoch: usize,
        t_s: f64,
        #[source]
        source: Box<NavError>,
    },
}

pub type Result<T> = std::result::Result<T, NavError>;
