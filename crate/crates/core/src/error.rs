use thiserror::Error;

/// Everything that can go wrong in the simulator proper.
///
/// Configuration parsing in the CLI layer has its own error type; this one
/// covers physics-level failures (bad parameters, degenerate statistics,
/// hardware constraints that make a measurement meaningless).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A field was routed somewhere it cannot go, e.g. interfering a port
    /// with itself.
    #[error("topology error: {0}")]
    Topology(String),

    /// Fringe visibility (max-min)/(max+min) with a zero denominator.
    #[error("visibility is undefined: fringe maximum and minimum are both zero")]
    UndefinedVisibility,

    /// All coincidence rates vanish, so there is no joint click distribution
    /// to sample from.
    #[error("degenerate coincidence distribution: all four pair rates are zero")]
    DegenerateDistribution,

    /// The correlation denominator (sum of the four pair rates) vanishes.
    #[error("degenerate normalization: coincidence rates sum to zero")]
    DegenerateNormalization,

    /// Coincidence gating requires timing resolution finer than one beat
    /// period, otherwise the gate cannot distinguish split from same-side
    /// pairs.
    #[error(
        "coincidence gate inoperative: resolving time {resolving_time:.3e} s \
         is not below the beat period {beat_period:.3e} s"
    )]
    GateInoperative {
        resolving_time: f64,
        beat_period: f64,
    },

    #[error("insufficient statistics: no gated trials were recorded")]
    InsufficientStatistics,

    /// Search grid too coarse to be meaningful.
    #[error("grid step {0} rad is too coarse (must be below pi/4)")]
    TooCoarse(f64),

    #[error("invalid scan: {0}")]
    InvalidScan(String),
}

pub type Result<T> = std::result::Result<T, Error>;
