//! Desk-scale model of a two-party folded interferometer in which each
//! photon of a pair carries a polarization and a frequency tag.
//!
//! The crate is layered:
//!
//! * [`polfield`] - Jones calculus over the four tagged modes, plus the
//!   optical elements (wave plates, polarizers, splitters).
//! * [`bench`] - the bench parameters and two field propagation routes
//!   (closed-form detector fields and an element-by-element chain) that
//!   must agree to near machine precision.
//! * [`correlation`] - single-detector fringes, two-detector coincidence
//!   rates under two evaluation modes, normalized correlations, and a
//!   CHSH optimizer.
//! * [`montecarlo`] - a seeded, partition-independent photon-pair
//!   sampler with heterodyne coincidence gating and binomial error bars.
//!
//! The two evaluation modes differ only in how a coincidence rate is
//! formed from the detector fields: `Paper` keeps the joint amplitude,
//! `Strict` multiplies the two local intensities. The first violates a
//! CHSH bound, the second cannot; everything downstream (scans, the
//! optimizer, the sampler) works with either.

pub mod bench;
pub mod correlation;
pub mod error;
pub mod montecarlo;
pub mod polfield;

pub use bench::{BenchConfig, DetectorPlane, EvalMode};
pub use correlation::{
    ChshResult, ChshSettings, CoincidencePair, CorrelationRecord, ScanSpec, ScanVariable,
    SignArrangement,
};
pub use error::{Error, Result};
pub use montecarlo::{EventRecord, McEstimate, Routing, TrialOutcome};
pub use polfield::{FieldState, FrequencyTag, JonesMatrix, ModeLabel, Polarization, Port};
