//! Canned workloads for the criterion benches, kept here so the bench
//! and any future profiling harness agree on what "the pipeline" means.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use fransim_core::{BenchConfig, ScanSpec, ScanVariable};

/// Full four-overlay analyzer sweep at publication resolution.
pub fn fringe_workload() -> ScanSpec {
    ScanSpec {
        variable: ScanVariable::Zeta,
        start: 0.0,
        stop: 2.0 * PI,
        steps: 720,
        overlay_values: vec![0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4],
        base: BenchConfig::default(),
    }
}

/// Angle-search grid pitch that keeps the bench under a second while
/// still exercising the refinement stage.
pub fn search_grid_step() -> f64 {
    PI / 16.0
}

/// Trial count sized so one sampling bench iteration stays in the
/// low-millisecond range.
pub fn sampling_trials() -> u64 {
    20_000
}
