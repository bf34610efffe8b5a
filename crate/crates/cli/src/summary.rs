//! Machine-readable run summaries, printed to stdout as JSON when the
//! run is invoked with `--format json-summary`. The CSV data file is
//! written either way; the summary carries the derived quantities a
//! pipeline wants without re-parsing the CSV.

use serde::Serialize;

/// Nonlocal-correlation verdict attached to scan and CHSH summaries.
///
/// `nonlocal_visibility` is |S|/(2 sqrt 2), the fraction of the maximal
/// quantum value reached by the best CHSH arrangement; values above
/// 1/sqrt 2 (about 71 percent) cannot come from a local model, so
/// `bell_violating` is that comparison with a small guard band.
#[derive(Debug, Serialize)]
pub struct BellVerdict {
    pub s: f64,
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
    pub sign_arrangement: String,
    pub nonlocal_visibility: f64,
    pub bell_violating: bool,
}

#[derive(Debug, Serialize)]
pub struct CurveSummary {
    pub overlay_value_rad: f64,
    /// (max - min)/(max + min) of the like-pair rate along the sweep;
    /// None when the curve is identically zero.
    pub visibility: Option<f64>,
    pub r14_min_norm: f64,
    pub r14_max_norm: f64,
}

#[derive(Debug, Serialize)]
pub struct ScanSummary {
    pub subcommand: &'static str,
    pub mode: String,
    pub swept: String,
    pub steps: usize,
    pub curves: Vec<CurveSummary>,
    pub chsh: BellVerdict,
    /// Largest amplitude distance between the closed-form detector fields
    /// and the element-by-element chain over sampled scan points.
    pub max_engine_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct ChshSummary {
    pub subcommand: &'static str,
    pub mode: String,
    pub grid_step_rad: f64,
    pub correlations: [f64; 4],
    #[serde(flatten)]
    pub verdict: BellVerdict,
}

#[derive(Debug, Serialize)]
pub struct FringeSummary {
    pub subcommand: &'static str,
    pub mode: String,
    /// Visibility of each detector's own-phase fringe, detectors 1..4.
    pub visibilities: [f64; 4],
}

#[derive(Debug, Serialize)]
pub struct EstimateSummary {
    pub quantity: String,
    pub analytic: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub sigmas_off: f64,
    pub n_trials: u64,
    pub n_gated: u64,
}

#[derive(Debug, Serialize)]
pub struct MonteCarloSummary {
    pub subcommand: &'static str,
    pub mode: String,
    pub seed: u64,
    pub rows: Vec<EstimateSummary>,
    pub all_within_five_sigma: bool,
}

#[derive(Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SelftestSummary {
    pub subcommand: &'static str,
    pub checks: Vec<CheckOutcome>,
    pub all_ok: bool,
}
