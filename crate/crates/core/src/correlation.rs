//! Analytic observables: per-detector intensities and fringe visibilities,
//! two-party coincidence rates in both sign conventions, the normalized
//! correlation, CHSH combinations with an angle search, and sweep drivers
//! for producing fringe datasets.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::bench::{BenchConfig, EvalMode};
use crate::error::{Error, Result};

/// Number of samples used for numeric visibility sweeps. At this density
/// the sweep grid contains the exact fringe extrema, so the numeric
/// visibility agrees with the analytic |sin 2a| to rounding error.
pub const VISIBILITY_SAMPLES: usize = 720;

/// One Alice detector paired with one Bob detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoincidencePair {
    D14,
    D23,
    D13,
    D24,
}

impl CoincidencePair {
    /// Table order used everywhere a four-vector of rates appears:
    /// like pairs first, then unlike.
    pub const ALL: [CoincidencePair; 4] = [
        CoincidencePair::D14,
        CoincidencePair::D23,
        CoincidencePair::D13,
        CoincidencePair::D24,
    ];

    pub fn detectors(self) -> (u8, u8) {
        match self {
            CoincidencePair::D14 => (1, 4),
            CoincidencePair::D23 => (2, 3),
            CoincidencePair::D13 => (1, 3),
            CoincidencePair::D24 => (2, 4),
        }
    }

    pub fn from_ids(alice: u8, bob: u8) -> Result<CoincidencePair> {
        match (alice, bob) {
            (1, 4) => Ok(CoincidencePair::D14),
            (2, 3) => Ok(CoincidencePair::D23),
            (1, 3) => Ok(CoincidencePair::D13),
            (2, 4) => Ok(CoincidencePair::D24),
            _ => Err(Error::InvalidParameter {
                name: "pair",
                reason: format!("({alice}, {bob}) is not an Alice-Bob detector pair"),
            }),
        }
    }

    pub fn index(self) -> usize {
        match self {
            CoincidencePair::D14 => 0,
            CoincidencePair::D23 => 1,
            CoincidencePair::D13 => 2,
            CoincidencePair::D24 => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CoincidencePair::D14 => "R14",
            CoincidencePair::D23 => "R23",
            CoincidencePair::D13 => "R13",
            CoincidencePair::D24 => "R24",
        }
    }
}

/// Polarizer angle, interferometer arm phase, and fringe sign for one
/// detector. Detectors 1 and 3 sit on the minus-sign outputs, 2 and 4 on
/// the plus-sign outputs.
pub(crate) fn detector_params(cfg: &BenchConfig, detector: u8) -> Result<(f64, f64, f64)> {
    match detector {
        1 => Ok((cfg.zeta, cfg.phi, -1.0)),
        2 => Ok((cfg.eta_p, cfg.phi, 1.0)),
        3 => Ok((cfg.theta, cfg.psi, -1.0)),
        4 => Ok((cfg.xi, cfg.psi, 1.0)),
        _ => Err(Error::InvalidParameter {
            name: "detector",
            reason: format!("must be 1..=4, got {detector}"),
        }),
    }
}

/// Mean intensity at one detector:
/// I_k = (I0/2)(1 +- sin 2a_k cos phase_k).
pub fn local_intensity(detector: u8, cfg: &BenchConfig) -> Result<f64> {
    cfg.validate()?;
    let (angle, phase, sign) = detector_params(cfg, detector)?;
    Ok(0.5 * cfg.intensity_i0 * (1.0 + sign * (2.0 * angle).sin() * phase.cos()))
}

/// Fringe visibility (max - min)/(max + min) of one detector's intensity
/// as its own arm phase sweeps a full turn. Analytically |sin 2a_k|; the
/// numeric sweep is the contract, the analytic value backs it in tests.
pub fn local_visibility(detector: u8, cfg: &BenchConfig) -> Result<f64> {
    cfg.validate()?;
    detector_params(cfg, detector)?;
    let mut swept = *cfg;
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for k in 0..VISIBILITY_SAMPLES {
        let phase = 2.0 * PI * (k as f64) / (VISIBILITY_SAMPLES as f64);
        match detector {
            1 | 2 => swept.phi = phase,
            _ => swept.psi = phase,
        }
        let value = local_intensity(detector, &swept)?;
        max = max.max(value);
        min = min.min(value);
    }
    let denom = max + min;
    if denom == 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((max - min) / denom)
}

/// Coincidence rate for one detector pair, in units of I0^2.
///
/// In `Paper` mode the joint amplitude follows one shared sign template
/// for every pair: with (c_a, s_a) the Alice-side polarizer cosine/sine
/// and (c_b, s_b) the Bob-side ones,
///
///   A = c_a c_b - c_a s_b e^{i psi} - s_a c_b e^{i phi}
///       - s_a s_b e^{i(phi + psi)},
///   R = (I0^2/4) |A|^2.
///
/// At phi = psi = 0 this reduces to
/// (I0^2/4)[cos(a + b) - sin(a + b)]^2, which has unit fringe visibility
/// and depends only on the angle sum, the inseparability that drives the
/// Bell violation.
///
/// In `Strict` mode the rate is the literal modulus-squared product of the
/// two local detector amplitudes, which factorizes exactly into
/// I_a x I_b and so cannot violate any local bound.
pub fn coincidence(pair: CoincidencePair, cfg: &BenchConfig) -> Result<f64> {
    cfg.validate()?;
    let (alice, bob) = pair.detectors();
    match cfg.mode {
        EvalMode::Paper => {
            let (a, phi, _) = detector_params(cfg, alice)?;
            let (b, psi, _) = detector_params(cfg, bob)?;
            let (sa, ca) = a.sin_cos();
            let (sb, cb) = b.sin_cos();
            let eip = Complex64::from_polar(1.0, phi);
            let eiq = Complex64::from_polar(1.0, psi);
            let amp = Complex64::new(ca * cb, 0.0)
                - eiq * (ca * sb)
                - eip * (sa * cb)
                - eip * eiq * (sa * sb);
            Ok(0.25 * cfg.intensity_i0 * cfg.intensity_i0 * amp.norm_sqr())
        }
        EvalMode::Strict => Ok(local_intensity(alice, cfg)? * local_intensity(bob, cfg)?),
    }
}

/// All four rates in `CoincidencePair::ALL` order.
pub fn coincidence_table(cfg: &BenchConfig) -> Result<[f64; 4]> {
    let mut table = [0.0; 4];
    for (slot, pair) in table.iter_mut().zip(CoincidencePair::ALL) {
        *slot = coincidence(pair, cfg)?;
    }
    Ok(table)
}

/// Checks the pairing symmetry: with detector 2's polarizer set to
/// detector 1's angle and detector 3's to detector 4's, the two like
/// pairs have identical rates.
pub fn symmetry_check_r23_equals_r14(cfg: &BenchConfig, tol: f64) -> Result<bool> {
    let mut sym = *cfg;
    sym.eta_p = cfg.zeta;
    sym.theta = cfg.xi;
    let r14 = coincidence(CoincidencePair::D14, &sym)?;
    let r23 = coincidence(CoincidencePair::D23, &sym)?;
    Ok((r14 - r23).abs() <= tol)
}

/// Two-channel analyzer layout: the first polarizer in each arm sits at
/// the party's setting, the second at the setting plus pi/2, so each party
/// reads both output channels of a single analyzer.
pub fn orthogonal_port_config(a: f64, b: f64, base: &BenchConfig) -> BenchConfig {
    BenchConfig {
        zeta: a,
        eta_p: a + FRAC_PI_2,
        xi: b,
        theta: b + FRAC_PI_2,
        ..*base
    }
}

fn normalized_correlation(table: &[f64; 4]) -> Result<f64> {
    let like = table[0] + table[1];
    let unlike = table[2] + table[3];
    let denom = like + unlike;
    // Also catches NaN from a poisoned table.
    if denom.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::DegenerateNormalization);
    }
    Ok((like - unlike) / denom)
}

/// Normalized correlation E(a, b) under the two-channel analyzer layout:
/// (R14 + R23 - R13 - R24) / (R14 + R23 + R13 + R24).
///
/// In `Paper` mode with both interferometer phases zero this is
/// -sin 2(a + b) and the denominator is the constant I0^2. In `Strict`
/// mode the two channels of each party carry identical intensities, the
/// four rates coincide, and E vanishes wherever it is defined.
pub fn correlation_e(a: f64, b: f64, cfg: &BenchConfig) -> Result<f64> {
    let ports = orthogonal_port_config(a, b, cfg);
    let table = coincidence_table(&ports)?;
    normalized_correlation(&table)
}

/// The four analyzer settings of a CHSH run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

/// Which of the four correlations carries the minus sign in
/// S = +-E(a,b) +- E(a,b') +- E(a',b) +- E(a',b') with exactly one minus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignArrangement {
    MinusEab,
    MinusEabp,
    MinusEapb,
    MinusEapbp,
}

impl SignArrangement {
    pub const ALL: [SignArrangement; 4] = [
        SignArrangement::MinusEab,
        SignArrangement::MinusEabp,
        SignArrangement::MinusEapb,
        SignArrangement::MinusEapbp,
    ];

    /// Signs applied to [E(a,b), E(a,b'), E(a',b), E(a',b')].
    pub fn signs(self) -> [f64; 4] {
        match self {
            SignArrangement::MinusEab => [-1.0, 1.0, 1.0, 1.0],
            SignArrangement::MinusEabp => [1.0, -1.0, 1.0, 1.0],
            SignArrangement::MinusEapb => [1.0, 1.0, -1.0, 1.0],
            SignArrangement::MinusEapbp => [1.0, 1.0, 1.0, -1.0],
        }
    }
}

impl std::fmt::Display for SignArrangement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SignArrangement::MinusEab => "minus_E_ab",
            SignArrangement::MinusEabp => "minus_E_abp",
            SignArrangement::MinusEapb => "minus_E_apb",
            SignArrangement::MinusEapbp => "minus_E_apbp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshResult {
    pub settings: ChshSettings,
    /// [E(a,b), E(a,b'), E(a',b), E(a',b')].
    pub correlations: [f64; 4],
    pub sign_arrangement: SignArrangement,
    /// max over sign arrangements of |sum of signed correlations|.
    pub s: f64,
}

fn best_arrangement(e: [f64; 4]) -> (SignArrangement, f64) {
    let mut best = (SignArrangement::MinusEab, f64::NEG_INFINITY);
    for arrangement in SignArrangement::ALL {
        let signs = arrangement.signs();
        let s = (0..4).map(|k| signs[k] * e[k]).sum::<f64>().abs();
        if s > best.1 {
            best = (arrangement, s);
        }
    }
    best
}

/// Evaluates the CHSH combination at fixed settings, trying all four
/// one-minus sign placements and keeping the largest |S|.
pub fn chsh_s(settings: &ChshSettings, cfg: &BenchConfig) -> Result<ChshResult> {
    let e = [
        correlation_e(settings.a, settings.b, cfg)?,
        correlation_e(settings.a, settings.b_prime, cfg)?,
        correlation_e(settings.a_prime, settings.b, cfg)?,
        correlation_e(settings.a_prime, settings.b_prime, cfg)?,
    ];
    let (sign_arrangement, s) = best_arrangement(e);
    if cfg.mode == EvalMode::Paper {
        debug_assert!(s <= 2.0 * std::f64::consts::SQRT_2 + 1e-9);
    }
    Ok(ChshResult {
        settings: *settings,
        correlations: e,
        sign_arrangement,
        s,
    })
}

/// |S| at the settings, or negative infinity where the correlation is
/// degenerate so the search skips the point.
fn chsh_objective(settings: &ChshSettings, cfg: &BenchConfig) -> f64 {
    let mut e = [0.0; 4];
    let pairs = [
        (settings.a, settings.b),
        (settings.a, settings.b_prime),
        (settings.a_prime, settings.b),
        (settings.a_prime, settings.b_prime),
    ];
    for (slot, (a, b)) in e.iter_mut().zip(pairs) {
        match correlation_e(a, b, cfg) {
            Ok(v) => *slot = v,
            Err(_) => return f64::NEG_INFINITY,
        }
    }
    best_arrangement(e).1
}

/// Exhaustive grid search over the four settings in [0, pi) followed by
/// coordinate-descent refinement with the step halved down to 1e-9 rad.
/// Correlations are pi-periodic in every angle, so [0, pi) covers all
/// distinct settings.
pub fn optimize_chsh(cfg: &BenchConfig, grid_step: f64) -> Result<ChshResult> {
    cfg.validate()?;
    if !grid_step.is_finite() || grid_step <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "grid_step",
            reason: format!("must be positive and finite, got {grid_step}"),
        });
    }
    if grid_step >= FRAC_PI_4 {
        return Err(Error::TooCoarse(grid_step));
    }

    let n = (PI / grid_step).ceil() as usize;
    let values: Vec<f64> = (0..n).map(|i| (i as f64) * grid_step).collect();

    // E table once; the quadruple loop then only combines entries.
    let mut table = vec![f64::NAN; n * n];
    for (ia, &a) in values.iter().enumerate() {
        for (ib, &b) in values.iter().enumerate() {
            if let Ok(e) = correlation_e(a, b, cfg) {
                table[ia * n + ib] = e;
            }
        }
    }

    let mut best_s = f64::NEG_INFINITY;
    let mut best = ChshSettings {
        a: 0.0,
        a_prime: 0.0,
        b: 0.0,
        b_prime: 0.0,
    };
    for ia in 0..n {
        for iap in 0..n {
            for ib in 0..n {
                let e_ab = table[ia * n + ib];
                let e_apb = table[iap * n + ib];
                if e_ab.is_nan() || e_apb.is_nan() {
                    continue;
                }
                for ibp in 0..n {
                    let e_abp = table[ia * n + ibp];
                    let e_apbp = table[iap * n + ibp];
                    if e_abp.is_nan() || e_apbp.is_nan() {
                        continue;
                    }
                    let (_, s) = best_arrangement([e_ab, e_abp, e_apb, e_apbp]);
                    if s > best_s {
                        best_s = s;
                        best = ChshSettings {
                            a: values[ia],
                            a_prime: values[iap],
                            b: values[ib],
                            b_prime: values[ibp],
                        };
                    }
                }
            }
        }
    }
    if best_s == f64::NEG_INFINITY {
        return Err(Error::DegenerateNormalization);
    }

    // Coordinate descent around the grid optimum.
    let mut step = grid_step;
    let mut current = best;
    let mut current_s = chsh_objective(&current, cfg);
    while step >= 1e-9 {
        let mut improved = false;
        for coord in 0..4 {
            for dir in [-1.0, 1.0] {
                let mut candidate = current;
                let slot = match coord {
                    0 => &mut candidate.a,
                    1 => &mut candidate.a_prime,
                    2 => &mut candidate.b,
                    _ => &mut candidate.b_prime,
                };
                *slot += dir * step;
                let s = chsh_objective(&candidate, cfg);
                if s > current_s + 1e-15 {
                    current = candidate;
                    current_s = s;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    chsh_s(&current, cfg)
}

/// Which parameter a sweep drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanVariable {
    Zeta,
    Xi,
    Phi,
    Psi,
}

impl ScanVariable {
    /// The natural second variable for overlay curves: the opposite
    /// party's polarizer angle, or the opposite party's phase.
    pub fn partner(self) -> ScanVariable {
        match self {
            ScanVariable::Zeta => ScanVariable::Xi,
            ScanVariable::Xi => ScanVariable::Zeta,
            ScanVariable::Phi => ScanVariable::Psi,
            ScanVariable::Psi => ScanVariable::Phi,
        }
    }

    pub fn get(self, cfg: &BenchConfig) -> f64 {
        match self {
            ScanVariable::Zeta => cfg.zeta,
            ScanVariable::Xi => cfg.xi,
            ScanVariable::Phi => cfg.phi,
            ScanVariable::Psi => cfg.psi,
        }
    }

    pub fn set(self, cfg: &mut BenchConfig, value: f64) {
        match self {
            ScanVariable::Zeta => cfg.zeta = value,
            ScanVariable::Xi => cfg.xi = value,
            ScanVariable::Phi => cfg.phi = value,
            ScanVariable::Psi => cfg.psi = value,
        }
    }
}

impl std::fmt::Display for ScanVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScanVariable::Zeta => "zeta",
            ScanVariable::Xi => "xi",
            ScanVariable::Phi => "phi",
            ScanVariable::Psi => "psi",
        })
    }
}

impl std::str::FromStr for ScanVariable {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<ScanVariable, String> {
        match s {
            "zeta" => Ok(ScanVariable::Zeta),
            "xi" => Ok(ScanVariable::Xi),
            "phi" => Ok(ScanVariable::Phi),
            "psi" => Ok(ScanVariable::Psi),
            other => Err(format!(
                "unknown scan variable `{other}` (expected zeta, xi, phi, or psi)"
            )),
        }
    }
}

/// A sweep of one variable with optional overlay curves over its partner
/// variable. `stop` is exclusive: `steps` points cover [start, stop).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub variable: ScanVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    /// Partner-variable values, one overlay curve each. Empty means one
    /// curve at the base config's partner value.
    pub overlay_values: Vec<f64>,
    pub base: BenchConfig,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidScan(format!(
                "range bounds must be finite, got [{}, {})",
                self.start, self.stop
            )));
        }
        if self.start >= self.stop {
            return Err(Error::InvalidScan(format!(
                "empty range [{}, {})",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidScan(format!(
                "need at least 2 steps, got {}",
                self.steps
            )));
        }
        for v in &self.overlay_values {
            if !v.is_finite() {
                return Err(Error::InvalidScan(format!("non-finite overlay value {v}")));
            }
        }
        Ok(())
    }
}

/// One sweep point: the configuration with the four local intensities, the
/// four coincidence rates in units of I0^2, and the normalized correlation
/// of those four rates (NaN where all four vanish).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRecord {
    pub sweep_value: f64,
    pub overlay_value: f64,
    pub cfg: BenchConfig,
    pub intensities: [f64; 4],
    pub r14: f64,
    pub r23: f64,
    pub r13: f64,
    pub r24: f64,
    pub e_corr: f64,
}

/// Evaluates a sweep, overlay-major: all points of the first overlay
/// curve, then the next.
pub fn scan_fringe(spec: &ScanSpec) -> Result<Vec<CorrelationRecord>> {
    spec.validate()?;
    let overlays: Vec<f64> = if spec.overlay_values.is_empty() {
        vec![spec.variable.partner().get(&spec.base)]
    } else {
        spec.overlay_values.clone()
    };
    let span = spec.stop - spec.start;
    let mut records = Vec::with_capacity(overlays.len() * spec.steps);
    for &overlay in &overlays {
        for i in 0..spec.steps {
            let value = spec.start + span * (i as f64) / (spec.steps as f64);
            let mut cfg = spec.base;
            spec.variable.set(&mut cfg, value);
            spec.variable.partner().set(&mut cfg, overlay);
            let mut intensities = [0.0; 4];
            for (slot, det) in intensities.iter_mut().zip(1u8..=4) {
                *slot = local_intensity(det, &cfg)?;
            }
            let table = coincidence_table(&cfg)?;
            let e_corr = normalized_correlation(&table).unwrap_or(f64::NAN);
            records.push(CorrelationRecord {
                sweep_value: value,
                overlay_value: overlay,
                cfg,
                intensities,
                r14: table[0],
                r23: table[1],
                r13: table[2],
                r24: table[3],
                e_corr,
            });
        }
    }
    Ok(records)
}
