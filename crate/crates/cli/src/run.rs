//! Subcommand execution. Every run computes its full CSV into memory and
//! writes the output file in one shot, so a failed run never leaves a
//! partial file behind. JSON summaries go to stdout.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};
use std::path::Path;

use fransim_core::bench::{closed_form_detectors, propagate_elementwise};
use fransim_core::correlation::{
    chsh_s, coincidence_table, correlation_e, local_intensity, local_visibility, optimize_chsh,
    orthogonal_port_config, scan_fringe,
};
use fransim_core::montecarlo::{estimate_e, estimate_r, estimate_s, generate_trials, McEstimate};
use fransim_core::polfield::{hwp, qwp};
use fransim_core::{BenchConfig, ChshResult, ChshSettings, CoincidencePair, CorrelationRecord};

use crate::config::{parse_config, render, OutputFormat, RunConfig, Subcommand};
use crate::summary::{
    BellVerdict, CheckOutcome, ChshSummary, CurveSummary, EstimateSummary, FringeSummary,
    MonteCarloSummary, ScanSummary, SelftestSummary,
};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// Configuration or output-path problems: exit code 1.
    #[error("{0}")]
    Validation(String),
    /// Failures inside a run (degenerate distributions, no statistics,
    /// failed self-checks): exit code 2.
    #[error("{0}")]
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 1,
            RunError::Runtime(_) => 2,
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Runtime(e.to_string())
}

/// 17 significant digits: every f64 round-trips exactly.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_output(path: &Path, contents: &str) -> Result<(), RunError> {
    std::fs::write(path, contents)
        .map_err(|e| RunError::Validation(format!("cannot write output '{}': {e}", path.display())))
}

fn print_summary<T: serde::Serialize>(summary: &T) {
    // Serialization of these plain structs cannot fail.
    println!("{}", serde_json::to_string_pretty(summary).unwrap());
}

const BELL_GUARD: f64 = 1e-9;

fn bell_verdict(result: &ChshResult) -> BellVerdict {
    let nonlocal = result.s.abs() / (2.0 * SQRT_2);
    BellVerdict {
        s: result.s,
        a: result.settings.a,
        a_prime: result.settings.a_prime,
        b: result.settings.b,
        b_prime: result.settings.b_prime,
        sign_arrangement: result.sign_arrangement.to_string(),
        nonlocal_visibility: nonlocal,
        bell_violating: nonlocal > FRAC_1_SQRT_2 + BELL_GUARD,
    }
}

pub fn execute(cfg: &RunConfig) -> Result<(), RunError> {
    match cfg.subcommand {
        Subcommand::LocalFringe => run_local_fringe(cfg),
        Subcommand::CoincidenceScan => run_coincidence_scan(cfg),
        Subcommand::Chsh => run_chsh(cfg),
        Subcommand::Montecarlo => run_montecarlo(cfg),
        Subcommand::Selftest => run_selftest(cfg),
    }
}

/// Sweeps a common phase axis: at each step both arm phases are set to
/// the swept value, so each detector shows its fringe against its own
/// interferometer phase on one shared column.
fn run_local_fringe(cfg: &RunConfig) -> Result<(), RunError> {
    let scan = cfg
        .scan
        .as_ref()
        .expect("local-fringe always carries a sweep");
    let mut csv = String::from("phase_rad,I1,I2,I3,I4\n");
    let span = scan.stop - scan.start;
    for k in 0..scan.steps {
        let phase = scan.start + span * (k as f64) / (scan.steps as f64);
        let mut b = cfg.bench;
        b.phi = phase;
        b.psi = phase;
        let mut row = fmt(phase);
        for det in 1..=4u8 {
            let i = local_intensity(det, &b).map_err(runtime)?;
            row.push(',');
            row.push_str(&fmt(i));
        }
        row.push('\n');
        csv.push_str(&row);
    }
    write_output(&cfg.effective_output(), &csv)?;

    if cfg.format == OutputFormat::JsonSummary {
        let mut visibilities = [0.0; 4];
        for det in 1..=4u8 {
            visibilities[det as usize - 1] = local_visibility(det, &cfg.bench).map_err(runtime)?;
        }
        print_summary(&FringeSummary {
            subcommand: "local-fringe",
            mode: cfg.bench.mode.to_string(),
            visibilities,
        });
    }
    Ok(())
}

fn run_coincidence_scan(cfg: &RunConfig) -> Result<(), RunError> {
    let scan = cfg
        .scan
        .as_ref()
        .expect("coincidence-scan always carries a sweep");
    let records = scan_fringe(scan).map_err(runtime)?;
    let i0sq = cfg.bench.intensity_i0 * cfg.bench.intensity_i0;

    let mut csv = String::from(
        "sweep_value_rad,overlay_value_rad,R14_norm,R23_norm,R13_norm,R24_norm,E_corr\n",
    );
    for rec in &records {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(rec.sweep_value),
            fmt(rec.overlay_value),
            fmt(rec.r14 / i0sq),
            fmt(rec.r23 / i0sq),
            fmt(rec.r13 / i0sq),
            fmt(rec.r24 / i0sq),
            fmt(rec.e_corr),
        ));
    }
    write_output(&cfg.effective_output(), &csv)?;

    if cfg.format == OutputFormat::JsonSummary {
        let chsh = optimize_chsh(&cfg.bench, cfg.grid_step).map_err(runtime)?;
        let curves = records
            .chunks(scan.steps)
            .map(|chunk| curve_summary(chunk, i0sq))
            .collect();
        print_summary(&ScanSummary {
            subcommand: "coincidence-scan",
            mode: cfg.bench.mode.to_string(),
            swept: scan.variable.to_string(),
            steps: scan.steps,
            curves,
            chsh: bell_verdict(&chsh),
            max_engine_deviation: engine_deviation(&records)?,
        });
    }
    Ok(())
}

fn curve_summary(records: &[CorrelationRecord], i0sq: f64) -> CurveSummary {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for rec in records {
        min = min.min(rec.r14);
        max = max.max(rec.r14);
    }
    let denom = max + min;
    CurveSummary {
        overlay_value_rad: records[0].overlay_value,
        visibility: if denom > 0.0 {
            Some((max - min) / denom)
        } else {
            None
        },
        r14_min_norm: min / i0sq,
        r14_max_norm: max / i0sq,
    }
}

/// Samples every 16th scan point and compares the two propagation routes.
fn engine_deviation(records: &[CorrelationRecord]) -> Result<f64, RunError> {
    let mut worst = 0.0f64;
    for rec in records.iter().step_by(16) {
        let closed = closed_form_detectors(&rec.cfg).map_err(runtime)?;
        let chained = propagate_elementwise(&rec.cfg).map_err(runtime)?;
        for k in 0..4 {
            worst = worst.max(closed.fields[k].max_mode_distance(&chained.fields[k]));
        }
    }
    Ok(worst)
}

fn run_chsh(cfg: &RunConfig) -> Result<(), RunError> {
    let result = optimize_chsh(&cfg.bench, cfg.grid_step).map_err(runtime)?;
    let mut csv = String::from("a,a_prime,b,b_prime,E_ab,E_abp,E_apb,E_apbp,sign_arrangement,S\n");
    csv.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        fmt(result.settings.a),
        fmt(result.settings.a_prime),
        fmt(result.settings.b),
        fmt(result.settings.b_prime),
        fmt(result.correlations[0]),
        fmt(result.correlations[1]),
        fmt(result.correlations[2]),
        fmt(result.correlations[3]),
        result.sign_arrangement,
        fmt(result.s),
    ));
    write_output(&cfg.effective_output(), &csv)?;

    if cfg.format == OutputFormat::JsonSummary {
        print_summary(&ChshSummary {
            subcommand: "chsh",
            mode: cfg.bench.mode.to_string(),
            grid_step_rad: cfg.grid_step,
            correlations: result.correlations,
            verdict: bell_verdict(&result),
        });
    }
    Ok(())
}

/// The standard settings under which the paper-mode correlation reaches
/// its ceiling at zero interferometer phases.
pub fn canonical_settings() -> ChshSettings {
    ChshSettings {
        a: 0.0,
        a_prime: FRAC_PI_4,
        b: -FRAC_PI_8,
        b_prime: -3.0 * FRAC_PI_8,
    }
}

struct McRow {
    quantity: String,
    params: String,
    analytic: f64,
    est: McEstimate,
}

fn run_montecarlo(cfg: &RunConfig) -> Result<(), RunError> {
    let b = &cfg.bench;
    let (n, seed) = (cfg.trials, cfg.seed);
    let mut rows: Vec<McRow> = Vec::new();

    let table = coincidence_table(b).map_err(runtime)?;
    let sum: f64 = table.iter().sum();
    for pair in CoincidencePair::ALL {
        let est = estimate_r(pair, b, n, seed).map_err(runtime)?;
        let (alice, bob) = pair.detectors();
        rows.push(McRow {
            quantity: format!("{}_norm", pair.label().to_lowercase()),
            params: format!("alice={alice};bob={bob}"),
            analytic: table[pair.index()] / sum,
            est,
        });
    }

    let analytic_e = correlation_e(b.zeta, b.xi, b).map_err(runtime)?;
    let est_e = estimate_e(b.zeta, b.xi, b, n, seed).map_err(runtime)?;
    rows.push(McRow {
        quantity: "e_corr".into(),
        params: format!("a={};b={}", fmt(b.zeta), fmt(b.xi)),
        analytic: analytic_e,
        est: est_e,
    });

    let settings = canonical_settings();
    let analytic_s = chsh_s(&settings, b).map_err(runtime)?.s;
    let est_s = estimate_s(&settings, b, n, seed).map_err(runtime)?;
    rows.push(McRow {
        quantity: "s_chsh".into(),
        params: format!(
            "a={};a_prime={};b={};b_prime={}",
            fmt(settings.a),
            fmt(settings.a_prime),
            fmt(settings.b),
            fmt(settings.b_prime)
        ),
        analytic: analytic_s,
        est: est_s,
    });

    let mut csv = String::from("quantity,params,analytic,estimate,stderr,n_trials,n_gated\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.quantity,
            row.params,
            fmt(row.analytic),
            fmt(row.est.value),
            fmt(row.est.stderr),
            row.est.n_trials,
            row.est.n_gated,
        ));
    }
    write_output(&cfg.effective_output(), &csv)?;

    if cfg.format == OutputFormat::JsonSummary {
        let summary_rows: Vec<EstimateSummary> = rows
            .iter()
            .map(|r| EstimateSummary {
                quantity: r.quantity.clone(),
                analytic: r.analytic,
                estimate: r.est.value,
                stderr: r.est.stderr,
                sigmas_off: (r.est.value - r.analytic).abs() / r.est.stderr,
                n_trials: r.est.n_trials,
                n_gated: r.est.n_gated,
            })
            .collect();
        let all_ok = summary_rows.iter().all(|r| r.sigmas_off <= 5.0);
        print_summary(&MonteCarloSummary {
            subcommand: "montecarlo",
            mode: b.mode.to_string(),
            seed,
            rows: summary_rows,
            all_within_five_sigma: all_ok,
        });
    }
    Ok(())
}

/// Deterministic angle sequence for self checks: the golden-ratio walk
/// fills [0, 2 pi) without clustering and needs no RNG dependency.
fn golden_angles(n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(|k| {
        let frac = (k as f64 * 0.618_033_988_749_894_9).fract();
        frac * 2.0 * PI
    })
}

type Check = (&'static str, fn() -> Result<(), String>);

fn check_wave_plate_unitarity() -> Result<(), String> {
    for a in golden_angles(64) {
        for plate in [hwp(a), qwp(a)] {
            let d = plate.map_err(|e| e.to_string())?.unitarity_defect();
            if d > 1e-12 {
                return Err(format!("unitarity defect {d:.3e} at angle {a}"));
            }
        }
    }
    Ok(())
}

fn check_chain_agreement() -> Result<(), String> {
    let axis = [0.0, 2.1, 4.2];
    for &zeta in &axis {
        for &xi in &axis {
            for &phi in &axis {
                for &psi in &axis {
                    let cfg = BenchConfig {
                        zeta,
                        xi,
                        phi,
                        psi,
                        eta_p: 1.3,
                        theta: 0.7,
                        ..BenchConfig::default()
                    };
                    let closed = closed_form_detectors(&cfg).map_err(|e| e.to_string())?;
                    let chained = propagate_elementwise(&cfg).map_err(|e| e.to_string())?;
                    for k in 0..4 {
                        let d = closed.fields[k].max_mode_distance(&chained.fields[k]);
                        if d > 1e-12 {
                            return Err(format!("routes disagree by {d:.3e}"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_fringe_laws() -> Result<(), String> {
    let mut angles = golden_angles(192);
    for _ in 0..32 {
        let cfg = BenchConfig {
            zeta: angles.next().unwrap(),
            eta_p: angles.next().unwrap(),
            theta: angles.next().unwrap(),
            xi: angles.next().unwrap(),
            phi: angles.next().unwrap() / 2.0,
            psi: angles.next().unwrap() / 2.0,
            ..BenchConfig::default()
        };
        let plane = closed_form_detectors(&cfg).map_err(|e| e.to_string())?;
        for det in 1..=4u8 {
            let law = local_intensity(det, &cfg).map_err(|e| e.to_string())?;
            let field = plane.detector(det).map_err(|e| e.to_string())?.intensity();
            if (law - field).abs() > 1e-12 {
                return Err(format!(
                    "detector {det} fringe law off by {:.3e}",
                    law - field
                ));
            }
        }
    }
    Ok(())
}

fn check_like_pair_rates() -> Result<(), String> {
    let mut angles = golden_angles(128);
    for _ in 0..64 {
        let a = angles.next().unwrap();
        let b = angles.next().unwrap();
        let ports = orthogonal_port_config(a, b, &BenchConfig::default());
        let table = coincidence_table(&ports).map_err(|e| e.to_string())?;
        if (table[0] - table[1]).abs() > 1e-10 {
            return Err(format!(
                "like pairs differ by {:.3e} at a={a} b={b}",
                table[0] - table[1]
            ));
        }
    }
    Ok(())
}

fn check_rate_normalization() -> Result<(), String> {
    let mut angles = golden_angles(128);
    for _ in 0..64 {
        let a = angles.next().unwrap();
        let b = angles.next().unwrap();
        let ports = orthogonal_port_config(a, b, &BenchConfig::default());
        let sum: f64 = coincidence_table(&ports)
            .map_err(|e| e.to_string())?
            .iter()
            .sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(format!("rate sum {sum} drifts from I0^2 at a={a} b={b}"));
        }
    }
    Ok(())
}

fn check_strict_factorization() -> Result<(), String> {
    let base = BenchConfig {
        mode: fransim_core::EvalMode::Strict,
        phi: PI,
        ..BenchConfig::default()
    };
    let r = |zeta: f64, xi: f64| -> Result<f64, String> {
        let cfg = BenchConfig { zeta, xi, ..base };
        fransim_core::correlation::coincidence(CoincidencePair::D14, &cfg)
            .map_err(|e| e.to_string())
    };
    let mut angles = golden_angles(128);
    for _ in 0..32 {
        let (z1, z2) = (angles.next().unwrap(), angles.next().unwrap());
        let (x1, x2) = (angles.next().unwrap(), angles.next().unwrap());
        let det = r(z1, x1)? * r(z2, x2)? - r(z1, x2)? * r(z2, x1)?;
        let scale = r(z1, x1)? * r(z2, x2)? + r(z1, x2)? * r(z2, x1)? + 1e-300;
        if det.abs() / scale > 1e-12 {
            return Err(format!("separability determinant {det:.3e}"));
        }
    }
    Ok(())
}

fn check_chsh_canonical() -> Result<(), String> {
    let result =
        chsh_s(&canonical_settings(), &BenchConfig::default()).map_err(|e| e.to_string())?;
    let expect = 2.0 * SQRT_2;
    if (result.s - expect).abs() > 1e-12 {
        return Err(format!("S = {} at the canonical settings", result.s));
    }
    Ok(())
}

fn check_chsh_search_paper() -> Result<(), String> {
    let result = optimize_chsh(&BenchConfig::default(), PI / 16.0).map_err(|e| e.to_string())?;
    if (result.s - 2.0 * SQRT_2).abs() > 1e-6 {
        return Err(format!("search found S = {}", result.s));
    }
    Ok(())
}

fn check_chsh_search_strict() -> Result<(), String> {
    let cfg = BenchConfig {
        mode: fransim_core::EvalMode::Strict,
        phi: PI,
        ..BenchConfig::default()
    };
    let result = optimize_chsh(&cfg, PI / 16.0).map_err(|e| e.to_string())?;
    if result.s > 2.0 + 1e-6 {
        return Err(format!("factorized rates reached S = {}", result.s));
    }
    Ok(())
}

fn check_sampler_determinism() -> Result<(), String> {
    let cfg = BenchConfig::default();
    let a = estimate_e(0.0, -FRAC_PI_8, &cfg, 20_000, 5).map_err(|e| e.to_string())?;
    let b = estimate_e(0.0, -FRAC_PI_8, &cfg, 20_000, 5).map_err(|e| e.to_string())?;
    if a.value.to_bits() != b.value.to_bits() || a.n_gated != b.n_gated {
        return Err("same seed produced different estimates".into());
    }
    Ok(())
}

fn check_sampler_oracle() -> Result<(), String> {
    let cfg = BenchConfig::default();
    let est = estimate_e(0.0, -FRAC_PI_8, &cfg, 50_000, 5).map_err(|e| e.to_string())?;
    let off = (est.value - FRAC_1_SQRT_2).abs();
    if off > 5.0 * est.stderr {
        return Err(format!(
            "estimate {off:.3e} from analytic, stderr {}",
            est.stderr
        ));
    }
    Ok(())
}

fn check_gate_fraction() -> Result<(), String> {
    let n = 50_000u64;
    let trials = generate_trials(&BenchConfig::default(), n, 2).map_err(|e| e.to_string())?;
    let split = trials.iter().filter(|t| t.gated).count() as f64 / n as f64;
    let sigma = (0.25 / n as f64).sqrt();
    if (split - 0.5).abs() > 5.0 * sigma {
        return Err(format!("gated fraction {split}"));
    }
    Ok(())
}

fn check_config_round_trip() -> Result<(), String> {
    for text in [
        "subcommand = coincidence-scan\nzeta = 0.31\nscan.overlay = 0, pi/4\nseed = 4\n",
        "subcommand = montecarlo\nmode = strict\nphi = pi\ntrials = 1000\n",
    ] {
        let cfg = parse_config(text).map_err(|e| e.to_string())?;
        let again = parse_config(&render(&cfg)).map_err(|e| e.to_string())?;
        if cfg != again {
            return Err("render/parse round trip altered the config".into());
        }
    }
    Ok(())
}

fn run_selftest(cfg: &RunConfig) -> Result<(), RunError> {
    let checks: [Check; 13] = [
        ("wave_plate_unitarity", check_wave_plate_unitarity),
        ("chain_agreement", check_chain_agreement),
        ("fringe_laws", check_fringe_laws),
        ("like_pair_rates", check_like_pair_rates),
        ("rate_normalization", check_rate_normalization),
        ("strict_factorization", check_strict_factorization),
        ("chsh_canonical", check_chsh_canonical),
        ("chsh_search_paper", check_chsh_search_paper),
        ("chsh_search_strict", check_chsh_search_strict),
        ("sampler_determinism", check_sampler_determinism),
        ("sampler_oracle", check_sampler_oracle),
        ("gate_fraction", check_gate_fraction),
        ("config_round_trip", check_config_round_trip),
    ];

    let mut outcomes = Vec::with_capacity(checks.len());
    let mut failures = 0usize;
    for (name, check) in checks {
        match check() {
            Ok(()) => {
                println!("ok {name}");
                outcomes.push(CheckOutcome {
                    name,
                    ok: true,
                    detail: None,
                });
            }
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failures += 1;
                outcomes.push(CheckOutcome {
                    name,
                    ok: false,
                    detail: Some(detail),
                });
            }
        }
    }

    let total = outcomes.len();
    if cfg.format == OutputFormat::JsonSummary {
        print_summary(&SelftestSummary {
            subcommand: "selftest",
            all_ok: failures == 0,
            checks: outcomes,
        });
    }

    if failures > 0 {
        return Err(RunError::Runtime(format!(
            "selftest failed {failures} of {total} checks"
        )));
    }
    Ok(())
}
