//! Run configuration: `key = value` file parsing, flag merging, defaults,
//! validation, and lossless rendering for round-trip tests.
//!
//! Angle values accept plain radians (`0.39269908`), a `deg` suffix
//! (`22.5 deg`), or rational-pi literals (`pi/8`, `3pi/4`, `-pi/2`, `2pi`).
//! Unknown keys and malformed numbers are reported with their line number
//! and abort before anything runs.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fransim_core::{BenchConfig, EvalMode, ScanSpec, ScanVariable};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    LocalFringe,
    CoincidenceScan,
    Chsh,
    Montecarlo,
    Selftest,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::LocalFringe => "local-fringe",
            Subcommand::CoincidenceScan => "coincidence-scan",
            Subcommand::Chsh => "chsh",
            Subcommand::Montecarlo => "montecarlo",
            Subcommand::Selftest => "selftest",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = String;
    fn from_str(s: &str) -> Result<Subcommand, String> {
        match s {
            "local-fringe" => Ok(Subcommand::LocalFringe),
            "coincidence-scan" => Ok(Subcommand::CoincidenceScan),
            "chsh" => Ok(Subcommand::Chsh),
            "montecarlo" => Ok(Subcommand::Montecarlo),
            "selftest" => Ok(Subcommand::Selftest),
            other => Err(format!("unknown subcommand '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    JsonSummary,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::JsonSummary => "json-summary",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<OutputFormat, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json-summary" => Ok(OutputFormat::JsonSummary),
            other => Err(format!(
                "unknown format '{other}' (expected 'csv' or 'json-summary')"
            )),
        }
    }
}

/// Raw parse of one config file: every field optional so flag overrides
/// and defaults can be layered on afterwards.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub subcommand: Option<Subcommand>,
    pub mode: Option<EvalMode>,
    pub zeta: Option<f64>,
    pub eta_p: Option<f64>,
    pub theta: Option<f64>,
    pub xi: Option<f64>,
    pub phi: Option<f64>,
    pub psi: Option<f64>,
    pub global_phase: Option<f64>,
    pub intensity_i0: Option<f64>,
    pub delta_f: Option<f64>,
    pub resolving_time: Option<f64>,
    pub mean_photon_number: Option<f64>,
    pub scan_variable: Option<ScanVariable>,
    pub scan_start: Option<f64>,
    pub scan_stop: Option<f64>,
    pub scan_steps: Option<usize>,
    pub scan_overlay: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub trials: Option<u64>,
    pub grid_step: Option<f64>,
}

/// A fully resolved run: subcommand, bench parameters, optional sweep,
/// and the output contract. Built by [`assemble`], which applies defaults
/// and validates everything before any computation starts.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub bench: BenchConfig,
    pub scan: Option<ScanSpec>,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub format: OutputFormat,
    pub trials: u64,
    pub grid_step: f64,
}

impl RunConfig {
    /// Where the CSV goes: the configured path, or `<subcommand>.csv`.
    pub fn effective_output(&self) -> PathBuf {
        self.output_path
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.subcommand)))
    }
}

/// Parses an angle literal: radians, `<x> deg`, or `[coef]pi[/denom]`.
pub fn parse_angle(raw: &str) -> Result<f64, String> {
    let s = raw.trim();
    if s.is_empty() {
        return Err("empty value".into());
    }
    if let Some(num) = s.strip_suffix("deg") {
        let num = num.trim();
        let v: f64 = num
            .parse()
            .map_err(|_| format!("expected a number before 'deg', got '{num}'"))?;
        return Ok(v.to_radians());
    }
    if let Some(idx) = s.find("pi") {
        let coef_str = s[..idx].trim();
        let rest = s[idx + 2..].trim();
        let coef: f64 = match coef_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c
                .parse()
                .map_err(|_| format!("expected a number before 'pi', got '{c}'"))?,
        };
        let denom: f64 = if rest.is_empty() {
            1.0
        } else if let Some(d) = rest.strip_prefix('/') {
            let d = d.trim();
            let v: f64 = d
                .parse()
                .map_err(|_| format!("expected a number after 'pi/', got '{d}'"))?;
            if v == 0.0 {
                return Err("division by zero in angle literal".into());
            }
            v
        } else {
            return Err(format!("unexpected text '{rest}' after 'pi'"));
        };
        return Ok(coef * PI / denom);
    }
    s.parse()
        .map_err(|_| format!("expected a number, got '{s}'"))
}

fn parse_number(raw: &str) -> Result<f64, String> {
    let s = raw.trim();
    s.parse()
        .map_err(|_| format!("expected a number, got '{s}'"))
}

fn parse_integer<T: FromStr>(raw: &str, what: &str) -> Result<T, String> {
    let s = raw.trim();
    s.parse().map_err(|_| format!("expected {what}, got '{s}'"))
}

/// Parses `key = value` lines into a [`FileConfig`]. `#` starts a comment;
/// blank lines are skipped; a repeated key keeps its last value.
pub fn parse_file_config(text: &str) -> Result<FileConfig, ConfigError> {
    let mut fc = FileConfig::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped
            .split_once('=')
            .ok_or_else(|| ConfigError::Malformed {
                line,
                message: format!("expected 'key = value', got '{stripped}'"),
            })?;
        let key = key.trim();
        let value = value.trim();
        let malformed = |message: String| ConfigError::Malformed { line, message };
        match key {
            "subcommand" => fc.subcommand = Some(value.parse().map_err(malformed)?),
            "mode" => fc.mode = Some(value.parse().map_err(malformed)?),
            "zeta" => fc.zeta = Some(parse_angle(value).map_err(malformed)?),
            "eta_p" => fc.eta_p = Some(parse_angle(value).map_err(malformed)?),
            "theta" => fc.theta = Some(parse_angle(value).map_err(malformed)?),
            "xi" => fc.xi = Some(parse_angle(value).map_err(malformed)?),
            "phi" => fc.phi = Some(parse_angle(value).map_err(malformed)?),
            "psi" => fc.psi = Some(parse_angle(value).map_err(malformed)?),
            "global_phase" => fc.global_phase = Some(parse_angle(value).map_err(malformed)?),
            "intensity_i0" => fc.intensity_i0 = Some(parse_number(value).map_err(malformed)?),
            "delta_f" => fc.delta_f = Some(parse_number(value).map_err(malformed)?),
            "resolving_time" => fc.resolving_time = Some(parse_number(value).map_err(malformed)?),
            "mean_photon_number" => {
                fc.mean_photon_number = Some(parse_number(value).map_err(malformed)?)
            }
            "scan.variable" => fc.scan_variable = Some(value.parse().map_err(malformed)?),
            "scan.start" => fc.scan_start = Some(parse_angle(value).map_err(malformed)?),
            "scan.stop" => fc.scan_stop = Some(parse_angle(value).map_err(malformed)?),
            "scan.steps" => {
                fc.scan_steps = Some(parse_integer(value, "a positive integer").map_err(malformed)?)
            }
            "scan.overlay" => {
                let values = value
                    .split(',')
                    .map(|v| parse_angle(v).map_err(&malformed))
                    .collect::<Result<Vec<f64>, ConfigError>>()?;
                fc.scan_overlay = Some(values);
            }
            "seed" => {
                fc.seed = Some(parse_integer(value, "an unsigned integer").map_err(malformed)?)
            }
            "trials" => {
                fc.trials = Some(parse_integer(value, "a positive integer").map_err(malformed)?)
            }
            "grid_step" => fc.grid_step = Some(parse_angle(value).map_err(malformed)?),
            "output" => fc.output = Some(PathBuf::from(value)),
            "format" => fc.format = Some(value.parse().map_err(malformed)?),
            other => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: other.to_string(),
                })
            }
        }
    }
    Ok(fc)
}

fn validation<E: fmt::Display>(e: E) -> ConfigError {
    ConfigError::Validation(e.to_string())
}

fn build_scan(
    sub: Subcommand,
    fc: &FileConfig,
    bench: &BenchConfig,
) -> Result<Option<ScanSpec>, ConfigError> {
    let scan_keys_present = fc.scan_variable.is_some()
        || fc.scan_start.is_some()
        || fc.scan_stop.is_some()
        || fc.scan_steps.is_some()
        || fc.scan_overlay.is_some();
    match sub {
        Subcommand::CoincidenceScan => {
            let spec = ScanSpec {
                variable: fc.scan_variable.unwrap_or(ScanVariable::Zeta),
                start: fc.scan_start.unwrap_or(0.0),
                stop: fc.scan_stop.unwrap_or(2.0 * PI),
                steps: fc.scan_steps.unwrap_or(720),
                overlay_values: fc.scan_overlay.clone().unwrap_or_default(),
                base: *bench,
            };
            spec.validate().map_err(validation)?;
            Ok(Some(spec))
        }
        Subcommand::LocalFringe => {
            let variable = fc.scan_variable.unwrap_or(ScanVariable::Phi);
            if !matches!(variable, ScanVariable::Phi | ScanVariable::Psi) {
                return Err(ConfigError::Validation(format!(
                    "local-fringe sweeps the arm phases; scan.variable must be phi or psi, got {variable}"
                )));
            }
            if fc.scan_overlay.is_some() {
                return Err(ConfigError::Validation(
                    "scan.overlay has no effect for local-fringe".into(),
                ));
            }
            let spec = ScanSpec {
                variable,
                start: fc.scan_start.unwrap_or(0.0),
                stop: fc.scan_stop.unwrap_or(2.0 * PI),
                steps: fc.scan_steps.unwrap_or(720),
                overlay_values: Vec::new(),
                base: *bench,
            };
            spec.validate().map_err(validation)?;
            Ok(Some(spec))
        }
        Subcommand::Chsh | Subcommand::Montecarlo | Subcommand::Selftest => {
            if scan_keys_present {
                return Err(ConfigError::Validation(format!(
                    "scan.* keys apply only to coincidence-scan and local-fringe, not {sub}"
                )));
            }
            Ok(None)
        }
    }
}

/// Applies defaults, builds the sweep for the subcommands that take one,
/// and validates every invariant. Nothing runs and nothing is written when
/// this fails.
pub fn assemble(sub: Subcommand, fc: &FileConfig) -> Result<RunConfig, ConfigError> {
    let d = BenchConfig::default();
    let bench = BenchConfig {
        zeta: fc.zeta.unwrap_or(d.zeta),
        eta_p: fc.eta_p.unwrap_or(d.eta_p),
        theta: fc.theta.unwrap_or(d.theta),
        xi: fc.xi.unwrap_or(d.xi),
        phi: fc.phi.unwrap_or(d.phi),
        psi: fc.psi.unwrap_or(d.psi),
        global_phase: fc.global_phase.unwrap_or(d.global_phase),
        intensity_i0: fc.intensity_i0.unwrap_or(d.intensity_i0),
        delta_f: fc.delta_f.unwrap_or(d.delta_f),
        resolving_time: fc.resolving_time.unwrap_or(d.resolving_time),
        mean_photon_number: fc.mean_photon_number.unwrap_or(d.mean_photon_number),
        mode: fc.mode.unwrap_or(d.mode),
    };
    bench.validate_heterodyne().map_err(validation)?;

    let scan = build_scan(sub, fc, &bench)?;

    let trials = fc.trials.unwrap_or(1_000_000);
    if trials == 0 {
        return Err(ConfigError::Validation("trials must be positive".into()));
    }
    let grid_step = fc.grid_step.unwrap_or(PI / 32.0);
    // partial_cmp keeps NaN on the rejection path.
    if grid_step.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !grid_step.is_finite() {
        return Err(ConfigError::Validation(format!(
            "grid_step must be positive and finite, got {grid_step}"
        )));
    }
    if grid_step >= FRAC_PI_4 {
        return Err(ConfigError::Validation(format!(
            "grid_step {grid_step} is too coarse for the search (must be below pi/4)"
        )));
    }

    Ok(RunConfig {
        subcommand: sub,
        bench,
        scan,
        output_path: fc.output.clone(),
        seed: fc.seed.unwrap_or(0),
        format: fc.format.unwrap_or_default(),
        trials,
        grid_step,
    })
}

/// One-step parse of a config file into a validated run. The subcommand
/// comes from the `subcommand` key (default: selftest); on the command
/// line the positional subcommand overrides it.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let fc = parse_file_config(text)?;
    let sub = fc.subcommand.unwrap_or(Subcommand::Selftest);
    assemble(sub, &fc)
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a run back to config-file text such that
/// `parse_config(render(cfg)) == cfg`. Floats are printed with 17
/// significant digits, which round-trips every f64 exactly.
pub fn render(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let b = &cfg.bench;
    out.push_str(&format!("subcommand = {}\n", cfg.subcommand));
    out.push_str(&format!("mode = {}\n", b.mode));
    out.push_str(&format!("zeta = {}\n", fmt_float(b.zeta)));
    out.push_str(&format!("eta_p = {}\n", fmt_float(b.eta_p)));
    out.push_str(&format!("theta = {}\n", fmt_float(b.theta)));
    out.push_str(&format!("xi = {}\n", fmt_float(b.xi)));
    out.push_str(&format!("phi = {}\n", fmt_float(b.phi)));
    out.push_str(&format!("psi = {}\n", fmt_float(b.psi)));
    out.push_str(&format!("global_phase = {}\n", fmt_float(b.global_phase)));
    out.push_str(&format!("intensity_i0 = {}\n", fmt_float(b.intensity_i0)));
    out.push_str(&format!("delta_f = {}\n", fmt_float(b.delta_f)));
    out.push_str(&format!(
        "resolving_time = {}\n",
        fmt_float(b.resolving_time)
    ));
    out.push_str(&format!(
        "mean_photon_number = {}\n",
        fmt_float(b.mean_photon_number)
    ));
    out.push_str(&format!("seed = {}\n", cfg.seed));
    out.push_str(&format!("trials = {}\n", cfg.trials));
    out.push_str(&format!("grid_step = {}\n", fmt_float(cfg.grid_step)));
    out.push_str(&format!("format = {}\n", cfg.format));
    if let Some(path) = &cfg.output_path {
        out.push_str(&format!("output = {}\n", path.display()));
    }
    if let Some(scan) = &cfg.scan {
        out.push_str(&format!("scan.variable = {}\n", scan.variable));
        out.push_str(&format!("scan.start = {}\n", fmt_float(scan.start)));
        out.push_str(&format!("scan.stop = {}\n", fmt_float(scan.stop)));
        out.push_str(&format!("scan.steps = {}\n", scan.steps));
        if !scan.overlay_values.is_empty() {
            let joined: Vec<String> = scan.overlay_values.iter().map(|&v| fmt_float(v)).collect();
            out.push_str(&format!("scan.overlay = {}\n", joined.join(", ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_8;

    #[test]
    fn rational_pi_literals_parse_exactly() {
        assert_eq!(parse_angle("pi/8").unwrap(), FRAC_PI_8);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
    }

    #[test]
    fn degrees_convert_to_radians() {
        let deg = parse_angle("22.5 deg").unwrap();
        assert!((deg - FRAC_PI_8).abs() < 1e-15);
        assert_eq!(parse_angle("180 deg").unwrap(), PI);
    }

    #[test]
    fn plain_radians_parse() {
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle("-1e-3").unwrap(), -1e-3);
    }

    #[test]
    fn bad_angles_are_rejected() {
        assert!(parse_angle("").is_err());
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("x deg").is_err());
        assert!(parse_angle("2x").is_err());
    }

    #[test]
    fn empty_file_produces_all_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.subcommand, Subcommand::Selftest);
        assert_eq!(cfg.bench, BenchConfig::default());
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.trials, 1_000_000);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert!(cfg.scan.is_none());
        assert!(cfg.output_path.is_none());
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let err = parse_file_config("zeta = 0\nzata = 1\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                line: 2,
                key: "zata".into()
            }
        );
    }

    #[test]
    fn malformed_number_names_line() {
        let err = parse_file_config("\n\nphi = three\n").unwrap_err();
        match err {
            ConfigError::Malformed { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let fc = parse_file_config("# full line comment\n\nzeta = pi/8 # trailing\n").unwrap();
        assert_eq!(fc.zeta, Some(FRAC_PI_8));
    }

    #[test]
    fn last_duplicate_key_wins() {
        let fc = parse_file_config("seed = 1\nseed = 2\n").unwrap();
        assert_eq!(fc.seed, Some(2));
    }

    #[test]
    fn slow_detector_fails_validation_before_running() {
        let text = "subcommand = montecarlo\ndelta_f = 1e8\nresolving_time = 2e-8\n";
        let err = parse_config(text).unwrap_err();
        assert!(matches!(err, ConfigError::Validation(_)));
    }

    #[test]
    fn scan_keys_on_chsh_are_rejected() {
        let err = parse_config("subcommand = chsh\nscan.steps = 10\n").unwrap_err();
        assert!(matches!(err, ConfigError::Validation(_)));
    }

    #[test]
    fn coincidence_scan_gets_default_sweep() {
        let cfg = parse_config("subcommand = coincidence-scan\n").unwrap();
        let scan = cfg.scan.unwrap();
        assert_eq!(scan.variable, ScanVariable::Zeta);
        assert_eq!(scan.steps, 720);
        assert_eq!(scan.start, 0.0);
        assert_eq!(scan.stop, 2.0 * PI);
        assert!(scan.overlay_values.is_empty());
    }

    #[test]
    fn overlay_list_parses_pi_literals() {
        let cfg =
            parse_config("subcommand = coincidence-scan\nscan.overlay = 0, pi/4, pi/2, 3pi/4\n")
                .unwrap();
        let overlays = cfg.scan.unwrap().overlay_values;
        assert_eq!(overlays.len(), 4);
        assert_eq!(overlays[1], PI / 4.0);
        assert_eq!(overlays[3], 3.0 * PI / 4.0);
    }

    #[test]
    fn local_fringe_rejects_polarizer_sweep() {
        let err = parse_config("subcommand = local-fringe\nscan.variable = zeta\n").unwrap_err();
        assert!(matches!(err, ConfigError::Validation(_)));
    }

    #[test]
    fn render_round_trips_a_scan_config() {
        let text = "subcommand = coincidence-scan\nmode = paper\nzeta = 0.31\nxi = pi/8\n\
                    scan.overlay = 0, pi/4\nseed = 9\nformat = json-summary\noutput = /tmp/x.csv\n";
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&render(&cfg)).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn render_round_trips_a_montecarlo_config() {
        let text = "subcommand = montecarlo\nmode = strict\nphi = pi\ntrials = 5000\nseed = 3\n";
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&render(&cfg)).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn grid_step_bounds_are_enforced() {
        assert!(parse_config("grid_step = pi/2\n").is_err());
        assert!(parse_config("grid_step = 0\n").is_err());
        assert!(parse_config("grid_step = pi/16\n").is_ok());
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(parse_config("trials = 0\n").is_err());
    }

    proptest::proptest! {
        #[test]
        fn render_parse_round_trips_any_valid_run(
            sub_idx in 0usize..5,
            zeta in 0.0..std::f64::consts::TAU,
            eta_p in 0.0..std::f64::consts::TAU,
            theta in 0.0..std::f64::consts::TAU,
            xi in 0.0..std::f64::consts::TAU,
            phi in 0.0..std::f64::consts::TAU,
            psi in 0.0..std::f64::consts::TAU,
            global_phase in 0.0..std::f64::consts::TAU,
            intensity_i0 in 0.1..5.0f64,
            mean_photon_number in 0.001..1.0f64,
            resolving_time in 1e-10..9e-9f64,
            seed in proptest::prelude::any::<u64>(),
            trials in 1u64..10_000_000,
            grid_step in 0.01..0.78f64,
            strict in proptest::prelude::any::<bool>(),
            json in proptest::prelude::any::<bool>(),
            with_output in proptest::prelude::any::<bool>(),
            overlays in proptest::collection::vec(0.0..std::f64::consts::TAU, 0..4),
        ) {
            let sub = [
                Subcommand::LocalFringe,
                Subcommand::CoincidenceScan,
                Subcommand::Chsh,
                Subcommand::Montecarlo,
                Subcommand::Selftest,
            ][sub_idx];
            let fc = FileConfig {
                mode: Some(if strict { EvalMode::Strict } else { EvalMode::Paper }),
                zeta: Some(zeta),
                eta_p: Some(eta_p),
                theta: Some(theta),
                xi: Some(xi),
                phi: Some(phi),
                psi: Some(psi),
                global_phase: Some(global_phase),
                intensity_i0: Some(intensity_i0),
                mean_photon_number: Some(mean_photon_number),
                resolving_time: Some(resolving_time),
                seed: Some(seed),
                trials: Some(trials),
                grid_step: Some(grid_step),
                format: Some(if json { OutputFormat::JsonSummary } else { OutputFormat::Csv }),
                output: with_output.then(|| PathBuf::from("/tmp/out.csv")),
                scan_overlay: (sub == Subcommand::CoincidenceScan && !overlays.is_empty())
                    .then(|| overlays.clone()),
                ..FileConfig::default()
            };
            let cfg = assemble(sub, &fc).unwrap();
            let again = parse_config(&render(&cfg)).unwrap();
            proptest::prop_assert_eq!(cfg, again);
        }
    }
}
