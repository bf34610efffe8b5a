//! The two-party table layout: source preparation, the two folded
//! interferometers, the eraser polarizers, and the four detector planes.
//!
//! Detector fields are produced two ways, by chaining the optical elements
//! one by one and by evaluating the closed-form output expressions directly.
//! The two routes must agree mode-wise to 1e-12; the equivalence test suite
//! holds them to that.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polfield::{
    beamsplitter, hwp, pbs, phase_shift, polarizer, FieldState, ModeLabel, Polarization, Port,
};

/// How a coincidence amplitude is assembled from the two local detector
/// amplitudes.
///
/// * `Paper`: one shared sign template for every detector pair (every
///   cross term enters with a minus), which makes the four pair rates
///   inseparable and supports the full Bell violation.
/// * `Strict`: the literal scalar product of the two local amplitudes, so
///   every pair rate factorizes into the product of the two local
///   intensities and no violation is possible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Paper,
    Strict,
}

impl std::fmt::Display for EvalMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvalMode::Paper => "paper",
            EvalMode::Strict => "strict",
        })
    }
}

impl std::str::FromStr for EvalMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<EvalMode, String> {
        match s {
            "paper" => Ok(EvalMode::Paper),
            "strict" => Ok(EvalMode::Strict),
            other => Err(format!(
                "unknown mode `{other}` (expected `paper` or `strict`)"
            )),
        }
    }
}

/// Every free parameter of the bench.
///
/// Angles are radians. `zeta`, `eta_p`, `theta`, `xi` are the polarizer
/// angles in front of detectors 1..4 (`eta_p` is detector 2's polarizer,
/// named with a suffix to keep it apart from the global phase). `phi` and
/// `psi` are the internal phases of the first and second party's
/// interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub zeta: f64,
    pub eta_p: f64,
    pub theta: f64,
    pub xi: f64,
    pub phi: f64,
    pub psi: f64,
    pub global_phase: f64,
    /// Source intensity I0 = |E0|^2, arbitrary units.
    pub intensity_i0: f64,
    /// Frequency offset between the two tags, Hz.
    pub delta_f: f64,
    /// Detector resolving time, seconds.
    pub resolving_time: f64,
    pub mode: EvalMode,
    /// Mean photon pairs per coherence window.
    pub mean_photon_number: f64,
}

impl Default for BenchConfig {
    fn default() -> BenchConfig {
        BenchConfig {
            zeta: 0.0,
            eta_p: 0.0,
            theta: 0.0,
            xi: 0.0,
            phi: 0.0,
            psi: 0.0,
            global_phase: 0.0,
            intensity_i0: 1.0,
            delta_f: 1.0e8,
            resolving_time: 1.0e-9,
            mode: EvalMode::Paper,
            mean_photon_number: 0.04,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("zeta", self.zeta),
            ("eta_p", self.eta_p),
            ("theta", self.theta),
            ("xi", self.xi),
            ("phi", self.phi),
            ("psi", self.psi),
            ("global_phase", self.global_phase),
            ("intensity_i0", self.intensity_i0),
            ("delta_f", self.delta_f),
            ("resolving_time", self.resolving_time),
            ("mean_photon_number", self.mean_photon_number),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        if self.intensity_i0 < 0.0 {
            return Err(Error::InvalidParameter {
                name: "intensity_i0",
                reason: format!("must be nonnegative, got {}", self.intensity_i0),
            });
        }
        if self.delta_f <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "delta_f",
                reason: format!("must be positive, got {}", self.delta_f),
            });
        }
        if self.resolving_time <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "resolving_time",
                reason: format!("must be positive, got {}", self.resolving_time),
            });
        }
        if self.mean_photon_number < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mean_photon_number",
                reason: format!("must be nonnegative, got {}", self.mean_photon_number),
            });
        }
        Ok(())
    }

    /// `validate` plus the timing requirement for beat-resolved detection:
    /// the detector must resolve one beat period, i.e.
    /// resolving_time < 1/delta_f.
    pub fn validate_heterodyne(&self) -> Result<()> {
        self.validate()?;
        let beat = self.beat_period();
        if self.resolving_time >= beat {
            return Err(Error::GateInoperative {
                resolving_time: self.resolving_time,
                beat_period: beat,
            });
        }
        Ok(())
    }

    /// One beat period, 1/delta_f.
    pub fn beat_period(&self) -> f64 {
        1.0 / self.delta_f
    }

    /// E0 = sqrt(I0).
    pub fn field_amplitude(&self) -> f64 {
        self.intensity_i0.sqrt()
    }
}

pub const PORT_ALICE_SOURCE: Port = Port("alice/source");
pub const PORT_ALICE_ARM_V: Port = Port("alice/arm_v");
pub const PORT_ALICE_D1: Port = Port("alice/d1");
pub const PORT_ALICE_D2: Port = Port("alice/d2");
pub const PORT_BOB_SOURCE: Port = Port("bob/source");
pub const PORT_BOB_ARM_V: Port = Port("bob/arm_v");
pub const PORT_BOB_D3: Port = Port("bob/d3");
pub const PORT_BOB_D4: Port = Port("bob/d4");

/// The four detector-plane fields, detectors 1 and 2 on the first party's
/// side, 3 and 4 on the second party's.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorPlane {
    pub fields: [FieldState; 4],
}

impl DetectorPlane {
    /// Field at detector `k` in 1..=4.
    pub fn detector(&self, k: u8) -> Result<&FieldState> {
        match k {
            1..=4 => Ok(&self.fields[(k - 1) as usize]),
            _ => Err(Error::InvalidParameter {
                name: "detector",
                reason: format!("must be 1..=4, got {k}"),
            }),
        }
    }
}

fn prefactors(cfg: &BenchConfig) -> (Complex64, Complex64) {
    let e0 = cfg.field_amplitude();
    let scale = e0 * std::f64::consts::FRAC_1_SQRT_2;
    let pref_a = Complex64::from_polar(scale, cfg.global_phase);
    let pref_b = Complex64::new(scale, 0.0);
    (pref_a, pref_b)
}

/// Closed-form fields at the four outputs of the two interferometers,
/// before any polarizer. Order: (A, B) on the first party's side, (C, D)
/// on the second party's.
///
/// E_A = (E0/sqrt2) e^{i eta} (H+ - V+ e^{i phi})
/// E_B = (E0/sqrt2) e^{i eta} i (H+ + V+ e^{i phi})
/// E_C = (E0/sqrt2) (H- - V- e^{i psi})
/// E_D = (E0/sqrt2) i (H- + V- e^{i psi})
pub fn closed_form_pre_polarizer(cfg: &BenchConfig) -> Result<[FieldState; 4]> {
    cfg.validate()?;
    let (pref_a, pref_b) = prefactors(cfg);
    let i = Complex64::I;
    let eiphi = Complex64::from_polar(1.0, cfg.phi);
    let eipsi = Complex64::from_polar(1.0, cfg.psi);

    let mut e_a = FieldState::zero(PORT_ALICE_D1);
    e_a.set_amplitude(ModeLabel::H_PLUS, pref_a);
    e_a.set_amplitude(ModeLabel::V_PLUS, -pref_a * eiphi);

    let mut e_b = FieldState::zero(PORT_ALICE_D2);
    e_b.set_amplitude(ModeLabel::H_PLUS, i * pref_a);
    e_b.set_amplitude(ModeLabel::V_PLUS, i * pref_a * eiphi);

    let mut e_c = FieldState::zero(PORT_BOB_D3);
    e_c.set_amplitude(ModeLabel::H_MINUS, pref_b);
    e_c.set_amplitude(ModeLabel::V_MINUS, -pref_b * eipsi);

    let mut e_d = FieldState::zero(PORT_BOB_D4);
    e_d.set_amplitude(ModeLabel::H_MINUS, i * pref_b);
    e_d.set_amplitude(ModeLabel::V_MINUS, i * pref_b * eipsi);

    Ok([e_a, e_b, e_c, e_d])
}

/// Closed-form detector-plane fields after the eraser polarizers.
///
/// Each field is the pre-polarizer output projected onto its polarizer's
/// pass axis: a scalar amplitude p_k along the unit vector
/// (cos a_k, sin a_k), e.g. p_1 = (E0/sqrt2) e^{i eta}
/// (cos zeta - sin zeta e^{i phi}).
pub fn closed_form_detectors(cfg: &BenchConfig) -> Result<DetectorPlane> {
    cfg.validate()?;
    let (pref_a, pref_b) = prefactors(cfg);
    let i = Complex64::I;
    let eiphi = Complex64::from_polar(1.0, cfg.phi);
    let eipsi = Complex64::from_polar(1.0, cfg.psi);

    let along = |port: Port, angle: f64, scalar: Complex64, tag_h: ModeLabel, tag_v: ModeLabel| {
        let mut f = FieldState::zero(port);
        f.set_amplitude(tag_h, scalar * angle.cos());
        f.set_amplitude(tag_v, scalar * angle.sin());
        f
    };

    let p1 = pref_a * (Complex64::new(cfg.zeta.cos(), 0.0) - eiphi * cfg.zeta.sin());
    let p2 = i * pref_a * (Complex64::new(cfg.eta_p.cos(), 0.0) + eiphi * cfg.eta_p.sin());
    let p3 = pref_b * (Complex64::new(cfg.theta.cos(), 0.0) - eipsi * cfg.theta.sin());
    let p4 = i * pref_b * (Complex64::new(cfg.xi.cos(), 0.0) + eipsi * cfg.xi.sin());

    Ok(DetectorPlane {
        fields: [
            along(
                PORT_ALICE_D1,
                cfg.zeta,
                p1,
                ModeLabel::H_PLUS,
                ModeLabel::V_PLUS,
            ),
            along(
                PORT_ALICE_D2,
                cfg.eta_p,
                p2,
                ModeLabel::H_PLUS,
                ModeLabel::V_PLUS,
            ),
            along(
                PORT_BOB_D3,
                cfg.theta,
                p3,
                ModeLabel::H_MINUS,
                ModeLabel::V_MINUS,
            ),
            along(
                PORT_BOB_D4,
                cfg.xi,
                p4,
                ModeLabel::H_MINUS,
                ModeLabel::V_MINUS,
            ),
        ],
    })
}

/// One folded interferometer: split H/V on a polarizing splitter, delay the
/// V arm by `phase`, recombine on a symmetric splitter.
fn fold_interferometer(
    input: &FieldState,
    phase: f64,
    arm_v_port: Port,
) -> Result<(FieldState, FieldState)> {
    let (arm_h, arm_v) = pbs(input);
    let arm_v = arm_v.at_port(arm_v_port);
    let arm_v = phase_shift(&arm_v, phase, |m| m.polarization == Polarization::V);
    beamsplitter(&arm_h, &arm_v)
}

/// Detector-plane fields computed by chaining the individual elements in
/// table order: source, half-wave plate, interferometer, polarizer.
///
/// Calibration of the chain against the closed forms: the first party's
/// source is sqrt(2) E0 in the H/f+ mode and its plate sits at 22.5 deg,
/// giving E0 (H + V) at the interferometer input; the second party's source
/// is sqrt(2) E0 in V/f- and its plate sits at 67.5 deg, which maps V to
/// (H + V)/sqrt(2) with both signs positive. Any other plate angle would
/// reproduce the same intensities but not the amplitude signs the closed
/// forms commit to.
pub fn propagate_elementwise(cfg: &BenchConfig) -> Result<DetectorPlane> {
    cfg.validate()?;
    let e0 = cfg.field_amplitude();
    let src_amp = Complex64::new(e0 * std::f64::consts::SQRT_2, 0.0);

    // First party: H/f+ photon, global phase on this side only.
    let src_a = FieldState::single_mode(
        PORT_ALICE_SOURCE,
        ModeLabel::H_PLUS,
        src_amp * Complex64::from_polar(1.0, cfg.global_phase),
    );
    let prepared_a = src_a.apply_jones(&hwp(std::f64::consts::FRAC_PI_8)?);
    let (e_a, e_b) = fold_interferometer(&prepared_a, cfg.phi, PORT_ALICE_ARM_V)?;

    // Second party: V/f- photon, plate at 3 pi / 8.
    let src_b = FieldState::single_mode(PORT_BOB_SOURCE, ModeLabel::V_MINUS, src_amp);
    let prepared_b = src_b.apply_jones(&hwp(3.0 * std::f64::consts::FRAC_PI_8)?);
    let (e_c, e_d) = fold_interferometer(&prepared_b, cfg.psi, PORT_BOB_ARM_V)?;

    let project = |f: &FieldState, angle: f64, port: Port| -> Result<FieldState> {
        Ok(f.apply_jones(&polarizer(angle)?).at_port(port))
    };

    Ok(DetectorPlane {
        fields: [
            project(&e_a, cfg.zeta, PORT_ALICE_D1)?,
            project(&e_b, cfg.eta_p, PORT_ALICE_D2)?,
            project(&e_c, cfg.theta, PORT_BOB_D3)?,
            project(&e_d, cfg.xi, PORT_BOB_D4)?,
        ],
    })
}
