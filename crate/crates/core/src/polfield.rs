//! Four-mode field states and the optical elements that act on them.
//!
//! A field lives in the tensor space {H, V} x {f+, f-}: two polarizations
//! crossed with two frequency tags. The down-conversion source emits f+
//! toward one party and f- toward the other, and no element in this model
//! ever mixes the two tags, so every operation here acts blockwise on the
//! (H, V) pair of each tag.
//!
//! Sign and phase conventions, fixed once and used everywhere:
//!
//! * symmetric beamsplitter: out_c = (in_a + i in_b)/sqrt(2),
//!   out_d = (i in_a + in_b)/sqrt(2);
//! * polarizing beamsplitter: H transmits unchanged, V reflects with a
//!   factor i;
//! * quarter-wave plate at 0 deg: diag(1, i) in the (H, V) basis;
//! * rotations are counterclockwise, angles in radians.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

/// Which of the two down-conversion sidebands a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrequencyTag {
    Plus,
    Minus,
}

/// One of the four basis modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeLabel {
    pub polarization: Polarization,
    pub frequency: FrequencyTag,
}

impl ModeLabel {
    pub const H_PLUS: ModeLabel = ModeLabel {
        polarization: Polarization::H,
        frequency: FrequencyTag::Plus,
    };
    pub const V_PLUS: ModeLabel = ModeLabel {
        polarization: Polarization::V,
        frequency: FrequencyTag::Plus,
    };
    pub const H_MINUS: ModeLabel = ModeLabel {
        polarization: Polarization::H,
        frequency: FrequencyTag::Minus,
    };
    pub const V_MINUS: ModeLabel = ModeLabel {
        polarization: Polarization::V,
        frequency: FrequencyTag::Minus,
    };

    /// All four modes in storage order.
    pub const ALL: [ModeLabel; 4] = [
        ModeLabel::H_PLUS,
        ModeLabel::V_PLUS,
        ModeLabel::H_MINUS,
        ModeLabel::V_MINUS,
    ];

    fn index(self) -> usize {
        match (self.polarization, self.frequency) {
            (Polarization::H, FrequencyTag::Plus) => 0,
            (Polarization::V, FrequencyTag::Plus) => 1,
            (Polarization::H, FrequencyTag::Minus) => 2,
            (Polarization::V, FrequencyTag::Minus) => 3,
        }
    }
}

/// A named spatial location in the apparatus. Ports exist so that topology
/// mistakes (interfering a beam with itself, reading the wrong detector)
/// fail loudly instead of silently producing plausible numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Port(pub &'static str);

impl std::fmt::Display for Port {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.0)
    }
}

/// Classical field amplitudes over the four modes at one port.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    port: Port,
    amps: [Complex64; 4],
}

impl FieldState {
    pub fn zero(port: Port) -> FieldState {
        FieldState {
            port,
            amps: [Complex64::ZERO; 4],
        }
    }

    pub fn from_amplitudes(port: Port, amps: [Complex64; 4]) -> FieldState {
        FieldState { port, amps }
    }

    /// A field with all its amplitude in one mode.
    pub fn single_mode(port: Port, mode: ModeLabel, amp: Complex64) -> FieldState {
        let mut s = FieldState::zero(port);
        s.amps[mode.index()] = amp;
        s
    }

    pub fn port(&self) -> Port {
        self.port
    }

    /// Same amplitudes, relabelled to a new location.
    pub fn at_port(&self, port: Port) -> FieldState {
        FieldState {
            port,
            amps: self.amps,
        }
    }

    pub fn amplitude(&self, mode: ModeLabel) -> Complex64 {
        self.amps[mode.index()]
    }

    pub fn set_amplitude(&mut self, mode: ModeLabel, amp: Complex64) {
        self.amps[mode.index()] = amp;
    }

    /// Total intensity, |amp|^2 summed over all four modes.
    pub fn intensity(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.amps
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Apply a polarization-space 2x2 matrix separately within each
    /// frequency tag. Frequency tags are never mixed.
    pub fn apply_jones(&self, m: &JonesMatrix) -> FieldState {
        let mut out = FieldState::zero(self.port);
        for tag in [FrequencyTag::Plus, FrequencyTag::Minus] {
            let h = ModeLabel {
                polarization: Polarization::H,
                frequency: tag,
            };
            let v = ModeLabel {
                polarization: Polarization::V,
                frequency: tag,
            };
            let (nh, nv) = m.apply(self.amplitude(h), self.amplitude(v));
            out.set_amplitude(h, nh);
            out.set_amplitude(v, nv);
        }
        out
    }

    /// Largest mode-wise amplitude difference to another state, ignoring
    /// port labels. Used by equivalence tests between propagation engines.
    pub fn max_mode_distance(&self, other: &FieldState) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// 2x2 complex matrix acting on the (H, V) amplitudes of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix {
    rows: [[Complex64; 2]; 2],
}

impl JonesMatrix {
    pub fn identity() -> JonesMatrix {
        JonesMatrix {
            rows: [
                [Complex64::ONE, Complex64::ZERO],
                [Complex64::ZERO, Complex64::ONE],
            ],
        }
    }

    pub fn new(rows: [[Complex64; 2]; 2]) -> JonesMatrix {
        JonesMatrix { rows }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.rows[row][col]
    }

    /// Matrix product `self * other` (other acts first).
    pub fn compose(&self, other: &JonesMatrix) -> JonesMatrix {
        let mut rows = [[Complex64::ZERO; 2]; 2];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = self.rows[i][0] * other.rows[0][j] + self.rows[i][1] * other.rows[1][j];
            }
        }
        JonesMatrix { rows }
    }

    pub fn adjoint(&self) -> JonesMatrix {
        JonesMatrix {
            rows: [
                [self.rows[0][0].conj(), self.rows[1][0].conj()],
                [self.rows[0][1].conj(), self.rows[1][1].conj()],
            ],
        }
    }

    pub fn apply(&self, h: Complex64, v: Complex64) -> (Complex64, Complex64) {
        (
            self.rows[0][0] * h + self.rows[0][1] * v,
            self.rows[1][0] * h + self.rows[1][1] * v,
        )
    }

    /// How far `self^dagger self` is from the identity (max entry norm).
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().compose(self);
        let id = JonesMatrix::identity();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.rows[i][j] - id.rows[i][j]).norm());
            }
        }
        worst
    }

    /// How far the matrix is from being an idempotent Hermitian projector.
    pub fn projector_defect(&self) -> f64 {
        let sq = self.compose(self);
        let adj = self.adjoint();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((sq.rows[i][j] - self.rows[i][j]).norm());
                worst = worst.max((adj.rows[i][j] - self.rows[i][j]).norm());
            }
        }
        worst
    }
}

fn check_angle(angle: f64, name: &'static str) -> Result<()> {
    if !angle.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {angle}"),
        });
    }
    Ok(())
}

/// Half-wave plate with its fast axis at `angle`:
/// [[cos 2a, sin 2a], [sin 2a, -cos 2a]].
pub fn hwp(angle: f64) -> Result<JonesMatrix> {
    check_angle(angle, "hwp angle")?;
    let (s, c) = (2.0 * angle).sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    Ok(JonesMatrix {
        rows: [[re(c), re(s)], [re(s), re(-c)]],
    })
}

/// Quarter-wave plate with its fast axis at `angle`:
/// R(a) diag(1, i) R(-a).
pub fn qwp(angle: f64) -> Result<JonesMatrix> {
    check_angle(angle, "qwp angle")?;
    let (s, c) = angle.sin_cos();
    let i = Complex64::I;
    let one = Complex64::ONE;
    let cs = Complex64::new(c * s, 0.0);
    Ok(JonesMatrix {
        rows: [
            [Complex64::new(c * c, 0.0) + i * s * s, (one - i) * cs],
            [(one - i) * cs, Complex64::new(s * s, 0.0) + i * c * c],
        ],
    })
}

/// Linear polarizer transmitting the axis at `angle`:
/// [[c^2, cs], [cs, s^2]]. A rank-one projector, not unitary.
pub fn polarizer(angle: f64) -> Result<JonesMatrix> {
    check_angle(angle, "polarizer angle")?;
    let (s, c) = angle.sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    Ok(JonesMatrix {
        rows: [[re(c * c), re(c * s)], [re(c * s), re(s * s)]],
    })
}

/// Symmetric 50/50 beamsplitter across two ports, acting identically on all
/// four modes. Output fields inherit the input port labels (the caller
/// relabels if the geometry demands it).
pub fn beamsplitter(a: &FieldState, b: &FieldState) -> Result<(FieldState, FieldState)> {
    if a.port() == b.port() {
        return Err(Error::Topology(format!(
            "beamsplitter fed the same port twice: {}",
            a.port()
        )));
    }
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = Complex64::I;
    let mut out_c = FieldState::zero(a.port());
    let mut out_d = FieldState::zero(b.port());
    for mode in ModeLabel::ALL {
        let (ain, bin) = (a.amplitude(mode), b.amplitude(mode));
        out_c.set_amplitude(mode, (ain + i * bin) * inv_sqrt2);
        out_d.set_amplitude(mode, (i * ain + bin) * inv_sqrt2);
    }
    Ok((out_c, out_d))
}

/// Polarizing beamsplitter: H transmits unchanged, V reflects with a factor
/// i. Returns (transmitted, reflected); both keep the input port label.
pub fn pbs(input: &FieldState) -> (FieldState, FieldState) {
    let mut t = FieldState::zero(input.port());
    let mut r = FieldState::zero(input.port());
    for mode in ModeLabel::ALL {
        let amp = input.amplitude(mode);
        match mode.polarization {
            Polarization::H => t.set_amplitude(mode, amp),
            Polarization::V => r.set_amplitude(mode, Complex64::I * amp),
        }
    }
    (t, r)
}

/// Multiply the amplitude of every selected mode by e^{i phase}.
pub fn phase_shift<F>(input: &FieldState, phase: f64, select: F) -> FieldState
where
    F: Fn(ModeLabel) -> bool,
{
    let factor = Complex64::from_polar(1.0, phase);
    let mut out = input.clone();
    for mode in ModeLabel::ALL {
        if select(mode) {
            out.set_amplitude(mode, factor * input.amplitude(mode));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hwp_at_zero_flips_v() {
        let m = hwp(0.0).unwrap();
        let (h, v) = m.apply(c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(h, c(1.0, 0.0));
        assert_eq!(v, c(-1.0, 0.0));
    }

    #[test]
    fn hwp_at_pi_over_8_makes_diagonal_from_h() {
        let m = hwp(PI / 8.0).unwrap();
        let (h, v) = m.apply(c(1.0, 0.0), c(0.0, 0.0));
        assert!((h.re - FRAC_PI_4.cos()).abs() < TOL);
        assert!((v.re - FRAC_PI_4.sin()).abs() < TOL);
    }

    #[test]
    fn qwp_at_zero_is_diag_one_i() {
        let m = qwp(0.0).unwrap();
        assert!((m.entry(0, 0) - c(1.0, 0.0)).norm() < TOL);
        assert!((m.entry(1, 1) - c(0.0, 1.0)).norm() < TOL);
        assert!(m.entry(0, 1).norm() < TOL);
        assert!(m.entry(1, 0).norm() < TOL);
    }

    #[test]
    fn polarizer_at_angle_passes_that_axis_blocks_orthogonal() {
        let a = 0.7;
        let m = polarizer(a).unwrap();
        let (h, v) = m.apply(c(a.cos(), 0.0), c(a.sin(), 0.0));
        assert!((h.re - a.cos()).abs() < TOL && (v.re - a.sin()).abs() < TOL);
        let (h, v) = m.apply(c(-a.sin(), 0.0), c(a.cos(), 0.0));
        assert!(h.norm() < TOL && v.norm() < TOL);
    }

    #[test]
    fn nonfinite_angles_are_rejected() {
        assert!(hwp(f64::NAN).is_err());
        assert!(qwp(f64::INFINITY).is_err());
        assert!(polarizer(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn beamsplitter_rejects_same_port() {
        let p = Port("x");
        let a = FieldState::single_mode(p, ModeLabel::H_PLUS, c(1.0, 0.0));
        assert!(matches!(beamsplitter(&a, &a), Err(Error::Topology(_))));
    }

    #[test]
    fn beamsplitter_matches_stated_convention() {
        let a = FieldState::single_mode(Port("a"), ModeLabel::H_PLUS, c(1.0, 0.0));
        let b = FieldState::zero(Port("b"));
        let (out_c, out_d) = beamsplitter(&a, &b).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out_c.amplitude(ModeLabel::H_PLUS) - c(r, 0.0)).norm() < TOL);
        assert!((out_d.amplitude(ModeLabel::H_PLUS) - c(0.0, r)).norm() < TOL);
    }

    #[test]
    fn pbs_transmits_h_reflects_v_with_i() {
        let mut input = FieldState::zero(Port("in"));
        input.set_amplitude(ModeLabel::H_PLUS, c(0.6, 0.0));
        input.set_amplitude(ModeLabel::V_PLUS, c(0.8, 0.0));
        let (t, r) = pbs(&input);
        assert_eq!(t.amplitude(ModeLabel::H_PLUS), c(0.6, 0.0));
        assert_eq!(t.amplitude(ModeLabel::V_PLUS), c(0.0, 0.0));
        assert_eq!(r.amplitude(ModeLabel::H_PLUS), c(0.0, 0.0));
        assert!((r.amplitude(ModeLabel::V_PLUS) - c(0.0, 0.8)).norm() < TOL);
    }

    /// Two-path interferometer skeleton: pbs splits H/V, a phase goes on
    /// the V arm, a beamsplitter recombines. Output amplitudes must follow
    /// (1 - e^{i phi}) and i(1 + e^{i phi}) up to the common prefactor.
    #[test]
    fn mach_zehnder_skeleton_produces_expected_fringe_pair() {
        for phi in [0.0, 0.3, FRAC_PI_2, PI, 4.2] {
            let mut input = FieldState::zero(Port("in"));
            input.set_amplitude(ModeLabel::H_PLUS, c(1.0, 0.0));
            input.set_amplitude(ModeLabel::V_PLUS, c(1.0, 0.0));
            let (arm_h, arm_v0) = pbs(&input);
            let arm_v0 = arm_v0.at_port(Port("arm_v"));
            let arm_v = phase_shift(&arm_v0, phi, |m| m.polarization == Polarization::V);
            let (o1, o2) = beamsplitter(&arm_h, &arm_v).unwrap();
            // pbs put i on V, bs puts i on the cross terms; the H amplitude
            // at output 1 is 1/sqrt2, the V amplitude i*e^{i phi}*i/sqrt2.
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let eip = Complex64::from_polar(1.0, phi);
            assert!((o1.amplitude(ModeLabel::H_PLUS) - c(r, 0.0)).norm() < TOL);
            assert!((o1.amplitude(ModeLabel::V_PLUS) - (-eip * r)).norm() < TOL);
            assert!((o2.amplitude(ModeLabel::H_PLUS) - c(0.0, r)).norm() < TOL);
            assert!((o2.amplitude(ModeLabel::V_PLUS) - Complex64::I * eip * r).norm() < TOL);
        }
    }

    #[test]
    fn qwp_squared_is_hwp() {
        for angle in [0.0, 0.2, FRAC_PI_4, 1.1, PI] {
            let q = qwp(angle).unwrap();
            let h = hwp(angle).unwrap();
            let q2 = q.compose(&q);
            for i in 0..2 {
                for j in 0..2 {
                    // diag(1,i) squared is diag(1,-1), which rotated is
                    // exactly the hwp matrix. No global phase slack needed.
                    assert!((q2.entry(i, j) - h.entry(i, j)).norm() < TOL);
                }
            }
        }
    }

    #[test]
    fn qwp_fourth_power_is_identity() {
        let q = qwp(0.37).unwrap();
        let q4 = q.compose(&q).compose(&q).compose(&q);
        let id = JonesMatrix::identity();
        for i in 0..2 {
            for j in 0..2 {
                assert!((q4.entry(i, j) - id.entry(i, j)).norm() < TOL);
            }
        }
    }

    proptest! {
        #[test]
        fn wave_plates_are_unitary(angle in -10.0f64..10.0) {
            prop_assert!(hwp(angle).unwrap().unitarity_defect() < TOL);
            prop_assert!(qwp(angle).unwrap().unitarity_defect() < TOL);
        }

        #[test]
        fn polarizer_is_projector(angle in -10.0f64..10.0) {
            prop_assert!(polarizer(angle).unwrap().projector_defect() < TOL);
        }

        #[test]
        fn beamsplitter_conserves_intensity(
            re in proptest::collection::vec(-2.0f64..2.0, 8),
            im in proptest::collection::vec(-2.0f64..2.0, 8),
        ) {
            let mk = |off: usize| {
                [
                    Complex64::new(re[off], im[off]),
                    Complex64::new(re[off + 1], im[off + 1]),
                    Complex64::new(re[off + 2], im[off + 2]),
                    Complex64::new(re[off + 3], im[off + 3]),
                ]
            };
            let a = FieldState::from_amplitudes(Port("a"), mk(0));
            let b = FieldState::from_amplitudes(Port("b"), mk(4));
            let before = a.intensity() + b.intensity();
            let (out_c, out_d) = beamsplitter(&a, &b).unwrap();
            let after = out_c.intensity() + out_d.intensity();
            prop_assert!((before - after).abs() < 1e-10);
        }

        #[test]
        fn pbs_conserves_intensity(
            re in proptest::collection::vec(-2.0f64..2.0, 4),
            im in proptest::collection::vec(-2.0f64..2.0, 4),
        ) {
            let amps = [
                Complex64::new(re[0], im[0]),
                Complex64::new(re[1], im[1]),
                Complex64::new(re[2], im[2]),
                Complex64::new(re[3], im[3]),
            ];
            let input = FieldState::from_amplitudes(Port("in"), amps);
            let (t, r) = pbs(&input);
            prop_assert!((input.intensity() - t.intensity() - r.intensity()).abs() < 1e-10);
        }

        #[test]
        fn polarizer_never_increases_intensity(
            angle in -10.0f64..10.0,
            re in proptest::collection::vec(-2.0f64..2.0, 4),
            im in proptest::collection::vec(-2.0f64..2.0, 4),
        ) {
            let amps = [
                Complex64::new(re[0], im[0]),
                Complex64::new(re[1], im[1]),
                Complex64::new(re[2], im[2]),
                Complex64::new(re[3], im[3]),
            ];
            let input = FieldState::from_amplitudes(Port("in"), amps);
            let out = input.apply_jones(&polarizer(angle).unwrap());
            prop_assert!(out.intensity() <= input.intensity() + 1e-10);
        }

        #[test]
        fn jones_application_never_mixes_frequency_tags(
            angle in -10.0f64..10.0,
            re in -2.0f64..2.0,
            im in -2.0f64..2.0,
        ) {
            // Feed amplitude only into the f+ block; the f- block must stay
            // bitwise zero through any plate.
            let mut input = FieldState::zero(Port("in"));
            input.set_amplitude(ModeLabel::H_PLUS, Complex64::new(re, im));
            input.set_amplitude(ModeLabel::V_PLUS, Complex64::new(im, re));
            for m in [hwp(angle).unwrap(), qwp(angle).unwrap(), polarizer(angle).unwrap()] {
                let out = input.apply_jones(&m);
                prop_assert_eq!(out.amplitude(ModeLabel::H_MINUS), Complex64::ZERO);
                prop_assert_eq!(out.amplitude(ModeLabel::V_MINUS), Complex64::ZERO);
            }
        }
    }
}
