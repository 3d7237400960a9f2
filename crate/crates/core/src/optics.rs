//! Jones-calculus optical elements with sign conventions pinned so the
//! modeled pipelines reproduce the intended output states exactly.
//!
//! Two half-wave-plate angle conventions coexist in this apparatus and both
//! are exposed:
//!
//! * [`hwp`] — state-preparation convention used by the plates of the first
//!   loop (H1–H3): `hwp(θ)|h⟩ = sin2θ|h⟩ − cos2θ|v⟩`. Matrix
//!   `[[sin2θ, −cos2θ], [−cos2θ, −sin2θ]]`, real, Hermitian, involutory.
//! * [`hwp_std`] — textbook fast-axis convention used by the measurement
//!   plates (H4–H7): `hwp_std(θ)|h⟩ = cos2θ|h⟩ + sin2θ|v⟩`. Matrix
//!   `[[cos2θ, sin2θ], [sin2θ, −cos2θ]]`.
//!
//! They differ only by where the angle scale starts:
//! `hwp(θ) = hwp_std(θ − π/4)`. The measurement-side closed-form plate
//! angles are only consistent with the textbook scale, while the
//! preparation-side state assignments require the other; pinning each side
//! to its own scale makes every closed-form angle usable verbatim.
//!
//! Mirrors are modeled as identity; their polarization flips are absorbed
//! into the beam-splitter convention pins below.

use crate::error::{Error, Result};
use crate::linalg::{tensor, CMat, C64};
use std::f64::consts::{FRAC_PI_2, PI};

/// Orientation of a wave plate, normalized to (−π/2, π/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePlateSetting {
    orientation: f64,
}

impl WavePlateSetting {
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(Error::NotFinite {
                name: "wave plate orientation",
                value: radians,
            });
        }
        // A half-wave plate is π-periodic in its orientation; fold into
        // (−π/2, π/2].
        let mut r = radians % PI;
        if r <= -FRAC_PI_2 {
            r += PI;
        } else if r > FRAC_PI_2 {
            r -= PI;
        }
        Ok(Self { orientation: r })
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.orientation
    }

    pub fn degrees(self) -> f64 {
        self.orientation.to_degrees()
    }
}

/// An optical element of the modeled pipelines. Each kind maps to a fixed
/// unitary on the 4-dimensional path⊗polarization space via
/// [`ElementKind::unitary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementKind {
    /// Half-wave plate (preparation convention) acting on both paths.
    Hwp(WavePlateSetting),
    /// Polarizing splitter: h swaps path, v stays.
    Pbs,
    /// Balanced non-polarizing splitter with the pinned reflection phase.
    Npbs,
    /// Relative phase e^{iφ} on the path-1 branch.
    PhasePlate(f64),
    /// Identity; flips are absorbed into the splitter conventions.
    Mirror,
}

impl ElementKind {
    pub fn unitary(self) -> CMat {
        match self {
            ElementKind::Hwp(s) => {
                let j = hwp(s.radians());
                tensor(&CMat::identity(2).unwrap(), &j).unwrap()
            }
            ElementKind::Pbs => pbs(),
            ElementKind::Npbs => npbs(),
            ElementKind::PhasePlate(phi) => phase_plate(phi),
            ElementKind::Mirror => mirror(),
        }
    }
}

/// Half-wave plate, preparation convention: `hwp(θ)|h⟩ = sin2θ|h⟩ − cos2θ|v⟩`.
pub fn hwp(theta: f64) -> CMat {
    let s = (2.0 * theta).sin();
    let c = (2.0 * theta).cos();
    CMat::from_reals(2, &[s, -c, -c, -s]).unwrap()
}

/// Half-wave plate, textbook fast-axis convention:
/// `hwp_std(θ)|h⟩ = cos2θ|h⟩ + sin2θ|v⟩`. Equals `hwp(θ + π/4)`.
pub fn hwp_std(theta: f64) -> CMat {
    let s = (2.0 * theta).sin();
    let c = (2.0 * theta).cos();
    CMat::from_reals(2, &[c, s, s, -c]).unwrap()
}

/// Apply a 2×2 Jones matrix to the polarization of a single path, identity
/// on the other. Used to place in-arm plates.
pub fn on_path(path: usize, jones: &CMat) -> Result<CMat> {
    if jones.dim() != 2 {
        return Err(Error::UnsupportedDimension(jones.dim()));
    }
    let mut out = CMat::identity(4)?;
    let base = 2 * path;
    for i in 0..2 {
        for j in 0..2 {
            out[(base + i, base + j)] = jones[(i, j)];
        }
    }
    Ok(out)
}

/// Polarizing beam splitter on path⊗polarization: the h component swaps
/// paths (transmission across the splitter), the v component keeps its path
/// (reflection), with no reflection phase. σ₁⊗P_h + I⊗P_v.
pub fn pbs() -> CMat {
    CMat::from_reals(
        4,
        &[
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
    .unwrap()
}

/// Balanced non-polarizing splitter, convention pinned to the first loop's
/// output states: a Hadamard mix of the paths followed by a π phase on the
/// v polarization of the exit-1 (D_v) branch. Output path 0 carries the
/// plus-sign superposition, output path 1 the minus-sign one.
pub fn npbs() -> CMat {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_reals(
        4,
        &[
            r, 0.0, r, 0.0, //
            0.0, r, 0.0, r, //
            r, 0.0, -r, 0.0, //
            0.0, -r, 0.0, r,
        ],
    )
    .unwrap()
}

/// Multiply the path-1 branch by e^{iφ}.
pub fn phase_plate(phi: f64) -> CMat {
    let mut m = CMat::identity(4).unwrap();
    let e = C64::from_polar(1.0, phi);
    m[(2, 2)] = e;
    m[(3, 3)] = e;
    m
}

pub fn mirror() -> CMat {
    CMat::identity(4).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm_sq, CVec};

    fn ket_h() -> CVec {
        CVec::basis(2, 0).unwrap()
    }

    #[test]
    fn hwp_quarter_turn_fixes_h() {
        // sin(π/2) = 1: |h> is unchanged
        let out = hwp(std::f64::consts::FRAC_PI_4).matvec(&ket_h()).unwrap();
        assert!((out[0].re - 1.0).abs() < 1e-15 && out[1].norm() < 1e-15);
    }

    #[test]
    fn hwp_zero_sends_h_to_minus_v() {
        let out = hwp(0.0).matvec(&ket_h()).unwrap();
        assert!(out[0].norm() < 1e-15);
        assert!((out[1].re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn hwp_at_nonorthogonality_angle() {
        // sin2θ = 0.9 => hwp(θ)|h> = 0.9|h> - sqrt(1-0.81)|v>
        let theta = (0.9_f64).asin() / 2.0;
        let out = hwp(theta).matvec(&ket_h()).unwrap();
        assert!((out[0].re - 0.9).abs() < 1e-12);
        assert!((out[1].re + (1.0_f64 - 0.81).sqrt()).abs() < 1e-12);
        assert!((norm_sq(&out) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hwp_conventions_differ_by_quarter_offset() {
        for theta in [-0.7, -0.2, 0.0, 0.4, 1.3] {
            let a = hwp(theta);
            let b = hwp_std(theta - std::f64::consts::FRAC_PI_4);
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn elements_are_unitary() {
        for theta in [-0.9, 0.0, 0.3, 1.2] {
            assert!(hwp(theta).is_unitary(1e-12));
            assert!(hwp_std(theta).is_unitary(1e-12));
        }
        assert!(pbs().is_unitary(1e-12));
        assert!(npbs().is_unitary(1e-12));
        assert!(phase_plate(1.234).is_unitary(1e-12));
        assert!(mirror().is_unitary(1e-12));
        for elem in [
            ElementKind::Hwp(WavePlateSetting::new(0.7).unwrap()),
            ElementKind::Pbs,
            ElementKind::Npbs,
            ElementKind::PhasePlate(0.5),
            ElementKind::Mirror,
        ] {
            assert!(elem.unitary().is_unitary(1e-12));
        }
    }

    #[test]
    fn hwp_is_involution() {
        for theta in [-1.1, 0.0, 0.25, 0.8] {
            let m = hwp(theta);
            let mm = m.matmul(&m).unwrap();
            assert!(mm.max_abs_diff(&CMat::identity(2).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn npbs_twice_routes_up_to_pinned_phase() {
        // On the h subspace the pinned npbs squares to identity exactly;
        // on v it returns the input to a single path up to sign.
        let n = npbs();
        let nn = n.matmul(&n).unwrap();
        let in_h = CVec::basis(4, 0).unwrap(); // |0,h>
        let out = nn.matvec(&in_h).unwrap();
        assert!((out[0].re - 1.0).abs() < 1e-15);
        let in_v = CVec::basis(4, 1).unwrap(); // |0,v>
        let out_v = nn.matvec(&in_v).unwrap();
        let mags: Vec<f64> = out_v.entries().iter().map(|c| c.norm()).collect();
        // all weight on a single (path, v) mode
        assert!((mags[1] - 1.0).abs() < 1e-15 || (mags[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phase_plate_pi_flips_path1() {
        let out = phase_plate(std::f64::consts::PI)
            .matvec(&CVec::basis(4, 2).unwrap())
            .unwrap();
        assert!((out[2].re + 1.0).abs() < 1e-15 && out[2].im.abs() < 1e-15);
    }

    #[test]
    fn h1_then_pbs_sets_split_probabilities() {
        // H1 at θ_a then PBS: path-1 amplitude sin2θ_a (h), path-0 amplitude
        // -cos2θ_a (v); probabilities cos²2θ_a on path 0, sin²2θ_a on path 1.
        let t2a = 0.38_f64;
        let theta_a = t2a.atan() / 2.0;
        let input = CVec::basis(4, 0).unwrap(); // |0,h>
        let u = pbs().matmul(&on_path(0, &hwp(theta_a)).unwrap()).unwrap();
        let out = u.matvec(&input).unwrap();
        let p_path0 = out[0].norm_sqr() + out[1].norm_sqr();
        let p_path1 = out[2].norm_sqr() + out[3].norm_sqr();
        let c = (2.0 * theta_a).cos();
        let s = (2.0 * theta_a).sin();
        assert!((p_path0 - c * c).abs() < 1e-12);
        assert!((p_path1 - s * s).abs() < 1e-12);
        // path 0 is vertically polarized, path 1 horizontally
        assert!(out[0].norm() < 1e-15 && out[3].norm() < 1e-15);
    }

    #[test]
    fn orientation_normalization() {
        let s = WavePlateSetting::new(2.0 * PI + 0.1).unwrap();
        assert!((s.radians() - 0.1).abs() < 1e-12);
        let s = WavePlateSetting::new(-FRAC_PI_2).unwrap();
        assert!((s.radians() - FRAC_PI_2).abs() < 1e-12);
        let s = WavePlateSetting::new(FRAC_PI_2).unwrap();
        assert!((s.radians() - FRAC_PI_2).abs() < 1e-12);
        assert!(WavePlateSetting::new(f64::NAN).is_err());
    }
}
