//! The first Sagnac loop: asymmetric path splitting, which-way-detector
//! interaction, output states at the two exits, detection probabilities and
//! ideal visibility — as closed forms and as a composed optics pipeline.
//!
//! The loop is H1(θ_a) → PBS → {H3(0) in path 0, H2(θ_n) + phase plate in
//! path 1} → NPBS. Exit "d" (output path 0) feeds the measurement loop;
//! exit "v" (output path 1) is detected directly for the visibility.

use crate::error::{Error, Result};
use crate::linalg::{norm_sq, tensor_vec, CMat, CVec, C64};
use crate::optics::{hwp, npbs, on_path, pbs, phase_plate};
use std::f64::consts::FRAC_PI_4;

const FRAC_PI_8: f64 = std::f64::consts::PI / 8.0;

/// One experimental setting of the first loop.
///
/// * `theta_a` — asymmetry angle; split ratio p₂/p₁ = tan²2θ_a. Constrained
///   to [0, π/8] so that p₂ ≤ p₁.
/// * `theta_n` — nonorthogonality angle of the which-way states,
///   |⟨d₁|d₂⟩| = sin2θ_n, θ_n ∈ [0, π/4].
/// * `phi` — relative phase between the paths.
/// * `loop_visibility` — contrast multiplier η ∈ [0, 1] on the interference
///   cross-term (partial dephasing between the paths); 1 is the ideal loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub theta_a: f64,
    pub theta_n: f64,
    pub phi: f64,
    pub loop_visibility: f64,
}

impl ExperimentConfig {
    pub fn new(theta_a: f64, theta_n: f64, phi: f64, loop_visibility: f64) -> Result<Self> {
        const SLACK: f64 = 1e-12;
        if !theta_a.is_finite() || !(-SLACK..=FRAC_PI_8 + SLACK).contains(&theta_a) {
            return Err(Error::AngleOutOfRange {
                name: "theta_a",
                value: theta_a,
                lo: 0.0,
                hi: FRAC_PI_8,
            });
        }
        if !theta_n.is_finite() || !(-SLACK..=FRAC_PI_4 + SLACK).contains(&theta_n) {
            return Err(Error::AngleOutOfRange {
                name: "theta_n",
                value: theta_n,
                lo: 0.0,
                hi: FRAC_PI_4,
            });
        }
        if !phi.is_finite() {
            return Err(Error::NotFinite {
                name: "phi",
                value: phi,
            });
        }
        if !(0.0..=1.0).contains(&loop_visibility) {
            return Err(Error::LoopVisibilityOutOfRange(loop_visibility));
        }
        Ok(Self {
            theta_a: theta_a.clamp(0.0, FRAC_PI_8),
            theta_n: theta_n.clamp(0.0, FRAC_PI_4),
            phi,
            loop_visibility,
        })
    }

    /// Build from the ratio parameterization used throughout: tan2θ_a and
    /// sin2θ_n, both in [0, 1].
    pub fn from_ratios(tan2a: f64, sin2n: f64, phi: f64, loop_visibility: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tan2a) {
            return Err(Error::AngleOutOfRange {
                name: "tan2a",
                value: tan2a,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(0.0..=1.0).contains(&sin2n) {
            return Err(Error::AngleOutOfRange {
                name: "sin2n",
                value: sin2n,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Self::new(tan2a.atan() / 2.0, sin2n.asin() / 2.0, phi, loop_visibility)
    }

    pub fn tan2a(&self) -> f64 {
        (2.0 * self.theta_a).tan()
    }

    pub fn sin2n(&self) -> f64 {
        (2.0 * self.theta_n).sin()
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn priors(&self) -> (f64, f64) {
        split_probs(self.theta_a).expect("validated at construction")
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            theta_a: FRAC_PI_8,
            theta_n: 0.0,
            phi: 0.0,
            loop_visibility: 1.0,
        }
    }
}

/// Sub-normalized polarization states at the two loop exits; squared norms
/// are the exit probabilities and sum to 1.
#[derive(Debug, Clone)]
pub struct OutputPair {
    pub psi_v: CVec,
    pub psi_d: CVec,
}

/// Path priors (p₁, p₂) = (cos²2θ_a, sin²2θ_a). Rejects θ_a outside
/// [0, π/8], where the p₂ ≤ p₁ assumption would break.
pub fn split_probs(theta_a: f64) -> Result<(f64, f64)> {
    const SLACK: f64 = 1e-12;
    if !theta_a.is_finite() || !(-SLACK..=FRAC_PI_8 + SLACK).contains(&theta_a) {
        return Err(Error::AngleOutOfRange {
            name: "theta_a",
            value: theta_a,
            lo: 0.0,
            hi: FRAC_PI_8,
        });
    }
    let c = (2.0 * theta_a).cos();
    let s = (2.0 * theta_a).sin();
    Ok((c * c, s * s))
}

/// Final which-way detector states: d₁ = |h⟩,
/// d₂ = sin2θ_n|h⟩ − cos2θ_n|v⟩, and d̄₂ = sin2θ_n|h⟩ + cos2θ_n|v⟩.
pub fn wwd_states(theta_n: f64) -> (CVec, CVec, CVec) {
    let s = (2.0 * theta_n).sin();
    let c = (2.0 * theta_n).cos();
    let d1 = CVec::from_reals(&[1.0, 0.0]).unwrap();
    let d2 = CVec::from_reals(&[s, -c]).unwrap();
    let d2_bar = CVec::from_reals(&[s, c]).unwrap();
    (d1, d2, d2_bar)
}

/// Closed-form output states of the loop:
/// ψ_v = (cos2θ_a·d₁ − e^{iφ}·sin2θ_a·d̄₂)/√2,
/// ψ_d = (cos2θ_a·d₁ + e^{iφ}·sin2θ_a·d₂)/√2.
pub fn evolve(config: &ExperimentConfig) -> OutputPair {
    let (d1, d2, d2_bar) = wwd_states(config.theta_n);
    let c = (2.0 * config.theta_a).cos();
    let s = (2.0 * config.theta_a).sin();
    let root_half = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let phase = C64::from_polar(1.0, config.phi);
    let psi_v = d1
        .scale(C64::new(c, 0.0))
        .sub(&d2_bar.scale(phase * s))
        .unwrap()
        .scale(root_half);
    let psi_d = d1
        .scale(C64::new(c, 0.0))
        .add(&d2.scale(phase * s))
        .unwrap()
        .scale(root_half);
    OutputPair { psi_v, psi_d }
}

/// The composed first-loop unitary on the 4-dimensional space.
/// `hwp_offset` shifts the angle convention of every plate and exists only
/// as a fault-injection hook for the self-check's negative control; it is
/// 0.0 in all physics paths.
pub fn first_loop_unitary(config: &ExperimentConfig, hwp_offset: f64) -> CMat {
    let h1 = on_path(0, &hwp(config.theta_a + hwp_offset)).unwrap();
    let h3 = on_path(0, &hwp(hwp_offset)).unwrap();
    let h2 = on_path(1, &hwp(config.theta_n + hwp_offset)).unwrap();
    let pp = phase_plate(config.phi);
    npbs()
        .matmul(&pp)
        .unwrap()
        .matmul(&h2)
        .unwrap()
        .matmul(&h3)
        .unwrap()
        .matmul(&pbs())
        .unwrap()
        .matmul(&h1)
        .unwrap()
}

/// Output states computed by running |0,h⟩ through the element-by-element
/// pipeline. Must agree with [`evolve`] entrywise.
pub fn evolve_pipeline(config: &ExperimentConfig) -> OutputPair {
    evolve_pipeline_with_offset(config, 0.0)
}

pub fn evolve_pipeline_with_offset(config: &ExperimentConfig, hwp_offset: f64) -> OutputPair {
    let input = tensor_vec(
        &CVec::basis(2, 0).unwrap(),
        &CVec::basis(2, 0).unwrap(),
    )
    .unwrap();
    let out = first_loop_unitary(config, hwp_offset).matvec(&input).unwrap();
    let e = out.entries();
    // output path 0 -> exit d, output path 1 -> exit v
    let psi_d = CVec::new(vec![e[0], e[1]]).unwrap();
    let psi_v = CVec::new(vec![e[2], e[3]]).unwrap();
    OutputPair { psi_v, psi_d }
}

/// Probability of a click at the D_d exit:
/// p = (1 + η·2√(p₁p₂)·sin2θ_n·cosφ)/2.
pub fn detection_prob_dd(config: &ExperimentConfig) -> f64 {
    let (p1, p2) = config.priors();
    let cross = 2.0 * (p1 * p2).sqrt() * config.sin2n() * config.phi.cos();
    (1.0 + config.loop_visibility * cross) / 2.0
}

/// Probability of a click at the D_v exit; complements [`detection_prob_dd`].
pub fn detection_prob_dv(config: &ExperimentConfig) -> f64 {
    1.0 - detection_prob_dd(config)
}

/// Ideal fringe visibility V = 2√(p₁p₂)·sin2θ_n.
pub fn visibility_closed_form(theta_a: f64, theta_n: f64) -> Result<f64> {
    let (p1, p2) = split_probs(theta_a)?;
    Ok(2.0 * (p1 * p2).sqrt() * (2.0 * theta_n).sin())
}

/// Probability conservation across the two exits.
pub fn exit_probability_sum(pair: &OutputPair) -> f64 {
    norm_sq(&pair.psi_v) + norm_sq(&pair.psi_d)
}
