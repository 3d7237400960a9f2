//! The which-way measurement layer: closed-form UQSD and MED bounds, the
//! wave-plate programs realizing them, POVM constructions (both from the
//! literal operator expressions and from the composed measurement-loop
//! pipeline), outcome probabilities, and mutual information.
//!
//! The measurement loop is a second Sagnac structure used as a
//! polarization-path router: H4 → PBS → {H5 in the h arm (path 1),
//! H6 = σ₁ in the v arm (path 0)} → PBS → {exit 0 → D₂,
//! exit 1 → H7 → PBS → D₀ (h) / D₁ (v)}. All measurement plates use the
//! textbook fast-axis convention [`hwp_std`]; see the optics module notes.
//!
//! Detector meanings under UQSD: D₀ — the photon came from path 0 (state
//! d₁), error-free; D₁ — path 1 (state d₂), error-free; D₂ — inconclusive.
//! Under MED every click is a guess: D₂ guesses path 0, D₀ guesses path 1.

use crate::error::{Error, Result};
use crate::interferometer::{split_probs, wwd_states};
use crate::linalg::{
    adjoint, inner, projector, tensor_vec, CMat, CVec, Detector, OutcomeLabel, OutcomeMeaning,
    PovmSet, C64,
};
use crate::optics::{hwp_std, on_path, pbs};
use std::f64::consts::FRAC_PI_4;

/// Which discrimination strategy drives the measurement loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Uqsd,
    Med,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Uqsd => write!(f, "uqsd"),
            Strategy::Med => write!(f, "med"),
        }
    }
}

/// The H4–H7 orientations realizing a discrimination strategy.
/// θ₆ = π/4 always; the MED program and the small-asymmetry UQSD branch
/// additionally fix θ₅ = θ₇ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePlateProgram {
    pub theta4: f64,
    pub theta5: f64,
    pub theta6: f64,
    pub theta7: f64,
}

/// Which closed-form UQSD program branch applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UqsdBranch {
    /// tan2θ_a > sin2θ_n: H5 splits off the common component; all three
    /// detectors participate.
    Split,
    /// tan2θ_a ≤ sin2θ_n: H4 rotates d₂ onto |h⟩; a projective measurement
    /// suffices and D₁ never fires.
    Projective,
}

/// Probability of an unambiguous outcome under optimal UQSD:
/// D_u = 1 − 2√(p₁p₂)·sin2θ_n   when p₂/p₁ > sin²2θ_n,
/// D_u = p₁·(1 − sin²2θ_n)      otherwise.
/// The branches agree (= p₁ − p₂) at the boundary; exact equality uses the
/// first expression.
pub fn uqsd_bound(p1: f64, p2: f64, theta_n: f64) -> Result<f64> {
    check_priors(p1, p2)?;
    let s = (2.0 * theta_n).sin();
    if p2 / p1 >= s * s {
        Ok(1.0 - 2.0 * (p1 * p2).sqrt() * s)
    } else {
        Ok(p1 * (1.0 - s * s))
    }
}

/// Helstrom bound: maximum correct-guess probability
/// P_r = (1 + √(1 − 4p₁p₂·sin²2θ_n))/2 ∈ [1/2, 1].
pub fn helstrom(p1: f64, p2: f64, theta_n: f64) -> Result<f64> {
    check_priors(p1, p2)?;
    let s = (2.0 * theta_n).sin();
    let disc = (1.0 - 4.0 * p1 * p2 * s * s).max(0.0);
    Ok(0.5 * (1.0 + disc.sqrt()))
}

/// Distinguishability under minimum-error discrimination, D_m = 2P_r − 1.
pub fn dm_closed_form(p1: f64, p2: f64, theta_n: f64) -> Result<f64> {
    Ok(2.0 * helstrom(p1, p2, theta_n)? - 1.0)
}

fn check_priors(p1: f64, p2: f64) -> Result<()> {
    if (p1 + p2 - 1.0).abs() >= 1e-9 || p1 < 0.0 || p2 < 0.0 {
        return Err(Error::InvalidScenario(format!(
            "priors ({p1}, {p2}) do not sum to 1"
        )));
    }
    if p2 > p1 + 1e-12 {
        return Err(Error::PriorsOutOfOrder { p1, p2 });
    }
    Ok(())
}

/// Wave-plate program for optimal UQSD, routed by branch at
/// tan2θ_a vs sin2θ_n (the boundary goes to [`UqsdBranch::Projective`],
/// whose formulas are regular there; both branches give the same
/// measurement at the boundary).
pub fn uqsd_program(theta_a: f64, theta_n: f64) -> Result<WavePlateProgram> {
    let t = (2.0 * theta_a).tan();
    let s = (2.0 * theta_n).sin();
    let branch = if t > s {
        UqsdBranch::Split
    } else {
        UqsdBranch::Projective
    };
    uqsd_program_with_branch(theta_a, theta_n, branch)
}

/// Branch-forced program, used to check continuity at the branch boundary.
pub fn uqsd_program_with_branch(
    theta_a: f64,
    theta_n: f64,
    branch: UqsdBranch,
) -> Result<WavePlateProgram> {
    split_probs(theta_a)?; // validates theta_a range
    match branch {
        UqsdBranch::Projective => Ok(WavePlateProgram {
            theta4: theta_n - FRAC_PI_4,
            theta5: 0.0,
            theta6: FRAC_PI_4,
            theta7: 0.0,
        }),
        UqsdBranch::Split => {
            let t = (2.0 * theta_a).tan();
            let s = (2.0 * theta_n).sin();
            let c = (2.0 * theta_n).cos();
            if t == 0.0 {
                return Err(Error::AngleOutOfRange {
                    name: "theta_a (split branch needs tan2θ_a > 0)",
                    value: theta_a,
                    lo: 0.0,
                    hi: std::f64::consts::PI / 8.0,
                });
            }
            let theta4 = 0.5 * ((s - 1.0 / t) / c).atan();
            let cos2t4 = (2.0 * theta4).cos();
            let mut arg = (t * s).sqrt() / cos2t4;
            // roundoff may push the argument just past 1; anything further
            // is a construction error
            if arg > 1.0 {
                if arg > 1.0 + 1e-9 {
                    return Err(Error::ArccosDomain(arg));
                }
                arg = 1.0;
            }
            let theta5 = 0.5 * arg.acos();
            let sin2t4 = (2.0 * theta4).sin();
            let sin2t5 = (2.0 * theta5).sin();
            // arccot with range (0, π); atan2 keeps the boundary
            // sin2θ₅ = 0 finite (cot → ±∞ maps to 0 or π)
            let cot = sin2t4 / (cos2t4 * sin2t5);
            let theta7 = 0.5 * f64::atan2(1.0, cot);
            Ok(WavePlateProgram {
                theta4,
                theta5,
                theta6: FRAC_PI_4,
                theta7,
            })
        }
    }
}

/// Wave-plate program for minimum-error discrimination:
/// θ₄ = (π/2 − φ_med)/4 with
/// φ_med = arctan[(cos²2θ_a + sin²2θ_a·cos4θ_n)/(sin²2θ_a·sin4θ_n)];
/// θ₅ = 0, θ₆ = π/4, θ₇ = 0.
///
/// At θ_n ∈ {0, π/4} the formula degenerates (sin4θ_n = 0) and the
/// analytically optimal basis is returned directly: h/v for θ_n = 0 (the
/// states are h and ±v); for θ_n = π/4 the states are identical and any
/// basis is optimal, h/v chosen. With θ_a = 0 the prior is pure path 0 and
/// any basis attains P_r = 1 by always guessing path 0; the formula's limit
/// (θ₄ = 0) is used.
pub fn med_program(theta_a: f64, theta_n: f64) -> Result<WavePlateProgram> {
    split_probs(theta_a)?;
    let s4 = (4.0 * theta_n).sin();
    let theta4 = if s4.abs() < 1e-15 {
        0.0
    } else {
        let ca = (2.0 * theta_a).cos();
        let sa = (2.0 * theta_a).sin();
        let num = ca * ca + sa * sa * (4.0 * theta_n).cos();
        let den = sa * sa * s4;
        if den == 0.0 {
            0.0
        } else {
            let phi_med = (num / den).atan();
            (std::f64::consts::FRAC_PI_2 - phi_med) / 4.0
        }
    };
    Ok(WavePlateProgram {
        theta4,
        theta5: 0.0,
        theta6: FRAC_PI_4,
        theta7: 0.0,
    })
}

/// The composed measurement-loop unitary on the 4-dimensional space. The
/// input beam occupies path 0; detector modes after the loop are
/// D₂ ↔ output path 0 (both polarizations), D₀ ↔ |1,h⟩, D₁ ↔ |1,v⟩.
pub fn second_loop_unitary(program: &WavePlateProgram) -> CMat {
    let h4 = on_path(0, &hwp_std(program.theta4)).unwrap();
    let h5 = on_path(1, &hwp_std(program.theta5)).unwrap();
    let h6 = on_path(0, &hwp_std(program.theta6)).unwrap();
    let h7 = on_path(1, &hwp_std(program.theta7)).unwrap();
    h7.matmul(&pbs())
        .unwrap()
        .matmul(&h5)
        .unwrap()
        .matmul(&h6)
        .unwrap()
        .matmul(&pbs())
        .unwrap()
        .matmul(&h4)
        .unwrap()
}

/// Orthonormal basis of the enlarged space splitting the two which-way
/// states into unambiguous parts and a common (inconclusive) part:
/// d₁ = α·q₁ + β·q₂ and d₂ = γ·q₃ + δ·q₂, with |α|²+|β|² = |γ|²+|δ|² = 1.
///
/// `methods_residual` is the largest entrywise deviation between the POVM
/// elements built from the pipeline pullback and those built from the
/// literal closed-form operator products; values beyond 1e−8 would flag a
/// construction discrepancy (none occurs; the two constructions agree to
/// machine precision).
#[derive(Debug, Clone)]
pub struct UqsdDecomposition {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
    pub q1: CVec,
    pub q2: CVec,
    pub q3: CVec,
    pub methods_residual: f64,
}

fn embed_path0(pol: &CVec) -> CVec {
    tensor_vec(&CVec::basis(2, 0).unwrap(), pol).unwrap()
}

/// Literal closed-form construction of the (polarization-space) q vectors:
/// q₁ = R†₄(P_v σ₁ P_h + P_h R†₅ P_v) R†₇ |h⟩,
/// q₂ = R†₄ P_h R†₅ |h⟩,
/// q₃ = R†₄(P_v σ₁ P_h + P_h R†₅ P_v) R†₇ |v⟩,
/// with R the textbook plate matrices of the program. These are the
/// compressions of the pipeline's detector modes onto the input space.
pub fn uqsd_methods_vectors(program: &WavePlateProgram) -> (CVec, CVec, CVec) {
    let r4 = hwp_std(program.theta4);
    let r5 = hwp_std(program.theta5);
    let r7 = hwp_std(program.theta7);
    let p_h = projector(&CVec::basis(2, 0).unwrap());
    let p_v = projector(&CVec::basis(2, 1).unwrap());
    let sigma1 = CMat::from_reals(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    let comp = p_v
        .matmul(&sigma1)
        .unwrap()
        .matmul(&p_h)
        .unwrap()
        .add(&p_h.matmul(&adjoint(&r5)).unwrap().matmul(&p_v).unwrap())
        .unwrap();
    let back = adjoint(&r4).matmul(&comp).unwrap().matmul(&adjoint(&r7)).unwrap();
    let q1 = back.matvec(&CVec::basis(2, 0).unwrap()).unwrap();
    let q3 = back.matvec(&CVec::basis(2, 1).unwrap()).unwrap();
    let q2 = adjoint(&r4)
        .matmul(&p_h)
        .unwrap()
        .matmul(&adjoint(&r5))
        .unwrap()
        .matvec(&CVec::basis(2, 0).unwrap())
        .unwrap();
    (q1, q2, q3)
}

/// Build the 3-outcome UQSD POVM for a program, on the 4-dimensional
/// measurement space, together with the orthogonal-basis decomposition.
///
/// π(D₀) = |q₁⟩⟨q₁| and π(D₁) = |q₃⟩⟨q₃| are the detector pullbacks through
/// the loop unitary; π(D₂) = I − π(D₀) − π(D₁) covers both polarization
/// modes of the D₂ exit (the mode beyond |q₂⟩ is dark for any physical
/// input, which enters on path 0).
pub fn uqsd_povm(
    program: &WavePlateProgram,
    theta_a: f64,
    theta_n: f64,
) -> Result<(PovmSet, UqsdDecomposition)> {
    split_probs(theta_a)?;
    let u = second_loop_unitary(program);
    let ud = adjoint(&u);
    let q1 = ud.matvec(&CVec::basis(4, 2).unwrap())?; // |1,h> -> D0
    let q3 = ud.matvec(&CVec::basis(4, 3).unwrap())?; // |1,v> -> D1
    let q2 = ud.matvec(&CVec::basis(4, 0).unwrap())?; // |0,h> -> D2

    let pi0 = projector(&q1);
    let pi1 = projector(&q3);
    let pi2 = CMat::identity(4)?.sub(&pi0)?.sub(&pi1)?;

    // cross-check: the literal operator products must reproduce the POVM
    // compressed onto the physical input subspace (path 0)
    let (m1, m2, m3) = uqsd_methods_vectors(program);
    let mut residual = 0.0_f64;
    for (q, m) in [(&q1, &m1), (&q2, &m2), (&q3, &m3)] {
        let compressed = CVec::new(vec![q[0], q[1]])?;
        let diff = projector(&compressed).max_abs_diff(&projector(m));
        residual = residual.max(diff);
    }
    if residual > 1e-8 {
        return Err(Error::InvalidPovm(format!(
            "closed-form operator products deviate from the pipeline by {residual:e}"
        )));
    }

    let (d1, d2, _) = wwd_states(theta_n);
    let s1 = embed_path0(&d1);
    let s2 = embed_path0(&d2);
    let decomposition = UqsdDecomposition {
        alpha: inner(&q1, &s1)?,
        beta: inner(&q2, &s1)?,
        gamma: inner(&q3, &s2)?,
        delta: inner(&q2, &s2)?,
        q1,
        q2,
        q3,
        methods_residual: residual,
    };

    let povm = PovmSet::new(vec![
        (
            pi0,
            OutcomeLabel {
                detector: Detector::D0,
                meaning: OutcomeMeaning::ConclusivePath0,
            },
        ),
        (
            pi1,
            OutcomeLabel {
                detector: Detector::D1,
                meaning: OutcomeMeaning::ConclusivePath1,
            },
        ),
        (
            pi2,
            OutcomeLabel {
                detector: Detector::D2,
                meaning: OutcomeMeaning::Inconclusive,
            },
        ),
    ])?;
    Ok((povm, decomposition))
}

/// Two-outcome projective MED measurement in polarization space:
/// π(D₂) = R†₄|h⟩⟨h|R₄ (guess path 0), π(D₀) = R†₄|v⟩⟨v|R₄ (guess path 1).
pub fn med_projectors(theta4: f64) -> PovmSet {
    let r4 = hwp_std(theta4);
    let h_back = adjoint(&r4).matvec(&CVec::basis(2, 0).unwrap()).unwrap();
    let v_back = adjoint(&r4).matvec(&CVec::basis(2, 1).unwrap()).unwrap();
    PovmSet::new(vec![
        (
            projector(&h_back),
            OutcomeLabel {
                detector: Detector::D2,
                meaning: OutcomeMeaning::GuessPath0,
            },
        ),
        (
            projector(&v_back),
            OutcomeLabel {
                detector: Detector::D0,
                meaning: OutcomeMeaning::GuessPath1,
            },
        ),
    ])
    .expect("two elements, uniform dim")
}

/// Which single-path inputs to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathCondition {
    Path0Only,
    Path1Only,
    Both,
}

/// Conditional (and, with both paths, joint) outcome probabilities of a
/// POVM on the which-way states.
#[derive(Debug, Clone)]
pub struct DiscriminationOutcome {
    pub labels: Vec<OutcomeLabel>,
    pub priors: (f64, f64),
    /// `conditional[j]` is Some(row) when path j was requested; row\[k\] is
    /// P(outcome k | photon took path j) and sums to 1.
    pub conditional: [Option<Vec<f64>>; 2],
}

impl DiscriminationOutcome {
    /// Joint probabilities p_j · P(outcome k | path j); requires both rows.
    pub fn joint(&self) -> Option<Vec<[f64; 2]>> {
        let row0 = self.conditional[0].as_ref()?;
        let row1 = self.conditional[1].as_ref()?;
        Some(
            row0.iter()
                .zip(row1)
                .map(|(&a, &b)| [self.priors.0 * a, self.priors.1 * b])
                .collect(),
        )
    }

    pub fn probability(&self, path: usize, detector: Detector) -> Option<f64> {
        let row = self.conditional[path].as_ref()?;
        let idx = self.labels.iter().position(|l| l.detector == detector)?;
        Some(row[idx])
    }

    /// Total probability of an error-free outcome, weighted by priors.
    pub fn unambiguous_probability(&self) -> Option<f64> {
        let joint = self.joint()?;
        let mut acc = 0.0;
        for (k, label) in self.labels.iter().enumerate() {
            match label.meaning {
                OutcomeMeaning::ConclusivePath0 => acc += joint[k][0],
                OutcomeMeaning::ConclusivePath1 => acc += joint[k][1],
                _ => {}
            }
        }
        Some(acc)
    }

    /// Probability that the guess implied by the outcome is right.
    pub fn correct_guess_probability(&self) -> Option<f64> {
        let joint = self.joint()?;
        let mut acc = 0.0;
        for (k, label) in self.labels.iter().enumerate() {
            match label.meaning {
                OutcomeMeaning::GuessPath0 | OutcomeMeaning::ConclusivePath0 => acc += joint[k][0],
                OutcomeMeaning::GuessPath1 | OutcomeMeaning::ConclusivePath1 => acc += joint[k][1],
                OutcomeMeaning::Inconclusive => {}
            }
        }
        Some(acc)
    }
}

/// Evaluate a POVM on the which-way states for the given priors. A dim-4
/// POVM sees the states embedded on input path 0; a dim-2 POVM acts on the
/// polarization directly.
pub fn outcome_probabilities(
    povm: &PovmSet,
    theta_a: f64,
    theta_n: f64,
    condition: PathCondition,
) -> Result<DiscriminationOutcome> {
    let (p1, p2) = split_probs(theta_a)?;
    let (d1, d2, _) = wwd_states(theta_n);
    let states: [CVec; 2] = match povm.dim() {
        2 => [d1, d2],
        4 => [embed_path0(&d1), embed_path0(&d2)],
        d => return Err(Error::UnsupportedDimension(d)),
    };
    let want = |j: usize| match condition {
        PathCondition::Path0Only => j == 0,
        PathCondition::Path1Only => j == 1,
        PathCondition::Both => true,
    };
    let mut conditional: [Option<Vec<f64>>; 2] = [None, None];
    for (j, state) in states.iter().enumerate() {
        if !want(j) {
            continue;
        }
        let mut row = Vec::with_capacity(povm.len());
        for (m, _) in povm.elements() {
            row.push(m.expectation(state)?.max(0.0));
        }
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPovm(format!(
                "outcome probabilities for path {j} sum to {total}"
            )));
        }
        conditional[j] = Some(row);
    }
    Ok(DiscriminationOutcome {
        labels: povm.labels(),
        priors: (p1, p2),
        conditional,
    })
}

/// Mutual information (bits) between the prepared state index and the
/// measurement outcome:
/// H(A:B) = Σ_ij p_i·Tr(ρ̂_i π̂_j)·log₂[Tr(ρ̂_i π̂_j)/Tr(ρ̂ π̂_j)],
/// with ρ̂ = Σ_i p_i ρ̂_i and 0·log(0/x) := 0.
pub fn mutual_information(priors: &[f64], states: &[CVec], povm: &PovmSet) -> Result<f64> {
    if priors.len() != states.len() {
        return Err(Error::DimensionMismatch {
            left: priors.len(),
            right: states.len(),
        });
    }
    let sum: f64 = priors.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || priors.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidScenario(format!(
            "priors sum to {sum}, expected 1"
        )));
    }
    let mut cond = Vec::with_capacity(states.len());
    for s in states {
        if s.dim() != povm.dim() {
            return Err(Error::DimensionMismatch {
                left: s.dim(),
                right: povm.dim(),
            });
        }
        let row: Vec<f64> = povm
            .elements()
            .iter()
            .map(|(m, _)| m.expectation(s).map(|p| p.max(0.0)))
            .collect::<Result<_>>()?;
        cond.push(row);
    }
    let mut mi = 0.0;
    for j in 0..povm.len() {
        let marginal: f64 = priors.iter().zip(&cond).map(|(&p, row)| p * row[j]).sum();
        for (i, row) in cond.iter().enumerate() {
            let joint = priors[i] * row[j];
            if joint > 0.0 {
                assert!(marginal > 0.0, "marginal vanishes under a nonzero joint");
                mi += joint * (row[j] / marginal).log2();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Convenience: exact mutual information of a strategy at a setting.
pub fn strategy_mutual_information(strategy: Strategy, theta_a: f64, theta_n: f64) -> Result<f64> {
    let (p1, p2) = split_probs(theta_a)?;
    let (d1, d2, _) = wwd_states(theta_n);
    match strategy {
        Strategy::Uqsd => {
            let program = uqsd_program(theta_a, theta_n)?;
            let (povm, _) = uqsd_povm(&program, theta_a, theta_n)?;
            mutual_information(
                &[p1, p2],
                &[embed_path0(&d1), embed_path0(&d2)],
                &povm,
            )
        }
        Strategy::Med => {
            let program = med_program(theta_a, theta_n)?;
            let povm = med_projectors(program.theta4);
            mutual_information(&[p1, p2], &[d1, d2], &povm)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::validate_povm;
    use std::f64::consts::PI;

    const FRAC_PI_8: f64 = PI / 8.0;

    fn angles(tan2a: f64, sin2n: f64) -> (f64, f64) {
        (tan2a.atan() / 2.0, sin2n.asin() / 2.0)
    }

    fn priors_of(tan2a: f64) -> (f64, f64) {
        let p1 = 1.0 / (1.0 + tan2a * tan2a);
        (p1, 1.0 - p1)
    }

    #[test]
    fn uqsd_bound_values() {
        // orthogonal states are fully distinguishable
        assert!((uqsd_bound(0.7, 0.3, 0.0).unwrap() - 1.0).abs() < 1e-15);
        // symmetric priors, overlap 0.2
        let du = uqsd_bound(0.5, 0.5, (0.2_f64).asin() / 2.0).unwrap();
        assert!((du - 0.8).abs() < 1e-12);
        // shallow-asymmetry setting lands in the projective branch
        let (p1, p2) = priors_of(0.28);
        let du = uqsd_bound(p1, p2, (0.9_f64).asin() / 2.0).unwrap();
        assert!((du - 0.176_186_943_620_178).abs() < 1e-12);
        // inverted priors rejected
        assert!(uqsd_bound(0.3, 0.7, 0.1).is_err());
    }

    #[test]
    fn helstrom_values() {
        assert!((helstrom(0.6, 0.4, 0.0).unwrap() - 1.0).abs() < 1e-15);
        // identical states: coin flip
        assert!((helstrom(0.5, 0.5, FRAC_PI_4).unwrap() - 0.5).abs() < 1e-15);
        let (p1, p2) = priors_of(0.38);
        let pr = helstrom(p1, p2, (0.2_f64).asin() / 2.0).unwrap();
        assert!((pr - 0.995_570_041_406_658).abs() < 1e-12);
    }

    #[test]
    fn helstrom_matches_grid_search_oracle() {
        // independent oracle: 1-D search over projective measurement angle,
        // golden-section refined
        let golden = |p1: f64, p2: f64, d1: &CVec, d2: &CVec| -> f64 {
            let pc = |psi: f64| {
                let b1 = CVec::from_reals(&[psi.cos(), psi.sin()]).unwrap();
                let b2 = CVec::from_reals(&[-psi.sin(), psi.cos()]).unwrap();
                p1 * inner(&b1, d1).unwrap().norm_sqr() + p2 * inner(&b2, d2).unwrap().norm_sqr()
            };
            let mut best = (0.0, pc(0.0));
            let n = 2000;
            for k in 0..=n {
                let psi = PI * k as f64 / n as f64;
                let v = pc(psi);
                if v > best.1 {
                    best = (psi, v);
                }
            }
            let (mut lo, mut hi) = (best.0 - PI / n as f64, best.0 + PI / n as f64);
            let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
            while hi - lo > 1e-13 {
                let a = hi - inv_phi * (hi - lo);
                let b = lo + inv_phi * (hi - lo);
                if pc(a) < pc(b) {
                    lo = a;
                } else {
                    hi = b;
                }
            }
            pc(0.5 * (lo + hi))
        };
        for &(t2a, s2n) in &[(0.38, 0.2), (0.28, 0.9), (1.0, 0.5), (0.1, 0.99)] {
            let (ta, tn) = angles(t2a, s2n);
            let (p1, p2) = split_probs(ta).unwrap();
            let (d1, d2, _) = wwd_states(tn);
            let oracle = golden(p1, p2, &d1, &d2);
            let closed = helstrom(p1, p2, tn).unwrap();
            assert!(
                (oracle - closed).abs() < 1e-10,
                "({t2a},{s2n}): oracle {oracle} vs closed {closed}"
            );
        }
    }

    #[test]
    fn dm_identity_with_visibility() {
        for &(t2a, s2n) in &[(0.38, 0.2), (0.28, 0.9), (0.77, 0.44)] {
            let (ta, tn) = angles(t2a, s2n);
            let (p1, p2) = split_probs(ta).unwrap();
            let dm = dm_closed_form(p1, p2, tn).unwrap();
            let v = crate::interferometer::visibility_closed_form(ta, tn).unwrap();
            assert!((dm * dm + v * v - 1.0).abs() < 1e-12);
        }
        let (p1, p2) = priors_of(0.38);
        let dm = dm_closed_form(p1, p2, (0.2_f64).asin() / 2.0).unwrap();
        assert!((dm - 0.991_140_082_813_315).abs() < 1e-12);
    }

    #[test]
    fn uqsd_program_symmetric_orthogonal() {
        // symmetric split, orthogonal states: θ₄ = -π/8, θ₅ = π/4, and the
        // measurement never returns inconclusive
        let program = uqsd_program(FRAC_PI_8, 0.0).unwrap();
        assert!((program.theta4 + FRAC_PI_8).abs() < 1e-12);
        assert!((program.theta5 - FRAC_PI_4).abs() < 1e-12);
        let (povm, _) = uqsd_povm(&program, FRAC_PI_8, 0.0).unwrap();
        let out = outcome_probabilities(&povm, FRAC_PI_8, 0.0, PathCondition::Both).unwrap();
        let joint = out.joint().unwrap();
        let idx_d2 = out
            .labels
            .iter()
            .position(|l| l.detector == Detector::D2)
            .unwrap();
        assert!(joint[idx_d2][0] + joint[idx_d2][1] < 1e-12);
    }

    #[test]
    fn uqsd_povm_attains_bound() {
        for &(t2a, s2n) in &[
            (0.38, 0.2),
            (0.28, 0.9),
            (1.0, 0.5),
            (0.6, 0.6),
            (0.12, 0.85),
            (1.0, 1.0),
        ] {
            let (ta, tn) = angles(t2a, s2n);
            let (p1, p2) = split_probs(ta).unwrap();
            let program = uqsd_program(ta, tn).unwrap();
            let (povm, decomposition) = uqsd_povm(&program, ta, tn).unwrap();
            assert!(validate_povm(&povm).is_valid());
            let out = outcome_probabilities(&povm, ta, tn, PathCondition::Both).unwrap();
            let du = out.unambiguous_probability().unwrap();
            let bound = uqsd_bound(p1, p2, tn).unwrap();
            assert!(
                (du - bound).abs() < 1e-9,
                "({t2a},{s2n}): povm {du} vs bound {bound}"
            );
            // unambiguity
            assert!(out.probability(0, Detector::D1).unwrap() < 1e-10);
            assert!(out.probability(1, Detector::D0).unwrap() < 1e-10);
            // decomposition invariants
            let a2b2 = decomposition.alpha.norm_sqr() + decomposition.beta.norm_sqr();
            let g2d2 = decomposition.gamma.norm_sqr() + decomposition.delta.norm_sqr();
            assert!((a2b2 - 1.0).abs() < 1e-10, "|α|²+|β|² = {a2b2}");
            assert!((g2d2 - 1.0).abs() < 1e-10);
            for (x, y) in [
                (&decomposition.q1, &decomposition.q2),
                (&decomposition.q1, &decomposition.q3),
                (&decomposition.q2, &decomposition.q3),
            ] {
                assert!(inner(x, y).unwrap().norm() < 1e-10);
            }
            assert!(decomposition.methods_residual < 1e-12);
        }
    }

    #[test]
    fn uqsd_steep_setting_inconclusive_probability() {
        // the total inconclusive probability equals the visibility, 0.1328…,
        // at the steep-asymmetry reference setting
        let (ta, tn) = angles(0.38, 0.2);
        let program = uqsd_program(ta, tn).unwrap();
        let (povm, _) = uqsd_povm(&program, ta, tn).unwrap();
        let out = outcome_probabilities(&povm, ta, tn, PathCondition::Both).unwrap();
        let du = out.unambiguous_probability().unwrap();
        assert!((1.0 - du - 0.132_820_692_065_711).abs() < 1e-12);
    }

    #[test]
    fn uqsd_branch_continuity() {
        for &s in &[0.2, 0.5, 0.9] {
            let (ta, tn) = angles(s, s);
            let (p1, p2) = split_probs(ta).unwrap();
            let mut dus = Vec::new();
            for branch in [UqsdBranch::Split, UqsdBranch::Projective] {
                let program = uqsd_program_with_branch(ta, tn, branch).unwrap();
                let (povm, _) = uqsd_povm(&program, ta, tn).unwrap();
                let out = outcome_probabilities(&povm, ta, tn, PathCondition::Both).unwrap();
                dus.push(out.unambiguous_probability().unwrap());
            }
            assert!(
                (dus[0] - dus[1]).abs() < 1e-9,
                "boundary {s}: {} vs {}",
                dus[0],
                dus[1]
            );
            assert!((dus[1] - (p1 - p2)).abs() < 1e-12);
        }
    }

    #[test]
    fn med_program_degenerate_inputs() {
        // θ_n = 0: h/v measurement distinguishes perfectly
        let (ta, _) = angles(0.38, 0.0);
        let program = med_program(ta, 0.0).unwrap();
        assert_eq!(program.theta4, 0.0);
        let povm = med_projectors(program.theta4);
        let out = outcome_probabilities(&povm, ta, 0.0, PathCondition::Both).unwrap();
        assert!((out.correct_guess_probability().unwrap() - 1.0).abs() < 1e-12);
        // θ_n = π/4: identical states, best is the prior
        let program = med_program(ta, FRAC_PI_4).unwrap();
        let povm = med_projectors(program.theta4);
        let out = outcome_probabilities(&povm, ta, FRAC_PI_4, PathCondition::Both).unwrap();
        let (p1, _) = split_probs(ta).unwrap();
        assert!((out.correct_guess_probability().unwrap() - p1).abs() < 1e-12);
    }

    #[test]
    fn med_program_attains_helstrom() {
        for &(t2a, s2n) in &[(0.38, 0.2), (0.28, 0.9), (1.0, 0.5), (0.15, 0.97)] {
            let (ta, tn) = angles(t2a, s2n);
            let (p1, p2) = split_probs(ta).unwrap();
            let program = med_program(ta, tn).unwrap();
            assert_eq!(program.theta5, 0.0);
            assert_eq!(program.theta7, 0.0);
            let povm = med_projectors(program.theta4);
            assert!(validate_povm(&povm).is_valid());
            let out = outcome_probabilities(&povm, ta, tn, PathCondition::Both).unwrap();
            let pc = out.correct_guess_probability().unwrap();
            let bound = helstrom(p1, p2, tn).unwrap();
            assert!(
                (pc - bound).abs() < 1e-10,
                "({t2a},{s2n}): projective {pc} vs helstrom {bound}"
            );
        }
    }

    #[test]
    fn med_projectors_sum_to_identity() {
        for &t4 in &[0.0, 0.3, -0.8] {
            let povm = med_projectors(t4);
            let report = validate_povm(&povm);
            assert!(report.is_valid());
            assert!(report.completeness_residual < 1e-14);
        }
    }

    #[test]
    fn outcome_rows_sum_to_one() {
        let (ta, tn) = angles(0.5, 0.7);
        let program = uqsd_program(ta, tn).unwrap();
        let (povm, _) = uqsd_povm(&program, ta, tn).unwrap();
        let out = outcome_probabilities(&povm, ta, tn, PathCondition::Both).unwrap();
        for row in out.conditional.iter().flatten() {
            let total: f64 = row.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        // single-path conditions populate only the requested row
        let out = outcome_probabilities(&povm, ta, tn, PathCondition::Path1Only).unwrap();
        assert!(out.conditional[0].is_none() && out.conditional[1].is_some());
    }

    #[test]
    fn identical_states_give_equal_rows() {
        let (ta, tn) = angles(0.6, 1.0);
        let program = uqsd_program(ta, tn).unwrap();
        let (povm, _) = uqsd_povm(&program, ta, tn).unwrap();
        let out = outcome_probabilities(&povm, ta, tn, PathCondition::Both).unwrap();
        let r0 = out.conditional[0].as_ref().unwrap();
        let r1 = out.conditional[1].as_ref().unwrap();
        for (a, b) in r0.iter().zip(r1) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mutual_information_limits() {
        // identical states carry no information
        let mi = strategy_mutual_information(Strategy::Med, FRAC_PI_8, FRAC_PI_4).unwrap();
        assert!(mi.abs() < 1e-12);
        // orthogonal states + MED: noiseless channel, MI = source entropy
        let (ta, _) = angles(0.38, 0.0);
        let (p1, p2) = split_probs(ta).unwrap();
        let mi = strategy_mutual_information(Strategy::Med, ta, 0.0).unwrap();
        let entropy = -p1 * p1.log2() - p2 * p2.log2();
        assert!((mi - entropy).abs() < 1e-12);
    }

    #[test]
    fn med_gains_more_information_than_uqsd() {
        for &s2n in &[0.2, 0.9] {
            for k in 1..=10 {
                let t2a = k as f64 / 10.0;
                let (ta, tn) = angles(t2a, s2n);
                let med = strategy_mutual_information(Strategy::Med, ta, tn).unwrap();
                let uqsd = strategy_mutual_information(Strategy::Uqsd, ta, tn).unwrap();
                assert!(
                    med >= uqsd - 1e-12,
                    "({t2a},{s2n}): MED {med} < UQSD {uqsd}"
                );
            }
        }
    }

    #[test]
    fn mutual_information_validates_inputs() {
        let (d1, d2, _) = wwd_states(0.2);
        let povm = med_projectors(0.1);
        assert!(mutual_information(&[0.7, 0.7], &[d1.clone(), d2.clone()], &povm).is_err());
        assert!(mutual_information(&[1.0], &[d1, d2], &povm).is_err());
    }
}
