//! Stochastic photon-counting emulation: seeded sampling of detector
//! clicks, path-blocking runs, repeat statistics, and the count-based
//! estimators for visibility and distinguishability.
//!
//! Reproducibility contract: a [`CountRecord`] is a pure function of
//! (config, strategy, noise, master seed). Every (setting, repeat) pair
//! derives an independent RNG stream from the master seed, so results do
//! not depend on evaluation order or worker count.

use crate::discrimination::{
    med_program, med_projectors, outcome_probabilities, uqsd_povm, uqsd_program, PathCondition,
    Strategy,
};
use crate::error::{Error, Result};
use crate::interferometer::{evolve, ExperimentConfig};
use crate::linalg::{norm_sq, CVec, Detector, PovmSet};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use std::f64::consts::PI;

/// How counts are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountingMode {
    /// Poisson-distributed totals, multinomially assigned to detectors.
    Sampled,
    /// Infinite-budget limit: expected counts are used directly, no
    /// randomness. Estimators then reproduce the closed forms exactly.
    Expected,
}

/// How the per-path counts N_ij are gathered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockedProtocol {
    /// Two separate runs, one per open path: the bench protocol. The
    /// single-path input is renormalized to its prior.
    PhysicalBlocking,
    /// Debug mode: one run with both paths notionally open; each photon is
    /// tagged with its ground-truth path (drawn from the priors) before
    /// detector assignment. Same expectations, different correlations.
    GroundTruthTagging,
}

/// Photon-counting conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Source rate, photons per second.
    pub mean_rate: f64,
    /// Counting duration per measurement, seconds.
    pub duration: f64,
    /// Number of repeated measurements used for error bars.
    pub repeats: usize,
    /// Measured interference contrast floor of the loops. Carried here as
    /// the apparatus datum; the physics uses `ExperimentConfig::loop_visibility`.
    pub loop_visibility: f64,
    /// Phase points in a sweep, uniform on [0, 2π) starting at 0.
    pub n_phases: usize,
    pub mode: CountingMode,
    pub blocked_protocol: BlockedProtocol,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            mean_rate: 10_000.0,
            duration: 0.5,
            repeats: 5,
            loop_visibility: 0.9867,
            n_phases: 24,
            mode: CountingMode::Sampled,
            blocked_protocol: BlockedProtocol::PhysicalBlocking,
        }
    }
}

impl NoiseModel {
    /// Photons per setting (the Poisson mean).
    pub fn budget(&self) -> f64 {
        self.mean_rate * self.duration
    }

    pub fn with_budget(mut self, photons: f64) -> Self {
        self.mean_rate = photons;
        self.duration = 1.0;
        self
    }

    pub fn phase_grid(&self) -> Vec<f64> {
        (0..self.n_phases)
            .map(|k| 2.0 * PI * k as f64 / self.n_phases as f64)
            .collect()
    }
}

/// Counts at one phase point, per detector and repeat:
/// `counts[d][r]` with detector order D_v, D₀, D₁, D₂.
#[derive(Debug, Clone)]
pub struct PhasePoint {
    pub phi: f64,
    pub counts: [Vec<f64>; 4],
}

pub const DET_V: usize = 0;
pub const DET_D0: usize = 1;
pub const DET_D1: usize = 2;
pub const DET_D2: usize = 3;

/// Counts with one path blocked: `per_path[j][r]` is the count at
/// `detector` with path j open, repeat r.
#[derive(Debug, Clone)]
pub struct BlockedCounts {
    pub detector: Detector,
    pub per_path: [Vec<f64>; 2],
}

/// Detector counts for one experimental configuration: the phase sweep
/// N_v(φ) (with the other detectors recorded alongside) and the blocked
/// runs N_ij. Counts are integers when sampled; the infinite-budget mode
/// stores expected counts.
#[derive(Debug, Clone)]
pub struct CountRecord {
    pub strategy: Strategy,
    pub seed: u64,
    pub budget: f64,
    pub phase_sweep: Vec<PhasePoint>,
    pub blocked: Vec<BlockedCounts>,
}

/// Mean and one-standard-deviation spread over repeats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

impl Estimate {
    fn from_repeats(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sigma = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { value: mean, sigma }
    }

    /// a + b with errors added in quadrature (independent samples).
    pub fn sum(a: Estimate, b: Estimate) -> Estimate {
        Estimate {
            value: a.value + b.value,
            sigma: (a.sigma * a.sigma + b.sigma * b.sigma).sqrt(),
        }
    }

    /// a² + b² with first-order error propagation.
    pub fn sum_of_squares(a: Estimate, b: Estimate) -> Estimate {
        Estimate {
            value: a.value * a.value + b.value * b.value,
            sigma: ((2.0 * a.value * a.sigma).powi(2) + (2.0 * b.value * b.sigma).powi(2)).sqrt(),
        }
    }
}

/// Estimates for one record: visibility, the strategy's distinguishability,
/// and the duality sum V + D_u (linear) or V² + D_m² (quadratic), with
/// propagated one-standard-deviation errors.
#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub strategy: Strategy,
    pub visibility: Estimate,
    pub distinguishability: Estimate,
    pub duality_sum: Estimate,
}

// ---- seed derivation -------------------------------------------------

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream seed for a (setting, repeat) cell.
pub fn derive_seed(master: u64, setting: u64, repeat: u64) -> u64 {
    splitmix(splitmix(master ^ splitmix(setting)) ^ splitmix(repeat.wrapping_add(0x51ed)))
}

fn stream_rng(master: u64, setting: u64, repeat: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, setting, repeat))
}

// ---- click probabilities ---------------------------------------------

fn uqsd_povm_for(config: &ExperimentConfig) -> Result<PovmSet> {
    let program = uqsd_program(config.theta_a, config.theta_n)?;
    Ok(uqsd_povm(&program, config.theta_a, config.theta_n)?.0)
}

fn med_povm_for(config: &ExperimentConfig) -> Result<PovmSet> {
    let program = med_program(config.theta_a, config.theta_n)?;
    Ok(med_projectors(program.theta4))
}

fn strategy_povm(config: &ExperimentConfig, strategy: Strategy) -> Result<PovmSet> {
    match strategy {
        Strategy::Uqsd => uqsd_povm_for(config),
        Strategy::Med => med_povm_for(config),
    }
}

fn povm_probs_on(povm: &PovmSet, pol: &CVec) -> Result<Vec<f64>> {
    let state = match povm.dim() {
        2 => pol.clone(),
        4 => crate::linalg::tensor_vec(&CVec::basis(2, 0)?, pol)?,
        d => return Err(Error::UnsupportedDimension(d)),
    };
    povm.elements()
        .iter()
        .map(|(m, _)| m.expectation(&state).map(|p| p.max(0.0)))
        .collect()
}

/// Click probabilities per detector [D_v, D₀, D₁, D₂] with both paths open
/// at the configured phase. The loop-visibility contrast multiplier enters
/// as a coherent/dephased mixture, which reduces to scaling every
/// interference cross-term by η.
pub fn click_probabilities(config: &ExperimentConfig, povm: &PovmSet) -> Result<[f64; 4]> {
    let eta = config.loop_visibility;
    let pair = evolve(config);
    let p_dv_coh = norm_sq(&pair.psi_v);
    // coherent branch: sub-normalized ψ_d drives the measurement loop
    let probs_coh = povm_probs_on(povm, &pair.psi_d)?;
    // dephased branch: statistical mixture of the two single-path branches
    let (p1, p2) = config.priors();
    let (d1, d2, _) = crate::interferometer::wwd_states(config.theta_n);
    let m1 = povm_probs_on(povm, &d1)?;
    let m2 = povm_probs_on(povm, &d2)?;
    // each single-path branch reaches the splitter alone: half to each exit
    let probs_deph: Vec<f64> = m1
        .iter()
        .zip(&m2)
        .map(|(&a, &b)| 0.5 * (p1 * a + p2 * b))
        .collect();
    let p_dv = eta * p_dv_coh + (1.0 - eta) * 0.5;
    let mut out = [p_dv, 0.0, 0.0, 0.0];
    for (k, (_, label)) in povm.elements().iter().enumerate() {
        let p = eta * probs_coh[k] + (1.0 - eta) * probs_deph[k];
        out[1 + label.detector.index()] += p;
    }
    Ok(out)
}

/// Detector probabilities [D₀, D₁, D₂] with only path j open, scaled by the
/// prior p_j (the blocked fraction of photons is absorbed upstream).
pub fn blocked_probabilities(
    config: &ExperimentConfig,
    strategy: Strategy,
    path: usize,
) -> Result<[f64; 3]> {
    let povm = strategy_povm(config, strategy)?;
    let condition = if path == 0 {
        PathCondition::Path0Only
    } else {
        PathCondition::Path1Only
    };
    let out = outcome_probabilities(&povm, config.theta_a, config.theta_n, condition)?;
    let row = out.conditional[path].as_ref().expect("requested row");
    let prior = if path == 0 { out.priors.0 } else { out.priors.1 };
    let mut probs = [0.0; 3];
    for (k, label) in out.labels.iter().enumerate() {
        probs[label.detector.index()] += prior * row[k];
    }
    Ok(probs)
}

/// Draw a Poisson total and split it multinomially over `probs` (which may
/// sum to less than 1; the remainder is lost photons). Returns one count
/// per probability entry.
fn sample_multinomial(rng: &mut ChaCha8Rng, mean: f64, probs: &[f64]) -> Vec<f64> {
    let total = if mean > 0.0 {
        Poisson::new(mean).expect("positive mean").sample(rng)
    } else {
        0.0
    };
    let mut remaining = total.round() as u64;
    let mut prob_left = 1.0_f64;
    let mut out = Vec::with_capacity(probs.len());
    for &p in probs {
        if remaining == 0 || prob_left <= 0.0 {
            out.push(0.0);
            continue;
        }
        let q = (p / prob_left).clamp(0.0, 1.0);
        let n = if q >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, q).expect("valid binomial").sample(rng)
        };
        out.push(n as f64);
        remaining -= n;
        prob_left -= p;
    }
    out
}

/// Simulate the full counting protocol for one configuration: a phase sweep
/// with both paths open, then blocked runs for each path, all repeated.
///
/// Deterministic given (config, strategy, noise, seed); every
/// (setting, repeat) cell has its own derived RNG stream.
pub fn sample_counts(
    config: &ExperimentConfig,
    strategy: Strategy,
    noise: &NoiseModel,
    seed: u64,
) -> Result<CountRecord> {
    let budget = noise.budget();
    if !budget.is_finite() || budget <= 0.0 {
        return Err(Error::ZeroPhotonBudget(budget));
    }
    if noise.n_phases < 2 {
        return Err(Error::DegeneratePhaseSweep);
    }
    let povm = strategy_povm(config, strategy)?;

    let mut phase_sweep = Vec::with_capacity(noise.n_phases);
    for (k, phi) in noise.phase_grid().into_iter().enumerate() {
        let cfg = config.with_phi(phi);
        let probs = click_probabilities(&cfg, &povm)?;
        let mut counts: [Vec<f64>; 4] = Default::default();
        for r in 0..noise.repeats {
            let drawn = match noise.mode {
                CountingMode::Sampled => {
                    let mut rng = stream_rng(seed, k as u64, r as u64);
                    sample_multinomial(&mut rng, budget, &probs)
                }
                CountingMode::Expected => probs.iter().map(|p| p * budget).collect(),
            };
            for d in 0..4 {
                counts[d].push(drawn[d]);
            }
        }
        phase_sweep.push(PhasePoint { phi, counts });
    }

    let detectors = match strategy {
        Strategy::Uqsd => vec![Detector::D0, Detector::D1, Detector::D2],
        Strategy::Med => vec![Detector::D0, Detector::D2],
    };
    let mut blocked: Vec<BlockedCounts> = detectors
        .iter()
        .map(|&detector| BlockedCounts {
            detector,
            per_path: [Vec::new(), Vec::new()],
        })
        .collect();
    match noise.blocked_protocol {
        BlockedProtocol::PhysicalBlocking => {
            for path in 0..2 {
                let probs3 = blocked_probabilities(config, strategy, path)?;
                let probs: Vec<f64> = detectors.iter().map(|d| probs3[d.index()]).collect();
                let setting = noise.n_phases as u64 + path as u64;
                for r in 0..noise.repeats {
                    let drawn = match noise.mode {
                        CountingMode::Sampled => {
                            let mut rng = stream_rng(seed, setting, r as u64);
                            sample_multinomial(&mut rng, budget, &probs)
                        }
                        CountingMode::Expected => probs.iter().map(|p| p * budget).collect(),
                    };
                    for (slot, n) in blocked.iter_mut().zip(&drawn) {
                        slot.per_path[path].push(*n);
                    }
                }
            }
        }
        BlockedProtocol::GroundTruthTagging => {
            // one run; the joint (detector, true path) table is sampled at
            // once, so a photon never contributes to both path columns
            let mut joint_probs = Vec::with_capacity(2 * detectors.len());
            for path in 0..2 {
                let probs3 = blocked_probabilities(config, strategy, path)?;
                for d in &detectors {
                    joint_probs.push(probs3[d.index()]);
                }
            }
            let setting = noise.n_phases as u64;
            for r in 0..noise.repeats {
                let drawn = match noise.mode {
                    CountingMode::Sampled => {
                        let mut rng = stream_rng(seed, setting, r as u64);
                        sample_multinomial(&mut rng, budget, &joint_probs)
                    }
                    CountingMode::Expected => joint_probs.iter().map(|p| p * budget).collect(),
                };
                for path in 0..2 {
                    for (slot, n) in blocked
                        .iter_mut()
                        .zip(&drawn[path * detectors.len()..(path + 1) * detectors.len()])
                    {
                        slot.per_path[path].push(*n);
                    }
                }
            }
        }
    }

    Ok(CountRecord {
        strategy,
        seed,
        budget,
        phase_sweep,
        blocked,
    })
}

fn blocked_row(record: &CountRecord, detector: Detector) -> Option<&BlockedCounts> {
    record.blocked.iter().find(|b| b.detector == detector)
}

/// Fringe visibility from the phase sweep:
/// V̂ = (max N − min N)/(max N + min N) over the grid, per repeat.
pub fn estimate_visibility(record: &CountRecord) -> Result<Estimate> {
    if record.phase_sweep.len() < 2 {
        return Err(Error::DegeneratePhaseSweep);
    }
    let repeats = record.phase_sweep[0].counts[DET_V].len();
    let mut per_repeat = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let mut max = f64::MIN;
        let mut min = f64::MAX;
        for point in &record.phase_sweep {
            let n = point.counts[DET_V][r];
            max = max.max(n);
            min = min.min(n);
        }
        if max <= 0.0 {
            return Err(Error::AllCountsZero);
        }
        per_repeat.push((max - min) / (max + min));
    }
    Ok(Estimate::from_repeats(&per_repeat))
}

/// Unambiguous-result rate from the blocked runs:
/// D̂_u = (N₀₀ + N₁₁)/((N₂₀ + N₀₀) + (N₂₁ + N₁₁)).
pub fn estimate_du(record: &CountRecord) -> Result<Estimate> {
    let d0 = blocked_row(record, Detector::D0).ok_or(Error::MissingBlockedRuns("D0"))?;
    let d1 = blocked_row(record, Detector::D1).ok_or(Error::MissingBlockedRuns("D1"))?;
    let d2 = blocked_row(record, Detector::D2).ok_or(Error::MissingBlockedRuns("D2"))?;
    let repeats = d0.per_path[0].len();
    let mut per_repeat = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let n00 = d0.per_path[0][r];
        let n11 = d1.per_path[1][r];
        let n20 = d2.per_path[0][r];
        let n21 = d2.per_path[1][r];
        let denom = (n20 + n00) + (n21 + n11);
        if denom <= 0.0 {
            return Err(Error::ZeroDenominator);
        }
        per_repeat.push((n00 + n11) / denom);
    }
    Ok(Estimate::from_repeats(&per_repeat))
}

/// Guess-margin distinguishability from the blocked runs:
/// D̂_m = (N₀₁ + N₂₀ − N₀₀ − N₂₁)/(N₀₁ + N₂₀ + N₀₀ + N₂₁).
pub fn estimate_dm(record: &CountRecord) -> Result<Estimate> {
    let d0 = blocked_row(record, Detector::D0).ok_or(Error::MissingBlockedRuns("D0"))?;
    let d2 = blocked_row(record, Detector::D2).ok_or(Error::MissingBlockedRuns("D2"))?;
    let repeats = d0.per_path[0].len();
    let mut per_repeat = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let n01 = d0.per_path[1][r];
        let n20 = d2.per_path[0][r];
        let n00 = d0.per_path[0][r];
        let n21 = d2.per_path[1][r];
        let denom = n01 + n20 + n00 + n21;
        if denom <= 0.0 {
            return Err(Error::ZeroDenominator);
        }
        per_repeat.push((n01 + n20 - n00 - n21) / denom);
    }
    Ok(Estimate::from_repeats(&per_repeat))
}

/// Plug-in mutual information (bits) from the empirical joint frequencies
/// of the blocked runs.
pub fn empirical_mutual_information(record: &CountRecord) -> Result<Estimate> {
    if record.blocked.is_empty() {
        return Err(Error::MissingBlockedRuns("all detectors"));
    }
    let repeats = record.blocked[0].per_path[0].len();
    let mut per_repeat = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let mut joint: Vec<[f64; 2]> = Vec::with_capacity(record.blocked.len());
        let mut total = 0.0;
        for row in &record.blocked {
            let cell = [row.per_path[0][r], row.per_path[1][r]];
            total += cell[0] + cell[1];
            joint.push(cell);
        }
        if total <= 0.0 {
            return Err(Error::ZeroDenominator);
        }
        let mut mi = 0.0;
        for j in 0..2 {
            let p_path: f64 = joint.iter().map(|c| c[j]).sum::<f64>() / total;
            for cell in &joint {
                let p_out: f64 = (cell[0] + cell[1]) / total;
                let p_joint = cell[j] / total;
                if p_joint > 0.0 {
                    mi += p_joint * (p_joint / (p_path * p_out)).log2();
                }
            }
        }
        per_repeat.push(mi);
    }
    Ok(Estimate::from_repeats(&per_repeat))
}

/// Full estimator bundle for a record: V̂, the strategy distinguishability,
/// and the duality sum with propagated error.
pub fn estimate_report(record: &CountRecord) -> Result<EstimateReport> {
    let visibility = estimate_visibility(record)?;
    match record.strategy {
        Strategy::Uqsd => {
            let du = estimate_du(record)?;
            Ok(EstimateReport {
                strategy: Strategy::Uqsd,
                visibility,
                distinguishability: du,
                duality_sum: Estimate::sum(visibility, du),
            })
        }
        Strategy::Med => {
            let dm = estimate_dm(record)?;
            Ok(EstimateReport {
                strategy: Strategy::Med,
                visibility,
                distinguishability: dm,
                duality_sum: Estimate::sum_of_squares(visibility, dm),
            })
        }
    }
}
