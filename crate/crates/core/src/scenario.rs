//! Experiment scenarios: parameter grids, Monte Carlo runs compared against
//! closed forms, and CSV/JSON emission.
//!
//! Scenario files are flat `key = value` text, one key per line, `#`
//! comments; keys mirror the CLI flags (tan2a, sin2n, strategy, photons,
//! phases, repeats, seed, out, format, loop_visibility, scenario).

use crate::discrimination::{
    dm_closed_form, strategy_mutual_information, uqsd_bound, uqsd_povm, uqsd_program, Strategy,
};
use crate::error::{Error, Result};
use crate::interferometer::{visibility_closed_form, ExperimentConfig};
use crate::montecarlo::{
    click_probabilities, empirical_mutual_information, estimate_report, sample_counts,
    CountingMode, Estimate, NoiseModel, DET_D0, DET_D1, DET_D2, DET_V,
};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    PhaseSweep,
    DualityCurve,
    MutualInfo,
    Selfcheck,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::PhaseSweep => "phase-sweep",
            ScenarioKind::DualityCurve => "duality-curve",
            ScenarioKind::MutualInfo => "mutual-info",
            ScenarioKind::Selfcheck => "selfcheck",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "phase-sweep" => Ok(Self::PhaseSweep),
            "duality-curve" => Ok(Self::DualityCurve),
            "mutual-info" => Ok(Self::MutualInfo),
            "selfcheck" => Ok(Self::Selfcheck),
            other => Err(Error::InvalidScenario(format!(
                "unknown scenario '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyChoice {
    Uqsd,
    Med,
    Both,
}

impl StrategyChoice {
    pub fn strategies(self) -> Vec<Strategy> {
        match self {
            StrategyChoice::Uqsd => vec![Strategy::Uqsd],
            StrategyChoice::Med => vec![Strategy::Med],
            StrategyChoice::Both => vec![Strategy::Uqsd, Strategy::Med],
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uqsd" => Ok(Self::Uqsd),
            "med" => Ok(Self::Med),
            "both" => Ok(Self::Both),
            other => Err(Error::InvalidScenario(format!(
                "unknown strategy '{other}' (expected uqsd|med|both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidScenario(format!(
                "unknown format '{other}' (expected csv|json)"
            ))),
        }
    }
}

/// A fully resolved experiment scenario.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub tan2a: Vec<f64>,
    pub sin2n: f64,
    pub strategy: StrategyChoice,
    /// Photon budget per setting (Poisson mean).
    pub photons: f64,
    pub phases: usize,
    pub repeats: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub loop_visibility: f64,
}

impl ScenarioSpec {
    /// Defaults per scenario kind; symmetry grid is 15 evenly spaced points
    /// over (0, 1].
    pub fn defaults(kind: ScenarioKind) -> Self {
        let tan2a = match kind {
            ScenarioKind::PhaseSweep => vec![0.38],
            _ => (1..=15).map(|k| k as f64 / 15.0).collect(),
        };
        Self {
            kind,
            tan2a,
            sin2n: 0.2,
            strategy: match kind {
                ScenarioKind::PhaseSweep => StrategyChoice::Uqsd,
                _ => StrategyChoice::Both,
            },
            photons: 5_000.0,
            phases: 24,
            repeats: 5,
            seed: 1,
            out: None,
            format: OutputFormat::Csv,
            loop_visibility: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tan2a.is_empty() {
            return Err(Error::InvalidScenario("empty tan2a grid".into()));
        }
        for &t in &self.tan2a {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidScenario(format!(
                    "tan2a value {t} outside [0, 1]"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.sin2n) {
            return Err(Error::InvalidScenario(format!(
                "sin2n value {} outside [0, 1]",
                self.sin2n
            )));
        }
        if self.kind == ScenarioKind::PhaseSweep && self.strategy != StrategyChoice::Uqsd {
            return Err(Error::InvalidScenario(
                "phase-sweep runs under the uqsd strategy".into(),
            ));
        }
        if self.phases < 2 {
            return Err(Error::InvalidScenario("need at least 2 phases".into()));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidScenario("need at least 1 repeat".into()));
        }
        if !self.photons.is_finite() || self.photons <= 0.0 {
            return Err(Error::ZeroPhotonBudget(self.photons));
        }
        if !(0.0..=1.0).contains(&self.loop_visibility) {
            return Err(Error::LoopVisibilityOutOfRange(self.loop_visibility));
        }
        Ok(())
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel {
            mean_rate: self.photons,
            duration: 1.0,
            repeats: self.repeats,
            loop_visibility: self.loop_visibility,
            n_phases: self.phases,
            mode: CountingMode::Sampled,
            ..NoiseModel::default()
        }
    }

    pub fn config(&self, tan2a: f64) -> Result<ExperimentConfig> {
        ExperimentConfig::from_ratios(tan2a, self.sin2n, 0.0, self.loop_visibility)
    }
}

/// One emitted data row: parameters, closed-form value, Monte Carlo
/// estimate with its one-standard-deviation error.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub tan2a: f64,
    pub sin2n: f64,
    pub strategy: String,
    pub phi: Option<f64>,
    pub quantity: String,
    pub closed_form: f64,
    pub estimate: f64,
    pub sigma: f64,
    pub n_photons: f64,
    pub seed: u64,
}

impl ResultRow {
    pub fn residual(&self) -> f64 {
        (self.estimate - self.closed_form).abs()
    }

    pub fn passes(&self, k_sigma: f64, abs_tol: f64) -> bool {
        self.residual() <= k_sigma * self.sigma + abs_tol
    }
}

fn estimate_row(
    spec: &ScenarioSpec,
    tan2a: f64,
    strategy: &str,
    phi: Option<f64>,
    quantity: &str,
    closed_form: f64,
    est: Estimate,
) -> ResultRow {
    ResultRow {
        tan2a,
        sin2n: spec.sin2n,
        strategy: strategy.to_string(),
        phi,
        quantity: quantity.to_string(),
        closed_form,
        estimate: est.value,
        sigma: est.sigma,
        n_photons: spec.photons,
        seed: spec.seed,
    }
}

/// Normalized photon counts per detector versus φ, with their theoretical
/// curves. The normalization is by the total count over D_v+D₀+D₁+D₂.
pub fn run_phase_sweep(spec: &ScenarioSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let noise = spec.noise();
    let mut rows = Vec::new();
    for &t2a in &spec.tan2a {
        let config = spec.config(t2a)?;
        let program = uqsd_program(config.theta_a, config.theta_n)?;
        let povm = uqsd_povm(&program, config.theta_a, config.theta_n)?.0;
        let record = sample_counts(&config, Strategy::Uqsd, &noise, spec.seed)?;
        for point in &record.phase_sweep {
            let theory = click_probabilities(&config.with_phi(point.phi), &povm)?;
            let repeats = point.counts[DET_V].len();
            for (det_idx, name) in [
                (DET_V, "norm_count_dv"),
                (DET_D0, "norm_count_d0"),
                (DET_D1, "norm_count_d1"),
                (DET_D2, "norm_count_d2"),
            ] {
                let normalized: Vec<f64> = (0..repeats)
                    .map(|r| {
                        let total: f64 = (0..4).map(|d| point.counts[d][r]).sum();
                        if total > 0.0 {
                            point.counts[det_idx][r] / total
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let est = mean_sigma(&normalized);
                rows.push(estimate_row(
                    spec,
                    t2a,
                    "uqsd",
                    Some(point.phi),
                    name,
                    theory[det_idx],
                    est,
                ));
            }
        }
    }
    Ok(rows)
}

fn mean_sigma(values: &[f64]) -> Estimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sigma = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Estimate { value: mean, sigma }
}

/// Closed-form duality sum for a strategy at a setting, at the active
/// loop visibility. For UQSD the sum is exactly 1 in the linear regime
/// and p₁cos²2θ_n + η·2√(p₁p₂)sin2θ_n beyond it.
fn closed_forms(
    config: &ExperimentConfig,
    strategy: Strategy,
) -> Result<(f64, f64, f64)> {
    let (p1, p2) = config.priors();
    let v = config.loop_visibility
        * visibility_closed_form(config.theta_a, config.theta_n)?;
    match strategy {
        Strategy::Uqsd => {
            let du = uqsd_bound(p1, p2, config.theta_n)?;
            Ok((v, du, v + du))
        }
        Strategy::Med => {
            let dm = dm_closed_form(p1, p2, config.theta_n)?;
            Ok((v, dm, v * v + dm * dm))
        }
    }
}

/// Per symmetry value: V and the strategy's distinguishability plus the
/// duality sum, closed-form and Monte Carlo.
pub fn run_duality_curve(spec: &ScenarioSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let noise = spec.noise();
    let mut rows = Vec::new();
    for &t2a in &spec.tan2a {
        let config = spec.config(t2a)?;
        for strategy in spec.strategy.strategies() {
            let record = sample_counts(&config, strategy, &noise, spec.seed)?;
            let report = estimate_report(&record)?;
            let (v_cf, d_cf, sum_cf) = closed_forms(&config, strategy)?;
            let name = strategy.to_string();
            rows.push(estimate_row(
                spec,
                t2a,
                &name,
                None,
                "visibility",
                v_cf,
                report.visibility,
            ));
            let (d_name, sum_name) = match strategy {
                Strategy::Uqsd => ("d_u", "v_plus_du"),
                Strategy::Med => ("d_m", "v2_plus_dm2"),
            };
            rows.push(estimate_row(
                spec,
                t2a,
                &name,
                None,
                d_name,
                d_cf,
                report.distinguishability,
            ));
            rows.push(estimate_row(
                spec,
                t2a,
                &name,
                None,
                sum_name,
                sum_cf,
                report.duality_sum,
            ));
        }
    }
    Ok(rows)
}

/// Mutual information per symmetry value for each strategy: the exact value
/// and the plug-in estimate from sampled counts.
pub fn run_mutual_info(spec: &ScenarioSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let noise = spec.noise();
    let mut rows = Vec::new();
    for &t2a in &spec.tan2a {
        let config = spec.config(t2a)?;
        for strategy in spec.strategy.strategies() {
            let exact = strategy_mutual_information(strategy, config.theta_a, config.theta_n)?;
            let record = sample_counts(&config, strategy, &noise, spec.seed)?;
            let mi = empirical_mutual_information(&record)?;
            let quantity = match strategy {
                Strategy::Uqsd => "mi_uqsd",
                Strategy::Med => "mi_med",
            };
            rows.push(estimate_row(
                spec,
                t2a,
                &strategy.to_string(),
                None,
                quantity,
                exact,
                mi,
            ));
        }
    }
    Ok(rows)
}

pub fn run_scenario(spec: &ScenarioSpec) -> Result<Vec<ResultRow>> {
    match spec.kind {
        ScenarioKind::PhaseSweep => run_phase_sweep(spec),
        ScenarioKind::DualityCurve => run_duality_curve(spec),
        ScenarioKind::MutualInfo => run_mutual_info(spec),
        ScenarioKind::Selfcheck => Err(Error::InvalidScenario(
            "selfcheck does not emit data rows; run the selfcheck subcommand".into(),
        )),
    }
}

// ---- output ------------------------------------------------------------

/// Format with 9 significant digits, in the style of printf %.9g.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let t = format!("{:.*}", decimals, x);
        // strip trailing zeros and a dangling point
        let t = if t.contains('.') {
            t.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            t
        };
        t
    } else {
        let t = format!("{:.8e}", x);
        // normalize exponent formatting: 1.23000000e5 -> 1.23e5
        if let Some(pos) = t.find('e') {
            let (mant, ex) = t.split_at(pos);
            let mant = mant.trim_end_matches('0').trim_end_matches('.');
            format!("{mant}{ex}")
        } else {
            t
        }
    };
    s
}

pub const CSV_HEADER: &str =
    "tan2a,sin2n,strategy,phi,quantity,closed_form,estimate,sigma,n_photons,seed";

pub fn write_csv<W: Write>(rows: &[ResultRow], mut w: W) -> Result<()> {
    w.write_all(CSV_HEADER.as_bytes())?;
    w.write_all(b"\n")?;
    for row in rows {
        let phi = row.phi.map(fmt_g9).unwrap_or_default();
        let line = format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt_g9(row.tan2a),
            fmt_g9(row.sin2n),
            row.strategy,
            phi,
            row.quantity,
            fmt_g9(row.closed_form),
            fmt_g9(row.estimate),
            fmt_g9(row.sigma),
            fmt_g9(row.n_photons),
            row.seed,
        );
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn write_json<W: Write>(rows: &[ResultRow], mut w: W) -> Result<()> {
    let text = serde_json::to_string_pretty(rows)
        .map_err(|e| Error::InvalidScenario(format!("json serialization: {e}")))?;
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[ResultRow], format: OutputFormat, w: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, w),
        OutputFormat::Json => write_json(rows, w),
    }
}

// ---- scenario files ------------------------------------------------------

/// Parse a flat key = value scenario file into a key→value map.
pub fn parse_scenario_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidScenario(format!(
                "{}:{}: expected 'key = value', got '{raw}'",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Overlay scenario-file keys onto a spec. Unknown keys are rejected.
pub fn apply_scenario_keys(spec: &mut ScenarioSpec, map: &BTreeMap<String, String>) -> Result<()> {
    for (key, value) in map {
        match key.as_str() {
            "scenario" => {
                let kind = ScenarioKind::parse(value)?;
                if kind != spec.kind {
                    return Err(Error::InvalidScenario(format!(
                        "scenario file is for '{}', not '{}'",
                        kind.name(),
                        spec.kind.name()
                    )));
                }
            }
            "tan2a" => {
                spec.tan2a = value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::InvalidScenario(format!("tan2a: {e}")))
                    })
                    .collect::<Result<_>>()?;
            }
            "sin2n" => spec.sin2n = parse_num(key, value)?,
            "strategy" => spec.strategy = StrategyChoice::parse(value)?,
            "photons" => spec.photons = parse_num(key, value)?,
            "phases" => spec.phases = parse_num(key, value)? as usize,
            "repeats" => spec.repeats = parse_num(key, value)? as usize,
            "seed" => {
                spec.seed = value
                    .parse::<u64>()
                    .map_err(|e| Error::InvalidScenario(format!("seed: {e}")))?
            }
            "out" => spec.out = Some(PathBuf::from(value)),
            "format" => spec.format = OutputFormat::parse(value)?,
            "loop_visibility" => spec.loop_visibility = parse_num(key, value)?,
            other => {
                return Err(Error::InvalidScenario(format!(
                    "unknown scenario key '{other}'"
                )))
            }
        }
    }
    Ok(())
}

fn parse_num(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|e| Error::InvalidScenario(format!("{key}: {e}")))
}
