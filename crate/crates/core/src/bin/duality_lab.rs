//! Command-line experiment runner: reproduces the phase-sweep, duality-curve
//! and mutual-information figures as CSV/JSON data files and runs the
//! invariant self-check suite.

use clap::{Args, Parser, Subcommand, ValueEnum};
use duality_core::scenario::{
    apply_scenario_keys, parse_scenario_file, run_scenario, write_rows, OutputFormat,
    ScenarioKind, ScenarioSpec, StrategyChoice,
};
use duality_core::selfcheck::{all_passed, run_selfcheck};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "duality-lab",
    about = "Wave-particle duality laboratory: asymmetric interference with which-way measurements",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalized detector counts versus the interferometer phase.
    PhaseSweep(RunArgs),
    /// V, D and the duality sums over a symmetry grid.
    DualityCurve(RunArgs),
    /// Mutual information of both strategies over a symmetry grid.
    MutualInfo(RunArgs),
    /// Run the invariant suite; exit status reflects the result.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (key = value lines); explicit flags override it.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Symmetry values tan2θ_a, comma separated, each in [0, 1].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    tan2a: Option<Vec<f64>>,
    /// Which-way overlap sin2θ_n in [0, 1].
    #[arg(long)]
    sin2n: Option<f64>,
    /// Raw H1 orientations θ_a in degrees (alternative to --tan2a).
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "tan2a")]
    theta_a: Option<Vec<f64>>,
    /// Raw H2 orientation θ_n in degrees (alternative to --sin2n).
    #[arg(long, conflicts_with = "sin2n")]
    theta_n: Option<f64>,
    /// Discrimination strategy.
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Photon budget per setting (Poisson mean).
    #[arg(long)]
    photons: Option<f64>,
    /// Phase points per sweep.
    #[arg(long)]
    phases: Option<usize>,
    /// Repeated measurements per setting.
    #[arg(long)]
    repeats: Option<usize>,
    /// Master RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Interference contrast of the loops, 1 = ideal.
    #[arg(long)]
    loop_visibility: Option<f64>,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Emit the check list as JSON instead of text lines.
    #[arg(long)]
    json: bool,
    /// Fault injection: offset the first-loop wave-plate convention by this
    /// many radians. The pipeline-reproduction check must then fail.
    #[arg(long, hide = true, default_value_t = 0.0)]
    perturb_hwp: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Uqsd,
    Med,
    Both,
}

impl From<StrategyArg> for StrategyChoice {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Uqsd => StrategyChoice::Uqsd,
            StrategyArg::Med => StrategyChoice::Med,
            StrategyArg::Both => StrategyChoice::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn build_spec(kind: ScenarioKind, args: &RunArgs) -> duality_core::Result<ScenarioSpec> {
    let mut spec = ScenarioSpec::defaults(kind);
    if let Some(path) = &args.scenario {
        let map = parse_scenario_file(path)?;
        apply_scenario_keys(&mut spec, &map)?;
    }
    if let Some(v) = &args.tan2a {
        spec.tan2a = v.clone();
    }
    if let Some(v) = args.sin2n {
        spec.sin2n = v;
    }
    if let Some(degs) = &args.theta_a {
        spec.tan2a = degs
            .iter()
            .map(|d| (2.0 * d.to_radians()).tan())
            .collect();
    }
    if let Some(deg) = args.theta_n {
        spec.sin2n = (2.0 * deg.to_radians()).sin();
    }
    if let Some(v) = args.strategy {
        spec.strategy = v.into();
    }
    if let Some(v) = args.photons {
        spec.photons = v;
    }
    if let Some(v) = args.phases {
        spec.phases = v;
    }
    if let Some(v) = args.repeats {
        spec.repeats = v;
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    if let Some(v) = &args.out {
        spec.out = Some(v.clone());
    }
    if let Some(v) = args.format {
        spec.format = v.into();
    }
    if let Some(v) = args.loop_visibility {
        spec.loop_visibility = v;
    }
    spec.validate()?;
    Ok(spec)
}

fn run(kind: ScenarioKind, args: &RunArgs) -> duality_core::Result<()> {
    let spec = build_spec(kind, args)?;
    let rows = run_scenario(&spec)?;
    match &spec.out {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            write_rows(&rows, spec.format, std::io::BufWriter::new(file))?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            write_rows(&rows, spec.format, stdout.lock())?;
        }
    }
    Ok(())
}

fn selfcheck(args: &SelfcheckArgs) -> duality_core::Result<bool> {
    let checks = run_selfcheck(args.perturb_hwp)?;
    let ok = all_passed(&checks);
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    if args.json {
        writeln!(w, "{}", serde_json::to_string_pretty(&checks).unwrap())?;
    } else {
        for c in &checks {
            writeln!(
                w,
                "{} {} — {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        writeln!(
            w,
            "{}: {}/{} checks passed",
            if ok { "OK" } else { "FAILED" },
            checks.iter().filter(|c| c.passed).count(),
            checks.len()
        )?;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::PhaseSweep(args) => run(ScenarioKind::PhaseSweep, args).map(|_| true),
        Command::DualityCurve(args) => run(ScenarioKind::DualityCurve, args).map(|_| true),
        Command::MutualInfo(args) => run(ScenarioKind::MutualInfo, args).map(|_| true),
        Command::Selfcheck(args) => selfcheck(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
