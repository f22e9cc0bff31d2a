//! Command-line entry point.
//!
//! Four commands: `analyze` (nullcline geometry, equilibria, spectra),
//! `loci` (zero-trace, double-zero, and unit-determinant points),
//! `simulate` (one trajectory plus orbit classification), and `verify`
//! (randomized localization sweeps and the locus-ordering comparison).
//!
//! Every command reads one JSON config, prints a JSON report to stdout,
//! and with `--out <dir>` also writes the JSON plus CSV artifacts there.
//! Exit codes: 0 success, 2 config shape error, 3 domain or numerics
//! error, 4 verification found violations.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bifloc::config::{
    self, AnalyzeConfig, BtLociConfig, DualityConfig, HopfLociConfig, NsLociConfig, SimulateConfig,
};
use bifloc::dynamics::{classify_orbit, default_dt, integrate_flow, iterate_map};
use bifloc::equilibrium::find_coexistence_equilibria;
use bifloc::loci::{self, BifurcationKind, CmFreeParam, NsPoint};
use bifloc::model::{CrowleyMartinParams, Holling4Params, ModelFamily, ModelInstance, PlanarState};
use bifloc::nullcline::{Branch, NullclineProfile};
use bifloc::report::{
    anchor_for, AnalyzeReport, BifurcationPoint, CsvTable, EquilibriumReport, LociReport,
    SimulateReport,
};
use bifloc::spectral::{spectral_summary, trace_on_nullcline};
use bifloc::sweep::{self, CheckKind, Counterexample, SweepConfig, SweepSummary};
use bifloc::Result;

#[derive(Parser)]
#[command(
    name = "bifloc",
    version,
    about = "Nullcline geometry and bifurcation localization for planar predator-prey models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report nullcline geometry, equilibria, and spectra for one instance
    Analyze(IoArgs),
    /// Locate bifurcation points of one kind
    #[command(subcommand)]
    Loci(LociCommand),
    /// Integrate one trajectory and classify the orbit
    Simulate(IoArgs),
    /// Run randomized verification sweeps or the locus-ordering comparison
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand)]
enum LociCommand {
    /// Zero-trace spiral points of the continuous families
    Hopf(IoArgs),
    /// Double-zero equilibrium search on the coupled parameter slice
    Bt(IoArgs),
    /// Unit-determinant points of the discrete family
    Ns(IoArgs),
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Randomized localization sweep; the four-family campaign when no
    /// config is given
    Sweep(VerifyArgs),
    /// Zero-trace points left of the vertex vs unit-determinant points
    /// right of it, on a shared parameter base
    Duality(VerifyArgs),
}

#[derive(Args)]
struct IoArgs {
    /// JSON configuration document
    #[arg(long)]
    config: PathBuf,
    /// Directory for JSON and CSV artifacts
    #[arg(long)]
    out: Option<PathBuf>,
    /// Annotate report entries with stable anchor labels
    #[arg(long)]
    traceability: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON configuration document; the built-in default when absent
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the full per-sample reports
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the base seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Annotate violations with stable anchor labels
    #[arg(long)]
    traceability: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_shape() { 2 } else { 3 })
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Analyze(args) => run_analyze(&args),
        Command::Loci(kind) => run_loci(&kind),
        Command::Simulate(args) => run_simulate(&args),
        Command::Verify(VerifyCommand::Sweep(args)) => run_verify_sweep(&args),
        Command::Verify(VerifyCommand::Duality(args)) => run_verify_duality(&args),
    }
}

fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn write_out(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn branch_slug(b: Branch) -> &'static str {
    match b {
        Branch::Ascending => "ascending",
        Branch::Descending => "descending",
        Branch::Critical => "critical",
    }
}

fn run_analyze(args: &IoArgs) -> Result<ExitCode> {
    let cfg = AnalyzeConfig::parse(config::load_value(&args.config)?)?;
    let m = cfg.instance()?;
    let profile = NullclineProfile::new(&m);
    let equilibria: Vec<EquilibriumReport> = find_coexistence_equilibria(&m)
        .into_iter()
        .map(|eq| EquilibriumReport {
            state: eq.state,
            residual: eq.residual,
            branch: eq.branch,
            cell_index: eq.cell_index,
            spectrum: spectral_summary(&m, eq.state),
        })
        .collect();
    let anchors = args.traceability.then(|| {
        equilibria
            .iter()
            .map(|e| format!("equilibrium-branch/{}", branch_slug(e.branch)))
            .collect()
    });
    let report = AnalyzeReport {
        family: cfg.family,
        parameters: m.params_map(),
        domain: [profile.x_lo(), profile.x_hi()],
        degree: profile.degree(),
        critical_points: profile.critical_points().to_vec(),
        cells: profile.cells().to_vec(),
        equilibria,
        anchors,
    };
    let json = to_pretty(&report)?;
    if let Some(dir) = &args.out {
        write_out(dir, "analyze.json", &json)?;
        let mut table = CsvTable::new(&["x", "g", "g_prime", "trace_on_nullcline"]);
        let (lo, hi) = (profile.x_lo(), profile.x_hi());
        // panel midpoints stay strictly inside the admissible interval,
        // where the conditioned trace is defined
        let n = cfg.series_points;
        for i in 0..n {
            let x = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
            table.push_numbers(&[
                x,
                profile.value(x)?,
                profile.derivative(x)?,
                trace_on_nullcline(&m, x)?,
            ]);
        }
        write_out(dir, "nullcline_series.csv", &table.render())?;
    }
    println!("{json}");
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn bif_point(
    kind: BifurcationKind,
    m: &ModelInstance,
    state: PlanarState,
    parameter: &str,
    critical_value: f64,
    trace: f64,
    det: f64,
    branch: Branch,
    traceability: bool,
) -> BifurcationPoint {
    let expected = match kind {
        BifurcationKind::NeimarkSacker => Branch::Descending,
        _ => Branch::Ascending,
    };
    let on_expected_branch = branch == expected;
    BifurcationPoint {
        kind,
        family: m.family(),
        state,
        parameter: parameter.to_string(),
        critical_value,
        parameters: m.params_map(),
        trace,
        det,
        branch,
        on_expected_branch,
        anchor: traceability.then(|| anchor_for(kind, on_expected_branch).to_string()),
    }
}

fn hopf_report(args: &IoArgs) -> Result<LociReport> {
    let cfg = HopfLociConfig::parse(config::load_value(&args.config)?)?;
    let family = cfg.family();
    let mut points = Vec::new();
    match cfg {
        HopfLociConfig::Bazykin { k0, b, x0, r, sigma } => {
            let h = loci::bazykin_hopf(k0, b, x0, r, sigma)?;
            let m = ModelInstance::Bazykin(h.params);
            points.push(bif_point(
                BifurcationKind::Hopf,
                &m,
                h.state,
                "a",
                h.params.a,
                h.trace_residual,
                h.det,
                h.branch,
                args.traceability,
            ));
        }
        HopfLociConfig::HollingIv { a, h1, h2, x } => {
            if let Some(h) = loci::holling4_hopf_branch(a, h1, h2, x)? {
                let m = ModelInstance::HollingIv(h.params);
                points.push(bif_point(
                    BifurcationKind::Hopf,
                    &m,
                    h.state,
                    "beta",
                    h.beta0,
                    h.trace_residual,
                    h.det,
                    h.branch,
                    args.traceability,
                ));
            }
        }
        HopfLociConfig::CrowleyMartin { base, x } => {
            if let Some(h) = loci::crowley_martin_hopf(&base, x)? {
                let m = ModelInstance::CrowleyMartin(h.params);
                points.push(bif_point(
                    BifurcationKind::Hopf,
                    &m,
                    h.state,
                    "c",
                    h.c0,
                    h.trace_residual,
                    h.det,
                    h.branch,
                    args.traceability,
                ));
            }
        }
    }
    Ok(LociReport { kind: BifurcationKind::Hopf, family, points, boundary_runs: None })
}

fn bt_report(args: &IoArgs) -> Result<LociReport> {
    let cfg = BtLociConfig::parse(config::load_value(&args.config)?)?;
    let mut points = Vec::new();
    let mut boundary = 0usize;
    for x0 in cfg.grid() {
        let rep = loci::holling4_bt_slice_search(x0)?;
        boundary += rep.outcomes.iter().filter(|o| o.converged && o.boundary).count();
        if let Some([h10, y, beta, delta_eff]) = rep.interior_solution {
            let params = Holling4Params::coupled(h10, 0.0, delta_eff, beta)?;
            let m = ModelInstance::HollingIv(params);
            let state = PlanarState::new(x0, y);
            let s = spectral_summary(&m, state);
            let profile = NullclineProfile::new(&m);
            points.push(bif_point(
                BifurcationKind::BogdanovTakens,
                &m,
                state,
                "h10",
                h10,
                s.trace,
                s.det,
                profile.branch_of(x0)?,
                args.traceability,
            ));
        }
    }
    Ok(LociReport {
        kind: BifurcationKind::BogdanovTakens,
        family: ModelFamily::HollingIv,
        points,
        boundary_runs: Some(boundary),
    })
}

fn ns_instance(cfg: &NsLociConfig, free: CmFreeParam, p: &NsPoint) -> Result<ModelInstance> {
    let (mut rho, mut c, mut d) = (cfg.rho, cfg.c, cfg.d);
    match free {
        CmFreeParam::Interference => c = p.free_value,
        CmFreeParam::GrowthRate => rho = p.free_value,
        CmFreeParam::Mortality => d = p.free_value,
    }
    Ok(ModelInstance::DiscreteCrowleyMartin(CrowleyMartinParams::new(
        rho, cfg.k, cfg.a, cfg.b, c, p.gamma, d,
    )?))
}

fn ns_report(args: &IoArgs) -> Result<LociReport> {
    let cfg = NsLociConfig::parse(config::load_value(&args.config)?)?;
    let free = cfg.free()?;
    let base = cfg.base()?;
    let locus = loci::ns_locus(&base, free, cfg.x_lo, cfg.x_hi)?;
    let mut points = Vec::new();
    for p in &locus.points {
        let m = ns_instance(&cfg, free, p)?;
        points.push(bif_point(
            BifurcationKind::NeimarkSacker,
            &m,
            p.state,
            free.name(),
            p.free_value,
            p.map_trace,
            p.map_det,
            p.branch,
            args.traceability,
        ));
    }
    Ok(LociReport {
        kind: BifurcationKind::NeimarkSacker,
        family: ModelFamily::DiscreteCrowleyMartin,
        points,
        boundary_runs: None,
    })
}

fn run_loci(kind: &LociCommand) -> Result<ExitCode> {
    let (args, report, slug) = match kind {
        LociCommand::Hopf(args) => (args, hopf_report(args)?, "hopf"),
        LociCommand::Bt(args) => (args, bt_report(args)?, "bt"),
        LociCommand::Ns(args) => (args, ns_report(args)?, "ns"),
    };
    let json = to_pretty(&report)?;
    if let Some(dir) = &args.out {
        write_out(dir, &format!("loci_{slug}.json"), &json)?;
        write_out(dir, &format!("loci_{slug}.csv"), &report.to_csv().render())?;
    }
    println!("{json}");
    Ok(ExitCode::SUCCESS)
}

fn run_simulate(args: &IoArgs) -> Result<ExitCode> {
    let cfg = SimulateConfig::parse(config::load_value(&args.config)?)?;
    let m = cfg.instance()?;
    let dt = if m.is_map() {
        1.0
    } else {
        cfg.dt.unwrap_or_else(|| default_dt(&m, cfg.start))
    };
    let traj = if m.is_map() {
        iterate_map(&m, cfg.start, cfg.steps)
    } else {
        integrate_flow(&m, cfg.start, dt, cfg.steps)
    };
    let reference = cfg
        .reference
        .or_else(|| bifloc::equilibrium::nearest_equilibrium(&m, cfg.start.x).map(|e| e.state))
        .unwrap_or(cfg.start);
    let verdict = classify_orbit(&traj, reference);
    let report = SimulateReport {
        family: cfg.family,
        parameters: m.params_map(),
        start: cfg.start,
        reference,
        dt,
        steps_recorded: traj.states.len(),
        clipped: traj.clipped,
        verdict,
    };
    let json = to_pretty(&report)?;
    if let Some(dir) = &args.out {
        write_out(dir, "simulate.json", &json)?;
        let time_col = if m.is_map() { "n" } else { "t" };
        let mut table = CsvTable::new(&[time_col, "x", "y"]);
        for (i, s) in traj.states.iter().enumerate() {
            table.push_numbers(&[i as f64 * dt, s.x, s.y]);
        }
        write_out(dir, "trajectory.csv", &table.render())?;
    }
    println!("{json}");
    // a divergent or indeterminate orbit is a finding, not a failure
    Ok(ExitCode::SUCCESS)
}

fn counterexample_anchor(check: CheckKind) -> &'static str {
    match check {
        CheckKind::Hopf => anchor_for(BifurcationKind::Hopf, false),
        CheckKind::Bt => anchor_for(BifurcationKind::BogdanovTakens, false),
        CheckKind::Ns => anchor_for(BifurcationKind::NeimarkSacker, false),
        CheckKind::Rigidity => "vertex-rigidity/violation",
        CheckKind::DynamicsConfirm => "dynamics-confirmation/violation",
    }
}

/// Stdout view of one sweep: everything except the per-sample records,
/// which go to `--out`.
#[derive(Serialize)]
struct SweepDigest<'a> {
    config: &'a SweepConfig,
    summary: &'a SweepSummary,
    counterexamples: &'a [Counterexample],
    all_clear: bool,
}

#[derive(Serialize)]
struct CampaignDigest<'a> {
    sweeps: Vec<SweepDigest<'a>>,
    total_counterexamples: usize,
    all_clear: bool,
}

fn run_verify_sweep(args: &VerifyArgs) -> Result<ExitCode> {
    let mut configs: Vec<SweepConfig> = match &args.config {
        Some(path) => vec![config::parse_sweep(config::load_value(path)?)?],
        None => sweep::default_campaign(),
    };
    if let Some(seed) = args.seed {
        for c in &mut configs {
            c.seed = seed;
        }
    }
    let mut reports = Vec::with_capacity(configs.len());
    for c in &configs {
        let mut report = sweep::run_sweep(c)?;
        if args.traceability {
            for ce in &mut report.counterexamples {
                ce.anchor = Some(counterexample_anchor(ce.check).to_string());
            }
        }
        reports.push(report);
    }
    if let Some(dir) = &args.out {
        for report in &reports {
            let name = format!("sweep_{}.json", report.config.family);
            write_out(dir, &name, &to_pretty(report)?)?;
        }
    }
    let total: usize = reports.iter().map(|r| r.counterexamples.len()).sum();
    let digest = CampaignDigest {
        sweeps: reports
            .iter()
            .map(|r| SweepDigest {
                config: &r.config,
                summary: &r.summary,
                counterexamples: &r.counterexamples,
                all_clear: r.all_clear(),
            })
            .collect(),
        total_counterexamples: total,
        all_clear: total == 0,
    };
    println!("{}", to_pretty(&digest)?);
    Ok(if total == 0 { ExitCode::SUCCESS } else { ExitCode::from(4) })
}

fn run_verify_duality(args: &VerifyArgs) -> Result<ExitCode> {
    let cfg = match &args.config {
        Some(path) => DualityConfig::parse(config::load_value(path)?)?,
        None => config::default_duality(),
    };
    let report = sweep::duality_report(&cfg.base(), cfg.c_lo, cfg.c_hi, cfg.values)?;
    let json = to_pretty(&report)?;
    if let Some(dir) = &args.out {
        write_out(dir, "duality.json", &json)?;
        let mut table =
            CsvTable::new(&["c", "x_vertex", "hopf_points", "ns_points", "max_hopf_x", "min_ns_x"]);
        for e in &report.entries {
            table.push_numbers(&[
                e.c,
                e.x_vertex,
                e.hopf_xs.len() as f64,
                e.ns_xs.len() as f64,
                e.hopf_xs.iter().copied().fold(f64::NAN, f64::max),
                e.ns_xs.iter().copied().fold(f64::NAN, f64::min),
            ]);
        }
        write_out(dir, "duality.csv", &table.render())?;
    }
    println!("{json}");
    Ok(if report.all_ordered { ExitCode::SUCCESS } else { ExitCode::from(4) })
}
