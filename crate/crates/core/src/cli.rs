//! The `mfsim` command line.
//!
//! Exit codes: 0 success, 1 a check ran and failed, 2 usage or configuration
//! error, 3 numerical or I/O failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::analysis::{
    boundary_curve, boundary_value, fit_c0, fit_collapse, solve_boundary, BoundaryKind, BoundaryParams, C0Fit,
    CollapseFit, CollapsePoint, LogBase, SearchBox, BOUNDARY_SUP, NOMINAL_C0,
};
use crate::analysis::boundary::{REFERENCE_QPP_POINTS, REFERENCE_SP_POINTS};
use crate::config::RunConfig;
use crate::ensemble::{realization_draw, run_ensemble, write_run};
use crate::error::{Error, Result};
use crate::gaussian::SlaterState;
use crate::lattice::{build_hamiltonian, PotentialSpec};
use crate::monitor::{MonitorConfig, Protocol};
use crate::oracle::{lockstep_trajectory, LockstepReport};
use crate::rng::trajectory_key;
use crate::sweep::{sweep_grid, CEFF_TABLE_CSV, SWEEP_SUMMARY_CSV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const COLLAPSE_FIT_JSON: &str = "collapse_fit.json";
pub const BOUNDARY_FIT_JSON: &str = "boundary_fit.json";
pub const BOUNDARY_CURVE_CSV: &str = "boundary_curve.csv";
pub const ORACLE_REPORT_JSON: &str = "oracle_report.json";

#[derive(Debug, Parser)]
#[command(name = "mfsim", version, about = "Monitored free-fermion chains: trajectories, sweeps and scaling fits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one ensemble and write its tables and manifest.
    Run(ConfigArgs),
    /// Run (or resume) the grid in the config's `sweep` section.
    Sweep(ConfigArgs),
    /// Fit the finite-size collapse of c_eff data.
    Collapse(CollapseArgs),
    /// Evaluate, solve or fit the phenomenological phase boundary.
    Boundary {
        #[command(subcommand)]
        command: BoundaryCommand,
    },
    /// Compare the Gaussian engine with exact diagonalization on small chains.
    OracleCheck(OracleArgs),
    /// Print the single-particle Hamiltonian of a config.
    DumpHamiltonian(DumpArgs),
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON run configuration.
    config: PathBuf,
    /// Replace a config value, e.g. `monitor.gamma=0.5`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanAxis {
    Gamma,
    Strength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LogArg {
    Natural,
    Log10,
}

#[derive(Debug, Args)]
struct CollapseArgs {
    /// `ceff_table.csv`, `sweep_summary.csv` or any CSV with the same columns.
    #[arg(long)]
    input: PathBuf,
    /// Parameter that plays the role of x.
    #[arg(long, value_enum, default_value = "gamma")]
    scan: ScanAxis,
    /// Keep only rows at this measurement rate.
    #[arg(long)]
    fixed_gamma: Option<f64>,
    /// Keep only rows at this potential strength.
    #[arg(long)]
    fixed_strength: Option<f64>,
    /// Column holding c_eff. Defaults to `c_eff_fit` when present.
    #[arg(long)]
    column: Option<String>,
    #[arg(long, value_name = "LO,HI", value_parser = parse_range)]
    x_c: Option<(f64, f64)>,
    #[arg(long, value_name = "LO,HI", value_parser = parse_range)]
    nu: Option<(f64, f64)>,
    #[arg(long, value_name = "LO,HI", value_parser = parse_range)]
    alpha: Option<(f64, f64)>,
    #[arg(long, value_enum, default_value = "natural")]
    log: LogArg,
    /// Output directory; defaults to the directory of the input.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Sp,
    Qpp,
}

impl From<KindArg> for BoundaryKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Sp => BoundaryKind::Sp,
            KindArg::Qpp => BoundaryKind::Qpp,
        }
    }
}

#[derive(Debug, Args)]
struct LevelArgs {
    /// Boundary level; defaults to the pooled fit to the reference points.
    #[arg(long)]
    c0: Option<f64>,
}

impl LevelArgs {
    fn params(&self) -> BoundaryParams {
        match self.c0 {
            Some(c0) => BoundaryParams::with_level(c0),
            None => BoundaryParams::default(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum BoundaryCommand {
    /// Print the boundary function at (γ, P).
    Eval {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        gamma: f64,
        /// Stark slope Δ (with `--kind sp`).
        #[arg(long, conflicts_with_all = ["v", "strength"])]
        delta: Option<f64>,
        /// Quasi-periodic amplitude V (with `--kind qpp`).
        #[arg(long, conflicts_with = "strength")]
        v: Option<f64>,
        #[arg(long)]
        strength: Option<f64>,
    },
    /// Print the critical potential strength at γ.
    Solve {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        level: LevelArgs,
    },
    /// Fit the level to critical points and sample the boundary line.
    Fit {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// CSV with columns `gamma,strength`; defaults to the reference points.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Largest γ of the sampled curve.
        #[arg(long, default_value_t = 0.5)]
        gamma_max: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PotentialArg {
    None,
    Stark,
    Quasiperiodic,
    Anderson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    BornProjective,
    LindbladJump,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long = "L", default_value_t = 8)]
    l: usize,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Number of seeds.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    master_seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value = "born-projective")]
    protocol: ProtocolArg,
    #[arg(long, value_enum, default_value = "none")]
    potential: PotentialArg,
    #[arg(long, default_value_t = 0.0)]
    strength: f64,
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    #[arg(long)]
    t_max: Option<f64>,
    /// Report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DumpFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct DumpArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Trajectory whose potential realization is shown.
    #[arg(long, default_value_t = 0)]
    trajectory: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: DumpFormat,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo < hi) {
        return Err(format!("empty range {lo},{hi}"));
    }
    Ok((lo, hi))
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_usage() {
        EXIT_USAGE
    } else {
        EXIT_NUMERICAL
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run(a) => cmd_run(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Collapse(a) => cmd_collapse(&a),
        Command::Boundary { command } => cmd_boundary(command),
        Command::OracleCheck(a) => cmd_oracle_check(&a),
        Command::DumpHamiltonian(a) => cmd_dump(&a),
    }
}

fn cmd_run(a: &ConfigArgs) -> Result<i32> {
    let cfg = RunConfig::load(&a.config, &a.overrides)?;
    let spec = cfg.ensemble_spec();
    let result = run_ensemble(&spec, cfg.ensemble.workers)?;
    let manifest = write_run(&spec, &result, &cfg.output.dir)?;
    let mi = result
        .mutual_information
        .map(|s| format!("{:.6} ± {:.6}", s.mean, s.stderr))
        .unwrap_or_else(|| "-".into());
    println!(
        "L={} gamma={} {}={} S_half={:.6} ± {:.6} MI={mi} events={}",
        result.l,
        result.gamma,
        result.potential_type,
        result.potential_param,
        result.half_chain.mean,
        result.half_chain.stderr,
        result.total_events
    );
    println!("wrote {}", manifest.display());
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &ConfigArgs) -> Result<i32> {
    let cfg = RunConfig::load(&a.config, &a.overrides)?;
    let spec = cfg.sweep_spec()?;
    let total = spec.points().len();
    let mut done = 0;
    let result = sweep_grid(&spec, cfg.ensemble.workers, |p| {
        done += 1;
        let fit = p.fit.as_ref().map(|f| format!("{:.4}", f.c_eff)).unwrap_or_else(|| "-".into());
        eprintln!(
            "[{done}/{total}] L={} gamma={} strength={} S_half={:.5} c_eff_fit={fit}{}",
            p.l,
            p.gamma,
            p.strength,
            p.result.half_chain.mean,
            if p.resumed { " (resumed)" } else { "" }
        );
    })?;
    println!(
        "wrote {} ({} rows) and {}",
        spec.output.join(CEFF_TABLE_CSV).display(),
        result.ceff.len(),
        spec.output.join(SWEEP_SUMMARY_CSV).display()
    );
    Ok(EXIT_OK)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

/// Reads collapse points from a c_eff table by column name.
fn read_collapse_points(a: &CollapseArgs) -> Result<(Vec<CollapsePoint>, String)> {
    let mut rd = csv::Reader::from_path(&a.input)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", a.input.display())))?;
    let headers = rd.headers()?.clone();
    let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let column = match &a.column {
        Some(c) => c.clone(),
        None if index.contains_key("c_eff_fit") => "c_eff_fit".into(),
        None => "c_eff".into(),
    };
    let col = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("{} has no `{name}` column", a.input.display())))
    };
    let (ig, ip, il, ic) = (col("gamma")?, col("potential_param")?, col("L")?, col(&column)?);
    let num = |rec: &csv::StringRecord, i: usize| -> Result<Option<f64>> {
        let s = rec.get(i).unwrap_or("").trim();
        if s.is_empty() {
            return Ok(None);
        }
        s.parse()
            .map(Some)
            .map_err(|_| Error::InvalidInput(format!("non-numeric value `{s}` in {}", a.input.display())))
    };
    let mut points = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let (Some(gamma), Some(strength), Some(l)) = (num(&rec, ig)?, num(&rec, ip)?, num(&rec, il)?) else {
            return Err(Error::InvalidInput("rows need gamma, potential_param and L".into()));
        };
        if a.fixed_gamma.is_some_and(|g| !close(gamma, g)) || a.fixed_strength.is_some_and(|p| !close(strength, p)) {
            continue;
        }
        let Some(c_eff) = num(&rec, ic)? else { continue };
        let x = match a.scan {
            ScanAxis::Gamma => gamma,
            ScanAxis::Strength => strength,
        };
        points.push(CollapsePoint {
            x,
            l: l as usize,
            c_eff,
        });
    }
    Ok((points, column))
}

#[derive(Serialize)]
struct CollapseOutput<'a> {
    input: &'a Path,
    column: &'a str,
    scan: &'a str,
    fixed_gamma: Option<f64>,
    fixed_strength: Option<f64>,
    #[serde(flatten)]
    fit: &'a CollapseFit,
}

fn cmd_collapse(a: &CollapseArgs) -> Result<i32> {
    let base = match a.log {
        LogArg::Natural => LogBase::Natural,
        LogArg::Log10 => LogBase::Log10,
    };
    let (points, column) = read_collapse_points(a)?;
    let mut search = SearchBox::for_points(&points, base)?;
    if let Some(r) = a.x_c {
        search.x_c = r;
    }
    if let Some(r) = a.nu {
        search.nu = r;
    }
    if let Some(r) = a.alpha {
        search.alpha = r;
    }
    let fit = fit_collapse(&points, &search, base)?;
    let out_dir = match &a.out {
        Some(d) => d.clone(),
        None => a.input.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    std::fs::create_dir_all(&out_dir)?;
    let path = out_dir.join(COLLAPSE_FIT_JSON);
    let out = CollapseOutput {
        input: &a.input,
        column: &column,
        scan: match a.scan {
            ScanAxis::Gamma => "gamma",
            ScanAxis::Strength => "strength",
        },
        fixed_gamma: a.fixed_gamma,
        fixed_strength: a.fixed_strength,
        fit: &fit,
    };
    crate::ensemble::write_json_atomic(&path, &out)?;
    let p = &fit.params;
    println!("x_c={:.6} nu={:.6} alpha={:.6} quality={:.6e}", p.x_c, p.nu, p.alpha, p.quality);
    if let Some(w) = &fit.warning {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", path.display());
    Ok(EXIT_OK)
}

fn cmd_boundary(cmd: BoundaryCommand) -> Result<i32> {
    match cmd {
        BoundaryCommand::Eval {
            kind,
            gamma,
            delta,
            v,
            strength,
        } => {
            let p = match (kind, delta, v, strength) {
                (KindArg::Sp, Some(d), None, None) | (KindArg::Qpp, None, Some(d), None) | (_, None, None, Some(d)) => d,
                (KindArg::Sp, _, Some(_), _) => return Err(Error::param("v", "applies to --kind qpp")),
                (KindArg::Qpp, Some(_), _, _) => return Err(Error::param("delta", "applies to --kind sp")),
                _ => return Err(Error::param("strength", "give --delta, --v or --strength")),
            };
            if !(gamma.is_finite() && gamma >= 0.0 && p.is_finite() && p >= 0.0) {
                return Err(Error::param("gamma", "γ and the strength must be finite and >= 0"));
            }
            println!("{:.6}", boundary_value(gamma, p, kind.into(), &BoundaryParams::default()));
            Ok(EXIT_OK)
        }
        BoundaryCommand::Solve { kind, gamma, level } => {
            match solve_boundary(gamma, kind.into(), &level.params()) {
                Ok(p) => println!("{p:.6}"),
                Err(Error::NoSolution(why)) => println!("no solution: {why}"),
                Err(e) => return Err(e),
            }
            Ok(EXIT_OK)
        }
        BoundaryCommand::Fit {
            kind,
            input,
            out,
            gamma_max,
            samples,
        } => boundary_fit(kind.into(), input.as_deref(), &out, gamma_max, samples),
    }
}

#[derive(Serialize)]
struct BoundaryFitOutput {
    kind: BoundaryKind,
    points: Vec<(f64, f64)>,
    params: BoundaryParams,
    #[serde(flatten)]
    fit: C0Fit,
    nominal_c0: f64,
    nominal_c0_feasible: bool,
}

fn read_critical_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    #[derive(serde::Deserialize)]
    struct Row {
        gamma: f64,
        strength: f64,
    }
    let mut rd = csv::Reader::from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    rd.deserialize::<Row>()
        .map(|r| r.map(|r| (r.gamma, r.strength)).map_err(Error::from))
        .collect()
}

fn boundary_fit(kind: BoundaryKind, input: Option<&Path>, out: &Path, gamma_max: f64, samples: usize) -> Result<i32> {
    let points = match input {
        Some(p) => read_critical_points(p)?,
        None => match kind {
            BoundaryKind::Sp => REFERENCE_SP_POINTS.to_vec(),
            BoundaryKind::Qpp => REFERENCE_QPP_POINTS.to_vec(),
        },
    };
    if samples < 2 || !(gamma_max > 0.0) {
        return Err(Error::param("samples", "need >= 2 samples over a positive γ range"));
    }
    let fit = fit_c0(&points, kind, &BoundaryParams::default())?;
    let params = BoundaryParams::with_level(fit.c0);
    params.validate()?;
    let gammas: Vec<f64> = (0..samples).map(|i| gamma_max * i as f64 / (samples - 1) as f64).collect();
    let curve = boundary_curve(&gammas, kind, &params)?;

    std::fs::create_dir_all(out)?;
    let mut w = csv::Writer::from_path(out.join(BOUNDARY_CURVE_CSV))?;
    w.write_record(["gamma", "strength"])?;
    for (g, p) in &curve {
        w.write_record([g.to_string(), p.map(|p| p.to_string()).unwrap_or_default()])?;
    }
    w.flush()?;
    let nominal_c0_feasible = NOMINAL_C0 < BOUNDARY_SUP;
    crate::ensemble::write_json_atomic(
        &out.join(BOUNDARY_FIT_JSON),
        &BoundaryFitOutput {
            kind,
            points,
            params,
            fit: fit.clone(),
            nominal_c0: NOMINAL_C0,
            nominal_c0_feasible,
        },
    )?;
    println!("c0={:.6} rms_residual={:.6}", fit.c0, fit.rms_residual);
    if !nominal_c0_feasible {
        eprintln!(
            "note: nominal level C0 = {NOMINAL_C0} is infeasible (boundary function < {BOUNDARY_SUP}); using the fitted level"
        );
    }
    println!("wrote {} and {}", out.join(BOUNDARY_FIT_JSON).display(), out.join(BOUNDARY_CURVE_CSV).display());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OracleOutput {
    #[serde(rename = "L")]
    l: usize,
    gamma: f64,
    protocol: Protocol,
    potential: PotentialSpec,
    tol: f64,
    max_deviation: f64,
    passed: bool,
    reports: Vec<LockstepReport>,
    failures: Vec<String>,
}

fn potential_of(kind: PotentialArg, strength: f64) -> PotentialSpec {
    match kind {
        PotentialArg::None => PotentialSpec::None,
        PotentialArg::Stark => PotentialSpec::Stark { delta: strength },
        PotentialArg::Quasiperiodic => PotentialSpec::quasiperiodic(strength, 0.0),
        PotentialArg::Anderson => PotentialSpec::Anderson { w: strength },
    }
}

fn cmd_oracle_check(a: &OracleArgs) -> Result<i32> {
    let potential = potential_of(a.potential, a.strength);
    let mut config = MonitorConfig::new(a.gamma).with_dt(a.dt).with_protocol(match a.protocol {
        ProtocolArg::BornProjective => Protocol::BornProjective,
        ProtocolArg::LindbladJump => Protocol::LindbladJump,
    });
    if let Some(t) = a.t_max {
        config = config.with_t_max(t);
    }
    config.validate()?;
    if a.seeds == 0 || !(a.tol > 0.0) {
        return Err(Error::param("seeds", "need >= 1 seed and a positive tolerance"));
    }
    let mut rng = crate::rng::stream(crate::rng::realization_key(a.master_seed, 0));
    let onsite = crate::lattice::build_potential(&potential, a.l, &mut rng)?;
    let h = build_hamiltonian(1.0, &onsite)?;
    let initial = SlaterState::neel(a.l)?;
    let runs: Vec<(u64, Result<LockstepReport>)> = (0..a.seeds)
        .into_par_iter()
        .map(|i| {
            let key = trajectory_key(a.master_seed, i, 0);
            (key, lockstep_trajectory(&h, &initial, &config, key))
        })
        .collect();

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (key, r) in runs {
        match r {
            Ok(r) => reports.push(r),
            Err(Error::Numerical(why)) => failures.push(format!("seed key {key:#018x}: {why}")),
            Err(e) => return Err(e),
        }
    }
    let max_deviation = reports.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    let worst = reports
        .iter()
        .max_by(|x, y| x.max_deviation.total_cmp(&y.max_deviation))
        .map(|r| format!(" (seed key {:#018x})", r.seed))
        .unwrap_or_default();
    let passed = failures.is_empty() && max_deviation < a.tol;
    let out = OracleOutput {
        l: a.l,
        gamma: a.gamma,
        protocol: config.protocol,
        potential,
        tol: a.tol,
        max_deviation,
        passed,
        reports,
        failures,
    };
    let path = a.out.clone().unwrap_or_else(|| PathBuf::from(ORACLE_REPORT_JSON));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    crate::ensemble::write_json_atomic(&path, &out)?;
    for f in &out.failures {
        eprintln!("diverged: {f}");
    }
    println!(
        "{} seeds={} max_deviation={:.3e}{worst} tol={:e}",
        if passed { "PASS" } else { "FAIL" },
        a.seeds,
        max_deviation,
        a.tol
    );
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Serialize)]
struct HamiltonianDump {
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "J")]
    hopping: f64,
    potential_spec: PotentialSpec,
    potential: Vec<f64>,
    matrix: Vec<Vec<f64>>,
    spectrum: Vec<f64>,
}

fn cmd_dump(a: &DumpArgs) -> Result<i32> {
    let cfg = RunConfig::load(&a.config.config, &a.config.overrides)?;
    let spec = cfg.ensemble_spec();
    let onsite = realization_draw(&spec, a.trajectory)?;
    let h = build_hamiltonian(spec.model.hopping, &onsite)?;
    let spectrum = h.spectrum()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match a.format {
        DumpFormat::Csv => {
            writeln!(out, "index,eigenvalue")?;
            for (i, e) in spectrum.iter().enumerate() {
                writeln!(out, "{i},{e}")?;
            }
        }
        DumpFormat::Json => {
            let m = h.matrix();
            let dump = HamiltonianDump {
                l: spec.model.l,
                hopping: spec.model.hopping,
                potential_spec: spec.model.potential,
                potential: onsite,
                matrix: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect(),
                spectrum,
            };
            serde_json::to_writer_pretty(&mut out, &dump)?;
            writeln!(out)?;
        }
    }
    Ok(EXIT_OK)
}
