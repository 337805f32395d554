mod config;
mod output;

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use orient_core::observables::{DEFAULT_GAMMA, DEFAULT_RESOLUTION, MIN_RESOLUTION};
use orient_core::optimal::{
    approx_optimal_state, best_target, exact_optimal_state, optimal_duration, projection_probability,
    subspace_population, Direction, OptimalState,
};
use orient_core::oracle::{compare_with_impulsive, FinitePulseSpec, PulseShape};
use orient_core::propagator::kick_level_converged;
use orient_core::propagator::DEFAULT_AUDIT_TOL;
use orient_core::scan::{line_scan, scan_max_orientation, DEFAULT_RATIO};
use orient_core::table::{fmt_sig, grid_csv, line_csv, trace_csv};
use orient_core::thermal::{thermal_orientation_trace_with, ThermalConfig};
use orient_core::units::{convert_physical_to_areas, implied_delta_alpha, Envelope, PhysicalPulse};
use orient_core::{
    build_cos2_theta, build_cos_theta, build_j_squared, free_evolve, orientation_trace, revival_stats, AngularBasis,
    Axis, Execution, KickAreas, KickCache, LineScanSpec, OrientError, OrientationTrace, ScanSpec,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{config_path, ConfigFile};
use crate::output::{emit, json_text, to_value, Format, JmaxUsage, RunManifest};

/// Orientation of a linear rotor after a half-cycle pulse and a laser kick.
#[derive(Debug, Parser)]
#[command(name = "orient", version)]
struct Cli {
    /// key = value file mirroring the flags; flags on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output format for tables
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker threads for scans (1 runs sequentially, 0 uses every core); overrides ORIENT_WORKERS
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Matrix elements of cos θ, cos² θ or J² on a fixed-m ladder
    #[command(allow_negative_numbers = true)]
    Operators(OperatorsArgs),
    /// Compare the impulsive kick against a finite pulse of relative width tau
    #[command(allow_negative_numbers = true)]
    Validate(ValidateArgs),
    /// Orientation trace <cos θ>(s) over one rotational period
    #[command(allow_negative_numbers = true)]
    Trace(TraceArgs),
    /// Optimally oriented states of the N lowest levels
    Optimal(OptimalArgs),
    /// Maximum orientation over an (A_L, A_HCP) grid
    Scan2d(Scan2dArgs),
    /// Maximum orientation along A_L = A_HCP / ratio
    Linescan(LineArgs),
    /// Pulse areas and rotational period from laboratory units
    #[command(allow_negative_numbers = true)]
    ConvertUnits(ConvertArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Operators(_) => "operators",
            Command::Validate(_) => "validate",
            Command::Trace(_) => "trace",
            Command::Optimal(_) => "optimal",
            Command::Scan2d(_) => "scan2d",
            Command::Linescan(_) => "linescan",
            Command::ConvertUnits(_) => "convert-units",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OperatorKind {
    Cos,
    Cos2,
    J2,
}

#[derive(Debug, Args, Serialize)]
struct OperatorsArgs {
    /// Magnetic quantum number
    #[arg(long, default_value_t = 0)]
    m: i32,
    /// Highest level on the ladder
    #[arg(long)]
    jmax: u32,
    #[arg(long, value_enum, default_value_t = OperatorKind::Cos)]
    op: OperatorKind,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ValidateArgs {
    #[arg(long)]
    ahcp: f64,
    #[arg(long, default_value_t = 0.0)]
    al: f64,
    /// Pulse width in rotational periods
    #[arg(long, default_value_t = 0.002)]
    tau: f64,
    /// sine-squared or gaussian
    #[arg(long, default_value = "sine-squared", value_parser = parse_shape)]
    shape: PulseShape,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Sign {
    Minus,
    Plus,
}

impl From<Sign> for Direction {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Minus => Direction::Minus,
            Sign::Plus => Direction::Plus,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct TraceArgs {
    #[arg(long)]
    ahcp: f64,
    #[arg(long, default_value_t = 0.0)]
    al: f64,
    /// Reduced temperature kT/B; omit or 0 for the cold molecule
    #[arg(long, value_parser = parse_nonnegative)]
    ttilde: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION, value_parser = parse_resolution)]
    resolution: usize,
    #[arg(long, default_value_t = DEFAULT_GAMMA, value_parser = parse_gamma)]
    gamma: f64,
    /// Also project on the optimal state of this dimension (cold only)
    #[arg(long)]
    target_n: Option<usize>,
    #[arg(long, value_enum, default_value_t = Sign::Minus)]
    target_sign: Sign,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct OptimalArgs {
    /// Number of lowest levels
    #[arg(long)]
    n: usize,
    /// Print the closed-form sine-profile states instead of the eigenvectors
    #[arg(long)]
    approx: bool,
    #[arg(long, default_value_t = DEFAULT_GAMMA, value_parser = parse_gamma)]
    gamma: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct Scan2dArgs {
    /// Laser area axis min:max:count
    #[arg(long, default_value = "0:6:121", allow_hyphen_values = true)]
    al: Axis,
    /// Half-cycle area axis min:max:count
    #[arg(long, default_value = "0:10:121", allow_hyphen_values = true)]
    ahcp: Axis,
    #[arg(long, value_parser = parse_nonnegative)]
    ttilde: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GAMMA, value_parser = parse_gamma)]
    gamma: f64,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION, value_parser = parse_resolution)]
    resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct LineArgs {
    /// Half-cycle area axis min:max:count
    #[arg(long, default_value = "0.25:6:48", allow_hyphen_values = true)]
    ahcp: Axis,
    #[arg(long, default_value_t = DEFAULT_RATIO)]
    ratio: f64,
    #[arg(long, value_parser = parse_nonnegative)]
    ttilde: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GAMMA, value_parser = parse_gamma)]
    gamma: f64,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION, value_parser = parse_resolution)]
    resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ConvertArgs {
    /// Rotational constant in cm⁻¹
    #[arg(long)]
    b_cm1: f64,
    /// Permanent dipole in Debye
    #[arg(long)]
    mu0_debye: f64,
    /// Half-cycle peak field in kV/cm
    #[arg(long, default_value_t = 100.0)]
    e_hcp_kv_cm: f64,
    #[arg(long, default_value_t = 2.0)]
    hcp_duration_ps: f64,
    /// flat-top, sine-squared or gaussian
    #[arg(long, default_value = "flat-top", value_parser = parse_envelope)]
    hcp_envelope: Envelope,
    /// Polarizability anisotropy in Å³; omit to skip the laser area
    #[arg(long)]
    delta_alpha_a3: Option<f64>,
    #[arg(long, default_value_t = 1e11)]
    laser_intensity_w_cm2: f64,
    #[arg(long, default_value_t = 2.0)]
    laser_duration_ps: f64,
    #[arg(long, default_value = "flat-top", value_parser = parse_envelope)]
    laser_envelope: Envelope,
    /// Report the anisotropy that gives this laser area
    #[arg(long)]
    target_al: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_shape(s: &str) -> Result<PulseShape, String> {
    PulseShape::parse(s).ok_or_else(|| format!("unknown pulse shape `{s}` (sine-squared, gaussian)"))
}

fn parse_envelope(s: &str) -> Result<Envelope, String> {
    Envelope::parse(s).ok_or_else(|| format!("unknown envelope `{s}` (flat-top, sine-squared, gaussian)"))
}

fn parse_nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a nonnegative number")),
    }
}

fn parse_gamma(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
        _ => Err(format!("`{s}` is not in (0, 1]")),
    }
}

fn parse_resolution(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= MIN_RESOLUTION => Ok(v),
        _ => Err(format!("`{s}` is not an integer >= {MIN_RESOLUTION}")),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<OrientError> for Failure {
    fn from(e: OrientError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

/// Finished output of one subcommand.
struct Rendered {
    body: String,
    out: Option<PathBuf>,
    manifest: RunManifest,
    failed_rows: usize,
}

fn render<T: Serialize>(format: Format, rows: &[T], csv: impl FnOnce(&[T]) -> String) -> String {
    match format {
        Format::Csv => csv(rows),
        Format::Json => json_text(rows),
    }
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn opt_sig(v: Option<f64>) -> String {
    fmt_sig(v.unwrap_or(f64::NAN))
}

#[derive(Serialize)]
struct OperatorRow {
    j: u32,
    j_prime: u32,
    value: f64,
}

fn run_operators(a: OperatorsArgs, format: Format) -> Result<Rendered, Failure> {
    let basis = AngularBasis::new(a.m, a.jmax)?;
    let op = match a.op {
        OperatorKind::Cos => build_cos_theta(&basis),
        OperatorKind::Cos2 => build_cos2_theta(&basis),
        OperatorKind::J2 => build_j_squared(&basis),
    };
    let rows: Vec<OperatorRow> = op
        .entries()
        .into_iter()
        .map(|(j, j_prime, value)| OperatorRow { j, j_prime, value })
        .collect();
    let body = render(format, &rows, |rows| {
        csv_table(
            "j,j_prime,value",
            rows.iter().map(|r| vec![r.j.to_string(), r.j_prime.to_string(), fmt_sig(r.value)]),
        )
    });
    let mut manifest = RunManifest::new("operators", &a);
    manifest.j_max_used = JmaxUsage::from_values([a.jmax]);
    manifest.summary = json!({ "dim": basis.dim(), "bandwidth": op.bandwidth(), "entries": rows.len() });
    Ok(Rendered {
        body,
        out: a.out,
        manifest,
        failed_rows: 0,
    })
}

const VALIDATE_HEADER: &str = "tau_rel,overlap,norm_drift,tail_population,j_max,steps";

fn run_validate(a: ValidateArgs, format: Format) -> Result<Rendered, Failure> {
    let areas = KickAreas::new(a.ahcp, a.al)?;
    let spec = FinitePulseSpec::new(a.tau, a.shape, areas)?;
    let cmp = compare_with_impulsive(&spec, KickCache::shared())?;
    let rows = [cmp];
    let body = render(format, &rows, |rows| {
        csv_table(
            VALIDATE_HEADER,
            rows.iter().map(|c| {
                vec![
                    fmt_sig(c.tau_rel),
                    fmt_sig(c.overlap),
                    fmt_sig(c.norm_drift),
                    fmt_sig(c.tail_population),
                    c.j_max.to_string(),
                    c.steps.to_string(),
                ]
            }),
        )
    });
    let mut manifest = RunManifest::new("validate", &a);
    manifest.j_max_used = JmaxUsage::from_values([cmp.j_max]);
    manifest.summary = json!({ "deficit": cmp.deficit() });
    Ok(Rendered {
        body,
        out: a.out,
        manifest,
        failed_rows: 0,
    })
}

#[derive(Serialize)]
struct TracePoint {
    s: f64,
    cos_expectation: f64,
}

fn run_trace(a: TraceArgs, format: Format, exec: Execution) -> Result<Rendered, Failure> {
    let areas = KickAreas::new(a.ahcp, a.al)?;
    let cache = KickCache::shared();
    let (trace, cold_state, j_max_used, channels): (OrientationTrace, _, Vec<u32>, usize) =
        match a.ttilde.filter(|&t| t > 0.0) {
            Some(t) => {
                let thermal = thermal_orientation_trace_with(areas, &ThermalConfig::new(t)?, a.resolution, exec, cache)?;
                let n = thermal.channels.len();
                (thermal.trace, None, thermal.j_max_used, n)
            }
            None => {
                let kick = kick_level_converged(areas, 0, 0, DEFAULT_AUDIT_TOL, cache)?;
                let j = kick.j_max();
                (orientation_trace(&kick.state, a.resolution)?, Some(kick.state), vec![j], 1)
            }
        };
    let stats = revival_stats(&trace, a.gamma)?;
    let (i_min, v_min) = trace
        .values()
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    let mut summary = json!({
        "max_abs": stats.max_abs,
        "signed_value": stats.signed_value,
        "s_at_max": stats.s_at_max,
        "duration": stats.duration,
        "threshold": stats.threshold,
        "sampled_min": v_min,
        "s_at_sampled_min": trace.s_at(i_min),
        "channels": channels,
    });
    if let Some(state) = &cold_state {
        let at_max = free_evolve(state, stats.s_at_max);
        let best = best_target(&at_max, 2..=orient_core::optimal::MAX_TABLE_DIM)?;
        summary["best_n"] = json!(best.n_dim);
        summary["best_sign"] = json!(best.direction);
        summary["p_n"] = json!(best.probability);
        summary["population_outside_best_n"] = json!(1.0 - subspace_population(&at_max, best.n_dim));
        if let Some(n) = a.target_n {
            let target = exact_optimal_state(n, a.target_sign.into())?;
            summary["p_target"] = json!(projection_probability(&at_max, &target)?);
            summary["population_outside_target_n"] = json!(1.0 - subspace_population(&at_max, n));
        }
    }
    let points: Vec<TracePoint> = trace
        .samples()
        .map(|(s, cos_expectation)| TracePoint { s, cos_expectation })
        .collect();
    let body = match format {
        Format::Csv => trace_csv(&trace),
        Format::Json => json_text(&points),
    };
    let mut manifest = RunManifest::new("trace", &a);
    manifest.j_max_used = JmaxUsage::from_values(j_max_used);
    manifest.summary = summary;
    Ok(Rendered {
        body,
        out: a.out,
        manifest,
        failed_rows: 0,
    })
}

const OPTIMAL_HEADER: &str = "n,direction,method,eigenvalue,delta_n,j,amplitude";

#[derive(Serialize)]
struct OptimalRow {
    n: usize,
    direction: Direction,
    method: &'static str,
    eigenvalue: f64,
    delta_n: f64,
    j: usize,
    amplitude: f64,
}

fn measured_duration(state: &OptimalState, gamma: f64) -> Result<f64, Failure> {
    let trace = orientation_trace(&state.to_wavefunction()?, 1 << 15)?;
    Ok(revival_stats(&trace, gamma)?.duration)
}

fn run_optimal(a: OptimalArgs, format: Format) -> Result<Rendered, Failure> {
    let delta_n = optimal_duration(a.n, a.gamma)?;
    let exact = [
        exact_optimal_state(a.n, Direction::Minus)?,
        exact_optimal_state(a.n, Direction::Plus)?,
    ];
    let approx = [
        approx_optimal_state(a.n, Direction::Minus)?,
        approx_optimal_state(a.n, Direction::Plus)?,
    ];
    let (shown, method) = if a.approx { (&approx, "approx") } else { (&exact, "exact") };
    let rows: Vec<OptimalRow> = shown
        .iter()
        .flat_map(|s| {
            s.amplitudes.iter().enumerate().map(move |(j, &amplitude)| OptimalRow {
                n: s.n_dim,
                direction: s.direction,
                method,
                eigenvalue: s.eigenvalue,
                delta_n,
                j,
                amplitude,
            })
        })
        .collect();
    let body = render(format, &rows, |rows| {
        csv_table(
            OPTIMAL_HEADER,
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    r.direction.label().to_string(),
                    r.method.to_string(),
                    fmt_sig(r.eigenvalue),
                    fmt_sig(r.delta_n),
                    r.j.to_string(),
                    fmt_sig(r.amplitude),
                ]
            }),
        )
    });
    let overlap: f64 = exact[1].amplitudes.iter().zip(&approx[1].amplitudes).map(|(x, y)| x * y).sum();
    let measured = measured_duration(&exact[1], a.gamma)?;
    let mut manifest = RunManifest::new("optimal", &a);
    manifest.summary = json!({
        "exact_eigenvalue": exact[1].eigenvalue,
        "approx_eigenvalue": approx[1].eigenvalue,
        "eigenvalue_gap": exact[1].eigenvalue - approx[1].eigenvalue,
        "exact_approx_overlap": overlap * overlap,
        "delta_n": delta_n,
        "measured_duration": measured,
        "delta_n_relative_error": if measured > 0.0 { delta_n / measured - 1.0 } else { f64::NAN },
    });
    Ok(Rendered {
        body,
        out: a.out,
        manifest,
        failed_rows: 0,
    })
}

fn run_scan2d(a: Scan2dArgs, format: Format, exec: Execution) -> Result<Rendered, Failure> {
    let mut spec = ScanSpec::new(a.al, a.ahcp)?.with_temperature(a.ttilde);
    spec.gamma = a.gamma;
    spec.resolution = a.resolution;
    let rows = scan_max_orientation(&spec, exec, KickCache::shared());
    let failed_rows = rows.iter().filter(|r| r.error.is_some()).count();
    let best = rows
        .iter()
        .filter(|r| r.error.is_none())
        .max_by(|x, y| x.max_abs.total_cmp(&y.max_abs));
    let body = render(format, &rows, grid_csv);
    let mut manifest = RunManifest::new("scan2d", &a);
    manifest.j_max_used = JmaxUsage::from_values(rows.iter().map(|r| r.j_max));
    manifest.summary = json!({
        "points": rows.len(),
        "failed_points": failed_rows,
        "max_abs": best.map(|r| r.max_abs),
        "at_a_l": best.map(|r| r.a_l),
        "at_a_hcp": best.map(|r| r.a_hcp),
        "signed_value": best.map(|r| r.signed_value),
    });
    Ok(Rendered {
        body,
        out: a.out,
        manifest,
        failed_rows,
    })
}

fn run_linescan(a: LineArgs, format: Format, exec: Execution) -> Result<Rendered, Failure> {
    let mut spec = LineScanSpec::new(a.ahcp, a.ratio)?.with_temperature(a.ttilde);
    spec.gamma = a.gamma;
    spec.resolution = a.resolution;
    let rows = line_scan(&spec, exec, KickCache::shared());
    let failed_rows = rows.iter().filter(|r| r.error.is_some()).count();
    let ok = || rows.iter().filter(|r| r.error.is_none());
    let peak_duration = ok().map(|r| r.duration).fold(f64::NAN, f64::max);
    let min_p_n = ok().map(|r| r.p_n).filter(|p| !p.is_nan()).fold(f64::NAN, f64::min);
    let body = render(format, &rows, line_csv);
    let mut manifest = RunManifest::new("linescan", &a);
    manifest.j_max_used = JmaxUsage::from_values(rows.iter().map(|r| r.j_max));
    manifest.summary = json!({
        "points": rows.len(),
        "failed_points": failed_rows,
        "max_abs": ok().map(|r| r.max_abs).fold(f64::NAN, f64::max),
        "max_abs_hcp_only": ok().map(|r| r.max_abs_hcp_only).fold(f64::NAN, f64::max),
        "peak_duration": peak_duration,
        "min_p_n": min_p_n,
    });
    Ok(Rendered {
        body,
        out: a.out,
        manifest,
        failed_rows,
    })
}

const CONVERT_HEADER: &str = "tau_rot_ps,a_hcp,a_l,hcp_duration_rel,laser_duration_rel,implied_delta_alpha_a3";

#[derive(Serialize)]
struct ConvertRow {
    tau_rot_ps: f64,
    a_hcp: f64,
    a_l: Option<f64>,
    hcp_duration_rel: f64,
    laser_duration_rel: f64,
    implied_delta_alpha_a3: Option<f64>,
}

fn run_convert(a: ConvertArgs, format: Format) -> Result<Rendered, Failure> {
    let pulse = PhysicalPulse {
        b_cm1: a.b_cm1,
        mu0_debye: a.mu0_debye,
        e_hcp_kv_cm: a.e_hcp_kv_cm,
        hcp_duration_ps: a.hcp_duration_ps,
        hcp_envelope: a.hcp_envelope,
        delta_alpha_a3: a.delta_alpha_a3,
        laser_intensity_w_cm2: a.laser_intensity_w_cm2,
        laser_duration_ps: a.laser_duration_ps,
        laser_envelope: a.laser_envelope,
    };
    let conv = convert_physical_to_areas(&pulse)?;
    let implied = a
        .target_al
        .map(|al| implied_delta_alpha(al, a.laser_intensity_w_cm2, a.laser_duration_ps, a.laser_envelope))
        .transpose()?;
    let rows = [ConvertRow {
        tau_rot_ps: conv.tau_rot_ps,
        a_hcp: conv.a_hcp,
        a_l: conv.a_l,
        hcp_duration_rel: conv.hcp_duration_rel,
        laser_duration_rel: conv.laser_duration_rel,
        implied_delta_alpha_a3: implied,
    }];
    let body = render(format, &rows, |rows| {
        csv_table(
            CONVERT_HEADER,
            rows.iter().map(|r| {
                vec![
                    fmt_sig(r.tau_rot_ps),
                    fmt_sig(r.a_hcp),
                    opt_sig(r.a_l),
                    fmt_sig(r.hcp_duration_rel),
                    fmt_sig(r.laser_duration_rel),
                    opt_sig(r.implied_delta_alpha_a3),
                ]
            }),
        )
    });
    let mut manifest = RunManifest::new("convert-units", &a);
    manifest.summary = to_value(conv);
    Ok(Rendered {
        body,
        out: a.out,
        manifest,
        failed_rows: 0,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let started = Instant::now();
    let exec = match cli.workers {
        Some(w) => Execution::from_workers(Some(w)),
        None => Execution::from_env(),
    };
    let format = cli.format;
    let name = cli.command.name();
    let mut r = match cli.command {
        Command::Operators(a) => run_operators(a, format)?,
        Command::Validate(a) => run_validate(a, format)?,
        Command::Trace(a) => run_trace(a, format, exec)?,
        Command::Optimal(a) => run_optimal(a, format)?,
        Command::Scan2d(a) => run_scan2d(a, format, exec)?,
        Command::Linescan(a) => run_linescan(a, format, exec)?,
        Command::ConvertUnits(a) => run_convert(a, format)?,
    };
    r.manifest.execution = format!("{exec:?}");
    r.manifest.format = format;
    r.manifest.output = r.out.as_ref().map(|p| p.display().to_string());
    if let Some(cfg) = &cli.config {
        r.manifest.parameters["config"] = json!(cfg.display().to_string());
    }
    r.manifest.finish(started.elapsed());
    emit(&r.body, r.out.as_deref(), &r.manifest)?;
    if r.failed_rows > 0 {
        return Err(Failure::Numerical(format!(
            "{name}: {} point(s) failed; see the error column",
            r.failed_rows
        )));
    }
    Ok(())
}

/// First token naming a subcommand, used to pick the config section.
fn subcommand_in(argv: &[String]) -> Option<String> {
    let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    argv.iter().skip(1).find(|a| names.contains(a)).cloned()
}

fn merged_argv() -> Result<Vec<String>, Failure> {
    let mut argv: Vec<String> = std::env::args().collect();
    if let Some(path) = config_path(&argv) {
        let cfg = ConfigFile::load(Path::new(&path)).map_err(|e| Failure::Usage(e.to_string()))?;
        let extra = cfg.extra_args(subcommand_in(&argv).as_deref(), &argv);
        argv.extend(extra);
    }
    Ok(argv)
}

fn main() -> ExitCode {
    let argv = match merged_argv() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("orient: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("orient: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
