use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use szego_core::experiments::{
    flow_for, modes_for_horizon, run_compare, run_instability, run_quasip, CompareConfig, Drift, InstabilityConfig,
    InstabilityRow, QuasipConfig,
};
use szego_core::explicit::evolve_hierarchy;
use szego_core::{rk4_hierarchy, rk4_szego, HardyFunction, Rk4Config, SobolevIndex};

use crate::error::{exit, CliError, CliResult};
use crate::input::{parse_input, random_datum, InputData};
use crate::output::{float, int, sibling, write_csv, write_csv_stdout, write_meta, Meta, Table};

#[derive(Debug, Parser)]
#[command(name = "szego", version, about = "Explicit-formula and RK4 experiments for the cubic Szegő equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solution at --t-end by the explicit formula; CSV columns k, re, im.
    EvolveExplicit(ExplicitArgs),
    /// Solution at --t-end by RK4 on N modes; CSV columns k, re, im.
    EvolveDirect(DirectArgs),
    /// Explicit formula against RK4 on a time grid, with invariant drifts.
    Compare(CompareArgs),
    /// Growth of ‖u^ε(t^ε)‖_{H^s} for u₀ = e^{ix} + ε.
    Instability(InstabilityArgs),
    /// Boundedness, V(d) class and near-recurrence along [0, T].
    Quasip(QuasipArgs),
    /// Hierarchy flow Σ a_k X_{J^{y_k}}: explicit formula against RK4.
    Hierarchy(HierarchyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// JSON datum: {"coeffs": [[re, im], ...]} or {"rational": {"A": ..., "B": ..., "d": n}}.
    #[arg(long, required_unless_present = "seed")]
    pub input: Option<PathBuf>,
    /// Use a random V(3)/V(4) datum of unit norm drawn from this seed.
    #[arg(long, conflicts_with = "input")]
    pub seed: Option<u64>,
}

impl DataArgs {
    pub fn load(&self) -> CliResult<InputData> {
        match (&self.input, self.seed) {
            (Some(path), _) => parse_input(path),
            (None, Some(seed)) => Ok(random_datum(seed)),
            (None, None) => Err(CliError::Usage("pass --input or --seed".into())),
        }
    }

    fn coefficients(&self) -> CliResult<HardyFunction> {
        Ok(self.load()?.coefficients(64))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExplicitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub t_end: f64,
    /// Number of output coefficients; by default, as many as --tol requires.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Bound on the L² norm of the discarded tail.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DirectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Truncation N of the RK4 state; by default, enough for the explicit
    /// solution's coefficients to fall below 1e−12 on [0, t_end].
    #[arg(long)]
    pub modes: Option<usize>,
    /// Largest admissible drift of mass, momentum, energy and J^y.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Truncation N of the RK4 state; chosen as for evolve-direct by default.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Largest admissible L² distance between the two solutions.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.1)]
    pub sample_every: f64,
    /// Skip invariant monitoring (two N×N eigenproblems per sample).
    #[arg(long)]
    pub no_monitor: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InstabilityArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.125,0.0625,0.03125,0.015625")]
    pub epsilons: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sobolev_s: f64,
    /// Fixed truncation (at least 64); by default coefficients are extracted
    /// until the H^s tail is negligible.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Relative tolerance on the slope 2s − 1.
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// CSV path; the p^ε trajectory goes to <out>.trajectory.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuasipArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 1000.0)]
    pub horizon: f64,
    /// Recurrence threshold in H¹.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sobolev_s: f64,
    /// Grid step; by default 2π/(64 λ_max).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HierarchyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// Parameters y_k > 0, pairwise distinct.
    #[arg(long, value_delimiter = ',', required = true)]
    pub y: Vec<f64>,
    /// Weights a_k, one per y_k.
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 128)]
    pub modes: usize,
    /// Largest admissible L² distance between the two solutions.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a subcommand before anything is written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    /// Additional tables as (file-name suffix, table).
    pub extra: Vec<(&'static str, Table)>,
    pub summary: Value,
    pub pass: bool,
}

const MONITOR_YS: [f64; 3] = [0.5, 1.0, 2.0];
const MAX_AUTO_MODES: usize = 4096;

/// RK4 truncation: the requested one, else the smallest N at which the
/// explicit coefficients fall below 1e−12 over [0, t_end].
fn rk4_modes(requested: Option<usize>, u0: &HardyFunction, t_end: f64) -> CliResult<usize> {
    let n = match requested {
        Some(n) => n,
        None => modes_for_horizon(&flow_for(u0)?, t_end, 1e-12)?.clamp(32, MAX_AUTO_MODES),
    };
    check_fits(u0, n)?;
    Ok(n)
}

/// The RK4 state keeps the first n coefficients of the datum; refuse if that
/// drops more than rounding.
fn check_fits(u0: &HardyFunction, n: usize) -> CliResult<()> {
    let dropped = u0.sub(&u0.resized(n)).norm_l2();
    if dropped > 1e-12 * u0.norm_l2().max(1.0) {
        return Err(CliError::Usage(format!("--modes {n} drops datum coefficients of norm {dropped:.3e}")));
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be positive and finite, got {x}")))
    }
}

fn sobolev(s: f64) -> CliResult<SobolevIndex> {
    SobolevIndex::new(s).map_err(|e| CliError::Usage(e.to_string()))
}

fn coefficient_table(u: &HardyFunction) -> Table {
    let mut table = Table::new(&["k", "re", "im"]);
    for (k, c) in u.coeffs().iter().enumerate() {
        table.push(vec![int(k), float(c.re), float(c.im)]);
    }
    table
}

fn invariants(u: &HardyFunction) -> Value {
    json!({"mass": u.mass(), "momentum": u.momentum(), "energy": u.energy()})
}

fn drift_json(d: &Drift) -> Value {
    json!({"mass": d.mass, "momentum": d.momentum, "energy": d.energy, "j": d.j, "spectrum": d.spectrum})
}

pub fn evolve_explicit(args: &ExplicitArgs) -> CliResult<Outcome> {
    positive("tol", args.tol)?;
    let u0 = args.data.coefficients()?;
    let prop = flow_for(&u0)?.propagator(args.t_end);
    let u = match args.modes {
        Some(n) => prop.coefficients(n),
        None => prop.coefficients_to_tolerance(args.tol, sobolev(0.0)?, 1 << 22)?,
    };
    let tail = prop.tail_mass(u.len()).sqrt();
    Ok(Outcome {
        table: coefficient_table(&u),
        extra: Vec::new(),
        summary: json!({
            "t": args.t_end,
            "modes": u.len(),
            "tail_l2": tail,
            "initial": invariants(&u0),
            "final": invariants(&u),
        }),
        pass: tail <= args.tol,
    })
}

pub fn evolve_direct(args: &DirectArgs) -> CliResult<Outcome> {
    positive("dt", args.dt)?;
    let u0 = args.data.coefficients()?;
    let modes = rk4_modes(args.modes, &u0, args.t_end)?;
    let cfg = Rk4Config { dt: args.dt, observe_every: 0, monitor_ys: MONITOR_YS.to_vec() };
    let (u, obs) = rk4_szego(&u0.resized(modes), args.t_end, &cfg)?;
    let drift = match (obs.first(), obs.last()) {
        (Some(a), Some(b)) => Drift::between(a, b),
        _ => Drift::default(),
    };
    Ok(Outcome {
        table: coefficient_table(&u),
        extra: Vec::new(),
        summary: json!({
            "t": args.t_end,
            "modes": modes,
            "steps": (args.t_end / args.dt).ceil(),
            "drift": drift_json(&drift),
            "initial": invariants(&u0),
            "final": invariants(&u),
        }),
        pass: drift.max() <= args.tol,
    })
}

pub fn compare(args: &CompareArgs) -> CliResult<Outcome> {
    positive("dt", args.dt)?;
    positive("t-end", args.t_end)?;
    positive("sample-every", args.sample_every)?;
    let u0 = args.data.coefficients()?;
    let modes = rk4_modes(args.modes, &u0, args.t_end)?;
    let mut cfg = CompareConfig::new(args.t_end, args.dt, modes);
    cfg.sample_every = args.sample_every;
    cfg.monitor = !args.no_monitor;
    cfg.monitor_ys = MONITOR_YS.to_vec();
    let report = run_compare(&u0, &cfg)?;

    const FIELDS: [&str; 5] = ["mass", "momentum", "energy", "j", "spectrum"];
    let mut header = vec!["t".to_string(), "distance".to_string()];
    if cfg.monitor {
        for side in ["explicit", "rk4"] {
            header.extend(FIELDS.iter().map(|f| format!("{side}_{f}_drift")));
        }
    }
    let mut table = Table { header, rows: Vec::new() };
    for row in &report.rows {
        let mut cells = vec![float(row.t), float(row.distance)];
        for d in [row.explicit, row.rk4].into_iter().flatten() {
            cells.extend([d.mass, d.momentum, d.energy, d.j, d.spectrum].map(float));
        }
        table.push(cells);
    }
    let tail = flow_for(&u0)?.propagator(args.t_end).tail_mass(modes).sqrt();
    Ok(Outcome {
        table,
        extra: Vec::new(),
        summary: json!({
            "modes": modes,
            "max_distance": report.max_distance,
            "tol": args.tol,
            "explicit_tail_l2_beyond_modes": tail,
            "max_explicit_drift": report.max_explicit_drift.as_ref().map(drift_json),
            "max_rk4_drift": report.max_rk4_drift.as_ref().map(drift_json),
        }),
        pass: report.max_distance <= args.tol,
    })
}

pub fn instability(args: &InstabilityArgs) -> CliResult<Outcome> {
    if args.epsilons.iter().any(|&e| e == 0.0 || !e.is_finite()) {
        return Err(CliError::Usage("--epsilons must be nonzero and finite".into()));
    }
    positive("tol", args.tol)?;
    let mut cfg = InstabilityConfig::new(args.epsilons.clone(), sobolev(args.sobolev_s)?);
    cfg.modes = args.modes;
    let report = run_instability(&cfg)?;

    let mut table = Table::new(&[
        "eps",
        "t_peak",
        "modes",
        "tail_mass",
        "norm_hs",
        "argmax_mu",
        "argmax_ref_lo",
        "argmax_ref_hi",
        "sum_mu",
        "closed_form_distance",
        "status",
        "required_modes",
    ]);
    let mut points_ok = true;
    for row in &report.rows {
        match row {
            InstabilityRow::Point(p) => {
                let (lo, hi) = p.reference_argmax;
                points_ok &= (p.sum_mu - 1.0).abs() <= 1e-8 && (lo..=hi).contains(&p.argmax_mu);
                table.push(vec![
                    float(p.eps),
                    float(p.t_peak),
                    int(p.modes),
                    float(p.tail_mass),
                    float(p.norm_hs),
                    int(p.argmax_mu),
                    int(lo),
                    int(hi),
                    float(p.sum_mu),
                    float(p.closed_form_distance),
                    "ok".into(),
                    String::new(),
                ]);
            }
            InstabilityRow::Refused { eps, modes, tail_mass, required_modes } => {
                points_ok = false;
                let mut cells = vec![float(*eps), String::new(), int(*modes), float(*tail_mass)];
                cells.extend(std::iter::repeat_n(String::new(), 6));
                cells.extend(["refused".into(), required_modes.map(int).unwrap_or_default()]);
                table.push(cells);
            }
        }
    }

    let mut trajectory = Table::new(&["eps", "t", "p_re", "p_im", "p_closed_re", "p_closed_im"]);
    for s in &report.trajectory {
        trajectory
            .push([s.eps, s.t, s.p_explicit.re, s.p_explicit.im, s.p_closed.re, s.p_closed.im].map(float).to_vec());
    }

    // The scaling law ‖u^ε(t^ε)‖_{H^s} ~ ε^{1−2s} holds for s > 1/2.
    let expected = 2.0 * args.sobolev_s - 1.0;
    let slope_ok = match report.slope {
        Some(slope) if args.sobolev_s > 0.5 => (slope - expected).abs() <= args.tol * expected.abs().max(1.0),
        Some(_) => true,
        None => false,
    };
    Ok(Outcome {
        table,
        extra: vec![(".trajectory.csv", trajectory)],
        summary: json!({"slope": report.slope, "expected_slope": expected, "slope_ok": slope_ok, "points_ok": points_ok}),
        pass: slope_ok && points_ok,
    })
}

pub fn quasip(args: &QuasipArgs) -> CliResult<Outcome> {
    positive("horizon", args.horizon)?;
    positive("delta", args.delta)?;
    let u0 = args.data.coefficients()?;
    let mut cfg = QuasipConfig::new(args.horizon, args.delta, sobolev(args.sobolev_s)?);
    cfg.step = args.dt;
    let report = run_quasip(&u0, &cfg)?;

    let mut table = Table::new(&["t", "norm_hs", "distance_h1", "vd"]);
    for s in &report.samples {
        table.push(vec![float(s.t), float(s.norm_hs), float(s.distance_h1), s.vd.map(int).unwrap_or_default()]);
    }
    let point = |p: (f64, f64)| json!({"t": p.0, "distance_h1": p.1});
    Ok(Outcome {
        table,
        extra: Vec::new(),
        summary: json!({
            "vd": report.vd0,
            "vd_constant": report.vd_constant,
            "norm0": report.norm0,
            "sup_norm": report.sup_norm,
            "window_maxima": report.window_maxima,
            "bounded": report.bounded,
            "step": report.step,
            "best_recurrence": point(report.best_recurrence),
            "recurrence": report.recurrence.map(point),
        }),
        pass: report.bounded && report.vd_constant && report.recurrence.is_some(),
    })
}

pub fn hierarchy(args: &HierarchyArgs) -> CliResult<Outcome> {
    positive("dt", args.dt)?;
    if args.y.len() != args.a.len() {
        return Err(CliError::Usage(format!("--y has {} values but --a has {}", args.y.len(), args.a.len())));
    }
    let u0 = args.data.coefficients()?;
    check_fits(&u0, args.modes)?;
    let flow = flow_for(&u0)?;
    let explicit = evolve_hierarchy(&flow, args.t_end, &args.a, &args.y, args.modes)?;
    let (rk4, _) = rk4_hierarchy(&u0.resized(args.modes), args.t_end, &Rk4Config::new(args.dt), &args.a, &args.y)?;

    let mut table = Table::new(&["k", "explicit_re", "explicit_im", "rk4_re", "rk4_im"]);
    for (k, (e, r)) in explicit.coeffs().iter().zip(rk4.coeffs()).enumerate() {
        table.push(vec![int(k), float(e.re), float(e.im), float(r.re), float(r.im)]);
    }
    let distance = explicit.sub(&rk4).norm_l2();
    let tail = flow.hierarchy_propagator(args.t_end, &args.a, &args.y)?.tail_mass(args.modes).sqrt();
    Ok(Outcome {
        table,
        extra: Vec::new(),
        summary: json!({"distance": distance, "tol": args.tol, "explicit_tail_l2_beyond_modes": tail}),
        pass: distance <= args.tol,
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::EvolveExplicit(_) => "evolve-explicit",
        Command::EvolveDirect(_) => "evolve-direct",
        Command::Compare(_) => "compare",
        Command::Instability(_) => "instability",
        Command::Quasip(_) => "quasip",
        Command::Hierarchy(_) => "hierarchy",
    }
}

pub fn execute(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::EvolveExplicit(a) => evolve_explicit(a),
        Command::EvolveDirect(a) => evolve_direct(a),
        Command::Compare(a) => compare(a),
        Command::Instability(a) => instability(a),
        Command::Quasip(a) => quasip(a),
        Command::Hierarchy(a) => hierarchy(a),
    }
}

fn emit<C: Serialize>(name: &str, config: &C, out: Option<&PathBuf>, outcome: &Outcome) -> CliResult<()> {
    match out {
        Some(path) => {
            write_csv(path, &outcome.table)?;
            for (suffix, table) in &outcome.extra {
                write_csv(&sibling(path, suffix), table)?;
            }
            let meta = Meta {
                tool: "szego",
                version: env!("CARGO_PKG_VERSION"),
                command: name,
                config,
                summary: &outcome.summary,
                pass: outcome.pass,
            };
            write_meta(path, &meta)?;
        }
        None => write_csv_stdout(&outcome.table)?,
    }
    Ok(())
}

/// Runs the command, writes its outputs and returns the exit status.
pub fn run(cli: &Cli) -> CliResult<i32> {
    let outcome = execute(&cli.command)?;
    let name = command_name(&cli.command);
    match &cli.command {
        Command::EvolveExplicit(a) => emit(name, a, a.out.as_ref(), &outcome)?,
        Command::EvolveDirect(a) => emit(name, a, a.out.as_ref(), &outcome)?,
        Command::Compare(a) => emit(name, a, a.out.as_ref(), &outcome)?,
        Command::Instability(a) => emit(name, a, a.out.as_ref(), &outcome)?,
        Command::Quasip(a) => emit(name, a, a.out.as_ref(), &outcome)?,
        Command::Hierarchy(a) => emit(name, a, a.out.as_ref(), &outcome)?,
    }
    eprintln!("{name}: {}", serde_json::to_string(&outcome.summary).unwrap_or_default());
    eprintln!("{name}: {}", if outcome.pass { "PASS" } else { "FAIL (tolerance)" });
    Ok(if outcome.pass { exit::PASS } else { exit::TOLERANCE })
}
