//! The five subcommands. Each returns the process exit code on success.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use rosenau_core::classify::{family_regime, regime_report, ClassifyOptions};
use rosenau_core::evolution::{evolve, shape_error, ShapeError};
use rosenau_core::params::validate_params;
use rosenau_core::solver::{residual_norm, solve_in, SolveResult};
use rosenau_core::spectral::{build_symbols, default_resonance_tol};
use rosenau_core::validate::{
    decay_fit, exact_kawahara, exact_kdv, exact_rlw, linf_vs_exact, run_benchmark, sweep_entry,
    symmetry_defect, DecayFit, ExactWave, SweepRow, SweepStatus,
};
use rosenau_core::{
    ab_coefficients, EquationParams, EvolveConfig, Grid, NonlinearitySpec, RegimeReport,
    SolveConfig, SpectralField, SpectralSpace,
};

use crate::config::{Format, RunConfig};
use crate::io::{csv_table, dat_table, float, read_profile, write, write_json};
use crate::plot::line_plot;
use crate::{EXIT_INVALID, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_VALIDATION};

/// Prints the validity report and returns the invalid-parameter exit code
/// when the parameters (or the family pattern) are rejected.
fn gate_params(cfg: &RunConfig) -> Option<u8> {
    let params = cfg.params();
    let mut report = validate_params(&params);
    if let Some(tag) = cfg.family {
        if let Err(e) = tag.check(&params) {
            report.ok = false;
            report.violations.push(e.to_string());
        }
    }
    if report.ok {
        return None;
    }
    eprintln!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
    Some(EXIT_INVALID)
}

fn output_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("output"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    cfg.write_effective(&dir)?;
    Ok(dir)
}

fn classify_one(cfg: &RunConfig, cs: f64) -> rosenau_core::Result<RegimeReport> {
    let params = cfg.params();
    match cfg.family {
        Some(tag) => family_regime(tag, &params, cs),
        None => regime_report(&params, cs, &ClassifyOptions::default()),
    }
}

pub fn classify(cfg: &RunConfig) -> Result<u8> {
    if let Some(code) = gate_params(cfg) {
        return Ok(code);
    }
    let records: Vec<Value> = cfg
        .speed_list()?
        .into_iter()
        .map(|cs| match classify_one(cfg, cs) {
            Ok(report) => {
                let mut v = serde_json::to_value(&report).expect("report serializes");
                v["cs"] = json!(cs);
                v
            }
            Err(e) => json!({ "cs": cs, "error": e.to_string() }),
        })
        .collect();
    for r in &records {
        println!("{}", serde_json::to_string(r)?);
    }
    if cfg.output.is_some() {
        let dir = output_dir(cfg)?;
        write_json(&dir.join("classify.json"), &records)?;
    }
    Ok(EXIT_OK)
}

/// The closed-form wave whose parameters and speed match the run.
fn matching_exact(cfg: &RunConfig, cs: f64) -> Result<ExactWave> {
    let p = cfg.params();
    let mut candidates = vec![exact_kdv(), exact_kawahara()];
    if let Ok(w) = exact_rlw(p.alpha, p.epsilon, cs) {
        candidates.insert(0, w);
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-8 * (1.0 + b.abs());
    let same = |w: &ExactWave| {
        let q = w.params;
        close(p.alpha, q.alpha)
            && close(p.beta, q.beta)
            && close(p.gamma, q.gamma)
            && close(p.epsilon, q.epsilon)
            && close(p.eta, q.eta)
            && close(cs, w.cs)
    };
    candidates
        .into_iter()
        .find(same)
        .context("no closed-form solution matches these parameters and speed")
}

#[derive(Serialize)]
struct SolveReport<'a> {
    cs: f64,
    converged: bool,
    iterations: usize,
    amplitude: f64,
    nu: f64,
    final_error: Option<f64>,
    final_stab_err: f64,
    final_residual: f64,
    clamped_modes: usize,
    resonant: bool,
    warnings: &'a [String],
    symmetry_defect: f64,
    decay_fit: Option<DecayFit>,
    decay_fit_error: Option<String>,
    regime: Option<RegimeReport>,
    exact: Option<&'static str>,
    linf_vs_exact: Option<f64>,
}

struct Derivatives {
    ux: Vec<f64>,
    uxx: Vec<f64>,
}

fn derivatives(space: &SpectralSpace, f: &SpectralField) -> Derivatives {
    Derivatives {
        ux: space.inverse(&space.derivative_coeffs(f.coeffs(), 1)),
        uxx: space.inverse(&space.derivative_coeffs(f.coeffs(), 2)),
    }
}

fn write_profile(dir: &Path, stem: &str, space: &SpectralSpace, f: &SpectralField, cfg: &RunConfig) -> Result<()> {
    let grid = space.grid();
    let d = derivatives(space, f);
    let x = grid.nodes();
    let u = f.values();
    match cfg.format {
        Format::Csv => {
            let rows = (0..grid.len()).map(|j| vec![float(x[j]), float(u[j]), float(d.ux[j]), float(d.uxx[j])]);
            write(&dir.join(format!("{stem}.csv")), &csv_table(&["X", "u", "u'", "u''"], rows))?;
        }
        Format::Json => {
            write_json(&dir.join(format!("{stem}.json")), &json!({ "X": x, "u": u, "u'": d.ux, "u''": d.uxx }))?;
        }
    }
    let rows = (0..grid.len()).map(|j| vec![x[j], u[j], d.ux[j], d.uxx[j]]);
    write(&dir.join(format!("{stem}.dat")), &dat_table(&["X", "u", "u'", "u''"], rows))?;
    let rows = (0..grid.len()).map(|j| vec![u[j], d.ux[j]]);
    write(&dir.join("phase.dat"), &dat_table(&["u", "u'"], rows))?;
    if cfg.svg {
        write(&dir.join(format!("{stem}.svg")), &line_plot("profile", "X", "u", &x, u))?;
        write(&dir.join("phase.svg"), &line_plot("phase portrait", "u", "u'", u, &d.ux))?;
    }
    Ok(())
}

fn write_trace(dir: &Path, result: &SolveResult, cfg: &RunConfig) -> Result<()> {
    let records = &result.trace.records;
    match cfg.format {
        Format::Csv => {
            let rows = records.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    r.error.map(float).unwrap_or_default(),
                    float(r.stab_err),
                    float(r.residual),
                    float(r.m),
                ]
            });
            write(&dir.join("trace.csv"), &csv_table(&["n", "Error", "StabErr", "Res", "M"], rows))
        }
        Format::Json => write_json(&dir.join("trace.json"), records),
    }
}

pub fn solve(cfg: &RunConfig) -> Result<u8> {
    if let Some(code) = gate_params(cfg) {
        return Ok(code);
    }
    let cs = cfg.speeds.cs.context("solve needs --cs")?;
    let params = cfg.params();
    let space = SpectralSpace::new(cfg.grid()?)?;
    let exact = if cfg.compare_exact { Some(matching_exact(cfg, cs)?) } else { None };
    let result = solve_in(&space, &params, cs, &cfg.nonlinearity, &cfg.solve_config()?)?;

    let dir = output_dir(cfg)?;
    write_profile(&dir, "profile", &space, &result.profile, cfg)?;
    write_trace(&dir, &result, cfg)?;

    let coeffs = ab_coefficients(&params, cs)?;
    let (fit, fit_err) = match decay_fit(&space, &result.profile, &coeffs) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let last = result.trace.last().copied();
    let report = SolveReport {
        cs,
        converged: result.converged,
        iterations: result.iterations,
        amplitude: result.amplitude,
        nu: result.nu,
        final_error: last.and_then(|r| r.error),
        final_stab_err: last.map_or(f64::NAN, |r| r.stab_err),
        final_residual: result.final_residual(),
        clamped_modes: result.clamped_modes,
        resonant: result.resonant,
        warnings: &result.warnings,
        symmetry_defect: symmetry_defect(&result.profile),
        decay_fit: fit,
        decay_fit_error: fit_err,
        regime: classify_one(cfg, cs).ok(),
        exact: exact.as_ref().map(|w| w.name()),
        linf_vs_exact: exact.as_ref().map(|w| linf_vs_exact(&result.profile, w)),
    };
    write_json(&dir.join("report.json"), &report)?;
    eprintln!(
        "cs = {cs}: converged = {}, iterations = {}, amplitude = {:.10e}, Res = {:.3e}",
        result.converged,
        result.iterations,
        result.amplitude,
        result.final_residual()
    );
    if let Some(l) = report.linf_vs_exact {
        eprintln!("L-infinity distance to the closed form: {l:.3e}");
    }
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if result.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn sweep_rows(cfg: &RunConfig, speeds: &[f64]) -> Result<Vec<SweepRow>> {
    let grid = cfg.grid()?;
    let params = cfg.params();
    let solve_cfg = cfg.solve_config()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cfg.jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    let pool = builder.build()?;
    let mut rows: Vec<SweepRow> = pool.install(|| {
        speeds
            .par_iter()
            .map_init(
                || SpectralSpace::new(grid).expect("grid already validated"),
                |space, &cs| sweep_entry(space, &params, &cfg.nonlinearity, cs, &solve_cfg, cfg.force),
            )
            .collect()
    });
    rows.sort_by(|a, b| a.cs.total_cmp(&b.cs));
    Ok(rows)
}

fn status_name(s: &SweepStatus) -> String {
    match s {
        SweepStatus::Converged => "converged".into(),
        SweepStatus::NotConverged { .. } => "not-converged".into(),
        SweepStatus::Gated => "gated".into(),
        SweepStatus::Failed { message } => format!("failed: {}", message.replace(',', ";")),
    }
}

pub fn sweep(cfg: &RunConfig) -> Result<u8> {
    if let Some(code) = gate_params(cfg) {
        return Ok(code);
    }
    let speeds = cfg.speed_list()?;
    let rows = sweep_rows(cfg, &speeds)?;
    let dir = output_dir(cfg)?;
    match cfg.format {
        Format::Csv => {
            let body = rows.iter().map(|r| {
                vec![
                    float(r.cs),
                    r.amplitude.map(float).unwrap_or_default(),
                    r.converged.to_string(),
                    r.iterations.to_string(),
                    status_name(&r.status),
                ]
            });
            write(&dir.join("sweep.csv"), &csv_table(&["cs", "amplitude", "converged", "iterations", "status"], body))?;
        }
        Format::Json => write_json(&dir.join("sweep.json"), &rows)?,
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.amplitude.map(|a| (r.cs, a))).collect();
    write(&dir.join("sweep.dat"), &dat_table(&["cs", "amplitude"], pts.iter().map(|&(c, a)| vec![c, a])))?;
    if cfg.svg && pts.len() > 1 {
        let (cs, amp): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        write(&dir.join("sweep.svg"), &line_plot("speed-amplitude", "cs", "amplitude", &cs, &amp))?;
    }
    for r in &rows {
        eprintln!("cs = {:<10} {}", r.cs, status_name(&r.status));
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    value: f64,
    bound: f64,
    pass: bool,
}

fn check(name: impl Into<String>, value: f64, bound: f64) -> Check {
    Check { name: name.into(), value, bound, pass: value <= bound }
}

/// Tolerances for the validation suite on a given grid.
struct Bounds {
    linf: [f64; 3],
    monitors: f64,
    /// Only meaningful on the default grid; the closed form is not periodic.
    closed_form_residual: Option<f64>,
    decay: f64,
}

fn benchmark_checks(wave: &ExactWave, grid: &Grid, linf: f64, bounds: &Bounds) -> Result<Vec<Check>> {
    let name = wave.name();
    let space = SpectralSpace::new(*grid)?;
    let (row, result) = run_benchmark(wave, grid, &SolveConfig::default(), linf)?;
    let mut checks = vec![
        check(format!("{name}: converged"), if row.converged { 0.0 } else { 1.0 }, 0.0),
        check(format!("{name}: linf vs closed form"), row.linf_vs_exact, linf),
        check(format!("{name}: final Res"), row.residual, bounds.monitors),
        check(format!("{name}: final |1-M|"), row.stab_err, bounds.monitors),
        check(format!("{name}: symmetry defect"), row.symmetry_defect, 1e-8),
    ];
    if let Some(bound) = bounds.closed_form_residual {
        let symbols = build_symbols(&wave.params, wave.cs, grid, default_resonance_tol(&wave.params, wave.cs));
        let exact = space.field_from_fn(|x| wave.eval(x));
        let res = residual_norm(&space, &exact, &symbols, &NonlinearitySpec::QUADRATIC);
        checks.push(check(format!("{name}: closed-form residual"), res, bound));
    }
    let coeffs = ab_coefficients(&wave.params, wave.cs)?;
    let rate_err = decay_fit(&space, &result.profile, &coeffs)
        .map(|f| (f.fitted_rate - wave.decay_rate()).abs() / wave.decay_rate())
        .unwrap_or(f64::INFINITY);
    checks.push(check(format!("{name}: decay rate vs 4w"), rate_err, bounds.decay));

    let cfg = EvolveConfig { dt: 1e-2, t_final: 1.0, record_every: 25, ..EvolveConfig::default() };
    let traj = evolve(&space, &result.profile, &wave.params, &NonlinearitySpec::QUADRATIC, &cfg)?;
    let (dv, dh) = traj.invariant_drift().unwrap_or((f64::INFINITY, f64::INFINITY));
    checks.push(check(format!("{name}: V drift over T=1"), dv, 1e-8));
    checks.push(check(format!("{name}: H drift over T=1"), dh, 1e-8));
    let se = shape_error(&space, &result.profile, traj.final_state(), wave.cs);
    checks.push(check(format!("{name}: shape error over T=1"), se.nominal, 1e-4));
    Ok(checks)
}

pub fn validate(quick: bool, as_json: bool, out: Option<&Path>) -> Result<u8> {
    let (grid, bounds) = if quick {
        (Grid::new(50.0, 256)?, Bounds { linf: [1e-7; 3], monitors: 1e-10, closed_form_residual: None, decay: 0.05 })
    } else {
        (Grid::default(), Bounds { linf: [1e-10, 1e-8, 1e-8], monitors: 1e-10, closed_form_residual: Some(1e-9), decay: 0.02 })
    };
    let mut checks = Vec::new();
    for (wave, linf) in ExactWave::benchmarks().iter().zip(bounds.linf) {
        checks.extend(benchmark_checks(wave, &grid, linf, &bounds)?);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let summary = json!({
        "grid": { "half_length": grid.half_length(), "nodes": grid.len() },
        "quick": quick,
        "checks": checks,
        "failed": failed,
        "pass": failed == 0,
    });
    if as_json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!("{:<36} {:>12} {:>12}  verdict", "check", "value", "bound");
        for c in &checks {
            println!("{:<36} {:>12.3e} {:>12.1e}  {}", c.name, c.value, c.bound, if c.pass { "PASS" } else { "FAIL" });
        }
        println!("{} of {} checks passed", checks.len() - failed, checks.len());
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("validate.json"), &summary)?;
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VALIDATION })
}

#[derive(Serialize)]
struct EvolveReport {
    steps: usize,
    dt: f64,
    t_final: f64,
    v_drift: Option<f64>,
    h_drift: Option<f64>,
    shape_error: Option<ShapeError>,
    final_sup_norm: f64,
}

pub fn evolve_cmd(cfg: &RunConfig) -> Result<u8> {
    if let Some(code) = gate_params(cfg) {
        return Ok(code);
    }
    let params: EquationParams = cfg.params();
    let grid = cfg.grid()?;
    let space = SpectralSpace::new(grid)?;
    let u0 = match &cfg.evolve.input {
        Some(path) => {
            let p = read_profile(path)?;
            if p.u.len() != grid.len() {
                bail!("{} has {} nodes, grid has {}", path.display(), p.u.len(), grid.len());
            }
            space.field(p.u)?
        }
        None => {
            let cs = cfg.speeds.cs.context("evolve needs --input or --cs")?;
            let r = solve_in(&space, &params, cs, &cfg.nonlinearity, &cfg.solve_config()?)?;
            if !r.converged {
                eprintln!("initial profile did not converge (Res = {:.3e})", r.final_residual());
                return Ok(EXIT_NOT_CONVERGED);
            }
            r.profile
        }
    };
    let ecfg = cfg.evolve_config();
    let traj = evolve(&space, &u0, &params, &cfg.nonlinearity, &ecfg)?;
    let dir = output_dir(cfg)?;

    let x = grid.nodes();
    let mut rows = Vec::new();
    for s in &traj.snapshots {
        let d = derivatives(&space, &s.field);
        for j in 0..grid.len() {
            rows.push(vec![float(s.time), float(x[j]), float(s.field.values()[j]), float(d.ux[j]), float(d.uxx[j])]);
        }
    }
    let inv_rows = traj.snapshots.iter().map(|s| {
        let (v, h) = s.invariants.map_or((String::new(), String::new()), |i| (float(i.v), float(i.h)));
        vec![float(s.time), v, h]
    });
    match cfg.format {
        Format::Csv => {
            write(&dir.join("trajectory.csv"), &csv_table(&["t", "X", "u", "u'", "u''"], rows))?;
            write(&dir.join("invariants.csv"), &csv_table(&["t", "V", "H"], inv_rows))?;
        }
        Format::Json => {
            let snaps: Vec<Value> = traj
                .snapshots
                .iter()
                .map(|s| json!({ "t": s.time, "u": s.field.values(), "invariants": s.invariants }))
                .collect();
            write_json(&dir.join("trajectory.json"), &json!({ "X": x, "snapshots": snaps }))?;
        }
    }
    if cfg.svg {
        write(&dir.join("final.svg"), &line_plot("u at final time", "X", "u", &x, traj.final_state().values()))?;
    }
    let drift = traj.invariant_drift();
    let report = EvolveReport {
        steps: traj.steps,
        dt: traj.dt,
        t_final: ecfg.t_final,
        v_drift: drift.map(|d| d.0),
        h_drift: drift.map(|d| d.1),
        shape_error: cfg.speeds.cs.map(|cs| shape_error(&space, &u0, traj.final_state(), cs * ecfg.t_final)),
        final_sup_norm: traj.final_state().linf_norm(),
    };
    write_json(&dir.join("report.json"), &report)?;
    if let Some(se) = report.shape_error {
        eprintln!("shape error {:.3e} (optimal {:.3e})", se.nominal, se.optimal);
    }
    Ok(EXIT_OK)
}
