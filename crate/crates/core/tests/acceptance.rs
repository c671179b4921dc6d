//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::cell::Cell;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use rosenau_core::classify::family_regime;
use rosenau_core::evolution::{evolve, evolution_symbols, linear_propagator, shape_error, EvolveConfig};
use rosenau_core::solver::{solve_in, SolveConfig};
use rosenau_core::validate::{
    decay_fit, exact_kawahara, exact_kdv, exact_rlw, run_benchmark, speed_amplitude_sweep,
    strictly_increasing, ExactWave,
};
use rosenau_core::{
    ab_coefficients, coercivity_thresholds, EquationParams, FamilyTag, Grid, NonlinearitySpec,
    SpectralSpace, WaveType,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn benchmark(wave: &ExactWave, linf_bound: f64, monitor_bound: Option<f64>) -> Outcome {
    let start = Instant::now();
    let (row, result) = run_benchmark(wave, &Grid::default(), &SolveConfig::default(), linf_bound)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let detail = format!(
        "converged={} iterations={} linf={:.3e} res={:.3e} |1-M|={:.3e} time={elapsed:.2}s",
        row.converged, row.iterations, row.linf_vs_exact, row.residual, row.stab_err
    );
    let monitors_ok = monitor_bound.map_or(true, |b| row.residual <= b && row.stab_err <= b);
    check(result.converged && row.linf_vs_exact <= linf_bound && monitors_ok && elapsed < 10.0, detail)
}

fn criterion_1() -> Outcome {
    let wave = exact_rlw(-1.0, 1.0, 5.0).map_err(|e| e.to_string())?;
    benchmark(&wave, 1e-10, None)
}

fn criterion_2() -> Outcome {
    benchmark(&exact_kdv(), 1e-8, Some(1e-10))
}

fn criterion_3() -> Outcome {
    benchmark(&exact_kawahara(), 1e-8, Some(1e-10))
}

struct RegimeCase {
    family: FamilyTag,
    // (alpha, beta, gamma, epsilon, eta)
    params: (f64, f64, f64, f64, f64),
    cs: f64,
    wave: WaveType,
}

fn regime_fixture() -> Vec<RegimeCase> {
    use FamilyTag::*;
    use WaveType::*;
    let c = |family, params, cs, wave| RegimeCase { family, params, cs, wave };
    vec![
        c(RosenauRlw, (-1.0, 1.0, 0.0, 1.0, 0.0), 1.1, Csw),
        c(RosenauKawahara, (0.0, 1.0, 2.0, 1.0, -0.5), 0.951, Csw),
        c(RosenauRlwKawahara, (-1.0, 1.0, -1.0, 1.0, 1.0), 1.102, Csw),
        c(RosenauKdv, (0.0, 1.0, 0.0, 1.0, 1.0), 0.9, Ptw),
        c(RosenauKawahara, (0.0, 2.0, 1.0, 1.0, 1.0), 0.9, Ptw),
        c(RosenauRlwKawahara, (-1.0, 1.0, -1.0, 1.0, 1.0), 0.9, Ptw),
        c(RosenauRlw, (1.0, 1.0, 0.0, 1.0, 0.0), 0.9, Gsw),
        c(RosenauKawahara, (0.0, 4.0, 2.0, 0.25, 1.0), 0.43, Gsw),
        c(RosenauKawahara, (0.0, 2.0, 1.0, 1.0, -1.0), 0.9, Gsw),
        c(RosenauKdv, (0.0, 1.0, 0.0, 1.0, -1.0), 1.05, Ptw),
        c(RosenauKawahara, (0.0, 4.0, 2.0, 0.25, 1.0), 0.208, Ptw),
        c(RosenauKawahara, (0.0, 8.0, 1.0, 0.125, 1.0), 0.115, Ptw),
        c(RosenauRlw, (1.0, 1.0, 0.0, 1.0, 0.0), 1.5, Nmcsw),
        c(RosenauKdv, (0.0, 1.0, 0.0, 1.0, -1.0), 1.3071, Nmcsw),
        c(RosenauKawahara, (0.0, 1.0, 2.0, 1.0, -1.0), 2.2590, Nmcsw),
        c(RosenauRlw, (-1.0, 1.0, 0.0, 1.0, 0.0), 1.3, Csw),
        c(RosenauRlw, (-1.0, 1.0, 0.0, 1.0, 0.0), 1.7, Nmcsw),
        c(RosenauKawahara, (0.0, 2.0, 1.0, 1.0, -1.0), 0.4538, Csw),
        c(RosenauKawahara, (0.0, 2.0, 1.0, 1.0, -1.0), 0.1438, Nmcsw),
    ]
}

fn criterion_4() -> Outcome {
    let fixture = regime_fixture();
    let mut misses = Vec::new();
    for case in &fixture {
        let (al, be, ga, ep, et) = case.params;
        let params = EquationParams::for_family(case.family, al, be, ga, ep, et).map_err(|e| e.to_string())?;
        match family_regime(case.family, &params, case.cs) {
            Ok(report) if report.predicted_waves.contains(&case.wave) => {}
            Ok(report) => misses.push(format!(
                "{:?} cs={}: expected {} got {:?} ({:?})",
                case.family,
                case.cs,
                case.wave.name(),
                report.predicted_waves,
                report.label
            )),
            Err(e) => misses.push(format!("{:?} cs={}: {e}", case.family, case.cs)),
        }
    }
    let agree = fixture.len() - misses.len();
    let detail = format!("{agree}/{} cases agree {}", fixture.len(), misses.join("; "));
    check(misses.is_empty() && fixture.len() >= 15, detail)
}

/// Kawahara-family thresholds, roots of `y² + (ρ/β)y − η²/(4β)`, in cancellation-free form.
fn kawahara_y(beta: f64, gamma: f64, epsilon: f64, eta: f64) -> (f64, f64) {
    let rb = (epsilon * beta - gamma) / beta;
    let r = (rb * rb + eta * eta / beta).sqrt();
    let product = -eta * eta / (4.0 * beta);
    if rb >= 0.0 {
        let lo = 0.5 * (-rb - r);
        (product / lo, lo)
    } else {
        let hi = 0.5 * (-rb + r);
        (hi, product / hi)
    }
}

fn criterion_5() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    let worst = Cell::new(0.0f64);
    let strategy = (0.05f64..10.0, -5.0f64..5.0, 0.05f64..5.0, -5.0f64..5.0);
    let result = runner.run(&strategy, |(beta, gamma, epsilon, eta)| {
        let t = coercivity_thresholds(&EquationParams::new(0.0, beta, gamma, epsilon, eta));
        let (yp, ym) = kawahara_y(beta, gamma, epsilon, eta);
        for (x, y) in [(t.x_plus, yp), (t.x_minus, ym)] {
            let rel = (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
            worst.set(worst.get().max(if x == y { 0.0 } else { rel }));
            if rel > 1e-12 && x != y {
                return Err(TestCaseError::fail(format!("x = {x}, y = {y}")));
            }
        }
        Ok(())
    });
    let mut exact = true;
    for &(beta, epsilon) in &[(1.0, 1.0), (2.5, 0.3), (0.7, 4.0), (1e3, 1e-3)] {
        let t = coercivity_thresholds(&EquationParams::new(0.0, beta, 0.0, epsilon, 0.0));
        exact &= t.x_plus == 0.0 && (t.x_minus + epsilon).abs() <= 4.0 * f64::EPSILON * epsilon;
    }
    let detail = format!("100 draws, worst relative {:.2e}; Rosenau x+=0, x-=-eps: {exact}", worst.get());
    match result {
        Ok(()) => check(exact, detail),
        Err(e) => Err(format!("{detail}; {e}")),
    }
}

/// Root of `λ⁴ − bλ² + a` with the smallest positive decay, by direct
/// complex square roots.
fn slowest_root(a: f64, b: f64) -> Complex64 {
    let disc = Complex64::new(b * b - 4.0 * a, 0.0).sqrt();
    let mut best = Complex64::new(f64::NAN, 0.0);
    for l2 in [(b + disc) / 2.0, (b - disc) / 2.0] {
        let l = l2.sqrt();
        for cand in [l, -l] {
            if cand.re < -1e-12 && !(best.re > cand.re) {
                best = cand;
            }
        }
    }
    best
}

fn criterion_6() -> Outcome {
    let space = SpectralSpace::new(Grid::default()).map_err(|e| e.to_string())?;
    let spec = NonlinearitySpec::QUADRATIC;
    let config = SolveConfig::default();

    let rlw = EquationParams::new(-1.0, 1.0, 0.0, 1.0, 0.0);
    let coeffs = ab_coefficients(&rlw, 1.1).map_err(|e| e.to_string())?;
    let res = solve_in(&space, &rlw, 1.1, &spec, &config).map_err(|e| e.to_string())?;
    let fit = decay_fit(&space, &res.profile, &coeffs).map_err(|e| e.to_string())?;
    let oracle = -slowest_root(coeffs.a, coeffs.b).re;
    let csw_err = (fit.fitted_rate - oracle).abs() / oracle;

    let rosenau = EquationParams::new(0.0, 1.0, 0.0, 1.0, 0.0);
    let coeffs = ab_coefficients(&rosenau, 1.5).map_err(|e| e.to_string())?;
    let res2 = solve_in(&space, &rosenau, 1.5, &spec, &config).map_err(|e| e.to_string())?;
    let fit2 = decay_fit(&space, &res2.profile, &coeffs).map_err(|e| e.to_string())?;
    let root = slowest_root(coeffs.a, coeffs.b);
    let rate_err = (fit2.fitted_rate - root.re.abs()).abs() / root.re.abs();
    let omega = fit2.oscillation_wavenumber.unwrap_or(f64::NAN);
    let omega_err = (omega - root.im.abs()).abs() / root.im.abs();

    let detail = format!(
        "CSW cs=1.1: fitted {:.5} vs {oracle:.5} ({:.2}%); NMCSW cs=1.5: rate {:.5} vs {:.5} ({:.2}%), wavenumber {omega:.5} vs {:.5} ({:.2}%)",
        fit.fitted_rate,
        100.0 * csw_err,
        fit2.fitted_rate,
        root.re.abs(),
        100.0 * rate_err,
        root.im.abs(),
        100.0 * omega_err
    );
    check(
        res.converged && res2.converged && csw_err < 0.05 && rate_err < 0.05 && omega_err < 0.05,
        detail,
    )
}

fn criterion_7() -> Outcome {
    let rosenau = EquationParams::new(0.0, 1.0, 0.0, 1.0, 0.0);
    let speeds = [1.2, 1.5, 2.0, 2.5, 3.0];
    let rows = speed_amplitude_sweep(
        &rosenau,
        &NonlinearitySpec::QUADRATIC,
        &speeds,
        &Grid::default(),
        &SolveConfig::default(),
        false,
    )
    .map_err(|e| e.to_string())?;
    let amps: Vec<String> = rows
        .iter()
        .map(|r| format!("{}:{}", r.cs, r.amplitude.map_or("-".into(), |a| format!("{a:.6}"))))
        .collect();
    let all = rows.iter().all(|r| r.converged);
    check(all && strictly_increasing(&rows), format!("amplitudes {}", amps.join(" ")))
}

fn criterion_8() -> Outcome {
    let space = SpectralSpace::new(Grid::default()).map_err(|e| e.to_string())?;
    let params = EquationParams::new(-1.0, 1.0, 0.0, 1.0, 0.0);
    let spec = NonlinearitySpec::QUADRATIC;
    let cs = 1.1;
    let res = solve_in(&space, &params, cs, &spec, &SolveConfig::default()).map_err(|e| e.to_string())?;
    let t_final = 10.0;
    let cfg = EvolveConfig { dt: 1e-3, t_final, record_every: 500, ..EvolveConfig::default() };
    let traj = evolve(&space, &res.profile, &params, &spec, &cfg).map_err(|e| e.to_string())?;
    let se = shape_error(&space, &res.profile, traj.final_state(), cs * t_final);
    let (dv, dh) = traj.invariant_drift().ok_or("invariants unavailable")?;

    let symbols = evolution_symbols(&params, &space.grid());
    let mut runner = TestRunner::new(Config { cases: 50, failure_persistence: None, ..Config::default() });
    let worst = Cell::new(0.0f64);
    let strategy = (proptest::collection::vec(-1.0f64..1.0, 1024), -100.0f64..100.0);
    let norm_ok = runner
        .run(&strategy, |(values, t)| {
            let u = space.field(values).unwrap();
            let v = linear_propagator(&space, &u, t, &symbols);
            let rel = (v.l2_norm() - u.l2_norm()).abs() / u.l2_norm();
            worst.set(worst.get().max(rel));
            prop_assert!(rel <= 1e-12);
            Ok(())
        })
        .is_ok();

    let detail = format!(
        "shape error {:.2e} (optimal {:.2e} at shift {:.6}), drift V {dv:.2e} H {dh:.2e}, propagator norm defect {:.2e}",
        se.nominal, se.optimal, se.optimal_shift, worst.get()
    );
    check(res.converged && se.nominal <= 1e-4 && dv <= 1e-8 && dh <= 1e-8 && norm_ok, detail)
}

fn criterion_9() -> Outcome {
    let grid = Grid::new(100.0, 256).map_err(|e| e.to_string())?;
    let space = SpectralSpace::new(grid).map_err(|e| e.to_string())?;
    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    let (round, deriv, parseval) = (Cell::new(0.0f64), Cell::new(0.0f64), Cell::new(0.0f64));

    let fields = proptest::collection::vec(-10.0f64..10.0, 256);
    let r1 = runner.run(&fields, |values| {
        let f = space.field(values.clone()).unwrap();
        let back = space.inverse(f.coeffs());
        let e = values.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let direct: f64 = values.iter().map(|v| v * v).sum::<f64>() * grid.spacing();
        let spectral: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * 2.0 * grid.half_length();
        let pe = (direct - spectral).abs() / direct;
        round.set(round.get().max(e));
        parseval.set(parseval.get().max(pe));
        prop_assert!(e <= 1e-12 && pe <= 1e-12);
        Ok(())
    });

    // trig polynomials: Σ a_m cos(k_m x) + b_m sin(k_m x), |m| ≤ 40
    let trig = proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 40);
    let r2 = runner.run(&trig, |modes| {
        let k = |m: usize| PI * (m + 1) as f64 / grid.half_length();
        let eval = |x: f64, d: u32| -> f64 {
            modes
                .iter()
                .enumerate()
                .map(|(m, &(a, b))| {
                    let km = k(m);
                    // d-th derivative of a cos + b sin
                    let phase = d as f64 * PI / 2.0;
                    km.powi(d as i32) * (a * (km * x + phase).cos() + b * (km * x + phase).sin())
                })
                .sum()
        };
        let f = space.field_from_fn(|x| eval(x, 0));
        for d in 1..=4u32 {
            let df = space.differentiate(&f, d).unwrap();
            for j in 0..grid.len() {
                let e = (df.values()[j] - eval(grid.node(j), d)).abs();
                deriv.set(deriv.get().max(e));
                prop_assert!(e <= 1e-10, "d = {}, e = {}", d, e);
            }
        }
        Ok(())
    });

    let detail = format!(
        "round-trip {:.2e}, derivatives {:.2e}, Parseval {:.2e} over 100 fields each",
        round.get(),
        deriv.get(),
        parseval.get()
    );
    check(r1.is_ok() && r2.is_ok(), detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 rlw exact benchmark", criterion_1),
        ("2 kdv exact benchmark", criterion_2),
        ("3 kawahara exact benchmark", criterion_3),
        ("4 classifier regime fixture", criterion_4),
        ("5 coercivity reduction", criterion_5),
        ("6 tail decay rates", criterion_6),
        ("7 speed-amplitude monotonicity", criterion_7),
        ("8 evolution of a solitary wave", criterion_8),
        ("9 spectral properties", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
