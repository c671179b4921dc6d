//! Time propagation of the initial value problem.
//!
//! In Fourier space `û_t = −ik·l(k)·û − ik·ĝ/P(k)`. The linear part is
//! integrated exactly; the nonlinear part by RK4 in the rotated variable
//! (integrating-factor RK4).

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::{EquationParams, NonlinearitySpec};
use crate::spectral::{build_symbols, Grid, SpectralField, SpectralSpace, SymbolTable};
use crate::validate::{conserved_quantities, Invariants};
use crate::Complex64;

/// `‖u‖∞` above which a run is declared blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e6;
/// Bound on `dt·max|k/P|·max|g′(u₀)|`.
pub const STABILITY_LIMIT: f64 = 2.8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Steps between recorded snapshots; 0 records only the endpoints.
    pub record_every: usize,
    pub dealias: bool,
    /// Drop `g` entirely and propagate the linear part only.
    pub linear_only: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_final: 1.0, record_every: 0, dealias: false, linear_only: false }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "final time must be positive, got {}",
                self.t_final
            )));
        }
        Ok(())
    }

    /// Step count and the step that lands exactly on `t_final`.
    pub fn steps(&self) -> (usize, f64) {
        let n = libm::ceil(self.t_final / self.dt - 1e-9).max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

/// Symbols for propagation; `Q` is not used, so `cs = 0` and no resonance tolerance.
pub fn evolution_symbols(params: &EquationParams, grid: &Grid) -> SymbolTable {
    build_symbols(params, 0.0, grid, 0.0)
}

/// Odd operators vanish on a lone Nyquist mode.
fn odd_wavenumbers(space: &SpectralSpace) -> Vec<f64> {
    let nyq = space.grid().nyquist_index();
    let mut k = space.wavenumbers().to_vec();
    k[nyq] = 0.0;
    k
}

fn phase_factors(space: &SpectralSpace, symbols: &SymbolTable, t: f64) -> Vec<Complex64> {
    odd_wavenumbers(space)
        .iter()
        .zip(&symbols.l)
        .map(|(&k, &l)| Complex64::from_polar(1.0, -k * l * t))
        .collect()
}

/// Exact linear evolution `û(k, t) = e^{−ik·l(k)·t}·û₀(k)`.
pub fn linear_propagator(
    space: &SpectralSpace,
    u0: &SpectralField,
    t: f64,
    symbols: &SymbolTable,
) -> SpectralField {
    let e = phase_factors(space, symbols, t);
    let coeffs: Vec<Complex64> = u0.coeffs().iter().zip(&e).map(|(c, f)| c * f).collect();
    space.field_from_coeffs(&coeffs)
}

fn rhs_coeffs(
    space: &SpectralSpace,
    coeffs: &[Complex64],
    symbols: &SymbolTable,
    spec: &NonlinearitySpec,
    dealias: bool,
) -> Vec<Complex64> {
    let g = space.nonlinear_coeffs(spec, coeffs, dealias);
    g.iter()
        .zip(odd_wavenumbers(space))
        .zip(&symbols.p)
        .map(|((gh, k), p)| gh * Complex64::new(0.0, -k / p))
        .collect()
}

/// `−M⁻¹∂ₓg(u)`, computed as `−ik·ĝ/P` in Fourier space.
pub fn nonlinear_rhs(
    space: &SpectralSpace,
    u: &SpectralField,
    symbols: &SymbolTable,
    spec: &NonlinearitySpec,
) -> SpectralField {
    space.field_from_coeffs(&rhs_coeffs(space, u.coeffs(), symbols, spec, false))
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub field: SpectralField,
    /// Absent when `g` has no primitive.
    pub invariants: Option<Invariants>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub dt: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &SpectralField {
        &self.snapshots[self.snapshots.len() - 1].field
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    /// `max_n |Q(t_n) − Q(0)| / |Q(0)|` for `V` and `H`.
    pub fn invariant_drift(&self) -> Option<(f64, f64)> {
        let first = self.snapshots[0].invariants?;
        let mut dv = 0.0f64;
        let mut dh = 0.0f64;
        for s in &self.snapshots {
            let inv = s.invariants?;
            dv = dv.max(relative(inv.v, first.v));
            dh = dh.max(relative(inv.h, first.h));
        }
        Some((dv, dh))
    }
}

fn relative(x: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        x.abs()
    } else {
        (x - reference).abs() / reference.abs()
    }
}

/// `dt·max|k/P|·max|g′(u)|` for the configured step.
pub fn stability_number(
    space: &SpectralSpace,
    u: &SpectralField,
    symbols: &SymbolTable,
    spec: &NonlinearitySpec,
    dt: f64,
) -> f64 {
    let kp = odd_wavenumbers(space)
        .iter()
        .zip(&symbols.p)
        .fold(0.0f64, |m, (k, p)| m.max((k / p).abs()));
    let uxx = space.inverse(&space.derivative_coeffs(u.coeffs(), 2));
    let gp = u
        .values()
        .iter()
        .zip(&uxx)
        .fold(0.0f64, |m, (&v, &w)| m.max(spec.eval_du(v, w).abs()));
    dt * kp * gp
}

/// Integrating-factor RK4 from `u0` to `config.t_final`.
pub fn evolve(
    space: &SpectralSpace,
    u0: &SpectralField,
    params: &EquationParams,
    spec: &NonlinearitySpec,
    config: &EvolveConfig,
) -> Result<Trajectory> {
    params.ensure_valid()?;
    config.validate()?;
    if !config.linear_only {
        spec.validate()?;
    }
    let symbols = evolution_symbols(params, &space.grid());
    let (steps, dt) = config.steps();
    if !config.linear_only {
        let number = stability_number(space, u0, &symbols, spec, dt);
        if number >= STABILITY_LIMIT {
            return Err(Error::StepTooLarge { dt, limit: dt * STABILITY_LIMIT / number });
        }
    }
    let invariants = |f: &SpectralField| conserved_quantities(space, f, params, spec).ok();

    let half = phase_factors(space, &symbols, 0.5 * dt);
    let full: Vec<Complex64> = half.iter().map(|h| h * h).collect();
    let rhs = |c: &[Complex64]| -> Vec<Complex64> {
        if config.linear_only {
            vec![Complex64::new(0.0, 0.0); c.len()]
        } else {
            rhs_coeffs(space, c, &symbols, spec, config.dealias)
        }
    };
    let combine = |base: &[Complex64], fac: &[Complex64], inc: &[Complex64], s: f64, inc_fac: Option<&[Complex64]>| {
        base.iter()
            .zip(fac)
            .zip(inc)
            .enumerate()
            .map(|(m, ((b, f), i))| {
                let i = match inc_fac {
                    Some(e) => i * e[m],
                    None => *i,
                };
                f * (b + i * s)
            })
            .collect::<Vec<Complex64>>()
    };

    let mut snapshots = vec![Snapshot { time: 0.0, field: u0.clone(), invariants: invariants(u0) }];
    let mut c = u0.coeffs().to_vec();
    for n in 1..=steps {
        let k1 = rhs(&c);
        let k2 = rhs(&combine(&c, &half, &k1, 0.5 * dt, None));
        // E·u + dt/2·k2 = E·(u + dt/2·E⁻¹k2); build it directly
        let a3: Vec<Complex64> = c.iter().zip(&half).zip(&k2).map(|((u, e), k)| e * u + k * (0.5 * dt)).collect();
        let k3 = rhs(&a3);
        let a4: Vec<Complex64> =
            c.iter().zip(&full).zip(half.iter().zip(&k3)).map(|((u, e2), (e, k))| e2 * u + e * k * dt).collect();
        let k4 = rhs(&a4);
        c = (0..c.len())
            .map(|m| {
                full[m] * c[m]
                    + (full[m] * k1[m] + half[m] * (k2[m] + k3[m]) * 2.0 + k4[m]) * (dt / 6.0)
            })
            .collect();

        let values = space.inverse(&c);
        let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let t = n as f64 * dt;
        if !sup.is_finite() || sup > BLOWUP_THRESHOLD {
            return Err(Error::BlowUp { time: t, sup_norm: sup });
        }
        let record = n == steps || (config.record_every > 0 && n % config.record_every == 0);
        if record {
            let field = space.field(values)?;
            let inv = invariants(&field);
            snapshots.push(Snapshot { time: t, field, invariants: inv });
        }
    }
    Ok(Trajectory { snapshots, dt, steps })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShapeError {
    /// `‖u_T − u₀(· − s)‖∞ / ‖u₀‖∞` at the nominal shift `s = cs·T`.
    pub nominal: f64,
    /// Same at the best periodic translation.
    pub optimal: f64,
    pub optimal_shift: f64,
    pub nominal_shift: f64,
}

fn relative_linf(a: &[f64], b: &[f64], scale: f64) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn l2_mismatch(space: &SpectralSpace, target: &[Complex64], reference: &[Complex64], s: f64) -> f64 {
    space
        .shift_coeffs(reference, s)
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum()
}

/// Compares `u_t` with `u₀` translated by `nominal_shift` and by the shift
/// maximizing the periodic cross-correlation (refined by golden section).
pub fn shape_error(space: &SpectralSpace, u0: &SpectralField, ut: &SpectralField, nominal_shift: f64) -> ShapeError {
    let grid = space.grid();
    let scale = u0.linf_norm().max(f64::MIN_POSITIVE);
    let nominal = relative_linf(ut.values(), space.shift(u0, nominal_shift).values(), scale);

    // cross-correlation r(s) = Σ_m ût·conj(û₀)·e^{ik s}, peak at the best shift
    let prod: Vec<Complex64> = ut.coeffs().iter().zip(u0.coeffs()).map(|(a, b)| a * b.conj()).collect();
    let corr = space.inverse(&prod);
    let (mut best, mut best_val) = (0usize, f64::NEG_INFINITY);
    for (j, &v) in corr.iter().enumerate() {
        if v > best_val {
            best_val = v;
            best = j;
        }
    }
    // node j ↔ lag x_j + L
    let h = grid.spacing();
    let coarse = grid.node(best) + grid.half_length();
    let (mut lo, mut hi) = (coarse - h, coarse + h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let f = |s: f64| l2_mismatch(space, ut.coeffs(), u0.coeffs(), s);
    let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo < 1e-13 * (1.0 + coarse.abs()) {
            break;
        }
    }
    let s = 0.5 * (lo + hi);
    let optimal = relative_linf(ut.values(), space.shift(u0, s).values(), scale);
    let period = 2.0 * grid.half_length();
    let wrap = |x: f64| x - period * libm::floor((x + grid.half_length()) / period);
    ShapeError { nominal, optimal, optimal_shift: wrap(s), nominal_shift }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_in, SolveConfig};
    use crate::validate::exact_kdv;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn space(n: usize) -> SpectralSpace {
        SpectralSpace::new(Grid::new(100.0, n).unwrap()).unwrap()
    }

    fn rlw() -> EquationParams {
        EquationParams::new(-1.0, 1.0, 0.0, 1.0, 0.0)
    }

    #[test]
    fn propagator_identity_at_zero() {
        let sp = space(256);
        let sym = evolution_symbols(&rlw(), &sp.grid());
        let u = sp.field_from_fn(|x| (-(x * x) / 50.0).exp());
        let v = linear_propagator(&sp, &u, 0.0, &sym);
        for (a, b) in u.values().iter().zip(v.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn monochromatic_wave_travels_at_phase_speed() {
        let sp = space(256);
        let p = EquationParams::new(-1.0, 1.0, -0.5, 1.0, 0.7);
        let sym = evolution_symbols(&p, &sp.grid());
        let m = 5;
        let k = PI * m as f64 / 100.0;
        let l = (p.epsilon - p.eta * k * k + p.gamma * k.powi(4)) / p.mass_polynomial(k * k);
        let u = sp.field_from_fn(|x| (k * x).cos());
        let t = 3.7;
        let v = linear_propagator(&sp, &u, t, &sym);
        for j in 0..256 {
            let x = sp.grid().node(j);
            assert_abs_diff_eq!(v.values()[j], (k * (x - l * t)).cos(), epsilon = 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn propagator_preserves_norm(seed in proptest::collection::vec(-1.0f64..1.0, 64), t in -50.0f64..50.0) {
            let sp = space(64);
            let sym = evolution_symbols(&rlw(), &sp.grid());
            let u = sp.field(seed).unwrap();
            let v = linear_propagator(&sp, &u, t, &sym);
            prop_assert!((v.l2_norm() - u.l2_norm()).abs() <= 1e-12 * u.l2_norm().max(1.0));
        }
    }

    #[test]
    fn nonlinear_rhs_trivial_cases() {
        let sp = space(128);
        let sym = evolution_symbols(&rlw(), &sp.grid());
        for c in [0.0, 2.5] {
            let u = sp.field(vec![c; 128]).unwrap();
            let r = nonlinear_rhs(&sp, &u, &sym, &NonlinearitySpec::QUADRATIC);
            assert!(r.linf_norm() <= 1e-14, "c = {c}");
        }
    }

    #[test]
    fn nonlinear_rhs_matches_finite_differences() {
        let n = 4096;
        let sp = space(n);
        let p = rlw();
        let sym = evolution_symbols(&p, &sp.grid());
        let u = sp.field_from_fn(|x| (PI * x / 100.0).sin());
        let r = nonlinear_rhs(&sp, &u, &sym, &NonlinearitySpec::QUADRATIC);
        // oracle: M_h r = −D_h(u²/2) with second-order periodic stencils
        let h = sp.grid().spacing();
        let at = |v: &[f64], j: isize| v[j.rem_euclid(n as isize) as usize];
        let rv = r.values();
        let g: Vec<f64> = u.values().iter().map(|v| 0.5 * v * v).collect();
        for j in (0..n as isize).step_by(37) {
            let d2 = (at(rv, j + 1) - 2.0 * at(rv, j) + at(rv, j - 1)) / (h * h);
            let d4 = (at(rv, j + 2) - 4.0 * at(rv, j + 1) + 6.0 * at(rv, j) - 4.0 * at(rv, j - 1) + at(rv, j - 2))
                / h.powi(4);
            let lhs = at(rv, j) + p.alpha * d2 + p.beta * d4;
            let rhs = -(at(&g, j + 1) - at(&g, j - 1)) / (2.0 * h);
            assert!((lhs - rhs).abs() <= 1e-6, "j = {j}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn linear_run_matches_propagator() {
        let sp = space(128);
        let p = rlw();
        let sym = evolution_symbols(&p, &sp.grid());
        // deterministic pseudo-random small state
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let values: Vec<f64> = (0..128)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                1e-3 * ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
            })
            .collect();
        let u = sp.field(values).unwrap();
        let cfg = EvolveConfig { dt: 0.01, t_final: 2.0, linear_only: true, ..Default::default() };
        let traj = evolve(&sp, &u, &p, &NonlinearitySpec::QUADRATIC, &cfg).unwrap();
        let exact = linear_propagator(&sp, &u, 2.0, &sym);
        for (a, b) in traj.final_state().values().iter().zip(exact.values()) {
            assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn fourth_order_in_time() {
        let sp = space(256);
        let p = rlw();
        let u = sp.field_from_fn(|x| 3.0 * crate::solver::sech(x / 3.0).powi(2));
        let run = |dt: f64| {
            let cfg = EvolveConfig { dt, t_final: 1.0, ..Default::default() };
            evolve(&sp, &u, &p, &NonlinearitySpec::QUADRATIC, &cfg).unwrap().final_state().clone()
        };
        let reference = run(0.0025);
        let err = |f: &SpectralField| {
            f.values().iter().zip(reference.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        let (e1, e2) = (err(&run(0.2)), err(&run(0.1)));
        let ratio = e1 / e2;
        assert!((12.0..=20.0).contains(&ratio), "errors {e1:e}, {e2:e}, ratio {ratio}");
    }

    #[test]
    fn blow_up_and_step_checks() {
        let sp = space(128);
        let p = rlw();
        let u = sp.field_from_fn(|x| 50.0 * (-(x * x) / 4.0).exp());
        let cfg = EvolveConfig { dt: 0.5, t_final: 1.0, ..Default::default() };
        assert!(matches!(
            evolve(&sp, &u, &p, &NonlinearitySpec::QUADRATIC, &cfg),
            Err(Error::StepTooLarge { .. })
        ));
        let bad = EvolveConfig { dt: -1.0, ..Default::default() };
        assert!(evolve(&sp, &u, &p, &NonlinearitySpec::QUADRATIC, &bad).is_err());
    }

    #[test]
    fn kdv_wave_translates() {
        let sp = space(1024);
        let w = exact_kdv();
        let res = solve_in(&sp, &w.params, w.cs, &NonlinearitySpec::QUADRATIC, &SolveConfig::default()).unwrap();
        assert!(res.converged);
        let cfg = EvolveConfig { dt: 1e-2, t_final: 2.0, record_every: 50, ..Default::default() };
        let traj = evolve(&sp, &res.profile, &w.params, &NonlinearitySpec::QUADRATIC, &cfg).unwrap();
        let se = shape_error(&sp, &res.profile, traj.final_state(), w.cs * 2.0);
        assert!(se.nominal <= 1e-6, "{se:?}");
        assert!(se.optimal <= se.nominal + 1e-12);
        assert_abs_diff_eq!(se.optimal_shift, w.cs * 2.0, epsilon = 1e-4);
        let (dv, dh) = traj.invariant_drift().unwrap();
        assert!(dv <= 1e-8 && dh <= 1e-8, "{dv:e} {dh:e}");
        assert_eq!(traj.snapshots.len(), 5);
    }
}
