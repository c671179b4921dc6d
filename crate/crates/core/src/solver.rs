//! Petviashvili iteration for solitary-wave profiles.
//!
//! In Fourier space the profile equation reads `Q(k)φ̂ = ĝ(φ)` and the scheme
//! is
//!
//! ```text
//! φ̂ₙ₊₁ = |Mₙ|^ν · ĝ(φₙ) / Q,     Mₙ = Σ Q|φ̂ₙ|² / Σ ĝ(φₙ)·conj(φ̂ₙ)
//! ```
//!
//! `Mₙ = 1` exactly at a solution. Three monitors are recorded per iteration:
//! the step size `‖φₙ − φₙ₋₁‖₂`, `|1 − Mₙ|`, and the residual `‖Sφₙ + g(φₙ)‖₂`,
//! all with quadrature weight `2L/N`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::classify::{ab_coefficients, RegimeCoefficients};
use crate::error::{Error, Result};
use crate::params::{EquationParams, NonlinearitySpec};
use crate::spectral::{
    build_symbols, default_resonance_tol, l2_norm_coeffs, Grid, SpectralField, SpectralSpace,
    SymbolTable,
};

/// Initial iterate, centred at `X = 0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Guess {
    /// `SechSquared` when `a, b > 0`, otherwise `Gaussian(1, 1)`.
    Auto,
    /// `(9a/4b)·sech²(½√(a/b)·X)`, the small-amplitude homoclinic near C0.
    SechSquared,
    /// `A·sech⁴(wX)`.
    SechFourth { amplitude: f64, width: f64 },
    /// `A·exp(−(wX)²)`.
    Gaussian { amplitude: f64, width: f64 },
    /// Node values supplied by the caller.
    Samples { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveConfig {
    /// Stabilizing exponent; `None` selects `d/(d − 1)` from the lowest degree of `g`.
    pub nu: Option<f64>,
    /// Applied to all three monitors.
    pub tol: f64,
    pub max_iter: usize,
    pub guess: Guess,
    /// Proceed on a resonant grid, clamping `|Q| < resonance_tol` to `±resonance_tol`.
    pub allow_resonance: bool,
    /// Defaults to `1e−8·(1 + |cs| + ε)`.
    pub resonance_tol: Option<f64>,
    /// Evaluate `g` on a doubled grid.
    pub dealias: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            nu: None,
            tol: 1e-12,
            max_iter: 500,
            guess: Guess::Auto,
            allow_resonance: false,
            resonance_tol: None,
            dealias: false,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(nu) = self.nu {
            if !(nu > 1.0) || !nu.is_finite() {
                return Err(Error::InvalidArgument(format!("nu must exceed 1, got {nu}")));
            }
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidArgument(String::from("max_iter must be at least 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    pub n: usize,
    /// `‖φₙ − φₙ₋₁‖₂`; absent for the initial iterate.
    pub error: Option<f64>,
    /// `|1 − Mₙ|`.
    pub stab_err: f64,
    /// `‖Sφₙ + g(φₙ)‖₂`.
    pub residual: f64,
    pub m: f64,
}

impl IterationRecord {
    fn within(&self, tol: f64) -> bool {
        self.error.is_some_and(|e| e <= tol) && self.stab_err <= tol && self.residual <= tol
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Outcome of [`solve`]. A run that hits `max_iter` still returns its last
/// iterate with `converged == false`; see [`SolveResult::require_converged`].
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub cs: f64,
    pub profile: SpectralField,
    pub trace: IterationTrace,
    pub converged: bool,
    /// Signed value at `X = 0` after recentring.
    pub amplitude: f64,
    pub iterations: usize,
    pub nu: f64,
    /// Grid modes whose denominator was clamped (resonant runs only).
    pub clamped_modes: usize,
    pub resonant: bool,
    pub warnings: Vec<String>,
}

impl SolveResult {
    pub fn final_residual(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.residual)
    }

    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                last_residual: self.final_residual(),
            })
        }
    }
}

pub fn initial_guess(
    kind: &Guess,
    coeffs: &RegimeCoefficients,
    space: &SpectralSpace,
) -> Result<SpectralField> {
    match kind {
        Guess::Auto => {
            if coeffs.a > 0.0 && coeffs.b > 0.0 {
                initial_guess(&Guess::SechSquared, coeffs, space)
            } else {
                initial_guess(&Guess::Gaussian { amplitude: 1.0, width: 1.0 }, coeffs, space)
            }
        }
        Guess::SechSquared => {
            let (a, b) = (coeffs.a, coeffs.b);
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::GuessUnavailable(format!(
                    "sech^2 guess needs a > 0 and b > 0 (a = {a}, b = {b})"
                )));
            }
            let amp = 9.0 * a / (4.0 * b);
            let w = 0.5 * (a / b).sqrt();
            Ok(space.field_from_fn(|x| amp * sech(w * x).powi(2)))
        }
        Guess::SechFourth { amplitude, width } => {
            let (amp, w) = (*amplitude, *width);
            Ok(space.field_from_fn(|x| amp * sech(w * x).powi(4)))
        }
        Guess::Gaussian { amplitude, width } => {
            let (amp, w) = (*amplitude, *width);
            Ok(space.field_from_fn(|x| amp * (-(w * x) * (w * x)).exp()))
        }
        Guess::Samples { values } => space.field(values.clone()),
    }
}

pub(crate) fn sech(x: f64) -> f64 {
    // 2/(e^x + e^{-x}) without overflow for large |x|
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// The operator pieces one iteration needs, bound to a grid and speed.
pub struct Iteration<'a> {
    pub space: &'a SpectralSpace,
    pub symbols: &'a SymbolTable,
    pub spec: &'a NonlinearitySpec,
    /// Denominator used in the update; equals `symbols.q` unless clamped.
    denominator: Vec<f64>,
    pub dealias: bool,
}

impl<'a> Iteration<'a> {
    pub fn new(space: &'a SpectralSpace, symbols: &'a SymbolTable, spec: &'a NonlinearitySpec) -> Self {
        Self { space, symbols, spec, denominator: symbols.q.clone(), dealias: false }
    }

    /// Replaces near-zero denominators by `±tol`; returns the number clamped.
    pub fn clamp(&mut self, tol: f64) -> usize {
        let (q, count) = self.symbols.clamped_q(tol);
        self.denominator = q;
        count
    }

    pub fn nonlinear(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.space.nonlinear_coeffs(self.spec, coeffs, self.dealias)
    }

    /// `Mₙ` from `φ̂` and `ĝ(φ)`.
    pub fn factor(&self, phi: &[Complex64], g: &[Complex64]) -> Result<f64> {
        let mut num = 0.0;
        let mut den = Complex64::new(0.0, 0.0);
        let mut den_abs = 0.0;
        for ((p, gk), q) in phi.iter().zip(g).zip(&self.symbols.q) {
            num += q * p.norm_sqr();
            let term = gk * p.conj();
            den += term;
            den_abs += term.norm();
        }
        if den.re == 0.0 || !den.re.is_finite() || den_abs == 0.0 {
            return Err(Error::ZeroDenominator);
        }
        let relative = den.im.abs() / den_abs;
        if relative > 1e-10 {
            return Err(Error::ComplexResidue { relative });
        }
        Ok(num / den.re)
    }

    /// `|M|^ν ĝ / Q`.
    pub fn update(&self, g: &[Complex64], m: f64, nu: f64) -> Vec<Complex64> {
        let scale = m.abs().powf(nu);
        g.iter().zip(&self.denominator).map(|(gk, q)| gk * (scale / q)).collect()
    }

    /// `‖Sφ̂ + ĝ‖₂ = ‖ĝ − Qφ̂‖₂` by Parseval.
    pub fn residual(&self, phi: &[Complex64], g: &[Complex64]) -> f64 {
        let grid = self.space.grid();
        let sum: f64 = phi
            .iter()
            .zip(g)
            .zip(&self.symbols.q)
            .map(|((p, gk), q)| (gk - p * q).norm_sqr())
            .sum();
        (2.0 * grid.half_length() * sum).sqrt()
    }
}

/// `Mₙ` for a field; errors on a vanishing or complex pairing.
pub fn stabilizing_factor(
    space: &SpectralSpace,
    phi: &SpectralField,
    symbols: &SymbolTable,
    spec: &NonlinearitySpec,
) -> Result<f64> {
    let it = Iteration::new(space, symbols, spec);
    let g = it.nonlinear(phi.coeffs());
    it.factor(phi.coeffs(), &g)
}

/// One Petviashvili update. Imaginary parts of the new node values are
/// discarded after checking they are below `1e−10·‖φ‖∞`.
pub fn petviashvili_step(
    space: &SpectralSpace,
    phi: &SpectralField,
    symbols: &SymbolTable,
    spec: &NonlinearitySpec,
    nu: f64,
) -> Result<SpectralField> {
    symbols.check_resonance()?;
    let it = Iteration::new(space, symbols, spec);
    let g = it.nonlinear(phi.coeffs());
    let m = it.factor(phi.coeffs(), &g)?;
    let next = it.update(&g, m, nu);
    let complex = space.inverse_complex(&next);
    let (max_re, max_im) =
        complex.iter().fold((0.0f64, 0.0f64), |(r, i), z| (r.max(z.re.abs()), i.max(z.im.abs())));
    if max_im > 1e-10 * max_re.max(f64::MIN_POSITIVE) {
        return Err(Error::ComplexResidue { relative: max_im / max_re });
    }
    space.field(complex.into_iter().map(|z| z.re).collect())
}

/// `‖Sφ + g(φ)‖₂` with `S` applied spectrally and `g` pointwise.
pub fn residual_norm(
    space: &SpectralSpace,
    phi: &SpectralField,
    symbols: &SymbolTable,
    spec: &NonlinearitySpec,
) -> f64 {
    let it = Iteration::new(space, symbols, spec);
    let g = it.nonlinear(phi.coeffs());
    it.residual(phi.coeffs(), &g)
}

/// Shift that moves the extremum of largest magnitude to `X = 0`.
pub fn recenter(space: &SpectralSpace, field: &SpectralField) -> SpectralField {
    let grid = space.grid();
    let (argmax, _) = field
        .values()
        .iter()
        .enumerate()
        .fold((grid.center_index(), f64::NEG_INFINITY), |(bi, bv), (i, v)| {
            if v.abs() > bv {
                (i, v.abs())
            } else {
                (bi, bv)
            }
        });
    if argmax == grid.center_index() {
        return field.clone();
    }
    space.shift(field, -grid.node(argmax))
}

/// Exponent used when none is configured.
pub fn resolve_exponent(spec: &NonlinearitySpec, configured: Option<f64>) -> Result<f64> {
    match configured {
        Some(nu) => Ok(nu),
        None => spec.default_exponent().ok_or(Error::ExponentRequired),
    }
}

pub fn solve(
    params: &EquationParams,
    cs: f64,
    spec: &NonlinearitySpec,
    grid: &Grid,
    config: &SolveConfig,
) -> Result<SolveResult> {
    let space = SpectralSpace::new(*grid)?;
    solve_in(&space, params, cs, spec, config)
}

/// [`solve`] on an existing workspace.
pub fn solve_in(
    space: &SpectralSpace,
    params: &EquationParams,
    cs: f64,
    spec: &NonlinearitySpec,
    config: &SolveConfig,
) -> Result<SolveResult> {
    params.ensure_valid()?;
    spec.validate()?;
    config.validate()?;
    let coeffs = ab_coefficients(params, cs)?;
    let nu = resolve_exponent(spec, config.nu)?;
    let mut warnings = Vec::new();
    if spec.homogeneity_degree().is_none() {
        warnings.push(String::from(
            "nonlinearity is not homogeneous; convergence of the iteration is not guaranteed",
        ));
    }

    let resonance_tol = config.resonance_tol.unwrap_or_else(|| default_resonance_tol(params, cs));
    let symbols = build_symbols(params, cs, &space.grid(), resonance_tol);
    let mut it = Iteration::new(space, &symbols, spec);
    it.dealias = config.dealias;
    let mut clamped_modes = 0;
    if let Some(r) = symbols.resonance {
        if !config.allow_resonance {
            return Err(Error::ResonantWavenumber { k: r.k, symbol: r.symbol });
        }
        clamped_modes = it.clamp(resonance_tol);
        warnings.push(format!(
            "resonant symbol near k = {:.6} ({} modes clamped); result is flagged",
            r.k, clamped_modes
        ));
    }

    let guess = initial_guess(&config.guess, &coeffs, space)?;
    let mut phi: Vec<Complex64> = guess.coeffs().to_vec();
    let mut g = it.nonlinear(&phi);
    let mut m = it.factor(&phi, &g)?;
    let mut trace = IterationTrace::default();
    trace.records.push(IterationRecord {
        n: 0,
        error: None,
        stab_err: (1.0 - m).abs(),
        residual: it.residual(&phi, &g),
        m,
    });

    let grid = space.grid();
    let mut converged = false;
    let mut iterations = 0;
    for n in 1..=config.max_iter {
        let next = it.update(&g, m, nu);
        let diff: Vec<Complex64> = next.iter().zip(&phi).map(|(a, b)| a - b).collect();
        let error = l2_norm_coeffs(&grid, &diff);
        phi = next;
        g = it.nonlinear(&phi);
        m = it.factor(&phi, &g)?;
        let record = IterationRecord {
            n,
            error: Some(error),
            stab_err: (1.0 - m).abs(),
            residual: it.residual(&phi, &g),
            m,
        };
        trace.records.push(record);
        iterations = n;
        if !record.residual.is_finite() || !error.is_finite() {
            warnings.push(format!("iteration diverged at n = {n}"));
            break;
        }
        if record.within(config.tol) {
            converged = true;
            break;
        }
    }

    let profile = recenter(space, &space.field_from_coeffs(&phi));
    let amplitude = profile.center_value();
    Ok(SolveResult {
        cs,
        profile,
        trace,
        converged,
        amplitude,
        iterations,
        nu,
        clamped_modes,
        resonant: symbols.resonance.is_some(),
        warnings,
    })
}
