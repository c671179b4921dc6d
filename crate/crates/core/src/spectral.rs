//! Periodic Fourier collocation on `[−L, L)`.
//!
//! Normalization: the forward transform carries `1/N`, so `c_m` are the
//! Fourier-series coefficients of the trigonometric interpolant,
//! `u(x_j) = Σ_m c_m e^{i k_m (x_j + L)}`. Consequently
//! `∫|u|² ≈ (2L/N)·Σ_j |u_j|² = 2L·Σ_m |c_m|²`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::params::{EquationParams, NonlinearitySpec};

pub const DEFAULT_HALF_LENGTH: f64 = 100.0;
pub const DEFAULT_NODES: usize = 1024;

/// Uniform periodic grid with nodes `x_j = −L + 2L·j/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    half_length: f64,
    n: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { half_length: DEFAULT_HALF_LENGTH, n: DEFAULT_NODES }
    }
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::InvalidGrid(alloc::format!(
                "half-length must be positive and finite, got {half_length}"
            )));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(alloc::format!(
                "N must be a power of two >= 4, got {n}"
            )));
        }
        Ok(Self { half_length, n })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + self.spacing() * j as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Index of `X = 0`.
    pub fn center_index(&self) -> usize {
        self.n / 2
    }

    /// Index of the node `−x_j`.
    pub fn reflect_index(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Signed mode number stored at slot `m`: `0..=N/2` then `−N/2+1..−1`.
    pub fn mode(&self, m: usize) -> i64 {
        if m <= self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    pub fn wavenumber(&self, m: usize) -> f64 {
        PI * self.mode(m) as f64 / self.half_length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.wavenumber(m)).collect()
    }

    /// Largest resolved wavenumber `πN/(2L)`.
    pub fn max_wavenumber(&self) -> f64 {
        PI * (self.n / 2) as f64 / self.half_length
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }
}

/// Node values with their Fourier coefficients; immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    values: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at `X = 0`.
    pub fn center_value(&self) -> f64 {
        self.values[self.grid.center_index()]
    }

    /// Discrete `L²` norm with quadrature weight `2L/N`.
    pub fn l2_norm(&self) -> f64 {
        l2_norm(&self.grid, &self.values)
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn l2_norm(grid: &Grid, values: &[f64]) -> f64 {
    (grid.spacing() * values.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// `‖f‖₂` from coefficients via Parseval.
pub fn l2_norm_coeffs(grid: &Grid, coeffs: &[Complex64]) -> f64 {
    (2.0 * grid.half_length() * coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
}

/// Transform workspace for one grid: FFT plans and wavenumbers.
///
/// Not shared between concurrent solves; each owns one.
#[derive(Debug, Clone)]
pub struct SpectralSpace {
    grid: Grid,
    fft: Fft,
    padded: Fft,
    k: Vec<f64>,
}

impl SpectralSpace {
    pub fn new(grid: Grid) -> Result<Self> {
        Ok(Self {
            grid,
            fft: Fft::new(grid.len())?,
            padded: Fft::new(2 * grid.len())?,
            k: grid.wavenumbers(),
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn transform(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut buf);
        buf
    }

    pub fn inverse_complex(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.fft.inverse(&mut buf);
        buf
    }

    /// Inverse transform keeping real parts.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.inverse_complex(coeffs).into_iter().map(|z| z.re).collect()
    }

    pub fn field(&self, values: Vec<f64>) -> Result<SpectralField> {
        if values.len() != self.grid.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                self.grid.len()
            )));
        }
        let coeffs = self.transform(&values);
        Ok(SpectralField { grid: self.grid, values, coeffs })
    }

    /// Field from coefficients; imaginary parts of the node values are
    /// discarded and the stored coefficients recomputed from the real values.
    pub fn field_from_coeffs(&self, coeffs: &[Complex64]) -> SpectralField {
        let values = self.inverse(coeffs);
        let coeffs = self.transform(&values);
        SpectralField { grid: self.grid, values, coeffs }
    }

    pub fn field_from_fn(&self, f: impl Fn(f64) -> f64) -> SpectralField {
        let values: Vec<f64> = (0..self.grid.len()).map(|j| f(self.grid.node(j))).collect();
        let coeffs = self.transform(&values);
        SpectralField { grid: self.grid, values, coeffs }
    }

    /// Coefficients of the `d`-th derivative: multiplication by `(ik)^d`,
    /// with the Nyquist mode zeroed for odd `d`.
    pub fn derivative_coeffs(&self, coeffs: &[Complex64], d: u32) -> Vec<Complex64> {
        let nyq = self.grid.nyquist_index();
        coeffs
            .iter()
            .zip(&self.k)
            .enumerate()
            .map(|(m, (c, &k))| {
                if d % 2 == 1 && m == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * Complex64::new(0.0, k).powu(d)
                }
            })
            .collect()
    }

    pub fn differentiate(&self, field: &SpectralField, d: u32) -> Result<SpectralField> {
        if !(1..=4).contains(&d) {
            return Err(Error::InvalidArgument(alloc::format!(
                "derivative order must be 1..=4, got {d}"
            )));
        }
        let coeffs = self.derivative_coeffs(field.coeffs(), d);
        let values = self.inverse(&coeffs);
        Ok(SpectralField { grid: self.grid, values, coeffs })
    }

    /// Translation `u(x) → u(x − s)` by a Fourier phase factor.
    pub fn shift_coeffs(&self, coeffs: &[Complex64], s: f64) -> Vec<Complex64> {
        let nyq = self.grid.nyquist_index();
        coeffs
            .iter()
            .zip(&self.k)
            .enumerate()
            .map(|(m, (c, &k))| {
                if m == nyq {
                    // a lone Nyquist mode can only carry the real (cosine) part
                    c * (k * s).cos()
                } else {
                    c * Complex64::from_polar(1.0, -k * s)
                }
            })
            .collect()
    }

    pub fn shift(&self, field: &SpectralField, s: f64) -> SpectralField {
        let coeffs = self.shift_coeffs(field.coeffs(), s);
        self.field_from_coeffs(&coeffs)
    }

    /// Coefficients of `g(u, u_x, u_xx)` evaluated pointwise.
    ///
    /// With `dealias`, the product is formed on a grid of `2N` nodes and
    /// truncated back, which removes aliasing for up to cubic `g`.
    pub fn nonlinear_coeffs(
        &self,
        spec: &NonlinearitySpec,
        coeffs: &[Complex64],
        dealias: bool,
    ) -> Vec<Complex64> {
        let derivs = spec.uses_derivatives();
        if !dealias {
            let u = self.inverse(coeffs);
            let (ux, uxx) = if derivs {
                (
                    self.inverse(&self.derivative_coeffs(coeffs, 1)),
                    self.inverse(&self.derivative_coeffs(coeffs, 2)),
                )
            } else {
                (Vec::new(), Vec::new())
            };
            let g: Vec<f64> = (0..u.len())
                .map(|j| {
                    if derivs {
                        spec.eval(u[j], ux[j], uxx[j])
                    } else {
                        spec.eval(u[j], 0.0, 0.0)
                    }
                })
                .collect();
            return self.transform(&g);
        }
        let n = self.grid.len();
        let up = |c: &[Complex64]| {
            let mut buf = self.pad(c);
            self.padded.inverse(&mut buf);
            buf.into_iter().map(|z| z.re).collect::<Vec<f64>>()
        };
        let u = up(coeffs);
        let (ux, uxx) = if derivs {
            (up(&self.derivative_coeffs(coeffs, 1)), up(&self.derivative_coeffs(coeffs, 2)))
        } else {
            (Vec::new(), Vec::new())
        };
        let mut g: Vec<Complex64> = (0..2 * n)
            .map(|j| {
                let v = if derivs {
                    spec.eval(u[j], ux[j], uxx[j])
                } else {
                    spec.eval(u[j], 0.0, 0.0)
                };
                Complex64::new(v, 0.0)
            })
            .collect();
        self.padded.forward(&mut g);
        self.truncate(&g)
    }

    fn pad(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.len();
        let half = n / 2;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
        out[..half].copy_from_slice(&coeffs[..half]);
        // Nyquist mode splits evenly between +N/2 and −N/2
        out[half] = coeffs[half] * 0.5;
        out[2 * n - half] = coeffs[half] * 0.5;
        out[2 * n - half + 1..].copy_from_slice(&coeffs[half + 1..]);
        out
    }

    fn truncate(&self, padded: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.len();
        let half = n / 2;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        out[..half].copy_from_slice(&padded[..half]);
        out[half] = padded[half] + padded[2 * n - half];
        out[half + 1..].copy_from_slice(&padded[2 * n - half + 1..]);
        out
    }
}

/// Location of a (near-)vanishing profile symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Resonance {
    /// Wavenumber where the symbol vanishes (or nearly does) on the resolved band.
    pub k: f64,
    /// Value of `Q` at the grid mode closest to `k`.
    pub symbol: f64,
    /// True when `Q` changes sign inside the resolved band.
    pub sign_change: bool,
}

/// Operator symbols on the grid wavenumbers for a speed `cs`.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    pub cs: f64,
    /// `P(k) = 1 − αk² + βk⁴`.
    pub p: Vec<f64>,
    /// `l(k) = (ε − ηk² + γk⁴)/P(k)`.
    pub l: Vec<f64>,
    /// `Q(k) = (βcs − γ)k⁴ − (αcs − η)k² + (cs − ε)`.
    pub q: Vec<f64>,
    /// `S(k) = −Q(k)`.
    pub s: Vec<f64>,
    pub min_abs_q: f64,
    pub argmin_k: f64,
    pub resonance: Option<Resonance>,
}

/// Default threshold on `min |Q|`: `1e−8·(1 + |cs| + ε)`.
pub fn default_resonance_tol(params: &EquationParams, cs: f64) -> f64 {
    1e-8 * (1.0 + cs.abs() + params.epsilon)
}

/// `Q(k)` at a single wavenumber.
pub fn q_symbol(params: &EquationParams, cs: f64, k: f64) -> f64 {
    let k2 = k * k;
    (params.beta * cs - params.gamma) * k2 * k2 - (params.alpha * cs - params.eta) * k2
        + (cs - params.epsilon)
}

/// Builds the symbols and flags resonance.
///
/// Resonance means either `min |Q| < resonance_tol` over the grid modes, or a
/// real root `k* ∈ (0, k_max]` of `Q`: then `Q` is sign-indefinite and the
/// iteration divides by values of both signs near `k*`.
pub fn build_symbols(
    params: &EquationParams,
    cs: f64,
    grid: &Grid,
    resonance_tol: f64,
) -> SymbolTable {
    let k = grid.wavenumbers();
    let n = k.len();
    let mut p = Vec::with_capacity(n);
    let mut l = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for &kk in &k {
        let k2 = kk * kk;
        let pk = params.mass_polynomial(k2);
        p.push(pk);
        l.push((params.epsilon - params.eta * k2 + params.gamma * k2 * k2) / pk);
        q.push(q_symbol(params, cs, kk));
    }
    let s = q.iter().map(|v| -v).collect();
    let (mut argmin, mut min_abs_q) = (0, f64::INFINITY);
    for (m, v) in q.iter().enumerate() {
        if v.abs() < min_abs_q {
            min_abs_q = v.abs();
            argmin = m;
        }
    }
    let argmin_k = k[argmin].abs();

    let kmax = grid.max_wavenumber();
    let resonance = if min_abs_q < resonance_tol {
        Some(Resonance { k: argmin_k, symbol: q[argmin], sign_change: false })
    } else {
        positive_roots(params, cs)
            .into_iter()
            .flatten()
            .filter(|&root| root <= kmax)
            .map(|root| {
                let dk = PI / grid.half_length();
                let m = libm::round(root / dk) as usize;
                Resonance { k: root, symbol: q_symbol(params, cs, m as f64 * dk), sign_change: true }
            })
            .next()
    };
    SymbolTable { cs, p, l, q, s, min_abs_q, argmin_k, resonance }
}

/// Positive real roots `k` of `Q`, found through the quadratic in `k²`.
fn positive_roots(params: &EquationParams, cs: f64) -> [Option<f64>; 2] {
    let a2 = params.beta * cs - params.gamma;
    let a1 = -(params.alpha * cs - params.eta);
    let a0 = cs - params.epsilon;
    let to_k = |x: f64| (x > 0.0 && x.is_finite()).then(|| x.sqrt());
    if a2 == 0.0 {
        if a1 == 0.0 {
            return [None, None];
        }
        return [to_k(-a0 / a1), None];
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc < 0.0 {
        return [None, None];
    }
    let sq = disc.sqrt();
    let t = -0.5 * (a1 + if a1 >= 0.0 { sq } else { -sq });
    let (x1, x2) = if t == 0.0 { (0.0, 0.0) } else { (t / a2, a0 / t) };
    let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
    [to_k(lo), to_k(hi)]
}

impl SymbolTable {
    pub fn check_resonance(&self) -> Result<()> {
        match self.resonance {
            Some(r) => Err(Error::ResonantWavenumber { k: r.k, symbol: r.symbol }),
            None => Ok(()),
        }
    }

    /// `Q` with entries below `tol` in magnitude clamped to `±tol` (sign kept,
    /// zero mapped to `+tol`). Returns the clamped table and the number of
    /// modified entries.
    pub fn clamped_q(&self, tol: f64) -> (Vec<f64>, usize) {
        let mut count = 0;
        let q = self
            .q
            .iter()
            .map(|&v| {
                if v.abs() < tol {
                    count += 1;
                    if v < 0.0 {
                        -tol
                    } else {
                        tol
                    }
                } else {
                    v
                }
            })
            .collect();
        (q, count)
    }
}
