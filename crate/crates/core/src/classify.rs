//! Regime classification of travelling waves.
//!
//! Travelling waves `u = φ(x − cs·t)` satisfy
//! `(γ − βcs)φ'''' + (η − αcs)φ'' + (ε − cs)φ + g(φ) = 0`, whose linearization at
//! zero has characteristic equation `λ⁴ − bλ² + a = 0` with
//! `a = (cs − ε)/(βcs − γ)` and `b = (αcs − η)/(γ − βcs)`. The `(b, a)` plane is
//! split into four regions by the curves
//!
//! | curve | locus                 |
//! |-------|-----------------------|
//! | C0    | `a = 0`, `b > 0`      |
//! | C1    | `a = 0`, `b < 0`      |
//! | C2    | `b² = 4a`, `b < 0`    |
//! | C3    | `b² = 4a`, `b > 0`    |
//!
//! and each region predicts a kind of wave near its bounding curves.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::{EquationParams, FamilyTag};

/// Relative residual below which a point lies on a curve.
pub const DEFAULT_CURVE_TOL: f64 = 1e-10;
/// Relative distance below which a prediction counts as local to a curve.
pub const DEFAULT_NEAR_BAND: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegimeCoefficients {
    pub a: f64,
    pub b: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// `εβ − γ`.
    pub rho: f64,
    /// `αε − η`.
    pub delta: f64,
    pub cs: f64,
}

impl RegimeCoefficients {
    /// Coefficients from a bare `(a, b)` pair; `rho`, `delta`, `cs` are zero.
    pub fn from_ab(a: f64, b: f64) -> Self {
        let mu1 = b / 3.0;
        Self { a, b, mu1, mu2: mu1 * mu1 - a, rho: 0.0, delta: 0.0, cs: 0.0 }
    }

    /// `1 + |a| + b²`.
    pub fn scale(&self) -> f64 {
        1.0 + self.a.abs() + self.b * self.b
    }
}

pub fn ab_coefficients(params: &EquationParams, cs: f64) -> Result<RegimeCoefficients> {
    let lead = params.beta * cs - params.gamma;
    if lead.abs() <= 1e-12 * (1.0 + (params.beta * cs).abs() + params.gamma.abs()) {
        return Err(Error::DegenerateSpeed { cs });
    }
    let a = (cs - params.epsilon) / lead;
    let b = (params.alpha * cs - params.eta) / (-lead);
    let mu1 = b / 3.0;
    Ok(RegimeCoefficients {
        a,
        b,
        mu1,
        mu2: mu1 * mu1 - a,
        rho: params.epsilon * params.beta - params.gamma,
        delta: params.alpha * params.epsilon - params.eta,
        cs,
    })
}

/// Roots of `λ⁴ − bλ² + a`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RootSet {
    /// `[s, −s, t, −t]` where `s² , t²` are the two values of `λ²`.
    pub roots: [Complex64; 4],
    pub lambda_sq: [Complex64; 2],
}

impl RootSet {
    /// Smallest positive decay rate `min{−Re λ : Re λ < 0}`, if any root decays.
    pub fn slowest_decay(&self) -> Option<f64> {
        self.decaying_root().map(|r| -r.re)
    }

    /// The decaying root with the smallest `|Re λ|`.
    pub fn decaying_root(&self) -> Option<Complex64> {
        let scale = self.roots.iter().fold(1.0f64, |m, r| m.max(r.norm()));
        self.roots
            .iter()
            .filter(|r| r.re < -1e-14 * scale)
            .copied()
            .fold(None, |best: Option<Complex64>, r| match best {
                Some(b) if -b.re <= -r.re => Some(b),
                _ => Some(r),
            })
    }
}

pub fn characteristic_roots(coeffs: &RegimeCoefficients) -> RootSet {
    roots_from_ab(coeffs.a, coeffs.b)
}

/// Biquadratic roots: `λ² = t` with `t² − bt + a = 0` solved without cancellation.
pub fn roots_from_ab(a: f64, b: f64) -> RootSet {
    let disc = b * b - 4.0 * a;
    let zero = Complex64::new(0.0, 0.0);
    let (t1, t2, complex_pair) = if disc >= 0.0 {
        let sq = disc.sqrt();
        let t1 = 0.5 * (b + if b >= 0.0 { sq } else { -sq });
        let t2 = if t1 == 0.0 { 0.0 } else { a / t1 };
        (Complex64::new(t1, 0.0), Complex64::new(t2, 0.0), false)
    } else {
        let t1 = Complex64::new(0.5 * b, 0.5 * (-disc).sqrt());
        (t1, t1.conj(), true)
    };
    let s1 = if t1 == zero { zero } else { t1.sqrt() };
    let s2 = if complex_pair {
        s1.conj()
    } else if t2 == zero {
        zero
    } else {
        t2.sqrt()
    };
    RootSet { roots: [s1, -s1, s2, -s2], lambda_sq: [t1, t2] }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RegimeLabel {
    Region1,
    Region2,
    Region3,
    Region4,
    C0,
    C1,
    C2,
    C3,
    Origin,
}

impl RegimeLabel {
    pub fn is_region(&self) -> bool {
        matches!(
            self,
            RegimeLabel::Region1 | RegimeLabel::Region2 | RegimeLabel::Region3 | RegimeLabel::Region4
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum WaveType {
    /// Classical solitary wave with monotone tails.
    #[cfg_attr(feature = "serde", serde(rename = "CSW"))]
    Csw,
    /// Classical solitary wave with oscillatory tails.
    #[cfg_attr(feature = "serde", serde(rename = "NMCSW"))]
    Nmcsw,
    /// Generalized solitary wave, homoclinic to small ripples.
    #[cfg_attr(feature = "serde", serde(rename = "GSW"))]
    Gsw,
    /// Periodic travelling wave.
    #[cfg_attr(feature = "serde", serde(rename = "PTW"))]
    Ptw,
}

impl WaveType {
    pub fn name(&self) -> &'static str {
        match self {
            WaveType::Csw => "CSW",
            WaveType::Nmcsw => "NMCSW",
            WaveType::Gsw => "GSW",
            WaveType::Ptw => "PTW",
        }
    }

    pub fn from_name(name: &str) -> Option<WaveType> {
        [WaveType::Csw, WaveType::Nmcsw, WaveType::Gsw, WaveType::Ptw]
            .into_iter()
            .find(|w| w.name().eq_ignore_ascii_case(name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Curve {
    C0,
    C1,
    C2,
    C3,
}

/// Closest bifurcation curve in the `(b, a)` plane.
///
/// The distance is signed by `a` for C0/C1 and by `a − b²/4` for C2/C3.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NearestCurve {
    pub curve: Curve,
    pub signed_distance: f64,
}

/// How a wave prediction relates to the local theory near the curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PredictionBasis {
    /// Inside the near band of the nearest curve.
    Local,
    /// Outside the band: the region's default is reported.
    Extrapolated,
    /// On a curve or at the origin.
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NamedThreshold {
    pub name: String,
    pub value: f64,
}

/// Roots `x₋ ≤ 0 ≤ x₊` of `(4β − α²)x² − 2(αδ − 2ρ)x − δ²`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdSet {
    pub x_plus: f64,
    pub x_minus: f64,
    pub family: Vec<NamedThreshold>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub curve_tol: f64,
    pub near_band: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { curve_tol: DEFAULT_CURVE_TOL, near_band: DEFAULT_NEAR_BAND }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegimeReport {
    pub coefficients: RegimeCoefficients,
    pub roots: RootSet,
    pub label: RegimeLabel,
    pub predicted_waves: Vec<WaveType>,
    /// Waves also reported as possible near C3, where no sharp prediction exists.
    pub possible_waves: Vec<WaveType>,
    pub nearest_curve: NearestCurve,
    pub basis: PredictionBasis,
    pub coercive: Option<bool>,
    pub thresholds: Option<ThresholdSet>,
    pub family: Option<FamilyTag>,
    /// Label derived from the family's own thresholds, when a family route applies.
    pub family_label: Option<RegimeLabel>,
    pub table_row: Option<String>,
    pub notes: Vec<String>,
}

/// Region or curve label from the sign pattern of `(a, b)`.
pub fn region_label(a: f64, b: f64, rel_tol: f64) -> RegimeLabel {
    let scale = 1.0 + a.abs() + b * b;
    let band = rel_tol * scale;
    if a.abs() <= band && b.abs() <= band {
        RegimeLabel::Origin
    } else if a.abs() <= band {
        if b > 0.0 {
            RegimeLabel::C0
        } else {
            RegimeLabel::C1
        }
    } else if (b * b - 4.0 * a).abs() <= band {
        if b > 0.0 {
            RegimeLabel::C3
        } else {
            RegimeLabel::C2
        }
    } else if a < 0.0 {
        RegimeLabel::Region3
    } else if b * b < 4.0 * a {
        RegimeLabel::Region1
    } else if b > 0.0 {
        RegimeLabel::Region2
    } else {
        RegimeLabel::Region4
    }
}

/// Wave types predicted for a label; `b` selects the side of Region 3.
pub fn predicted_waves(label: RegimeLabel, b: f64) -> Vec<WaveType> {
    use WaveType::*;
    match label {
        RegimeLabel::Region1 => vec![Nmcsw],
        RegimeLabel::Region2 => vec![Csw],
        // b = 0 (Rosenau, cs < ε) sits with the C0 side
        RegimeLabel::Region3 if b >= 0.0 => vec![Ptw],
        RegimeLabel::Region3 => vec![Gsw],
        RegimeLabel::Region4 => vec![Gsw, Ptw],
        RegimeLabel::C0 => vec![Csw, Ptw],
        RegimeLabel::C1 => vec![Gsw, Ptw],
        RegimeLabel::C2 => vec![Nmcsw, Gsw, Ptw],
        RegimeLabel::C3 => vec![Csw, Nmcsw],
        RegimeLabel::Origin => vec![],
    }
}

pub fn classify_region(coeffs: &RegimeCoefficients, rel_tol: f64) -> RegimeReport {
    classify_with(coeffs, &ClassifyOptions { curve_tol: rel_tol, ..Default::default() })
}

pub fn classify_with(coeffs: &RegimeCoefficients, opts: &ClassifyOptions) -> RegimeReport {
    let label = region_label(coeffs.a, coeffs.b, opts.curve_tol);
    let nearest = nearest_curve(coeffs.a, coeffs.b);
    let basis = if !label.is_region() {
        PredictionBasis::Boundary
    } else if nearest.signed_distance.abs() < opts.near_band * coeffs.scale() {
        PredictionBasis::Local
    } else {
        PredictionBasis::Extrapolated
    };
    let possible = match (label, nearest.curve, basis) {
        (RegimeLabel::Region1 | RegimeLabel::Region2, Curve::C3, PredictionBasis::Local) => {
            vec![WaveType::Csw, WaveType::Nmcsw]
        }
        _ => Vec::new(),
    };
    RegimeReport {
        coefficients: *coeffs,
        roots: characteristic_roots(coeffs),
        label,
        predicted_waves: predicted_waves(label, coeffs.b),
        possible_waves: possible,
        nearest_curve: nearest,
        basis,
        coercive: None,
        thresholds: None,
        family: None,
        family_label: None,
        table_row: None,
        notes: Vec::new(),
    }
}

/// `(μ₁, μ₂)` and the curve the point lies on, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MuPoint {
    pub mu1: f64,
    pub mu2: f64,
    pub curve: Option<Curve>,
}

pub fn mu_coordinates(coeffs: &RegimeCoefficients) -> MuPoint {
    mu_coordinates_tol(coeffs, DEFAULT_CURVE_TOL)
}

pub fn mu_coordinates_tol(coeffs: &RegimeCoefficients, rel_tol: f64) -> MuPoint {
    let mu1 = coeffs.b / 3.0;
    let mu2 = mu1 * mu1 - coeffs.a;
    let band = rel_tol * (1.0 + mu1.abs() + mu2.abs());
    // μ₂ − μ₁² = −a, μ₂ + 5μ₁²/4 = b²/4 − a
    let curve = if mu1.abs() <= band {
        None
    } else if (mu2 - mu1 * mu1).abs() <= band {
        Some(if mu1 > 0.0 { Curve::C0 } else { Curve::C1 })
    } else if (mu2 + 1.25 * mu1 * mu1).abs() <= band {
        Some(if mu1 > 0.0 { Curve::C3 } else { Curve::C2 })
    } else {
        None
    };
    MuPoint { mu1, mu2, curve }
}

/// Euclidean distance from `(b, a)` to each curve; the smallest wins.
pub fn nearest_curve(a: f64, b: f64) -> NearestCurve {
    let line = |positive: bool| {
        let on_side = if positive { b >= 0.0 } else { b <= 0.0 };
        if on_side {
            a.abs()
        } else {
            (a * a + b * b).sqrt()
        }
    };
    let parabola = |positive: bool| {
        // stationary points of (t − b)² + (t²/4 − a)²
        let mut best = (b * b + a * a).sqrt();
        for t in real_cubic_roots(8.0 - 4.0 * a, -8.0 * b).into_iter().flatten() {
            let in_half = if positive { t >= 0.0 } else { t <= 0.0 };
            if in_half {
                let d = ((t - b).powi(2) + (0.25 * t * t - a).powi(2)).sqrt();
                best = best.min(d);
            }
        }
        best
    };
    let sign = |v: f64| {
        if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        }
    };
    let candidates = [
        (Curve::C0, line(true), sign(a)),
        (Curve::C1, line(false), sign(a)),
        (Curve::C2, parabola(false), sign(a - 0.25 * b * b)),
        (Curve::C3, parabola(true), sign(a - 0.25 * b * b)),
    ];
    let (curve, dist, s) = candidates
        .into_iter()
        .fold(None, |best: Option<(Curve, f64, f64)>, c| match best {
            Some(b) if b.1 <= c.1 => Some(b),
            _ => Some(c),
        })
        .unwrap_or((Curve::C0, 0.0, 0.0));
    NearestCurve { curve, signed_distance: s * dist }
}

/// Real roots of `t³ + pt + q = 0`.
fn real_cubic_roots(p: f64, q: f64) -> [Option<f64>; 3] {
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let polish = |mut t: f64| {
        for _ in 0..2 {
            let f = t * t * t + p * t + q;
            let df = 3.0 * t * t + p;
            if df != 0.0 {
                t -= f / df;
            }
        }
        t
    };
    if disc > 0.0 {
        let sq = disc.sqrt();
        let t = libm::cbrt(-q / 2.0 + sq) + libm::cbrt(-q / 2.0 - sq);
        [Some(polish(t)), None, None]
    } else if p == 0.0 {
        [Some(0.0), None, None]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = libm::acos(arg) / 3.0;
        let root = |k: f64| Some(polish(r * (phi - 2.0 * PI * k / 3.0).cos()));
        [root(0.0), root(1.0), root(2.0)]
    }
}

pub fn coercivity_thresholds(params: &EquationParams) -> ThresholdSet {
    let (x_minus, x_plus) = general_thresholds(params);
    ThresholdSet { x_plus, x_minus, family: Vec::new() }
}

/// `x±` evaluated so the root near zero is free of cancellation.
fn general_thresholds(params: &EquationParams) -> (f64, f64) {
    let rho = params.epsilon * params.beta - params.gamma;
    let delta = params.alpha * params.epsilon - params.eta;
    let d = 4.0 * params.beta - params.alpha * params.alpha;
    let bb = params.alpha * delta - 2.0 * rho;
    let r = (bb * bb + delta * delta * d).sqrt();
    // x₊·x₋ = −δ²/d
    let (x_minus, x_plus) = if bb >= 0.0 {
        let xp = (bb + r) / d;
        let xm = if bb + r == 0.0 { 0.0 } else { -delta * delta / (bb + r) };
        (xm, xp)
    } else {
        let xm = (bb - r) / d;
        let xp = -delta * delta / (bb - r);
        (xm, xp)
    };
    (x_minus + 0.0, x_plus + 0.0)
}

/// True iff `cs − ε` lies strictly outside `[x₋, x₊]`.
pub fn coercivity_check(params: &EquationParams, cs: f64) -> bool {
    let (x_minus, x_plus) = general_thresholds(params);
    let x = cs - params.epsilon;
    x < x_minus || x > x_plus
}

/// Thresholds in each family's own closed form.
pub fn family_thresholds(tag: FamilyTag, params: &EquationParams) -> Vec<NamedThreshold> {
    let named = |name: &str, value: f64| NamedThreshold { name: String::from(name), value };
    let (al, be, ga, ep, et) = (params.alpha, params.beta, params.gamma, params.epsilon, params.eta);
    match tag {
        FamilyTag::Rosenau => vec![named("x_plus", 0.0), named("x_minus", -ep)],
        FamilyTag::RosenauRlw => {
            vec![named("rlw_threshold", ep * al * al / (4.0 * be - al * al)), named("x_minus", -ep)]
        }
        FamilyTag::RosenauKdv => {
            let r = (ep * ep + et * et / be).sqrt();
            vec![named("x_plus", 0.5 * (-ep + r)), named("x_minus", 0.5 * (-ep - r))]
        }
        FamilyTag::RosenauKawahara => {
            let rb = (ep * be - ga) / be;
            let r = (rb * rb + et * et / be).sqrt();
            vec![
                named("y_plus", 0.5 * (-rb + r)),
                named("y_minus", 0.5 * (-rb - r)),
                named("minus_rho_over_beta", -rb),
            ]
        }
        FamilyTag::RosenauRlwKawahara => {
            let r = ((et - 3.0).powi(2) + 3.0 * (1.0 + et).powi(2)).sqrt();
            vec![named("z_plus", (et - 3.0 + r) / 3.0), named("z_minus", (et - 3.0 - r) / 3.0)]
        }
        FamilyTag::Generic => Vec::new(),
    }
}

fn threshold(set: &[NamedThreshold], name: &str) -> f64 {
    set.iter().find(|t| t.name == name).map(|t| t.value).unwrap_or(f64::NAN)
}

/// Full report for a parameter set and speed, without a family route.
pub fn regime_report(
    params: &EquationParams,
    cs: f64,
    opts: &ClassifyOptions,
) -> Result<RegimeReport> {
    let coeffs = ab_coefficients(params, cs)?;
    let mut report = classify_with(&coeffs, opts);
    report.coercive = Some(coercivity_check(params, cs));
    report.thresholds = Some(coercivity_thresholds(params));
    Ok(report)
}

pub fn family_regime(tag: FamilyTag, params: &EquationParams, cs: f64) -> Result<RegimeReport> {
    family_regime_with(tag, params, cs, &ClassifyOptions::default())
}

/// Classification through the family's own thresholds, cross-checked against
/// the generic `(a, b)` sign pattern.
///
/// With `x = cs − ε` the factored forms are `a = x/(βx + ρ)`,
/// `b = −(αx + δ)/(βx + ρ)` and `b² < 4a ⇔ x ∉ [x₋, x₊]`, so each family
/// reduces to comparing `x` with its named thresholds.
pub fn family_regime_with(
    tag: FamilyTag,
    params: &EquationParams,
    cs: f64,
    opts: &ClassifyOptions,
) -> Result<RegimeReport> {
    tag.check(params)?;
    if tag == FamilyTag::RosenauRlwKawahara {
        let pattern = params.alpha == -1.0
            && params.gamma == -1.0
            && params.epsilon == 1.0
            && params.beta == 1.0
            && params.eta > 0.0;
        if !pattern {
            return Err(Error::UnsupportedPattern {
                family: tag,
                reason: String::from("analysis covers alpha = gamma = -1, epsilon = beta = 1, eta > 0"),
            });
        }
    }
    let mut report = regime_report(params, cs, opts)?;
    report.family = Some(tag);
    let named = family_thresholds(tag, params);
    if let Some(t) = report.thresholds.as_mut() {
        t.family = named.clone();
    }
    if tag == FamilyTag::Generic {
        return Ok(report);
    }
    if !(cs > 0.0) {
        report
            .notes
            .push(String::from("family analysis assumes cs > 0; generic classification used"));
        return Ok(report);
    }

    let x = cs - params.epsilon;
    let beta_x_rho = params.beta * x + report.coefficients.rho;
    let (family_label, row) = match tag {
        FamilyTag::Rosenau | FamilyTag::RosenauRlw => {
            let t = if tag == FamilyTag::Rosenau { 0.0 } else { threshold(&named, "rlw_threshold") };
            rlw_route(params.alpha, x, t)
        }
        FamilyTag::RosenauKdv => kdv_route(params.eta, x, threshold(&named, "x_plus")),
        FamilyTag::RosenauKawahara => kawahara_route(
            params.eta,
            report.coefficients.rho,
            x,
            beta_x_rho,
            threshold(&named, "y_minus"),
            threshold(&named, "y_plus"),
        ),
        FamilyTag::RosenauRlwKawahara => rlw_kawahara_route(x, threshold(&named, "z_plus")),
        FamilyTag::Generic => unreachable!(),
    };
    report.family_label = Some(family_label);
    report.table_row = Some(row);
    if tag == FamilyTag::RosenauKawahara && report.coefficients.rho == 0.0 {
        report.notes.push(String::from(
            "rho = 0: the CSW rows additionally require beta large; not tested numerically",
        ));
    }
    if report.label.is_region() && report.label != family_label {
        report.notes.push(format!(
            "family thresholds give {family_label:?} but the (a, b) sign pattern gives {:?}",
            report.label
        ));
    }
    Ok(report)
}

fn side(x: f64) -> core::cmp::Ordering {
    x.partial_cmp(&0.0).unwrap_or(core::cmp::Ordering::Equal)
}

/// RLW (and Rosenau with `α = 0`): `b = −α/β`, `βx + ρ = βcs > 0`, `x₋ = −ε`.
fn rlw_route(alpha: f64, x: f64, t: f64) -> (RegimeLabel, String) {
    use core::cmp::Ordering::*;
    let (label, text) = match (side(x), side(alpha)) {
        (Less, Greater) => (RegimeLabel::Region3, "alpha > 0, cs - eps < 0"),
        (Less, _) => (RegimeLabel::Region3, "alpha <= 0, cs - eps < 0"),
        (Equal, Less) => (RegimeLabel::C0, "cs = eps, alpha < 0"),
        (Equal, Greater) => (RegimeLabel::C1, "cs = eps, alpha > 0"),
        (Equal, Equal) => (RegimeLabel::Origin, "cs = eps, alpha = 0"),
        (Greater, _) if x > t => (
            RegimeLabel::Region1,
            "cs - eps > eps alpha^2 / (4 beta - alpha^2)",
        ),
        (Greater, _) if x == t => (RegimeLabel::C3, "cs - eps = eps alpha^2 / (4 beta - alpha^2)"),
        (Greater, Less) => (
            RegimeLabel::Region2,
            "alpha < 0, 0 < cs - eps < eps alpha^2 / (4 beta - alpha^2)",
        ),
        (Greater, _) => (
            RegimeLabel::Region4,
            "alpha > 0, 0 < cs - eps < eps alpha^2 / (4 beta - alpha^2)",
        ),
    };
    let label = if label == RegimeLabel::C3 && alpha > 0.0 { RegimeLabel::C2 } else { label };
    (label, String::from(text))
}

/// KdV: `b = η/(βcs)`, `x₋ < −ε` so only `x₊` matters for `cs > 0`.
fn kdv_route(eta: f64, x: f64, x_plus: f64) -> (RegimeLabel, String) {
    let (label, text) = if x < 0.0 {
        (RegimeLabel::Region3, if eta > 0.0 { "eta > 0, cs - eps < 0" } else { "eta < 0, cs - eps < 0" })
    } else if x == 0.0 {
        (if eta > 0.0 { RegimeLabel::C0 } else { RegimeLabel::C1 }, "cs = eps")
    } else if x > x_plus {
        (RegimeLabel::Region1, "cs - eps > x+")
    } else if x == x_plus {
        (if eta > 0.0 { RegimeLabel::C3 } else { RegimeLabel::C2 }, "cs - eps = x+")
    } else if eta > 0.0 {
        (RegimeLabel::Region2, "eta > 0, 0 < cs - eps < x+")
    } else {
        (RegimeLabel::Region4, "eta < 0, 0 < cs - eps < x+")
    };
    (label, String::from(text))
}

/// Kawahara: `a = x/(βx + ρ)`, `b = η/(βx + ρ)`, `b² < 4a ⇔ x ∉ [y₋, y₊]`.
fn kawahara_route(
    eta: f64,
    rho: f64,
    x: f64,
    beta_x_rho: f64,
    y_minus: f64,
    y_plus: f64,
) -> (RegimeLabel, String) {
    let rho_case = if rho < 0.0 {
        "rho < 0"
    } else if rho > 0.0 {
        "rho > 0"
    } else {
        "rho = 0"
    };
    let eta_case = if eta > 0.0 { "eta > 0" } else if eta < 0.0 { "eta < 0" } else { "eta = 0" };
    let position = if x < y_minus {
        "cs - eps < y-"
    } else if x > y_plus {
        "cs - eps > y+"
    } else if x < 0.0 {
        "y- < cs - eps < 0"
    } else if x > 0.0 {
        "0 < cs - eps < y+"
    } else {
        "cs = eps"
    };
    let sign_a = side(x) as i32 * side(beta_x_rho) as i32;
    let sign_b = side(eta) as i32 * side(beta_x_rho) as i32;
    let coercive = x < y_minus || x > y_plus;
    let label = if sign_a == 0 {
        match sign_b {
            1 => RegimeLabel::C0,
            -1 => RegimeLabel::C1,
            _ => RegimeLabel::Origin,
        }
    } else if coercive {
        RegimeLabel::Region1
    } else if x == y_minus || x == y_plus {
        if sign_b > 0 {
            RegimeLabel::C3
        } else {
            RegimeLabel::C2
        }
    } else if sign_a < 0 {
        RegimeLabel::Region3
    } else if sign_b > 0 {
        RegimeLabel::Region2
    } else {
        RegimeLabel::Region4
    };
    let pole = if beta_x_rho > 0.0 { "cs - eps > -rho/beta" } else { "cs - eps < -rho/beta" };
    (label, format!("{rho_case}, {eta_case}, {position}, {pole}"))
}

/// RLW-Kawahara with `α = γ = −1`, `ε = β = 1`, `η > 0`: `b = (cs + η)/(1 + cs) > 0`.
fn rlw_kawahara_route(x: f64, z_plus: f64) -> (RegimeLabel, String) {
    let (label, text) = if x < 0.0 {
        (RegimeLabel::Region3, "cs - eps < 0")
    } else if x == 0.0 {
        (RegimeLabel::C0, "cs = eps")
    } else if x < z_plus {
        (RegimeLabel::Region2, "0 < cs - eps < z+")
    } else if x == z_plus {
        (RegimeLabel::C3, "cs - eps = z+")
    } else {
        (RegimeLabel::Region1, "cs - eps > z+")
    };
    (label, String::from(text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rlw(alpha: f64) -> EquationParams {
        EquationParams::new(alpha, 1.0, 0.0, 1.0, 0.0)
    }

    #[test]
    fn ab_examples() {
        let c = ab_coefficients(&rlw(-1.0), 1.1).unwrap();
        assert_abs_diff_eq!(c.a, 0.1 / 1.1, epsilon = 1e-15);
        assert_abs_diff_eq!(c.b, 1.0, epsilon = 1e-15);
        let p = EquationParams::new(0.3, 2.0, 0.5, 1.7, -0.2);
        assert_eq!(ab_coefficients(&p, 1.7).unwrap().a, 0.0);
        let ros = ab_coefficients(&EquationParams::new(0.0, 1.0, 0.0, 1.0, 0.0), 2.0).unwrap();
        assert_eq!((ros.a, ros.b), (0.5, 0.0));
        assert_eq!(ros.mu2, -0.5);
    }

    #[test]
    fn degenerate_speed() {
        let p = EquationParams::new(0.0, 2.0, 1.0, 1.0, 0.0);
        assert_eq!(ab_coefficients(&p, 0.5), Err(Error::DegenerateSpeed { cs: 0.5 }));
    }

    fn sorted_re_im(set: &RootSet) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = set.roots.iter().map(|r| (r.re, r.im)).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn root_examples() {
        let r = roots_from_ab(0.0, 4.0);
        let v = sorted_re_im(&r);
        assert_abs_diff_eq!(v[0].0, -2.0);
        assert_eq!((v[1].0, v[2].0), (0.0, 0.0));
        assert_abs_diff_eq!(v[3].0, 2.0);

        let r = roots_from_ab(1.0, 0.0);
        for z in r.roots {
            assert_abs_diff_eq!(z.re.abs(), core::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im.abs(), core::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        }

        let r = roots_from_ab(0.1 / 1.1, 1.0);
        let v = sorted_re_im(&r);
        let expect = [-0.948_08, -0.318_02, 0.318_02, 0.948_08];
        for (got, want) in v.iter().zip(expect) {
            assert_abs_diff_eq!(got.0, want, epsilon = 5e-6);
            assert_eq!(got.1, 0.0);
        }
        assert_abs_diff_eq!(r.slowest_decay().unwrap(), 0.318_02, epsilon = 5e-6);
    }

    #[test]
    fn rosenau_complex_quartet_decay() {
        let c = ab_coefficients(&EquationParams::new(0.0, 1.0, 0.0, 1.0, 0.0), 1.5).unwrap();
        let r = characteristic_roots(&c);
        let want = libm::pow(1.0 / 3.0, 0.25) / 2f64.sqrt();
        let root = r.decaying_root().unwrap();
        assert_abs_diff_eq!(-root.re, want, epsilon = 1e-14);
        assert_abs_diff_eq!(root.im.abs(), want, epsilon = 1e-14);
    }

    #[test]
    fn region_examples() {
        let rep = classify_region(&RegimeCoefficients::from_ab(0.090909, 1.0), DEFAULT_CURVE_TOL);
        assert_eq!(rep.label, RegimeLabel::Region2);
        assert_eq!(rep.predicted_waves, vec![WaveType::Csw]);
        let rep = classify_region(&RegimeCoefficients::from_ab(-0.0909, -1.0), DEFAULT_CURVE_TOL);
        assert_eq!(rep.label, RegimeLabel::Region3);
        assert_eq!(rep.nearest_curve.curve, Curve::C1);
        assert_eq!(rep.predicted_waves, vec![WaveType::Gsw]);
        let rep = classify_region(&RegimeCoefficients::from_ab(0.5, 0.0), DEFAULT_CURVE_TOL);
        assert_eq!(rep.label, RegimeLabel::Region1);
        assert_eq!(rep.predicted_waves, vec![WaveType::Nmcsw]);
        let rep = classify_region(&RegimeCoefficients::from_ab(0.0, 0.0), DEFAULT_CURVE_TOL);
        assert_eq!(rep.label, RegimeLabel::Origin);
        assert!(rep.predicted_waves.is_empty());
        assert_eq!(region_label(2.25, 3.0, DEFAULT_CURVE_TOL), RegimeLabel::C3);
        assert_eq!(region_label(2.25, -3.0, DEFAULT_CURVE_TOL), RegimeLabel::C2);
        assert_eq!(region_label(0.0, -3.0, DEFAULT_CURVE_TOL), RegimeLabel::C1);
        assert_eq!(region_label(1.0, -3.0, DEFAULT_CURVE_TOL), RegimeLabel::Region4);
    }

    #[test]
    fn near_c3_reports_both_classical_waves() {
        let rep = classify_region(&RegimeCoefficients::from_ab(1.0, 2.05), DEFAULT_CURVE_TOL);
        assert_eq!(rep.label, RegimeLabel::Region2);
        assert_eq!(rep.nearest_curve.curve, Curve::C3);
        assert_eq!(rep.basis, PredictionBasis::Local);
        assert_eq!(rep.possible_waves, vec![WaveType::Csw, WaveType::Nmcsw]);
    }

    #[test]
    fn mu_examples() {
        let m = mu_coordinates(&RegimeCoefficients::from_ab(0.0, 3.0));
        assert_eq!((m.mu1, m.mu2, m.curve), (1.0, 1.0, Some(Curve::C0)));
        let m = mu_coordinates(&RegimeCoefficients::from_ab(0.0, -3.0));
        assert_eq!((m.mu1, m.mu2, m.curve), (-1.0, 1.0, Some(Curve::C1)));
        let m = mu_coordinates(&RegimeCoefficients::from_ab(2.25, 3.0));
        assert_eq!(m.mu1, 1.0);
        assert_abs_diff_eq!(m.mu2, -1.25);
        assert_eq!(m.curve, Some(Curve::C3));
    }

    #[test]
    fn nearest_curve_on_parabola_and_lines() {
        let n = nearest_curve(0.3, 5.0);
        assert_eq!(n.curve, Curve::C0);
        assert_abs_diff_eq!(n.signed_distance, 0.3);
        let n = nearest_curve(-0.2, -5.0);
        assert_eq!(n.curve, Curve::C1);
        assert_abs_diff_eq!(n.signed_distance, -0.2);
        // point just above the parabola at t = 2 along the normal (−t/2, 1)/norm
        let (t, h) = (2.0f64, 1e-3);
        let norm = (1.0 + t * t / 4.0).sqrt();
        let n = nearest_curve(t * t / 4.0 + h / norm, t - h * (t / 2.0) / norm);
        assert_eq!(n.curve, Curve::C3);
        assert_abs_diff_eq!(n.signed_distance, h, epsilon = 1e-12);
    }

    #[test]
    fn threshold_examples() {
        let t = coercivity_thresholds(&EquationParams::new(0.0, 1.0, 0.0, 1.0, 0.0));
        assert_eq!(t.x_plus, 0.0);
        assert_eq!(t.x_minus, -1.0);
        let t = coercivity_thresholds(&EquationParams::new(0.0, 1.0, 0.0, 1.0, 1.0));
        assert_abs_diff_eq!(t.x_plus, 0.5 * (-1.0 + 2f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(t.x_minus, 0.5 * (-1.0 - 2f64.sqrt()), epsilon = 1e-15);
        let p = EquationParams::new(-1.0, 1.0, -1.0, 1.0, 1.0);
        let t = coercivity_thresholds(&p);
        assert_abs_diff_eq!(t.x_plus, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.x_minus, -2.0, epsilon = 1e-15);
        let z = family_thresholds(FamilyTag::RosenauRlwKawahara, &p);
        assert_abs_diff_eq!(threshold(&z, "z_plus"), 2.0 / 3.0, epsilon = 1e-15);
        // 1.102 = z₊ + ε − 0.565 to three decimals
        assert_abs_diff_eq!(threshold(&z, "z_plus") + 1.0 - 0.565, 1.102, epsilon = 1e-3);
    }

    #[test]
    fn coercivity_examples() {
        let ros = EquationParams::new(0.0, 1.0, 0.0, 1.0, 0.0);
        assert!(coercivity_check(&ros, 1.5));
        assert!(!coercivity_check(&ros, 0.9));
        let kaw = EquationParams::new(0.0, 1.0, 2.0, 1.0, -0.5);
        assert!(coercivity_check(&kaw, 2.2));
        let y = family_thresholds(FamilyTag::RosenauKawahara, &kaw);
        assert_abs_diff_eq!(threshold(&y, "y_plus"), 1.059_017, epsilon = 1e-6);
        assert_abs_diff_eq!(threshold(&y, "y_minus"), -0.059_017, epsilon = 1e-6);
        assert_abs_diff_eq!(threshold(&y, "y_minus") + 1.0 + 0.01, 0.951, epsilon = 1e-3);
    }

    #[test]
    fn family_examples() {
        let r = family_regime(FamilyTag::RosenauRlw, &rlw(-1.0), 1.1).unwrap();
        assert_eq!(r.label, RegimeLabel::Region2);
        assert_eq!(r.family_label, Some(RegimeLabel::Region2));
        assert_eq!(r.predicted_waves, vec![WaveType::Csw]);
        assert_eq!(r.coercive, Some(false));
        let r = family_regime(FamilyTag::RosenauRlw, &rlw(1.0), 1.5).unwrap();
        assert_eq!(r.label, RegimeLabel::Region1);
        assert!(r.coefficients.b < 0.0);
        assert_eq!(r.predicted_waves, vec![WaveType::Nmcsw]);
        assert_eq!(r.coercive, Some(true));
        let kdv = EquationParams::new(0.0, 1.0, 0.0, 1.0, 1.0);
        let r = family_regime(FamilyTag::RosenauKdv, &kdv, 0.9).unwrap();
        assert_eq!(r.label, RegimeLabel::Region3);
        assert_eq!(r.nearest_curve.curve, Curve::C0);
        assert_eq!(r.predicted_waves, vec![WaveType::Ptw]);
        assert!(r.notes.is_empty(), "{:?}", r.notes);
    }

    #[test]
    fn family_pattern_mismatch() {
        let err = family_regime(FamilyTag::RosenauKdv, &rlw(-1.0), 1.1);
        assert!(matches!(err, Err(Error::UnsupportedPattern { .. })));
        let p = EquationParams::new(-1.0, 1.0, -1.0, 1.0, -1.0);
        let err = family_regime(FamilyTag::RosenauRlwKawahara, &p, 1.1);
        assert!(matches!(err, Err(Error::UnsupportedPattern { .. })));
    }

    #[test]
    fn kawahara_rho_zero_is_annotated() {
        let p = EquationParams::new(0.0, 8.0, 1.0, 0.125, 1.0);
        let r = family_regime(FamilyTag::RosenauKawahara, &p, 0.115).unwrap();
        assert_eq!(r.label, RegimeLabel::Region4);
        assert_eq!(r.family_label, Some(RegimeLabel::Region4));
        assert!(r.notes.iter().any(|n| n.contains("beta large")));
    }

    fn admissible() -> impl Strategy<Value = EquationParams> {
        (-3.0..3.0f64, 0.1..5.0f64, -3.0..3.0f64, 0.1..3.0f64, -3.0..3.0f64).prop_filter_map(
            "admissible",
            |(al, be, ga, ep, et)| {
                let p = EquationParams::new(al, be, ga, ep, et);
                crate::params::validate_params(&p).ok.then_some(p)
            },
        )
    }

    proptest! {
        #[test]
        fn vieta_and_closure(a in -10.0..10.0f64, b in -10.0..10.0f64) {
            let r = roots_from_ab(a, b);
            let tol = 1e-10 * (1.0 + a.abs() + b.abs());
            for z in r.roots {
                let res = z.powu(4) - z * z * b + a;
                prop_assert!(res.norm() <= tol * (1.0 + z.norm_sqr()));
                prop_assert!(r.roots.iter().any(|w| (w + z).norm() <= 1e-12 * (1.0 + z.norm())));
                prop_assert!(r.roots.iter().any(|w| (w - z.conj()).norm() <= 1e-12 * (1.0 + z.norm())));
            }
            let prod = r.roots.iter().fold(Complex64::new(1.0, 0.0), |p, z| p * z);
            prop_assert!((prod - a).norm() <= 1e-10 * (1.0 + a.abs()));
            let sq = r.lambda_sq[0] * r.lambda_sq[0] + r.lambda_sq[1] * r.lambda_sq[1];
            prop_assert!((sq - (b * b - 2.0 * a)).norm() <= 1e-10 * (1.0 + b * b + a.abs()));
        }

        #[test]
        fn label_matches_sign_pattern(a in -5.0..5.0f64, b in -5.0..5.0f64) {
            let label = region_label(a, b, DEFAULT_CURVE_TOL);
            match label {
                RegimeLabel::Region1 => prop_assert!(a > 0.0 && b * b < 4.0 * a),
                RegimeLabel::Region2 => prop_assert!(a > 0.0 && b * b > 4.0 * a && b > 0.0),
                RegimeLabel::Region3 => prop_assert!(a < 0.0),
                RegimeLabel::Region4 => prop_assert!(a > 0.0 && b * b > 4.0 * a && b < 0.0),
                _ => {}
            }
        }

        #[test]
        fn coercive_implies_determinant_condition(p in admissible(), cs in 0.01..5.0f64) {
            if coercivity_check(&p, cs) {
                let lhs = (p.alpha * cs - p.eta).powi(2);
                let rhs = 4.0 * (p.beta * cs - p.gamma) * (cs - p.epsilon);
                prop_assert!(lhs < rhs * (1.0 + 1e-12) + 1e-14);
            }
        }

        #[test]
        fn thresholds_bracket_zero(p in admissible()) {
            let t = coercivity_thresholds(&p);
            prop_assert!(t.x_minus <= 0.0 && 0.0 <= t.x_plus);
        }

        #[test]
        fn family_route_agrees_with_sign_pattern(p in admissible(), cs in 0.05..4.0f64) {
            let kaw = EquationParams::new(0.0, p.beta, p.gamma, p.epsilon, p.eta);
            if let Ok(r) = family_regime(FamilyTag::RosenauKawahara, &kaw, cs) {
                if r.label.is_region() && r.nearest_curve.signed_distance.abs() > 1e-9 {
                    prop_assert_eq!(Some(r.label), r.family_label);
                }
            }
            let rl = EquationParams::new(p.alpha, p.beta, 0.0, p.epsilon, 0.0);
            if let Ok(r) = family_regime(FamilyTag::RosenauRlw, &rl, cs) {
                if r.label.is_region() && r.nearest_curve.signed_distance.abs() > 1e-9 {
                    prop_assert_eq!(Some(r.label), r.family_label);
                }
            }
        }

        #[test]
        fn nearest_distance_not_above_sampled_distance(a in -4.0..4.0f64, b in -4.0..4.0f64) {
            let n = nearest_curve(a, b);
            let mut best = f64::INFINITY;
            for i in 0..=4000 {
                let t = -20.0 + 40.0 * i as f64 / 4000.0;
                best = best.min(((t - b).powi(2) + (t * t / 4.0 - a).powi(2)).sqrt());
                best = best.min(((t - b).powi(2) + a * a).sqrt());
            }
            prop_assert!(n.signed_distance.abs() <= best + 1e-12);
            prop_assert!(n.signed_distance.abs() >= best - 0.02);
        }
    }
}
