//! Equation coefficients, nonlinearities and the global admissibility checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Coefficients of
/// `u_t + ε u_x + α u_xxt + η u_xxx + β u_xxxxt + γ u_xxxxx + (g(u))_x = 0`.
///
/// Construction does not validate; call [`validate_params`] (or
/// [`EquationParams::checked`]) to enforce `ε > 0` and `α² < 4β`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquationParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub eta: f64,
}

impl EquationParams {
    pub const fn new(alpha: f64, beta: f64, gamma: f64, epsilon: f64, eta: f64) -> Self {
        Self { alpha, beta, gamma, epsilon, eta }
    }

    /// Builds the parameters and rejects them unless they pass [`validate_params`].
    pub fn checked(alpha: f64, beta: f64, gamma: f64, epsilon: f64, eta: f64) -> Result<Self> {
        let params = Self::new(alpha, beta, gamma, epsilon, eta);
        params.ensure_valid()?;
        Ok(params)
    }

    /// Builds parameters for a named family, enforcing its zero-coefficient
    /// pattern as well as the admissibility conditions.
    pub fn for_family(
        family: FamilyTag,
        alpha: f64,
        beta: f64,
        gamma: f64,
        epsilon: f64,
        eta: f64,
    ) -> Result<Self> {
        let params = Self::checked(alpha, beta, gamma, epsilon, eta)?;
        family.check(&params)?;
        Ok(params)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_params(self);
        if report.ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(report.violations.join("; ")))
        }
    }

    /// `P(x) = 1 − αx + βx²`, the symbol of `1 + α∂² + β∂⁴` at `x = k²`.
    pub fn mass_polynomial(&self, x: f64) -> f64 {
        1.0 - self.alpha * x + self.beta * x * x
    }
}

/// Result of [`validate_params`]: the flag plus one message per failed condition.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidityReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

pub fn validate_params(params: &EquationParams) -> ValidityReport {
    let mut violations = Vec::new();
    let all = [params.alpha, params.beta, params.gamma, params.epsilon, params.eta];
    if all.iter().any(|v| !v.is_finite()) {
        violations.push(String::from("all coefficients must be finite"));
    }
    if !(params.epsilon > 0.0) {
        violations.push(format!("epsilon > 0 required (epsilon = {})", params.epsilon));
    }
    if !(params.beta > 0.0) {
        violations.push(format!("beta > 0 required (beta = {})", params.beta));
    }
    let disc = params.alpha * params.alpha;
    if !(disc < 4.0 * params.beta) {
        violations.push(format!(
            "alpha^2 < 4 beta required (alpha^2 = {}, 4 beta = {})",
            disc,
            4.0 * params.beta
        ));
    }
    ValidityReport { ok: violations.is_empty(), violations }
}

/// The nonlinear flux `g`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum NonlinearitySpec {
    /// `g(u) = u^{p+1}/(p+1)`.
    SinglePower { p: u32 },
    /// `g(u) = u³/3 + r·u⁵/5`.
    CubicQuintic { r: f64 },
    /// `g(u) = Σ c·u^d` over `(c, d)` pairs with `d ≥ 2`.
    PowerSum { terms: Vec<(f64, u32)> },
    /// `g = A·u²/2 + B·u^{m+1}/(m+1) + s·(u_x²/2 + u·u_xx)`.
    DerivativeForm { a: f64, b: f64, m: u32, s: f64 },
}

impl NonlinearitySpec {
    pub const QUADRATIC: NonlinearitySpec = NonlinearitySpec::SinglePower { p: 1 };

    pub fn validate(&self) -> Result<()> {
        match self {
            NonlinearitySpec::SinglePower { p } if *p < 1 => {
                Err(Error::InvalidNonlinearity(format!("single power needs p >= 1, got {p}")))
            }
            NonlinearitySpec::CubicQuintic { r } if !r.is_finite() => {
                Err(Error::InvalidNonlinearity(String::from("r must be finite")))
            }
            NonlinearitySpec::PowerSum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidNonlinearity(String::from("empty power sum")));
                }
                for (c, d) in terms {
                    if *d < 2 || !c.is_finite() {
                        return Err(Error::InvalidNonlinearity(format!(
                            "power-sum term ({c}, {d}) needs finite coefficient and degree >= 2"
                        )));
                    }
                }
                Ok(())
            }
            NonlinearitySpec::DerivativeForm { a, b, m, s } => {
                if *m < 1 {
                    return Err(Error::InvalidNonlinearity(format!("m >= 1 required, got {m}")));
                }
                if ![*a, *b, *s].iter().all(|v| v.is_finite()) {
                    return Err(Error::InvalidNonlinearity(String::from(
                        "coefficients must be finite",
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// True when `g` depends on `u_x` or `u_xx`.
    pub fn uses_derivatives(&self) -> bool {
        matches!(self, NonlinearitySpec::DerivativeForm { s, .. } if *s != 0.0)
    }

    /// Degree of homogeneity `q` of the primitive `G`, when `G` is homogeneous.
    pub fn homogeneity_degree(&self) -> Option<u32> {
        homogeneity_degree(self)
    }

    /// Lowest polynomial degree of `g` among its nonzero terms.
    pub fn lowest_degree(&self) -> u32 {
        match self {
            NonlinearitySpec::SinglePower { p } => p + 1,
            NonlinearitySpec::CubicQuintic { .. } => 3,
            NonlinearitySpec::PowerSum { terms } => terms
                .iter()
                .filter(|(c, _)| *c != 0.0)
                .map(|(_, d)| *d)
                .min()
                .unwrap_or_else(|| terms.iter().map(|(_, d)| *d).min().unwrap_or(2)),
            NonlinearitySpec::DerivativeForm { a, b, m, s } => {
                if *a != 0.0 || *s != 0.0 || *b == 0.0 {
                    2
                } else {
                    m + 1
                }
            }
        }
    }

    /// Default Petviashvili exponent `ν = d/(d−1)` from the lowest degree `d` of `g`.
    ///
    /// `None` for [`NonlinearitySpec::DerivativeForm`]: the exponent must be given.
    pub fn default_exponent(&self) -> Option<f64> {
        match self {
            NonlinearitySpec::DerivativeForm { .. } => None,
            _ => {
                let d = self.lowest_degree() as f64;
                Some(d / (d - 1.0))
            }
        }
    }

    /// Evaluates `g` at a point; derivative arguments are ignored unless the
    /// nonlinearity depends on them.
    pub fn eval(&self, u: f64, ux: f64, uxx: f64) -> f64 {
        eval_nonlinearity(self, u, ux, uxx)
    }

    /// `∂g/∂u` for the pure-`u` part (derivative terms enter through `s·u_xx`).
    pub fn eval_du(&self, u: f64, uxx: f64) -> f64 {
        match self {
            NonlinearitySpec::SinglePower { p } => u.powi(*p as i32),
            NonlinearitySpec::CubicQuintic { r } => u * u + r * u.powi(4),
            NonlinearitySpec::PowerSum { terms } => terms
                .iter()
                .map(|(c, d)| c * (*d as f64) * u.powi(*d as i32 - 1))
                .sum(),
            NonlinearitySpec::DerivativeForm { a, b, m, s } => {
                a * u + b * u.powi(*m as i32) + s * uxx
            }
        }
    }

    /// Primitive `G` with `G' = g` and `G(0) = 0`; `None` for derivative forms.
    pub fn primitive(&self, u: f64) -> Option<f64> {
        match self {
            NonlinearitySpec::SinglePower { p } => {
                let q = *p as f64 + 2.0;
                Some(u.powi(*p as i32 + 2) / (q * (q - 1.0)))
            }
            NonlinearitySpec::CubicQuintic { r } => Some(u.powi(4) / 12.0 + r * u.powi(6) / 30.0),
            NonlinearitySpec::PowerSum { terms } => Some(
                terms
                    .iter()
                    .map(|(c, d)| c * u.powi(*d as i32 + 1) / (*d as f64 + 1.0))
                    .sum(),
            ),
            NonlinearitySpec::DerivativeForm { .. } => None,
        }
    }
}

pub fn eval_nonlinearity(spec: &NonlinearitySpec, u: f64, ux: f64, uxx: f64) -> f64 {
    match spec {
        NonlinearitySpec::SinglePower { p } => u.powi(*p as i32 + 1) / (*p as f64 + 1.0),
        NonlinearitySpec::CubicQuintic { r } => {
            let u3 = u * u * u;
            u3 / 3.0 + r * u3 * u * u / 5.0
        }
        NonlinearitySpec::PowerSum { terms } => {
            terms.iter().map(|(c, d)| c * u.powi(*d as i32)).sum()
        }
        NonlinearitySpec::DerivativeForm { a, b, m, s } => {
            a * u * u / 2.0
                + b * u.powi(*m as i32 + 1) / (*m as f64 + 1.0)
                + s * (ux * ux / 2.0 + u * uxx)
        }
    }
}

/// Degree `q` of the primitive `G`: `p + 2` for a single power, `None` otherwise.
pub fn homogeneity_degree(spec: &NonlinearitySpec) -> Option<u32> {
    match spec {
        NonlinearitySpec::SinglePower { p } => Some(p + 2),
        NonlinearitySpec::PowerSum { terms } => {
            let mut degrees = terms.iter().filter(|(c, _)| *c != 0.0).map(|(_, d)| *d);
            let first = degrees.next()?;
            degrees.all(|d| d == first).then_some(first + 1)
        }
        _ => None,
    }
}

/// Members of the Rosenau family with their coefficient patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FamilyTag {
    /// `α = η = γ = 0`.
    Rosenau,
    /// `η = γ = 0`.
    RosenauRlw,
    /// `α = γ = 0`.
    RosenauKdv,
    /// `α = 0`.
    RosenauKawahara,
    /// No zero pattern; the regime analysis covers `α = γ = −1, ε = β = 1, η > 0`.
    RosenauRlwKawahara,
    Generic,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 6] = [
        FamilyTag::Rosenau,
        FamilyTag::RosenauRlw,
        FamilyTag::RosenauKdv,
        FamilyTag::RosenauKawahara,
        FamilyTag::RosenauRlwKawahara,
        FamilyTag::Generic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyTag::Rosenau => "rosenau",
            FamilyTag::RosenauRlw => "rosenau-rlw",
            FamilyTag::RosenauKdv => "rosenau-kdv",
            FamilyTag::RosenauKawahara => "rosenau-kawahara",
            FamilyTag::RosenauRlwKawahara => "rosenau-rlw-kawahara",
            FamilyTag::Generic => "generic",
        }
    }

    pub fn from_name(name: &str) -> Option<FamilyTag> {
        FamilyTag::ALL.into_iter().find(|t| t.name() == name)
    }

    /// Checks the zero-coefficient pattern of the family.
    pub fn check(&self, params: &EquationParams) -> Result<()> {
        let zero: &[(&str, f64)] = match self {
            FamilyTag::Rosenau => &[
                ("alpha", params.alpha),
                ("eta", params.eta),
                ("gamma", params.gamma),
            ],
            FamilyTag::RosenauRlw => &[("eta", params.eta), ("gamma", params.gamma)],
            FamilyTag::RosenauKdv => &[("alpha", params.alpha), ("gamma", params.gamma)],
            FamilyTag::RosenauKawahara => &[("alpha", params.alpha)],
            FamilyTag::RosenauRlwKawahara | FamilyTag::Generic => &[],
        };
        let nonzero: Vec<&str> = zero.iter().filter(|(_, v)| *v != 0.0).map(|(n, _)| *n).collect();
        if nonzero.is_empty() {
            Ok(())
        } else {
            Err(Error::UnsupportedPattern {
                family: *self,
                reason: format!("{} must vanish", nonzero.join(", ")),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn standard_rlw_parameters_are_admissible() {
        let report = validate_params(&EquationParams::new(-1.0, 1.0, 0.0, 1.0, 0.0));
        assert!(report.ok, "{:?}", report.violations);
    }

    #[test]
    fn boundary_alpha_squared_equal_four_beta_rejected() {
        let report = validate_params(&EquationParams::new(2.0, 1.0, 0.0, 1.0, 0.0));
        assert!(!report.ok);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("alpha^2 < 4 beta"));
    }

    #[test]
    fn kawahara_limit_beta_zero_rejected() {
        let report = validate_params(&EquationParams::new(0.0, 0.0, 0.0, 1.0, 0.0));
        assert!(!report.ok);
        assert!(report.violations.iter().any(|v| v.contains("beta > 0")));
        assert!(report.violations.iter().any(|v| v.contains("alpha^2 < 4 beta")));
    }

    #[test]
    fn nonpositive_epsilon_named() {
        let report = validate_params(&EquationParams::new(0.0, 1.0, 0.0, 0.0, 0.0));
        assert!(!report.ok);
        assert!(report.violations[0].contains("epsilon"));
    }

    #[test]
    fn nonlinearity_examples() {
        assert_eq!(eval_nonlinearity(&NonlinearitySpec::QUADRATIC, 2.0, 0.0, 0.0), 2.0);
        let cq = NonlinearitySpec::CubicQuintic { r: 1.0 };
        assert_abs_diff_eq!(cq.eval(1.0, 0.0, 0.0), 8.0 / 15.0, epsilon = 1e-15);
        let df = NonlinearitySpec::DerivativeForm { a: 2.0, b: 0.0, m: 1, s: 1.0 };
        assert_abs_diff_eq!(df.eval(1.0, 2.0, 3.0), 6.0, epsilon = 1e-15);
        // derivative arguments ignored for pure powers
        assert_eq!(NonlinearitySpec::QUADRATIC.eval(2.0, 7.0, -3.0), 2.0);
    }

    #[test]
    fn homogeneity_examples() {
        assert_eq!(homogeneity_degree(&NonlinearitySpec::SinglePower { p: 1 }), Some(3));
        assert_eq!(homogeneity_degree(&NonlinearitySpec::SinglePower { p: 3 }), Some(5));
        let cq = NonlinearitySpec::CubicQuintic { r: 0.5 };
        assert_eq!(homogeneity_degree(&cq), None);
        assert_eq!(cq.lowest_degree(), 3);
        let single = NonlinearitySpec::PowerSum { terms: alloc::vec![(2.0, 4)] };
        assert_eq!(homogeneity_degree(&single), Some(5));
    }

    #[test]
    fn default_exponents() {
        assert_eq!(NonlinearitySpec::QUADRATIC.default_exponent(), Some(2.0));
        assert_eq!(NonlinearitySpec::SinglePower { p: 2 }.default_exponent(), Some(1.5));
        assert_eq!(NonlinearitySpec::CubicQuintic { r: 1.0 }.default_exponent(), Some(1.5));
        let df = NonlinearitySpec::DerivativeForm { a: 1.0, b: 0.0, m: 1, s: 1.0 };
        assert_eq!(df.default_exponent(), None);
    }

    #[test]
    fn invalid_nonlinearities() {
        assert!(NonlinearitySpec::SinglePower { p: 0 }.validate().is_err());
        assert!(NonlinearitySpec::PowerSum { terms: alloc::vec![(1.0, 1)] }.validate().is_err());
        assert!(NonlinearitySpec::PowerSum { terms: alloc::vec![] }.validate().is_err());
        let df = NonlinearitySpec::DerivativeForm { a: 1.0, b: 1.0, m: 0, s: 0.0 };
        assert!(df.validate().is_err());
    }

    #[test]
    fn family_patterns() {
        assert!(EquationParams::for_family(FamilyTag::RosenauKdv, 0.0, 1.0, 0.0, 1.0, 1.0).is_ok());
        let err = EquationParams::for_family(FamilyTag::RosenauKdv, 0.5, 1.0, 0.0, 1.0, 1.0);
        assert!(matches!(err, Err(Error::UnsupportedPattern { .. })));
        let err = EquationParams::for_family(FamilyTag::Rosenau, 0.0, 1.0, 0.0, 1.0, 1.0);
        assert!(matches!(err, Err(Error::UnsupportedPattern { .. })));
        assert!(EquationParams::for_family(FamilyTag::Generic, 1.0, 1.0, 3.0, 1.0, -2.0).is_ok());
        for tag in FamilyTag::ALL {
            assert_eq!(FamilyTag::from_name(tag.name()), Some(tag));
        }
    }

    #[test]
    fn primitive_is_antiderivative() {
        let specs = [
            NonlinearitySpec::SinglePower { p: 1 },
            NonlinearitySpec::SinglePower { p: 4 },
            NonlinearitySpec::CubicQuintic { r: -0.7 },
            NonlinearitySpec::PowerSum { terms: alloc::vec![(1.0, 2), (-0.5, 3)] },
        ];
        for spec in &specs {
            for &u in &[-1.3, -0.2, 0.4, 1.1] {
                let h = 1e-5;
                let fd = (spec.primitive(u + h).unwrap() - spec.primitive(u - h).unwrap()) / (2.0 * h);
                assert_abs_diff_eq!(fd, spec.eval(u, 0.0, 0.0), epsilon = 1e-8);
            }
            assert_eq!(spec.primitive(0.0), Some(0.0));
        }
    }

    fn any_spec() -> impl Strategy<Value = NonlinearitySpec> {
        prop_oneof![
            (1u32..6).prop_map(|p| NonlinearitySpec::SinglePower { p }),
            (-2.0..2.0f64).prop_map(|r| NonlinearitySpec::CubicQuintic { r }),
            proptest::collection::vec((-2.0..2.0f64, 2u32..6), 1..4)
                .prop_map(|terms| NonlinearitySpec::PowerSum { terms }),
            (-2.0..2.0f64, -2.0..2.0f64, 1u32..5, -2.0..2.0f64)
                .prop_map(|(a, b, m, s)| NonlinearitySpec::DerivativeForm { a, b, m, s }),
        ]
    }

    proptest! {
        #[test]
        fn g_vanishes_at_origin(spec in any_spec()) {
            prop_assert_eq!(spec.eval(0.0, 0.0, 0.0), 0.0);
        }

        #[test]
        fn single_power_parity(p in 1u32..7, u in -3.0..3.0f64) {
            let spec = NonlinearitySpec::SinglePower { p };
            let sign = if (p + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = spec.eval(-u, 0.0, 0.0);
            let rhs = sign * spec.eval(u, 0.0, 0.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }

        #[test]
        fn accepted_params_have_positive_mass_polynomial(
            alpha in -5.0..5.0f64, beta in 0.0..10.0f64, eps in 0.01..5.0f64, x in 0.0..1e3f64
        ) {
            let params = EquationParams::new(alpha, beta, 0.0, eps, 0.0);
            if validate_params(&params).ok {
                prop_assert!(params.mass_polynomial(x) > 0.0);
            }
        }
    }
}
