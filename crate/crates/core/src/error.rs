use alloc::string::String;
use core::fmt;

use crate::params::FamilyTag;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Parameters violate `ε > 0` or `α² < 4β`.
    InvalidParams(String),
    /// A nonlinearity description is malformed (degree out of range, ...).
    InvalidNonlinearity(String),
    /// `β·cs − γ` vanishes, the profile equation loses its fourth-order term.
    DegenerateSpeed { cs: f64 },
    /// Coefficient pattern does not match the requested family.
    UnsupportedPattern { family: FamilyTag, reason: String },
    /// The grid size is not a power of two, or the half-length is not positive.
    InvalidGrid(String),
    /// The Petviashvili denominator vanishes (or changes sign) at wavenumber `k`.
    ResonantWavenumber { k: f64, symbol: f64 },
    /// The requested initial guess cannot be built for these coefficients.
    GuessUnavailable(String),
    /// Pairing `Σ ĝ·conj(φ̂)` is zero.
    ZeroDenominator,
    /// A quantity that must be real picked up a significant imaginary part.
    ComplexResidue { relative: f64 },
    /// No Petviashvili exponent was given and none can be inferred.
    ExponentRequired,
    /// Iteration stopped at `max_iter` without meeting the tolerance.
    NotConverged { iterations: usize, last_residual: f64 },
    /// Closed-form constraint failed (e.g. induced β breaks `α² < 4β`).
    ConstraintViolated(String),
    /// The nonlinearity has no polynomial primitive.
    NoPrimitive,
    /// Decay fit window contains no usable tail samples.
    TailBelowPrecision,
    /// `‖u‖∞` grew beyond the blow-up threshold during time stepping.
    BlowUp { time: f64, sup_norm: f64 },
    /// Time step violates the explicit stability bound.
    StepTooLarge { dt: f64, limit: f64 },
    /// Generic invalid argument.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid equation parameters: {msg}"),
            Error::InvalidNonlinearity(msg) => write!(f, "invalid nonlinearity: {msg}"),
            Error::DegenerateSpeed { cs } => {
                write!(f, "degenerate speed cs={cs}: beta*cs - gamma vanishes")
            }
            Error::UnsupportedPattern { family, reason } => {
                write!(f, "parameters do not match family {family:?}: {reason}")
            }
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::ResonantWavenumber { k, symbol } => {
                write!(f, "resonant wavenumber k={k} (symbol {symbol:e})")
            }
            Error::GuessUnavailable(msg) => write!(f, "initial guess unavailable: {msg}"),
            Error::ZeroDenominator => write!(f, "stabilizing factor denominator vanishes"),
            Error::ComplexResidue { relative } => {
                write!(f, "imaginary residue {relative:e} exceeds tolerance")
            }
            Error::ExponentRequired => {
                write!(f, "no default Petviashvili exponent for this nonlinearity; set nu")
            }
            Error::NotConverged { iterations, last_residual } => write!(
                f,
                "not converged after {iterations} iterations (residual {last_residual:e})"
            ),
            Error::ConstraintViolated(msg) => write!(f, "constraint violated: {msg}"),
            Error::NoPrimitive => write!(f, "nonlinearity has no polynomial primitive"),
            Error::TailBelowPrecision => write!(f, "tail below working precision in fit window"),
            Error::BlowUp { time, sup_norm } => {
                write!(f, "blow-up at t={time}: sup norm {sup_norm:e}")
            }
            Error::StepTooLarge { dt, limit } => {
                write!(f, "time step {dt} exceeds stability limit {limit}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
