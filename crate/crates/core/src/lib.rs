//! Solitary waves of Rosenau-type equations
//!
//! ```text
//! u_t + ε u_x + α u_xxt + η u_xxx + β u_xxxxt + γ u_xxxxx + (g(u))_x = 0
//! ```
//!
//! The crate classifies which kinds of travelling waves a parameter/speed pair
//! admits, computes solitary-wave profiles with the Petviashvili iteration on a
//! periodic Fourier grid, checks them against closed-form solutions and
//! propagates them in time.
//!
//! Everything here is pure computation over `alloc` containers; file formats and
//! the command line live in the companion `rosenau` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod classify;
pub mod error;
pub mod evolution;
mod fft;
pub mod params;
pub mod solver;
pub mod spectral;
pub mod validate;

pub use classify::{
    ab_coefficients, characteristic_roots, classify_region, coercivity_check,
    coercivity_thresholds, family_regime, mu_coordinates, Curve, RegimeCoefficients, RegimeLabel,
    RegimeReport, RootSet, ThresholdSet, WaveType,
};
pub use error::{Error, Result};
pub use params::{EquationParams, FamilyTag, NonlinearitySpec, ValidityReport};
pub use solver::{solve, Guess, SolveConfig, SolveResult};
pub use spectral::{Grid, SpectralField, SpectralSpace, SymbolTable};
pub use evolution::{evolve, EvolveConfig, Trajectory};
pub use validate::{
    conserved_quantities, decay_fit, exact_kawahara, exact_kdv, exact_rlw, symmetry_defect,
    DecayFit, ExactWave,
};

pub use num_complex::Complex64;
