//! Rate engine for cavity-modified vibrational kinetics.
//!
//! The crate chains four stages:
//!
//! 1. [`vibsolver`] — double-well vibrational eigenproblem on a sinc-DVR grid
//!    and diabatization into left/right well states.
//! 2. [`spectral`] — Fabry-Pérot dispersion and mode density, loss and phonon
//!    baths, and the effective cavity spectral density J_eff(ω) in closed,
//!    angular-integral, and brute-force normal-mode form.
//! 3. [`rates`] — golden-rule rate constants: Rabi splitting, polariton
//!    mixing, aligned/isotropic/explicit-angle variants, Gaussian-broadened
//!    convolution with its lossless and Markovian limits, effective barrier
//!    shifts, and the N-scaling total rate.
//! 4. [`kinetics`] — the four-state kinetic scheme used to validate the
//!    steady-state approximation behind the rate-constant bookkeeping.
//!
//! [`config`], [`sweep`], and [`output`] provide the TOML-configured parameter
//! sweeps and deterministic CSV emission behind the `vsc-rates` binary.

// Validations use negated comparisons (`!(x > 0.0)`) so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod kinetics;
pub mod numerics;
pub mod output;
pub mod rates;
pub mod spectral;
pub mod sweep;
pub mod units;
pub mod vibsolver;

pub use error::{EngineError, Result};
