//! Numerical toolkit for the adiabatic approximation.
//!
//! The crate simulates the Schrodinger evolution of small time-dependent
//! Hamiltonians H(s), s = t/T in [0, 1], prepared in the instantaneous ground
//! state, and compares the exact adiabatic error against rigorous a-priori
//! bounds. It provides:
//!
//! * [`linalg`] — dense Hermitian eigendecomposition, parallel-transport gauge
//!   fixing along the spectral curve, spectral norms, minimum gaps, and
//!   derivative-norm envelopes;
//! * [`models`] — the Hamiltonian families under study (projector-interpolation
//!   search, a precessing two-level field with a softening exponent, and
//!   generic linear interpolation), plus JSON configuration loading;
//! * [`propagator`] — exact evolution by spectral product steps (uniform or
//!   phase-equidistant schedules, with adaptive refinement) and an embedded
//!   Runge-Kutta integrator for cross-validation;
//! * [`pathsum`] — the jump expansion of the evolution operator: discretised
//!   path products, one- and two-jump amplitudes via oscillatory quadrature,
//!   stationary first-order terms, and phasor diagnostics;
//! * [`bounds`] — adiabatic timescales, remainder envelopes, two-sided error
//!   brackets around the first-order term, a comparison bound of the
//!   Jansen-Ruskai-Seiler type, and predicted cancellation times.
//!
//! All routines are deterministic: identical inputs produce bitwise identical
//! outputs.

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod models;
pub mod pathsum;
pub mod propagator;
pub mod quad;

pub use error::{Error, Result};
pub use num_complex::Complex64;
