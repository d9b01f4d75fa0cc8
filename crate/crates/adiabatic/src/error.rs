//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
///
/// Numerical routines never panic on user input; every anticipated failure is
/// reported through one of these variants so callers (and the CLI) can map
/// them to diagnostics and exit codes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The input matrix is not Hermitian within the documented tolerance.
    #[error("matrix is not Hermitian: max |M - M^dagger| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NonHermitian { deviation: f64, tolerance: f64 },

    /// The iterative eigensolver failed to converge.
    #[error("eigensolver failed to converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    /// Gauge transport could not match an eigenvector across a step.
    #[error("gauge transport is ambiguous at s = {s}: best overlap {overlap:.3e} below 0.5 for level {level}")]
    AmbiguousMatching { s: f64, level: usize, overlap: f64 },

    /// The ground state is degenerate (or crosses another level) at some s.
    #[error("ground state is degenerate at s = {s}: gap {gap:.3e} below tolerance")]
    DegenerateGroundState { s: f64, gap: f64 },

    /// Numerical differentiation could not produce a usable step size.
    #[error("numerical differentiation failed: step size {step:.3e} too small")]
    DifferentiationFailure { step: f64 },

    /// Two operands have incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The model name in a configuration is not recognised.
    #[error("unknown model '{0}'")]
    UnknownModel(String),

    /// A configuration document could not be parsed.
    #[error("parse error: {0}")]
    ParseError(String),

    /// A parameter value is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested operation needs closed-form analytics the model lacks.
    #[error("model '{0}' has no closed-form analytics for this operation")]
    NoAnalytics(String),

    /// An adaptive refinement loop hit its step-count cap.
    #[error("refinement budget exceeded: {requested} steps exceed cap {cap}")]
    BudgetExceeded { requested: usize, cap: usize },

    /// The adaptive integrator drove the step size below the representable floor.
    #[error("step size underflow at s = {s}: step {step:.3e}")]
    StepUnderflow { s: f64, step: f64 },

    /// A jump time does not lie on the requested discretisation grid.
    #[error("jump time {time} is not a multiple of 1/{grid} within tolerance")]
    TimesNotOnGrid { time: f64, grid: usize },

    /// The oscillatory quadrature hit its panel budget before converging.
    #[error("quadrature budget exceeded: {panels} panels exceed cap {cap}")]
    QuadratureBudget { panels: usize, cap: usize },

    /// The operation's structural preconditions do not hold for this model.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A jump path fails its structural invariants.
    #[error("invalid path: {0}")]
    InvalidPath(String),
}
