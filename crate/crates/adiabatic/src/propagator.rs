//! Exact evolution engines for the scaled Schrodinger equation
//! d psi/ds = -i T H(s) psi on s in [0, 1].
//!
//! Two independent methods are provided: a spectral product of step
//! exponentials (exactly unitary per step, with uniform or phase-equidistant
//! schedules and adaptive refinement in the step count L) and an embedded
//! Dormand-Prince 5(4) Runge-Kutta integrator used for cross-validation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    eigh_core, spectrum_at, vdot, vnorm, GaugeField, Hamiltonian, GAP_REL_TOL,
};
use crate::models::Model;

/// Hard cap on the product-formula step count.
pub const STEP_CAP: usize = 1 << 26;

/// Absolute floor for the adaptive stopping rule, preventing endless
/// refinement when the true error is numerically zero.
const ERROR_FLOOR: f64 = 1e-12;

/// How the [0, 1] interval is partitioned into product steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    /// Equal steps in s.
    Uniform,
    /// Equal steps in the ground-state mixing angle phi (search model only).
    Phi,
}

/// A partition 0 = s_0 < s_1 < ... < s_L = 1 of the evolution interval.
#[derive(Clone, Debug)]
pub struct Schedule {
    /// Which rule generated the breakpoints.
    pub kind: ScheduleKind,
    /// The L + 1 breakpoints, endpoints included.
    pub breakpoints: Vec<f64>,
}

impl Schedule {
    /// Uniform partition into `l >= 1` steps.
    pub fn uniform(l: usize) -> Result<Schedule> {
        if l == 0 {
            return Err(Error::InvalidParameter("schedule needs at least 1 step".into()));
        }
        let breakpoints = (0..=l).map(|j| j as f64 / l as f64).collect();
        Ok(Schedule { kind: ScheduleKind::Uniform, breakpoints })
    }

    /// Number of steps L.
    pub fn len(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// True when the schedule has no steps (never produced by constructors).
    pub fn is_empty(&self) -> bool {
        self.breakpoints.len() < 2
    }
}

/// Partition [0, 1] so that the ground-state mixing angle phi advances by the
/// same amount on every step (search model only).
///
/// phi is strictly monotone with a closed-form inverse, so the breakpoints
/// s_j = phi^{-1}(j phi(1) / L) are exact up to one Newton polish; the
/// endpoints are pinned to 0 and 1 exactly.
pub fn phi_schedule(model: &Model, l: usize) -> Result<Schedule> {
    let analytics = model
        .analytics()
        .ok_or_else(|| Error::NoAnalytics(model.name().to_string()))?;
    if l == 0 {
        return Err(Error::InvalidParameter("schedule needs at least 1 step".into()));
    }
    let phi_end = analytics.phi(1.0);
    let mut breakpoints = Vec::with_capacity(l + 1);
    breakpoints.push(0.0);
    for j in 1..l {
        breakpoints.push(analytics.inv_phi(phi_end * j as f64 / l as f64));
    }
    breakpoints.push(1.0);
    Ok(Schedule { kind: ScheduleKind::Phi, breakpoints })
}

/// Build the schedule of the requested kind for this model.
pub fn schedule_for(model: &Model, kind: ScheduleKind, l: usize) -> Result<Schedule> {
    match kind {
        ScheduleKind::Uniform => Schedule::uniform(l),
        ScheduleKind::Phi => phi_schedule(model, l),
    }
}

/// Which engine produced an [`EvolutionResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Fixed-schedule spectral product.
    Product,
    /// Spectral product with adaptive step doubling.
    AdaptiveProduct,
    /// Embedded Runge-Kutta 5(4).
    RungeKutta,
}

impl Method {
    /// Stable lowercase name.
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Product => "product",
            Method::AdaptiveProduct => "adaptive_product",
            Method::RungeKutta => "runge_kutta",
        }
    }
}

/// Outcome of one evolution run.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    /// State at s = 1 (unit norm up to the reported drift).
    pub final_state: Vec<Complex64>,
    /// Step count actually used (product) or accepted steps (Runge-Kutta).
    pub l_used: usize,
    /// Adiabatic error || (1 - P_G(1)) psi(1) ||.
    pub error: f64,
    /// Engine that produced the result.
    pub method: Method,
    /// | ||psi(1)|| - 1 | before any renormalisation.
    pub norm_drift: f64,
}

/// Instantaneous ground state at s = 0, the canonical initial condition.
pub fn initial_ground<H: Hamiltonian + ?Sized>(model: &H) -> Result<Vec<Complex64>> {
    let sp = spectrum_at(model, 0.0)?;
    ensure_ground_isolated(&sp)?;
    Ok(sp.eigenvectors[0].clone())
}

fn ensure_ground_isolated(sp: &crate::linalg::Spectrum) -> Result<()> {
    if sp.dim() < 2 {
        return Ok(());
    }
    let gap = sp.eigenvalues[1] - sp.eigenvalues[0];
    let scale = sp.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);
    if gap <= GAP_REL_TOL * scale {
        return Err(Error::DegenerateGroundState { s: sp.s, gap });
    }
    Ok(())
}

/// Adiabatic error of a state against the ground state at s = 1,
/// || (1 - P_G(1)) psi || / || psi ||.
fn ground_error<H: Hamiltonian + ?Sized>(model: &H, psi: &[Complex64]) -> Result<f64> {
    let sp = spectrum_at(model, 1.0)?;
    ensure_ground_isolated(&sp)?;
    let norm = vnorm(psi);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let overlap = vdot(sp.ground(), psi).norm() / norm;
    Ok((1.0 - overlap * overlap).max(0.0).sqrt().min(1.0))
}

/// Adiabatic error of a finished evolution, independent of global phases.
pub fn adiabatic_error<H: Hamiltonian + ?Sized>(
    result: &EvolutionResult,
    model: &H,
) -> Result<f64> {
    ground_error(model, &result.final_state)
}

/// Evolve by the spectral product of step exponentials over a schedule:
/// psi <- prod_j exp(-i H(s_j) T (s_j - s_{j-1})) psi, right-endpoint rule.
pub fn evolve_product<H: Hamiltonian + ?Sized>(
    model: &H,
    t: f64,
    schedule: &Schedule,
) -> Result<EvolutionResult> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty schedule".into()));
    }
    let mut psi = initial_ground(model)?;
    let n = psi.len();
    let bp = &schedule.breakpoints;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for j in 1..bp.len() {
        let delta = bp[j] - bp[j - 1];
        let h = model.evaluate(bp[j]);
        let (vals, vecs) = eigh_core(&h, true)?;
        let vecs = vecs.expect("vectors requested");
        for o in out.iter_mut() {
            *o = Complex64::new(0.0, 0.0);
        }
        for (e, v) in vals.iter().zip(&vecs) {
            let amp = vdot(v, &psi) * Complex64::from_polar(1.0, -t * e * delta);
            for (o, vi) in out.iter_mut().zip(v) {
                *o += vi * amp;
            }
        }
        std::mem::swap(&mut psi, &mut out);
    }
    let norm_drift = (vnorm(&psi) - 1.0).abs();
    let error = ground_error(model, &psi)?;
    Ok(EvolutionResult {
        final_state: psi,
        l_used: schedule.len(),
        error,
        method: Method::Product,
        norm_drift,
    })
}

/// Spectral product evolution with adaptive refinement of the step count.
///
/// Starts at L0 = max(64, ceil(8 T ||H||_max)), which resolves the fastest
/// dynamical phase, then doubles L until the computed error changes by no
/// more than `rel_tol` relative (with an absolute floor of 1e-12), returning
/// the result of the finer run. An error already at the floor after the first
/// run terminates immediately at L0.
pub fn evolve_adaptive(
    model: &Model,
    t: f64,
    rel_tol: f64,
    kind: ScheduleKind,
) -> Result<EvolutionResult> {
    if !(rel_tol > 0.0 && rel_tol <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol must lie in (0, 0.5], got {rel_tol}"
        )));
    }
    let hmax = model.norm_estimate()?;
    let l0_real = (8.0 * t * hmax).ceil().max(64.0);
    if l0_real > STEP_CAP as f64 {
        return Err(Error::BudgetExceeded { requested: l0_real as usize, cap: STEP_CAP });
    }
    let mut l = l0_real as usize;
    let mut prev = evolve_product(model, t, &schedule_for(model, kind, l)?)?;
    prev.method = Method::AdaptiveProduct;
    if prev.error <= ERROR_FLOOR {
        return Ok(prev);
    }
    loop {
        let l2 = l.checked_mul(2).filter(|&v| v <= STEP_CAP).ok_or(
            Error::BudgetExceeded { requested: l.saturating_mul(2), cap: STEP_CAP },
        )?;
        let mut cur = evolve_product(model, t, &schedule_for(model, kind, l2)?)?;
        cur.method = Method::AdaptiveProduct;
        if (cur.error - prev.error).abs() <= rel_tol * cur.error.max(ERROR_FLOOR) {
            return Ok(cur);
        }
        prev = cur;
        l = l2;
    }
}

/// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [&[f64]; 6] = [
    &[0.2],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Embedded Runge-Kutta 5(4) evolution from an explicit initial state.
///
/// Per-step absolute error is kept at or below `tol`; the final state is
/// renormalised, with the pre-normalisation drift reported.
pub fn evolve_rk_from<H: Hamiltonian + ?Sized>(
    model: &H,
    t: f64,
    tol: f64,
    psi0: &[Complex64],
) -> Result<EvolutionResult> {
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "RK tolerance must be finite and nonnegative, got {tol}"
        )));
    }
    if psi0.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: psi0.len() });
    }
    let n = model.dim();
    let minus_it = Complex64::new(0.0, -t);
    let deriv = |s: f64, psi: &[Complex64]| -> Vec<Complex64> {
        let mut v = model.evaluate(s).matvec(psi);
        for x in v.iter_mut() {
            *x *= minus_it;
        }
        v
    };

    let hmax_norm = model.norm_estimate()?;
    let mut h = (0.5 / (1.0 + t * hmax_norm)).min(1e-2);
    let mut s = 0.0;
    let mut psi = psi0.to_vec();
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    k[0] = deriv(0.0, &psi);
    let mut accepted = 0usize;
    let mut stage = vec![Complex64::new(0.0, 0.0); n];

    while s < 1.0 - 1e-15 {
        h = h.min(1.0 - s);
        if h < 1e-14 {
            return Err(Error::StepUnderflow { s, step: h });
        }
        // Stages 2..7 (k[6] is the FSAL stage at the 5th-order solution).
        for i in 0..6 {
            for (x, p) in stage.iter_mut().zip(&psi) {
                *x = *p;
            }
            for (j, &a) in DP_A[i].iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (x, kj) in stage.iter_mut().zip(&k[j]) {
                    *x += *kj * (a * h);
                }
            }
            k[i + 1] = deriv(s + DP_C[i] * h, &stage);
        }
        // 5th-order solution is the last stage vector; error via b5 - b4.
        let mut err2 = 0.0;
        for idx in 0..n {
            let mut e = Complex64::new(0.0, 0.0);
            for j in 0..7 {
                let b5 = if j < 6 { DP_A[5][j] } else { 0.0 };
                let diff = b5 - DP_B4[j];
                if diff != 0.0 {
                    e += k[j][idx] * diff;
                }
            }
            err2 += (e * h).norm_sqr();
        }
        let err = err2.sqrt();
        if err <= tol {
            s += h;
            psi.copy_from_slice(&stage);
            k.swap(0, 6); // FSAL: last derivative becomes the next first stage
            accepted += 1;
        }
        let factor = if err > 0.0 {
            (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).min(0.5);
    }

    let norm = vnorm(&psi);
    let norm_drift = (norm - 1.0).abs();
    if norm > 0.0 {
        for x in psi.iter_mut() {
            *x /= norm;
        }
    }
    let error = ground_error(model, &psi)?;
    Ok(EvolutionResult {
        final_state: psi,
        l_used: accepted,
        error,
        method: Method::RungeKutta,
        norm_drift,
    })
}

/// Embedded Runge-Kutta 5(4) evolution from the instantaneous ground state.
pub fn evolve_rk<H: Hamiltonian + ?Sized>(
    model: &H,
    t: f64,
    tol: f64,
) -> Result<EvolutionResult> {
    let psi0 = initial_ground(model)?;
    evolve_rk_from(model, t, tol, &psi0)
}

/// Level amplitudes of a final state in the transported frame at s = 1,
/// with the dynamical phases exp(-i T int_0^1 E_nu) stripped.
///
/// Component nu of the result is exp(+i T int E_nu) <nu(1)|psi> for excited
/// levels; the ground component (index 0) is zero by definition, so the
/// Euclidean norm of the vector equals the adiabatic error of `final_state`.
/// Sharing the transported gauge makes the vector directly comparable with
/// first-order and jump-contribution coefficient vectors.
pub fn error_vector(t: f64, final_state: &[Complex64], field: &GaugeField) -> Vec<Complex64> {
    let last = field.steps();
    let sp = field.spectrum(last);
    let n = sp.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for nu in 1..n {
        let overlap = vdot(&sp.eigenvectors[nu], final_state);
        let phase = Complex64::from_polar(1.0, t * field.cumulative_energy(nu, last));
        out[nu] = overlap * phase;
    }
    out
}
