//! Closed-form rigorous bounds on the adiabatic error: characteristic
//! timescales, the path-sum growth factor, remainders at second and third
//! order, upper/lower bounds around the first-order term, an effective
//! two-level variant, a Jansen–Ruskai–Seiler-type comparison bound, and the
//! cancellation times at which the leading term vanishes.
//!
//! All formulas are polynomial or exponential in the derivative sup-norms
//! h1 = sup‖H'‖, h2 = sup‖H''‖, h3 = sup‖H'''‖ and the minimum ground gap,
//! so they evaluate in closed form once the norms are known.

use crate::error::{Error, Result};
use crate::linalg::{
    default_grid, derivative_norms, eigenvalues_only, spectral_norm, DerivativeNorms,
    Hamiltonian,
};
use crate::models::Model;
use crate::pathsum::first_order_term;
use crate::quad::{adaptive_simpson, composite_simpson};

/// Characteristic timescales (Delta0, Delta1) of the evolution.
///
/// Delta1 = (1/gamma)(h3/gamma + h2^3/gamma^3 + h1^6/gamma^6) collects the
/// intrinsic derivative scales; Delta0 = h1/min_gap^2 + Delta1/(gamma T)
/// adds the first-order envelope against `min_all_gap`, the smallest gap
/// between the ground level and any other level over the interval.
/// Requires gamma_min > 0 and T > 0.
pub fn timescales(norms: &DerivativeNorms, min_all_gap: f64, t: f64) -> (f64, f64) {
    let g = norms.gamma_min;
    let delta1 = (norms.h3 / g + norms.h2.powi(3) / g.powi(3) + norms.h1.powi(6) / g.powi(6)) / g;
    let delta0 = norms.h1 / (min_all_gap * min_all_gap) + delta1 / (g * t);
    (delta0, delta1)
}

/// Growth factor Gamma = 2 h1^2/gamma^2 + h1 h2/gamma^2 + 6 h1^3/gamma^3
/// controlling the tail of the jump expansion. Requires gamma_min > 0.
pub fn gamma_factor(norms: &DerivativeNorms) -> f64 {
    let g = norms.gamma_min;
    (2.0 * norms.h1 * norms.h1 + norms.h1 * norms.h2) / (g * g)
        + 6.0 * norms.h1.powi(3) / g.powi(3)
}

/// Tail of the jump expansion over three or more jumps:
/// (1 + Gamma/(h1 T)) (e^{Gamma/(gamma T)} - 1) - Gamma/(gamma T),
/// with a series fallback for small arguments to avoid cancellation.
/// Requires T > 0 and either h1 > 0 or Gamma = 0 (the latter yields 0).
pub fn tail_bound(gamma_factor: f64, norms: &DerivativeNorms, t: f64) -> f64 {
    if gamma_factor == 0.0 {
        return 0.0;
    }
    let c = gamma_factor / (norms.h1 * t);
    let x = gamma_factor / (norms.gamma_min * t);
    if x < 1e-8 {
        // (1+c)(e^x - 1) - x = c x + (1+c)(x^2/2 + x^3/6 + x^4/24 + ...).
        c * x + (1.0 + c) * (x * x / 2.0 + x.powi(3) / 6.0 + x.powi(4) / 24.0)
    } else {
        (1.0 + c) * x.exp_m1() - x
    }
}

/// Polynomial part of the second-order remainder:
/// (2h2+h3)/g^3 + (25 h1 h2 + 16 h1^2 + h2^2)/g^4
/// + (12 h2 h1^2 + 118 h1^3)/g^5 + 36 h1^4/g^6.
pub fn remainder_polynomial(norms: &DerivativeNorms) -> f64 {
    let (h1, h2, h3, g) = (norms.h1, norms.h2, norms.h3, norms.gamma_min);
    (2.0 * h2 + h3) / g.powi(3)
        + (25.0 * h1 * h2 + 16.0 * h1 * h1 + h2 * h2) / g.powi(4)
        + (12.0 * h2 * h1 * h1 + 118.0 * h1.powi(3)) / g.powi(5)
        + 36.0 * h1.powi(4) / g.powi(6)
}

/// Full remainder R such that |error - leading| <= R/T^2: the polynomial
/// part plus T^2 times the exponential tail. Requires gamma_min > 0, T > 0.
pub fn remainder_r(norms: &DerivativeNorms, t: f64) -> f64 {
    remainder_polynomial(norms) + t * t * tail_bound(gamma_factor(norms), norms, t)
}

/// Low-order remainders: the third-order remainder R0 and the closed-form
/// bound on the second jump contribution, both carrying the 1/T^2 decay.
/// Requires gamma_min > 0 and T > 0.
pub fn low_order_remainders(norms: &DerivativeNorms, t: f64) -> (f64, f64) {
    let (h1, h2, h3, g) = (norms.h1, norms.h2, norms.h3, norms.gamma_min);
    let r0 = ((2.0 * h2 + h3) / g.powi(3)
        + (20.0 * h1 * h2 + 12.0 * h1 * h1) / g.powi(4)
        + 88.0 * h1.powi(3) / g.powi(5))
        / (t * t);
    let c2 = ((h2 * h2 + 4.0 * h1 * h1 + 5.0 * h1 * h2) / g.powi(4)
        + (12.0 * h2 * h1 * h1 + 30.0 * h1.powi(3)) / g.powi(5)
        + 36.0 * h1.powi(4) / g.powi(6))
        / (t * t);
    (r0, c2)
}

/// Closed-form bounds on the derivatives of the tunneling amplitudes:
/// sup|dbeta/ds| <= 4 h1^2/g^2 + h2/g, sup|d^2beta/ds^2| <= 44 h1^3/g^3 +
/// 12 h1 h2/g^2 + h3/g, and the gap curvature |gamma''| <= 2 h2 + 8 h1^2/g.
/// Requires gamma_min > 0.
pub fn beta_derivative_bounds(norms: &DerivativeNorms) -> (f64, f64, f64) {
    let (h1, h2, h3, g) = (norms.h1, norms.h2, norms.h3, norms.gamma_min);
    let first = 4.0 * h1 * h1 / (g * g) + h2 / g;
    let second = 44.0 * h1.powi(3) / g.powi(3) + 12.0 * h1 * h2 / (g * g) + h3 / g;
    let gap_curvature = 2.0 * h2 + 8.0 * h1 * h1 / g;
    (first, second, gap_curvature)
}

/// Jansen–Ruskai–Seiler-type comparison bound with pointwise norms:
/// [m h1(0)/gamma(0)^2 + m h1(1)/gamma(1)^2
///  + int_0^1 (m h2(s)/gamma(s)^2 + 7 m^{3/2} h1(s)^2/gamma(s)^3) ds] / T,
/// integrated by composite Simpson on at least 513 samples. `m` is the
/// ground-level degeneracy (1 for the models here).
pub fn jrs_bound<H: Hamiltonian + ?Sized>(model: &H, t: f64, m: usize) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "total time must be finite and positive, got {t}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("degeneracy m must be at least 1".into()));
    }
    let mf = m as f64;
    let m32 = mf * mf.sqrt();
    let samples = 513usize;
    let mut integrand = Vec::with_capacity(samples);
    let mut boundary = 0.0f64;
    for j in 0..samples {
        let s = j as f64 / (samples - 1) as f64;
        let h1 = spectral_norm(&model.derivative(s, 1))?;
        let h2 = spectral_norm(&model.derivative(s, 2))?;
        let vals = eigenvalues_only(&model.evaluate(s))?;
        let gap = vals[1] - vals[0];
        let scale = vals.iter().fold(0.0f64, |acc, &e| acc.max(e.abs())).max(1.0);
        if gap <= crate::linalg::GAP_REL_TOL * scale {
            return Err(Error::DegenerateGroundState { s, gap });
        }
        integrand.push(mf * h2 / (gap * gap) + 7.0 * m32 * h1 * h1 / gap.powi(3));
        if j == 0 || j == samples - 1 {
            boundary += mf * h1 / (gap * gap);
        }
    }
    let integral = composite_simpson(&integrand, 0.0, 1.0);
    Ok((boundary + integral) / t)
}

/// Times T_n = 2 n pi / kappa at which the first-order term cancels, where
/// kappa is the integral of the ground gap over [0, 1].
///
/// Applicability requires endpoint symmetry — equal gaps and equal coupling
/// strengths at s = 0 and s = 1 (checked numerically to 1e-9) — otherwise
/// the boundary contributions cannot interfere destructively and the
/// function reports `NotApplicable`.
pub fn cancellation_times<H: Hamiltonian + ?Sized>(model: &H, n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let gap0 = endpoint_gap(model, 0.0)?;
    let gap1 = endpoint_gap(model, 1.0)?;
    let gap_scale = gap0.max(gap1);
    if (gap0 - gap1).abs() > 1e-9 * gap_scale {
        return Err(Error::NotApplicable(format!(
            "endpoint gaps differ: gamma(0) = {gap0}, gamma(1) = {gap1}"
        )));
    }
    let r0 = coupling_strength(model, 0.0)?;
    let r1 = coupling_strength(model, 1.0)?;
    let coupling_scale = r0.max(r1).max(1e-12);
    if (r0 - r1).abs() > 1e-9 * coupling_scale {
        return Err(Error::NotApplicable(format!(
            "endpoint couplings differ: r(0) = {r0}, r(1) = {r1}"
        )));
    }
    let gap = |s: f64| -> f64 {
        let vals = eigenvalues_only(&model.evaluate(s)).expect("gap profile evaluation");
        vals[1] - vals[0]
    };
    let kappa = adaptive_simpson(&gap, 0.0, 1.0, 1e-10 * gap_scale.max(1e-6));
    if !(kappa > 0.0) {
        return Err(Error::NotApplicable(format!(
            "gap integral must be positive, got {kappa}"
        )));
    }
    Ok((1..=n_max)
        .map(|n| 2.0 * std::f64::consts::PI * n as f64 / kappa)
        .collect())
}

fn endpoint_gap<H: Hamiltonian + ?Sized>(model: &H, s: f64) -> Result<f64> {
    let vals = eigenvalues_only(&model.evaluate(s))?;
    let gap = vals[1] - vals[0];
    let scale = vals.iter().fold(0.0f64, |acc, &e| acc.max(e.abs())).max(1.0);
    if gap <= crate::linalg::GAP_REL_TOL * scale {
        return Err(Error::DegenerateGroundState { s, gap });
    }
    Ok(gap)
}

/// Basis-invariant coupling strength r(s) = ||(1 - P_G) H'(s) |G>|| / gap,
/// the Euclidean size of all tunneling amplitudes out of the ground state.
fn coupling_strength<H: Hamiltonian + ?Sized>(model: &H, s: f64) -> Result<f64> {
    let sp = crate::linalg::spectrum_at(model, s)?;
    let hdot = model.derivative(s, 1);
    let column = hdot.matvec(sp.ground());
    let mut total = 0.0f64;
    for nu in 1..sp.dim() {
        let de = sp.eigenvalues[nu] - sp.eigenvalues[0];
        let scale = sp.eigenvalues.iter().fold(0.0f64, |acc, &e| acc.max(e.abs())).max(1.0);
        if de.abs() <= crate::linalg::CLUSTER_REL_TOL * scale {
            continue;
        }
        let amp = crate::linalg::vdot(&sp.eigenvectors[nu], &column).norm() / de;
        total += amp * amp;
    }
    Ok(total.sqrt())
}

/// Everything the bound machinery knows about one (model, T) pair.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BoundReport {
    /// Total evolution time.
    pub t: f64,
    /// Derivative sup-norms and minimum ground gap behind every formula.
    pub norms: DerivativeNorms,
    /// Smallest gap between the ground level and any other level.
    pub min_all_gap: f64,
    /// Timescale Delta0 (first-order envelope).
    pub delta0: f64,
    /// Timescale Delta1 (intrinsic derivative scale).
    pub delta1: f64,
    /// Growth factor Gamma of the jump expansion.
    pub gamma_factor: f64,
    /// Second-order remainder R; |error - leading| <= R/T^2.
    pub remainder: f64,
    /// Third-order remainder R0 (already carrying 1/T^2).
    pub r0: f64,
    /// Closed-form bound on the second jump contribution (1/T^2 included).
    pub c2_bound: f64,
    /// Tail of the jump expansion over three or more jumps.
    pub tail: f64,
    /// Norm of the first-order term at this T.
    pub leading_norm: f64,
    /// Rigorous upper bound leading + R/T^2.
    pub upper: f64,
    /// Rigorous lower bound max(0, leading - R/T^2).
    pub lower: f64,
    /// Jansen–Ruskai–Seiler-type comparison bound (m = 1).
    pub jrs: f64,
    /// Sharper upper bound for effectively two-level evolutions, when
    /// applicable.
    pub two_level_upper: Option<f64>,
    /// Whether the two-level variant applies to this model.
    pub two_level_applicable: bool,
    /// Whether the model family depends on T (norms recomputed per T).
    pub t_dependent: bool,
}

/// Evaluate the full bound family for a model at one total time T.
///
/// Norm scans use the model's preferred grid; the leading term comes from
/// the first-order boundary expression; the two-level variant replaces the
/// generic tail with (Gamma/(h1 T))(e^{Gamma/(gamma T)} - 1) and applies to
/// two-dimensional models and to the search family, whose dynamics stays in
/// a two-dimensional invariant subspace.
pub fn bound_report(model: &Model, t: f64) -> Result<BoundReport> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "total time must be finite and positive, got {t}"
        )));
    }
    let grid = default_grid(model);
    let norms = derivative_norms(model, &grid)?;
    let min_all_gap = norms.gamma_min;
    let (delta0, delta1) = timescales(&norms, min_all_gap, t);
    let gamma = gamma_factor(&norms);
    let tail = tail_bound(gamma, &norms, t);
    let remainder = remainder_polynomial(&norms) + t * t * tail;
    let (r0, c2_bound) = low_order_remainders(&norms, t);
    let (_, leading_norm) = first_order_term(model, t)?;
    let upper = leading_norm + remainder / (t * t);
    let lower = (leading_norm - remainder / (t * t)).max(0.0);
    let jrs = jrs_bound(model, t, 1)?;
    let two_level_applicable = model.dim() == 2 || model.analytics().is_some();
    let two_level_upper = if two_level_applicable {
        let two_level_tail = if gamma == 0.0 {
            0.0
        } else {
            (gamma / (norms.h1 * t)) * (gamma / (norms.gamma_min * t)).exp_m1()
        };
        Some(leading_norm + remainder_polynomial(&norms) / (t * t) + two_level_tail)
    } else {
        None
    };
    Ok(BoundReport {
        t,
        norms,
        min_all_gap,
        delta0,
        delta1,
        gamma_factor: gamma,
        remainder,
        r0,
        c2_bound,
        tail,
        leading_norm,
        upper,
        lower,
        jrs,
        two_level_upper,
        two_level_applicable,
        t_dependent: model.t_dependent(),
    })
}
