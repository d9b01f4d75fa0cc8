//! Discrete jump-path machinery and the continuous jump-contribution
//! integrals.
//!
//! The discrete side multiplies per-step spectral projectors along a labelled
//! path and compares against the closed-form rank-one value (a beta product
//! suppressed by one power of the step count per jump). The continuous side
//! evaluates the first- and second-order jump contributions C1, C2 by panel
//! quadrature locked to the fastest dynamical phase, the first-order boundary
//! term, and the phase-interference diagnostic for two-level models.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    canonicalize_anchor, eigenvalues_only, gauge_transport, spectrum_at, vdot, CMatrix,
    GaugeField, Hamiltonian, Spectrum, CLUSTER_REL_TOL, GAP_REL_TOL,
};
use crate::quad::{gl16_nodes, gl16_sum, gl16_sum_complex};

/// Hard cap on quadrature panels per refinement pass.
pub const PANEL_CAP: usize = 1 << 20;

/// Tunneling amplitude per unit of dimensionless time between two levels of
/// a transported spectrum: beta_{n,m} = <n|dH/ds|m> / (E_n - E_m), and zero
/// on the diagonal or on degenerate pairs.
pub fn beta<H: Hamiltonian + ?Sized>(
    model: &H,
    spectrum: &Spectrum,
    n: usize,
    m: usize,
) -> Result<Complex64> {
    let dim = spectrum.dim();
    if n >= dim || m >= dim {
        return Err(Error::InvalidParameter(format!(
            "level index out of range: ({n}, {m}) for dimension {dim}"
        )));
    }
    if n == m {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let de = spectrum.eigenvalues[n] - spectrum.eigenvalues[m];
    let scale = spectrum
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &e| acc.max(e.abs()))
        .max(1.0);
    if de.abs() <= CLUSTER_REL_TOL * scale {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let hdot = model.derivative(spectrum.s, 1);
    let column = hdot.matvec(&spectrum.eigenvectors[m]);
    Ok(vdot(&spectrum.eigenvectors[n], &column) / de)
}

/// All pairwise beta amplitudes of one transported spectrum, row-major:
/// entry n*dim + m holds beta_{n,m}.
fn beta_matrix<H: Hamiltonian + ?Sized>(model: &H, spectrum: &Spectrum) -> Vec<Complex64> {
    let dim = spectrum.dim();
    let hdot = model.derivative(spectrum.s, 1);
    let scale = spectrum
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &e| acc.max(e.abs()))
        .max(1.0);
    let columns: Vec<Vec<Complex64>> = spectrum
        .eigenvectors
        .iter()
        .map(|v| hdot.matvec(v))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for n in 0..dim {
        for m in 0..dim {
            if n == m {
                continue;
            }
            let de = spectrum.eigenvalues[n] - spectrum.eigenvalues[m];
            if de.abs() <= CLUSTER_REL_TOL * scale {
                continue;
            }
            out[n * dim + m] = vdot(&spectrum.eigenvectors[n], &columns[m]) / de;
        }
    }
    out
}

/// A labelled jump path: level labels with the ground state first, and the
/// strictly increasing times at which the path enters each label.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpPath {
    labels: Vec<usize>,
    times: Vec<f64>,
}

impl JumpPath {
    /// Validate and build a path. `labels[0]` must be 0 (the ground state),
    /// `times[0]` must be 0, times must be strictly increasing and at most 1,
    /// and consecutive labels must differ.
    pub fn new(labels: Vec<usize>, times: Vec<f64>) -> Result<JumpPath> {
        if labels.is_empty() {
            return Err(Error::InvalidPath("path needs at least one label".into()));
        }
        if labels.len() != times.len() {
            return Err(Error::InvalidPath(format!(
                "labels and times must pair up: {} labels vs {} times",
                labels.len(),
                times.len()
            )));
        }
        if labels[0] != 0 {
            return Err(Error::InvalidPath(format!(
                "paths start in the ground state (label 0), got {}",
                labels[0]
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidPath(format!(
                "paths start at s = 0, got {}",
                times[0]
            )));
        }
        for pair in labels.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidPath(format!(
                    "consecutive labels must differ, got repeated {}",
                    pair[0]
                )));
            }
        }
        for pair in times.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidPath(format!(
                    "jump times must increase strictly: {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        let last = *times.last().expect("nonempty");
        if !(last <= 1.0) {
            return Err(Error::InvalidPath(format!("jump times must stay within [0, 1], got {last}")));
        }
        Ok(JumpPath { labels, times })
    }

    /// Level labels, ground state first.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Entry times, one per label, starting at 0.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of jumps q (one less than the number of labels).
    pub fn jumps(&self) -> usize {
        self.labels.len() - 1
    }

    /// True when the path ends away from the ground state and therefore
    /// contributes to the adiabatic error.
    pub fn is_non_adiabatic(&self) -> bool {
        *self.labels.last().expect("nonempty") != 0
    }
}

/// Both sides of the discrete path identity and their difference.
#[derive(Clone, Debug)]
pub struct PathCheck {
    /// Explicit product of per-step projectors along the path.
    pub product: CMatrix,
    /// Rank-one closed form: |nu_last(1)><nu_first(0)| times the beta product
    /// over jumps divided by L^jumps.
    pub formula: CMatrix,
    /// Spectral norm of (product - formula).
    pub residual: f64,
    /// Residual scaled by L^jumps, comparable to the formula's own size.
    pub normalized_residual: f64,
}

/// Multiply the spectral projectors of a labelled path over an L-step grid
/// and compare against the rank-one beta-product formula.
///
/// Each jump time must sit on the grid (an integer multiple of 1/L up to
/// 1e-9), and L must be at least ten steps per jump.
pub fn path_product_check<H: Hamiltonian + ?Sized>(
    model: &H,
    path: &JumpPath,
    l: usize,
) -> Result<PathCheck> {
    let q = path.jumps();
    if l == 0 || l < 10 * q {
        return Err(Error::InvalidParameter(format!(
            "grid too coarse: L = {l} for a {q}-jump path (need L >= 10q and L >= 1)"
        )));
    }
    let dim = model.dim();
    for &label in path.labels() {
        if label >= dim {
            return Err(Error::InvalidPath(format!(
                "label {label} out of range for dimension {dim}"
            )));
        }
    }
    let mut jump_steps = Vec::with_capacity(q);
    for &time in &path.times()[1..] {
        let exact = time * l as f64;
        let rounded = exact.round();
        if (exact - rounded).abs() > 1e-9 {
            return Err(Error::TimesNotOnGrid { time, grid: l });
        }
        jump_steps.push(rounded as usize);
    }

    let field = GaugeField::build(model, l)?;
    // Projector chain: rightmost factor is the first step j = 1; the path
    // occupies label `seg` on steps j in (jump_steps[seg-1], jump_steps[seg]].
    let mut product = CMatrix::identity(dim);
    let mut seg = 0usize;
    for j in 1..=l {
        while seg < q && j > jump_steps[seg] {
            seg += 1;
        }
        let v = &field.spectrum(j).eigenvectors[path.labels()[seg]];
        product = apply_projector(v, &product);
    }

    let mut beta_product = Complex64::new(1.0, 0.0);
    for (ell, &j) in jump_steps.iter().enumerate() {
        let sp = field.spectrum(j);
        beta_product *= beta(model, sp, path.labels()[ell + 1], path.labels()[ell])?;
    }
    let suppression = (l as f64).powi(q as i32);
    let scale = beta_product / suppression;
    let v_first = &field.spectrum(0).eigenvectors[path.labels()[0]];
    let v_last = &field.spectrum(l).eigenvectors[*path.labels().last().expect("nonempty")];
    let formula = CMatrix::from_fn(dim, |i, j| v_last[i] * v_first[j].conj() * scale);

    let residual = crate::linalg::spectral_norm(&product.sub(&formula))?;
    Ok(PathCheck {
        product,
        formula,
        residual,
        normalized_residual: residual * suppression,
    })
}

/// out = |v><v| * m.
fn apply_projector(v: &[Complex64], m: &CMatrix) -> CMatrix {
    let n = v.len();
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for (i, vi) in v.iter().enumerate() {
        let c = vi.conj();
        for j in 0..n {
            row[j] += c * m[(i, j)];
        }
    }
    CMatrix::from_fn(n, |i, j| v[i] * row[j])
}

/// One evaluated jump contribution C_q.
#[derive(Clone, Debug)]
pub struct JumpContribution {
    /// Order q of the contribution (1 or 2).
    pub order: usize,
    /// Coefficients on the transported eigenvectors |nu(1)> in the
    /// phase-stripped frame; the ground entry (index 0) is zero.
    pub amplitude_vector: Vec<Complex64>,
    /// Euclidean norm of the amplitude vector.
    pub norm: f64,
    /// Quadrature panels used by the accepted pass.
    pub panels: usize,
    /// Number of panel doublings performed.
    pub refinements: usize,
}

/// Evaluate the first- or second-order jump contribution by oscillatory
/// panel quadrature.
///
/// Panels are sized so that each spans at most pi/4 of the fastest dynamical
/// phase gamma_max * T, then doubled until the amplitude vector is stable to
/// `quad_tol` (relative, floored at 1e-12). The nested q = 2 integral reuses
/// the same panel rule in the outer variable.
pub fn jump_contribution<H: Hamiltonian + ?Sized>(
    model: &H,
    t: f64,
    order: usize,
    quad_tol: f64,
) -> Result<JumpContribution> {
    if !(order == 1 || order == 2) {
        return Err(Error::InvalidParameter(format!(
            "jump contributions are implemented for orders 1 and 2, got {order}"
        )));
    }
    if !(quad_tol > 0.0 && quad_tol <= 1e-2) {
        return Err(Error::InvalidParameter(format!(
            "quad_tol must lie in (0, 1e-2], got {quad_tol}"
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "total time must be finite and nonnegative, got {t}"
        )));
    }

    // Fastest dynamical phase over the interval, from an eigenvalue scan.
    let mut gamma_max = 0.0f64;
    for j in 0..=128 {
        let s = j as f64 / 128.0;
        let vals = eigenvalues_only(&model.evaluate(s))?;
        gamma_max = gamma_max.max(vals[vals.len() - 1] - vals[0]);
    }
    let p0_real = (4.0 * gamma_max * t / std::f64::consts::PI).ceil().max(8.0);
    if p0_real > PANEL_CAP as f64 {
        return Err(Error::QuadratureBudget { panels: p0_real as usize, cap: PANEL_CAP });
    }

    let mut panels = p0_real as usize;
    let mut prev = contribution_pass(model, t, order, panels)?;
    let mut refinements = 0usize;
    loop {
        let next = panels
            .checked_mul(2)
            .filter(|&p| p <= PANEL_CAP)
            .ok_or(Error::QuadratureBudget { panels: panels.saturating_mul(2), cap: PANEL_CAP })?;
        let cur = contribution_pass(model, t, order, next)?;
        refinements += 1;
        let delta: f64 = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let norm: f64 = cur.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        // Relative stability with an absolute floor: amplitudes at the
        // 1e-12 level are numerically zero and need no further refinement.
        if delta <= (quad_tol * norm).max(1e-12) {
            return Ok(JumpContribution {
                order,
                amplitude_vector: cur,
                norm,
                panels: next,
                refinements,
            });
        }
        prev = cur;
        panels = next;
    }
}

/// One quadrature pass at a fixed panel count. Returns the amplitude vector
/// (entry 0, the ground component, is zero).
fn contribution_pass<H: Hamiltonian + ?Sized>(
    model: &H,
    t: f64,
    order: usize,
    panels: usize,
) -> Result<Vec<Complex64>> {
    let dim = model.dim();
    if dim < 2 {
        return Err(Error::InvalidParameter(
            "jump contributions need at least two levels".into(),
        ));
    }
    let mut current = canonicalize_anchor(model, spectrum_at(model, 0.0)?)?;
    check_ground_gap(&current)?;
    // Cumulative gap integrals Phi_nu(s) = int_0^s (E_nu - E_0), tracked at
    // panel edges; per-level running inner integrals F_nu for order 2.
    let mut phi_edge = vec![0.0f64; dim];
    let mut f_edge = vec![Complex64::new(0.0, 0.0); dim];
    let mut edge_betas = beta_matrix(model, &current);
    let mut amplitude = vec![Complex64::new(0.0, 0.0); dim];

    let mut node_gamma = vec![[0.0f64; 16]; dim];
    let mut node_phi = vec![[0.0f64; 16]; dim];
    let mut g_vals = vec![[Complex64::new(0.0, 0.0); 16]; dim];
    let mut c2_vals = vec![[Complex64::new(0.0, 0.0); 16]; dim];

    for p in 0..panels {
        let a = p as f64 / panels as f64;
        let b = (p + 1) as f64 / panels as f64;
        let xs = gl16_nodes(a, b);
        let edge_gamma: Vec<f64> = (0..dim)
            .map(|nu| current.eigenvalues[nu] - current.eigenvalues[0])
            .collect();
        let edge_g: Vec<Complex64> = (0..dim)
            .map(|nu| edge_betas[nu * dim] * Complex64::from_polar(1.0, t * phi_edge[nu]))
            .collect();
        // Trapezoid accumulators for F_nu at in-panel nodes (order 2 only).
        let mut f_running = f_edge.clone();
        let mut prev_x = a;
        let mut prev_g = edge_g.clone();

        for (k, &x) in xs.iter().enumerate() {
            let fresh = spectrum_at(model, x)?;
            current = gauge_transport(&current, &fresh)?;
            check_ground_gap(&current)?;
            let betas = beta_matrix(model, &current);
            // Phase integrals to this node: edge value plus a three-point
            // Simpson rule on [a, x] with an eigenvalue-only midpoint.
            let mid_vals = eigenvalues_only(&model.evaluate(0.5 * (a + x)))?;
            for nu in 0..dim {
                let gamma = current.eigenvalues[nu] - current.eigenvalues[0];
                node_gamma[nu][k] = gamma;
                let gamma_mid = mid_vals[nu] - mid_vals[0];
                node_phi[nu][k] =
                    phi_edge[nu] + (x - a) / 6.0 * (edge_gamma[nu] + 4.0 * gamma_mid + gamma);
            }
            for nu in 1..dim {
                g_vals[nu][k] =
                    betas[nu * dim] * Complex64::from_polar(1.0, t * node_phi[nu][k]);
            }
            if order == 2 {
                for nu in 1..dim {
                    f_running[nu] += (g_vals[nu][k] + prev_g[nu]) * (0.5 * (x - prev_x));
                }
                for nu2 in 1..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for nu1 in 1..dim {
                        if nu1 == nu2 {
                            continue;
                        }
                        let phase = Complex64::from_polar(
                            1.0,
                            t * (node_phi[nu2][k] - node_phi[nu1][k]),
                        );
                        acc += betas[nu2 * dim + nu1] * phase * f_running[nu1];
                    }
                    c2_vals[nu2][k] = acc;
                }
                prev_x = x;
                for nu in 1..dim {
                    prev_g[nu] = g_vals[nu][k];
                }
            }
        }

        // Panel totals: amplitudes, edge phases, and edge inner integrals.
        for nu in 1..dim {
            if order == 1 {
                amplitude[nu] += gl16_sum_complex(a, b, &g_vals[nu]);
            } else {
                amplitude[nu] += gl16_sum_complex(a, b, &c2_vals[nu]);
                f_edge[nu] += gl16_sum_complex(a, b, &g_vals[nu]);
            }
            phi_edge[nu] += gl16_sum(a, b, &node_gamma[nu]);
        }
        // Transport to the closing edge and refresh edge quantities.
        let closing = spectrum_at(model, b)?;
        current = gauge_transport(&current, &closing)?;
        check_ground_gap(&current)?;
        edge_betas = beta_matrix(model, &current);
    }
    Ok(amplitude)
}

fn check_ground_gap(sp: &Spectrum) -> Result<()> {
    if sp.dim() < 2 {
        return Ok(());
    }
    let gap = sp.eigenvalues[1] - sp.eigenvalues[0];
    let scale = sp.eigenvalues.iter().fold(0.0f64, |m, &e| m.max(e.abs())).max(1.0);
    if gap <= GAP_REL_TOL * scale {
        return Err(Error::DegenerateGroundState { s: sp.s, gap });
    }
    Ok(())
}

/// First-order (boundary) term of the adiabatic expansion.
///
/// Returns per-level coefficients on the transported |nu(1)> in the
/// phase-stripped frame — beta_nu(1) e^{i T Phi_nu(1)} / (i gamma_nu(1) T)
/// minus beta_nu(0) / (i gamma_nu(0) T) — together with the Euclidean norm.
/// The ground entry (index 0) is zero.
pub fn first_order_term<H: Hamiltonian + ?Sized>(
    model: &H,
    t: f64,
) -> Result<(Vec<Complex64>, f64)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "total time must be finite and positive, got {t}"
        )));
    }
    let steps = 2 * (model.suggested_samples().saturating_sub(1)).max(1024);
    let field = GaugeField::build(model, steps)?;
    let last = field.steps();
    let sp0 = field.spectrum(0);
    let sp1 = field.spectrum(last);
    let dim = sp0.dim();
    let inv_i = Complex64::new(0.0, -1.0);
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for nu in 1..dim {
        let scale0 = sp0.eigenvalues.iter().fold(0.0f64, |m, &e| m.max(e.abs())).max(1.0);
        let scale1 = sp1.eigenvalues.iter().fold(0.0f64, |m, &e| m.max(e.abs())).max(1.0);
        let gamma0 = sp0.eigenvalues[nu] - sp0.eigenvalues[0];
        let gamma1 = sp1.eigenvalues[nu] - sp1.eigenvalues[0];
        let mut coeff = Complex64::new(0.0, 0.0);
        if gamma1 > CLUSTER_REL_TOL * scale1 {
            let b1 = beta(model, sp1, nu, 0)?;
            let phase = Complex64::from_polar(1.0, t * field.cumulative_gap(nu, last));
            coeff += b1 * phase * inv_i / (gamma1 * t);
        }
        if gamma0 > CLUSTER_REL_TOL * scale0 {
            let b0 = beta(model, sp0, nu, 0)?;
            coeff -= b0 * inv_i / (gamma0 * t);
        }
        out[nu] = coeff;
    }
    let norm = out.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ok((out, norm))
}

/// Phase-interference diagnostic for two-level models: the unit phasors
/// exp(-i T int_{s1}^{1} gamma) accumulated from a jump at s1 = j/(count-1)
/// to the end of the evolution.
pub fn one_jump_phasors<H: Hamiltonian + ?Sized>(
    model: &H,
    t: f64,
    count: usize,
) -> Result<Vec<Complex64>> {
    if model.dim() != 2 {
        return Err(Error::InvalidParameter(format!(
            "phasor diagnostic tracks exactly two levels, model has {}",
            model.dim()
        )));
    }
    if count < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 phasors, got {count}"
        )));
    }
    // Grid chosen so every jump time lands exactly on a grid point.
    let per = (2048 + count - 2) / (count - 1);
    let steps = (count - 1) * per;
    let field = GaugeField::build(model, steps)?;
    let total = field.cumulative_gap(1, steps);
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let remaining = total - field.cumulative_gap(1, j * per);
        out.push(Complex64::from_polar(1.0, -t * remaining));
    }
    Ok(out)
}
