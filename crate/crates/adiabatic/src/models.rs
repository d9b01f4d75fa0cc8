//! Hamiltonian families under study and their JSON configuration.
//!
//! Three families are provided:
//!
//! * **search** — projector interpolation H(s) = 1 - (1-s)|psi0><psi0| -
//!   s|psi1><psi1| between the uniform superposition and a marked basis
//!   state, the standard adiabatic unstructured-search Hamiltonian with full
//!   closed-form analytics;
//! * **marzlin_sanders** — a precessing two-level field whose drive frequency
//!   grows with the total time T, the classic counterexample family in which
//!   naive adiabaticity fails; a softening exponent `a` rescales the drive
//!   from resonant (a = 1) to asymptotically harmless (a < 1);
//! * **linear** — entrywise linear interpolation between two explicit
//!   Hermitian matrices.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Hamiltonian};

// ---------------------------------------------------------------------------
// Search model
// ---------------------------------------------------------------------------

/// Closed-form spectral data of the search Hamiltonian.
///
/// With theta = arccos(1/sqrt(N)) and the mixing angle phi(s), the ground and
/// first excited states live in span{psi0, psi1} while the remaining N - 2
/// levels sit at energy 1. The gap between the two tracked levels is
/// gamma(s) = sqrt(1 - 4 (1 - 1/N) s (1 - s)).
#[derive(Clone, Debug)]
pub struct SearchAnalytics {
    n: usize,
    theta: f64,
    sqrt_nm1: f64,
}

impl SearchAnalytics {
    fn new(n: usize) -> Self {
        let sqrt_nm1 = ((n - 1) as f64).sqrt();
        SearchAnalytics { n, theta: sqrt_nm1.atan(), sqrt_nm1 }
    }

    /// Hilbert-space dimension N.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// theta = arccos(1/sqrt(N)), the total rotation angle of the ground state.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Gap between the two coupled levels.
    pub fn gap(&self, s: f64) -> f64 {
        let x = 1.0 - 4.0 * (1.0 - 1.0 / self.n as f64) * s * (1.0 - s);
        x.max(0.0).sqrt()
    }

    /// Mixing angle phi(s), increasing from 0 to theta.
    pub fn phi(&self, s: f64) -> f64 {
        0.5 * ((self.sqrt_nm1 * (2.0 * s - 1.0)).atan() + self.theta)
    }

    /// d phi / d s.
    pub fn phi_dot(&self, s: f64) -> f64 {
        let u = self.sqrt_nm1 * (2.0 * s - 1.0);
        self.sqrt_nm1 / (1.0 + u * u)
    }

    /// Inverse of the mixing angle: the s with phi(s) = phi_target.
    ///
    /// phi is strictly monotone, so the inverse is the exact closed form
    /// s = (tan(2 phi - theta)/sqrt(N-1) + 1)/2, polished by one Newton step
    /// to guard the tangent evaluation near the endpoints.
    pub fn inv_phi(&self, phi_target: f64) -> f64 {
        let u = (2.0 * phi_target - self.theta).tan();
        let mut s = 0.5 * (u / self.sqrt_nm1 + 1.0);
        s = s.clamp(0.0, 1.0);
        let d = self.phi_dot(s);
        if d > 0.0 {
            s = (s - (self.phi(s) - phi_target) / d).clamp(0.0, 1.0);
        }
        s
    }

    /// Ground-state energy (1 - gamma)/2.
    pub fn e_ground(&self, s: f64) -> f64 {
        0.5 * (1.0 - self.gap(s))
    }

    /// Coupled excited energy (1 + gamma)/2.
    pub fn e_excited(&self, s: f64) -> f64 {
        0.5 * (1.0 + self.gap(s))
    }

    /// Closed-form ground state at s.
    pub fn ground_state(&self, s: f64) -> Vec<Complex64> {
        let phi = self.phi(s);
        let sin_t = self.theta.sin();
        let a = (self.theta - phi).sin() / sin_t; // coefficient of psi0
        let b = phi.sin() / sin_t; // coefficient of psi1
        self.combination(a, b)
    }

    /// Closed-form coupled excited state at s.
    pub fn excited_state(&self, s: f64) -> Vec<Complex64> {
        let phi = self.phi(s);
        let sin_t = self.theta.sin();
        let a = (self.theta - phi).cos() / sin_t;
        let b = -phi.cos() / sin_t;
        self.combination(a, b)
    }

    /// a * psi0 + b * psi1 with psi0 uniform and psi1 = e_0.
    fn combination(&self, a: f64, b: f64) -> Vec<Complex64> {
        let amp = a / (self.n as f64).sqrt();
        let mut v = vec![Complex64::new(amp, 0.0); self.n];
        v[0] += Complex64::new(b, 0.0);
        v
    }
}

/// Projector-interpolation search Hamiltonian.
#[derive(Clone, Debug)]
pub struct SearchModel {
    n: usize,
    analytics: SearchAnalytics,
}

impl SearchModel {
    fn new(n: usize) -> Self {
        SearchModel { n, analytics: SearchAnalytics::new(n) }
    }

    /// Closed-form spectral data.
    pub fn analytics(&self) -> &SearchAnalytics {
        &self.analytics
    }
}

impl Hamiltonian for SearchModel {
    fn dim(&self) -> usize {
        self.n
    }

    fn evaluate(&self, s: f64) -> CMatrix {
        let inv_n = 1.0 / self.n as f64;
        CMatrix::from_fn(self.n, |i, j| {
            let mut v = -(1.0 - s) * inv_n;
            if i == j {
                v += 1.0;
            }
            if i == 0 && j == 0 {
                v -= s;
            }
            Complex64::new(v, 0.0)
        })
    }

    fn derivative(&self, s: f64, k: usize) -> CMatrix {
        let _ = s;
        if k != 1 {
            return CMatrix::zeros(self.n);
        }
        let inv_n = 1.0 / self.n as f64;
        CMatrix::from_fn(self.n, |i, j| {
            let mut v = inv_n;
            if i == 0 && j == 0 {
                v -= 1.0;
            }
            Complex64::new(v, 0.0)
        })
    }

    fn name(&self) -> &'static str {
        "search"
    }
}

// ---------------------------------------------------------------------------
// Marzlin-Sanders model
// ---------------------------------------------------------------------------

/// One cosine component amp * cos(freq * s + phase) of a Bloch coordinate.
#[derive(Clone, Copy, Debug)]
struct Harmonic {
    amp: f64,
    freq: f64,
    phase: f64,
}

/// Precessing two-level field H(s) = b(s) . sigma / 2 with
///
/// b(s) = omega0 (cos 2 pi s, sin 2 pi s, 0)
///      + (2 pi sin(chi) / T^a) (-sin 2 pi s cos 2 chi,
///                                cos 2 pi s cos 2 chi,
///                                sin 2 chi),
///
/// where chi = omega0 s T^a. The instantaneous gap is exactly
/// sqrt(omega0^2 + (2 pi sin(chi)/T^a)^2) >= omega0. At softening a = 1 the
/// drive stays resonant with the dynamical phase no matter how large T is and
/// the adiabatic error does not decay; for a < 1 the resonance detunes and
/// the error falls off.
///
/// Each Bloch coordinate is stored as a short sum of cosines, so s-derivatives
/// of any order are exact.
#[derive(Clone, Debug)]
pub struct MsModel {
    omega0: f64,
    t_total: f64,
    softening: f64,
    ta: f64,
    components: [Vec<Harmonic>; 3],
}

impl MsModel {
    fn new(omega0: f64, t_total: f64, softening: f64) -> Self {
        let ta = t_total.powf(softening);
        let w = omega0 * ta;
        let c = PI / (2.0 * ta);
        let tp = 2.0 * PI;
        let hp = -0.5 * PI;
        let hx = vec![
            Harmonic { amp: omega0, freq: tp, phase: 0.0 },
            Harmonic { amp: -c, freq: 3.0 * w - tp, phase: 0.0 },
            Harmonic { amp: c, freq: 3.0 * w + tp, phase: 0.0 },
            Harmonic { amp: c, freq: w - tp, phase: 0.0 },
            Harmonic { amp: -c, freq: w + tp, phase: 0.0 },
        ];
        let hy = vec![
            Harmonic { amp: omega0, freq: tp, phase: hp },
            Harmonic { amp: c, freq: 3.0 * w + tp, phase: hp },
            Harmonic { amp: c, freq: 3.0 * w - tp, phase: hp },
            Harmonic { amp: -c, freq: w + tp, phase: hp },
            Harmonic { amp: -c, freq: w - tp, phase: hp },
        ];
        let hz = vec![
            Harmonic { amp: 2.0 * c, freq: w, phase: 0.0 },
            Harmonic { amp: -2.0 * c, freq: 3.0 * w, phase: 0.0 },
        ];
        MsModel { omega0, t_total, softening, ta, components: [hx, hy, hz] }
    }

    /// Bloch vector of the k-th s-derivative of H (k = 0 gives b itself).
    pub fn bloch(&self, s: f64, k: usize) -> [f64; 3] {
        let shift = k as f64 * 0.5 * PI;
        let mut out = [0.0; 3];
        for (axis, comp) in self.components.iter().enumerate() {
            let mut acc = 0.0;
            for h in comp {
                acc += h.amp * h.freq.powi(k as i32) * (h.freq * s + h.phase + shift).cos();
            }
            out[axis] = acc;
        }
        out
    }

    /// Exact instantaneous gap.
    pub fn gap(&self, s: f64) -> f64 {
        let chi = self.omega0 * s * self.ta;
        let drive = 2.0 * PI * chi.sin() / self.ta;
        (self.omega0 * self.omega0 + drive * drive).sqrt()
    }

    /// Base Larmor frequency omega0.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Total time this instance was built for.
    pub fn t_total(&self) -> f64 {
        self.t_total
    }

    /// Softening exponent a.
    pub fn softening(&self) -> f64 {
        self.softening
    }

    fn matrix_from_bloch(&self, b: [f64; 3]) -> CMatrix {
        let mut m = CMatrix::zeros(2);
        m[(0, 0)] = Complex64::new(0.5 * b[2], 0.0);
        m[(1, 1)] = Complex64::new(-0.5 * b[2], 0.0);
        m[(0, 1)] = Complex64::new(0.5 * b[0], -0.5 * b[1]);
        m[(1, 0)] = Complex64::new(0.5 * b[0], 0.5 * b[1]);
        m
    }
}

impl Hamiltonian for MsModel {
    fn dim(&self) -> usize {
        2
    }

    fn evaluate(&self, s: f64) -> CMatrix {
        self.matrix_from_bloch(self.bloch(s, 0))
    }

    fn derivative(&self, s: f64, k: usize) -> CMatrix {
        if !(1..=3).contains(&k) {
            return CMatrix::zeros(2);
        }
        self.matrix_from_bloch(self.bloch(s, k))
    }

    fn t_dependent(&self) -> bool {
        true
    }

    fn time_scale(&self) -> f64 {
        let fmax = 3.0 * self.omega0 * self.ta + 2.0 * PI;
        (2.0 * PI / fmax).min(1.0)
    }

    fn suggested_samples(&self) -> usize {
        let cycles = (2.0 * self.omega0 * self.ta + 2.0 * PI) / (2.0 * PI);
        let dense = (24.0 * cycles).ceil() as usize;
        dense.max(1025) + 1
    }

    fn name(&self) -> &'static str {
        "marzlin_sanders"
    }
}

// ---------------------------------------------------------------------------
// Linear interpolation model
// ---------------------------------------------------------------------------

/// Entrywise linear interpolation H(s) = (1 - s) H0 + s H1.
#[derive(Clone, Debug)]
pub struct LinearModel {
    h0: CMatrix,
    h1: CMatrix,
    hdot: CMatrix,
}

impl LinearModel {
    fn new(h0: CMatrix, h1: CMatrix) -> Result<Self> {
        if h1.dim() != h0.dim() {
            return Err(Error::DimensionMismatch { expected: h0.dim(), got: h1.dim() });
        }
        for m in [&h0, &h1] {
            let deviation = m.hermiticity_deviation();
            let tolerance = crate::linalg::HERMITICITY_REL_TOL * m.max_abs();
            if deviation > tolerance {
                return Err(Error::NonHermitian { deviation, tolerance });
            }
        }
        let hdot = h1.sub(&h0);
        Ok(LinearModel { h0, h1, hdot })
    }

    /// Endpoint H(0).
    pub fn h0(&self) -> &CMatrix {
        &self.h0
    }

    /// Endpoint H(1).
    pub fn h1(&self) -> &CMatrix {
        &self.h1
    }
}

impl Hamiltonian for LinearModel {
    fn dim(&self) -> usize {
        self.h0.dim()
    }

    fn evaluate(&self, s: f64) -> CMatrix {
        CMatrix::linear_combination(&[(1.0 - s, &self.h0), (s, &self.h1)])
    }

    fn derivative(&self, _s: f64, k: usize) -> CMatrix {
        if k == 1 {
            self.hdot.clone()
        } else {
            CMatrix::zeros(self.dim())
        }
    }

    fn name(&self) -> &'static str {
        "linear"
    }
}

// ---------------------------------------------------------------------------
// Model: the closed family union
// ---------------------------------------------------------------------------

/// Any of the supported Hamiltonian families.
#[derive(Clone, Debug)]
pub enum Model {
    /// Projector-interpolation search.
    Search(SearchModel),
    /// Precessing two-level field with softening exponent.
    MarzlinSanders(MsModel),
    /// Generic linear interpolation.
    Linear(LinearModel),
}

impl Model {
    /// Search Hamiltonian on N basis states (N >= 2).
    pub fn search(n: usize) -> Result<Model> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "search model needs N >= 2, got {n}"
            )));
        }
        Ok(Model::Search(SearchModel::new(n)))
    }

    /// Precessing two-level field for total time `t_total` with base
    /// frequency `omega0 > 0` and softening exponent `softening` in [0, 1].
    pub fn marzlin_sanders(omega0: f64, t_total: f64, softening: f64) -> Result<Model> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be positive and finite, got {omega0}"
            )));
        }
        if !(t_total > 0.0) || !t_total.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "total time must be positive and finite, got {t_total}"
            )));
        }
        if !(0.0..=1.0).contains(&softening) {
            return Err(Error::InvalidParameter(format!(
                "softening exponent must lie in [0, 1], got {softening}"
            )));
        }
        Ok(Model::MarzlinSanders(MsModel::new(omega0, t_total, softening)))
    }

    /// Linear interpolation between two Hermitian matrices.
    pub fn linear(h0: CMatrix, h1: CMatrix) -> Result<Model> {
        Ok(Model::Linear(LinearModel::new(h0, h1)?))
    }

    /// Fixed two-level diagnostic model with ground energy 0 and excited
    /// energy 1 + s: a pure dephasing ramp with no level coupling.
    pub fn toy_two_level() -> Model {
        Model::linear(CMatrix::diag(&[0.0, 1.0]), CMatrix::diag(&[0.0, 2.0]))
            .expect("static diagonal matrices are Hermitian")
    }

    /// Closed-form analytics, available for the search family.
    pub fn analytics(&self) -> Option<&SearchAnalytics> {
        match self {
            Model::Search(m) => Some(m.analytics()),
            _ => None,
        }
    }

    /// Access to the precessing-field internals, when applicable.
    pub fn marzlin(&self) -> Option<&MsModel> {
        match self {
            Model::MarzlinSanders(m) => Some(m),
            _ => None,
        }
    }

    fn inner(&self) -> &dyn Hamiltonian {
        match self {
            Model::Search(m) => m,
            Model::MarzlinSanders(m) => m,
            Model::Linear(m) => m,
        }
    }
}

impl Hamiltonian for Model {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn evaluate(&self, s: f64) -> CMatrix {
        self.inner().evaluate(s)
    }
    fn derivative(&self, s: f64, k: usize) -> CMatrix {
        self.inner().derivative(s, k)
    }
    fn t_dependent(&self) -> bool {
        self.inner().t_dependent()
    }
    fn time_scale(&self) -> f64 {
        self.inner().time_scale()
    }
    fn suggested_samples(&self) -> usize {
        self.inner().suggested_samples()
    }
    fn analytic_derivatives(&self) -> bool {
        self.inner().analytic_derivatives()
    }
    fn name(&self) -> &'static str {
        self.inner().name()
    }
}

/// Closed-form (ground, excited) pair of the search model.
///
/// Fails with `NoAnalytics` for families without closed-form eigenvectors.
pub fn search_eigvectors(model: &Model, s: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let an = model
        .analytics()
        .ok_or_else(|| Error::NoAnalytics(model.name().to_string()))?;
    Ok((an.ground_state(s), an.excited_state(s)))
}

// ---------------------------------------------------------------------------
// JSON configuration
// ---------------------------------------------------------------------------

/// Declarative model description, as found in sweep configuration files.
///
/// ```json
/// {"model": "search", "N": 4}
/// {"model": "marzlin_sanders", "omega0": 1.0, "softening": 0.5}
/// {"model": "linear", "H0": [[[0.0, 0.0]]], "H1": [[[1.0, 0.0]]]}
/// ```
///
/// Matrix entries are `[re, im]` pairs in row-major nested arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Family name: "search", "marzlin_sanders", or "linear".
    pub model: String,
    /// Dimension for the search family.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Base frequency for the precessing family (default 1.0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    /// Softening exponent for the precessing family (default 1.0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub softening: Option<f64>,
    /// Left endpoint for the linear family.
    #[serde(rename = "H0", default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<Vec<Vec<[f64; 2]>>>,
    /// Right endpoint for the linear family.
    #[serde(rename = "H1", default, skip_serializing_if = "Option::is_none")]
    pub h1: Option<Vec<Vec<[f64; 2]>>>,
}

impl ModelConfig {
    /// Convenience constructor for the search family.
    pub fn search(n: usize) -> Self {
        ModelConfig {
            model: "search".to_string(),
            n: Some(n),
            omega0: None,
            softening: None,
            h0: None,
            h1: None,
        }
    }

    /// Convenience constructor for the precessing family.
    pub fn marzlin_sanders(omega0: f64, softening: f64) -> Self {
        ModelConfig {
            model: "marzlin_sanders".to_string(),
            n: None,
            omega0: Some(omega0),
            softening: Some(softening),
            h0: None,
            h1: None,
        }
    }

    /// Instantiate the model for a given total time T.
    ///
    /// Only the precessing family actually depends on T; the other families
    /// ignore it. Fields that do not belong to the requested family are
    /// rejected so typos cannot silently change meaning.
    pub fn build(&self, t_total: f64) -> Result<Model> {
        match self.model.as_str() {
            "search" => {
                self.reject_foreign("search", &[self.omega0.is_some().then_some("omega0"),
                    self.softening.is_some().then_some("softening"),
                    self.h0.is_some().then_some("H0"),
                    self.h1.is_some().then_some("H1")])?;
                let n = self.n.ok_or_else(|| {
                    Error::ParseError("model 'search' requires field 'N'".to_string())
                })?;
                Model::search(n)
            }
            "marzlin_sanders" => {
                self.reject_foreign("marzlin_sanders", &[self.n.is_some().then_some("N"),
                    self.h0.is_some().then_some("H0"),
                    self.h1.is_some().then_some("H1")])?;
                let omega0 = self.omega0.unwrap_or(1.0);
                let softening = self.softening.unwrap_or(1.0);
                Model::marzlin_sanders(omega0, t_total, softening)
            }
            "linear" => {
                self.reject_foreign("linear", &[self.n.is_some().then_some("N"),
                    self.omega0.is_some().then_some("omega0"),
                    self.softening.is_some().then_some("softening")])?;
                let h0 = self.h0.as_ref().ok_or_else(|| {
                    Error::ParseError("model 'linear' requires field 'H0'".to_string())
                })?;
                let h1 = self.h1.as_ref().ok_or_else(|| {
                    Error::ParseError("model 'linear' requires field 'H1'".to_string())
                })?;
                Model::linear(matrix_from_entries("H0", h0)?, matrix_from_entries("H1", h1)?)
            }
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }

    fn reject_foreign(&self, family: &str, flags: &[Option<&str>]) -> Result<()> {
        for name in flags.iter().flatten() {
            return Err(Error::ParseError(format!(
                "field '{name}' does not apply to model '{family}'"
            )));
        }
        Ok(())
    }
}

/// Parse a JSON model configuration and instantiate it for total time T.
pub fn load_model(text: &str, t_total: f64) -> Result<Model> {
    let cfg: ModelConfig =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    cfg.build(t_total)
}

/// Convert nested `[re, im]` rows into a square matrix.
fn matrix_from_entries(name: &str, rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::ParseError(format!("matrix '{name}' is empty")));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::ParseError(format!(
                "matrix '{name}' is not square: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    Ok(CMatrix::from_fn(n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}
